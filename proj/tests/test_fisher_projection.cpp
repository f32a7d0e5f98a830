#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mfvi/errors.hpp"
#include "mfvi/fisher.hpp"
#include "mfvi/projection.hpp"
#include "mfvi/rng.hpp"
#include "mfvi/special.hpp"
#include "mfvi/synthetic.hpp"
#include "oracles.hpp"

using namespace mfvi;

TEST_CASE("normal model Fisher matrix is the textbook diagonal") {
    NormalModel model(Eigen::VectorXd::Zero(3), NormalPrior{0.0, 4.0, 2.0, 3.0});
    const Eigen::Vector2d theta(1.0, 2.5);  // (mu, sigma^2)
    const FisherBundle bundle = fisher_bundle(model, theta);
    CHECK(bundle.V(0, 0) == doctest::Approx(1.0 / 2.5).epsilon(1e-14));
    CHECK(bundle.V(1, 1) == doctest::Approx(1.0 / (2.0 * 2.5 * 2.5)).epsilon(1e-14));
    CHECK(bundle.V(0, 1) == doctest::Approx(0.0));
    CHECK(bundle.V_s.isZero(0.0));
    CHECK(!bundle.has_latent());

    // Monte Carlo average of minus the sample Hessian reproduces it
    std::mt19937_64 engine(3);
    std::normal_distribution<double> gauss(theta[0], std::sqrt(theta[1]));
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    const int m = 400000;
    for (int s = 0; s < m; ++s) {
        const double x = gauss(engine);
        const double r = x - theta[0];
        const double v = theta[1];
        // -d2/dmu2 = 1/v; -d2/dmu dv = r/v^2; -d2/dv2 = r^2/v^3 - 1/(2 v^2)
        acc(0, 0) += 1.0 / v;
        acc(0, 1) += r / (v * v);
        acc(1, 1) += r * r / (v * v * v) - 0.5 / (v * v);
    }
    acc(1, 0) = acc(0, 1);
    acc /= m;
    CHECK((acc - bundle.V).cwiseAbs().maxCoeff() <= 5e-3);

    // prior log density at theta*
    const double expected_prior =
        -0.5 * std::log(2.0 * M_PI * 4.0) - 1.0 / 8.0 +
        2.0 * std::log(3.0) - std::lgamma(2.0) - 3.0 * std::log(2.5) - 3.0 / 2.5;
    CHECK(bundle.prior_log_density_at_theta_star == doctest::Approx(expected_prior).epsilon(1e-12));
}

TEST_CASE("probit Fisher in one dimension matches a quadrature oracle") {
    // x ~ N(0, 1), beta* = 0.8, well specified:
    // V = E[phi^2(x b)/(Phi (1-Phi)) x^2], V_c = E[x^2] = 1.
    const double beta = 0.8;
    ProbitPopulation population{Eigen::MatrixXd::Identity(1, 1),
                                (Eigen::VectorXd(1) << beta).finished()};
    const FisherBundle bundle =
        fisher_bundle_probit(population, 1, population.beta, Eigen::MatrixXd::Identity(1, 1),
                             1000000, 5);
    auto integrand = [&](double x) {
        const double eta = x * beta;
        const double pdf = oracles::std_normal_pdf(eta);
        const double cdf = normal_cdf(eta);
        return pdf * pdf / (cdf * (1.0 - cdf)) * x * x * oracles::std_normal_pdf(x);
    };
    const double v_quadrature = oracles::integrate(integrand, -10.0, 10.0, 1e-12);
    CHECK(bundle.V(0, 0) == doctest::Approx(v_quadrature).epsilon(0.01));
    CHECK(bundle.V_c(0, 0) == doctest::Approx(1.0));
    CHECK((bundle.V_c - bundle.V - bundle.V_s).cwiseAbs().maxCoeff() == 0.0);
    CHECK(bundle.V_s(0, 0) > 0.0);  // latent augmentation always loses information
}

TEST_CASE("probit Fisher V_c is the leading feature covariance block") {
    ProbitPopulation population{probit_sigma_ar1(5, 0.6), probit_beta_decay(5, 0.8, 3)};
    const FisherBundle bundle = fisher_bundle_probit(
        population, 3, population.beta.head(3), Eigen::MatrixXd::Identity(3, 3), 50000, 7);
    CHECK((bundle.V_c - probit_sigma_ar1(5, 0.6).topLeftCorner(3, 3)).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("non positive definite Monte Carlo estimates are rejected") {
    ProbitPopulation population{probit_sigma_ar1(4, 0.5), probit_beta_decay(4, 0.8, 4)};
    // 2 samples in 4 dimensions cannot produce a PD matrix
    CHECK_THROWS_AS(fisher_bundle_probit(population, 4, population.beta,
                                         Eigen::MatrixXd::Identity(4, 4), 2, 3),
                    NumericError);
}

TEST_CASE("KL projection of a well-specified probit candidate recovers the truth") {
    ProbitPopulation population{probit_sigma_ar1(3, 0.4), probit_beta_decay(3, 0.8, 3)};
    const KlProjection projection = kl_projection_probit(population, 3, 400000, 9);
    CHECK((projection.theta_star - population.beta).cwiseAbs().maxCoeff() <= 0.02);
    CHECK(!projection.objective_trace.empty());
}

TEST_CASE("under-specified probit projection is stable across independent runs") {
    ProbitPopulation population{probit_sigma_ar1(10, 0.8), probit_beta_decay(10, 0.8, 5)};
    const KlProjection a = kl_projection_probit(population, 3, 200000, 1);
    const KlProjection b = kl_projection_probit(population, 3, 200000, 2);
    CHECK((a.theta_star - b.theta_star).cwiseAbs().maxCoeff() <= 2e-2);
    // the projection is not the truncated truth: dropped correlated signal
    // attenuates the kept coefficients through the inflated latent noise
    CHECK(std::abs(a.theta_star[0] - population.beta[0]) > 0.05);
    CHECK(a.theta_star[0] > 0.0);
}

TEST_CASE("normal KL projection is moment matching") {
    // true distribution: centered exponential (mean 2), clearly non-normal
    std::mt19937_64 engine(13);
    std::exponential_distribution<double> expo(0.5);
    Eigen::VectorXd samples(200000);
    for (Eigen::Index i = 0; i < samples.size(); ++i) {
        samples[i] = expo(engine);
    }
    const KlProjection projection = kl_projection_normal(samples);
    const double mean = samples.mean();
    const double var = (samples.array() - mean).square().sum() / samples.size();
    CHECK(projection.theta_star[0] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(projection.theta_star[1] == doctest::Approx(var).epsilon(1e-12));
    CHECK(projection.theta_star[0] == doctest::Approx(2.0).epsilon(0.02));
    CHECK(projection.theta_star[1] == doctest::Approx(4.0).epsilon(0.05));
}
