#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mfvi/factors.hpp"
#include "oracles.hpp"

using namespace mfvi;

TEST_CASE("kl_gaussian closed-form examples") {
    MultivariateGaussianFactor q, p;
    q.mean = Eigen::Vector2d::Zero();
    q.covariance = Eigen::Matrix2d::Identity();
    p = q;
    CHECK(kl_gaussian(q, p) == doctest::Approx(0.0).epsilon(1e-15));

    p.covariance = 2.0 * Eigen::Matrix2d::Identity();
    CHECK(kl_gaussian(q, p) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-13));

    // diagonalized precision against the full covariance, 2x2 case:
    // KL(N(m, diag), N(m, S)) with diag the inverse of diag(S^-1).
    Eigen::Matrix2d s;
    s << 2.0, 0.7, 0.7, 1.1;
    const Eigen::Matrix2d prec = s.inverse();
    MultivariateGaussianFactor qd, pf;
    qd.mean = Eigen::Vector2d(0.3, -0.2);
    qd.covariance = prec.diagonal().cwiseInverse().asDiagonal();
    pf.mean = qd.mean;
    pf.covariance = s;
    const double direct =
        0.5 * (std::log(s.determinant() / qd.covariance.determinant()) +
               (s.inverse() * qd.covariance).trace() - 2.0);
    CHECK(kl_gaussian(qd, pf) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("kl_gaussian input validation") {
    MultivariateGaussianFactor q, p;
    q.mean = Eigen::Vector2d::Zero();
    q.covariance = Eigen::Matrix2d::Identity();
    p.mean = Eigen::Vector3d::Zero();
    p.covariance = Eigen::Matrix3d::Identity();
    CHECK_THROWS_AS(kl_gaussian(q, p), std::invalid_argument);
    p.mean = Eigen::Vector2d::Zero();
    p.covariance = -Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS(kl_gaussian(q, p), std::invalid_argument);
}

TEST_CASE("kl_gaussian nonnegative with equality only at equal parameters") {
    std::mt19937_64 engine(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        MultivariateGaussianFactor q, p;
        q.mean = Eigen::Vector3d(gauss(engine), gauss(engine), gauss(engine));
        p.mean = Eigen::Vector3d(gauss(engine), gauss(engine), gauss(engine));
        q.covariance = oracles::random_pd(3, engine);
        p.covariance = oracles::random_pd(3, engine);
        CHECK(kl_gaussian(q, p) >= -1e-12);
        CHECK(kl_gaussian(q, q) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("factor entropies are finite on valid parameters") {
    std::mt19937_64 engine(5);
    std::uniform_real_distribution<double> unif(0.05, 20.0);
    std::normal_distribution<double> gauss(0.0, 5.0);
    for (int rep = 0; rep < 200; ++rep) {
        CHECK(std::isfinite(factor_entropy(GaussianFactor{gauss(engine), unif(engine)})));
        CHECK(std::isfinite(factor_entropy(InverseGammaFactor{unif(engine), unif(engine)})));
        CHECK(std::isfinite(factor_entropy(BetaFactor{unif(engine), unif(engine)})));
        CHECK(std::isfinite(factor_entropy(
            TruncatedGaussianFactor{gauss(engine), TruncationSide::positive})));
        Eigen::VectorXd lw(4);
        for (int k = 0; k < 4; ++k) {
            lw[k] = gauss(engine);
        }
        CHECK(std::isfinite(factor_entropy(categorical_from_log_weights(lw))));
    }
    // the phi log phi = 0 limit
    CategoricalFactor degenerate;
    degenerate.probabilities = Eigen::Vector3d(1.0, 0.0, 0.0);
    CHECK(degenerate.entropy() == doctest::Approx(0.0));
}

TEST_CASE("categorical normalization stays within 1e-12 of one") {
    std::mt19937_64 engine(9);
    std::normal_distribution<double> gauss(0.0, 50.0);
    for (int rep = 0; rep < 300; ++rep) {
        Eigen::VectorXd lw(6);
        for (int k = 0; k < 6; ++k) {
            lw[k] = gauss(engine);
        }
        const CategoricalFactor f = categorical_from_log_weights(lw);
        CHECK(std::abs(f.probabilities.sum() - 1.0) <= 1e-12);
        CHECK(f.probabilities.minCoeff() >= 0.0);
    }
}

TEST_CASE("blend_natural: gamma = 1 returns the target, small gamma stays near current") {
    const GaussianFactor current{0.0, 1.0};
    const GaussianFactor target{3.0, 0.25};
    const auto full = std::get<GaussianFactor>(blend_natural(current, target, 1.0));
    CHECK(full.mean == doctest::Approx(3.0));
    CHECK(full.variance == doctest::Approx(0.25));

    // natural parameters combine affinely
    const double g = 0.3;
    const auto mid = std::get<GaussianFactor>(blend_natural(current, target, g));
    const double prec = g / 0.25 + (1 - g) / 1.0;
    CHECK(1.0 / mid.variance == doctest::Approx(prec).epsilon(1e-13));
    CHECK(mid.mean / mid.variance == doctest::Approx(g * 3.0 / 0.25).epsilon(1e-13));
}

TEST_CASE("blend_natural: inverse gamma, beta, truncated, categorical") {
    const auto ig = std::get<InverseGammaFactor>(
        blend_natural(InverseGammaFactor{2.0, 3.0}, InverseGammaFactor{4.0, 7.0}, 0.25));
    CHECK(ig.shape == doctest::Approx(0.25 * 4.0 + 0.75 * 2.0));
    CHECK(ig.rate == doctest::Approx(0.25 * 7.0 + 0.75 * 3.0));

    const auto be = std::get<BetaFactor>(
        blend_natural(BetaFactor{1.0, 1.0}, BetaFactor{5.0, 2.0}, 0.5));
    CHECK(be.alpha == doctest::Approx(3.0));
    CHECK(be.beta == doctest::Approx(1.5));

    const auto tn = std::get<TruncatedGaussianFactor>(
        blend_natural(TruncatedGaussianFactor{0.0, TruncationSide::positive},
                      TruncatedGaussianFactor{2.0, TruncationSide::positive}, 0.5));
    CHECK(tn.location == doctest::Approx(1.0));
    CHECK_THROWS_AS(blend_natural(TruncatedGaussianFactor{0.0, TruncationSide::positive},
                                  TruncatedGaussianFactor{2.0, TruncationSide::negative}, 0.5),
                    std::invalid_argument);

    CategoricalFactor a, b;
    a.probabilities = Eigen::Vector2d(0.5, 0.5);
    b.probabilities = Eigen::Vector2d(0.9, 0.1);
    const auto mix = std::get<CategoricalFactor>(blend_natural(a, b, 0.5));
    const double w0 = std::sqrt(0.5 * 0.9), w1 = std::sqrt(0.5 * 0.1);
    CHECK(mix.probabilities[0] == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-13));
}

TEST_CASE("factor_kl nonnegative across kinds") {
    std::mt19937_64 engine(13);
    std::uniform_real_distribution<double> unif(0.2, 8.0);
    std::normal_distribution<double> gauss(0.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        CHECK(factor_kl(GaussianFactor{gauss(engine), unif(engine)},
                        GaussianFactor{gauss(engine), unif(engine)}) >= -1e-12);
        CHECK(factor_kl(InverseGammaFactor{unif(engine), unif(engine)},
                        InverseGammaFactor{unif(engine), unif(engine)}) >= -1e-12);
        CHECK(factor_kl(BetaFactor{unif(engine), unif(engine)},
                        BetaFactor{unif(engine), unif(engine)}) >= -1e-12);
        CHECK(factor_kl(TruncatedGaussianFactor{gauss(engine), TruncationSide::negative},
                        TruncatedGaussianFactor{gauss(engine), TruncationSide::negative}) >= -1e-12);
    }
}
