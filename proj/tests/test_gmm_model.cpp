#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfvi/cavi.hpp"
#include "mfvi/fisher.hpp"
#include "mfvi/mle.hpp"
#include "mfvi/models/gmm.hpp"
#include "mfvi/synthetic.hpp"
#include "oracles.hpp"

using namespace mfvi;

namespace {

// Expectation-identity ELBO, written independently of the model code:
// E_q[log p(X, c, mu)] - E_q[log q] with Gaussian/categorical moments.
double generic_elbo_oracle(const GmmModel& model, const MeanFieldState& state) {
    const int n = model.sample_count();
    const int k_count = model.components();
    const double sigma_sq = model.prior_sd() * model.prior_sd();
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& phi = std::get<CategoricalFactor>(state.latent_factors[i]);
        for (int k = 0; k < k_count; ++k) {
            const auto& q = std::get<GaussianFactor>(state.parameter_factors[k]);
            const double p = phi.probabilities[k];
            if (p <= 0.0) continue;
            const double second = q.variance + q.mean * q.mean;
            const double e_sq = model.data()[i] * model.data()[i] -
                                2.0 * model.data()[i] * q.mean + second;
            value += p * (-std::log(static_cast<double>(k_count)) -
                          0.5 * std::log(2.0 * M_PI) - 0.5 * e_sq);
            value -= p * std::log(p);
        }
    }
    for (int k = 0; k < k_count; ++k) {
        const auto& q = std::get<GaussianFactor>(state.parameter_factors[k]);
        value += -0.5 * std::log(2.0 * M_PI * sigma_sq) -
                 (q.variance + q.mean * q.mean) / (2.0 * sigma_sq);
        value += 0.5 * std::log(2.0 * M_PI * M_E * q.variance);
    }
    return value;
}

}  // namespace

TEST_CASE("single component is degenerate: phi = 1 and the posterior-mean center") {
    Eigen::VectorXd data(3);
    data << 1.0, 2.0, 6.0;
    GmmModel model(data, 1, 2.0);
    MeanFieldState state = model.make_init_state(0);
    model.refresh_latent_block(state, 0);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::get<CategoricalFactor>(state.latent_factors[i]).probabilities[0] ==
              doctest::Approx(1.0));
    }
    model.refresh_parameter_block(state, 0);
    const auto& center = std::get<GaussianFactor>(state.parameter_factors[0]);
    CHECK(center.mean == doctest::Approx(9.0 / (0.25 + 3.0)).epsilon(1e-14));
}

TEST_CASE("symmetric centers give half/half responsibilities at x = 0") {
    Eigen::VectorXd data(1);
    data << 0.0;
    GmmModel model(data, 2, 1.0);
    MeanFieldState state = model.make_init_state(0);
    state.parameter_factors[0] = GaussianFactor{-1.0, 0.1};
    state.parameter_factors[1] = GaussianFactor{1.0, 0.1};
    model.refresh_latent_block(state, 0);
    const auto& phi = std::get<CategoricalFactor>(state.latent_factors[0]);
    CHECK(phi.probabilities[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(phi.probabilities[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("assignment rows match brute-force normalization") {
    Eigen::VectorXd data(3);
    data << -4.0, 0.2, 5.0;
    GmmModel model(data, 3, 2.0);
    MeanFieldState state = model.make_init_state(1);
    state.parameter_factors[0] = GaussianFactor{-4.5, 0.3};
    state.parameter_factors[1] = GaussianFactor{0.0, 0.2};
    state.parameter_factors[2] = GaussianFactor{4.8, 0.4};
    model.refresh_latent_block(state, 0);
    for (int i = 0; i < 3; ++i) {
        double weights[3], total = 0.0;
        for (int k = 0; k < 3; ++k) {
            const auto& q = std::get<GaussianFactor>(state.parameter_factors[k]);
            weights[k] = std::exp(data[i] * q.mean - 0.5 * (q.variance + q.mean * q.mean));
            total += weights[k];
        }
        const auto& phi = std::get<CategoricalFactor>(state.latent_factors[i]);
        for (int k = 0; k < 3; ++k) {
            CHECK(phi.probabilities[k] == doctest::Approx(weights[k] / total).epsilon(1e-12));
        }
        CHECK(std::abs(phi.probabilities.sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("center update formula") {
    Eigen::VectorXd data(3);
    data << 1.0, 2.0, 3.0;
    GmmModel model(data, 2, 1.0);
    MeanFieldState state = model.make_init_state(2);
    model.refresh_latent_block(state, 0);
    Eigen::VectorXd phi0(3), x_phi(2), mass(2);
    x_phi.setZero();
    mass.setZero();
    for (int i = 0; i < 3; ++i) {
        const auto& phi = std::get<CategoricalFactor>(state.latent_factors[i]);
        for (int k = 0; k < 2; ++k) {
            x_phi[k] += data[i] * phi.probabilities[k];
            mass[k] += phi.probabilities[k];
        }
    }
    model.refresh_parameter_block(state, 1);
    const auto& q = std::get<GaussianFactor>(state.parameter_factors[1]);
    CHECK(q.mean == doctest::Approx(x_phi[1] / (1.0 + mass[1])).epsilon(1e-13));
    CHECK(q.variance == doctest::Approx(1.0 / (1.0 + mass[1])).epsilon(1e-13));
}

TEST_CASE("closed-form ELBO equals the expectation oracle at any state") {
    const Eigen::VectorXd data = generate_gmm_data(GmmDesign{3.0, 3, 40}, 3);
    GmmModel model(data, 3, 2.0);
    MeanFieldState state = model.make_init_state(4);
    CHECK(model.elbo(state) == doctest::Approx(generic_elbo_oracle(model, state)).epsilon(1e-10));
    // and after a few sweeps
    for (int s = 0; s < 3; ++s) {
        state = step_parallel(model, state, 1.0);
        CHECK(model.elbo(state) ==
              doctest::Approx(generic_elbo_oracle(model, state)).epsilon(1e-10));
    }
}

TEST_CASE("no data: ELBO of the prior state is zero") {
    GmmModel model(Eigen::VectorXd(0), 1, 1.0);
    const MeanFieldState state = model.make_init_state(0);
    CHECK(model.elbo(state) == doctest::Approx(0.0).epsilon(1e-12));
    // the init is also the fixed point of the center update
    MeanFieldState refreshed = state;
    model.refresh_parameter_block(refreshed, 0);
    CHECK(std::get<GaussianFactor>(refreshed.parameter_factors[0]).mean == doctest::Approx(0.0));
    CHECK(std::get<GaussianFactor>(refreshed.parameter_factors[0]).variance ==
          doctest::Approx(1.0));
}

TEST_CASE("sequential sweeps never decrease the ELBO on a separated mixture") {
    const Eigen::VectorXd data = generate_gmm_data(GmmDesign{5.0, 3, 100}, 7);
    GmmModel model(data, 3, 10.0);
    MeanFieldState state = model.make_init_state(7);
    double previous = model.elbo(state);
    for (int sweep = 0; sweep < 60; ++sweep) {
        state = step_sequential(model, state, model.parameter_block_count(), 1.0);  // assignments
        for (int k = 0; k < model.parameter_block_count(); ++k) {
            state = step_sequential(model, state, k, 1.0);
        }
        const double elbo = model.elbo(state);
        CHECK(elbo >= previous - 1e-9);
        previous = elbo;
    }
}

TEST_CASE("EM matches a grid-search oracle, K = 2 on four points") {
    Eigen::VectorXd data(4);
    data << -2.1, -1.7, 1.9, 2.4;
    const MleResult em = gmm_mle(data, 2, {50, 500, 1e-12}, 1);

    double best_ll = -std::numeric_limits<double>::infinity();
    double best_mu1 = 0.0, best_mu2 = 0.0;
    Eigen::VectorXd centers(2);
    for (int i = -1000; i <= 1000; ++i) {
        for (int j = i; j <= 1000; ++j) {
            centers[0] = 0.01 * i;
            centers[1] = 0.01 * j;
            const double ll = gmm_loglik(data, centers);
            if (ll > best_ll) {
                best_ll = ll;
                best_mu1 = centers[0];
                best_mu2 = centers[1];
            }
        }
    }
    CHECK(em.loglik >= best_ll - 1e-9);  // EM refines beyond the grid resolution
    CHECK(em.theta[0] == doctest::Approx(best_mu1).epsilon(0.02));
    CHECK(em.theta[1] == doctest::Approx(best_mu2).epsilon(0.02));
}

TEST_CASE("complete-data information is exactly I/K") {
    const Eigen::VectorXd data = generate_gmm_data(GmmDesign{3.0, 3, 30}, 9);
    GmmModel model(data, 3, 2.0);
    const FisherBundle bundle = fisher_bundle(model, gmm_centers(3.0, 3), 20000, 5);
    CHECK((bundle.V_c - Eigen::MatrixXd::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((bundle.V_c - bundle.V - bundle.V_s).cwiseAbs().maxCoeff() == 0.0);
    // V is positive definite and bounded by V_c in the separated regime
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bundle.V);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("grid oracle for the GMM observed information in the wide-gap limit") {
    // With delta -> large, responsibilities are hard and V -> V_c = I/K.
    GmmModel model(Eigen::VectorXd::Zero(1), 2, 2.0);
    const FisherBundle bundle = fisher_bundle(model, gmm_centers(40.0, 2), 40000, 6);
    CHECK((bundle.V - bundle.V_c).cwiseAbs().maxCoeff() <= 1e-3);
}
