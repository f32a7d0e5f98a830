#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mfvi/dynamics.hpp"
#include "mfvi/rng.hpp"
#include "mfvi/selection.hpp"
#include "oracles.hpp"

using namespace mfvi;

namespace {

GaussianDynamics counterexample() {
    GaussianDynamics dyn;
    dyn.V = (1.0 / 3.0) * Eigen::Matrix3d::Identity() +
            (2.0 / 3.0) * Eigen::Matrix3d::Ones();
    dyn.bias = Eigen::Vector3d::Ones();
    return dyn;
}

}  // namespace

TEST_CASE("parallel sweep on a diagonal V zeroes the bias in one step") {
    GaussianDynamics dyn;
    dyn.V = Eigen::Vector3d(2.0, 0.5, 1.7).asDiagonal();
    dyn.bias = Eigen::Vector3d(4.0, -1.0, 0.3);
    const GaussianDynamics next = gaussian_bias_step_parallel(dyn, 1.0);
    CHECK(next.bias.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("divergent equicorrelated example multiplies the bias by -4/3") {
    GaussianDynamics dyn = counterexample();
    const GaussianDynamics next = gaussian_bias_step_parallel(dyn, 1.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(next.bias[i] == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("step 0.5 halves the Jacobi displacement") {
    std::mt19937_64 engine(21);
    GaussianDynamics dyn;
    dyn.V = oracles::random_pd(4, engine);
    dyn.bias = Eigen::Vector4d(1.0, -2.0, 0.5, 3.0);
    const Eigen::VectorXd jacobi =
        dyn.bias - (dyn.V * dyn.bias).cwiseQuotient(dyn.V.diagonal());
    const GaussianDynamics half = gaussian_bias_step_parallel(dyn, 0.5);
    const Eigen::VectorXd expected = dyn.bias - 0.5 * (dyn.bias - jacobi);
    CHECK((half.bias - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("parallel sweep equals the matrix recursion for random PD V") {
    std::mt19937_64 engine(33);
    std::uniform_real_distribution<double> gamma_draw(0.1, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 2 + static_cast<int>(engine() % 7);  // up to 8
        GaussianDynamics dyn;
        dyn.V = oracles::random_pd(d, engine);
        dyn.bias.resize(d);
        for (int i = 0; i < d; ++i) {
            dyn.bias[i] = gauss(engine);
        }
        const double gamma = gamma_draw(engine);
        const Eigen::MatrixXd a_gamma =
            Eigen::MatrixXd::Identity(d, d) -
            gamma * dyn.V.diagonal().cwiseInverse().asDiagonal() * dyn.V;
        const Eigen::VectorXd expected = a_gamma * dyn.bias;
        const GaussianDynamics next = gaussian_bias_step_parallel(dyn, gamma);
        CHECK((next.bias - expected).cwiseAbs().maxCoeff() <=
              1e-13 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("sequential coordinate update matches the printed recursion") {
    std::mt19937_64 engine(55);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 3 + static_cast<int>(engine() % 4);
        GaussianDynamics dyn;
        dyn.V = oracles::random_pd(d, engine);
        dyn.bias.resize(d);
        for (int i = 0; i < d; ++i) {
            dyn.bias[i] = gauss(engine);
        }
        const int ell = static_cast<int>(engine() % static_cast<std::uint64_t>(d));
        const double gamma = 0.25 + 0.75 * (rep % 4) / 4.0;
        // b'_l = (1 - gamma) b_l - gamma sum_{k != l} (V_lk / V_ll) b_k
        double expected = (1.0 - gamma) * dyn.bias[ell];
        for (int k = 0; k < d; ++k) {
            if (k != ell) {
                expected -= gamma * dyn.V(ell, k) / dyn.V(ell, ell) * dyn.bias[k];
            }
        }
        const GaussianDynamics next = gaussian_bias_step_coordinate(dyn, ell, gamma);
        CHECK(next.bias[ell] == doctest::Approx(expected).epsilon(1e-12));
        for (int k = 0; k < d; ++k) {
            if (k != ell) {
                CHECK(next.bias[k] == dyn.bias[k]);
            }
        }
    }
}

TEST_CASE("latent-variable bias step divides by the complete-data diagonal") {
    std::mt19937_64 engine(77);
    GaussianDynamics dyn;
    dyn.V = oracles::random_pd(4, engine);
    dyn.S_c = dyn.V.diagonal() * 2.5;  // V_s adds mass on the diagonal
    dyn.bias = Eigen::Vector4d(1.0, 1.0, -1.0, 0.5);
    const double gamma = 0.8;
    const Eigen::VectorXd expected =
        dyn.bias - gamma * (dyn.V * dyn.bias).cwiseQuotient(dyn.S_c);
    const GaussianDynamics next = gaussian_bias_step_parallel(dyn, gamma);
    CHECK((next.bias - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("randomized sequential contraction in expectation (small version)") {
    // E[D^{t+1} | D^t] <= (1 - c gamma(2-gamma)/d) D^t with c = lambda_min(S^-1 V),
    // for full and partial step sizes.
    std::mt19937_64 engine(99);
    for (int rep = 0; rep < 5; ++rep) {
        const int d = 3 + static_cast<int>(engine() % 3);
        GaussianDynamics base;
        base.V = oracles::random_pd(d, engine);
        base.bias = Eigen::VectorXd::Ones(d);

        FisherBundle bundle;
        bundle.V = base.V;
        bundle.V_s = Eigen::MatrixXd::Zero(d, d);
        bundle.V_c = base.V;
        for (double gamma : {1.0, 0.6}) {
            const ContractionReport report =
                contraction_rates(bundle, gamma, ScheduleKind::sequential_randomized, false, d);

            const int runs = 4000, t_max = 10;
            std::vector<double> mean_regret(t_max + 1, 0.0);
            for (int run = 0; run < runs; ++run) {
                GaussianDynamics dyn = base;
                mean_regret[0] += dyn.regret();
                for (int t = 0; t < t_max; ++t) {
                    dyn = gaussian_bias_step(dyn, {ScheduleKind::sequential_randomized, gamma},
                                             static_cast<std::uint64_t>(run * 131 + rep),
                                             static_cast<std::uint64_t>(t));
                    mean_regret[static_cast<std::size_t>(t + 1)] += dyn.regret();
                }
            }
            for (double& r : mean_regret) {
                r /= runs;
            }
            double bound = mean_regret[0];
            for (int t = 1; t <= t_max; ++t) {
                bound *= report.alpha;
                CHECK(mean_regret[static_cast<std::size_t>(t)] <= bound * 1.10);
            }
        }
    }
}

TEST_CASE("seeded randomized stream is a pure function of (seed, counter)") {
    GaussianDynamics dyn = counterexample();
    const Schedule schedule{ScheduleKind::sequential_randomized, 1.0};
    const GaussianDynamics a = gaussian_bias_step(dyn, schedule, 42, 17);
    const GaussianDynamics b = gaussian_bias_step(dyn, schedule, 42, 17);
    CHECK((a.bias - b.bias).cwiseAbs().maxCoeff() == 0.0);
}
