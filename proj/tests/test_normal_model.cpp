#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfvi/cavi.hpp"
#include "mfvi/evidence.hpp"
#include "mfvi/mle.hpp"
#include "mfvi/models/normal.hpp"
#include "mfvi/synthetic.hpp"

using namespace mfvi;

TEST_CASE("no data: one sweep returns the prior fixed point") {
    NormalModel model(Eigen::VectorXd(0), NormalPrior{2.0, 3.0, 1.5, 0.7});
    MeanFieldState state = model.make_init_state(0);
    const MeanFieldState swept = step_parallel(model, state, 1.0);
    const auto& q_mu = std::get<GaussianFactor>(swept.parameter_factors[0]);
    const auto& q_var = std::get<InverseGammaFactor>(swept.parameter_factors[1]);
    CHECK(q_mu.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(q_mu.variance == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(q_var.shape == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(q_var.rate == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("single datum hand-computed sequential pass") {
    Eigen::VectorXd data(1);
    data[0] = 2.0;
    NormalModel model(data, NormalPrior{0.0, 1.0, 1.0, 1.0});
    MeanFieldState state = model.make_init_state(0);  // B starts at b = 1
    model.refresh_parameter_block(state, 0);
    const auto& q_mu = std::get<GaussianFactor>(state.parameter_factors[0]);
    CHECK(std::get<InverseGammaFactor>(state.parameter_factors[1]).shape ==
          doctest::Approx(1.5));
    CHECK(q_mu.variance == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(q_mu.mean == doctest::Approx(1.2).epsilon(1e-14));
    model.refresh_parameter_block(state, 1);
    CHECK(std::get<InverseGammaFactor>(state.parameter_factors[1]).rate ==
          doctest::Approx(1.52).epsilon(1e-14));
}

TEST_CASE("fixed point satisfies all three update equations at once") {
    const Eigen::VectorXd data = generate_normal_data(NormalDesign{100.0, 100.0, 10}, 4);
    NormalModel model(data, NormalPrior{0.0, 100.0 * 100.0, 0.01, 0.01});
    const CaviResult fit = run_cavi(model, model.make_init_state(0),
                                    {ScheduleKind::sequential_systematic, 1.0},
                                    {2000, 1e-14, 3}, 0);
    MeanFieldState refreshed = fit.state;
    model.refresh_parameter_block(refreshed, 0);
    model.refresh_parameter_block(refreshed, 1);
    const auto& a = std::get<GaussianFactor>(fit.state.parameter_factors[0]);
    const auto& b = std::get<GaussianFactor>(refreshed.parameter_factors[0]);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-10));
    CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-10));
    const auto& ra = std::get<InverseGammaFactor>(fit.state.parameter_factors[1]);
    const auto& rb = std::get<InverseGammaFactor>(refreshed.parameter_factors[1]);
    CHECK(ra.rate == doctest::Approx(rb.rate).epsilon(1e-10));

    // printed optimal-ELBO form agrees with the generic expectation form here
    CHECK(model.elbo_fixed_point_form(fit.state) ==
          doctest::Approx(model.elbo(fit.state)).epsilon(1e-8));
}

TEST_CASE("diffuse mean prior removes its quadratic pull") {
    Eigen::VectorXd data(3);
    data << 1.0, 2.0, 3.0;
    // as sigma0^2 grows, the (m - mu0)^2 contribution and the prior KL for the
    // mean vanish; the fitted m approaches the data mean
    NormalModel tight(data, NormalPrior{0.0, 1.0, 1.0, 1.0});
    NormalModel diffuse(data, NormalPrior{0.0, 1e12, 1.0, 1.0});
    const auto fit_tight = run_cavi(tight, tight.make_init_state(0),
                                    {ScheduleKind::sequential_systematic, 1.0}, {500, 1e-13, 3}, 0);
    const auto fit_diffuse =
        run_cavi(diffuse, diffuse.make_init_state(0),
                 {ScheduleKind::sequential_systematic, 1.0}, {500, 1e-13, 3}, 0);
    const double m_diffuse =
        std::get<GaussianFactor>(fit_diffuse.state.parameter_factors[0]).mean;
    const double m_tight = std::get<GaussianFactor>(fit_tight.state.parameter_factors[0]).mean;
    CHECK(m_diffuse == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(m_tight - 2.0) > 1e-3);  // the tight prior shrinks toward mu0 = 0
}

TEST_CASE("normal MLE closed form") {
    Eigen::VectorXd data(4);
    data << 1.0, 3.0, 5.0, 7.0;
    const MleResult mle = normal_mle(data);
    CHECK(mle.theta[0] == doctest::Approx(4.0));
    CHECK(mle.theta[1] == doctest::Approx(5.0));
    const double expected_ll =
        -0.5 * 4.0 * (std::log(2.0 * M_PI) + std::log(5.0) + 1.0);
    CHECK(mle.loglik == doctest::Approx(expected_ll).epsilon(1e-13));
}

TEST_CASE("mc_evidence agrees across disjoint seeds within 3 combined stderr") {
    const Eigen::VectorXd data = generate_normal_data(NormalDesign{5.0, 2.0, 12}, 8);
    NormalModel model(data, NormalPrior{0.0, 25.0, 2.0, 2.0});
    const EvidenceEstimate a = mc_evidence(model, 40000, 1);
    const EvidenceEstimate b = mc_evidence(model, 40000, 2);
    const double combined = std::hypot(a.stderr_log, b.stderr_log);
    CHECK(std::abs(a.log_evidence - b.log_evidence) <= 3.0 * combined);
}

TEST_CASE("ELBO lower-bounds the Monte Carlo evidence") {
    const Eigen::VectorXd data = generate_normal_data(NormalDesign{5.0, 2.0, 15}, 10);
    NormalModel model(data, NormalPrior{0.0, 25.0, 2.0, 2.0});
    const CaviResult fit = run_cavi(model, model.make_init_state(0),
                                    {ScheduleKind::sequential_systematic, 1.0}, {500, 1e-12, 3}, 0);
    const EvidenceEstimate evidence = mc_evidence(model, 60000, 3);
    CHECK(fit.trace.elbo_per_iteration.back() <=
          evidence.log_evidence + 3.0 * evidence.stderr_log);
}
