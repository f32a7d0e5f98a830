#include "mfvi/models/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace mfvi {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

NormalModel::NormalModel(Eigen::VectorXd data, NormalPrior prior)
    : data_(std::move(data)), prior_(prior) {
    if (!(prior_.sigma0_sq > 0.0) || !(prior_.a > 0.0) || !(prior_.b > 0.0)) {
        throw std::invalid_argument("NormalModel: prior hyperparameters must be positive");
    }
    sum_ = data_.sum();
}

MeanFieldState NormalModel::make_init_state(std::uint64_t /*seed*/) const {
    MeanFieldState state;
    state.parameter_factors = {GaussianFactor{prior_.mu0, prior_.sigma0_sq},
                               InverseGammaFactor{fixed_shape(), prior_.b}};
    return state;
}

void NormalModel::refresh_parameter_block(MeanFieldState& state, int block) const {
    auto& q_mu = std::get<GaussianFactor>(state.parameter_factors[0]);
    auto& q_var = std::get<InverseGammaFactor>(state.parameter_factors[1]);
    const double n = static_cast<double>(sample_count());
    if (block == 0) {
        const double e_prec = q_var.mean_inverse();  // A/B
        const double s2 = 1.0 / (n * e_prec + 1.0 / prior_.sigma0_sq);
        const double m = (sum_ * e_prec + prior_.mu0 / prior_.sigma0_sq) * s2;
        q_mu = GaussianFactor{m, s2};
    } else if (block == 1) {
        const double ss = (data_.array() - q_mu.mean).square().sum();
        q_var = InverseGammaFactor{fixed_shape(), prior_.b + 0.5 * (ss + n * q_mu.variance)};
    } else {
        throw std::invalid_argument("NormalModel: bad block index");
    }
}

double NormalModel::elbo(const MeanFieldState& state) const {
    const auto& q_mu = std::get<GaussianFactor>(state.parameter_factors[0]);
    const auto& q_var = std::get<InverseGammaFactor>(state.parameter_factors[1]);
    const double n = static_cast<double>(sample_count());
    const double e_prec = q_var.mean_inverse();
    const double e_log_var = q_var.mean_log();
    const double ss = (data_.array() - q_mu.mean).square().sum() + n * q_mu.variance;

    double value = -0.5 * n * kLog2Pi - 0.5 * n * e_log_var - 0.5 * e_prec * ss;
    // prior on the mean
    value += -0.5 * std::log(2.0 * M_PI * prior_.sigma0_sq) -
             ((q_mu.mean - prior_.mu0) * (q_mu.mean - prior_.mu0) + q_mu.variance) /
                 (2.0 * prior_.sigma0_sq);
    // prior on the variance
    value += prior_.a * std::log(prior_.b) - std::lgamma(prior_.a) -
             (prior_.a + 1.0) * e_log_var - prior_.b * e_prec;
    value += q_mu.entropy() + q_var.entropy();
    return value;
}

double NormalModel::elbo_fixed_point_form(const MeanFieldState& state) const {
    const auto& q_mu = std::get<GaussianFactor>(state.parameter_factors[0]);
    const auto& q_var = std::get<InverseGammaFactor>(state.parameter_factors[1]);
    const double n = static_cast<double>(sample_count());
    return 0.5 - 0.5 * n * kLog2Pi + 0.5 * std::log(q_mu.variance / prior_.sigma0_sq) -
           ((q_mu.mean - prior_.mu0) * (q_mu.mean - prior_.mu0) + q_mu.variance) /
               (2.0 * prior_.sigma0_sq) +
           prior_.a * std::log(prior_.b) - q_var.shape * std::log(q_var.rate) +
           std::lgamma(q_var.shape) - std::lgamma(prior_.a);
}

}  // namespace mfvi
