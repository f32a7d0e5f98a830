#include "mfvi/models/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfvi/rng.hpp"

namespace mfvi {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
constexpr double kProbFloor = 1e-300;
}

GmmModel::GmmModel(Eigen::VectorXd data, int components, double prior_sd)
    : data_(std::move(data)), components_(components), prior_sd_(prior_sd) {
    if (components_ < 1 || !(prior_sd_ > 0.0)) {
        throw std::invalid_argument("GmmModel: requires K >= 1 and prior_sd > 0");
    }
}

MeanFieldState GmmModel::make_init_state(std::uint64_t seed) const {
    MeanFieldState state;
    const int n = sample_count();
    const int k_count = components_;

    // Centers spread over data quantiles; prior scale variances.
    Eigen::VectorXd sorted = data_;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    for (int k = 0; k < k_count; ++k) {
        double m = 0.0;
        if (n > 0) {
            const double q = (k + 0.5) / k_count;
            const auto idx = static_cast<Eigen::Index>(std::min<double>(n - 1.0, q * n));
            m = sorted[idx];
        }
        state.parameter_factors.emplace_back(GaussianFactor{m, prior_sd_ * prior_sd_});
    }

    // Uniform assignments with a small seeded jitter to break label symmetry.
    auto engine = make_engine(seed);
    std::uniform_real_distribution<double> unif(-0.01, 0.01);
    state.latent_factors.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd lw(k_count);
        for (int k = 0; k < k_count; ++k) {
            lw[k] = unif(engine);
        }
        state.latent_factors.emplace_back(categorical_from_log_weights(lw));
    }
    return state;
}

void GmmModel::refresh_latent_block(MeanFieldState& state, int /*block*/) const {
    const int k_count = components_;
    Eigen::VectorXd m(k_count), half_second(k_count);
    for (int k = 0; k < k_count; ++k) {
        const auto& q = std::get<GaussianFactor>(state.parameter_factors[static_cast<std::size_t>(k)]);
        m[k] = q.mean;
        half_second[k] = 0.5 * (q.variance + q.mean * q.mean);
    }
    for (int i = 0; i < sample_count(); ++i) {
        const Eigen::VectorXd lw = data_[i] * m - half_second;
        state.latent_factors[static_cast<std::size_t>(i)] = categorical_from_log_weights(lw);
    }
}

void GmmModel::refresh_parameter_block(MeanFieldState& state, int block) const {
    const int k = block;
    double resp = 0.0, weighted = 0.0;
    for (int i = 0; i < sample_count(); ++i) {
        const auto& phi =
            std::get<CategoricalFactor>(state.latent_factors[static_cast<std::size_t>(i)]);
        resp += phi.probabilities[k];
        weighted += data_[i] * phi.probabilities[k];
    }
    const double denom = 1.0 / (prior_sd_ * prior_sd_) + resp;
    state.parameter_factors[static_cast<std::size_t>(k)] =
        GaussianFactor{weighted / denom, 1.0 / denom};
}

double GmmModel::elbo(const MeanFieldState& state) const {
    const int n = sample_count();
    const int k_count = components_;
    const double sigma_sq = prior_sd_ * prior_sd_;

    Eigen::VectorXd m(k_count), second(k_count);
    for (int k = 0; k < k_count; ++k) {
        const auto& q = std::get<GaussianFactor>(state.parameter_factors[static_cast<std::size_t>(k)]);
        m[k] = q.mean;
        second[k] = q.variance + q.mean * q.mean;
    }

    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& phi =
            std::get<CategoricalFactor>(state.latent_factors[static_cast<std::size_t>(i)]);
        for (int k = 0; k < k_count; ++k) {
            const double p = phi.probabilities[k];
            if (p <= 0.0) {
                continue;  // 0 log 0 = 0
            }
            value += p * (data_[i] * m[k] - 0.5 * second[k]);
            value -= p * std::log(std::max(p, kProbFloor));
        }
    }
    for (int k = 0; k < k_count; ++k) {
        value -= 0.5 * second[k] / sigma_sq;
        value += 0.5 * std::log(
                         std::get<GaussianFactor>(state.parameter_factors[static_cast<std::size_t>(k)])
                             .variance);
    }
    value += -0.5 * n * kLog2Pi - 0.5 * data_.squaredNorm() -
             n * std::log(static_cast<double>(k_count)) +
             0.5 * k_count * (1.0 - std::log(sigma_sq));
    return value;
}

Eigen::VectorXd GmmModel::center_means(const MeanFieldState& state) const {
    Eigen::VectorXd m(components_);
    for (int k = 0; k < components_; ++k) {
        m[k] = std::get<GaussianFactor>(state.parameter_factors[static_cast<std::size_t>(k)]).mean;
    }
    return m;
}

}  // namespace mfvi
