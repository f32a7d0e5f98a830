#ifndef MFVI_FACTORS_HPP
#define MFVI_FACTORS_HPP

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "mfvi/special.hpp"

namespace mfvi {

// One-dimensional Gaussian factor q = N(mean, variance), variance > 0.
struct GaussianFactor {
    double mean = 0.0;
    double variance = 1.0;

    double entropy() const;
};

// q = N(mean, covariance) with symmetric positive definite covariance.
struct MultivariateGaussianFactor {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    double entropy() const;
};

// Inverse gamma with shape/rate parameterization: density ~ x^(-shape-1) exp(-rate/x).
struct InverseGammaFactor {
    double shape = 1.0;
    double rate = 1.0;

    double entropy() const;
    double mean_inverse() const { return shape / rate; }       // E[1/x]
    double mean_log() const;                                   // E[log x]
};

// Discrete factor over K categories; probabilities sum to 1.
struct CategoricalFactor {
    Eigen::VectorXd probabilities;

    double entropy() const;
};

struct BetaFactor {
    double alpha = 1.0;
    double beta = 1.0;

    double entropy() const;
    double mean_log() const;            // E[log x]
    double mean_log_complement() const; // E[log(1-x)]
};

// N(location, 1) truncated to one side of zero; scale is fixed at 1.
struct TruncatedGaussianFactor {
    double location = 0.0;
    TruncationSide side = TruncationSide::positive;

    double mean() const { return truncated_normal_mean(location, side); }
    double variance() const { return truncated_normal_var(location, side); }
    double second_moment() const { return truncated_normal_second_moment(location, side); }
    double entropy() const;
};

using Factor = std::variant<GaussianFactor, MultivariateGaussianFactor, InverseGammaFactor,
                            CategoricalFactor, BetaFactor, TruncatedGaussianFactor>;

// Product variational distribution over parameter blocks and latent variables.
// Factor count and ordering are fixed for the life of a fit.
struct MeanFieldState {
    std::vector<Factor> parameter_factors;
    std::vector<Factor> latent_factors;
};

double factor_entropy(const Factor& f);

// Convex combination of natural parameters: result has natural parameters
// gamma * eta(target) + (1 - gamma) * eta(current). Equivalent to the density
// interpolation [target]^gamma [current]^(1-gamma), renormalized.
// Both factors must hold the same alternative (and same truncation side).
Factor blend_natural(const Factor& current, const Factor& target, double gamma);

// KL divergence between two factors of the same kind.
double factor_kl(const Factor& q, const Factor& p);

// Sum of factor KLs between two states of identical layout.
double state_kl(const MeanFieldState& q, const MeanFieldState& p);

// KL(q || p) between multivariate Gaussians; both covariances must be
// positive definite and dimensions must agree.
double kl_gaussian(const MultivariateGaussianFactor& q, const MultivariateGaussianFactor& p);

// Normalize unnormalized log-weights into a categorical factor, in log space.
CategoricalFactor categorical_from_log_weights(const Eigen::VectorXd& log_weights);

}  // namespace mfvi

#endif
