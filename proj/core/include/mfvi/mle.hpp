#ifndef MFVI_MLE_HPP
#define MFVI_MLE_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "mfvi/models/sbm.hpp"

namespace mfvi {

struct MleResult {
    Eigen::VectorXd theta;
    double loglik = 0.0;
    int iterations = 0;
};

// Closed form: theta = (mean, biased variance).
MleResult normal_mle(const Eigen::VectorXd& data);

// Newton iteration on the marginal probit log-likelihood. Throws NumericError
// with iterate diagnostics when the optimizer does not converge.
MleResult probit_mle(const Eigen::MatrixXd& design, const Eigen::VectorXi& responses,
                     int max_iterations = 100, double grad_tolerance = 1e-10);

struct GmmEmOptions {
    int restarts = 50;
    int max_iterations = 500;
    double tolerance = 1e-10;
};

// EM for the unit-variance, equal-weight mixture with K centers. Restarts
// from perturbed data quantiles; returns the best likelihood found.
MleResult gmm_mle(const Eigen::VectorXd& data, int components, const GmmEmOptions& options = {},
                  std::uint64_t seed = 0);

// Marginal mixture log-likelihood at given centers.
double gmm_loglik(const Eigen::VectorXd& data, const Eigen::VectorXd& centers);

// Variational-mean plug-in for the SBM: theta is the posterior-mean
// connectivity (upper triangle, row-major) and the log-likelihood sums the
// per-edge-pair Bernoulli mass with assignments averaged under q.
MleResult sbm_variational_mean_mle(const SbmModel& model, const MeanFieldState& fit);

}  // namespace mfvi

#endif
