#ifndef MFVI_FISHER_HPP
#define MFVI_FISHER_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "mfvi/models/gmm.hpp"
#include "mfvi/models/normal.hpp"

namespace mfvi {

// Information matrices at theta*: V is the observed-data information,
// V_s the missing-data information (zero without latent variables), and
// V_c = V + V_s the complete-data information. S and S_c denote their
// diagonals.
struct FisherBundle {
    Eigen::MatrixXd V;
    Eigen::MatrixXd V_s;
    Eigen::MatrixXd V_c;
    Eigen::VectorXd theta_star;
    double prior_log_density_at_theta_star = 0.0;
    bool monte_carlo = false;
    long samples = 0;
    std::uint64_t seed = 0;

    Eigen::VectorXd S() const { return V.diagonal(); }
    Eigen::VectorXd S_c() const { return V_c.diagonal(); }
    int dim() const { return static_cast<int>(V.rows()); }
    bool has_latent() const { return !V_s.isZero(0.0); }
};

// Population description of a probit design: features x ~ N(0, sigma) and
// P(Y = 1 | x) = Phi(x^T beta) under the data generating distribution.
struct ProbitPopulation {
    Eigen::MatrixXd sigma;
    Eigen::VectorXd beta;
};

// Location-scale normal model: analytic V = diag(1/sigma^2, 1/(2 sigma^4))
// at theta* = (mu, sigma^2); no latent variables.
FisherBundle fisher_bundle(const NormalModel& model, const Eigen::VectorXd& theta_star);

// Gaussian mixture: V_c = (1/K) I exactly; V estimated by Monte Carlo over
// X drawn from the mixture at the given centers.
FisherBundle fisher_bundle(const GmmModel& model, const Eigen::VectorXd& centers_star, long samples,
                           std::uint64_t seed);

// Probit candidate using the first `candidate_size` features of the
// population. V is a Monte Carlo expectation over the feature distribution
// of the candidate-model Hessian with responses drawn from the population
// conditional; V_c = E[x x^T] is the leading submatrix of sigma. beta_star
// is the candidate KL projection (equal to the leading coefficients when the
// candidate contains every nonzero one). prior: beta ~ N(0, prior_covariance).
FisherBundle fisher_bundle_probit(const ProbitPopulation& population, int candidate_size,
                                  const Eigen::VectorXd& beta_star,
                                  const Eigen::MatrixXd& prior_covariance, long samples,
                                  std::uint64_t seed, int threads = 1);

}  // namespace mfvi

#endif
