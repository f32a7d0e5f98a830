#ifndef MFVI_DYNAMICS_HPP
#define MFVI_DYNAMICS_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "mfvi/cavi.hpp"

namespace mfvi {

// Exact mean-bias dynamics of CAVI on a Gaussian target with information
// matrix V: bias b = current mean - optimum. A full parallel sweep maps
// b -> (I - gamma D^-1 V) b with D = diag(V) (or diag(V_c) when latent
// variables are present); a sequential update changes one coordinate.
struct GaussianDynamics {
    Eigen::MatrixXd V;                 // symmetric positive definite information
    Eigen::VectorXd S_c;               // diagonal of V_c; empty when no latents
    Eigen::VectorXd bias;

    Eigen::VectorXd S() const { return V.diagonal(); }
    bool has_latent() const { return S_c.size() > 0; }

    // Effective diagonal D used by the update: S_c when present, diag(V) otherwise.
    Eigen::VectorXd effective_diagonal() const { return has_latent() ? S_c : S(); }

    // Quadratic regret (n/2) b^T V b with n = 1.
    double regret() const { return 0.5 * bias.dot(V * bias); }
};

// One parallel sweep of the bias recursion.
GaussianDynamics gaussian_bias_step_parallel(const GaussianDynamics& dyn, double gamma);

// One sequential update of coordinate `index`.
GaussianDynamics gaussian_bias_step_coordinate(const GaussianDynamics& dyn, int index, double gamma);

// One step under the given schedule; the randomized sequential coordinate is
// the counter-th draw of the seeded stream.
GaussianDynamics gaussian_bias_step(const GaussianDynamics& dyn, const Schedule& schedule,
                                    std::uint64_t seed, std::uint64_t counter = 0);

}  // namespace mfvi

#endif
