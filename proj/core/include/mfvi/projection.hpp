#ifndef MFVI_PROJECTION_HPP
#define MFVI_PROJECTION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mfvi/fisher.hpp"

namespace mfvi {

// KL projection of the data generating distribution onto a candidate model:
// the maximizer of the Monte Carlo average candidate log-likelihood over
// samples drawn from the true distribution.
struct KlProjection {
    Eigen::VectorXd theta_star;
    double objective = 0.0;                 // average log-likelihood at the optimum
    std::vector<double> objective_trace;    // per optimizer iteration
};

// Probit candidate using the first candidate_size features of the population.
// Newton iteration on the sampled objective; the sample stream is regenerated
// per iteration from the seed, so memory stays flat.
KlProjection kl_projection_probit(const ProbitPopulation& population, int candidate_size,
                                  long samples, std::uint64_t seed, double rel_tolerance = 1e-8,
                                  int max_iterations = 60);

// One-dimensional normal candidate fitted to arbitrary samples from the true
// distribution; the exact maximizer is moment matching.
KlProjection kl_projection_normal(const Eigen::VectorXd& samples_from_p0);

}  // namespace mfvi

#endif
