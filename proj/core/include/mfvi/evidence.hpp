#ifndef MFVI_EVIDENCE_HPP
#define MFVI_EVIDENCE_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "mfvi/models/gmm.hpp"
#include "mfvi/models/normal.hpp"
#include "mfvi/models/probit.hpp"
#include "mfvi/models/sbm.hpp"

namespace mfvi {

// Monte Carlo estimate of the log evidence log p(data | M) by averaging the
// marginal likelihood over prior draws. stderr_log is the delta-method
// standard error on the log scale.
struct EvidenceEstimate {
    double log_evidence = 0.0;
    double stderr_log = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
    double effective_sample_size = 0.0;
    bool low_ess_warning = false;  // effective sample size below 100
};

EvidenceEstimate mc_evidence(const NormalModel& model, long samples, std::uint64_t seed,
                             int threads = 1);
EvidenceEstimate mc_evidence(const ProbitModel& model, long samples, std::uint64_t seed,
                             int threads = 1);
EvidenceEstimate mc_evidence(const GmmModel& model, long samples, std::uint64_t seed,
                             int threads = 1);

// SBM evidence integrates B over its Beta priors by Monte Carlo and sums the
// assignments exactly; restricted to n <= 12 nodes and K <= 3 (the exact sum
// enumerates K^n assignments). Throws std::invalid_argument beyond that.
EvidenceEstimate mc_evidence(const SbmModel& model, long samples, std::uint64_t seed,
                             int threads = 1);

// Exact log evidence of data under X ~ N(mu0 1, sigma^2 I + sigma0^2 11^T),
// i.e. the normal likelihood with known variance and conjugate mean prior,
// via the rank-one determinant and inverse identities.
double closed_form_evidence_normal_known_variance(const Eigen::VectorXd& data, double mu0,
                                                  double sigma0_sq, double sigma_sq);

}  // namespace mfvi

#endif
