#ifndef MFVI_RUNNERS_HPP
#define MFVI_RUNNERS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mfvi/cavi.hpp"
#include "mfvi/data.hpp"
#include "mfvi/models/gmm.hpp"
#include "mfvi/models/normal.hpp"
#include "mfvi/models/probit.hpp"
#include "mfvi/models/sbm.hpp"
#include "mfvi/synthetic.hpp"

namespace mfvi {

// ---- convergence traces ------------------------------------------------------

struct ConvergenceConfig {
    std::vector<ScheduleKind> schedules{ScheduleKind::sequential_systematic};
    std::vector<double> gammas{1.0};
    int max_sweeps = 0;  // 0: default budget
    std::uint64_t seed = 0;
};

// One row per (schedule, gamma, sweep): ELBO, regret against a long reference
// run, KL to the reference state, and wall time.
Table run_convergence(const ModelSpec& model, const ConvergenceConfig& config);

// ---- evidence / BIC / ELBO gap grids ------------------------------------------

struct NormalGapsConfig {
    NormalDesign design;                    // data generating parameters
    std::vector<long> n_grid;               // varying sample size (prior fixed)
    std::vector<double> prior_scale_grid;   // varying prior scale s at n = design.n
    double prior_sd = 100.0;                // N(0, prior_sd^2) prior on the mean
    double prior_ig = 0.01;                 // IG(prior_ig, prior_ig) prior on the variance
    long evidence_samples = 100000;
    std::uint64_t seed = 0;
    int threads = 1;
};
Table run_gaps_normal(const NormalGapsConfig& config);

struct GmmGapsConfig {
    std::vector<double> deltas{1.0, 3.0, 5.0};
    double prior_sd = 2.0;
    int components = 3;
    std::vector<long> n_grid{3000};
    long fisher_samples = 200000;
    long evidence_samples = 0;  // 0: skip the evidence column
    std::uint64_t seed = 0;
    int threads = 1;
};
Table run_gaps_gmm(const GmmGapsConfig& config);

struct ProbitGapsConfig {
    ProbitDesign design;            // population: AR(1) features, decaying coefficients
    std::vector<int> sizes{3, 5, 7};
    std::vector<long> n_grid{1097};
    double prior_sd = 10.0;
    long fisher_samples = 1000000;
    long projection_samples = 1000000;  // KL projection for under-specified sizes
    long evidence_samples = 0;
    std::uint64_t seed = 0;
    int threads = 1;
};
Table run_gaps_probit(const ProbitGapsConfig& config);

// ---- model selection grids -----------------------------------------------------

struct GmmSelectionConfig {
    GmmDesign design;
    double prior_sd = 10.0;
    int k_min = 1;
    int k_max = 5;
    long evidence_samples = 30000;  // 0: skip evidence
    std::uint64_t seed = 0;
    int threads = 1;
};
Table run_selection_gmm(const GmmSelectionConfig& config);

struct ProbitSelectionConfig {
    ProbitDesign design;
    double prior_sd = 10.0;
    int max_size = 0;  // 0: all p nested sizes
    long evidence_samples = 10000;  // 0: skip evidence
    std::uint64_t seed = 0;
    int threads = 1;
};
Table run_selection_probit(const ProbitSelectionConfig& config);

struct SbmSelectionConfig {
    SbmDesign design;
    int k_min = 2;
    int k_max = 10;
    std::uint64_t seed = 0;
};
Table run_selection_sbm(const SbmSelectionConfig& config);

// ---- prediction study ------------------------------------------------------------

struct PredictionConfig {
    ProbitDesign design{10000, 100, 0.8, 0.8, 100};  // weak signals: beta_j = q^j, all nonzero
    std::optional<Eigen::VectorXd> beta;  // overrides the design's decay coefficients
    std::optional<ProbitData> dataset;    // when set, replaces the synthetic design
    int train_size = 500;
    int replicates = 20;
    int max_size = 25;       // nested candidate sizes 1..max_size
    double prior_sd = 1.0;
    std::uint64_t seed = 0;
    int threads = 1;
};

// Forward nested-path variable selection per criterion (elbo, aic, bic),
// refit on the training split, error/loss on the held-out split. Emits one
// row per (replicate, criterion) and summary rows with the mean (sd)
// classification error, median logistic loss, and mean selected size.
Table run_prediction(const PredictionConfig& config);

// Fits one model with the given schedule and reports the fitted ELBO.
struct FitSummary {
    double elbo = 0.0;
    int sweeps = 0;
    bool converged = false;
    bool diverged = false;
};
FitSummary fit_model(const ModelSpec& model, const Schedule& schedule, std::uint64_t seed,
                     int max_sweeps = 0);

}  // namespace mfvi

#endif
