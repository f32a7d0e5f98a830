#ifndef MFVI_CAVI_HPP
#define MFVI_CAVI_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mfvi/model.hpp"

namespace mfvi {

enum class ScheduleKind { parallel, sequential_randomized, sequential_systematic };

// Updating scheme plus step size gamma in (0, 1]. gamma = 1 is the plain
// coordinate optimum; gamma < 1 interpolates densities geometrically,
// implemented as a convex combination of natural parameters.
struct Schedule {
    ScheduleKind kind = ScheduleKind::sequential_systematic;
    double step_size = 1.0;
};

// Budget and tolerance. max_iterations counts sweeps; a sweep performs one
// update of every block (for the randomized schedule, block_count random
// single-block updates).
struct StoppingRule {
    int max_iterations = 1000;
    double elbo_abs_tolerance = 1e-10;
    int patience = 3;
};

// Fixed reference optimum used to fill regret and KL columns of a trace.
struct FitReference {
    MeanFieldState state;
    double elbo = 0.0;
};

struct ConvergenceTrace {
    std::vector<double> elbo_per_iteration;           // entry 0 is the initial state
    std::vector<double> regret_per_iteration;         // requires a reference
    std::vector<double> kl_to_reference;              // requires a reference
    std::vector<double> wall_ms_per_iteration;        // cumulative, entry 0 is 0
    int iterations_run = 0;                           // sweeps executed
    bool converged = false;
    bool diverged = false;
};

struct CaviResult {
    MeanFieldState state;
    ConvergenceTrace trace;
};

// Suggested iteration budget: ceil(c * d * log(n d)) sequential single-block
// updates, or ceil(c * log(n d)) parallel sweeps, floored at 10.
int default_budget(int n, int d, ScheduleKind kind, double c = 10.0);

// Stopping rule with max_iterations set from default_budget, in sweeps.
StoppingRule default_stopping_rule(const ModelSpec& model, const Schedule& schedule, double c = 10.0);

// One parallel sweep. Parameter blocks are recomputed Jacobi-style (each from
// the previous values of the other parameter blocks) and interpolated by the
// step size; latent blocks always take their full coordinate refresh, staged
// before or after the parameter stage per latents_before_parameters(). Models
// without latent blocks get the plain Jacobi update of all factors from the
// previous state; gamma = 1 is the plain alternating sweep everywhere.
MeanFieldState step_parallel(const ModelSpec& model, const MeanFieldState& state, double gamma);

// One single-block update; only the indexed block changes. Blocks are indexed
// with parameter blocks first, latent blocks after. The step size applies to
// parameter blocks; latent blocks refresh fully.
MeanFieldState step_sequential(const ModelSpec& model, const MeanFieldState& state, int block,
                               double gamma);

// Runs CAVI until the stopping rule fires, the budget runs out, or the ELBO
// diverges. Divergence is reported in the trace rather than thrown, so the
// divergent schedules remain observable.
CaviResult run_cavi(const ModelSpec& model, MeanFieldState init, const Schedule& schedule,
                    const StoppingRule& stop, std::uint64_t seed,
                    const std::optional<FitReference>& reference = std::nullopt);

// Reference optimum for regret traces: sequential systematic full-step run
// with 100x the default budget.
FitReference reference_optimum(const ModelSpec& model, std::uint64_t seed, double budget_scale = 100.0);

}  // namespace mfvi

#endif
