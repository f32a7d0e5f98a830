#include "mfvi/cavi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mfvi/rng.hpp"

namespace mfvi {

namespace {

void blend_block_into(MeanFieldState& dst, const MeanFieldState& refreshed,
                      const MeanFieldState& old_state, std::pair<int, int> range, bool latent,
                      double gamma) {
    const auto& src = latent ? refreshed.latent_factors : refreshed.parameter_factors;
    const auto& old_factors = latent ? old_state.latent_factors : old_state.parameter_factors;
    auto& out = latent ? dst.latent_factors : dst.parameter_factors;
    for (int f = range.first; f < range.second; ++f) {
        out[static_cast<std::size_t>(f)] =
            blend_natural(old_factors[static_cast<std::size_t>(f)],
                          src[static_cast<std::size_t>(f)], gamma);
    }
}

// The step size interpolates parameter blocks only; latent blocks always
// take their full coordinate refresh. This is what makes the bias recursion
// with the complete-data diagonal exact: the latents sit at equilibrium with
// the current parameter means regardless of gamma.
void update_single_block(const ModelSpec& model, MeanFieldState& state, int block, bool latent,
                         double gamma) {
    if (latent) {
        model.refresh_latent_block(state, block);
        return;
    }
    if (gamma == 1.0) {
        model.refresh_parameter_block(state, block);
        return;
    }
    MeanFieldState work = state;
    model.refresh_parameter_block(work, block);
    blend_block_into(state, work, state, model.parameter_block_range(block), false, gamma);
}

// Jacobi stage over the latent blocks: every block computed from `base`.
void parallel_latent_stage(const ModelSpec& model, const MeanFieldState& base,
                           MeanFieldState& next) {
    for (int i = 0; i < model.latent_block_count(); ++i) {
        MeanFieldState work = base;
        model.refresh_latent_block(work, i);
        const auto range = model.latent_block_range(i);
        for (int f = range.first; f < range.second; ++f) {
            next.latent_factors[static_cast<std::size_t>(f)] =
                work.latent_factors[static_cast<std::size_t>(f)];
        }
    }
}

// Jacobi stage over the parameter blocks: block j sees `other_params` for the
// remaining parameter blocks and `latents` for the latent factors.
void parallel_parameter_stage(const ModelSpec& model, const MeanFieldState& other_params,
                              const MeanFieldState& latents, MeanFieldState& next, double gamma) {
    MeanFieldState base = other_params;
    base.latent_factors = latents.latent_factors;
    for (int j = 0; j < model.parameter_block_count(); ++j) {
        MeanFieldState work = base;
        model.refresh_parameter_block(work, j);
        blend_block_into(next, work, base, model.parameter_block_range(j), false, gamma);
    }
}

}  // namespace

int default_budget(int n, int d, ScheduleKind kind, double c) {
    if (n < 1 || d < 1 || !(c > 0.0)) {
        throw std::invalid_argument("default_budget: requires n, d >= 1 and c > 0");
    }
    const double log_nd = std::log(static_cast<double>(n) * static_cast<double>(d));
    const double raw = (kind == ScheduleKind::parallel) ? c * log_nd : c * d * log_nd;
    return std::max(10, static_cast<int>(std::ceil(raw)));
}

StoppingRule default_stopping_rule(const ModelSpec& model, const Schedule& schedule, double c) {
    const int d = model.block_count();
    const int budget = default_budget(std::max(model.sample_count(), 1), d, schedule.kind, c);
    StoppingRule rule;
    rule.max_iterations = (schedule.kind == ScheduleKind::parallel)
                              ? budget
                              : (budget + d - 1) / d;  // sweeps
    return rule;
}

MeanFieldState step_parallel(const ModelSpec& model, const MeanFieldState& state, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw std::invalid_argument("step_parallel: step size must be in (0, 1]");
    }
    MeanFieldState next = state;
    if (model.latent_block_count() == 0) {
        parallel_parameter_stage(model, state, state, next, gamma);
        return next;
    }
    if (model.latents_before_parameters()) {
        parallel_latent_stage(model, state, next);
        parallel_parameter_stage(model, state, next, next, gamma);
    } else {
        parallel_parameter_stage(model, state, state, next, gamma);
        MeanFieldState mid = state;
        mid.parameter_factors = next.parameter_factors;
        parallel_latent_stage(model, mid, next);
    }
    return next;
}

MeanFieldState step_sequential(const ModelSpec& model, const MeanFieldState& state, int block,
                               double gamma) {
    if (block < 0 || block >= model.block_count()) {
        throw std::invalid_argument("step_sequential: block index out of range");
    }
    MeanFieldState next = state;
    const int p = model.parameter_block_count();
    if (block < p) {
        update_single_block(model, next, block, false, gamma);
    } else {
        update_single_block(model, next, block - p, true, gamma);
    }
    return next;
}

namespace {

void systematic_sweep(const ModelSpec& model, MeanFieldState& state, double gamma) {
    const bool latents_first = model.latents_before_parameters();
    auto do_latents = [&] {
        for (int i = 0; i < model.latent_block_count(); ++i) {
            update_single_block(model, state, i, true, gamma);
        }
    };
    auto do_params = [&] {
        for (int j = 0; j < model.parameter_block_count(); ++j) {
            update_single_block(model, state, j, false, gamma);
        }
    };
    if (latents_first) {
        do_latents();
        do_params();
    } else {
        do_params();
        do_latents();
    }
}

}  // namespace

CaviResult run_cavi(const ModelSpec& model, MeanFieldState init, const Schedule& schedule,
                    const StoppingRule& stop, std::uint64_t seed,
                    const std::optional<FitReference>& reference) {
    if (stop.max_iterations < 1) {
        throw std::invalid_argument("run_cavi: max_iterations must be >= 1");
    }
    CaviResult result;
    result.state = std::move(init);
    ConvergenceTrace& trace = result.trace;

    const auto start = std::chrono::steady_clock::now();
    auto record = [&](double elbo) {
        trace.elbo_per_iteration.push_back(elbo);
        trace.wall_ms_per_iteration.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count());
        if (reference) {
            trace.regret_per_iteration.push_back(reference->elbo - elbo);
            trace.kl_to_reference.push_back(state_kl(result.state, reference->state));
        }
    };

    double elbo = model.elbo(result.state);
    record(elbo);

    double best_elbo = elbo;
    double first_span = 0.0;
    int quiet_sweeps = 0;
    std::uint64_t draw_counter = 0;
    const int d = model.block_count();

    for (int sweep = 0; sweep < stop.max_iterations; ++sweep) {
        switch (schedule.kind) {
            case ScheduleKind::parallel:
                result.state = step_parallel(model, result.state, schedule.step_size);
                break;
            case ScheduleKind::sequential_systematic:
                systematic_sweep(model, result.state, schedule.step_size);
                break;
            case ScheduleKind::sequential_randomized:
                for (int u = 0; u < d; ++u) {
                    const int block = uniform_index(seed, draw_counter++, d);
                    result.state = step_sequential(model, result.state, block, schedule.step_size);
                }
                break;
        }
        const double prev = elbo;
        elbo = model.elbo(result.state);
        trace.iterations_run = sweep + 1;
        record(elbo);

        if (sweep == 0) {
            first_span = std::abs(elbo - prev);
        }
        if (!std::isfinite(elbo) ||
            best_elbo - elbo > 1e6 * std::max(1.0, std::max(first_span, best_elbo - prev))) {
            trace.diverged = true;
            return result;
        }
        best_elbo = std::max(best_elbo, elbo);

        if (std::abs(elbo - prev) < stop.elbo_abs_tolerance) {
            if (++quiet_sweeps >= stop.patience) {
                trace.converged = true;
                return result;
            }
        } else {
            quiet_sweeps = 0;
        }
    }
    return result;
}

FitReference reference_optimum(const ModelSpec& model, std::uint64_t seed, double budget_scale) {
    Schedule schedule{ScheduleKind::sequential_systematic, 1.0};
    StoppingRule stop = default_stopping_rule(model, schedule);
    stop.max_iterations = static_cast<int>(std::ceil(stop.max_iterations * budget_scale));
    CaviResult fit = run_cavi(model, model.make_init_state(seed), schedule, stop, seed);
    return FitReference{std::move(fit.state), fit.trace.elbo_per_iteration.back()};
}

}  // namespace mfvi
