#include "mfvi/runners.hpp"

#include <algorithm>
#include <cmath>

#include "mfvi/evidence.hpp"
#include "mfvi/mle.hpp"
#include "mfvi/parallel.hpp"
#include "mfvi/projection.hpp"
#include "mfvi/rng.hpp"
#include "mfvi/selection.hpp"
#include "mfvi/special.hpp"

namespace mfvi {

namespace {

std::string schedule_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::parallel: return "parallel";
        case ScheduleKind::sequential_randomized: return "sequential_randomized";
        case ScheduleKind::sequential_systematic: return "sequential_systematic";
    }
    return "?";
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

CaviResult fit(const ModelSpec& model, const Schedule& schedule, std::uint64_t seed, int max_sweeps,
               const std::optional<FitReference>& reference = std::nullopt) {
    StoppingRule stop = default_stopping_rule(model, schedule);
    if (max_sweeps > 0) {
        stop.max_iterations = max_sweeps;
    }
    return run_cavi(model, model.make_init_state(seed), schedule, stop, seed, reference);
}

// Best-ELBO fit over a few jittered initializations; mixture-type posteriors
// keep symmetric saddles that a single unlucky start can stall on.
CaviResult fit_best_of(const ModelSpec& model, const Schedule& schedule, std::uint64_t seed,
                       int restarts, int max_sweeps = 0) {
    CaviResult best;
    double best_elbo = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        CaviResult candidate = fit(model, schedule, derive_seed(seed, static_cast<std::uint64_t>(r)),
                                   max_sweeps);
        const double elbo = candidate.trace.elbo_per_iteration.back();
        if (elbo > best_elbo) {
            best_elbo = elbo;
            best = std::move(candidate);
        }
    }
    return best;
}

}  // namespace

FitSummary fit_model(const ModelSpec& model, const Schedule& schedule, std::uint64_t seed,
                     int max_sweeps) {
    const CaviResult result = fit(model, schedule, seed, max_sweeps);
    return FitSummary{result.trace.elbo_per_iteration.back(), result.trace.iterations_run,
                      result.trace.converged, result.trace.diverged};
}

Table run_convergence(const ModelSpec& model, const ConvergenceConfig& config) {
    const FitReference reference = reference_optimum(model, config.seed);
    Table table;
    table.columns = {"schedule", "gamma", "sweep", "elbo", "regret", "kl_to_reference",
                     "wall_ms", "diverged"};
    for (ScheduleKind kind : config.schedules) {
        for (double gamma : config.gammas) {
            const Schedule schedule{kind, gamma};
            const CaviResult result =
                fit(model, schedule, config.seed, config.max_sweeps, reference);
            const auto& trace = result.trace;
            for (std::size_t t = 0; t < trace.elbo_per_iteration.size(); ++t) {
                table.add_row({schedule_name(kind), fmt(gamma), fmt(static_cast<long>(t)),
                               fmt(trace.elbo_per_iteration[t]), fmt(trace.regret_per_iteration[t]),
                               fmt(trace.kl_to_reference[t]), fmt(trace.wall_ms_per_iteration[t]),
                               trace.diverged ? "1" : "0"});
            }
        }
    }
    return table;
}

Table run_gaps_normal(const NormalGapsConfig& config) {
    Table table;
    table.columns = {"grid",       "n",          "prior_scale",  "elbo",
                     "loglik_max", "bic",        "evidence",     "evidence_stderr",
                     "c_star",     "c_bic_star", "c_tilde_star", "rel_err_elbo",
                     "rel_err_bic"};
    const Eigen::Vector2d theta_star(config.design.mu, config.design.sigma * config.design.sigma);

    auto emit = [&](const std::string& grid, long n, double scale, const Eigen::VectorXd& data,
                    const NormalPrior& prior, std::uint64_t seed) {
        NormalModel model(data, prior);
        const CaviResult result = fit(model, {ScheduleKind::sequential_systematic, 1.0}, seed, 0);
        const double elbo = result.trace.elbo_per_iteration.back();
        const MleResult mle = normal_mle(data);
        const double bic_value = bic(mle.loglik, 2, n);
        const EvidenceEstimate evidence =
            mc_evidence(model, config.evidence_samples, derive_seed(seed, 1), config.threads);
        const GapConstants gaps = gap_constants(fisher_bundle(model, theta_star));
        const double denom = std::max(std::abs(evidence.log_evidence), 1e-12);
        table.add_row({grid, fmt(n), fmt(scale), fmt(elbo), fmt(mle.loglik), fmt(bic_value),
                       fmt(evidence.log_evidence), fmt(evidence.stderr_log), fmt(gaps.c_star),
                       fmt(gaps.c_bic_star), fmt(gaps.c_tilde_star),
                       fmt((elbo - evidence.log_evidence) / denom),
                       fmt((-0.5 * bic_value - evidence.log_evidence) / denom)});
    };

    std::uint64_t idx = 0;
    for (long n : config.n_grid) {
        NormalDesign design = config.design;
        design.n = static_cast<int>(n);
        const Eigen::VectorXd data = generate_normal_data(design, derive_seed(config.seed, idx));
        const NormalPrior prior{0.0, config.prior_sd * config.prior_sd, config.prior_ig,
                                config.prior_ig};
        emit("n", n, config.prior_sd, data, prior, derive_seed(config.seed, 100000 + idx));
        ++idx;
    }
    if (!config.prior_scale_grid.empty()) {
        const Eigen::VectorXd data = generate_normal_data(config.design, derive_seed(config.seed, 0));
        for (double s : config.prior_scale_grid) {
            const NormalPrior prior{0.0, s * s, 1.0 / s, 1.0 / s};
            emit("prior_scale", config.design.n, s, data, prior,
                 derive_seed(config.seed, 200000 + idx));
            ++idx;
        }
    }
    return table;
}

Table run_gaps_gmm(const GmmGapsConfig& config) {
    Table table;
    table.columns = {"delta",        "n",           "elbo",          "loglik_max",
                     "bic",          "gap",         "c_star",        "c_bic_star",
                     "c_tilde_star", "evidence",    "evidence_stderr"};
    std::uint64_t idx = 0;
    for (double delta : config.deltas) {
        const Eigen::VectorXd centers = gmm_centers(delta, config.components);
        for (long n : config.n_grid) {
            const std::uint64_t seed = derive_seed(config.seed, idx++);
            const GmmDesign design{delta, config.components, static_cast<int>(n)};
            const Eigen::VectorXd data = generate_gmm_data(design, seed);
            GmmModel model(data, config.components, config.prior_sd);
            const CaviResult result =
                fit_best_of(model, {ScheduleKind::sequential_systematic, 1.0}, seed, 3);
            const double elbo = result.trace.elbo_per_iteration.back();
            const MleResult mle = gmm_mle(data, config.components, {}, seed);
            const double bic_value = bic(mle.loglik, config.components, n);
            const GapConstants gaps = gap_constants(
                fisher_bundle(model, centers, config.fisher_samples, derive_seed(seed, 7)));
            std::string evidence_s = "", stderr_s = "";
            if (config.evidence_samples > 0) {
                const EvidenceEstimate evidence =
                    mc_evidence(model, config.evidence_samples, derive_seed(seed, 8), config.threads);
                evidence_s = fmt(evidence.log_evidence);
                stderr_s = fmt(evidence.stderr_log);
            }
            table.add_row({fmt(delta), fmt(n), fmt(elbo), fmt(mle.loglik), fmt(bic_value),
                           fmt(-0.5 * bic_value - elbo), fmt(gaps.c_star), fmt(gaps.c_bic_star),
                           fmt(gaps.c_tilde_star), evidence_s, stderr_s});
        }
    }
    return table;
}

Table run_gaps_probit(const ProbitGapsConfig& config) {
    Table table;
    table.columns = {"size",         "n",            "elbo",         "loglik_max",
                     "bic",          "gap",          "c_star",       "c_block_star",
                     "c_bic_star",   "c_tilde_star", "c_tilde_block", "evidence",
                     "evidence_stderr"};
    const ProbitPopulation population{
        probit_sigma_ar1(config.design.p, config.design.correlation),
        probit_beta_decay(config.design.p, config.design.decay, config.design.nonzero)};

    for (int size : config.sizes) {
        Eigen::VectorXd beta_star;
        if (size >= config.design.nonzero) {
            beta_star = population.beta.head(size);
        } else {
            beta_star = kl_projection_probit(population, size, config.projection_samples,
                                             derive_seed(config.seed, 11 + size))
                            .theta_star;
        }
        const Eigen::MatrixXd prior_cov =
            config.prior_sd * config.prior_sd * Eigen::MatrixXd::Identity(size, size);
        const FisherBundle bundle =
            fisher_bundle_probit(population, size, beta_star, prior_cov, config.fisher_samples,
                                 derive_seed(config.seed, 23 + size), config.threads);
        const GapConstants gaps = gap_constants(bundle, std::vector<int>{size});
        const double c_tilde_block = *gaps.c_block_star - gaps.c_bic_star;

        std::uint64_t idx = 0;
        for (long n : config.n_grid) {
            const std::uint64_t seed = derive_seed(config.seed, 1000 + 100 * size + idx++);
            ProbitDesign design = config.design;
            design.n = static_cast<int>(n);
            const ProbitData data = generate_probit_data(design, seed);
            ProbitModel model(data.design.leftCols(size), data.responses, prior_cov,
                              ProbitFactorization::block);
            const CaviResult result =
                fit(model, {ScheduleKind::sequential_systematic, 1.0}, seed, 0);
            const double elbo = result.trace.elbo_per_iteration.back();
            const MleResult mle = probit_mle(data.design.leftCols(size), data.responses);
            const double bic_value = bic(mle.loglik, size, n);
            std::string evidence_s = "", stderr_s = "";
            if (config.evidence_samples > 0) {
                const EvidenceEstimate evidence = mc_evidence(model, config.evidence_samples,
                                                              derive_seed(seed, 3), config.threads);
                evidence_s = fmt(evidence.log_evidence);
                stderr_s = fmt(evidence.stderr_log);
            }
            table.add_row({fmt(size), fmt(n), fmt(elbo), fmt(mle.loglik), fmt(bic_value),
                           fmt(-0.5 * bic_value - elbo), fmt(gaps.c_star), fmt(*gaps.c_block_star),
                           fmt(gaps.c_bic_star), fmt(gaps.c_tilde_star), fmt(c_tilde_block),
                           evidence_s, stderr_s});
        }
    }
    return table;
}

namespace {

void append_selection_rows(Table& table, std::vector<CriterionValue> candidates,
                           const std::vector<Criterion>& criteria,
                           const std::vector<std::vector<std::string>>& extra_cells) {
    std::vector<std::string> winners;
    for (Criterion c : criteria) {
        winners.push_back(select(candidates, c));
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const CriterionValue& v = candidates[i];
        std::string selected_by;
        for (std::size_t c = 0; c < criteria.size(); ++c) {
            if (winners[c] == v.model_id) {
                if (!selected_by.empty()) {
                    selected_by += ';';
                }
                selected_by += criterion_name(criteria[c]);
            }
        }
        std::vector<std::string> row = {v.model_id, fmt(v.d_m), fmt(v.n), fmt(v.elbo), fmt(v.bic),
                                        fmt(v.aic)};
        if (v.mc_evidence) {
            row.push_back(fmt(v.mc_evidence->estimate));
            row.push_back(fmt(v.mc_evidence->stderr_log));
        } else {
            row.push_back("");
            row.push_back("");
        }
        for (const auto& cell : extra_cells[i]) {
            row.push_back(cell);
        }
        row.push_back(selected_by);
        table.add_row(std::move(row));
    }
}

}  // namespace

Table run_selection_gmm(const GmmSelectionConfig& config) {
    Table table;
    table.columns = {"model", "d_m",      "n",        "elbo",       "bic",
                     "aic",   "evidence", "evidence_stderr", "selected_by"};
    const Eigen::VectorXd data = generate_gmm_data(config.design, config.seed);
    std::vector<CriterionValue> candidates;
    for (int k = config.k_min; k <= config.k_max; ++k) {
        GmmModel model(data, k, config.prior_sd);
        const CaviResult result = fit_best_of(
            model, {ScheduleKind::sequential_systematic, 1.0}, derive_seed(config.seed, k), 3);
        const MleResult mle = gmm_mle(data, k, {}, derive_seed(config.seed, 50 + k));
        CriterionValue value;
        value.model_id = "K=" + std::to_string(k);
        value.d_m = k;
        value.n = config.design.n;
        value.elbo = result.trace.elbo_per_iteration.back();
        value.bic = bic(mle.loglik, k, config.design.n);
        value.aic = aic(mle.loglik, k);
        if (config.evidence_samples > 0) {
            const EvidenceEstimate evidence = mc_evidence(
                model, config.evidence_samples, derive_seed(config.seed, 100 + k), config.threads);
            value.mc_evidence = EvidenceValue{evidence.log_evidence, evidence.stderr_log};
        }
        candidates.push_back(std::move(value));
    }
    std::vector<Criterion> criteria{Criterion::elbo, Criterion::bic, Criterion::aic};
    if (config.evidence_samples > 0) {
        criteria.push_back(Criterion::evidence);
    }
    append_selection_rows(table, candidates, criteria,
                          std::vector<std::vector<std::string>>(candidates.size()));
    return table;
}

Table run_selection_probit(const ProbitSelectionConfig& config) {
    Table table;
    table.columns = {"model", "d_m",      "n",        "elbo",       "bic",
                     "aic",   "evidence", "evidence_stderr", "selected_by"};
    const ProbitData data = generate_probit_data(config.design, config.seed);
    const int max_size = config.max_size > 0 ? std::min(config.max_size, config.design.p)
                                             : config.design.p;
    std::vector<CriterionValue> candidates;
    for (int size = 1; size <= max_size; ++size) {
        const Eigen::MatrixXd prior_cov =
            config.prior_sd * config.prior_sd * Eigen::MatrixXd::Identity(size, size);
        ProbitModel model(data.design.leftCols(size), data.responses, prior_cov,
                          ProbitFactorization::block);
        const CaviResult result = fit(model, {ScheduleKind::sequential_systematic, 1.0},
                                      derive_seed(config.seed, static_cast<std::uint64_t>(size)), 0);
        const MleResult mle = probit_mle(data.design.leftCols(size), data.responses);
        CriterionValue value;
        value.model_id = "size=" + std::to_string(size);
        value.d_m = size;
        value.n = config.design.n;
        value.elbo = result.trace.elbo_per_iteration.back();
        value.bic = bic(mle.loglik, size, config.design.n);
        value.aic = aic(mle.loglik, size);
        if (config.evidence_samples > 0) {
            const EvidenceEstimate evidence =
                mc_evidence(model, config.evidence_samples,
                            derive_seed(config.seed, 500 + static_cast<std::uint64_t>(size)),
                            config.threads);
            value.mc_evidence = EvidenceValue{evidence.log_evidence, evidence.stderr_log};
        }
        candidates.push_back(std::move(value));
    }
    std::vector<Criterion> criteria{Criterion::elbo, Criterion::bic, Criterion::aic};
    if (config.evidence_samples > 0) {
        criteria.push_back(Criterion::evidence);
    }
    append_selection_rows(table, candidates, criteria,
                          std::vector<std::vector<std::string>>(candidates.size()));
    return table;
}

Table run_selection_sbm(const SbmSelectionConfig& config) {
    Table table;
    table.columns = {"model", "d_m",      "n",        "elbo",       "bic",
                     "aic",   "evidence", "evidence_stderr", "selected_by"};
    const SbmSample sample = generate_sbm_data(config.design, config.seed);
    const long pair_count =
        static_cast<long>(config.design.n) * (config.design.n - 1) / 2;
    std::vector<CriterionValue> candidates;
    for (int k = config.k_min; k <= config.k_max; ++k) {
        SbmModel model(sample.adjacency, k, uniform_sbm_prior(config.design.n, k));
        const CaviResult result = fit(
            model, {ScheduleKind::parallel, 1.0}, derive_seed(config.seed, static_cast<std::uint64_t>(k)), 0);
        const MleResult mle = sbm_variational_mean_mle(model, result.state);
        const int d_m = k * (k + 1) / 2;
        CriterionValue value;
        value.model_id = "K=" + std::to_string(k);
        value.d_m = d_m;
        value.n = pair_count;
        value.elbo = result.trace.elbo_per_iteration.back();
        value.bic = bic(mle.loglik, d_m, pair_count);
        value.aic = aic(mle.loglik, d_m);
        candidates.push_back(std::move(value));
    }
    append_selection_rows(table, candidates, {Criterion::elbo, Criterion::bic},
                          std::vector<std::vector<std::string>>(candidates.size()));
    return table;
}

Table run_prediction(const PredictionConfig& config) {
    Table table;
    table.columns = {"row_type",            "replicate", "criterion", "selected_size",
                     "classification_error", "sd_error",  "logistic_loss"};
    const std::vector<Criterion> criteria{Criterion::elbo, Criterion::aic, Criterion::bic};
    struct Outcome {
        double error = 0.0;
        double loss = 0.0;
        int size = 0;
    };
    std::vector<std::vector<Outcome>> outcomes(
        criteria.size(), std::vector<Outcome>(static_cast<std::size_t>(config.replicates)));

    const int pool_n = config.dataset ? static_cast<int>(config.dataset->design.rows())
                                      : config.design.n;
    if (config.train_size >= pool_n) {
        throw std::invalid_argument("run_prediction: train_size must leave held-out rows");
    }

    parallel_tasks(config.replicates, config.threads, [&](int rep) {
        const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));
        ProbitData data;
        if (config.dataset) {
            // Seeded random split of a fixed dataset.
            data = *config.dataset;
            const auto n = static_cast<int>(data.design.rows());
            std::vector<int> order(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                order[static_cast<std::size_t>(i)] = i;
            }
            auto engine = make_engine(derive_seed(seed, 77));
            std::shuffle(order.begin(), order.end(), engine);
            Eigen::MatrixXd shuffled_x(n, data.design.cols());
            Eigen::VectorXi shuffled_y(n);
            for (int i = 0; i < n; ++i) {
                shuffled_x.row(i) = data.design.row(order[static_cast<std::size_t>(i)]);
                shuffled_y[i] = data.responses[order[static_cast<std::size_t>(i)]];
            }
            data.design = std::move(shuffled_x);
            data.responses = std::move(shuffled_y);
        } else if (config.beta) {
            data = generate_probit_data(probit_sigma_ar1(config.design.p, config.design.correlation),
                                        *config.beta, config.design.n, seed);
        } else {
            data = generate_probit_data(config.design, seed);
        }
        const int total_n = static_cast<int>(data.design.rows());
        const int p = static_cast<int>(data.design.cols());
        const int train_n = config.train_size;
        const int test_n = total_n - train_n;
        Eigen::MatrixXd train_x = data.design.topRows(train_n);
        const Eigen::VectorXi train_y = data.responses.head(train_n);
        Eigen::MatrixXd test_x = data.design.bottomRows(test_n);
        const Eigen::VectorXi test_y = data.responses.tail(test_n);

        if (config.dataset) {
            // Nested path ordered by |corr(x_j, y)| on the training split;
            // synthetic designs keep the given order (signal features first).
            Eigen::VectorXd score(p);
            const Eigen::VectorXd yc =
                train_y.cast<double>().array() - train_y.cast<double>().mean();
            for (int j = 0; j < p; ++j) {
                const Eigen::VectorXd xc = train_x.col(j).array() - train_x.col(j).mean();
                const double denom = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
                score[j] = denom > 0.0 ? std::abs(xc.dot(yc)) / denom : 0.0;
            }
            std::vector<int> rank(static_cast<std::size_t>(p));
            for (int j = 0; j < p; ++j) {
                rank[static_cast<std::size_t>(j)] = j;
            }
            std::stable_sort(rank.begin(), rank.end(),
                             [&](int a, int b) { return score[a] > score[b]; });
            Eigen::MatrixXd train_ranked(train_n, p), test_ranked(test_n, p);
            for (int j = 0; j < p; ++j) {
                train_ranked.col(j) = train_x.col(rank[static_cast<std::size_t>(j)]);
                test_ranked.col(j) = test_x.col(rank[static_cast<std::size_t>(j)]);
            }
            train_x = std::move(train_ranked);
            test_x = std::move(test_ranked);
        }

        const int max_size = std::min(config.max_size, p);
        std::vector<CriterionValue> values;
        std::vector<Eigen::VectorXd> mle_beta(static_cast<std::size_t>(max_size));
        std::vector<Eigen::VectorXd> vb_beta(static_cast<std::size_t>(max_size));
        for (int size = 1; size <= max_size; ++size) {
            const Eigen::MatrixXd x_k = train_x.leftCols(size);
            const Eigen::MatrixXd prior_cov =
                config.prior_sd * config.prior_sd * Eigen::MatrixXd::Identity(size, size);
            ProbitModel model(x_k, train_y, prior_cov, ProbitFactorization::block);
            const CaviResult result =
                fit(model, {ScheduleKind::sequential_systematic, 1.0}, seed, 0);
            const MleResult mle = probit_mle(x_k, train_y);
            CriterionValue value;
            value.model_id = std::to_string(size);
            value.d_m = size;
            value.n = train_n;
            value.elbo = result.trace.elbo_per_iteration.back();
            value.bic = bic(mle.loglik, size, train_n);
            value.aic = aic(mle.loglik, size);
            values.push_back(std::move(value));
            mle_beta[static_cast<std::size_t>(size - 1)] = mle.theta;
            vb_beta[static_cast<std::size_t>(size - 1)] = model.coefficient_mean(result.state);
        }

        for (std::size_t c = 0; c < criteria.size(); ++c) {
            const int size = std::stoi(select(values, criteria[c]));
            const Eigen::VectorXd& beta = (criteria[c] == Criterion::elbo)
                                              ? vb_beta[static_cast<std::size_t>(size - 1)]
                                              : mle_beta[static_cast<std::size_t>(size - 1)];
            const Eigen::VectorXd eta = test_x.leftCols(size) * beta;
            double wrong = 0.0, loss = 0.0;
            for (int i = 0; i < test_n; ++i) {
                const double p1 = std::clamp(normal_cdf(eta[i]), 1e-12, 1.0 - 1e-12);
                const int predicted = p1 > 0.5 ? 1 : 0;
                wrong += predicted != test_y[i] ? 1.0 : 0.0;
                loss -= test_y[i] == 1 ? std::log(p1) : std::log(1.0 - p1);
            }
            outcomes[c][static_cast<std::size_t>(rep)] =
                Outcome{wrong / test_n, loss / test_n, size};
        }
    });

    for (int rep = 0; rep < config.replicates; ++rep) {
        for (std::size_t c = 0; c < criteria.size(); ++c) {
            const Outcome& o = outcomes[c][static_cast<std::size_t>(rep)];
            table.add_row({"replicate", fmt(rep), criterion_name(criteria[c]), fmt(o.size),
                           fmt(o.error), "", fmt(o.loss)});
        }
    }
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        double mean_error = 0.0, mean_size = 0.0;
        std::vector<double> losses;
        for (const Outcome& o : outcomes[c]) {
            mean_error += o.error;
            mean_size += o.size;
            losses.push_back(o.loss);
        }
        const double m = static_cast<double>(config.replicates);
        mean_error /= m;
        mean_size /= m;
        double var = 0.0;
        for (const Outcome& o : outcomes[c]) {
            var += (o.error - mean_error) * (o.error - mean_error);
        }
        const double sd = config.replicates > 1 ? std::sqrt(var / (m - 1.0)) : 0.0;
        std::sort(losses.begin(), losses.end());
        const double median = config.replicates % 2 == 1
                                  ? losses[losses.size() / 2]
                                  : 0.5 * (losses[losses.size() / 2 - 1] + losses[losses.size() / 2]);
        table.add_row({"summary", "", criterion_name(criteria[c]), fmt(mean_size), fmt(mean_error),
                       fmt(sd), fmt(median)});
    }
    return table;
}

}  // namespace mfvi
