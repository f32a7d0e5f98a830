// Command line front end: synthetic data generation, single-model fits,
// Monte Carlo evidence, and the experiment runners (selection, gap, and
// convergence grids, prediction study). Output is CSV or JSON.

#include <CLI11.hpp>
#include <iostream>
#include <memory>
#include <optional>

#include "mfvi/errors.hpp"
#include "mfvi/evidence.hpp"
#include "mfvi/runners.hpp"

namespace {

using namespace mfvi;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out;
    int threads = 1;
    std::string format = "csv";
};

void emit(const Table& table, const GlobalOptions& options) {
    if (options.out.empty()) {
        std::cout << to_csv(table);
    } else if (options.format == "json") {
        write_json(options.out, table);
    } else {
        write_csv(options.out, table);
    }
}

ScheduleKind schedule_from_name(const std::string& name) {
    if (name == "parallel") return ScheduleKind::parallel;
    if (name == "sequential_randomized") return ScheduleKind::sequential_randomized;
    if (name == "sequential_systematic") return ScheduleKind::sequential_systematic;
    throw std::invalid_argument("--schedule: unknown schedule: " + name);
}

struct FamilyOptions {
    std::string family;
    // normal
    double mu = 100.0, sigma = 100.0;
    double prior_mu0 = 0.0, prior_sd = 100.0, prior_a = 0.01, prior_b = 0.01;
    // gmm
    double delta = 5.0;
    int k = 3;
    double gmm_prior_sd = 10.0;
    // probit
    int p = 10;
    double r = 0.8, q = 0.8;
    int nonzero = 5;
    double beta_prior_sd = 10.0;
    std::string mode = "block";
    // sbm
    double within = 0.6, between_max = 0.4;
    int n = 100;
};

void add_family_flags(CLI::App* cmd, FamilyOptions& f) {
    cmd->add_option("--family", f.family, "normal | gmm | probit | sbm")->required();
    cmd->add_option("--n", f.n, "sample size / node count");
    cmd->add_option("--mu", f.mu, "normal design mean");
    cmd->add_option("--sigma", f.sigma, "normal design standard deviation");
    cmd->add_option("--prior-mu0", f.prior_mu0, "normal prior mean");
    cmd->add_option("--prior-sd", f.prior_sd, "normal prior standard deviation on the mean");
    cmd->add_option("--prior-a", f.prior_a, "inverse gamma shape");
    cmd->add_option("--prior-b", f.prior_b, "inverse gamma rate");
    cmd->add_option("--delta", f.delta, "gmm cluster separation");
    cmd->add_option("--k", f.k, "components / communities");
    cmd->add_option("--gmm-prior-sd", f.gmm_prior_sd, "gmm center prior standard deviation");
    cmd->add_option("--p", f.p, "probit feature count");
    cmd->add_option("--r", f.r, "probit AR(1) feature correlation");
    cmd->add_option("--q", f.q, "probit coefficient decay");
    cmd->add_option("--nonzero", f.nonzero, "probit nonzero coefficient count");
    cmd->add_option("--beta-prior-sd", f.beta_prior_sd, "probit prior standard deviation");
    cmd->add_option("--mode", f.mode, "probit factorization: block | factorized");
    cmd->add_option("--within", f.within, "sbm within-community edge probability");
    cmd->add_option("--between-max", f.between_max, "sbm between-community Unif upper bound");
}

ProbitFactorization mode_from_name(const std::string& mode) {
    if (mode == "block") return ProbitFactorization::block;
    if (mode == "factorized") return ProbitFactorization::fully_factorized;
    throw std::invalid_argument("--mode: unknown probit mode: " + mode);
}

std::unique_ptr<ModelSpec> load_model(const FamilyOptions& f, const std::string& data_path) {
    if (f.family == "normal") {
        return std::make_unique<NormalModel>(
            read_value_column(data_path),
            NormalPrior{f.prior_mu0, f.prior_sd * f.prior_sd, f.prior_a, f.prior_b});
    }
    if (f.family == "gmm") {
        return std::make_unique<GmmModel>(read_value_column(data_path), f.k, f.gmm_prior_sd);
    }
    if (f.family == "probit") {
        ProbitData data = read_libsvm(data_path);
        const int d = static_cast<int>(data.design.cols());
        return std::make_unique<ProbitModel>(
            std::move(data.design), std::move(data.responses),
            f.beta_prior_sd * f.beta_prior_sd * Eigen::MatrixXd::Identity(d, d),
            mode_from_name(f.mode));
    }
    if (f.family == "sbm") {
        Eigen::MatrixXi adjacency = read_adjacency(data_path);
        const int nodes = static_cast<int>(adjacency.rows());
        return std::make_unique<SbmModel>(std::move(adjacency), f.k,
                                          uniform_sbm_prior(nodes, f.k));
    }
    throw std::invalid_argument("--family: unknown family: " + f.family);
}

std::string fitted_parameters(const ModelSpec& model, const MeanFieldState& state) {
    std::string out;
    auto append = [&out](double v) {
        if (!out.empty()) {
            out += ';';
        }
        out += format_double(v);
    };
    if (const auto* gmm = dynamic_cast<const GmmModel*>(&model)) {
        const Eigen::VectorXd m = gmm->center_means(state);
        for (Eigen::Index i = 0; i < m.size(); ++i) append(m[i]);
    } else if (const auto* probit = dynamic_cast<const ProbitModel*>(&model)) {
        const Eigen::VectorXd m = probit->coefficient_mean(state);
        for (Eigen::Index i = 0; i < m.size(); ++i) append(m[i]);
    } else if (const auto* sbm = dynamic_cast<const SbmModel*>(&model)) {
        const Eigen::MatrixXd b = sbm->connectivity_mean(state);
        for (int a = 0; a < sbm->communities(); ++a) {
            for (int c = a; c < sbm->communities(); ++c) append(b(a, c));
        }
    } else {
        const auto& q_mu = std::get<GaussianFactor>(state.parameter_factors[0]);
        const auto& q_var = std::get<InverseGammaFactor>(state.parameter_factors[1]);
        append(q_mu.mean);
        append(q_mu.variance);
        append(q_var.shape);
        append(q_var.rate);
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"mean-field variational inference, ELBO model selection, and experiment runners"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions global;
    app.add_option("--seed", global.seed, "root RNG seed")->capture_default_str();
    app.add_option("--out", global.out, "output path (default: CSV on stdout)");
    app.add_option("--threads", global.threads, "worker threads")->capture_default_str();
    app.add_option("--format", global.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    FamilyOptions gen_f;
    add_family_flags(gen, gen_f);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit one model to a dataset");
    FamilyOptions fit_f;
    add_family_flags(fit_cmd, fit_f);
    std::string fit_data, fit_schedule = "sequential_systematic";
    double fit_gamma = 1.0;
    int fit_sweeps = 0;
    fit_cmd->add_option("--data", fit_data, "dataset path")->required();
    fit_cmd->add_option("--schedule", fit_schedule,
                        "parallel | sequential_randomized | sequential_systematic");
    fit_cmd->add_option("--gamma", fit_gamma, "step size in (0, 1]");
    fit_cmd->add_option("--max-sweeps", fit_sweeps, "sweep budget (0: default)");

    // evidence
    auto* ev_cmd = app.add_subcommand("evidence", "Monte Carlo log evidence of a dataset");
    FamilyOptions ev_f;
    add_family_flags(ev_cmd, ev_f);
    std::string ev_data;
    long ev_samples = 100000;
    ev_cmd->add_option("--data", ev_data, "dataset path")->required();
    ev_cmd->add_option("--samples", ev_samples, "prior Monte Carlo samples");

    // select
    auto* sel_cmd = app.add_subcommand("select", "criterion values over a candidate grid");
    FamilyOptions sel_f;
    add_family_flags(sel_cmd, sel_f);
    int sel_kmin = 1, sel_kmax = 5, sel_max_size = 0;
    long sel_evidence_samples = 0;
    sel_cmd->add_option("--k-min", sel_kmin, "smallest candidate K");
    sel_cmd->add_option("--k-max", sel_kmax, "largest candidate K");
    sel_cmd->add_option("--max-size", sel_max_size, "largest probit candidate size (0: all)");
    sel_cmd->add_option("--evidence-samples", sel_evidence_samples,
                        "evidence column samples (0: skip)");

    // gaps
    auto* gaps_cmd = app.add_subcommand("gaps", "evidence / ELBO / BIC gap grids");
    FamilyOptions gaps_f;
    add_family_flags(gaps_cmd, gaps_f);
    std::vector<long> gaps_n_grid;
    std::vector<double> gaps_prior_grid, gaps_deltas;
    std::vector<int> gaps_sizes;
    long gaps_evidence_samples = 100000, gaps_fisher_samples = 200000,
         gaps_projection_samples = 1000000;
    gaps_cmd->add_option("--n-grid", gaps_n_grid, "sample sizes");
    gaps_cmd->add_option("--prior-grid", gaps_prior_grid, "prior scales (normal family)");
    gaps_cmd->add_option("--deltas", gaps_deltas, "gmm separations");
    gaps_cmd->add_option("--sizes", gaps_sizes, "probit candidate sizes");
    gaps_cmd->add_option("--evidence-samples", gaps_evidence_samples, "evidence samples (0: skip)");
    gaps_cmd->add_option("--fisher-samples", gaps_fisher_samples, "Fisher Monte Carlo samples");
    gaps_cmd->add_option("--projection-samples", gaps_projection_samples,
                         "KL projection Monte Carlo samples");

    // convergence
    auto* conv_cmd = app.add_subcommand("convergence", "regret / KL traces over a schedule grid");
    FamilyOptions conv_f;
    add_family_flags(conv_cmd, conv_f);
    std::string conv_data;
    std::vector<std::string> conv_schedules{"sequential_systematic"};
    std::vector<double> conv_gammas{1.0};
    int conv_sweeps = 0;
    conv_cmd->add_option("--data", conv_data, "dataset path (default: generate from the design)");
    conv_cmd->add_option("--schedules", conv_schedules, "schedules to trace");
    conv_cmd->add_option("--gammas", conv_gammas, "step sizes to trace");
    conv_cmd->add_option("--max-sweeps", conv_sweeps, "sweep budget (0: default)");

    // predict
    auto* pred_cmd = app.add_subcommand("predict", "held-out prediction study");
    FamilyOptions pred_f;
    add_family_flags(pred_cmd, pred_f);
    std::string pred_data;
    int pred_train = 500, pred_replicates = 20, pred_max_size = 25;
    pred_cmd->add_option("--data", pred_data, "LibSVM dataset (default: synthetic design)");
    pred_cmd->add_option("--train-size", pred_train, "training rows per replicate");
    pred_cmd->add_option("--replicates", pred_replicates, "Monte Carlo replicates");
    pred_cmd->add_option("--max-size", pred_max_size, "largest candidate size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
    }

    if (gen->parsed()) {
        if (global.out.empty()) {
            throw std::invalid_argument("--out: gen requires an output path");
        }
        if (gen_f.family == "normal") {
            write_value_column(global.out, generate_normal_data(
                                               NormalDesign{gen_f.mu, gen_f.sigma, gen_f.n},
                                               global.seed));
        } else if (gen_f.family == "gmm") {
            write_value_column(global.out, generate_gmm_data(
                                               GmmDesign{gen_f.delta, gen_f.k, gen_f.n},
                                               global.seed));
        } else if (gen_f.family == "probit") {
            write_libsvm(global.out, generate_probit_data(
                                         ProbitDesign{gen_f.n, gen_f.p, gen_f.r, gen_f.q,
                                                      gen_f.nonzero},
                                         global.seed));
        } else if (gen_f.family == "sbm") {
            write_adjacency(global.out,
                            generate_sbm_data(SbmDesign{gen_f.n, gen_f.k, gen_f.within,
                                                        gen_f.between_max},
                                              global.seed)
                                .adjacency);
        } else {
            throw std::invalid_argument("--family: unknown family: " + gen_f.family);
        }
        return 0;
    }

    if (fit_cmd->parsed()) {
        const auto model = load_model(fit_f, fit_data);
        const Schedule schedule{schedule_from_name(fit_schedule), fit_gamma};
        StoppingRule stop = default_stopping_rule(*model, schedule);
        if (fit_sweeps > 0) {
            stop.max_iterations = fit_sweeps;
        }
        const CaviResult result =
            run_cavi(*model, model->make_init_state(global.seed), schedule, stop, global.seed);
        Table table;
        table.columns = {"family", "n",         "schedule", "gamma",    "sweeps",
                         "elbo",   "converged", "diverged", "parameters"};
        table.add_row({model->name(), std::to_string(model->sample_count()), fit_schedule,
                       format_double(fit_gamma), std::to_string(result.trace.iterations_run),
                       format_double(result.trace.elbo_per_iteration.back()),
                       result.trace.converged ? "1" : "0", result.trace.diverged ? "1" : "0",
                       fitted_parameters(*model, result.state)});
        emit(table, global);
        if (result.trace.diverged) {
            std::cerr << "fit: ELBO diverged under " << fit_schedule << " gamma=" << fit_gamma
                      << "\n";
            return 2;
        }
        return 0;
    }

    if (ev_cmd->parsed()) {
        const auto model = load_model(ev_f, ev_data);
        EvidenceEstimate estimate;
        if (const auto* normal = dynamic_cast<const NormalModel*>(model.get())) {
            estimate = mc_evidence(*normal, ev_samples, global.seed, global.threads);
        } else if (const auto* gmm = dynamic_cast<const GmmModel*>(model.get())) {
            estimate = mc_evidence(*gmm, ev_samples, global.seed, global.threads);
        } else if (const auto* probit = dynamic_cast<const ProbitModel*>(model.get())) {
            estimate = mc_evidence(*probit, ev_samples, global.seed, global.threads);
        } else {
            estimate = mc_evidence(dynamic_cast<const SbmModel&>(*model), ev_samples, global.seed,
                                   global.threads);
        }
        Table table;
        table.columns = {"family", "n", "samples", "log_evidence", "stderr_log", "ess",
                         "low_ess_warning"};
        table.add_row({model->name(), std::to_string(model->sample_count()),
                       std::to_string(estimate.samples), format_double(estimate.log_evidence),
                       format_double(estimate.stderr_log),
                       format_double(estimate.effective_sample_size),
                       estimate.low_ess_warning ? "1" : "0"});
        emit(table, global);
        return 0;
    }

    if (sel_cmd->parsed()) {
        Table table;
        if (sel_f.family == "gmm") {
            GmmSelectionConfig config;
            config.design = GmmDesign{sel_f.delta, sel_f.k, sel_f.n};
            config.prior_sd = sel_f.gmm_prior_sd;
            config.k_min = sel_kmin;
            config.k_max = sel_kmax;
            config.evidence_samples = sel_evidence_samples;
            config.seed = global.seed;
            config.threads = global.threads;
            table = run_selection_gmm(config);
        } else if (sel_f.family == "probit") {
            ProbitSelectionConfig config;
            config.design = ProbitDesign{sel_f.n, sel_f.p, sel_f.r, sel_f.q, sel_f.nonzero};
            config.prior_sd = sel_f.beta_prior_sd;
            config.max_size = sel_max_size;
            config.evidence_samples = sel_evidence_samples;
            config.seed = global.seed;
            config.threads = global.threads;
            table = run_selection_probit(config);
        } else if (sel_f.family == "sbm") {
            SbmSelectionConfig config;
            config.design = SbmDesign{sel_f.n, sel_f.k, sel_f.within, sel_f.between_max};
            config.k_min = sel_kmin;
            config.k_max = sel_kmax;
            config.seed = global.seed;
            table = run_selection_sbm(config);
        } else {
            throw std::invalid_argument("--family: select supports gmm, probit, sbm");
        }
        emit(table, global);
        return 0;
    }

    if (gaps_cmd->parsed()) {
        Table table;
        if (gaps_f.family == "normal") {
            NormalGapsConfig config;
            config.design = NormalDesign{gaps_f.mu, gaps_f.sigma, gaps_f.n};
            config.n_grid = gaps_n_grid;
            config.prior_scale_grid = gaps_prior_grid;
            config.prior_sd = gaps_f.prior_sd;
            config.evidence_samples = gaps_evidence_samples;
            config.seed = global.seed;
            config.threads = global.threads;
            table = run_gaps_normal(config);
        } else if (gaps_f.family == "gmm") {
            GmmGapsConfig config;
            if (!gaps_deltas.empty()) {
                config.deltas = gaps_deltas;
            }
            config.prior_sd = gaps_f.gmm_prior_sd;
            config.components = gaps_f.k;
            if (!gaps_n_grid.empty()) {
                config.n_grid = gaps_n_grid;
            }
            config.fisher_samples = gaps_fisher_samples;
            config.evidence_samples = gaps_evidence_samples;
            config.seed = global.seed;
            config.threads = global.threads;
            table = run_gaps_gmm(config);
        } else if (gaps_f.family == "probit") {
            ProbitGapsConfig config;
            config.design = ProbitDesign{gaps_f.n, gaps_f.p, gaps_f.r, gaps_f.q, gaps_f.nonzero};
            if (!gaps_sizes.empty()) {
                config.sizes = gaps_sizes;
            }
            if (!gaps_n_grid.empty()) {
                config.n_grid = gaps_n_grid;
            }
            config.prior_sd = gaps_f.beta_prior_sd;
            config.fisher_samples = gaps_fisher_samples;
            config.projection_samples = gaps_projection_samples;
            config.evidence_samples = gaps_evidence_samples;
            config.seed = global.seed;
            config.threads = global.threads;
            table = run_gaps_probit(config);
        } else {
            throw std::invalid_argument("--family: gaps supports normal, gmm, probit");
        }
        emit(table, global);
        return 0;
    }

    if (conv_cmd->parsed()) {
        std::unique_ptr<ModelSpec> model;
        if (!conv_data.empty()) {
            model = load_model(conv_f, conv_data);
        } else if (conv_f.family == "normal") {
            model = std::make_unique<NormalModel>(
                generate_normal_data(NormalDesign{conv_f.mu, conv_f.sigma, conv_f.n}, global.seed),
                NormalPrior{conv_f.prior_mu0, conv_f.prior_sd * conv_f.prior_sd, conv_f.prior_a,
                            conv_f.prior_b});
        } else if (conv_f.family == "gmm") {
            model = std::make_unique<GmmModel>(
                generate_gmm_data(GmmDesign{conv_f.delta, conv_f.k, conv_f.n}, global.seed),
                conv_f.k, conv_f.gmm_prior_sd);
        } else if (conv_f.family == "probit") {
            ProbitData data = generate_probit_data(
                ProbitDesign{conv_f.n, conv_f.p, conv_f.r, conv_f.q, conv_f.nonzero}, global.seed);
            const int d = static_cast<int>(data.design.cols());
            model = std::make_unique<ProbitModel>(
                std::move(data.design), std::move(data.responses),
                conv_f.beta_prior_sd * conv_f.beta_prior_sd * Eigen::MatrixXd::Identity(d, d),
                mode_from_name(conv_f.mode));
        } else if (conv_f.family == "sbm") {
            SbmSample sample = generate_sbm_data(
                SbmDesign{conv_f.n, conv_f.k, conv_f.within, conv_f.between_max}, global.seed);
            model = std::make_unique<SbmModel>(std::move(sample.adjacency), conv_f.k,
                                               uniform_sbm_prior(conv_f.n, conv_f.k));
        } else {
            throw std::invalid_argument("--family: unknown family: " + conv_f.family);
        }
        ConvergenceConfig config;
        config.schedules.clear();
        for (const auto& name : conv_schedules) {
            config.schedules.push_back(schedule_from_name(name));
        }
        config.gammas = conv_gammas;
        config.max_sweeps = conv_sweeps;
        config.seed = global.seed;
        emit(run_convergence(*model, config), global);
        return 0;
    }

    if (pred_cmd->parsed()) {
        PredictionConfig config;
        config.design = ProbitDesign{pred_f.n, pred_f.p, pred_f.r, pred_f.q, pred_f.nonzero};
        config.train_size = pred_train;
        config.replicates = pred_replicates;
        config.max_size = pred_max_size;
        config.prior_sd = pred_f.beta_prior_sd;
        config.seed = global.seed;
        config.threads = global.threads;
        if (!pred_data.empty()) {
            config.dataset = read_libsvm(pred_data);
        }
        emit(run_prediction(config), global);
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mfvi::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
