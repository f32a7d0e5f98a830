#include "mfvi/evidence.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <unordered_map>

#include "mfvi/errors.hpp"
#include "mfvi/parallel.hpp"
#include "mfvi/rng.hpp"
#include "mfvi/special.hpp"

namespace mfvi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
constexpr int kBatches = 64;

// Draws log-likelihood weights in fixed batches (so results do not depend on
// the worker count) and reduces them into the log-mean plus delta-method
// standard error.
EvidenceEstimate reduce_weights(
    long samples, std::uint64_t seed, int threads,
    const std::function<void(std::uint64_t batch_seed, long count, double* out)>& fill) {
    std::vector<double> weights(static_cast<std::size_t>(samples));
    const long per_batch = (samples + kBatches - 1) / kBatches;
    parallel_tasks(kBatches, threads, [&](int batch) {
        const long lo = batch * per_batch;
        const long hi = std::min<long>(samples, lo + per_batch);
        if (lo < hi) {
            fill(derive_seed(seed, static_cast<std::uint64_t>(batch)), hi - lo, weights.data() + lo);
        }
    });

    const double lse = log_sum_exp(weights);
    if (!std::isfinite(lse)) {
        throw NumericError("mc_evidence: all weights are -inf (data impossible under the model)");
    }
    const double shift = *std::max_element(weights.begin(), weights.end());
    double sum = 0.0, sum_sq = 0.0;
    for (double w : weights) {
        const double e = std::exp(w - shift);
        sum += e;
        sum_sq += e * e;
    }
    const double m = static_cast<double>(samples);
    const double mean = sum / m;
    const double var = std::max(0.0, sum_sq / m - mean * mean);

    EvidenceEstimate est;
    est.log_evidence = lse - std::log(m);
    est.stderr_log = std::sqrt(var / m) / mean;
    est.samples = samples;
    est.seed = seed;
    est.effective_sample_size = sum * sum / std::max(sum_sq, 1e-300);
    est.low_ess_warning = est.effective_sample_size < 100.0;
    return est;
}

}  // namespace

EvidenceEstimate mc_evidence(const NormalModel& model, long samples, std::uint64_t seed,
                             int threads) {
    const auto n = static_cast<double>(model.sample_count());
    const double sum_x = model.data().sum();
    const double sum_xx = model.data().squaredNorm();
    const NormalPrior prior = model.prior();
    return reduce_weights(samples, seed, threads,
                          [&, n, sum_x, sum_xx](std::uint64_t batch_seed, long count, double* out) {
        auto engine = make_engine(batch_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::gamma_distribution<double> gamma(prior.a, 1.0 / prior.b);
        for (long s = 0; s < count; ++s) {
            const double mu = prior.mu0 + std::sqrt(prior.sigma0_sq) * gauss(engine);
            const double sigma_sq = 1.0 / gamma(engine);
            const double ss = sum_xx - 2.0 * mu * sum_x + n * mu * mu;
            out[s] = -0.5 * n * (kLog2Pi + std::log(sigma_sq)) - 0.5 * ss / sigma_sq;
        }
    });
}

EvidenceEstimate mc_evidence(const ProbitModel& model, long samples, std::uint64_t seed,
                             int threads) {
    const int n = model.sample_count();
    const int d = model.dim();
    const Eigen::MatrixXd chol = model.prior_covariance().llt().matrixL();
    return reduce_weights(samples, seed, threads,
                          [&, n, d](std::uint64_t batch_seed, long count, double* out) {
        auto engine = make_engine(batch_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd z(d);
        for (long s = 0; s < count; ++s) {
            for (int j = 0; j < d; ++j) {
                z[j] = gauss(engine);
            }
            const Eigen::VectorXd eta = model.design() * (chol * z);
            double ll = 0.0;
            for (int i = 0; i < n; ++i) {
                ll += (model.responses()[i] == 1) ? log_normal_cdf(eta[i])
                                                  : log_normal_cdf(-eta[i]);
            }
            out[s] = ll;
        }
    });
}

EvidenceEstimate mc_evidence(const GmmModel& model, long samples, std::uint64_t seed, int threads) {
    const int n = model.sample_count();
    const int k_count = model.components();
    const double log_k = std::log(static_cast<double>(k_count));
    const double base = -0.5 * n * kLog2Pi - n * log_k;
    return reduce_weights(samples, seed, threads,
                          [&, n, k_count](std::uint64_t batch_seed, long count, double* out) {
        auto engine = make_engine(batch_seed);
        std::normal_distribution<double> gauss(0.0, model.prior_sd());
        Eigen::VectorXd mu(k_count), lw(k_count);
        for (long s = 0; s < count; ++s) {
            for (int k = 0; k < k_count; ++k) {
                mu[k] = gauss(engine);
            }
            double ll = base;
            for (int i = 0; i < n; ++i) {
                for (int k = 0; k < k_count; ++k) {
                    const double c = model.data()[i] - mu[k];
                    lw[k] = -0.5 * c * c;
                }
                ll += log_sum_exp(
                    std::span<const double>(lw.data(), static_cast<std::size_t>(k_count)));
            }
            out[s] = ll;
        }
    });
}

namespace {

// Exact assignment sum for a small SBM: group the K^n assignments by their
// per-pair edge/non-edge count signature; each sampled connectivity then only
// pays one term per distinct signature.
struct SbmSignatures {
    std::vector<std::vector<int>> edge_counts;  // per signature, per pair a<=b
    std::vector<std::vector<int>> pair_counts;
    std::vector<double> log_weight;             // log sum of prior assignment mass
    int pairs = 0;
};

SbmSignatures enumerate_signatures(const SbmModel& model) {
    const int n = model.sample_count();
    const int k_count = model.communities();
    if (n > 12 || k_count > 3) {
        throw std::invalid_argument(
            "mc_evidence(sbm): exact assignment sum restricted to n <= 12, K <= 3");
    }
    const int pairs = k_count * (k_count + 1) / 2;
    const Eigen::MatrixXi& adj = model.adjacency();
    const Eigen::MatrixXd& pi_prior = model.prior().pi;

    std::unordered_map<std::string, std::pair<std::size_t, double>> table;
    SbmSignatures sig;
    sig.pairs = pairs;

    std::vector<int> z(static_cast<std::size_t>(n), 0);
    std::vector<int> e_cnt(static_cast<std::size_t>(pairs));
    std::vector<int> p_cnt(static_cast<std::size_t>(pairs));
    for (;;) {
        std::fill(e_cnt.begin(), e_cnt.end(), 0);
        std::fill(p_cnt.begin(), p_cnt.end(), 0);
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            w *= pi_prior(i, z[static_cast<std::size_t>(i)]);
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const int idx = model.pair_index(z[static_cast<std::size_t>(i)],
                                                 z[static_cast<std::size_t>(j)]);
                ++p_cnt[static_cast<std::size_t>(idx)];
                e_cnt[static_cast<std::size_t>(idx)] += adj(i, j);
            }
        }
        std::string key(reinterpret_cast<const char*>(e_cnt.data()), e_cnt.size() * sizeof(int));
        key.append(reinterpret_cast<const char*>(p_cnt.data()), p_cnt.size() * sizeof(int));
        auto it = table.find(key);
        if (it == table.end()) {
            table.emplace(key, std::make_pair(sig.edge_counts.size(), w));
            sig.edge_counts.push_back(e_cnt);
            sig.pair_counts.push_back(p_cnt);
        } else {
            it->second.second += w;
        }
        // odometer over assignments
        int pos = 0;
        while (pos < n) {
            if (++z[static_cast<std::size_t>(pos)] < k_count) {
                break;
            }
            z[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == n) {
            break;
        }
    }
    sig.log_weight.resize(sig.edge_counts.size());
    for (const auto& [key, entry] : table) {
        sig.log_weight[entry.first] = std::log(std::max(entry.second, 1e-300));
    }
    return sig;
}

}  // namespace

EvidenceEstimate mc_evidence(const SbmModel& model, long samples, std::uint64_t seed, int threads) {
    const SbmSignatures sig = enumerate_signatures(model);
    const int k_count = model.communities();
    const int pairs = sig.pairs;
    const SbmPrior& prior = model.prior();

    std::vector<std::pair<double, double>> hyper(static_cast<std::size_t>(pairs));
    for (int a = 0; a < k_count; ++a) {
        for (int b = a; b < k_count; ++b) {
            hyper[static_cast<std::size_t>(model.pair_index(a, b))] = {prior.alpha(a, b),
                                                                       prior.beta(a, b)};
        }
    }
    return reduce_weights(samples, seed, threads,
                          [&, pairs](std::uint64_t batch_seed, long count, double* out) {
        auto engine = make_engine(batch_seed);
        std::vector<double> log_b(static_cast<std::size_t>(pairs));
        std::vector<double> log_1mb(static_cast<std::size_t>(pairs));
        std::vector<double> terms(sig.log_weight.size());
        for (long s = 0; s < count; ++s) {
            for (int p = 0; p < pairs; ++p) {
                std::gamma_distribution<double> ga(hyper[static_cast<std::size_t>(p)].first, 1.0);
                std::gamma_distribution<double> gb(hyper[static_cast<std::size_t>(p)].second, 1.0);
                const double u = ga(engine);
                const double v = gb(engine);
                const double b = u / (u + v);
                log_b[static_cast<std::size_t>(p)] = std::log(std::max(b, 1e-300));
                log_1mb[static_cast<std::size_t>(p)] = std::log(std::max(1.0 - b, 1e-300));
            }
            for (std::size_t t = 0; t < terms.size(); ++t) {
                double acc = sig.log_weight[t];
                for (int p = 0; p < pairs; ++p) {
                    const int e = sig.edge_counts[t][static_cast<std::size_t>(p)];
                    const int tot = sig.pair_counts[t][static_cast<std::size_t>(p)];
                    acc += e * log_b[static_cast<std::size_t>(p)] +
                           (tot - e) * log_1mb[static_cast<std::size_t>(p)];
                }
                terms[t] = acc;
            }
            out[s] = log_sum_exp(terms);
        }
    });
}

double closed_form_evidence_normal_known_variance(const Eigen::VectorXd& data, double mu0,
                                                  double sigma0_sq, double sigma_sq) {
    if (!(sigma_sq > 0.0) || !(sigma0_sq > 0.0)) {
        throw std::invalid_argument(
            "closed_form_evidence_normal_known_variance: variances must be positive");
    }
    const auto n = static_cast<double>(data.size());
    const Eigen::ArrayXd centered = data.array() - mu0;
    const double log_det = (n - 1.0) * std::log(sigma_sq) + std::log(sigma_sq + n * sigma0_sq);
    const double quad = (centered.square().sum() -
                         sigma0_sq / (sigma_sq + n * sigma0_sq) * centered.sum() * centered.sum()) /
                        sigma_sq;
    return -0.5 * n * kLog2Pi - 0.5 * log_det - 0.5 * quad;
}

}  // namespace mfvi
