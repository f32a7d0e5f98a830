#include "mfvi/fisher.hpp"

#include <cmath>
#include <random>

#include "mfvi/errors.hpp"
#include "mfvi/parallel.hpp"
#include "mfvi/rng.hpp"
#include "mfvi/special.hpp"

namespace mfvi {

namespace {

constexpr int kBatches = 64;

void require_pd(const Eigen::MatrixXd& m, const char* label) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericError(std::string(label) +
                           ": Monte Carlo estimate is not positive definite; increase samples");
    }
}

}  // namespace

FisherBundle fisher_bundle(const NormalModel& model, const Eigen::VectorXd& theta_star) {
    if (theta_star.size() != 2 || !(theta_star[1] > 0.0)) {
        throw std::invalid_argument("fisher_bundle(normal): theta_star must be (mu, sigma^2 > 0)");
    }
    const double sigma_sq = theta_star[1];
    FisherBundle bundle;
    bundle.V = Eigen::Vector2d(1.0 / sigma_sq, 1.0 / (2.0 * sigma_sq * sigma_sq)).asDiagonal();
    bundle.V_s = Eigen::MatrixXd::Zero(2, 2);
    bundle.V_c = bundle.V;
    bundle.theta_star = theta_star;

    const NormalPrior& prior = model.prior();
    const double mu = theta_star[0];
    bundle.prior_log_density_at_theta_star =
        -0.5 * std::log(2.0 * M_PI * prior.sigma0_sq) -
        (mu - prior.mu0) * (mu - prior.mu0) / (2.0 * prior.sigma0_sq) +
        prior.a * std::log(prior.b) - std::lgamma(prior.a) - (prior.a + 1.0) * std::log(sigma_sq) -
        prior.b / sigma_sq;
    return bundle;
}

FisherBundle fisher_bundle(const GmmModel& model, const Eigen::VectorXd& centers_star, long samples,
                           std::uint64_t seed) {
    const int k_count = model.components();
    if (centers_star.size() != k_count) {
        throw std::invalid_argument("fisher_bundle(gmm): centers size mismatch");
    }
    FisherBundle bundle;
    bundle.theta_star = centers_star;
    bundle.monte_carlo = true;
    bundle.samples = samples;
    bundle.seed = seed;
    bundle.V_c = Eigen::MatrixXd::Identity(k_count, k_count) / static_cast<double>(k_count);

    // V = E[-Hessian of the mixture log density] over X ~ the mixture at
    // theta*. With responsibilities r_k(x),
    //   -d^2 log p / d mu_k d mu_l =
    //     delta_kl [r_k - r_k (x-mu_k)^2] + r_k r_l (x-mu_k)(x-mu_l).
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k_count, k_count);
    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, k_count - 1);
    Eigen::VectorXd r(k_count), centered(k_count), lw(k_count);
    for (long s = 0; s < samples; ++s) {
        const double x = centers_star[pick(engine)] + gauss(engine);
        for (int k = 0; k < k_count; ++k) {
            centered[k] = x - centers_star[k];
            lw[k] = -0.5 * centered[k] * centered[k];
        }
        const double lse =
            log_sum_exp(std::span<const double>(lw.data(), static_cast<std::size_t>(k_count)));
        for (int k = 0; k < k_count; ++k) {
            r[k] = std::exp(lw[k] - lse);
        }
        acc.noalias() += (r.cwiseProduct(centered)) * (r.cwiseProduct(centered)).transpose();
        for (int k = 0; k < k_count; ++k) {
            acc(k, k) += r[k] - r[k] * centered[k] * centered[k];
        }
    }
    bundle.V = acc / static_cast<double>(samples);
    bundle.V = 0.5 * (bundle.V + bundle.V.transpose().eval());
    require_pd(bundle.V, "fisher_bundle(gmm)");
    bundle.V_s = bundle.V_c - bundle.V;

    const double sigma_sq = model.prior_sd() * model.prior_sd();
    bundle.prior_log_density_at_theta_star =
        -0.5 * k_count * std::log(2.0 * M_PI * sigma_sq) -
        centers_star.squaredNorm() / (2.0 * sigma_sq);
    return bundle;
}

FisherBundle fisher_bundle_probit(const ProbitPopulation& population, int candidate_size,
                                  const Eigen::VectorXd& beta_star,
                                  const Eigen::MatrixXd& prior_covariance, long samples,
                                  std::uint64_t seed, int threads) {
    const int p = static_cast<int>(population.sigma.rows());
    const int k = candidate_size;
    if (k < 1 || k > p || beta_star.size() != k) {
        throw std::invalid_argument("fisher_bundle_probit: bad candidate size");
    }
    const Eigen::MatrixXd chol_full = population.sigma.llt().matrixL();

    std::vector<Eigen::MatrixXd> partial(kBatches, Eigen::MatrixXd::Zero(k, k));
    const long per_batch = (samples + kBatches - 1) / kBatches;
    parallel_tasks(kBatches, threads, [&](int batch) {
        auto engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(batch)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd z(p);
        const long lo = batch * per_batch;
        const long hi = std::min<long>(samples, lo + per_batch);
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
        for (long s = lo; s < hi; ++s) {
            for (int j = 0; j < p; ++j) {
                z[j] = gauss(engine);
            }
            const Eigen::VectorXd x = chol_full * z;
            const double eta_true = x.dot(population.beta);
            const double p1 = normal_cdf(eta_true);
            const double eta = x.head(k).dot(beta_star);
            const double h1 = normal_hazard(eta);    // phi/Phi at eta
            const double h0 = normal_hazard(-eta);   // phi/(1-Phi) at eta
            const double w = p1 * h1 * (h1 + eta) + (1.0 - p1) * h0 * (h0 - eta);
            acc.noalias() += w * x.head(k) * x.head(k).transpose();
        }
        partial[static_cast<std::size_t>(batch)] = acc;
    });

    FisherBundle bundle;
    bundle.theta_star = beta_star;
    bundle.monte_carlo = true;
    bundle.samples = samples;
    bundle.seed = seed;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
    for (const auto& m : partial) {
        acc += m;
    }
    bundle.V = acc / static_cast<double>(samples);
    bundle.V = 0.5 * (bundle.V + bundle.V.transpose().eval());
    require_pd(bundle.V, "fisher_bundle_probit");
    bundle.V_c = population.sigma.topLeftCorner(k, k);
    bundle.V_s = bundle.V_c - bundle.V;

    Eigen::LLT<Eigen::MatrixXd> llt0(prior_covariance);
    const double log_det0 = 2.0 * llt0.matrixL().toDenseMatrix().diagonal().array().log().sum();
    bundle.prior_log_density_at_theta_star =
        -0.5 * k * std::log(2.0 * M_PI) - 0.5 * log_det0 -
        0.5 * beta_star.dot(llt0.solve(beta_star));
    return bundle;
}

}  // namespace mfvi
