#include "mfvi/mle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mfvi/errors.hpp"
#include "mfvi/rng.hpp"
#include "mfvi/special.hpp"

namespace mfvi {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

MleResult normal_mle(const Eigen::VectorXd& data) {
    const auto n = static_cast<double>(data.size());
    if (n < 1) {
        throw std::invalid_argument("normal_mle: needs at least one observation");
    }
    const double mean = data.mean();
    const double var = (data.array() - mean).square().sum() / n;
    MleResult result;
    result.theta = Eigen::Vector2d(mean, var);
    result.loglik = -0.5 * n * (kLog2Pi + std::log(var) + 1.0);
    return result;
}

namespace {

double probit_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = x * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        ll += (y[i] == 1) ? log_normal_cdf(eta[i]) : log_normal_cdf(-eta[i]);
    }
    return ll;
}

}  // namespace

MleResult probit_mle(const Eigen::MatrixXd& design, const Eigen::VectorXi& responses,
                     int max_iterations, double grad_tolerance) {
    const int n = static_cast<int>(design.rows());
    const int d = static_cast<int>(design.cols());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    double ll = probit_loglik(design, responses, beta);

    for (int iter = 1; iter <= max_iterations; ++iter) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);
        const Eigen::VectorXd eta = design * beta;
        for (int i = 0; i < n; ++i) {
            const double e = eta[i];
            double score, weight;
            if (responses[i] == 1) {
                const double h = normal_hazard(e);
                score = h;
                weight = h * (h + e);
            } else {
                const double h = normal_hazard(-e);
                score = -h;
                weight = h * (h - e);
            }
            grad.noalias() += score * design.row(i).transpose();
            hess.noalias() += weight * design.row(i).transpose() * design.row(i);
        }
        MleResult result;
        result.theta = beta;
        result.loglik = ll;
        result.iterations = iter - 1;
        if (grad.norm() < grad_tolerance * std::max(1.0, std::sqrt(static_cast<double>(n)))) {
            return result;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(hess);
        if (llt.info() != Eigen::Success) {
            throw NumericError("probit_mle: singular Hessian");
        }
        const Eigen::VectorXd direction = llt.solve(grad);
        // Newton decrement: remaining improvement is about half this value.
        if (grad.dot(direction) < 1e-12 * (1.0 + std::abs(ll))) {
            return result;
        }
        double step = 1.0;
        Eigen::VectorXd candidate;
        double candidate_ll;
        for (;;) {
            candidate = beta + step * direction;
            candidate_ll = probit_loglik(design, responses, candidate);
            if (candidate_ll >= ll || step < 1e-12) {
                break;
            }
            step *= 0.5;
        }
        beta = candidate;
        ll = candidate_ll;
        if (beta.norm() > 1e6) {
            std::ostringstream msg;
            msg << "probit_mle: diverging iterate, |beta| = " << beta.norm()
                << " after " << iter << " iterations (separated data?)";
            throw NumericError(msg.str());
        }
    }
    std::ostringstream msg;
    msg << "probit_mle: no convergence in " << max_iterations
        << " iterations; last loglik = " << ll;
    throw NumericError(msg.str());
}

double gmm_loglik(const Eigen::VectorXd& data, const Eigen::VectorXd& centers) {
    const int k_count = static_cast<int>(centers.size());
    const double log_k = std::log(static_cast<double>(k_count));
    double ll = 0.0;
    Eigen::VectorXd lw(k_count);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (int k = 0; k < k_count; ++k) {
            const double c = data[i] - centers[k];
            lw[k] = -0.5 * c * c;
        }
        ll += log_sum_exp(std::span<const double>(lw.data(), static_cast<std::size_t>(k_count))) -
              log_k - 0.5 * kLog2Pi;
    }
    return ll;
}

MleResult gmm_mle(const Eigen::VectorXd& data, int components, const GmmEmOptions& options,
                  std::uint64_t seed) {
    const int n = static_cast<int>(data.size());
    const int k_count = components;
    if (n < 1 || k_count < 1) {
        throw std::invalid_argument("gmm_mle: needs data and K >= 1");
    }
    Eigen::VectorXd sorted = data;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    const double spread = std::max(1e-3, sorted[n - 1] - sorted[0]);

    MleResult best;
    best.loglik = -std::numeric_limits<double>::infinity();
    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::MatrixXd resp(n, k_count);
    Eigen::VectorXd lw(k_count);
    for (int restart = 0; restart < options.restarts; ++restart) {
        Eigen::VectorXd centers(k_count);
        for (int k = 0; k < k_count; ++k) {
            const double q = (k + 0.5) / k_count;
            const auto idx = static_cast<Eigen::Index>(std::min<double>(n - 1.0, q * n));
            centers[k] = sorted[idx];
            if (restart > 0) {
                centers[k] += 0.1 * spread * gauss(engine);
            }
        }
        double ll = gmm_loglik(data, centers);
        int iter = 0;
        for (; iter < options.max_iterations; ++iter) {
            for (int i = 0; i < n; ++i) {
                for (int k = 0; k < k_count; ++k) {
                    const double c = data[i] - centers[k];
                    lw[k] = -0.5 * c * c;
                }
                const double lse = log_sum_exp(
                    std::span<const double>(lw.data(), static_cast<std::size_t>(k_count)));
                for (int k = 0; k < k_count; ++k) {
                    resp(i, k) = std::exp(lw[k] - lse);
                }
            }
            for (int k = 0; k < k_count; ++k) {
                const double mass = resp.col(k).sum();
                if (mass > 1e-12) {
                    centers[k] = resp.col(k).dot(data) / mass;
                }
            }
            const double next_ll = gmm_loglik(data, centers);
            const bool done = std::abs(next_ll - ll) < options.tolerance;
            ll = next_ll;
            if (done) {
                break;
            }
        }
        if (ll > best.loglik) {
            best.loglik = ll;
            best.theta = centers;
            best.iterations = iter;
        }
    }
    std::sort(best.theta.data(), best.theta.data() + best.theta.size());
    return best;
}

MleResult sbm_variational_mean_mle(const SbmModel& model, const MeanFieldState& fit) {
    const int n = model.sample_count();
    const int k_count = model.communities();
    const Eigen::MatrixXd b_hat = model.connectivity_mean(fit);
    const Eigen::MatrixXd pi = model.assignment_probabilities(fit);
    const Eigen::MatrixXi& adj = model.adjacency();

    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double mass = 0.0;
            for (int a = 0; a < k_count; ++a) {
                for (int b = 0; b < k_count; ++b) {
                    const double edge_p = adj(i, j) == 1 ? b_hat(a, b) : 1.0 - b_hat(a, b);
                    mass += pi(i, a) * pi(j, b) * edge_p;
                }
            }
            ll += std::log(std::max(mass, 1e-300));
        }
    }
    MleResult result;
    result.loglik = ll;
    result.theta.resize(k_count * (k_count + 1) / 2);
    int idx = 0;
    for (int a = 0; a < k_count; ++a) {
        for (int b = a; b < k_count; ++b) {
            result.theta[idx++] = b_hat(a, b);
        }
    }
    return result;
}

}  // namespace mfvi
