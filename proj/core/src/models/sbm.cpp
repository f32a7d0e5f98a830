#include "mfvi/models/sbm.hpp"

#include <cmath>
#include <stdexcept>

#include "mfvi/rng.hpp"
#include "mfvi/special.hpp"

namespace mfvi {

namespace {
constexpr double kProbFloor = 1e-300;
}

SbmPrior uniform_sbm_prior(int nodes, int communities) {
    SbmPrior prior;
    prior.alpha = Eigen::MatrixXd::Ones(communities, communities);
    prior.beta = Eigen::MatrixXd::Ones(communities, communities);
    prior.pi = Eigen::MatrixXd::Constant(nodes, communities, 1.0 / communities);
    return prior;
}

SbmModel::SbmModel(Eigen::MatrixXi adjacency, int communities, SbmPrior prior)
    : adjacency_(std::move(adjacency)),
      nodes_(static_cast<int>(adjacency_.rows())),
      communities_(communities),
      prior_(std::move(prior)) {
    if (adjacency_.rows() != adjacency_.cols()) {
        throw std::invalid_argument("SbmModel: adjacency must be square");
    }
    if (communities_ < 1) {
        throw std::invalid_argument("SbmModel: requires K >= 1");
    }
    neighbors_.resize(static_cast<std::size_t>(nodes_));
    for (int i = 0; i < nodes_; ++i) {
        if (adjacency_(i, i) != 0) {
            throw std::invalid_argument("SbmModel: adjacency must have zero diagonal");
        }
        for (int j = 0; j < nodes_; ++j) {
            const int v = adjacency_(i, j);
            if (v != 0 && v != 1) {
                throw std::invalid_argument("SbmModel: adjacency must be 0/1");
            }
            if (v != adjacency_(j, i)) {
                throw std::invalid_argument("SbmModel: adjacency must be symmetric");
            }
            if (v == 1) {
                neighbors_[static_cast<std::size_t>(i)].push_back(j);
            }
        }
    }
    if (prior_.alpha.rows() != communities_ || prior_.beta.rows() != communities_ ||
        prior_.pi.rows() != nodes_ || prior_.pi.cols() != communities_) {
        throw std::invalid_argument("SbmModel: prior shape mismatch");
    }
}

int SbmModel::pair_index(int a, int b) const {
    if (a > b) {
        std::swap(a, b);
    }
    // Row-major upper triangle: (a, b) with a <= b.
    return a * communities_ - a * (a - 1) / 2 + (b - a);
}

MeanFieldState SbmModel::make_init_state(std::uint64_t seed) const {
    MeanFieldState state;
    for (int a = 0; a < communities_; ++a) {
        for (int b = a; b < communities_; ++b) {
            state.parameter_factors.emplace_back(BetaFactor{prior_.alpha(a, b), prior_.beta(a, b)});
        }
    }
    auto engine = make_engine(seed);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    state.latent_factors.reserve(static_cast<std::size_t>(nodes_));
    for (int i = 0; i < nodes_; ++i) {
        Eigen::VectorXd lw(communities_);
        for (int a = 0; a < communities_; ++a) {
            lw[a] = std::log(std::max(prior_.pi(i, a), kProbFloor)) + unif(engine);
        }
        state.latent_factors.emplace_back(categorical_from_log_weights(lw));
    }
    return state;
}

Eigen::MatrixXd SbmModel::assignment_probabilities(const MeanFieldState& state) const {
    Eigen::MatrixXd pi(nodes_, communities_);
    for (int i = 0; i < nodes_; ++i) {
        pi.row(i) = std::get<CategoricalFactor>(state.latent_factors[static_cast<std::size_t>(i)])
                        .probabilities.transpose();
    }
    return pi;
}

SbmModel::PairSums SbmModel::pair_sums(const Eigen::MatrixXd& pi) const {
    PairSums sums;
    sums.edge = Eigen::MatrixXd::Zero(communities_, communities_);
    for (int i = 0; i < nodes_; ++i) {
        Eigen::VectorXd nbr = Eigen::VectorXd::Zero(communities_);
        for (int j : neighbors_[static_cast<std::size_t>(i)]) {
            nbr += pi.row(j).transpose();
        }
        sums.edge.noalias() += pi.row(i).transpose() * nbr.transpose();
    }
    const Eigen::VectorXd totals = pi.colwise().sum();
    sums.total = totals * totals.transpose() - pi.transpose() * pi;
    return sums;
}

void SbmModel::refresh_parameter_block(MeanFieldState& state, int block) const {
    // Locate (a, b) for this upper-triangle index.
    int a = 0, b = 0;
    int idx = block;
    for (int aa = 0; aa < communities_; ++aa) {
        const int row_len = communities_ - aa;
        if (idx < row_len) {
            a = aa;
            b = aa + idx;
            break;
        }
        idx -= row_len;
    }

    const Eigen::MatrixXd pi = assignment_probabilities(state);
    const PairSums sums = pair_sums(pi);
    // The ordered pair sum sum_{i != j} pi_ia pi_jb A_ij already covers both
    // orientations of each undirected edge; halve it on the diagonal where
    // the printed update runs over i < j only.
    double edges, pairs;
    if (a == b) {
        edges = 0.5 * sums.edge(a, a);
        pairs = 0.5 * sums.total(a, a);
    } else {
        edges = 0.5 * (sums.edge(a, b) + sums.edge(b, a));
        pairs = 0.5 * (sums.total(a, b) + sums.total(b, a));
    }
    state.parameter_factors[static_cast<std::size_t>(block)] =
        BetaFactor{prior_.alpha(a, b) + edges, prior_.beta(a, b) + (pairs - edges)};
}

void SbmModel::refresh_latent_block(MeanFieldState& state, int block) const {
    const int i = block;
    Eigen::MatrixXd e_log_b(communities_, communities_);
    Eigen::MatrixXd e_log_1mb(communities_, communities_);
    for (int a = 0; a < communities_; ++a) {
        for (int b = a; b < communities_; ++b) {
            const auto& q = std::get<BetaFactor>(
                state.parameter_factors[static_cast<std::size_t>(pair_index(a, b))]);
            e_log_b(a, b) = e_log_b(b, a) = q.mean_log();
            e_log_1mb(a, b) = e_log_1mb(b, a) = q.mean_log_complement();
        }
    }
    Eigen::VectorXd totals = Eigen::VectorXd::Zero(communities_);
    for (int j = 0; j < nodes_; ++j) {
        if (j != i) {
            totals += std::get<CategoricalFactor>(state.latent_factors[static_cast<std::size_t>(j)])
                          .probabilities;
        }
    }
    Eigen::VectorXd nbr = Eigen::VectorXd::Zero(communities_);
    for (int j : neighbors_[static_cast<std::size_t>(i)]) {
        nbr += std::get<CategoricalFactor>(state.latent_factors[static_cast<std::size_t>(j)])
                   .probabilities;
    }
    Eigen::VectorXd lw(communities_);
    for (int a = 0; a < communities_; ++a) {
        double acc = std::log(std::max(prior_.pi(i, a), kProbFloor));
        for (int b = 0; b < communities_; ++b) {
            acc += totals[b] * e_log_1mb(a, b) + nbr[b] * (e_log_b(a, b) - e_log_1mb(a, b));
        }
        lw[a] = acc;
    }
    state.latent_factors[static_cast<std::size_t>(i)] = categorical_from_log_weights(lw);
}

double SbmModel::elbo(const MeanFieldState& state) const {
    double value = 0.0;
    // Beta blocks: E[log p(B)] - E[log q(B)].
    int idx = 0;
    Eigen::MatrixXd e_log_b(communities_, communities_);
    Eigen::MatrixXd e_log_1mb(communities_, communities_);
    for (int a = 0; a < communities_; ++a) {
        for (int b = a; b < communities_; ++b, ++idx) {
            const auto& q = std::get<BetaFactor>(state.parameter_factors[static_cast<std::size_t>(idx)]);
            const double da = q.alpha - prior_.alpha(a, b);
            const double db = q.beta - prior_.beta(a, b);
            value += log_beta(q.alpha, q.beta) - log_beta(prior_.alpha(a, b), prior_.beta(a, b)) -
                     da * digamma(q.alpha) - db * digamma(q.beta) +
                     (da + db) * digamma(q.alpha + q.beta);
            e_log_b(a, b) = e_log_b(b, a) = q.mean_log();
            e_log_1mb(a, b) = e_log_1mb(b, a) = q.mean_log_complement();
        }
    }
    // Assignments: sum_i sum_a pi_ia log(pi^pri_ia / pi_ia).
    const Eigen::MatrixXd pi = assignment_probabilities(state);
    for (int i = 0; i < nodes_; ++i) {
        for (int a = 0; a < communities_; ++a) {
            const double p = pi(i, a);
            if (p > 0.0) {
                value += p * (std::log(std::max(prior_.pi(i, a), kProbFloor)) -
                              std::log(std::max(p, kProbFloor)));
            }
        }
    }
    // Likelihood over unordered node pairs:
    // sum_{i<j} sum_{a,b} pi_ia pi_jb [A_ij E log B_ab + (1 - A_ij) E log(1 - B_ab)].
    const PairSums sums = pair_sums(pi);
    for (int a = 0; a < communities_; ++a) {
        for (int b = 0; b < communities_; ++b) {
            value += 0.5 * (sums.total(a, b) * e_log_1mb(a, b) +
                            sums.edge(a, b) * (e_log_b(a, b) - e_log_1mb(a, b)));
        }
    }
    return value;
}

Eigen::MatrixXd SbmModel::connectivity_mean(const MeanFieldState& state) const {
    Eigen::MatrixXd mean(communities_, communities_);
    for (int a = 0; a < communities_; ++a) {
        for (int b = a; b < communities_; ++b) {
            const auto& q = std::get<BetaFactor>(
                state.parameter_factors[static_cast<std::size_t>(pair_index(a, b))]);
            mean(a, b) = mean(b, a) = q.alpha / (q.alpha + q.beta);
        }
    }
    return mean;
}

}  // namespace mfvi
