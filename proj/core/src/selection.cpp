#include "mfvi/selection.hpp"

#include <cmath>
#include <stdexcept>

#include "mfvi/errors.hpp"

namespace mfvi {

std::string criterion_name(Criterion c) {
    switch (c) {
        case Criterion::elbo: return "elbo";
        case Criterion::bic: return "bic";
        case Criterion::aic: return "aic";
        case Criterion::penalized_elbo: return "penalized_elbo";
        case Criterion::extended_bic: return "extended_bic";
        case Criterion::evidence: return "evidence";
    }
    throw std::logic_error("criterion_name: unknown criterion");
}

Criterion criterion_from_name(const std::string& name) {
    for (Criterion c : {Criterion::elbo, Criterion::bic, Criterion::aic, Criterion::penalized_elbo,
                        Criterion::extended_bic, Criterion::evidence}) {
        if (criterion_name(c) == name) {
            return c;
        }
    }
    throw std::invalid_argument("unknown criterion: " + name);
}

double bic(double loglik_max, int d_m, long n) {
    if (n < 1) {
        throw std::invalid_argument("bic: requires n >= 1");
    }
    return -2.0 * loglik_max + d_m * std::log(static_cast<double>(n));
}

double aic(double loglik_max, int d_m) {
    return -2.0 * loglik_max + 2.0 * d_m;
}

PenalizedCriteria penalized_criteria(double elbo, double bic, double log_model_prior) {
    return PenalizedCriteria{elbo + log_model_prior, bic - 2.0 * log_model_prior};
}

double elbo_factor(double elbo0, double elbo1) {
    return elbo0 - elbo1;
}

std::string select(const std::vector<CriterionValue>& values, Criterion criterion) {
    if (values.empty()) {
        throw std::invalid_argument("select: empty candidate list");
    }
    const bool maximize = criterion == Criterion::elbo || criterion == Criterion::evidence ||
                          criterion == Criterion::penalized_elbo;
    auto score = [&](const CriterionValue& v) -> double {
        switch (criterion) {
            case Criterion::elbo: return v.elbo;
            case Criterion::bic: return v.bic;
            case Criterion::aic: return v.aic;
            case Criterion::penalized_elbo:
                if (!v.penalized_elbo) {
                    throw std::invalid_argument("select: penalized_elbo missing for " + v.model_id);
                }
                return *v.penalized_elbo;
            case Criterion::extended_bic:
                if (!v.extended_bic) {
                    throw std::invalid_argument("select: extended_bic missing for " + v.model_id);
                }
                return *v.extended_bic;
            case Criterion::evidence:
                if (!v.mc_evidence) {
                    throw std::invalid_argument("select: evidence missing for " + v.model_id);
                }
                return v.mc_evidence->estimate;
        }
        throw std::logic_error("select: unknown criterion");
    };
    const CriterionValue* winner = &values.front();
    double best = score(*winner);
    for (const auto& v : values) {
        const double s = score(v);
        const bool better = maximize ? s > best : s < best;
        const bool tie = s == best && (v.d_m < winner->d_m ||
                                       (v.d_m == winner->d_m && v.model_id < winner->model_id));
        if (better || tie) {
            winner = &v;
            best = s;
        }
    }
    return winner->model_id;
}

namespace {

double log_det_pd(const Eigen::MatrixXd& m, const char* label) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericError(std::string(label) + ": matrix not positive definite");
    }
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

GapConstants gap_constants(const FisherBundle& bundle,
                           const std::optional<std::vector<int>>& block_sizes) {
    const int d = bundle.dim();
    const double log_det_v = log_det_pd(bundle.V, "gap_constants(V)");
    const double log_det_diag_vc = bundle.V_c.diagonal().array().log().sum();

    GapConstants gaps;
    gaps.c_star = 0.5 * (log_det_diag_vc - log_det_v);
    gaps.c_bic_star = -0.5 * log_det_v + 0.5 * d * std::log(2.0 * M_PI) +
                      bundle.prior_log_density_at_theta_star;
    gaps.c_tilde_star = gaps.c_star - gaps.c_bic_star;

    if (block_sizes) {
        int total = 0;
        Eigen::MatrixXd block_diag = Eigen::MatrixXd::Zero(d, d);
        for (int size : *block_sizes) {
            if (size < 1 || total + size > d) {
                throw std::invalid_argument("gap_constants: invalid block partition");
            }
            block_diag.block(total, total, size, size) =
                bundle.V_c.block(total, total, size, size);
            total += size;
        }
        if (total != d) {
            throw std::invalid_argument("gap_constants: block sizes must sum to the dimension");
        }
        gaps.c_block_star =
            0.5 * (log_det_pd(block_diag, "gap_constants(blockdiag V_c)") - log_det_v);
    }
    if (!bundle.has_latent()) {
        gaps.c_nolatent_star = 0.5 * (bundle.V.diagonal().array().log().sum() - log_det_v);
    }
    return gaps;
}

ContractionReport contraction_rates(const FisherBundle& bundle, double gamma, ScheduleKind scheme,
                                    bool latent, int d) {
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw std::invalid_argument("contraction_rates: gamma must be in (0, 1]");
    }
    const int dim = bundle.dim();
    if (d <= 0) {
        d = dim;
    }
    const Eigen::MatrixXd& v = bundle.V;
    const Eigen::VectorXd s = v.diagonal();
    const Eigen::VectorXd s_c = latent ? bundle.V_c.diagonal() : s;

    Eigen::MatrixXd numerator(dim, dim);
    if (scheme == ScheduleKind::parallel) {
        const Eigen::MatrixXd a_gamma =
            Eigen::MatrixXd::Identity(dim, dim) - gamma * s_c.cwiseInverse().asDiagonal() * v;
        numerator = a_gamma.transpose() * v * a_gamma;
    } else if (latent) {
        const Eigen::VectorXd mid = (2.0 * s_c - gamma * s).cwiseQuotient(s_c.cwiseProduct(s_c));
        numerator = v * mid.asDiagonal() * v;
    } else {
        numerator = v * s.cwiseInverse().asDiagonal() * v;
    }
    numerator = 0.5 * (numerator + numerator.transpose().eval());

    // Rayleigh extremes of b^T M b / b^T V b via the Cholesky-whitened pencil.
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() != Eigen::Success) {
        throw NumericError("contraction_rates: V not positive definite");
    }
    const Eigen::MatrixXd l = llt.matrixL();
    const Eigen::MatrixXd whitened = l.triangularView<Eigen::Lower>().solve(
        l.triangularView<Eigen::Lower>().solve(numerator).transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (whitened + whitened.transpose().eval()));

    ContractionReport report;
    report.scheme = scheme;
    report.gamma = gamma;
    report.latent = latent;
    report.rayleigh_min = eig.eigenvalues().minCoeff();
    report.rayleigh_max = eig.eigenvalues().maxCoeff();
    if (scheme == ScheduleKind::parallel) {
        report.alpha = report.rayleigh_max;
    } else if (latent) {
        report.alpha = 1.0 - report.rayleigh_min * gamma / d;
    } else {
        report.alpha = 1.0 - report.rayleigh_min * gamma * (2.0 - gamma) / d;
    }
    return report;
}

}  // namespace mfvi
