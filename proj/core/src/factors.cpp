#include "mfvi/factors.hpp"

#include <cmath>
#include <stdexcept>

namespace mfvi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
constexpr double kProbFloor = 1e-300;

double checked_gamma(double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw std::invalid_argument("blend_natural: step size must be in (0, 1]");
    }
    return gamma;
}

}  // namespace

double GaussianFactor::entropy() const {
    return 0.5 * (kLog2Pi + 1.0 + std::log(variance));
}

double MultivariateGaussianFactor::entropy() const {
    const Eigen::Index d = mean.size();
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("MultivariateGaussianFactor: covariance not positive definite");
    }
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return 0.5 * (static_cast<double>(d) * (kLog2Pi + 1.0) + log_det);
}

double InverseGammaFactor::mean_log() const {
    return std::log(rate) - digamma(shape);
}

double InverseGammaFactor::entropy() const {
    return shape + std::log(rate) + std::lgamma(shape) - (1.0 + shape) * digamma(shape);
}

double CategoricalFactor::entropy() const {
    double h = 0.0;
    for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
        const double p = probabilities[k];
        if (p > 0.0) {
            h -= p * std::log(std::max(p, kProbFloor));
        }
    }
    return h;
}

double BetaFactor::mean_log() const {
    return digamma(alpha) - digamma(alpha + beta);
}

double BetaFactor::mean_log_complement() const {
    return digamma(beta) - digamma(alpha + beta);
}

double BetaFactor::entropy() const {
    return log_beta(alpha, beta) - (alpha - 1.0) * digamma(alpha) - (beta - 1.0) * digamma(beta) +
           (alpha + beta - 2.0) * digamma(alpha + beta);
}

double TruncatedGaussianFactor::entropy() const {
    // -E[log q] with q(z) = phi(z - location) / P on the truncated side,
    // P = Phi(location) for the positive side, Phi(-location) otherwise.
    const double m = mean();
    const double e2 = second_moment();
    const double centered = e2 - 2.0 * location * m + location * location;
    const double log_p = log_normal_cdf(side == TruncationSide::positive ? location : -location);
    return 0.5 * kLog2Pi + 0.5 * centered + log_p;
}

double factor_entropy(const Factor& f) {
    return std::visit([](const auto& v) { return v.entropy(); }, f);
}

Factor blend_natural(const Factor& current, const Factor& target, double gamma) {
    checked_gamma(gamma);
    if (gamma == 1.0) {
        return target;
    }
    if (current.index() != target.index()) {
        throw std::invalid_argument("blend_natural: factor kinds differ");
    }
    const double g = gamma;
    const double og = 1.0 - gamma;
    if (const auto* c = std::get_if<GaussianFactor>(&current)) {
        const auto& t = std::get<GaussianFactor>(target);
        const double prec = g / t.variance + og / c->variance;
        const double h = g * t.mean / t.variance + og * c->mean / c->variance;
        return GaussianFactor{h / prec, 1.0 / prec};
    }
    if (const auto* c = std::get_if<MultivariateGaussianFactor>(&current)) {
        const auto& t = std::get<MultivariateGaussianFactor>(target);
        const Eigen::MatrixXd prec_c = c->covariance.llt().solve(
            Eigen::MatrixXd::Identity(c->covariance.rows(), c->covariance.cols()));
        const Eigen::MatrixXd prec_t = t.covariance.llt().solve(
            Eigen::MatrixXd::Identity(t.covariance.rows(), t.covariance.cols()));
        const Eigen::MatrixXd prec = g * prec_t + og * prec_c;
        const Eigen::VectorXd h = g * (prec_t * t.mean) + og * (prec_c * c->mean);
        Eigen::LLT<Eigen::MatrixXd> llt(prec);
        MultivariateGaussianFactor out;
        out.covariance = llt.solve(Eigen::MatrixXd::Identity(prec.rows(), prec.cols()));
        out.mean = llt.solve(h);
        return out;
    }
    if (const auto* c = std::get_if<InverseGammaFactor>(&current)) {
        const auto& t = std::get<InverseGammaFactor>(target);
        return InverseGammaFactor{g * t.shape + og * c->shape, g * t.rate + og * c->rate};
    }
    if (const auto* c = std::get_if<CategoricalFactor>(&current)) {
        const auto& t = std::get<CategoricalFactor>(target);
        Eigen::VectorXd lw(c->probabilities.size());
        for (Eigen::Index k = 0; k < lw.size(); ++k) {
            lw[k] = g * std::log(std::max(t.probabilities[k], kProbFloor)) +
                    og * std::log(std::max(c->probabilities[k], kProbFloor));
        }
        return categorical_from_log_weights(lw);
    }
    if (const auto* c = std::get_if<BetaFactor>(&current)) {
        const auto& t = std::get<BetaFactor>(target);
        return BetaFactor{g * t.alpha + og * c->alpha, g * t.beta + og * c->beta};
    }
    const auto& c = std::get<TruncatedGaussianFactor>(current);
    const auto& t = std::get<TruncatedGaussianFactor>(target);
    if (c.side != t.side) {
        throw std::invalid_argument("blend_natural: truncation sides differ");
    }
    return TruncatedGaussianFactor{g * t.location + og * c.location, c.side};
}

double kl_gaussian(const MultivariateGaussianFactor& q, const MultivariateGaussianFactor& p) {
    const Eigen::Index d = q.mean.size();
    if (p.mean.size() != d || q.covariance.rows() != d || p.covariance.rows() != d) {
        throw std::invalid_argument("kl_gaussian: dimension mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt_p(p.covariance);
    Eigen::LLT<Eigen::MatrixXd> llt_q(q.covariance);
    if (llt_p.info() != Eigen::Success || llt_q.info() != Eigen::Success) {
        throw std::invalid_argument("kl_gaussian: covariance not positive definite");
    }
    const double log_det_p = 2.0 * llt_p.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double log_det_q = 2.0 * llt_q.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double trace = llt_p.solve(q.covariance).trace();
    const Eigen::VectorXd diff = p.mean - q.mean;
    const double mahal = diff.dot(llt_p.solve(diff));
    return 0.5 * (trace + mahal - static_cast<double>(d) + log_det_p - log_det_q);
}

namespace {

double kl_1d_gaussian(const GaussianFactor& q, const GaussianFactor& p) {
    const double diff = q.mean - p.mean;
    return 0.5 * (q.variance / p.variance + diff * diff / p.variance - 1.0 +
                  std::log(p.variance / q.variance));
}

double kl_inverse_gamma(const InverseGammaFactor& q, const InverseGammaFactor& p) {
    // KL between IG(Aq,Bq) and IG(Ap,Bp); same form as the gamma KL.
    return (q.shape - p.shape) * digamma(q.shape) - std::lgamma(q.shape) + std::lgamma(p.shape) +
           p.shape * (std::log(q.rate) - std::log(p.rate)) + q.shape * (p.rate - q.rate) / q.rate;
}

double kl_categorical(const CategoricalFactor& q, const CategoricalFactor& p) {
    double kl = 0.0;
    for (Eigen::Index k = 0; k < q.probabilities.size(); ++k) {
        const double a = q.probabilities[k];
        if (a > 0.0) {
            kl += a * (std::log(std::max(a, kProbFloor)) -
                       std::log(std::max(p.probabilities[k], kProbFloor)));
        }
    }
    return kl;
}

double kl_beta(const BetaFactor& q, const BetaFactor& p) {
    return log_beta(p.alpha, p.beta) - log_beta(q.alpha, q.beta) +
           (q.alpha - p.alpha) * digamma(q.alpha) + (q.beta - p.beta) * digamma(q.beta) +
           (p.alpha + p.beta - q.alpha - q.beta) * digamma(q.alpha + q.beta);
}

double kl_truncated(const TruncatedGaussianFactor& q, const TruncatedGaussianFactor& p) {
    if (q.side != p.side) {
        throw std::invalid_argument("factor_kl: truncation sides differ");
    }
    // E_q[log q - log p] with shared unit scale and truncation side.
    const double lp_q = log_normal_cdf(q.side == TruncationSide::positive ? q.location : -q.location);
    const double lp_p = log_normal_cdf(p.side == TruncationSide::positive ? p.location : -p.location);
    const double m = q.mean();
    return 0.5 * (p.location * p.location - q.location * q.location) +
           m * (q.location - p.location) + lp_p - lp_q;
}

}  // namespace

double factor_kl(const Factor& q, const Factor& p) {
    if (q.index() != p.index()) {
        throw std::invalid_argument("factor_kl: factor kinds differ");
    }
    if (const auto* a = std::get_if<GaussianFactor>(&q)) {
        return kl_1d_gaussian(*a, std::get<GaussianFactor>(p));
    }
    if (const auto* a = std::get_if<MultivariateGaussianFactor>(&q)) {
        return kl_gaussian(*a, std::get<MultivariateGaussianFactor>(p));
    }
    if (const auto* a = std::get_if<InverseGammaFactor>(&q)) {
        return kl_inverse_gamma(*a, std::get<InverseGammaFactor>(p));
    }
    if (const auto* a = std::get_if<CategoricalFactor>(&q)) {
        return kl_categorical(*a, std::get<CategoricalFactor>(p));
    }
    if (const auto* a = std::get_if<BetaFactor>(&q)) {
        return kl_beta(*a, std::get<BetaFactor>(p));
    }
    return kl_truncated(std::get<TruncatedGaussianFactor>(q), std::get<TruncatedGaussianFactor>(p));
}

double state_kl(const MeanFieldState& q, const MeanFieldState& p) {
    if (q.parameter_factors.size() != p.parameter_factors.size() ||
        q.latent_factors.size() != p.latent_factors.size()) {
        throw std::invalid_argument("state_kl: state layouts differ");
    }
    double kl = 0.0;
    for (std::size_t j = 0; j < q.parameter_factors.size(); ++j) {
        kl += factor_kl(q.parameter_factors[j], p.parameter_factors[j]);
    }
    for (std::size_t i = 0; i < q.latent_factors.size(); ++i) {
        kl += factor_kl(q.latent_factors[i], p.latent_factors[i]);
    }
    return kl;
}

CategoricalFactor categorical_from_log_weights(const Eigen::VectorXd& log_weights) {
    const double lse = log_sum_exp(std::span<const double>(log_weights.data(),
                                                           static_cast<std::size_t>(log_weights.size())));
    CategoricalFactor out;
    out.probabilities = (log_weights.array() - lse).exp();
    out.probabilities /= out.probabilities.sum();  // clean residual rounding
    return out;
}

}  // namespace mfvi
