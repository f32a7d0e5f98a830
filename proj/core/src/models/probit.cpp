#include "mfvi/models/probit.hpp"

#include <cmath>
#include <stdexcept>

namespace mfvi {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

ProbitModel::ProbitModel(Eigen::MatrixXd design, Eigen::VectorXi responses,
                         Eigen::MatrixXd prior_covariance, ProbitFactorization factorization)
    : design_(std::move(design)),
      responses_(std::move(responses)),
      prior_covariance_(std::move(prior_covariance)),
      factorization_(factorization) {
    if (responses_.size() != design_.rows()) {
        throw std::invalid_argument("ProbitModel: responses/design size mismatch");
    }
    for (Eigen::Index i = 0; i < responses_.size(); ++i) {
        if (responses_[i] != 0 && responses_[i] != 1) {
            throw std::invalid_argument("ProbitModel: responses must be 0/1");
        }
    }
    const int d = dim();
    Eigen::LLT<Eigen::MatrixXd> llt0(prior_covariance_);
    if (llt0.info() != Eigen::Success) {
        throw std::invalid_argument("ProbitModel: prior covariance not positive definite");
    }
    prior_precision_ = llt0.solve(Eigen::MatrixXd::Identity(d, d));
    log_det_prior_cov_ = 2.0 * llt0.matrixL().toDenseMatrix().diagonal().array().log().sum();

    const Eigen::MatrixXd xtx = design_.transpose() * design_;
    gram_ = xtx + prior_precision_;
    Eigen::LLT<Eigen::MatrixXd> llt(gram_);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("ProbitModel: X^T X + Sigma0^-1 not positive definite");
    }
    block_covariance_ = llt.solve(Eigen::MatrixXd::Identity(d, d));

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(prior_covariance_ * xtx +
                                            Eigen::MatrixXd::Identity(d, d));
    log_det_gram_sigma0_ = std::log(std::abs(lu.determinant()));
}

MeanFieldState ProbitModel::make_init_state(std::uint64_t /*seed*/) const {
    MeanFieldState state;
    const int d = dim();
    if (factorization_ == ProbitFactorization::block) {
        MultivariateGaussianFactor beta;
        beta.mean = Eigen::VectorXd::Zero(d);
        beta.covariance = block_covariance_;
        state.parameter_factors = {beta};
    } else {
        state.parameter_factors.reserve(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            state.parameter_factors.emplace_back(GaussianFactor{0.0, 1.0 / gram_(j, j)});
        }
    }
    state.latent_factors.reserve(static_cast<std::size_t>(sample_count()));
    for (int i = 0; i < sample_count(); ++i) {
        state.latent_factors.emplace_back(TruncatedGaussianFactor{
            0.0, responses_[i] == 1 ? TruncationSide::positive : TruncationSide::negative});
    }
    if (latent_block_count() > 0) {
        refresh_latent_block(state, 0);  // mu_Z from one latent update at beta = 0
    }
    return state;
}

Eigen::VectorXd ProbitModel::coefficient_mean(const MeanFieldState& state) const {
    if (factorization_ == ProbitFactorization::block) {
        return std::get<MultivariateGaussianFactor>(state.parameter_factors[0]).mean;
    }
    Eigen::VectorXd mu(dim());
    for (int j = 0; j < dim(); ++j) {
        mu[j] = std::get<GaussianFactor>(state.parameter_factors[static_cast<std::size_t>(j)]).mean;
    }
    return mu;
}

Eigen::VectorXd ProbitModel::latent_means(const MeanFieldState& state) const {
    Eigen::VectorXd mu_z(sample_count());
    for (int i = 0; i < sample_count(); ++i) {
        mu_z[i] = std::get<TruncatedGaussianFactor>(state.latent_factors[static_cast<std::size_t>(i)])
                      .mean();
    }
    return mu_z;
}

void ProbitModel::refresh_latent_block(MeanFieldState& state, int /*block*/) const {
    const Eigen::VectorXd eta = design_ * coefficient_mean(state);
    for (int i = 0; i < sample_count(); ++i) {
        auto& z = std::get<TruncatedGaussianFactor>(state.latent_factors[static_cast<std::size_t>(i)]);
        z.location = eta[i];
    }
}

void ProbitModel::refresh_parameter_block(MeanFieldState& state, int block) const {
    const Eigen::VectorXd mu_z = latent_means(state);
    if (factorization_ == ProbitFactorization::block) {
        auto& beta = std::get<MultivariateGaussianFactor>(state.parameter_factors[0]);
        beta.mean = block_covariance_ * (design_.transpose() * mu_z);
        beta.covariance = block_covariance_;
        return;
    }
    const int j = block;
    Eigen::VectorXd mu = coefficient_mean(state);
    double acc = design_.col(j).dot(mu_z);
    for (int k = 0; k < dim(); ++k) {
        if (k != j) {
            acc -= gram_(j, k) * mu[k];
        }
    }
    auto& q = std::get<GaussianFactor>(state.parameter_factors[static_cast<std::size_t>(j)]);
    q = GaussianFactor{acc / gram_(j, j), 1.0 / gram_(j, j)};
}

double ProbitModel::elbo(const MeanFieldState& state) const {
    const int d = dim();
    const int n = sample_count();
    const Eigen::VectorXd mu = coefficient_mean(state);

    Eigen::VectorXd quad(n);  // x_i^T Cov(beta) x_i
    double trace_prior_cov = 0.0;
    double entropy_beta = 0.0;
    if (factorization_ == ProbitFactorization::block) {
        const auto& beta = std::get<MultivariateGaussianFactor>(state.parameter_factors[0]);
        quad = (design_ * beta.covariance).cwiseProduct(design_).rowwise().sum();
        trace_prior_cov = (prior_precision_ * beta.covariance).trace();
        entropy_beta = beta.entropy();
    } else {
        Eigen::VectorXd vars(d);
        for (int j = 0; j < d; ++j) {
            const auto& q = std::get<GaussianFactor>(state.parameter_factors[static_cast<std::size_t>(j)]);
            vars[j] = q.variance;
            entropy_beta += q.entropy();
        }
        quad = design_.array().square().matrix() * vars;
        trace_prior_cov = prior_precision_.diagonal().dot(vars);
    }

    const Eigen::VectorXd eta = design_ * mu;
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& z = std::get<TruncatedGaussianFactor>(state.latent_factors[static_cast<std::size_t>(i)]);
        const double ez = z.mean();
        const double ez2 = z.second_moment();
        // E[log N(Z_i; x_i^T beta, 1)] and the latent entropy
        value += -0.5 * kLog2Pi - 0.5 * (ez2 - 2.0 * ez * eta[i] + eta[i] * eta[i] + quad[i]);
        value += z.entropy();
    }
    // prior on beta and its entropy
    value += -0.5 * d * kLog2Pi - 0.5 * log_det_prior_cov_ -
             0.5 * (mu.dot(prior_precision_ * mu) + trace_prior_cov);
    value += entropy_beta;
    return value;
}

double ProbitModel::elbo_fixed_point_form(const MeanFieldState& state) const {
    const Eigen::VectorXd mu = coefficient_mean(state);
    const Eigen::VectorXd eta = design_ * mu;
    double value = 0.0;
    for (int i = 0; i < sample_count(); ++i) {
        value += (responses_[i] == 1) ? log_normal_cdf(eta[i]) : log_normal_cdf(-eta[i]);
    }
    value -= 0.5 * mu.dot(prior_precision_ * mu);
    if (factorization_ == ProbitFactorization::block) {
        value -= 0.5 * log_det_gram_sigma0_;
    } else {
        value -= 0.5 * log_det_prior_cov_;
        value -= 0.5 * gram_.diagonal().array().log().sum();
    }
    return value;
}

}  // namespace mfvi
