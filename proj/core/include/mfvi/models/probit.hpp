#ifndef MFVI_MODELS_PROBIT_HPP
#define MFVI_MODELS_PROBIT_HPP

#include <Eigen/Dense>

#include "mfvi/model.hpp"

namespace mfvi {

enum class ProbitFactorization { block, fully_factorized };

// Data-augmented probit regression: Y_i | X_i ~ Ber(Phi(X_i^T beta)) with
// latent Z_i | beta ~ N(X_i^T beta, 1) and prior beta ~ N(0, Sigma0).
//
// block: q(beta) is one multivariate Gaussian with covariance fixed at
//   (X^T X + Sigma0^-1)^-1.
// fully_factorized: q(beta_j) are univariate Gaussians with variances fixed
//   at the reciprocal diagonal of X^T X + Sigma0^-1.
// Either way q(Z_i) is a unit-scale truncated normal on the side given by Y_i.
class ProbitModel final : public ModelSpec {
public:
    ProbitModel(Eigen::MatrixXd design, Eigen::VectorXi responses, Eigen::MatrixXd prior_covariance,
                ProbitFactorization factorization);

    std::string name() const override { return "probit"; }
    int sample_count() const override { return static_cast<int>(design_.rows()); }
    int parameter_block_count() const override {
        return factorization_ == ProbitFactorization::block ? 1 : dim();
    }
    int latent_block_count() const override { return sample_count() > 0 ? 1 : 0; }
    bool latents_before_parameters() const override { return false; }

    MeanFieldState make_init_state(std::uint64_t seed) const override;
    void refresh_parameter_block(MeanFieldState& state, int block) const override;
    void refresh_latent_block(MeanFieldState& state, int block) const override;
    std::pair<int, int> parameter_block_range(int block) const override { return {block, block + 1}; }
    std::pair<int, int> latent_block_range(int /*block*/) const override { return {0, sample_count()}; }

    double elbo(const MeanFieldState& state) const override;

    // Closed form of the optimal ELBO for the active factorization.
    double elbo_fixed_point_form(const MeanFieldState& state) const;

    Eigen::VectorXd coefficient_mean(const MeanFieldState& state) const;
    Eigen::VectorXd latent_means(const MeanFieldState& state) const;

    int dim() const { return static_cast<int>(design_.cols()); }
    const Eigen::MatrixXd& design() const { return design_; }
    const Eigen::VectorXi& responses() const { return responses_; }
    const Eigen::MatrixXd& prior_covariance() const { return prior_covariance_; }
    ProbitFactorization factorization() const { return factorization_; }
    const Eigen::MatrixXd& block_covariance() const { return block_covariance_; }

private:
    Eigen::MatrixXd design_;
    Eigen::VectorXi responses_;
    Eigen::MatrixXd prior_covariance_;
    ProbitFactorization factorization_;

    Eigen::MatrixXd prior_precision_;   // Sigma0^-1
    Eigen::MatrixXd gram_;              // A = X^T X + Sigma0^-1
    Eigen::MatrixXd block_covariance_;  // A^-1
    double log_det_prior_cov_ = 0.0;
    double log_det_gram_sigma0_ = 0.0;  // log det(Sigma0 X^T X + I)
};

}  // namespace mfvi

#endif
