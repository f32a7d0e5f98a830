#ifndef MFVI_MODELS_GMM_HPP
#define MFVI_MODELS_GMM_HPP

#include <Eigen/Dense>

#include "mfvi/model.hpp"

namespace mfvi {

// One-dimensional Gaussian mixture with K unit-variance components, known
// equal weights 1/K, and centers mu_k ~ N(0, prior_sd^2) i.i.d. Mean-field
// factors: q(mu_k) = N(m_k, s_k^2) and q(c_i) categorical over components.
class GmmModel final : public ModelSpec {
public:
    GmmModel(Eigen::VectorXd data, int components, double prior_sd);

    std::string name() const override { return "gmm"; }
    int sample_count() const override { return static_cast<int>(data_.size()); }
    int parameter_block_count() const override { return components_; }
    int latent_block_count() const override { return sample_count() > 0 ? 1 : 0; }
    bool latents_before_parameters() const override { return true; }

    MeanFieldState make_init_state(std::uint64_t seed) const override;
    void refresh_parameter_block(MeanFieldState& state, int block) const override;
    void refresh_latent_block(MeanFieldState& state, int block) const override;
    std::pair<int, int> parameter_block_range(int block) const override { return {block, block + 1}; }
    std::pair<int, int> latent_block_range(int /*block*/) const override { return {0, sample_count()}; }

    // The closed form below is an exact rewriting of E_q[log p] - E_q[log q];
    // it is valid at any state, not only at the optimum.
    double elbo(const MeanFieldState& state) const override;

    Eigen::VectorXd center_means(const MeanFieldState& state) const;

    const Eigen::VectorXd& data() const { return data_; }
    int components() const { return components_; }
    double prior_sd() const { return prior_sd_; }

private:
    Eigen::VectorXd data_;
    int components_;
    double prior_sd_;
};

}  // namespace mfvi

#endif
