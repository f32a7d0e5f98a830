#ifndef MFVI_MODELS_NORMAL_HPP
#define MFVI_MODELS_NORMAL_HPP

#include <Eigen/Dense>

#include "mfvi/model.hpp"

namespace mfvi {

struct NormalPrior {
    double mu0 = 0.0;
    double sigma0_sq = 1.0;  // variance of the normal prior on the mean
    double a = 1.0;          // inverse gamma shape on the variance
    double b = 1.0;          // inverse gamma rate
};

// Conjugate location-scale model: X_i ~ N(mu, sigma^2) with
// mu ~ N(mu0, sigma0^2), sigma^2 ~ IG(a, b). Mean-field factors are
// q_mu = N(m, s^2) and q_sigma2 = IG(A, B) with A = a + n/2 fixed.
class NormalModel final : public ModelSpec {
public:
    NormalModel(Eigen::VectorXd data, NormalPrior prior);

    std::string name() const override { return "normal"; }
    int sample_count() const override { return static_cast<int>(data_.size()); }
    int parameter_block_count() const override { return 2; }

    MeanFieldState make_init_state(std::uint64_t seed) const override;
    void refresh_parameter_block(MeanFieldState& state, int block) const override;
    std::pair<int, int> parameter_block_range(int block) const override { return {block, block + 1}; }

    double elbo(const MeanFieldState& state) const override;

    // Closed form of the optimal ELBO; exact whenever the IG rate satisfies
    // its own update equation given (m, s^2), in particular at the fixed point.
    double elbo_fixed_point_form(const MeanFieldState& state) const;

    const Eigen::VectorXd& data() const { return data_; }
    const NormalPrior& prior() const { return prior_; }
    double fixed_shape() const { return prior_.a + 0.5 * sample_count(); }

private:
    Eigen::VectorXd data_;
    NormalPrior prior_;
    double sum_ = 0.0;
};

}  // namespace mfvi

#endif
