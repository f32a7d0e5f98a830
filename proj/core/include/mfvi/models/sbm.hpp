#ifndef MFVI_MODELS_SBM_HPP
#define MFVI_MODELS_SBM_HPP

#include <Eigen/Dense>
#include <vector>

#include "mfvi/model.hpp"

namespace mfvi {

struct SbmPrior {
    // Symmetric K x K hyperparameter matrices for the Beta priors on the
    // connectivity entries; only a <= b is read.
    Eigen::MatrixXd alpha;
    Eigen::MatrixXd beta;
    // n x K categorical prior on the community assignments; rows sum to 1.
    Eigen::MatrixXd pi;
};

// Uniform Beta(1,1) connectivity priors and uniform assignment priors.
SbmPrior uniform_sbm_prior(int nodes, int communities);

// Stochastic block model on an undirected simple graph: edges A_ij (i < j)
// are Bernoulli(B_{Z_i Z_j}) with B_ab ~ Beta priors and categorical priors
// on the community assignments Z_i. Mean-field factors: one Beta per
// connectivity entry (a <= b) and one categorical per node.
class SbmModel final : public ModelSpec {
public:
    SbmModel(Eigen::MatrixXi adjacency, int communities, SbmPrior prior);

    std::string name() const override { return "sbm"; }
    int sample_count() const override { return nodes_; }
    int parameter_block_count() const override { return communities_ * (communities_ + 1) / 2; }
    int latent_block_count() const override { return nodes_; }
    bool latents_before_parameters() const override { return false; }

    MeanFieldState make_init_state(std::uint64_t seed) const override;
    void refresh_parameter_block(MeanFieldState& state, int block) const override;
    void refresh_latent_block(MeanFieldState& state, int block) const override;
    std::pair<int, int> parameter_block_range(int block) const override { return {block, block + 1}; }
    std::pair<int, int> latent_block_range(int block) const override { return {block, block + 1}; }

    double elbo(const MeanFieldState& state) const override;

    // Index of the Beta factor for the connectivity entry (a, b), a <= b.
    int pair_index(int a, int b) const;

    // Posterior-mean connectivity matrix E_q[B] (symmetric K x K).
    Eigen::MatrixXd connectivity_mean(const MeanFieldState& state) const;

    // Assignment probabilities as an n x K matrix.
    Eigen::MatrixXd assignment_probabilities(const MeanFieldState& state) const;

    const Eigen::MatrixXi& adjacency() const { return adjacency_; }
    int communities() const { return communities_; }
    const SbmPrior& prior() const { return prior_; }

private:
    Eigen::MatrixXi adjacency_;
    int nodes_ = 0;
    int communities_ = 0;
    SbmPrior prior_;
    std::vector<std::vector<int>> neighbors_;

    struct PairSums {
        Eigen::MatrixXd edge;   // sum over ordered pairs (i, j), i != j, A_ij = 1 of pi_ia pi_jb
        Eigen::MatrixXd total;  // sum over ordered pairs (i, j), i != j of pi_ia pi_jb
    };
    PairSums pair_sums(const Eigen::MatrixXd& pi) const;
};

}  // namespace mfvi

#endif
