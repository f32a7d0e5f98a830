#ifndef MFVI_MODEL_HPP
#define MFVI_MODEL_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "mfvi/factors.hpp"

namespace mfvi {

// Interface a model family exposes to the coordinate ascent engine.
//
// A model partitions its mean-field state into parameter blocks and latent
// blocks. refresh_*_block sets the indexed block to its exact coordinate
// optimum given every other factor of the passed state; partial step sizes
// are applied by the engine on top via natural-parameter blending.
//
// elbo() is the generic evidence lower bound E_q[log p(data, latents, theta)]
// - E_q[log q], valid at any state (not only at the optimum).
class ModelSpec {
public:
    virtual ~ModelSpec() = default;

    virtual std::string name() const = 0;
    virtual int sample_count() const = 0;

    virtual int parameter_block_count() const = 0;
    virtual int latent_block_count() const { return 0; }
    int block_count() const { return parameter_block_count() + latent_block_count(); }

    virtual MeanFieldState make_init_state(std::uint64_t seed) const = 0;

    virtual void refresh_parameter_block(MeanFieldState& state, int block) const = 0;
    virtual void refresh_latent_block(MeanFieldState& /*state*/, int /*block*/) const {}

    // Contiguous [first, last) factor index range a block occupies, within
    // parameter_factors or latent_factors respectively.
    virtual std::pair<int, int> parameter_block_range(int block) const = 0;
    virtual std::pair<int, int> latent_block_range(int /*block*/) const { return {0, 0}; }

    // Stage order for sweeps. Models whose initialization carries symmetry
    // breaking information in one stage must consume it before overwriting it.
    virtual bool latents_before_parameters() const { return true; }

    virtual double elbo(const MeanFieldState& state) const = 0;
};

}  // namespace mfvi

#endif
