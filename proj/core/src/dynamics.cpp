#include "mfvi/dynamics.hpp"

#include <stdexcept>

#include "mfvi/rng.hpp"

namespace mfvi {

GaussianDynamics gaussian_bias_step_parallel(const GaussianDynamics& dyn, double gamma) {
    GaussianDynamics next = dyn;
    const Eigen::VectorXd d = dyn.effective_diagonal();
    next.bias = dyn.bias - gamma * (dyn.V * dyn.bias).cwiseQuotient(d);
    return next;
}

GaussianDynamics gaussian_bias_step_coordinate(const GaussianDynamics& dyn, int index, double gamma) {
    if (index < 0 || index >= dyn.bias.size()) {
        throw std::invalid_argument("gaussian_bias_step_coordinate: index out of range");
    }
    GaussianDynamics next = dyn;
    const Eigen::VectorXd d = dyn.effective_diagonal();
    next.bias[index] -= gamma * dyn.V.row(index).dot(dyn.bias) / d[index];
    return next;
}

GaussianDynamics gaussian_bias_step(const GaussianDynamics& dyn, const Schedule& schedule,
                                    std::uint64_t seed, std::uint64_t counter) {
    switch (schedule.kind) {
        case ScheduleKind::parallel:
            return gaussian_bias_step_parallel(dyn, schedule.step_size);
        case ScheduleKind::sequential_randomized: {
            const int index = uniform_index(seed, counter, static_cast<int>(dyn.bias.size()));
            return gaussian_bias_step_coordinate(dyn, index, schedule.step_size);
        }
        case ScheduleKind::sequential_systematic:
            return gaussian_bias_step_coordinate(
                dyn, static_cast<int>(counter % static_cast<std::uint64_t>(dyn.bias.size())),
                schedule.step_size);
    }
    throw std::logic_error("gaussian_bias_step: unknown schedule");
}

}  // namespace mfvi
