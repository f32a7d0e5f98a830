#include "mfvi/projection.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "mfvi/errors.hpp"
#include "mfvi/rng.hpp"
#include "mfvi/special.hpp"

namespace mfvi {

namespace {

struct ProbitObjective {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;  // negated (positive definite)
};

// Average candidate log-likelihood with responses integrated under the
// population conditional: sum over y of P(y|x) log p(y|x_M, beta). Using the
// exact conditional instead of sampled labels halves the Monte Carlo noise
// and leaves the maximizer unchanged.
ProbitObjective probit_objective(const ProbitPopulation& population, int k,
                                 const Eigen::VectorXd& beta, long samples, std::uint64_t seed) {
    const int p = static_cast<int>(population.sigma.rows());
    const Eigen::MatrixXd chol = population.sigma.llt().matrixL();
    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ProbitObjective obj;
    obj.grad = Eigen::VectorXd::Zero(k);
    obj.hess = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd z(p);
    for (long s = 0; s < samples; ++s) {
        for (int j = 0; j < p; ++j) {
            z[j] = gauss(engine);
        }
        const Eigen::VectorXd x = chol * z;
        const double p1 = normal_cdf(x.dot(population.beta));
        const double eta = x.head(k).dot(beta);
        const double h1 = normal_hazard(eta);
        const double h0 = normal_hazard(-eta);
        obj.value += p1 * log_normal_cdf(eta) + (1.0 - p1) * log_normal_cdf(-eta);
        const double score = p1 * h1 - (1.0 - p1) * h0;
        const double weight = p1 * h1 * (h1 + eta) + (1.0 - p1) * h0 * (h0 - eta);
        obj.grad.noalias() += score * x.head(k);
        obj.hess.noalias() += weight * x.head(k) * x.head(k).transpose();
    }
    const double inv = 1.0 / static_cast<double>(samples);
    obj.value *= inv;
    obj.grad *= inv;
    obj.hess *= inv;
    return obj;
}

}  // namespace

KlProjection kl_projection_probit(const ProbitPopulation& population, int candidate_size,
                                  long samples, std::uint64_t seed, double rel_tolerance,
                                  int max_iterations) {
    const int k = candidate_size;
    if (k < 1 || k > population.sigma.rows()) {
        throw std::invalid_argument("kl_projection_probit: bad candidate size");
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    KlProjection result;
    double prev = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iterations; ++iter) {
        const ProbitObjective obj = probit_objective(population, k, beta, samples, seed);
        result.objective_trace.push_back(obj.value);
        if (std::abs(obj.value - prev) <= rel_tolerance * std::abs(obj.value)) {
            result.theta_star = beta;
            result.objective = obj.value;
            return result;
        }
        prev = obj.value;
        Eigen::LLT<Eigen::MatrixXd> llt(obj.hess);
        if (llt.info() != Eigen::Success) {
            throw NumericError("kl_projection_probit: singular Hessian");
        }
        beta += llt.solve(obj.grad);
        if (beta.norm() > 1e6) {
            throw NumericError("kl_projection_probit: diverging iterate");
        }
    }
    std::ostringstream msg;
    msg << "kl_projection_probit: no convergence in " << max_iterations << " iterations";
    throw NumericError(msg.str());
}

KlProjection kl_projection_normal(const Eigen::VectorXd& samples_from_p0) {
    const auto m = static_cast<double>(samples_from_p0.size());
    if (m < 2) {
        throw std::invalid_argument("kl_projection_normal: needs at least two samples");
    }
    const double mean = samples_from_p0.mean();
    const double var = (samples_from_p0.array() - mean).square().sum() / m;
    KlProjection result;
    result.theta_star = Eigen::Vector2d(mean, var);
    result.objective = -0.5 * (1.8378770664093454835606594728112353 + std::log(var) + 1.0);
    result.objective_trace = {result.objective};
    return result;
}

}  // namespace mfvi
