#include "mfvi/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "mfvi/rng.hpp"
#include "mfvi/special.hpp"

namespace mfvi {

Eigen::VectorXd generate_normal_data(const NormalDesign& design, std::uint64_t seed) {
    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(design.mu, design.sigma);
    Eigen::VectorXd data(design.n);
    for (int i = 0; i < design.n; ++i) {
        data[i] = gauss(engine);
    }
    return data;
}

Eigen::VectorXd gmm_centers(double delta, int components) {
    Eigen::VectorXd centers(components);
    for (int k = 0; k < components; ++k) {
        centers[k] = delta * (k + 1 - 0.5 * (components + 1));
    }
    return centers;
}

Eigen::VectorXd generate_gmm_data(const GmmDesign& design, std::uint64_t seed) {
    const Eigen::VectorXd centers = gmm_centers(design.delta, design.components);
    auto engine = make_engine(seed);
    std::uniform_int_distribution<int> pick(0, design.components - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd data(design.n);
    for (int i = 0; i < design.n; ++i) {
        data[i] = centers[pick(engine)] + gauss(engine);
    }
    return data;
}

Eigen::MatrixXd probit_sigma_ar1(int p, double r) {
    if (r < 0.0 || r >= 1.0) {
        throw std::invalid_argument("probit_sigma_ar1: r must be in [0, 1)");
    }
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            sigma(i, j) = std::pow(r, std::abs(i - j));
        }
    }
    return sigma;
}

Eigen::MatrixXd probit_sigma_equicorrelated(int p, double rho) {
    return Eigen::MatrixXd::Constant(p, p, rho) +
           (1.0 - rho) * Eigen::MatrixXd::Identity(p, p);
}

Eigen::VectorXd probit_beta_decay(int p, double q, int nonzero) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < std::min(p, nonzero); ++j) {
        beta[j] = std::pow(q, j);
    }
    return beta;
}

ProbitData generate_probit_data(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& beta, int n,
                                std::uint64_t seed) {
    const int p = static_cast<int>(sigma.rows());
    const Eigen::MatrixXd chol = sigma.llt().matrixL();
    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    ProbitData data;
    data.design.resize(n, p);
    data.responses.resize(n);
    Eigen::VectorXd z(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
            z[j] = gauss(engine);
        }
        data.design.row(i) = (chol * z).transpose();
        const double p1 = normal_cdf(data.design.row(i).dot(beta));
        data.responses[i] = unif(engine) < p1 ? 1 : 0;
    }
    return data;
}

ProbitData generate_probit_data(const ProbitDesign& design, std::uint64_t seed) {
    return generate_probit_data(probit_sigma_ar1(design.p, design.correlation),
                                probit_beta_decay(design.p, design.decay, design.nonzero),
                                design.n, seed);
}

SbmSample generate_sbm_data(const SbmDesign& design, std::uint64_t seed) {
    const int n = design.n;
    const int k_count = design.communities;
    auto engine = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SbmSample sample;
    sample.connectivity.resize(k_count, k_count);
    for (int a = 0; a < k_count; ++a) {
        sample.connectivity(a, a) = design.within;
        for (int b = a + 1; b < k_count; ++b) {
            sample.connectivity(a, b) = sample.connectivity(b, a) =
                design.between_max * unif(engine);
        }
    }
    // Equal-size communities (remainder spread over the first ones).
    sample.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        sample.labels[i] = i % k_count;
    }
    sample.adjacency = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p_edge = sample.connectivity(sample.labels[i], sample.labels[j]);
            if (unif(engine) < p_edge) {
                sample.adjacency(i, j) = sample.adjacency(j, i) = 1;
            }
        }
    }
    return sample;
}

}  // namespace mfvi
