#ifndef MFVI_SYNTHETIC_HPP
#define MFVI_SYNTHETIC_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "mfvi/data.hpp"

namespace mfvi {

// ---- location-scale normal -------------------------------------------------

struct NormalDesign {
    double mu = 100.0;
    double sigma = 100.0;
    int n = 10;
};

Eigen::VectorXd generate_normal_data(const NormalDesign& design, std::uint64_t seed);

// ---- Gaussian mixture -------------------------------------------------------

struct GmmDesign {
    double delta = 5.0;  // cluster separation
    int components = 3;
    int n = 100;
};

// Centers delta * (k - (K+1)/2), the centered unit-spaced grid; K = 3 gives
// delta * (-1, 0, 1).
Eigen::VectorXd gmm_centers(double delta, int components);
Eigen::VectorXd generate_gmm_data(const GmmDesign& design, std::uint64_t seed);

// ---- probit regression ------------------------------------------------------

struct ProbitDesign {
    int n = 1000;
    int p = 10;
    double correlation = 0.8;  // AR(1) parameter r in sigma_ij = r^|i-j|
    double decay = 0.8;        // q in beta_j = q^(j-1) 1(j <= nonzero)
    int nonzero = 5;
};

Eigen::MatrixXd probit_sigma_ar1(int p, double r);
// sigma_ij = rho + (1 - rho) 1(i = j): all off-diagonal correlations equal rho.
Eigen::MatrixXd probit_sigma_equicorrelated(int p, double rho);
Eigen::VectorXd probit_beta_decay(int p, double q, int nonzero);

// Features x ~ N(0, sigma), responses y ~ Ber(Phi(x^T beta)).
ProbitData generate_probit_data(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& beta, int n,
                                std::uint64_t seed);
ProbitData generate_probit_data(const ProbitDesign& design, std::uint64_t seed);

// ---- stochastic block model -------------------------------------------------

struct SbmDesign {
    int n = 100;
    int communities = 5;
    double within = 0.6;        // B_aa
    double between_max = 0.4;   // B_ab ~ Unif(0, between_max), a != b
};

struct SbmSample {
    Eigen::MatrixXi adjacency;
    Eigen::VectorXi labels;        // planted communities, sizes as equal as possible
    Eigen::MatrixXd connectivity;  // realized B
};

SbmSample generate_sbm_data(const SbmDesign& design, std::uint64_t seed);

}  // namespace mfvi

#endif
