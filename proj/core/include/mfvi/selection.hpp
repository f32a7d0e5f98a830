#ifndef MFVI_SELECTION_HPP
#define MFVI_SELECTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "mfvi/cavi.hpp"
#include "mfvi/fisher.hpp"

namespace mfvi {

enum class Criterion { elbo, bic, aic, penalized_elbo, extended_bic, evidence };

std::string criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

struct EvidenceValue {
    double estimate = 0.0;
    double stderr_log = 0.0;
};

struct CriterionValue {
    std::string model_id;
    double elbo = 0.0;
    double bic = 0.0;
    double aic = 0.0;
    std::optional<double> penalized_elbo;
    std::optional<double> extended_bic;
    std::optional<EvidenceValue> mc_evidence;
    int d_m = 1;   // parameter count
    long n = 0;    // sample count
};

// Per-candidate criterion values plus the selected candidate per criterion.
struct SelectionReport {
    std::vector<CriterionValue> candidates;
    std::vector<std::pair<Criterion, std::string>> selected;
};

// BIC(M) = -2 loglik_max + d_M log n.
double bic(double loglik_max, int d_m, long n);

// AIC(M) = -2 loglik_max + 2 d_M.
double aic(double loglik_max, int d_m);

struct PenalizedCriteria {
    double penalized_elbo;  // ELBO + log pi(M)
    double extended_bic;    // BIC - 2 log pi(M)
};
PenalizedCriteria penalized_criteria(double elbo, double bic, double log_model_prior);

// ELBO(M0) - ELBO(M1), the log-Bayes-factor surrogate.
double elbo_factor(double elbo0, double elbo1);

// argmax for ELBO-like criteria and evidence, argmin for the BIC/AIC family.
// Ties break toward smaller d_M, then the smaller model_id.
std::string select(const std::vector<CriterionValue>& values, Criterion criterion);

// Limiting gap constants between evidence, ELBO and -BIC/2:
//   c_star      = 1/2 log det(diag(V_c)) / det(V)
//   c_bic_star  = -1/2 log det(V) + (d/2) log(2 pi) + log prior(theta*)
//   c_tilde_star = c_star - c_bic_star
//   c_block_star (given a partition): 1/2 log det(blockdiag(V_c)) / det(V)
//   c_nolatent_star (when V_s = 0): 1/2 log det(diag(V)) / det(V)
struct GapConstants {
    double c_star = 0.0;
    double c_bic_star = 0.0;
    double c_tilde_star = 0.0;
    std::optional<double> c_block_star;
    std::optional<double> c_nolatent_star;
};
GapConstants gap_constants(const FisherBundle& bundle,
                           const std::optional<std::vector<int>>& block_sizes = std::nullopt);

// Extremes of the scheme's generalized Rayleigh quotient against V, plus the
// implied contraction factor alpha. The guarantee uses the minimum for
// sequential schemes and the maximum for parallel ones; both extremes are
// reported so the choice is auditable.
struct ContractionReport {
    ScheduleKind scheme = ScheduleKind::sequential_randomized;
    double gamma = 1.0;
    double alpha = 0.0;
    double rayleigh_min = 0.0;
    double rayleigh_max = 0.0;
    bool latent = false;
};
ContractionReport contraction_rates(const FisherBundle& bundle, double gamma, ScheduleKind scheme,
                                    bool latent, int d = 0);

}  // namespace mfvi

#endif
