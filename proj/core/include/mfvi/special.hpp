#ifndef MFVI_SPECIAL_HPP
#define MFVI_SPECIAL_HPP

#include <span>
#include <vector>

namespace mfvi {

/// Truncation side of a one-dimensional truncated normal.
enum class TruncationSide { positive, negative };

/// log sum_i exp(v_i), computed as max + log sum exp(v_i - max).
/// Throws std::invalid_argument on empty input.
double log_sum_exp(std::span<const double> values);
double log_sum_exp(const std::vector<double>& values);

/// Standard normal pdf / cdf and log-cdf. log_normal_cdf switches to an
/// asymptotic tail expansion for x < -35 where erfc underflows.
double normal_pdf(double x);
double normal_cdf(double x);
double log_normal_cdf(double x);

/// Hazard phi(x)/Phi(x); asymptotic Mills-ratio form for x < -35.
double normal_hazard(double x);

/// Mean of N(location, 1) truncated to the given side of zero.
/// positive: location + phi(location)/Phi(location)
/// negative: location + phi(location)/(Phi(location) - 1)
double truncated_normal_mean(double location, TruncationSide side);

/// Variance of N(location, 1) truncated to the given side of zero.
double truncated_normal_var(double location, TruncationSide side);

/// Second moment E[Z^2] of the truncated normal above.
double truncated_normal_second_moment(double location, TruncationSide side);

/// Digamma: recurrence to x >= 6, then asymptotic series.
/// Throws std::domain_error for x <= 0.
double digamma(double x);

/// log Beta(a, b) via lgamma.
double log_beta(double a, double b);

}  // namespace mfvi

#endif
