#include "mfvi/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfvi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
constexpr double kSqrt2 = 1.4142135623730950488016887242096981;

// Series 1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 from the normal tail
// expansion Phi(x) ~ phi(x)/(-x) * series, valid for x << 0.
double tail_series(double x) {
    const double ix2 = 1.0 / (x * x);
    return 1.0 + ix2 * (-1.0 + ix2 * (3.0 + ix2 * (-15.0 + ix2 * 105.0)));
}

}  // namespace

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("log_sum_exp: empty input");
    }
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) {
        return m;  // all -inf stays -inf; +inf or nan propagates
    }
    double acc = 0.0;
    for (double v : values) {
        acc += std::exp(v - m);
    }
    return m + std::log(acc);
}

double log_sum_exp(const std::vector<double>& values) {
    return log_sum_exp(std::span<const double>(values));
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x - 0.5 * kLog2Pi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double log_normal_cdf(double x) {
    if (x >= -35.0) {
        return std::log(normal_cdf(x));
    }
    // log[phi(x)/(-x) * series]
    return -0.5 * x * x - 0.5 * kLog2Pi - std::log(-x) + std::log(tail_series(x));
}

double normal_hazard(double x) {
    if (x >= -35.0) {
        return normal_pdf(x) / normal_cdf(x);
    }
    return -x / tail_series(x);
}

double truncated_normal_mean(double location, TruncationSide side) {
    if (side == TruncationSide::negative) {
        return -truncated_normal_mean(-location, TruncationSide::positive);
    }
    const double x = location;
    if (x >= -35.0) {
        return x + normal_hazard(x);
    }
    // x + (-x)/series = x*(series-1)/series, evaluated without cancellation.
    const double s = tail_series(x);
    return x * (s - 1.0) / s;
}

double truncated_normal_var(double location, TruncationSide side) {
    const double x = (side == TruncationSide::positive) ? location : -location;
    if (x >= -35.0) {
        const double h = normal_hazard(x);
        return 1.0 - h * (h + x);
    }
    // Deep tail: the truncated normal approaches Exp(-x); use the mean-based
    // identity Var = 1 - m*(m - x) with m the stable truncated mean.
    const double m = truncated_normal_mean(x, TruncationSide::positive);
    const double v = 1.0 - m * (m - x);
    return std::max(v, 1e-300);
}

double truncated_normal_second_moment(double location, TruncationSide side) {
    const double m = truncated_normal_mean(location, side);
    return truncated_normal_var(location, side) + m * m;
}

double digamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("digamma: requires x > 0");
    }
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // Asymptotic series at large x.
    const double ix = 1.0 / x;
    const double ix2 = ix * ix;
    result += std::log(x) - 0.5 * ix -
              ix2 * (1.0 / 12.0 - ix2 * (1.0 / 120.0 - ix2 * (1.0 / 252.0 - ix2 * (1.0 / 240.0 - ix2 / 132.0))));
    return result;
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace mfvi
