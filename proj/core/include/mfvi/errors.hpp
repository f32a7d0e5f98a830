#ifndef MFVI_ERRORS_HPP
#define MFVI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mfvi {

// Numeric failure: divergence, non-convergence of an inner optimizer,
// or an estimate that violates a structural requirement (e.g. a Monte Carlo
// information matrix that is not positive definite).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfvi

#endif
