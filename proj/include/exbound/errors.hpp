#ifndef EXBOUND_ERRORS_HPP
#define EXBOUND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace exbound {

/// Invalid market or grid parameters (rejected at construction time).
struct InvalidParams : std::invalid_argument {
    explicit InvalidParams(const std::string& msg) : std::invalid_argument(msg) {}
};

/// The ODE right-hand side denominator 2*sqrt(x*psi) - x is numerically zero.
struct SingularDenominator : std::domain_error {
    explicit SingularDenominator(const std::string& msg) : std::domain_error(msg) {}
};

/// Adaptive step control could not meet tolerance while building the psi table.
struct IntegrationFailure : std::runtime_error {
    explicit IntegrationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// Query point outside the domain of a reconstruction or lookup.
struct OutOfRange : std::out_of_range {
    explicit OutOfRange(const std::string& msg) : std::out_of_range(msg) {}
};

/// The boundary update produced a non-finite or non-positive position.
struct NonpositiveRho : std::runtime_error {
    explicit NonpositiveRho(const std::string& msg) : std::runtime_error(msg) {}
};

/// A pivot collapsed during the tridiagonal elimination.
struct NotDiagonallyDominant : std::runtime_error {
    explicit NotDiagonallyDominant(const std::string& msg) : std::runtime_error(msg) {}
};

/// Micro-iterations exhausted the budget without reaching tolerance
/// (thrown only under the abort policy).
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

/// Risk-neutral up-probability left [0,1]; the lattice step is too coarse.
struct InvalidProbability : std::runtime_error {
    explicit InvalidProbability(const std::string& msg) : std::runtime_error(msg) {}
};

/// No lattice node exercises early; boundary extraction is impossible.
struct NoExerciseRegion : std::runtime_error {
    explicit NoExerciseRegion(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace exbound

#endif
