#ifndef EXBOUND_TRIDIAGONAL_HPP
#define EXBOUND_TRIDIAGONAL_HPP

#include <vector>

namespace exbound {

/// Linear system for the interior unknowns of the implicit diffusion step.
/// For an (n+1)-node grid the unknowns are pi_1..pi_{n-1}; the Dirichlet
/// values are folded into rhs by the assembler.
struct TridiagonalSystem {
    std::vector<double> lower;  ///< sub-diagonal, lower[0] unused by row 0
    std::vector<double> diag;
    std::vector<double> upper;  ///< super-diagonal, upper[last] unused by the last row
    std::vector<double> rhs;
};

/// Thomas elimination without pivoting. Throws NotDiagonallyDominant when a
/// pivot falls below 1e-14 of its row scale.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys);

} // namespace exbound

#endif
