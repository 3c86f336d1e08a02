#include "exbound/tridiagonal.hpp"

#include <cmath>
#include <string>

#include "exbound/errors.hpp"

namespace exbound {

std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    const std::size_t n = sys.diag.size();
    if (n == 0) return {};
    if (sys.lower.size() != n || sys.upper.size() != n || sys.rhs.size() != n)
        throw InvalidParams("solve_tridiagonal: inconsistent band lengths");

    std::vector<double> c_star(n), d_star(n);
    const auto check_pivot = [](double pivot, double scale, std::size_t row) {
        if (std::abs(pivot) < 1e-14 * scale)
            throw NotDiagonallyDominant("pivot collapsed at row " + std::to_string(row));
    };

    double scale0 = std::abs(sys.diag[0]) + std::abs(sys.upper[0]);
    check_pivot(sys.diag[0], scale0, 0);
    c_star[0] = sys.upper[0] / sys.diag[0];
    d_star[0] = sys.rhs[0] / sys.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double pivot = sys.diag[i] - sys.lower[i] * c_star[i - 1];
        const double scale =
            std::abs(sys.diag[i]) + std::abs(sys.lower[i]) + std::abs(sys.upper[i]);
        check_pivot(pivot, scale, i);
        c_star[i] = sys.upper[i] / pivot;
        d_star[i] = (sys.rhs[i] - sys.lower[i] * d_star[i - 1]) / pivot;
    }

    std::vector<double> x(n);
    x[n - 1] = d_star[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d_star[i] - c_star[i] * x[i + 1];
    return x;
}

} // namespace exbound
