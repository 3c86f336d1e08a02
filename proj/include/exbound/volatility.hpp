#ifndef EXBOUND_VOLATILITY_HPP
#define EXBOUND_VOLATILITY_HPP

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace exbound {

/// Tabulated solution of the Barles-Soner correction ODE
///
///     psi'(x) = (psi(x) + 1) / (2 sqrt(x psi(x)) - x),   psi(0) = 0,
///
/// on [0, x_max]. Nodes are logarithmically spaced (after the exact leading
/// node at 0) to resolve the x^(1/3) behaviour near the origin. Immutable
/// after construction and safe to share across concurrent solver runs.
struct PsiTable {
    std::vector<double> nodes;   ///< strictly increasing arguments, nodes[0] = 0
    std::vector<double> values;  ///< psi at the nodes, values[0] = 0
    double x_max = 0.0;          ///< largest tabulated argument
    double linear_slope = 0.0;   ///< final secant slope, used beyond x_max
};

/// psi'(x) for x, psi > 0. Throws SingularDenominator when
/// |2 sqrt(x psi) - x| falls below 1e-12; callers must switch to the
/// asymptotic series there.
double psi_ode_rhs(double x, double psi);

/// Integrates the correction ODE from the asymptotic seed
/// psi(seed_x) = (3/2)^(2/3) seed_x^(1/3) up to x_max with an adaptive
/// embedded Runge-Kutta pair, then prepends the exact node (0, 0).
/// Throws IntegrationFailure if step control stalls.
PsiTable build_psi_table(double x_max = 1e4, int node_count = 4000,
                         double seed_x = 1e-8);

/// Total evaluation: piecewise-linear on the table, linear extrapolation
/// with linear_slope beyond x_max, 0 for negative arguments.
double psi_eval(const PsiTable& table, double x);

/// Constant volatility: sigma_sq is sigma_hat^2 regardless of arguments.
struct ConstantVol {
    double sigma_hat;
};

/// Barles-Soner nonlinear volatility
///   sigma^2 = sigma_hat^2 (1 + psi(a^2 e^{r tau} Gamma)),
/// where Gamma = S^2 d^2V/dS^2 equals the x-derivative of the transformed
/// profile. a = 0 reduces to the constant model.
struct BarlesSonerVol {
    double sigma_hat;
    double risk_aversion;  ///< a >= 0, transaction-cost/risk-aversion scale
    double rate;           ///< r, enters the argument through e^{r tau}
    std::shared_ptr<const PsiTable> psi;
};

using VolatilityModel = std::variant<ConstantVol, BarlesSonerVol>;

/// sigma^2(Gamma, S, tau) for the given model. Negative Gamma arguments to
/// psi are clamped to zero; when `negative_gamma_clamps` is non-null each
/// clamping is counted there (convex prices have Gamma >= 0, so clamps can
/// only come from discretization noise).
double sigma_sq(const VolatilityModel& model, double gamma, double s, double tau,
                std::int64_t* negative_gamma_clamps = nullptr);

} // namespace exbound

#endif
