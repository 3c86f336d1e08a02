#ifndef EXBOUND_SCHEME_HPP
#define EXBOUND_SCHEME_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "exbound/market.hpp"
#include "exbound/model.hpp"
#include "exbound/tridiagonal.hpp"
#include "exbound/volatility.hpp"

namespace exbound {

enum class NonConvergencePolicy { warn_and_continue, abort };

/// Stopping control for the per-level micro-iterations.
struct IterationConfig {
    double tol = 1e-7;    ///< scaled stopping tolerance
    int p_max = 6;        ///< micro-iteration budget per time level
    NonConvergencePolicy on_nonconvergence = NonConvergencePolicy::warn_and_continue;

    void validate() const {
        if (!(tol > 0.0)) throw InvalidParams("iteration tolerance must be positive");
        if (p_max < 1) throw InvalidParams("p_max must be at least 1");
    }
};

/// Per-level record of the micro-iteration outcome.
struct StepDiagnostics {
    int iterations_used = 0;
    double final_residual = 0.0;            ///< last scaled iterate-to-iterate change
    std::int64_t gamma_clamp_count = 0;     ///< negative-gamma clampings in sigma_sq
    double rho_change = 0.0;                ///< rho_new - rho_prev over the level
    bool converged = true;
    int contraction_violations = 0;         ///< residual increases after the first iterate
};

/// Composite trapezoid rule over [0, L]; the truncated tail contributes 0.
double quad_pi(std::span<const double> pi, double h);

/// Trapezoid quadrature of the constraint integrand
///   -1/2 sigma^2(gamma_i, rho e^{-x_i}, tau) gamma_i + r pi_i,
/// with one-sided gamma_i = (pi_{i+1} - pi_i)/h and gamma_n = 0.
double quad_constraint(std::span<const double> pi, double rho, double tau,
                       const VolatilityModel& model, const MarketParams& params,
                       double h, std::int64_t* clamps = nullptr);

/// Integrated algebraic update for the boundary position: evaluates
///   rho_new = exp( ln rho_prev_level + [ quad_pi(pi_prev_level)
///             - quad_pi(pi_iter)
///             + k (qE - q rho_iter - quad_constraint(pi_iter, rho_iter)) ] / E ).
/// Throws NonpositiveRho when the result is not finite or not positive.
double boundary_update(std::span<const double> pi_prev_level,
                       std::span<const double> pi_iter,
                       double rho_prev_level, double rho_iter, double tau, double k,
                       const VolatilityModel& model, const MarketParams& params,
                       double h, std::int64_t* clamps = nullptr);

/// Explicit characteristics solve of the convective half-step. Each node
/// pulls the previous-level profile from xi_i = x_i - ln(rho_new/rho_prev)
/// - (r - q) k: the value is -E for xi <= 0 (the foot lies behind the free
/// boundary), linear interpolation of pi_prev for 0 < xi <= L, and 0 beyond.
std::vector<double> transport_step(std::span<const double> pi_prev, double rho_prev,
                                   double rho_new, double k, const GridSpec& grid,
                                   const MarketParams& params);

/// Assembles the implicit diffusion step with coefficients frozen at
/// pi_iter: sigma_i^2 = sigma^2((pi_iter[i+1]-pi_iter[i])/h, rho e^{-x_i}, tau).
/// Row i couples pi_{i-1}, pi_i, pi_{i+1} through
///   lower = sigma_i^2/(4h) - sigma_{i-1}^2/(2h^2)
///   diag  = 1/k + r + (sigma_i^2 + sigma_{i-1}^2)/(2h^2)
///   upper = -sigma_i^2/(4h) - sigma_i^2/(2h^2)
/// and rhs_i = pi_half[i]/k with the Dirichlet values moved to the rhs.
TridiagonalSystem assemble_diffusion(std::span<const double> pi_iter,
                                     std::span<const double> pi_half, double rho,
                                     double tau, double k, const VolatilityModel& model,
                                     const MarketParams& params, const GridSpec& grid,
                                     std::int64_t* clamps = nullptr);

/// Advances one time level tau -> tau_new by the operator splitting with
/// micro-iterations coupling the boundary update, transport and diffusion.
/// Throws NonConvergence under the abort policy; NonpositiveRho propagates.
std::pair<TransformedState, StepDiagnostics>
time_step(const TransformedState& state_prev, double tau_new, double k,
          const VolatilityModel& model, const MarketParams& params,
          const GridSpec& grid, const IterationConfig& cfg);

/// Optional per-level observer (used by the CLI for profile snapshots).
using LevelObserver = std::function<void(int level, const TransformedState&)>;

struct SolveResult {
    BoundaryCurve boundary;
    TransformedState final_state;
    std::vector<StepDiagnostics> diagnostics;
};

/// Marches the scheme from the initial state over all m levels.
SolveResult solve_boundary(const MarketParams& params, const GridSpec& grid,
                           const VolatilityModel& model, const IterationConfig& cfg,
                           const LevelObserver& observer = {});

/// Relative defect of the pointwise boundary constraint
///   | rho - rE/q - sigma^2(gamma_0, rho, tau) gamma_0 / (2q) | / rho,
/// gamma_0 = (pi[1] - pi[0])/h. A diagnostic of the equivalence between the
/// integrated update and the pointwise constraint; shrinks under refinement.
double constraint_defect(const TransformedState& state, const MarketParams& params,
                         const VolatilityModel& model, double h);

} // namespace exbound

#endif
