#ifndef EXBOUND_MODEL_HPP
#define EXBOUND_MODEL_HPP

#include <vector>

#include "exbound/market.hpp"

namespace exbound {

/// One time level of the fixed-domain problem: the transformed profile
/// pi_i = V - S dV/dS at nodes x_i = i*h, the free boundary position rho,
/// and the transformed time tau = T - t. The left Dirichlet value is
/// pi[0] = -E, the truncated far-field value pi[n] = 0.
struct TransformedState {
    std::vector<double> pi;
    double rho = 0.0;
    double tau = 0.0;
    double dx = 0.0;  ///< grid spacing h of the node coordinates x_i = i*h
};

/// The early exercise boundary rho(tau_j) = S_f(T - tau_j) over all levels.
struct BoundaryCurve {
    std::vector<double> taus;
    std::vector<double> rhos;
};

/// State at tau = 0: rho = r*E/q and pi = -E where x < ln(r/q), 0 elsewhere,
/// with the Dirichlet values enforced at both ends. Throws InvalidParams
/// unless 0 < q <= r.
TransformedState initial_state(const MarketParams& params, const GridSpec& grid);

/// Inverse of the log-moneyness map: S = rho * e^{-x}.
double x_to_s(double x, double rho);

/// Recovers the option price V(s) from a transformed profile by the
/// quadrature identity
///     V(s)/s = (rho - E)/rho + (1/rho) * integral_0^{x_s} pi(x) e^x dx,
/// x_s = ln(rho/s), using the composite trapezoid rule on the grid with a
/// linearly interpolated partial cell at x_s. Valid for 0 < s <= rho; above
/// rho the option is exercised and the caller should use s - E.
double price_from_pi(const TransformedState& state, const MarketParams& params,
                     double s);

} // namespace exbound

#endif
