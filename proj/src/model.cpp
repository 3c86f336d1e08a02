#include "exbound/model.hpp"

#include <cmath>
#include <string>

#include "exbound/errors.hpp"

namespace exbound {

TransformedState initial_state(const MarketParams& params, const GridSpec& grid) {
    params.validate();
    grid.validate();

    const int n = grid.space_steps;
    const double h = grid.dx();
    const double kink = std::log(params.rate / params.dividend);

    TransformedState state;
    state.rho = params.rate * params.strike / params.dividend;
    state.tau = 0.0;
    state.dx = h;
    state.pi.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        state.pi[static_cast<std::size_t>(i)] = (i * h < kink) ? -params.strike : 0.0;
    state.pi.front() = -params.strike;
    state.pi.back() = 0.0;
    return state;
}

double x_to_s(double x, double rho) { return rho * std::exp(-x); }

double price_from_pi(const TransformedState& state, const MarketParams& params,
                     double s) {
    if (!(s > 0.0))
        throw OutOfRange("price_from_pi: asset level must be positive");
    if (s > state.rho)
        throw OutOfRange("price_from_pi: s = " + std::to_string(s) +
                         " lies in the exercised region above rho = " +
                         std::to_string(state.rho));

    const double rho = state.rho;
    const double h = state.dx;
    const double xs = std::log(rho / s);
    const std::size_t n = state.pi.size() - 1;

    // integral of pi(x) e^x over [0, xs]: full cells by composite trapezoid,
    // then a partial cell ending at xs with pi interpolated linearly.
    const auto integrand = [&](std::size_t i) {
        return state.pi[i] * std::exp(static_cast<double>(i) * h);
    };
    std::size_t full = std::min(static_cast<std::size_t>(xs / h), n);
    double quad = 0.0;
    for (std::size_t i = 0; i < full; ++i)
        quad += 0.5 * h * (integrand(i) + integrand(i + 1));
    const double x_full = static_cast<double>(full) * h;
    if (xs > x_full && full < n) {
        const double w = (xs - x_full) / h;
        const double pi_xs = state.pi[full] + w * (state.pi[full + 1] - state.pi[full]);
        quad += 0.5 * (xs - x_full) * (integrand(full) + pi_xs * std::exp(xs));
    }

    const double strike = params.strike;
    return s * ((rho - strike) / rho + quad / rho);
}

} // namespace exbound
