#ifndef EXBOUND_MARKET_HPP
#define EXBOUND_MARKET_HPP

#include "exbound/errors.hpp"

namespace exbound {

/// Contract and market constants for an American call under continuous
/// dividend yield. The solver requires 0 < q <= r: with q = 0 the call is
/// never exercised early and the initial boundary position r*E/q is
/// undefined.
struct MarketParams {
    double strike;    ///< exercise price E (currency units)
    double maturity;  ///< T (years)
    double rate;      ///< riskless rate r (per year)
    double dividend;  ///< dividend yield q (per year)

    void validate() const {
        if (!(strike > 0.0)) throw InvalidParams("strike must be positive");
        if (!(maturity > 0.0)) throw InvalidParams("maturity must be positive");
        if (!(rate > 0.0)) throw InvalidParams("rate must be positive");
        if (!(dividend > 0.0))
            throw InvalidParams("dividend yield must be positive (q = 0 never exercises early)");
        if (dividend > rate)
            throw InvalidParams("structural assumption 0 < q <= r violated");
    }
};

/// Uniform space-time grid for the transformed problem on [0, L] x [0, T].
struct GridSpec {
    double domain_length = 3.0;  ///< truncation L of the log-moneyness axis
    int space_steps = 200;       ///< n, spatial intervals (h = L/n)
    int time_steps = 2000;       ///< m, time levels (k = T/m)

    double dx() const { return domain_length / space_steps; }
    double dt(double maturity) const { return maturity / time_steps; }

    void validate() const {
        if (!(domain_length > 0.0)) throw InvalidParams("domain length must be positive");
        if (space_steps < 2) throw InvalidParams("need at least 2 spatial intervals");
        if (time_steps < 1) throw InvalidParams("need at least 1 time step");
    }
};

} // namespace exbound

#endif
