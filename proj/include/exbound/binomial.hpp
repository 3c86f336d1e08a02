#ifndef EXBOUND_BINOMIAL_HPP
#define EXBOUND_BINOMIAL_HPP

#include "exbound/market.hpp"

namespace exbound {

/// Cox-Ross-Rubinstein lattice oracle for the constant-volatility American
/// call. Shares no code with the PDE scheme; used to validate it.
struct BinomialSpec {
    int steps = 5000;  ///< tree depth over [t, T]; >= 100 for validation use
    MarketParams params;
    double sigma = 0.2;

    void validate() const {
        params.validate();
        if (steps < 1) throw InvalidParams("lattice needs at least one step");
        if (!(sigma > 0.0)) throw InvalidParams("lattice volatility must be positive");
    }
};

/// American call price at asset level s0 and calendar time t in [0, T).
/// CRR parameterization u = e^{sigma sqrt(dt)} with dividend-adjusted drift
/// e^{(r-q) dt}; early exercise checked at every node. Throws
/// InvalidProbability if the up-probability leaves [0, 1].
double binomial_price(const BinomialSpec& spec, double s0, double t);

/// Early exercise boundary S_f(t): the smallest asset level at which the
/// lattice price equals intrinsic value, located on the lattice-level grid
/// E u^j and refined by bisection between the bracketing levels. Throws
/// NoExerciseRegion when no level below the search cap exercises.
double binomial_boundary(const BinomialSpec& spec, double t);

} // namespace exbound

#endif
