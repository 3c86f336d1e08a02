#include "exbound/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "exbound/errors.hpp"

namespace exbound {

double binomial_price(const BinomialSpec& spec, double s0, double t) {
    spec.validate();
    if (!(s0 > 0.0)) throw InvalidParams("binomial_price: s0 must be positive");
    if (!(t >= 0.0) || !(t < spec.params.maturity))
        throw InvalidParams("binomial_price: t must lie in [0, T)");

    const int steps = spec.steps;
    const double dt = (spec.params.maturity - t) / steps;
    const double up = std::exp(spec.sigma * std::sqrt(dt));
    const double down = 1.0 / up;
    const double growth = std::exp((spec.params.rate - spec.params.dividend) * dt);
    const double discount = std::exp(-spec.params.rate * dt);
    const double p_up = (growth - down) / (up - down);
    if (p_up < 0.0 || p_up > 1.0)
        throw InvalidProbability("up-probability " + std::to_string(p_up) +
                                 " outside [0,1]; increase the step count");
    const double p_down = 1.0 - p_up;
    const double strike = spec.params.strike;

    // terminal layer, then backward induction with the exercise check
    std::vector<double> value(static_cast<std::size_t>(steps) + 1);
    std::vector<double> asset(static_cast<std::size_t>(steps) + 1);
    asset[0] = s0 * std::pow(down, steps);
    const double up2 = up * up;
    for (int i = 1; i <= steps; ++i) asset[static_cast<std::size_t>(i)] = asset[i - 1] * up2;
    for (int i = 0; i <= steps; ++i)
        value[static_cast<std::size_t>(i)] = std::max(asset[i] - strike, 0.0);

    for (int layer = steps - 1; layer >= 0; --layer) {
        asset[0] = s0 * std::pow(down, layer);
        for (int i = 0; i <= layer; ++i) {
            const double cont = discount * (p_down * value[i] + p_up * value[i + 1]);
            value[static_cast<std::size_t>(i)] = std::max(cont, asset[i] - strike);
            asset[static_cast<std::size_t>(i) + 1] = asset[i] * up2;
        }
    }
    return value[0];
}

double binomial_boundary(const BinomialSpec& spec, double t) {
    spec.validate();
    const double strike = spec.params.strike;
    const double dt = (spec.params.maturity - t) / spec.steps;
    const double up = std::exp(spec.sigma * std::sqrt(dt));

    // exercise region: price collapses onto intrinsic value
    const auto exercised = [&](double s) {
        return binomial_price(spec, s, t) <= (s - strike) + 1e-12 * strike;
    };

    // locate the bracketing lattice levels strike * up^j
    const double cap = 1000.0 * strike;
    int lo = 0, hi = 8;
    while (!exercised(strike * std::pow(up, hi))) {
        lo = hi;
        hi *= 2;
        if (strike * std::pow(up, hi) > cap)
            throw NoExerciseRegion("no exercise below " + std::to_string(cap) +
                                   " at t = " + std::to_string(t));
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (exercised(strike * std::pow(up, mid)))
            hi = mid;
        else
            lo = mid;
    }

    double a = strike * std::pow(up, lo);
    double b = strike * std::pow(up, hi);
    for (int it = 0; it < 60 && (b - a) > 1e-7 * strike; ++it) {
        const double mid = 0.5 * (a + b);
        if (exercised(mid))
            b = mid;
        else
            a = mid;
    }
    return 0.5 * (a + b);
}

} // namespace exbound
