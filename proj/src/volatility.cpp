#include "exbound/volatility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exbound/errors.hpp"

namespace exbound {

namespace {

constexpr double kSingularThreshold = 1e-12;
// Leading asymptotic coefficient: substituting c x^(1/3) into the ODE and
// matching orders as x -> 0 gives c^(3/2) = 3/2.
const double kSeedCoeff = std::pow(1.5, 2.0 / 3.0);

} // namespace

double psi_ode_rhs(double x, double psi) {
    const double denom = 2.0 * std::sqrt(x * psi) - x;
    if (std::abs(denom) < kSingularThreshold)
        throw SingularDenominator("psi ODE denominator vanished at x = " + std::to_string(x));
    return (psi + 1.0) / denom;
}

namespace {

// d psi / du with u = ln x. The substitution turns the x^(1/3) branch into a
// smooth exponential in u, so a fixed relative tolerance works from the seed
// up to x_max without the step size collapsing near the origin.
double psi_rhs_log(double u, double psi) {
    const double x = std::exp(u);
    return x * psi_ode_rhs(x, psi);
}

// One Cash-Karp 4(5) step; returns {y5, error_estimate}.
std::pair<double, double> cash_karp_step(double u, double y, double du) {
    const double k1 = psi_rhs_log(u, y);
    const double k2 = psi_rhs_log(u + du / 5.0, y + du * (k1 / 5.0));
    const double k3 = psi_rhs_log(u + 0.3 * du, y + du * (3.0 * k1 + 9.0 * k2) / 40.0);
    const double k4 = psi_rhs_log(u + 0.6 * du,
                                  y + du * (0.3 * k1 - 0.9 * k2 + 1.2 * k3));
    const double k5 = psi_rhs_log(u + du,
                                  y + du * (-11.0 / 54.0 * k1 + 2.5 * k2 -
                                            70.0 / 27.0 * k3 + 35.0 / 27.0 * k4));
    const double k6 = psi_rhs_log(
        u + 0.875 * du,
        y + du * (1631.0 / 55296.0 * k1 + 175.0 / 512.0 * k2 + 575.0 / 13824.0 * k3 +
                  44275.0 / 110592.0 * k4 + 253.0 / 4096.0 * k5));

    const double y5 = y + du * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 +
                                125.0 / 594.0 * k4 + 512.0 / 1771.0 * k6);
    const double y4 = y + du * (2825.0 / 27648.0 * k1 + 18575.0 / 48384.0 * k3 +
                                13525.0 / 55296.0 * k4 + 277.0 / 14336.0 * k5 +
                                0.25 * k6);
    return {y5, std::abs(y5 - y4)};
}

// Integrate psi from (u0, y0) to u1 with adaptive step control.
double integrate_to(double u0, double y0, double u1) {
    constexpr double rtol = 1e-10;
    constexpr double atol = 1e-14;
    constexpr int max_steps = 100000;

    double u = u0, y = y0;
    double du = (u1 - u0) * 0.1;
    for (int step = 0; step < max_steps && u < u1; ++step) {
        du = std::min(du, u1 - u);
        auto [y_new, err] = cash_karp_step(u, y, du);
        const double scale = atol + rtol * std::max(std::abs(y), std::abs(y_new));
        if (err <= scale) {
            u += du;
            y = y_new;
            du *= std::min(5.0, 0.9 * std::pow(scale / std::max(err, 1e-300), 0.2));
        } else {
            du *= std::max(0.1, 0.9 * std::pow(scale / err, 0.25));
            if (du < 1e-14 * std::abs(u1 - u0))
                throw IntegrationFailure("psi ODE step size collapsed at x = " +
                                         std::to_string(std::exp(u)));
        }
    }
    if (u < u1) throw IntegrationFailure("psi ODE integration exceeded the step budget");
    return y;
}

} // namespace

PsiTable build_psi_table(double x_max, int node_count, double seed_x) {
    if (!(x_max > 0.0) || !(seed_x > 0.0) || !(seed_x < x_max) || node_count < 2)
        throw InvalidParams("build_psi_table: need 0 < seed_x < x_max and node_count >= 2");

    PsiTable table;
    table.nodes.reserve(static_cast<std::size_t>(node_count) + 1);
    table.values.reserve(static_cast<std::size_t>(node_count) + 1);
    table.nodes.push_back(0.0);
    table.values.push_back(0.0);

    const double u0 = std::log(seed_x);
    const double u1 = std::log(x_max);
    const double du_out = (u1 - u0) / (node_count - 1);

    double u = u0;
    double psi = kSeedCoeff * std::cbrt(seed_x);
    table.nodes.push_back(seed_x);
    table.values.push_back(psi);
    for (int i = 1; i < node_count; ++i) {
        const double u_next = u0 + i * du_out;
        psi = integrate_to(u, psi, u_next);
        u = u_next;
        table.nodes.push_back(std::exp(u));
        table.values.push_back(psi);
    }

    table.x_max = table.nodes.back();
    const std::size_t last = table.nodes.size() - 1;
    table.linear_slope = (table.values[last] - table.values[last - 1]) /
                         (table.nodes[last] - table.nodes[last - 1]);
    return table;
}

double psi_eval(const PsiTable& table, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= table.x_max)
        return table.values.back() + table.linear_slope * (x - table.x_max);
    const auto it = std::upper_bound(table.nodes.begin(), table.nodes.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - table.nodes.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - table.nodes[lo]) / (table.nodes[hi] - table.nodes[lo]);
    return table.values[lo] + w * (table.values[hi] - table.values[lo]);
}

double sigma_sq(const VolatilityModel& model, double gamma, double s, double tau,
                std::int64_t* negative_gamma_clamps) {
    (void)s;
    if (const auto* cv = std::get_if<ConstantVol>(&model))
        return cv->sigma_hat * cv->sigma_hat;

    const auto& bs = std::get<BarlesSonerVol>(model);
    const double base = bs.sigma_hat * bs.sigma_hat;
    if (bs.risk_aversion == 0.0) return base;
    const double arg = bs.risk_aversion * bs.risk_aversion * std::exp(bs.rate * tau) * gamma;
    if (arg < 0.0 && negative_gamma_clamps) ++*negative_gamma_clamps;
    return base * (1.0 + psi_eval(*bs.psi, arg));
}

} // namespace exbound
