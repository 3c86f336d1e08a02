// Acceptance suite: one line per criterion, nonzero exit if any fail.
// The full-resolution run (criterion 9) is long and only runs with --full.

#include <cmath>
#include <cstring>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exbound/binomial.hpp"
#include "exbound/scheme.hpp"
#include "outputs.hpp"

using namespace exbound;

namespace {

const MarketParams kPaper{10.0, 1.0, 0.1, 0.05};
const double kStrike = kPaper.strike;

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << "criterion " << id << " [" << (pass ? "PASS" : "FAIL") << "] " << name;
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// dense elimination oracle for criterion 7
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * x[k];
        x[i] = acc / a[i][i];
    }
    return x;
}

struct RunSummary {
    SolveResult result;
    int warn_levels = 0;
    int max_iterations = 0;
};

RunSummary run(const GridSpec& grid, const VolatilityModel& model,
               const IterationConfig& cfg = IterationConfig{}) {
    RunSummary s{solve_boundary(kPaper, grid, model, cfg), 0, 0};
    for (const auto& d : s.result.diagnostics) {
        if (!d.converged) ++s.warn_levels;
        s.max_iterations = std::max(s.max_iterations, d.iterations_used);
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    const bool full = (argc > 1 && std::strcmp(argv[1], "--full") == 0);
    const VolatilityModel const_vol = ConstantVol{0.2};
    const auto psi = std::make_shared<const PsiTable>(build_psi_table());
    const VolatilityModel bs_vol = BarlesSonerVol{0.2, 0.15, kPaper.rate, psi};

    const GridSpec desk{3.0, 200, 2000};
    const GridSpec refined{3.0, 400, 8000};
    const GridSpec fine{3.0, 800, 32000};

    std::cout << "running desk solves..." << std::endl;
    const RunSummary desk_run = run(desk, const_vol);
    const RunSummary refined_run = run(refined, const_vol);
    const RunSummary fine_run = run(fine, const_vol);
    const RunSummary bs_run = run(desk, bs_vol);

    // 1. initial boundary value rho(0) = rE/q = 20 to machine precision
    {
        const double rho0 = desk_run.result.boundary.rhos.front();
        const bool pass = std::abs(rho0 - 20.0) <= 20.0 * 1e-15;
        report(1, "initial boundary value", pass, "rho(0) = " + fmt(rho0));
    }

    // 2. binomial-oracle agreement for the constant model
    {
        std::cout << "running binomial oracle comparison..." << std::endl;
        const BinomialSpec oracle{5000, kPaper, 0.2};
        const int samples = 20;
        const int m = desk.time_steps;
        const int j_lo = m / 20;  // tau = 0.05
        double max_rel = 0.0, at_tau = 0.0;
        for (int s = 0; s < samples; ++s) {
            const int j = j_lo + static_cast<int>(std::lround(
                                     static_cast<double>(m - j_lo) * s / (samples - 1)));
            const double tau = desk_run.result.boundary.taus[static_cast<std::size_t>(j)];
            const double rho_pde = desk_run.result.boundary.rhos[static_cast<std::size_t>(j)];
            const double rho_bin = binomial_boundary(oracle, kPaper.maturity - tau);
            const double rel = std::abs(rho_pde - rho_bin) / rho_bin;
            if (rel > max_rel) { max_rel = rel; at_tau = tau; }
        }
        report(2, "oracle agreement at a=0", max_rel <= 0.02,
               "max rel err = " + fmt(max_rel) + " at tau = " + fmt(at_tau));
    }

    // 3. nonlinear dominance of the a=0.15 boundary
    {
        const auto& r0 = desk_run.result.boundary.rhos;
        const auto& r15 = bs_run.result.boundary.rhos;
        bool dominated = true;
        for (std::size_t j = static_cast<std::size_t>(desk.time_steps) / 20; j < r0.size(); ++j)
            if (r15[j] <= r0[j]) { dominated = false; break; }
        const double gap = r15.back() - r0.back();
        report(3, "nonlinear dominance (a=0.15 over a=0)",
               dominated && gap > 0.01 * kStrike,
               "dominated = " + std::string(dominated ? "yes" : "no") +
                   ", gap at tau=1 is " + fmt(gap));
    }

    // 4. micro-iteration budget at desk resolution
    {
        const bool pass = desk_run.warn_levels == 0 && desk_run.max_iterations <= 6;
        report(4, "micro-iteration budget (desk, a=0)", pass,
               "max iterations = " + std::to_string(desk_run.max_iterations) +
                   ", warn levels = " + std::to_string(desk_run.warn_levels));
    }

    // 5. pointwise-constraint equivalence under refinement
    {
        const double d1 = constraint_defect(desk_run.result.final_state, kPaper,
                                            const_vol, desk.dx());
        const double d2 = constraint_defect(refined_run.result.final_state, kPaper,
                                            const_vol, refined.dx());
        report(5, "constraint equivalence", d1 <= 0.05 && d2 < d1,
               "defect " + fmt(d1) + " at (200,2000), " + fmt(d2) + " at (400,8000)");
    }

    // 6. property suite on solver output
    {
        std::ostringstream why;
        bool pass = true;
        const double tol_d = 1e-3 * kStrike;
        for (const RunSummary* rs : {&desk_run, &bs_run}) {
            const auto& pi = rs->result.final_state.pi;
            if (pi.front() != -kStrike || pi.back() != 0.0) { pass = false; why << "dirichlet broken; "; }
            int range_bad = 0, monotone_bad = 0;
            for (std::size_t i = 0; i < pi.size(); ++i) {
                if (pi[i] < -kStrike - tol_d || pi[i] > tol_d) ++range_bad;
                if (i + 1 < pi.size() && pi[i + 1] < pi[i] - tol_d) ++monotone_bad;
            }
            if (range_bad || monotone_bad) {
                pass = false;
                why << "range/monotonicity violations " << range_bad << "/" << monotone_bad << "; ";
            }
            const auto& rhos = rs->result.boundary.rhos;
            for (std::size_t j = 1; j < rhos.size(); ++j)
                if (rhos[j] < rhos[j - 1]) { pass = false; why << "rho recedes; "; break; }
        }
        const RunSummary desk_again = run(desk, const_vol);
        if (cli::boundary_csv(desk_run.result.boundary, 1) !=
            cli::boundary_csv(desk_again.result.boundary, 1)) {
            pass = false;
            why << "boundary.csv not deterministic; ";
        }
        report(6, "property suite", pass, pass ? "dirichlet/range/monotone/determinism" : why.str());
    }

    // 7. component oracles
    {
        std::ostringstream why;
        bool pass = true;

        std::mt19937 rng(7);
        std::uniform_real_distribution<double> off(-1.0, 1.0);
        std::uniform_real_distribution<double> bump(0.1, 2.0);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 3 + rng() % 498;
            TridiagonalSystem sys;
            sys.lower.resize(n); sys.diag.resize(n); sys.upper.resize(n); sys.rhs.resize(n);
            std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                sys.lower[i] = (i == 0) ? 0.0 : off(rng);
                sys.upper[i] = (i + 1 == n) ? 0.0 : off(rng);
                sys.diag[i] = std::abs(sys.lower[i]) + std::abs(sys.upper[i]) + bump(rng);
                sys.rhs[i] = 10.0 * off(rng);
                dense[i][i] = sys.diag[i];
                if (i > 0) dense[i][i - 1] = sys.lower[i];
                if (i + 1 < n) dense[i][i + 1] = sys.upper[i];
            }
            const auto got = solve_tridiagonal(sys);
            const auto want = dense_solve(dense, sys.rhs);
            for (std::size_t i = 0; i < n; ++i) {
                const double denom = std::max(std::abs(want[i]), 1e-30);
                if (std::abs(got[i] - want[i]) / denom > 1e-12) {
                    pass = false;
                    why << "tridiagonal mismatch (n=" << n << "); ";
                    trial = 100;
                    break;
                }
            }
        }

        // psi ODE residual: 1e-6 absolute or 1e-4 relative, whichever looser
        int residual_bad = 0;
        for (std::size_t i = 2; i + 1 < psi->nodes.size(); ++i) {
            const double deriv = (psi->values[i + 1] - psi->values[i - 1]) /
                                 (psi->nodes[i + 1] - psi->nodes[i - 1]);
            const double rhs = psi_ode_rhs(psi->nodes[i], psi->values[i]);
            const double err = std::abs(deriv - rhs);
            if (err > 1e-6 && err > 1e-4 * std::abs(rhs)) ++residual_bad;
        }
        if (residual_bad) { pass = false; why << residual_bad << " ODE-residual nodes; "; }

        // small-x asymptotic check on [1e-8, 1e-5]
        const double coeff = std::pow(1.5, 2.0 / 3.0);
        double worst_dev = 0.0, worst_x = 0.0;
        for (std::size_t i = 1; i < psi->nodes.size() && psi->nodes[i] <= 1e-5; ++i) {
            const double dev = std::abs(psi->values[i] / std::cbrt(psi->nodes[i]) - coeff);
            if (dev > worst_dev) { worst_dev = dev; worst_x = psi->nodes[i]; }
        }
        if (worst_dev > 1e-2) {
            pass = false;
            why << "asymptotic deviation " << fmt(worst_dev) << " at x = " << fmt(worst_x)
                << " (the exact solution carries a second-order term 0.8 sqrt(c) x^(2/3), "
                   "so the ratio leaves the 1e-2 band above x ~ 1.3e-6); ";
        }

        // quadrature exactness for a linear profile with constant sigma
        std::vector<double> lin(4);
        for (int i = 0; i <= 3; ++i) lin[static_cast<std::size_t>(i)] = -10.0 + 10.0 * i / 3.0;
        const double i0 = quad_pi(lin, 1.0);
        const double i1 = quad_constraint(lin, 20.0, 0.0, const_vol, kPaper, 1.0);
        if (std::abs(i0 - (-15.0)) > 1e-12 || std::abs(i1 - (-1.7)) > 1e-12) {
            pass = false;
            why << "quadrature not exact on linear profiles (I0 = " << fmt(i0)
                << ", I1 = " << fmt(i1) << "); ";
        }

        report(7, "component oracles", pass,
               pass ? "tridiagonal/psi/quadrature" : why.str());
    }

    // 8. grid convergence of the terminal boundary value
    {
        const double rho_a = desk_run.result.boundary.rhos.back();
        const double rho_b = refined_run.result.boundary.rhos.back();
        const double rho_c = fine_run.result.boundary.rhos.back();
        const double d1 = std::abs(rho_a - rho_b);
        const double d2 = std::abs(rho_b - rho_c);
        report(8, "grid convergence", d1 > d2,
               "|" + fmt(rho_a) + " - " + fmt(rho_b) + "| = " + fmt(d1) + " > |" +
                   fmt(rho_b) + " - " + fmt(rho_c) + "| = " + fmt(d2));
    }

    // 9. full paper-resolution smoke test (optional)
    if (!full) {
        std::cout << "criterion 9 [SKIP] full paper-resolution run -- pass --full to enable"
                  << std::endl;
    } else {
        std::cout << "running paper-resolution solves (several minutes)..." << std::endl;
        const GridSpec paper_grid{3.0, 750, 225000};
        try {
            const RunSummary paper15 = run(paper_grid, bs_vol);
            const RunSummary paper0 = run(paper_grid, const_vol);
            const auto& r15 = paper15.result.boundary.rhos;
            const auto& r0 = paper0.result.boundary.rhos;
            bool dominated = true;
            for (std::size_t j = static_cast<std::size_t>(paper_grid.time_steps) / 20;
                 j < r15.size(); ++j)
                if (r15[j] <= r0[j]) { dominated = false; break; }
            const double gap = r15.back() - r0.back();
            const bool budget = paper15.warn_levels == 0 && paper15.max_iterations <= 6;
            std::ostringstream detail;
            detail << "dominated = " << (dominated ? "yes" : "no") << ", rho_bs(1) = "
                   << fmt(r15.back()) << ", rho_const(1) = " << fmt(r0.back())
                   << ", gap = " << fmt(gap) << ", warn levels = "
                   << paper15.warn_levels << "/" << paper_grid.time_steps;
            report(9, "paper-resolution smoke test",
                   dominated && gap > 0.01 * kStrike && budget, detail.str());
        } catch (const std::exception& e) {
            report(9, "paper-resolution smoke test", false,
                   std::string("exception: ") + e.what());
        }
    }

    std::cout << (g_failures == 0 ? "all criteria passed" : "criteria failed: ")
              << (g_failures == 0 ? "" : std::to_string(g_failures)) << std::endl;
    return g_failures == 0 ? 0 : 1;
}
