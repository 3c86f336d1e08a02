#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "exbound/binomial.hpp"
#include "exbound/errors.hpp"
#include "exbound/scheme.hpp"
#include "outputs.hpp"
#include "run_config.hpp"

namespace {

using namespace exbound;
using namespace exbound::cli;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;
constexpr int kExitValidation = 5;

VolatilityModel make_model(const RunConfig& cfg) {
    if (!cfg.barles_soner) return ConstantVol{cfg.sigma_hat};
    auto table = std::make_shared<const PsiTable>(build_psi_table());
    return BarlesSonerVol{cfg.sigma_hat, cfg.risk_aversion, cfg.market.rate, table};
}

int run_solve(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const VolatilityModel model = make_model(cfg);
    const double k = cfg.grid.dt(cfg.market.maturity);

    // snap requested snapshot times to grid levels
    std::map<int, double> snap_levels;
    for (double tau : cfg.snapshot_taus) {
        const int level = static_cast<int>(std::lround(tau / k));
        snap_levels.emplace(std::min(level, cfg.grid.time_steps), tau);
    }
    std::map<int, TransformedState> snapshots;
    LevelObserver observer;
    if (!snap_levels.empty())
        observer = [&](int level, const TransformedState& state) {
            if (snap_levels.count(level)) snapshots.emplace(level, state);
        };

    const SolveResult result =
        solve_boundary(cfg.market, cfg.grid, model, cfg.iteration, observer);

    std::int64_t warn_count = 0;
    for (const auto& d : result.diagnostics)
        if (!d.converged) ++warn_count;
    if (warn_count > 0)
        std::cerr << "warning: " << warn_count << " of " << result.diagnostics.size()
                  << " levels stopped at p_max without reaching tol\n";

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::filesystem::path dir(cfg.out_dir);
    write_file_atomic((dir / "boundary.csv").string(),
                      boundary_csv(result.boundary, cfg.boundary_stride));
    write_file_atomic((dir / "diagnostics.json").string(),
                      diagnostics_json(result.diagnostics, wall, render_config(cfg)));
    for (const auto& [level, requested] : snap_levels) {
        const auto it = snapshots.find(level);
        if (it == snapshots.end()) continue;
        const double snapped = it->second.tau;
        if (std::abs(snapped - requested) > 1e-12 * std::max(1.0, std::abs(requested)))
            std::cerr << "note: snapshot tau " << requested << " snapped to grid level "
                      << level << " (tau = " << snapped << ")\n";
        std::ostringstream name;
        name << "pi_snapshot_" << snapped << ".csv";
        write_file_atomic((dir / name.str()).string(),
                          snapshot_csv(it->second, cfg.market));
    }
    std::cout << "rho(0) = " << format_real(result.boundary.rhos.front())
              << "  rho(T) = " << format_real(result.boundary.rhos.back()) << "\n"
              << "outputs written to " << dir.string() << "\n";
    return kExitOk;
}

int run_validate(const RunConfig& cfg, int lattice_steps, double tolerance) {
    if (cfg.barles_soner && cfg.risk_aversion != 0.0) {
        std::cerr << "error: validation needs the constant model (or risk_aversion = 0); "
                     "no oracle exists for the nonlinear volatility\n";
        return kExitConfig;
    }
    const VolatilityModel model = ConstantVol{cfg.sigma_hat};
    const SolveResult result = solve_boundary(cfg.market, cfg.grid, model, cfg.iteration);

    const BinomialSpec oracle{lattice_steps, cfg.market, cfg.sigma_hat};
    const double maturity = cfg.market.maturity;
    const int m = cfg.grid.time_steps;
    const int samples = cfg.validation_samples;

    // sample grid levels evenly over [0.05 T, T]
    std::vector<ValidationRow> rows;
    double max_rel = 0.0;
    const int j_lo = static_cast<int>(std::ceil(0.05 * m));
    for (int s = 0; s < samples; ++s) {
        const int j = (samples == 1)
                          ? m
                          : j_lo + static_cast<int>(std::lround(
                                       static_cast<double>(m - j_lo) * s / (samples - 1)));
        const double tau = result.boundary.taus[static_cast<std::size_t>(j)];
        const double rho_pde = result.boundary.rhos[static_cast<std::size_t>(j)];
        const double rho_bin = binomial_boundary(oracle, maturity - tau);
        const double rel = std::abs(rho_pde - rho_bin) / rho_bin;
        rows.push_back({tau, rho_pde, rho_bin, rel});
        if (tau >= 0.05 * maturity) max_rel = std::max(max_rel, rel);
    }

    const std::filesystem::path dir(cfg.out_dir);
    write_file_atomic((dir / "validation.csv").string(), validation_csv(rows));
    std::cout << "max relative boundary error over tau in [0.05 T, T]: "
              << format_real(max_rel) << " (tolerance " << tolerance << ")\n";
    return max_rel <= tolerance ? kExitOk : kExitValidation;
}

int run_plot(const std::vector<std::string>& files, const std::string& out_path) {
    std::vector<std::string> names;
    std::vector<BoundaryCurve> curves;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot open " + file);
        std::ostringstream buf;
        buf << in.rdbuf();
        curves.push_back(parse_boundary_csv(buf.str(), file));
        names.push_back(std::filesystem::path(file).filename().string());
    }
    write_file_atomic(out_path, render_plot_svg(names, curves));
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int run_psi_table(double x_max, const std::string& out_path) {
    const PsiTable table = build_psi_table(x_max);
    write_file_atomic(out_path, psi_table_csv(table));
    std::cout << "wrote " << out_path << " (" << table.nodes.size() << " nodes, tail slope "
              << format_real(table.linear_slope) << ")\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Early exercise boundary solver for American calls under "
                 "nonlinear Black-Scholes volatility"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_path;
    int lattice_steps = 5000;
    double validate_tol = 0.02;
    double x_max = 1e4;
    std::vector<std::string> plot_files;

    auto* solve = app.add_subcommand("solve", "run a boundary solve from a config file");
    solve->add_option("--config", config_path, "config file path")->required();
    solve->add_option("--out", out_dir, "override outputs.directory");

    auto* validate = app.add_subcommand("validate", "compare the a=0 solve to the binomial oracle");
    validate->add_option("--config", config_path, "config file path")->required();
    validate->add_option("--lattice-steps", lattice_steps, "binomial tree depth")
        ->default_val(5000);
    validate->add_option("--tol", validate_tol, "max relative boundary error")
        ->default_val(0.02);

    auto* plot = app.add_subcommand("plot", "render boundary curves to an SVG chart");
    plot->add_option("--out", out_path, "output SVG path")->required();
    plot->add_option("files", plot_files, "boundary.csv files")->required();

    auto* psi = app.add_subcommand("psi-table", "dump the volatility correction table as CSV");
    psi->add_option("--xmax", x_max, "largest tabulated argument")->default_val(1e4);
    psi->add_option("--out", out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve->parsed() || validate->parsed()) {
            exbound::cli::RunConfig cfg = exbound::cli::load_config(config_path);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return solve->parsed() ? run_solve(cfg)
                                   : run_validate(cfg, lattice_steps, validate_tol);
        }
        if (plot->parsed()) return run_plot(plot_files, out_path);
        if (psi->parsed()) return run_psi_table(x_max, out_path);
    } catch (const exbound::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const exbound::InvalidParams& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const exbound::NonConvergence& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
