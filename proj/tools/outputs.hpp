#ifndef EXBOUND_TOOLS_OUTPUTS_HPP
#define EXBOUND_TOOLS_OUTPUTS_HPP

#include <string>
#include <vector>

#include "exbound/model.hpp"
#include "exbound/scheme.hpp"
#include "exbound/volatility.hpp"

namespace exbound::cli {

/// Writes content to path atomically (write to a temp file, then rename).
void write_file_atomic(const std::string& path, const std::string& content);

/// Full-precision decimal rendering (17 significant digits, round-trips).
std::string format_real(double v);

std::string boundary_csv(const BoundaryCurve& curve, int stride);

std::string diagnostics_json(const std::vector<StepDiagnostics>& diags,
                             double wall_seconds, const std::string& config_echo);

std::string snapshot_csv(const TransformedState& state, const MarketParams& params);

std::string psi_table_csv(const PsiTable& table);

struct ValidationRow {
    double tau;
    double rho_pde;
    double rho_binomial;
    double rel_error;
};
std::string validation_csv(const std::vector<ValidationRow>& rows);

/// Standalone SVG line chart of one or more boundary curves. The y-range is
/// padded 5% beyond the data extremes; output is deterministic.
std::string render_plot_svg(const std::vector<std::string>& names,
                            const std::vector<BoundaryCurve>& curves);

/// Parses a boundary.csv ("tau,rho" header). Throws ConfigError on malformed input.
BoundaryCurve parse_boundary_csv(const std::string& text, const std::string& name);

} // namespace exbound::cli

#endif
