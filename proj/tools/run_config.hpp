#ifndef EXBOUND_TOOLS_RUN_CONFIG_HPP
#define EXBOUND_TOOLS_RUN_CONFIG_HPP

#include <string>
#include <vector>

#include "exbound/market.hpp"
#include "exbound/scheme.hpp"

namespace exbound::cli {

/// Parsed solver configuration. The file format is sectioned key = value
/// text ([market], [grid], [model], [iteration], [outputs]); unknown
/// sections or keys are hard errors so that misconfigured numerics fail
/// loudly instead of running with silent defaults.
struct RunConfig {
    MarketParams market{10.0, 1.0, 0.1, 0.05};
    GridSpec grid;
    // model selection
    bool barles_soner = false;
    double sigma_hat = 0.2;
    double risk_aversion = 0.0;
    IterationConfig iteration;
    // outputs
    std::string out_dir = "out";
    int boundary_stride = 1;
    std::vector<double> snapshot_taus;
    int validation_samples = 20;

    void validate() const;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// The effective configuration rendered back as config-file text (used for
/// the diagnostics echo).
std::string render_config(const RunConfig& cfg);

} // namespace exbound::cli

#endif
