#include "run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace exbound::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for '" + key + "': " + value);
    }
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string token;
    std::istringstream stream(value);
    while (std::getline(stream, token, ',')) {
        std::istringstream inner(token);
        std::string word;
        while (inner >> word) out.push_back(parse_real(key, word));
    }
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    bool model_set = false;

    std::istringstream stream(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "market" && section != "grid" && section != "model" &&
                section != "iteration" && section != "outputs")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any section header");

        if (section == "market") {
            if (key == "strike") cfg.market.strike = parse_real(key, value);
            else if (key == "maturity") cfg.market.maturity = parse_real(key, value);
            else if (key == "rate") cfg.market.rate = parse_real(key, value);
            else if (key == "dividend") cfg.market.dividend = parse_real(key, value);
            else throw ConfigError("unknown key 'market." + key + "'");
        } else if (section == "grid") {
            if (key == "domain_length") cfg.grid.domain_length = parse_real(key, value);
            else if (key == "space_steps") cfg.grid.space_steps = parse_int(key, value);
            else if (key == "time_steps") cfg.grid.time_steps = parse_int(key, value);
            else throw ConfigError("unknown key 'grid." + key + "'");
        } else if (section == "model") {
            if (key == "type") {
                model_set = true;
                if (value == "constant") cfg.barles_soner = false;
                else if (value == "barles_soner") cfg.barles_soner = true;
                else throw ConfigError("model.type must be constant or barles_soner");
            } else if (key == "sigma_hat") {
                cfg.sigma_hat = parse_real(key, value);
            } else if (key == "risk_aversion") {
                cfg.risk_aversion = parse_real(key, value);
            } else {
                throw ConfigError("unknown key 'model." + key + "'");
            }
        } else if (section == "iteration") {
            if (key == "tol") cfg.iteration.tol = parse_real(key, value);
            else if (key == "p_max") cfg.iteration.p_max = parse_int(key, value);
            else if (key == "on_nonconvergence") {
                if (value == "warn") cfg.iteration.on_nonconvergence = NonConvergencePolicy::warn_and_continue;
                else if (value == "abort") cfg.iteration.on_nonconvergence = NonConvergencePolicy::abort;
                else throw ConfigError("iteration.on_nonconvergence must be warn or abort");
            } else throw ConfigError("unknown key 'iteration." + key + "'");
        } else if (section == "outputs") {
            if (key == "directory") cfg.out_dir = value;
            else if (key == "boundary_stride") cfg.boundary_stride = parse_int(key, value);
            else if (key == "snapshot_taus") cfg.snapshot_taus = parse_real_list(key, value);
            else if (key == "validation_samples") cfg.validation_samples = parse_int(key, value);
            else throw ConfigError("unknown key 'outputs." + key + "'");
        }
    }

    if (!model_set) throw ConfigError("missing model.type (constant or barles_soner)");
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    try {
        market.validate();
        grid.validate();
        iteration.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (!(sigma_hat > 0.0)) throw ConfigError("model.sigma_hat must be positive");
    if (risk_aversion < 0.0) throw ConfigError("model.risk_aversion must be >= 0");
    if (!barles_soner && risk_aversion != 0.0)
        throw ConfigError("model.risk_aversion requires type = barles_soner");
    if (boundary_stride < 1) throw ConfigError("outputs.boundary_stride must be >= 1");
    if (validation_samples < 1) throw ConfigError("outputs.validation_samples must be >= 1");
    for (double tau : snapshot_taus)
        if (tau < 0.0 || tau > market.maturity)
            throw ConfigError("snapshot tau outside [0, maturity]");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[market]\n"
        << "strike = " << fmt(cfg.market.strike) << "\n"
        << "maturity = " << fmt(cfg.market.maturity) << "\n"
        << "rate = " << fmt(cfg.market.rate) << "\n"
        << "dividend = " << fmt(cfg.market.dividend) << "\n\n"
        << "[grid]\n"
        << "domain_length = " << fmt(cfg.grid.domain_length) << "\n"
        << "space_steps = " << cfg.grid.space_steps << "\n"
        << "time_steps = " << cfg.grid.time_steps << "\n\n"
        << "[model]\n"
        << "type = " << (cfg.barles_soner ? "barles_soner" : "constant") << "\n"
        << "sigma_hat = " << fmt(cfg.sigma_hat) << "\n";
    if (cfg.barles_soner) out << "risk_aversion = " << fmt(cfg.risk_aversion) << "\n";
    out << "\n[iteration]\n"
        << "tol = " << fmt(cfg.iteration.tol) << "\n"
        << "p_max = " << cfg.iteration.p_max << "\n"
        << "on_nonconvergence = "
        << (cfg.iteration.on_nonconvergence == NonConvergencePolicy::abort ? "abort" : "warn")
        << "\n\n[outputs]\n"
        << "directory = " << cfg.out_dir << "\n"
        << "boundary_stride = " << cfg.boundary_stride << "\n";
    if (!cfg.snapshot_taus.empty()) {
        out << "snapshot_taus = ";
        for (std::size_t i = 0; i < cfg.snapshot_taus.size(); ++i)
            out << (i ? ", " : "") << fmt(cfg.snapshot_taus[i]);
        out << "\n";
    }
    out << "validation_samples = " << cfg.validation_samples << "\n";
    return out.str();
}

} // namespace exbound::cli
