#include "outputs.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "run_config.hpp"

#include <json.hpp>

namespace exbound::cli {

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::ios_base::failure("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::ios_base::failure("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string boundary_csv(const BoundaryCurve& curve, int stride) {
    std::ostringstream out;
    out << "tau,rho\n";
    const std::size_t count = curve.taus.size();
    for (std::size_t j = 0; j < count; j += static_cast<std::size_t>(stride)) {
        out << format_real(curve.taus[j]) << ',' << format_real(curve.rhos[j]) << '\n';
        if (stride > 1 && j + static_cast<std::size_t>(stride) >= count && j != count - 1)
            out << format_real(curve.taus.back()) << ',' << format_real(curve.rhos.back())
                << '\n';  // always keep the final level
    }
    return out.str();
}

std::string diagnostics_json(const std::vector<StepDiagnostics>& diags,
                             double wall_seconds, const std::string& config_echo) {
    nlohmann::json j;
    auto& iters = j["iterations_used"] = nlohmann::json::array();
    auto& resid = j["final_residual"] = nlohmann::json::array();
    auto& clamps = j["gamma_clamp_count"] = nlohmann::json::array();
    std::int64_t warn_count = 0;
    int contraction_violations = 0;
    for (const auto& d : diags) {
        iters.push_back(d.iterations_used);
        resid.push_back(d.final_residual);
        clamps.push_back(d.gamma_clamp_count);
        if (!d.converged) ++warn_count;
        contraction_violations += d.contraction_violations;
    }
    j["wall_seconds"] = wall_seconds;
    j["config_echo"] = config_echo;
    j["nonconverged_levels"] = warn_count;
    j["contraction_violations"] = contraction_violations;
    return j.dump(2) + "\n";
}

std::string snapshot_csv(const TransformedState& state, const MarketParams& params) {
    std::ostringstream out;
    out << "x,S,pi,V\n";
    const std::size_t n = state.pi.size() - 1;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) * state.dx;
        const double s = x_to_s(x, state.rho);
        const double v = price_from_pi(state, params, s);
        out << format_real(x) << ',' << format_real(s) << ',' << format_real(state.pi[i])
            << ',' << format_real(v) << '\n';
    }
    return out.str();
}

std::string psi_table_csv(const PsiTable& table) {
    std::ostringstream out;
    out << "x,psi\n";
    for (std::size_t i = 0; i < table.nodes.size(); ++i)
        out << format_real(table.nodes[i]) << ',' << format_real(table.values[i]) << '\n';
    return out.str();
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
    std::ostringstream out;
    out << "tau,rho_pde,rho_binomial,rel_error\n";
    for (const auto& row : rows)
        out << format_real(row.tau) << ',' << format_real(row.rho_pde) << ','
            << format_real(row.rho_binomial) << ',' << format_real(row.rel_error) << '\n';
    return out.str();
}

BoundaryCurve parse_boundary_csv(const std::string& text, const std::string& name) {
    BoundaryCurve curve;
    std::istringstream stream(text);
    std::string line;
    if (!std::getline(stream, line) || line.rfind("tau,rho", 0) != 0)
        throw ConfigError(name + ": missing 'tau,rho' header");
    int line_no = 1;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(name + ": line " + std::to_string(line_no) + " has no comma");
        try {
            curve.taus.push_back(std::stod(line.substr(0, comma)));
            curve.rhos.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError(name + ": line " + std::to_string(line_no) + " is not numeric");
        }
    }
    if (curve.taus.empty()) throw ConfigError(name + ": no data rows");
    return curve;
}

namespace {

const char* kPalette[] = {"#1b6ca8", "#c0392b", "#27845b", "#8e6a00", "#6a4a94", "#555555"};

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

std::string render_plot_svg(const std::vector<std::string>& names,
                            const std::vector<BoundaryCurve>& curves) {
    constexpr double width = 800.0, height = 600.0;
    constexpr double ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;

    double x_min = curves[0].taus.front(), x_max = x_min;
    double y_min = curves[0].rhos.front(), y_max = y_min;
    for (const auto& c : curves) {
        for (double t : c.taus) { x_min = std::min(x_min, t); x_max = std::max(x_max, t); }
        for (double r : c.rhos) { y_min = std::min(y_min, r); y_max = std::max(y_max, r); }
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    const double pad = 0.05 * (y_max - y_min == 0.0 ? std::max(std::abs(y_max), 1.0)
                                                    : y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const auto sx = [&](double t) { return ml + (t - x_min) / (x_max - x_min) * (width - ml - mr); };
    const auto sy = [&](double r) { return height - mb - (r - y_min) / (y_max - y_min) * (height - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = x_min + (x_max - x_min) * i / 5.0;
        const double r = y_min + (y_max - y_min) * i / 5.0;
        svg << "<text x=\"" << fmt_coord(sx(t)) << "\" y=\"" << height - mb + 20
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(t) << "</text>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << fmt_coord(sy(r) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(r) << "</text>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 10
        << "\" font-size=\"14\" text-anchor=\"middle\">tau</text>\n";
    svg << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (mt + height - mb) / 2 << ")\">rho(tau)</text>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kPalette[c % (sizeof kPalette / sizeof kPalette[0])];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < curves[c].taus.size(); ++i) {
            if (i) svg << ' ';
            svg << fmt_coord(sx(curves[c].taus[i])) << ',' << fmt_coord(sy(curves[c].rhos[i]));
        }
        svg << "\"/>\n";
        // legend entry
        const double ly = mt + 18.0 * static_cast<double>(c) + 10.0;
        svg << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly << "\" x2=\"" << ml + 34
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        svg << "<text x=\"" << ml + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
            << names[c] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace exbound::cli
