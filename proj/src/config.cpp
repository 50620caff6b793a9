#include "pslip/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "pslip/errors.hpp"

namespace pslip {

namespace {

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view v) {
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ValidationError(std::string(key), "expected a number, got '" + std::string(v) + "'");
    return out;
}

int parse_int(std::string_view key, std::string_view v) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ValidationError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError(std::string(key), "expected true or false");
}

std::optional<double> parse_optional(std::string_view key, std::string_view v) {
    if (v == "none") return std::nullopt;
    return parse_double(key, v);
}

std::string choice(std::string_view key, std::string_view v, std::initializer_list<std::string_view> allowed) {
    for (auto a : allowed)
        if (v == a) return std::string(v);
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
    throw ValidationError(std::string(key), "expected one of " + list);
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

const char* format_name(Format f) {
    switch (f) {
        case Format::csv: return "csv";
        case Format::json: return "json";
        case Format::svg: return "svg";
    }
    return "csv";
}

Format parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    if (s == "svg") return Format::svg;
    throw ValidationError("format", "expected csv|json|svg");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "delta") c.osc.delta = parse_double(key, value);
    else if (key == "lam") c.osc.lam = parse_double(key, value);
    else if (key == "g") c.osc.g = parse_double(key, value);
    else if (key == "kappa") c.osc.kappa = parse_double(key, value);
    else if (key == "omega_p") c.osc.omega_p = parse_double(key, value);
    else if (key == "T") c.osc.temperature = parse_optional(key, value);
    else if (key == "n_B") c.osc.n_bose = parse_optional(key, value);
    else if (key == "alpha") c.drive.alpha = parse_double(key, value);
    else if (key == "nu") c.drive.nu = parse_double(key, value);
    else if (key == "phase") c.drive.phase = parse_double(key, value);
    else if (key == "regime") c.regime = choice(key, value, {"auto", "classical", "quantum", "bifurcation"});
    else if (key == "strict_t0") c.strict_t0 = parse_bool(key, value);
    else if (key == "sweep") c.sweep = choice(key, value, {"none", "nu", "delta", "n_B"});
    else if (key == "sweep_min") c.sweep_min = parse_double(key, value);
    else if (key == "sweep_max") c.sweep_max = parse_double(key, value);
    else if (key == "sweep_points") c.sweep_points = parse_int(key, value);
    else if (key == "n_window") c.n_window = parse_int(key, value);
    else if (key == "n_max") c.n_max = parse_int(key, value);
    else if (key == "grid_i") c.grid_i = parse_int(key, value);
    else if (key == "grid_p") c.grid_p = parse_int(key, value);
    else if (key == "path_points") c.path_points = parse_int(key, value);
    else if (key == "portrait") c.portrait = choice(key, value, {"phase", "fragility"});
    else if (key == "log_y") c.log_y = parse_bool(key, value);
    else if (key == "format") c.format = parse_format(value);
    else throw ValidationError(std::string(key), "unknown key");
}

void apply_override(RunConfig& c, std::string_view assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ValidationError(std::string(trim(assignment)), "expected key=value");
    apply_setting(c, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void parse_config(RunConfig& c, std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) apply_override(c, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

RunConfig config_from_text(std::string_view text) {
    RunConfig c;
    parse_config(c, text);
    return c;
}

std::string serialize(const RunConfig& c) {
    std::ostringstream s;
    s << "delta=" << format_double(c.osc.delta) << '\n'
      << "lam=" << format_double(c.osc.lam) << '\n'
      << "g=" << format_double(c.osc.g) << '\n'
      << "kappa=" << format_double(c.osc.kappa) << '\n'
      << "omega_p=" << format_double(c.osc.omega_p) << '\n'
      << "T=" << opt_text(c.osc.temperature) << '\n'
      << "n_B=" << opt_text(c.osc.n_bose) << '\n'
      << "alpha=" << format_double(c.drive.alpha) << '\n'
      << "nu=" << format_double(c.drive.nu) << '\n'
      << "phase=" << format_double(c.drive.phase) << '\n'
      << "regime=" << c.regime << '\n'
      << "strict_t0=" << (c.strict_t0 ? "true" : "false") << '\n'
      << "sweep=" << c.sweep << '\n'
      << "sweep_min=" << format_double(c.sweep_min) << '\n'
      << "sweep_max=" << format_double(c.sweep_max) << '\n'
      << "sweep_points=" << c.sweep_points << '\n'
      << "n_window=" << c.n_window << '\n'
      << "n_max=" << c.n_max << '\n'
      << "grid_i=" << c.grid_i << '\n'
      << "grid_p=" << c.grid_p << '\n'
      << "path_points=" << c.path_points << '\n'
      << "portrait=" << c.portrait << '\n'
      << "log_y=" << (c.log_y ? "true" : "false") << '\n'
      << "format=" << format_name(c.format) << '\n';
    return s.str();
}

void validate(const RunConfig& c) {
    c.osc.validate();
    if (!std::isfinite(c.drive.alpha) || c.drive.alpha < 0) throw ValidationError("alpha", "must be finite and >= 0");
    if (!std::isfinite(c.drive.nu)) throw ValidationError("nu", "must be finite");
    if (!std::isfinite(c.sweep_min) || !std::isfinite(c.sweep_max))
        throw ValidationError("sweep_min", "sweep bounds must be finite");
    if (c.sweep != "none") {
        if (c.sweep_points < 2) throw ValidationError("sweep_points", "need at least 2 points");
        const bool custom = c.sweep_min != 0.0 || c.sweep_max != 0.0;
        if (custom && !(c.sweep_min < c.sweep_max)) throw ValidationError("sweep_min", "must be below sweep_max");
        if (custom && c.sweep == "delta" &&
            !(std::abs(c.sweep_min) < 2.0 * c.osc.lam && std::abs(c.sweep_max) < 2.0 * c.osc.lam))
            throw ValidationError("sweep_max", "delta sweep must stay inside |delta| < 2 lam");
        if (custom && c.sweep == "n_B" && c.sweep_min < 0.0)
            throw ValidationError("sweep_min", "n_B sweep must be non-negative");
        if (c.sweep == "n_B" && c.osc.temperature)
            throw ValidationError("sweep", "n_B sweep conflicts with a fixed T");
    }
    if (c.n_window < 1 || c.n_window > 50) throw ValidationError("n_window", "must be in [1, 50]");
    if (c.n_max < 1) throw ValidationError("n_max", "must be positive");
    if (c.grid_i < 64 || c.grid_p < 64) throw ValidationError("grid_i", "portrait grid needs at least 64 x 64");
    if (c.path_points < 3) throw ValidationError("path_points", "need at least 3 path samples");
}

}  // namespace pslip
