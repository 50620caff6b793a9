#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pslip/params.hpp"

namespace pslip {

enum class Format { csv, json, svg };

// Flat key=value run configuration. Every key has a default; serialize()
// writes all of them in a fixed order, so parse(serialize(c)) == c.
struct RunConfig {
    OscParams osc;
    DriveParams drive{1e-3, 0.0, 0.0};
    std::string regime = "auto";  // auto | classical | quantum | bifurcation
    bool strict_t0 = false;       // quantum n_B = 0: T = 0 path instead of T -> 0
    std::string sweep = "none";   // none | nu | delta | n_B
    double sweep_min = 0, sweep_max = 0;  // both 0: command default range
    int sweep_points = 101;
    int n_window = 3;
    int n_max = 64;
    int grid_i = 64, grid_p = 64;
    int path_points = 400;
    std::string portrait = "phase";  // phase | fragility
    bool log_y = false;
    Format format = Format::csv;
};

// Sets one key from its text value; throws ValidationError naming the key.
void apply_setting(RunConfig& c, std::string_view key, std::string_view value);
// "key=value"
void apply_override(RunConfig& c, std::string_view assignment);
// Parses a config file body: key=value lines, '#' comments, blank lines.
void parse_config(RunConfig& c, std::string_view text);
[[nodiscard]] RunConfig config_from_text(std::string_view text);
[[nodiscard]] std::string serialize(const RunConfig& c);
// Domain checks across keys.
void validate(const RunConfig& c);

[[nodiscard]] const char* format_name(Format f);
[[nodiscard]] Format parse_format(std::string_view s);

// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] std::string format_double(double v);

}  // namespace pslip
