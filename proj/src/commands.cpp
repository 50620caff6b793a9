#include "pslip/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pslip/bifurcation.hpp"
#include "pslip/errors.hpp"
#include "pslip/export.hpp"
#include "pslip/instanton.hpp"
#include "pslip/parallel.hpp"
#include "pslip/susceptibility.hpp"

namespace pslip {

namespace {

using json = nlohmann::ordered_json;

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double perturbative_limit = 0.3;

const std::vector<std::string> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                       "#e377c2", "#17becf"};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1.0);
    v.back() = b;
    return v;
}

bool custom_range(const RunConfig& c) { return c.sweep_min != 0.0 || c.sweep_max != 0.0; }

json config_json(const RunConfig& c) {
    json j = json::object();
    std::istringstream s(serialize(c));
    for (std::string line; std::getline(s, line);) {
        auto eq = line.find('=');
        j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

void add_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& w : from)
        if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
}

void report_warnings(CommandIO& io, const std::vector<std::string>& w) {
    for (const auto& s : w) io.err << "warning: " << s << '\n';
}

// Writes PREFIX + suffix, or prints to stdout without a prefix.
void emit(CommandIO& io, const std::string& suffix, const std::string& text) {
    if (io.prefix) write_text_file(*io.prefix + suffix, text);
    else io.out << text;
}

bool bifurcation_applies(const OscParams& p) {
    if (!(p.kappa < 2.0 * p.lam)) return false;
    return p.delta < std::sqrt(4.0 * p.lam * p.lam - p.kappa * p.kappa);
}

Mode bifurcation_mode(const OscParams& p) { return p.temperature ? Mode::classical : Mode::quantum; }

Mode engine_mode(Engine e) { return e == Engine::classical ? Mode::classical : Mode::quantum; }

InstantonPath engine_path(const WellGeometry& geo, Mode mode, bool strict_t0, int points) {
    const OscParams& p = geo.params();
    if (mode == Mode::classical) return classical_instanton(geo, p.temperature_value(), points);
    const double nb = p.occupation();
    if (nb > 0.0) return quantum_finite_t_instanton(geo, nb, points);
    return strict_t0 ? quantum_t0_instanton(geo, points) : quantum_tto0_instanton(geo, points);
}

// Classical engines need a temperature; quantum ones read n_B (0 if unset).
OscParams with_temperature(OscParams p) {
    if (p.temperature_value() > 0.0) return p;
    p.n_bose.reset();
    p.temperature = 1.0;
    return p;
}

OscParams at_zero_temperature(OscParams p) {
    p.temperature.reset();
    p.n_bose = 0.0;
    return p;
}

// ---------------------------------------------------------------- rate

const std::vector<std::string> rate_columns{
    "delta_over_2lam", "delta", "T", "n_B", "nu", "iS0", "R", "iS0_T0", "R_T0", "p_star", "I_top", "I_F", "E_F",
    "kappa_over_omega_min", "action_error", "iS1", "perturbativity", "eps"};

struct RateRow {
    std::string regime, damping;
    std::vector<double> v = std::vector<double>(rate_columns.size(), nan_v);
    std::vector<std::string> warnings;
    void set(const std::string& col, double x) {
        auto it = std::find(rate_columns.begin(), rate_columns.end(), col);
        v[static_cast<std::size_t>(it - rate_columns.begin())] = x;
    }
    [[nodiscard]] double get(const std::string& col) const {
        auto it = std::find(rate_columns.begin(), rate_columns.end(), col);
        return v[static_cast<std::size_t>(it - rate_columns.begin())];
    }
};

void perturbativity(RateRow& row) {
    const double ratio = 0.5 * row.get("iS1") / std::abs(row.get("iS0"));
    row.set("perturbativity", ratio);
    if (ratio > perturbative_limit) {
        std::ostringstream s;
        s << "alpha |chi| / |iS0| = " << ratio << " at delta/2lam = " << row.get("delta_over_2lam")
          << "; first-order correction is not reliable";
        row.warnings.push_back(s.str());
    }
}

RateRow underdamped_row(const RunConfig& c, const OscParams& p, Engine e, double nu) {
    RateRow row;
    const Mode mode = engine_mode(e);
    WellGeometry geo(mode == Mode::classical ? with_temperature(p) : p);
    const OscParams& q = geo.params();
    RegimeReport rep = regime_selector(q);
    row.damping = damping_regime_name(rep.regime);
    InstantonPath path = engine_path(geo, mode, c.strict_t0, c.path_points);
    row.regime = regime_name(path.regime);
    row.set("delta_over_2lam", q.ratio());
    row.set("delta", q.delta);
    row.set("T", q.temperature_value());
    row.set("n_B", q.occupation());
    row.set("nu", nu);
    row.set("iS0", path.action);
    row.set("R", reduced_action(path, q));
    row.set("p_star", path.p_star);
    row.set("I_top", geo.i_top());
    row.set("kappa_over_omega_min", rep.kappa_over_omega_min);
    row.set("action_error", path.action_error);
    if (mode == Mode::quantum && q.occupation() == 0.0) {
        InstantonPath t0 = path.regime == Regime::quantum_T0 ? path : quantum_t0_instanton(geo, c.path_points);
        row.set("iS0_T0", t0.action);
        row.set("R_T0", reduced_action(t0, q));
        if (auto i_f = fragility_action(geo)) {
            row.set("I_F", *i_f);
            row.set("E_F", geo.energy_of_action(*i_f));
        }
    }
    if (nu != 0.0) {
        LogSusceptibility ls(geo, mode, c.strict_t0);
        add_unique(row.warnings, ls.warnings());
        try {
            DriveParams d = c.drive;
            row.set("iS1", ls.exponent_correction(nu, d.alpha, c.n_window));
            if (std::isnan(row.get("iS1")))
                row.warnings.push_back("iS1 is NaN: the saddle for nu = " + format_double(nu) +
                                       " lies too close to the separatrix to resolve");
        } catch (const DomainError& ex) {
            row.warnings.push_back(std::string("iS1 not available: ") + ex.what());
        }
        perturbativity(row);
    }
    add_unique(row.warnings, rep.warnings);
    return row;
}

RateRow bifurcation_row(const RunConfig& c, const OscParams& p, double nu) {
    RateRow row;
    BifurcationParams b = bifurcation_params(p, bifurcation_mode(p));
    RegimeReport rep = regime_selector(p);
    row.regime = b.mode == Mode::classical ? "bifurcation_classical" : "bifurcation_quantum";
    row.damping = damping_regime_name(rep.regime);
    row.set("delta_over_2lam", p.ratio());
    row.set("delta", p.delta);
    row.set("T", b.mode == Mode::classical ? b.temperature : p.temperature_value());
    row.set("n_B", b.mode == Mode::quantum ? b.n_bose : p.occupation());
    row.set("nu", nu);
    row.set("iS0", base_exponent(b));
    row.set("kappa_over_omega_min", rep.kappa_over_omega_min);
    row.set("iS1", bifurcation_ls(scaled_frequency(nu, b), c.drive.alpha, b));
    row.set("eps", b.eps);
    perturbativity(row);
    add_unique(row.warnings, b.warnings);
    return row;
}

struct SweepPoint {
    OscParams p;
    double nu;
};

std::vector<SweepPoint> sweep(const RunConfig& c, Engine e) {
    const OscParams& p = c.osc;
    if (c.sweep == "none") return {{p, c.drive.nu}};
    const bool custom = custom_range(c);
    const bool bif = e == Engine::bifurcation;
    std::vector<double> xs;
    if (c.sweep == "delta") {
        if (custom) {
            xs = linspace(c.sweep_min, c.sweep_max, c.sweep_points);
        } else if (bif) {
            // eps from 0.1 down to 0.01
            const double db = std::sqrt(4.0 * p.lam * p.lam - p.kappa * p.kappa);
            xs = linspace(db - 0.2 * p.lam, db - 0.02 * p.lam, c.sweep_points);
        } else {
            xs = linspace(-1.8 * p.lam, 1.8 * p.lam, c.sweep_points);
        }
    } else if (c.sweep == "n_B") {
        xs = custom ? linspace(c.sweep_min, c.sweep_max, c.sweep_points) : linspace(0.0, 5.0, c.sweep_points);
    } else {
        if (custom) {
            xs = linspace(c.sweep_min, c.sweep_max, c.sweep_points);
        } else if (bif) {
            BifurcationParams b = bifurcation_params(p, bifurcation_mode(p));
            xs = linspace(0.0, 10.0 / scaled_frequency(1.0, b), c.sweep_points);
        } else {
            const double w = special_energies(p).omega_min;
            xs = linspace(0.1 * w, 0.99 * w, c.sweep_points);
        }
    }
    std::vector<SweepPoint> out;
    for (double x : xs) {
        SweepPoint s{p, c.drive.nu};
        if (c.sweep == "delta") s.p.delta = x;
        else if (c.sweep == "n_B") s.p.n_bose = x;
        else s.nu = x;
        s.p.validate();
        out.push_back(s);
    }
    return out;
}

std::string sweep_column(const RunConfig& c) {
    if (c.sweep == "n_B") return "n_B";
    if (c.sweep == "nu") return "nu";
    return "delta_over_2lam";
}

// ---------------------------------------------------------------- spectrum

std::vector<double> spectrum_grid(const RunConfig& c, double default_half_width) {
    if (c.sweep != "none" && c.sweep != "nu") throw ValidationError("sweep", "spectrum sweeps nu only");
    if (c.sweep == "nu" && custom_range(c)) return linspace(c.sweep_min, c.sweep_max, c.sweep_points);
    return linspace(-default_half_width, default_half_width, c.sweep_points);
}

int spectrum_underdamped(const RunConfig& c, CommandIO& io, Engine e, std::vector<std::string> warnings) {
    const Mode mode = engine_mode(e);
    WellGeometry geo(mode == Mode::classical ? with_temperature(c.osc) : c.osc);
    LogSusceptibility ls(geo, mode, c.strict_t0);
    const double wmin = geo.special().omega_min;
    SpectrumConfig sc{spectrum_grid(c, c.n_window * wmin), c.n_window, c.drive.alpha, io.threads};
    LSSpectrum sp = compute_spectrum(ls, sc);
    add_unique(warnings, sp.warnings);
    const double w_d = geo.i_d() ? geo.omega(*geo.i_d()) : nan_v;

    std::string csv = csv_row({"nu", "n", "abs_chi_n", "dominant", "iS1"});
    for (const auto& pt : sp.points)
        for (const auto& h : pt.harmonics)
            csv += csv_row({format_double(pt.nu), std::to_string(h.n), format_double(h.abs_chi),
                            h.n == pt.dominant ? "1" : "0", format_double(pt.iS1)});

    if (c.format == Format::json) {
        json j;
        j["command"] = "spectrum";
        j["regime"] = sp.regime;
        j["config"] = config_json(c);
        j["warnings"] = warnings;
        j["omega_min"] = wmin;
        j["omega_D"] = w_d;
        j["points"] = json::array();
        for (const auto& pt : sp.points) {
            json q;
            q["nu"] = pt.nu;
            q["dominant"] = pt.dominant;
            q["iS1"] = pt.iS1;
            q["harmonics"] = json::array();
            for (const auto& h : pt.harmonics)
                q["harmonics"].push_back({{"n", h.n},
                                          {"abs_chi_n", h.abs_chi},
                                          {"background", h.background},
                                          {"unresolved", h.unresolved},
                                          {"I", h.I}});
            j["points"].push_back(q);
        }
        emit(io, ".json", j.dump(2) + "\n");
    } else if (c.format == Format::svg) {
        if (io.prefix) write_text_file(*io.prefix + ".csv", csv);
        SvgPlot plot("log-susceptibility, " + sp.regime, "nu", "|chi_n|", c.log_y);
        std::size_t colour = 0;
        for (int sign : {1, -1}) {
            for (int m = 1; m <= c.n_window; ++m) {
                const int n = sign * m;
                std::vector<double> x, y;
                for (const auto& pt : sp.points) {
                    auto it = std::find_if(pt.harmonics.begin(), pt.harmonics.end(),
                                           [n](const Harmonic& h) { return h.n == n; });
                    x.push_back(pt.nu);
                    y.push_back(it == pt.harmonics.end() ? nan_v : it->abs_chi);
                }
                plot.line(x, y, palette[colour++ % palette.size()], sign < 0, "chi_" + std::to_string(n));
                plot.vline(n * wmin, "#888888");
                if (std::isfinite(w_d)) plot.vline(n * w_d, "#d62728");
            }
        }
        emit(io, ".svg", plot.render());
    } else {
        emit(io, ".csv", csv);
    }
    report_warnings(io, warnings);
    return 0;
}

int spectrum_bifurcation(const RunConfig& c, CommandIO& io, std::vector<std::string> warnings) {
    BifurcationParams b = bifurcation_params(c.osc, bifurcation_mode(c.osc));
    add_unique(warnings, b.warnings);
    const double per_upsilon = 1.0 / scaled_frequency(1.0, b);
    std::vector<double> nu = spectrum_grid(c, 10.0 * per_upsilon);
    std::vector<double> ups(nu.size()), is1(nu.size());
    parallel_for(nu.size(), io.threads, [&](std::size_t k) {
        ups[k] = scaled_frequency(nu[k], b);
        is1[k] = bifurcation_ls(ups[k], c.drive.alpha, b);
    });
    const std::string regime = b.mode == Mode::classical ? "bifurcation_classical" : "bifurcation_quantum";

    std::string csv = csv_row({"nu", "upsilon", "iS1"});
    for (std::size_t k = 0; k < nu.size(); ++k)
        csv += csv_row({format_double(nu[k]), format_double(ups[k]), format_double(is1[k])});
    if (c.format == Format::json) {
        json j;
        j["command"] = "spectrum";
        j["regime"] = regime;
        j["config"] = config_json(c);
        j["warnings"] = warnings;
        j["eps"] = b.eps;
        j["points"] = json::array();
        for (std::size_t k = 0; k < nu.size(); ++k)
            j["points"].push_back({{"nu", nu[k]}, {"upsilon", ups[k]}, {"iS1", is1[k]}});
        emit(io, ".json", j.dump(2) + "\n");
    } else if (c.format == Format::svg) {
        if (io.prefix) write_text_file(*io.prefix + ".csv", csv);
        SvgPlot plot("log-susceptibility near the bifurcation, " + regime, "upsilon", "iS1", c.log_y);
        plot.line(ups, is1, palette[0], false, "iS1");
        emit(io, ".svg", plot.render());
    } else {
        emit(io, ".csv", csv);
    }
    report_warnings(io, warnings);
    return 0;
}

// ---------------------------------------------------------------- portrait

int portrait_fragility(const RunConfig& c, CommandIO& io) {
    std::vector<double> ratios;
    if (c.sweep == "delta" && custom_range(c)) {
        for (double d : linspace(c.sweep_min, c.sweep_max, c.sweep_points)) ratios.push_back(d / (2.0 * c.osc.lam));
    } else {
        ratios = linspace(-0.95, 0.9, c.sweep_points);
    }
    std::vector<FragilityPoint> pts(ratios.size());
    parallel_for(ratios.size(), io.threads,
                 [&](std::size_t k) { pts[k] = fragility_curve({ratios[k]}, c.osc.lam, c.osc.g).front(); });

    auto val = [](const std::optional<double>& v) { return v ? *v : nan_v; };
    std::string csv = csv_row({"delta_over_2lam", "I_F_over_I_top", "E_F"});
    for (const auto& f : pts) csv += csv_row({format_double(f.ratio), format_double(val(f.i_f)), format_double(val(f.e_f))});

    if (c.format == Format::json) {
        json j;
        j["command"] = "portrait";
        j["portrait"] = "fragility";
        j["config"] = config_json(c);
        j["points"] = json::array();
        for (const auto& f : pts)
            j["points"].push_back({{"delta_over_2lam", f.ratio}, {"I_F_over_I_top", val(f.i_f)}, {"E_F", val(f.e_f)}});
        write_text_file(*io.prefix + ".json", j.dump(2) + "\n");
        return 0;
    }
    write_text_file(*io.prefix + ".csv", csv);
    if (c.format == Format::svg) {
        std::vector<double> x, ef, emin, ed, fx, fy;
        for (const auto& f : pts) {
            OscParams q = c.osc;
            q.delta = 2.0 * q.lam * f.ratio;
            SpecialEnergies se = special_energies(q);
            x.push_back(f.ratio);
            ef.push_back(val(f.e_f));
            emin.push_back(se.e_min);
            ed.push_back(f.ratio < 0.0 ? se.e_d : nan_v);
            if (f.e_f) {
                fx.push_back(f.ratio);
                fy.push_back(*f.e_f);
            }
        }
        // fragile band: E_F < E < 0
        for (std::size_t k = fx.size(); k-- > 0;) {
            fx.push_back(fx[k]);
            fy.push_back(0.0);
        }
        SvgPlot plot("zero-temperature fragility", "delta / 2 lam", "quasi-energy E");
        plot.fill(fx, fy, "#d62728");
        plot.line(x, ef, "#000000", false, "E_F");
        plot.line(x, emin, "#888888", true, "E_min");
        plot.line(x, ed, "#1f77b4", true, "E_D");
        write_text_file(*io.prefix + ".svg", plot.render());
    }
    return 0;
}

int portrait_phase(const RunConfig& c, CommandIO& io) {
    ResolvedRegime r = resolve_regime(c, c.osc);
    if (r.engine == Engine::bifurcation)
        throw ValidationError("regime", "portrait needs the classical or quantum engine");
    const Mode mode = engine_mode(r.engine);
    WellGeometry geo(mode == Mode::classical ? with_temperature(c.osc) : c.osc);
    PhasePortrait pp = phase_portrait(geo, mode, c.grid_i, c.grid_p);
    const auto& path = pp.instanton;
    const std::string regime = regime_name(path.regime);

    if (c.format == Format::json) {
        json j;
        j["command"] = "portrait";
        j["portrait"] = "phase";
        j["regime"] = regime;
        j["config"] = config_json(c);
        j["warnings"] = r.warnings;
        j["i_axis"] = pp.i_axis;
        j["p_axis"] = pp.p_axis;
        json rows = json::array();
        for (int i = 0; i < pp.n_i; ++i) {
            json row = json::array();
            for (int k = 0; k < pp.n_p; ++k) row.push_back(pp.at(i, k));
            rows.push_back(row);
        }
        j["k0"] = rows;
        j["path"] = json::array();
        for (const auto& s : path.samples) j["path"].push_back({{"I", s.I}, {"p", s.p}, {"K0_residual", s.residual}});
        j["fixed_points"] = json::array();
        for (const auto& f : pp.fixed_points) j["fixed_points"].push_back({f.I, f.p});
        j["divergence_I"] = pp.divergence_i ? json(*pp.divergence_i) : json(nullptr);
        write_text_file(*io.prefix + ".json", j.dump(2) + "\n");
        report_warnings(io, r.warnings);
        return 0;
    }

    std::string grid = csv_row({"I", "p", "K0"});
    for (int i = 0; i < pp.n_i; ++i)
        for (int k = 0; k < pp.n_p; ++k)
            grid += csv_row({format_double(pp.i_axis[static_cast<std::size_t>(i)]),
                             format_double(pp.p_axis[static_cast<std::size_t>(k)]), format_double(pp.at(i, k))});
    std::string pcsv = csv_row({"I", "p", "K0_residual"});
    for (const auto& s : path.samples) pcsv += csv_row({format_double(s.I), format_double(s.p), format_double(s.residual)});
    write_text_file(*io.prefix + "_grid.csv", grid);
    write_text_file(*io.prefix + "_path.csv", pcsv);

    if (c.format == Format::svg) {
        SvgPlot plot("K0 = 0 level set, " + regime, "I", "p");
        plot.set_x_range(0.0, geo.i_top());
        plot.set_y_range(pp.p_axis.front(), pp.p_axis.back());
        std::vector<double> px, py;
        for (const auto& s : path.samples) {
            if (!std::isfinite(s.p)) continue;
            px.push_back(s.I);
            py.push_back(s.p);
        }
        // region between relaxation (p = 0) and the instanton
        std::vector<double> fx = px, fy = py;
        fx.push_back(px.empty() ? 0.0 : px.back());
        fy.push_back(0.0);
        fx.push_back(px.empty() ? 0.0 : px.front());
        fy.push_back(0.0);
        plot.fill(fx, fy, "#ffbf00", 0.3);
        plot.segments(contour_segments(pp.i_axis, pp.p_axis, pp.k0, 0.0), "#1f77b4");
        plot.line({0.0, geo.i_top()}, {0.0, 0.0}, "#1f77b4", false, "K0 = 0");
        std::vector<double> path_i, path_p;
        for (const auto& s : path.samples) {
            path_i.push_back(s.I);
            path_p.push_back(s.p);
        }
        plot.line(path_i, path_p, "#000000", false, "instanton");
        if (mode == Mode::quantum) {
            std::vector<double> pl, pt0;
            for (double I : pp.i_axis) {
                OrbitState o = geo.orbit(I);
                pl.push_back(o.p_less);
                pt0.push_back(t0_momentum(o));
            }
            plot.line(pp.i_axis, pl, "#d62728", true, "p_<");
            plot.line(pp.i_axis, pt0, "#2ca02c", true, "T = 0 path");
        }
        if (pp.divergence_i) plot.vline(*pp.divergence_i, "#888888");
        std::vector<double> fpx, fpy;
        for (const auto& f : pp.fixed_points) {
            fpx.push_back(f.I);
            fpy.push_back(f.p);
        }
        plot.markers(fpx, fpy, "#d62728");
        write_text_file(*io.prefix + ".svg", plot.render());
    }
    report_warnings(io, r.warnings);
    return 0;
}

// ---------------------------------------------------------------- selfcheck

std::string sci(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

}  // namespace

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::classical: return "classical";
        case Engine::quantum: return "quantum";
        case Engine::bifurcation: return "bifurcation";
    }
    return "?";
}

ResolvedRegime resolve_regime(const RunConfig& c, const OscParams& p) {
    ResolvedRegime r;
    const Engine underdamped = p.n_bose ? Engine::quantum : p.temperature ? Engine::classical : Engine::quantum;
    if (c.regime == "classical") {
        if (!(p.temperature_value() > 0.0)) throw ValidationError("T", "classical regime needs T > 0 or n_B > 0");
        r.engine = Engine::classical;
    } else if (c.regime == "quantum") {
        r.engine = Engine::quantum;
    } else if (c.regime == "bifurcation") {
        r.engine = Engine::bifurcation;
    } else {
        RegimeReport rep = regime_selector(p);
        if (rep.regime == DampingRegime::overdamped) {
            r.engine = Engine::bifurcation;
        } else {
            r.engine = underdamped;
            if (rep.regime == DampingRegime::crossover) {
                r.warnings = rep.warnings;
                r.also_bifurcation = bifurcation_applies(p);
            }
        }
    }
    return r;
}

int cmd_rate(const RunConfig& c, CommandIO& io) {
    validate(c);
    ResolvedRegime r = resolve_regime(c, c.osc);
    std::vector<SweepPoint> pts = sweep(c, r.engine);
    std::vector<std::vector<RateRow>> rows(pts.size());
    parallel_for(pts.size(), io.threads, [&](std::size_t k) {
        const SweepPoint& s = pts[k];
        if (r.engine == Engine::bifurcation) {
            rows[k].push_back(bifurcation_row(c, s.p, s.nu));
            return;
        }
        rows[k].push_back(underdamped_row(c, s.p, r.engine, s.nu));
        if (r.also_bifurcation && bifurcation_applies(s.p)) rows[k].push_back(bifurcation_row(c, s.p, s.nu));
    });

    std::vector<std::string> warnings = r.warnings;
    std::vector<RateRow> flat;
    for (auto& group : rows)
        for (auto& row : group) {
            add_unique(warnings, row.warnings);
            flat.push_back(std::move(row));
        }

    std::vector<std::string> header{"regime", "damping"};
    header.insert(header.end(), rate_columns.begin(), rate_columns.end());
    std::string csv = csv_row(header);
    for (const auto& row : flat) {
        std::vector<std::string> f{row.regime, row.damping};
        for (double v : row.v) f.push_back(format_double(v));
        csv += csv_row(f);
    }

    if (c.format == Format::json) {
        json j;
        j["command"] = "rate";
        j["config"] = config_json(c);
        j["warnings"] = warnings;
        j["rows"] = json::array();
        for (const auto& row : flat) {
            json o;
            o["regime"] = row.regime;
            o["damping"] = row.damping;
            for (std::size_t k = 0; k < rate_columns.size(); ++k) o[rate_columns[k]] = row.v[k];
            j["rows"].push_back(o);
        }
        emit(io, ".json", j.dump(2) + "\n");
    } else if (c.format == Format::svg) {
        if (io.prefix) write_text_file(*io.prefix + ".csv", csv);
        const std::string xcol = sweep_column(c);
        SvgPlot plot("rate exponent", xcol, "R (iS0 near the bifurcation)");
        std::vector<std::string> regimes;
        for (const auto& row : flat)
            if (std::find(regimes.begin(), regimes.end(), row.regime) == regimes.end()) regimes.push_back(row.regime);
        std::size_t colour = 0;
        for (const auto& reg : regimes) {
            std::vector<double> x, y;
            for (const auto& row : flat) {
                if (row.regime != reg) continue;
                x.push_back(row.get(xcol));
                y.push_back(reg.rfind("bifurcation", 0) == 0 ? row.get("iS0") : row.get("R"));
            }
            const std::string& colour_name = palette[colour++ % palette.size()];
            plot.line(x, y, colour_name, false, reg);
            plot.markers(x, y, colour_name);
        }
        emit(io, ".svg", plot.render());
    } else {
        emit(io, ".csv", csv);
    }
    report_warnings(io, warnings);
    return 0;
}

int cmd_spectrum(const RunConfig& c, CommandIO& io) {
    validate(c);
    ResolvedRegime r = resolve_regime(c, c.osc);
    if (r.engine == Engine::bifurcation) return spectrum_bifurcation(c, io, r.warnings);
    return spectrum_underdamped(c, io, r.engine, r.warnings);
}

int cmd_portrait(const RunConfig& c, CommandIO& io) {
    validate(c);
    if (!io.prefix) throw ValidationError("out", "portrait writes several files; pass --out PREFIX");
    if (c.portrait == "fragility") return portrait_fragility(c, io);
    return portrait_phase(c, io);
}

std::vector<CheckResult> run_selfcheck(const RunConfig& c) {
    validate(c);
    const OscParams p = c.osc;
    std::vector<CheckResult> out;
    auto check = [&](std::string id, const std::function<std::pair<bool, std::string>()>& f) {
        CheckResult r{std::move(id), false, {}};
        try {
            std::tie(r.pass, r.detail) = f();
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    };
    const std::vector<double> fracs{0.1, 0.3, 0.5, 0.7, 0.9};

    check("action-angle/sum-rules", [&] {
        WellGeometry geo(p);
        double worst = 0.0;
        for (double f : fracs) {
            FourierTable t = geo.fourier_table(f * geo.i_top(), c.n_max);
            worst = std::max({worst, t.residual_action, t.residual_noise});
        }
        return std::pair{true, "worst residual " + sci(worst) + " at n_max=" + std::to_string(c.n_max)};
    });

    check("keldysh/relaxation-identity", [&] {
        double worst = 0.0;
        for (Mode mode : {Mode::classical, Mode::quantum}) {
            EffectiveHamiltonian h(WellGeometry(mode == Mode::classical ? with_temperature(p) : p), mode);
            for (double f : fracs) {
                OrbitState o = h.geometry().orbit(f * h.geometry().i_top());
                const double want = 2.0 * p.kappa * o.I;
                worst = std::max({worst, std::abs(h.drift(o) / want - 1.0), std::abs(-h.dK0_dp(o, 0.0) / want - 1.0)});
            }
        }
        return std::pair{worst < 1e-8, "worst relative error " + sci(worst)};
    });

    check("keldysh/series-vs-integral", [&] {
        EffectiveHamiltonian h(WellGeometry(p), Mode::quantum);
        double worst = 0.0;
        for (double f : fracs) {
            OrbitState o = h.geometry().orbit(f * h.geometry().i_top());
            Strip s = h.strip(o);
            for (double x : {-0.8, -0.4, 0.2, 0.5, 0.8}) {
                const double mom = x > 0 ? x * s.upper : -x * s.lower;
                auto [sl, sg] = h.K_parts(o, mom);
                auto [il, ig] = h.K0_integral_rep(o, mom);
                const double diff = std::abs(h.gamma_loss() * (sl - il) + h.gamma_gain() * (sg - ig));
                worst = std::max(worst, diff / h.K0_scale(o, mom));
            }
        }
        return std::pair{worst < 1e-6, "worst relative difference " + sci(worst)};
    });

    check("instanton/t0-detailed-balance", [&] {
        WellGeometry geo(at_zero_temperature(p));
        EffectiveHamiltonian h(geo, Mode::quantum);
        const double upper = fragility_action(geo).value_or(0.95 * geo.i_top());
        double worst_k = 0.0, worst_flow = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double I = upper * k / 21.0;
            if (geo.i_d() && std::abs(I - *geo.i_d()) < 0.02 * geo.i_top()) continue;
            OrbitState o = geo.orbit(I);
            const double mom = t0_momentum(o);
            worst_k = std::max(worst_k, std::abs(h.K0(o, mom)) / h.K0_scale(o, mom));
            worst_flow = std::max(worst_flow, std::abs(h.dK0_dp(o, mom) / (2.0 * p.kappa * I) - 1.0));
        }
        return std::pair{worst_k < 1e-8 && worst_flow < 1e-6,
                         "K0 residual " + sci(worst_k) + ", flow error " + sci(worst_flow)};
    });

    check("instanton/path-residuals", [&] {
        const Mode mode = p.temperature ? Mode::classical : Mode::quantum;
        WellGeometry geo(p);
        InstantonPath path = engine_path(geo, mode, c.strict_t0, c.path_points);
        double worst = 0.0;
        for (const auto& s : path.samples)
            if (std::isfinite(s.residual)) worst = std::max(worst, s.residual);
        return std::pair{worst < 1e-8, std::string(regime_name(path.regime)) + " worst residual " + sci(worst)};
    });

    check("log-susceptibility/kappa-scaling", [&] {
        const Mode mode = p.temperature ? Mode::classical : Mode::quantum;
        OscParams a = p, b = p;
        b.kappa = a.kappa / 4.0;
        LogSusceptibility la(WellGeometry(a), mode, c.strict_t0), lb(WellGeometry(b), mode, c.strict_t0);
        const double nu = 0.9 * la.geometry().special().omega_min;
        const double ratio = lb.chi(1, nu).abs_chi / la.chi(1, nu).abs_chi;
        return std::pair{std::abs(ratio / 2.0 - 1.0) < 1e-10, "chi_1 ratio " + format_double(ratio)};
    });

    check("bifurcation/gamma-identity", [&] {
        double worst = 0.0;
        for (double y : linspace(-10.0, 10.0, 41)) {
            const double lhs = std::norm(complex_gamma(cplx(0.5, y)));
            worst = std::max(worst, std::abs(lhs * std::cosh(std::numbers::pi * y) / std::numbers::pi - 1.0));
        }
        return std::pair{worst < 1e-12, "worst relative error " + sci(worst)};
    });

    if (bifurcation_applies(p)) {
        check("bifurcation/ls-at-zero", [&] {
            BifurcationParams b = bifurcation_params(p, bifurcation_mode(p));
            const double pref = b.mode == Mode::classical ? b.omega_p / (2.0 * b.temperature) : 1.0 / (2.0 * b.n_bose + 1.0);
            const double want = pref * std::sqrt(b.eps / (b.lam * b.g));
            const double err = std::abs(bifurcation_ls(0.0, 1.0, b) / want - 1.0);
            return std::pair{err < 1e-12, "relative error " + sci(err)};
        });
    }

    check("elliptic/jacobi-identity", [&] {
        WellGeometry geo(p);
        const double m = orbit_shape(geo.energy_of_action(0.5 * geo.i_top()), p).m;
        double worst = 0.0;
        for (cplx u : {cplx(0.1, 0.05), cplx(0.7, -0.3), cplx(1.2, 0.4), cplx(-0.5, 0.2)}) {
            Jacobi j = jacobi(u, m);
            const double scale = std::max(1.0, std::norm(j.sn));
            worst = std::max(worst, std::abs(j.sn * j.sn + j.cn * j.cn - 1.0) / scale);
            worst = std::max(worst, std::abs(j.dn * j.dn + m * j.sn * j.sn - 1.0) / (scale * std::max(1.0, std::abs(m))));
        }
        return std::pair{worst < 1e-10, "worst identity residual " + sci(worst)};
    });
    return out;
}

int cmd_selfcheck(const RunConfig& c, CommandIO& io) {
    std::vector<CheckResult> res = run_selfcheck(c);
    int failed = 0;
    for (const auto& r : res) {
        io.out << (r.pass ? "PASS " : "FAIL ") << r.id << ": " << r.detail << '\n';
        failed += r.pass ? 0 : 1;
    }
    io.out << "selfcheck: " << res.size() - static_cast<std::size_t>(failed) << '/' << res.size() << " passed\n";
    return failed ? 2 : 0;
}

}  // namespace pslip
