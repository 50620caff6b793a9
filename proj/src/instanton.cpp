#include "pslip/instanton.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "pslip/errors.hpp"

namespace pslip {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double bottom_cut = 1e-9;   // fraction of I_top treated as the I -> 0 limit
constexpr double top_cut = 1e-13;     // fraction of I_top treated as the separatrix
constexpr double singular_cut = 1e-12;

// Keeps evaluation points where the orbit quantities are representable.
double clamp_action(double I, double i_top, std::optional<double> i_sing) {
    I = std::clamp(I, bottom_cut * i_top, (1.0 - top_cut) * i_top);
    if (i_sing) {
        double d = singular_cut * i_top;
        if (std::abs(I - *i_sing) < d) I = I < *i_sing ? *i_sing - d : *i_sing + d;
    }
    return I;
}

OscParams quantum_params(const OscParams& p, double n_B) {
    OscParams q = p;
    q.temperature.reset();
    q.n_bose = n_B;
    return q;
}

OscParams classical_params(const OscParams& p, double T) {
    OscParams q = p;
    q.n_bose.reset();
    q.temperature = T;
    return q;
}

void fill_samples(InstantonPath& path, const WellGeometry& geo, const EffectiveHamiltonian* h, int points) {
    path.samples.clear();
    for (double I : path_grid(path.i_top, points)) {
        PathSample s;
        s.I = I;
        if (I == 0.0) {
            s.p = path.p_star;
        } else if (I >= path.i_top) {
            s.p = 0.0;
        } else {
            s.p = path.momentum(I);
            bool on_pole_branch = path.i_f && I > *path.i_f;
            if (h && !on_pole_branch) {
                OrbitState o = geo.orbit(I);
                s.residual = std::abs(h->K0(o, s.p)) / h->K0_scale(o, s.p);
            } else if (on_pole_branch) {
                s.residual = nan_v;
            }
        }
        path.samples.push_back(s);
    }
    if (path.i_singular) {
        PathSample s{*path.i_singular, std::numeric_limits<double>::infinity(), nan_v, true};
        auto it = std::lower_bound(path.samples.begin(), path.samples.end(), s.I,
                                   [](const PathSample& a, double v) { return a.I < v; });
        path.samples.insert(it, s);
    }
}

}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::classical: return "classical";
        case Regime::quantum_T0: return "quantum_T0";
        case Regime::quantum_Tto0: return "quantum_Tto0";
        case Regime::quantum_finiteT: return "quantum_finiteT";
    }
    return "unknown";
}

double t0_momentum(const OrbitState& o) { return 2.0 * o.omega * o.times.tQ.imag(); }

double tunneling_momentum(const OrbitState& o) { return o.omega * o.times.t2.imag(); }

double classical_p_star(const WellGeometry& geo, double T) {
    const OscParams& p = geo.params();
    return p.omega_p / T * geo.special().omega_min / geo.special().omega_bar;
}

double quantum_p_star(const WellGeometry& geo, double n_B) {
    double wb = geo.special().omega_bar * (2.0 * n_B + 1.0);
    double wm = geo.special().omega_min;
    return std::log((wb + wm) / (wb - wm));
}

std::vector<double> path_grid(double i_top, int points) {
    if (points < 3) throw ValidationError("points", "need at least 3 path samples");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        g[static_cast<std::size_t>(k)] = 0.5 * i_top * (1.0 - std::cos(std::numbers::pi * k / (points - 1)));
    g.front() = 0.0;
    g.back() = i_top;
    return g;
}

std::optional<double> fragility_action(const WellGeometry& geo) {
    const double top = geo.i_top();
    const auto& pr = geo.params();
    // delta = 0: E_F = E_min, fragile from the well bottom
    if (std::abs(pr.delta) <= 1e-12 * pr.lam) return 0.0;
    auto gap = [&](double I) {
        OrbitState o = geo.orbit(clamp_action(I, top, geo.i_d()));
        return o.p_less - t0_momentum(o);
    };
    std::vector<double> grid = path_grid(top, 241);
    double prev_i = bottom_cut * top, prev_f = gap(prev_i);
    if (prev_f <= 0.0) return 0.0;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        double I = grid[k];
        double f = gap(I);
        if (prev_f > 0.0 && f <= 0.0) {
            std::uintmax_t iters = 200;
            auto tol = boost::math::tools::eps_tolerance<double>(48);
            auto r = boost::math::tools::toms748_solve(gap, prev_i, I, prev_f, f, tol, iters);
            return 0.5 * (r.first + r.second);
        }
        prev_i = I;
        prev_f = f;
    }
    return std::nullopt;
}

double finite_t_momentum(const EffectiveHamiltonian& h, const OrbitState& o) {
    Strip s = h.strip(o);
    const double lo = 1e-10;
    const double hi = s.upper * (1.0 - EffectiveHamiltonian::strip_margin) * (1.0 - 1e-12);
    auto f = [&](double p) { return h.K0(o, p) / p; };
    double flo = f(lo);
    if (!(flo < 0.0)) throw BracketError("finite-T instanton: K0 not negative at the lower bracket");
    double fhi = f(hi);
    if (!(fhi > 0.0)) throw StripExitError("finite-T instanton: root lies beyond the strip margin");
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

InstantonPath classical_instanton(const WellGeometry& geo, double T, int points) {
    if (!(T > 0.0)) throw ValidationError("temperature", "classical instanton needs T > 0");
    WellGeometry g2(classical_params(geo.params(), T));
    InstantonPath path;
    path.regime = Regime::classical;
    path.i_top = geo.i_top();
    path.p_star = classical_p_star(geo, T);
    const double scale = geo.params().omega_p / T;
    path.momentum = [g2, scale](double I) {
        OrbitState o = g2.orbit(clamp_action(I, g2.i_top(), std::nullopt));
        HarmonicSums hs = g2.sums(o);
        return scale * o.I / (hs.positive(2, 0.0) + hs.negative(2, 0.0));
    };
    EffectiveHamiltonian h(g2, Mode::classical);
    fill_samples(path, g2, &h, points);
    path.action = action_integral(path, &path.action_error);
    return path;
}

InstantonPath quantum_t0_instanton(const WellGeometry& geo, int points) {
    WellGeometry g2(quantum_params(geo.params(), 0.0));
    InstantonPath path;
    path.regime = Regime::quantum_T0;
    path.i_top = geo.i_top();
    path.p_star = quantum_p_star(geo, 0.0);
    path.i_singular = g2.i_d();
    path.momentum = [g2](double I) { return t0_momentum(g2.orbit(clamp_action(I, g2.i_top(), g2.i_d()))); };
    EffectiveHamiltonian h(g2, Mode::quantum);
    fill_samples(path, g2, nullptr, points);
    // K_l vanishes along the path wherever it stays inside the T = 0 strip
    for (PathSample& s : path.samples) {
        if (s.I <= 0.0 || s.I >= path.i_top || s.singular) continue;
        OrbitState o = g2.orbit(s.I);
        if (s.p < o.p_greater * (1.0 - EffectiveHamiltonian::strip_margin))
            s.residual = std::abs(h.K0(o, s.p)) / h.K0_scale(o, s.p);
        else
            s.residual = nan_v;
    }
    path.action = action_integral(path, &path.action_error);
    return path;
}

InstantonPath quantum_tto0_instanton(const WellGeometry& geo, int points) {
    WellGeometry g2(quantum_params(geo.params(), 0.0));
    InstantonPath path;
    path.regime = Regime::quantum_Tto0;
    path.i_top = geo.i_top();
    path.p_star = quantum_p_star(geo, 0.0);
    path.i_f = fragility_action(g2);
    std::optional<double> i_f = path.i_f;
    path.momentum = [g2, i_f](double I) {
        OrbitState o = g2.orbit(clamp_action(I, g2.i_top(), g2.i_d()));
        if (i_f && o.I > *i_f) return o.p_less;
        return t0_momentum(o);
    };
    EffectiveHamiltonian h(g2, Mode::quantum);
    fill_samples(path, g2, nullptr, points);
    for (PathSample& s : path.samples) {
        if (s.I <= 0.0 || s.I >= path.i_top || (i_f && s.I > *i_f)) continue;
        OrbitState o = g2.orbit(s.I);
        s.residual = std::abs(h.K0(o, s.p)) / h.K0_scale(o, s.p);
    }
    path.action = action_integral(path, &path.action_error);
    return path;
}

InstantonPath quantum_finite_t_instanton(const WellGeometry& geo, double n_B, int points) {
    if (!(n_B > 0.0)) throw ValidationError("n_bose", "finite-T instanton needs n_B > 0");
    WellGeometry g2(quantum_params(geo.params(), n_B));
    InstantonPath path;
    path.regime = Regime::quantum_finiteT;
    path.i_top = geo.i_top();
    path.p_star = quantum_p_star(geo, n_B);
    EffectiveHamiltonian h(g2, Mode::quantum);
    path.momentum = [h](double I) {
        const WellGeometry& g = h.geometry();
        return finite_t_momentum(h, g.orbit(clamp_action(I, g.i_top(), std::nullopt)));
    };
    fill_samples(path, g2, &h, points);
    path.action = action_integral(path, &path.action_error);
    return path;
}

InstantonPath instanton(const WellGeometry& geo, Mode mode, bool tto0, int points) {
    const OscParams& p = geo.params();
    if (mode == Mode::classical) return classical_instanton(geo, p.temperature_value(), points);
    double nb = p.occupation();
    if (nb > 0.0) return quantum_finite_t_instanton(geo, nb, points);
    return tto0 ? quantum_tto0_instanton(geo, points) : quantum_t0_instanton(geo, points);
}

double action_integral(const InstantonPath& path, double* error) {
    double err = 0.0, total = 0.0;
    if (path.momentum) {
        std::vector<double> cuts{0.0};
        if (path.i_singular) cuts.push_back(*path.i_singular);
        if (path.i_f) cuts.push_back(*path.i_f);
        cuts.push_back(path.i_top);
        std::sort(cuts.begin(), cuts.end());
        boost::math::quadrature::tanh_sinh<double> ts(12);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double e = 0.0, l1 = 0.0;
            total += ts.integrate(path.momentum, cuts[k], cuts[k + 1], 1e-12, &e, &l1);
            err += e;
        }
        // excluded sliver around a logarithmic singularity: |int| <= 2 d (1 + |log d|) max-slope
        if (path.i_singular) {
            double d = singular_cut * path.i_top;
            err += 2.0 * d * std::abs(path.momentum(*path.i_singular - d));
        }
        err += bottom_cut * path.i_top * std::abs(path.momentum(bottom_cut * path.i_top));
    } else {
        const auto& s = path.samples;
        for (std::size_t k = 0; k + 1 < s.size(); ++k) {
            if (s[k].singular || s[k + 1].singular) continue;
            total += 0.5 * (s[k].p + s[k + 1].p) * (s[k + 1].I - s[k].I);
        }
    }
    if (error) *error = err;
    return -total;
}

double reduced_action(const InstantonPath& path, const OscParams& p) {
    double pref = p.lam / p.g;
    if (path.regime == Regime::classical) pref *= p.omega_p / p.temperature_value();
    return -path.action / pref;
}

PhasePortrait phase_portrait(const WellGeometry& geo, Mode mode, int n_i, int n_p) {
    if (n_i < 64 || n_p < 64) throw ValidationError("grid", "portrait needs at least 64 x 64 points");
    PhasePortrait out;
    out.n_i = n_i;
    out.n_p = n_p;
    EffectiveHamiltonian h(geo, mode);
    out.instanton = instanton(geo, mode, false, 200);
    const double ps = out.instanton.p_star;
    out.fixed_points = {{0.0, 0.0}, {0.0, ps}, {geo.i_top(), 0.0}};
    out.divergence_i = out.instanton.i_singular;
    for (int i = 0; i < n_i; ++i) out.i_axis.push_back(geo.i_top() * (i + 1.0) / (n_i + 1.0));
    for (int j = 0; j < n_p; ++j) out.p_axis.push_back(ps * (-0.25 + 1.75 * j / (n_p - 1.0)));
    out.k0.assign(static_cast<std::size_t>(n_i) * static_cast<std::size_t>(n_p), nan_v);
    for (int i = 0; i < n_i; ++i) {
        OrbitState o = geo.orbit(out.i_axis[static_cast<std::size_t>(i)]);
        Strip s = h.strip(o);
        for (int j = 0; j < n_p; ++j) {
            double p = out.p_axis[static_cast<std::size_t>(j)];
            double lim = EffectiveHamiltonian::strip_margin;
            if (p < s.upper * (1.0 - lim) && p > s.lower * (1.0 - lim))
                out.k0[static_cast<std::size_t>(i * n_p + j)] = h.K0(o, p);
        }
    }
    return out;
}

std::vector<FragilityPoint> fragility_curve(const std::vector<double>& ratios, double lam, double g) {
    std::vector<FragilityPoint> out;
    for (double r : ratios) {
        OscParams p;
        p.lam = lam;
        p.g = g;
        p.delta = 2.0 * lam * r;
        WellGeometry geo(p);
        FragilityPoint fp{r, std::nullopt, std::nullopt};
        if (auto i_f = fragility_action(geo)) {
            fp.i_f = *i_f / geo.i_top();
            fp.e_f = geo.energy_of_action(*i_f);
        }
        out.push_back(fp);
    }
    return out;
}

}  // namespace pslip
