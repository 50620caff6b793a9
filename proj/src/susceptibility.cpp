#include "pslip/susceptibility.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pslip/errors.hpp"
#include "pslip/parallel.hpp"

namespace pslip {

namespace {

constexpr double asymptotic_window = 0.1;  // δν / |ω_I| beyond which the edge expansion is flagged
constexpr double perturbative_limit = 0.3;
constexpr double top_cut = 1e-12;  // closest approach to the separatrix, in units of I_top

// Small-action limit |c_n| / I^{|n|/2}.
double bottom_coefficient(const OscParams& p, const SpecialEnergies& se, int n) {
    const int m = std::abs(n);
    double base = n > 0 ? std::cosh(se.beta) : std::abs(std::sinh(se.beta));
    return std::pow(p.lam * p.g / (se.omega_min * se.omega_min), 0.5 * (m - 1)) * std::pow(base, m);
}

}  // namespace

double classical_peak_prefactor(const OscParams& p) {
    auto se = special_energies(p);
    return std::sqrt(se.omega_min * (se.omega_bar + se.omega_min) / (2.0 * se.omega_bar * se.omega_bar));
}

double quantum_peak_prefactor(const OscParams& p, double n_B) {
    auto se = special_energies(p);
    double q = (2.0 * n_B + 1.0) * se.omega_bar;
    return std::sqrt(2.0 * se.omega_min * (se.omega_bar + se.omega_min) / (q * q - se.omega_min * se.omega_min));
}

LogSusceptibility::LogSusceptibility(const WellGeometry& geo, Mode mode, bool strict_t0)
    : geo_(geo), mode_(mode) {
    const OscParams& p = geo_.params();
    omega_i_ = std::abs(geo_.domega_dI_bottom());
    scale_ = std::sqrt(std::numbers::pi / (p.kappa * omega_i_));
    floor_ = geo_.omega(geo_.i_top() * (1.0 - top_cut));
    if (mode == Mode::classical) {
        temp_ = p.temperature_value();
        if (!(temp_ > 0.0)) throw ValidationError("temperature", "classical log-susceptibility needs T > 0");
        path_ = classical_instanton(geo_, temp_, 200);
        scale_ *= p.omega_p / temp_;
        return;
    }
    const double nb = p.occupation();
    if (nb > 0.0) {
        path_ = quantum_finite_t_instanton(geo_, nb, 200);
        h_.emplace(geo_, Mode::quantum);
    } else if (strict_t0) {
        path_ = quantum_t0_instanton(geo_, 200);
        if (p.delta < p.lam)
            warnings_.emplace_back("strict T = 0 with delta < lam: perturbation theory around this path is not reliable");
    } else {
        path_ = quantum_tto0_instanton(geo_, 200);
    }
}

std::optional<double> LogSusceptibility::saddle_action(int n, double nu) const {
    if (n == 0 || nu == 0.0 || (n > 0) != (nu > 0.0)) return std::nullopt;
    const double target = nu / n;
    const double wmin = geo_.special().omega_min;
    if (target >= wmin) return std::nullopt;
    const double top = geo_.i_top();
    auto f = [&](double I) { return geo_.omega(I) - target; };
    if (target <= floor_) return std::nan("");
    double lo = 1e-14 * top, hi = top * (1.0 - top_cut);
    double flo = f(lo);
    if (flo <= 0.0) return (wmin - target) / omega_i_;
    double fhi = floor_ - target;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(40),
                                               iters);
    return 0.5 * (r.first + r.second);
}

Harmonic LogSusceptibility::chi(int n, double nu) const {
    Harmonic h;
    h.n = n;
    auto I = saddle_action(n, nu);
    if (!I) return h;
    h.background = false;
    if (std::isnan(*I)) {
        h.unresolved = true;
        h.abs_chi = std::nan("");
        return h;
    }
    h.I = *I;
    const OscParams& p = geo_.params();
    OrbitState o = geo_.orbit(*I);
    const double c = std::abs(geo_.fourier_coefficient(o, n));
    const double w = std::abs(o.domega_dI);
    const double an = std::abs(n);
    if (mode_ == Mode::classical) {
        HarmonicSums hs = geo_.sums(o);
        double gamma = hs.positive(2, 0.0) + hs.negative(2, 0.0);
        h.abs_chi = (p.omega_p / temp_) * std::sqrt(std::numbers::pi * an * o.I / (p.kappa * w)) * c / gamma;
        return h;
    }
    const double mom = path_.p_at(o.I);
    const double num = std::sqrt(2.0 * std::numbers::pi) * c * 2.0 * std::abs(std::sinh(0.5 * n * mom));
    // d I / d t along the path; exactly 2 kappa I for the zero-temperature branches
    const double flow = h_ ? std::abs(h_->dK0_dp(o, mom)) : 2.0 * p.kappa * o.I;
    h.abs_chi = num / std::sqrt(an * w * flow);
    return h;
}

double LogSusceptibility::prefactor(int n) const {
    if (n == 0) throw ValidationError("n", "harmonic index must be nonzero");
    const OscParams& p = geo_.params();
    const auto& se = geo_.special();
    const double cn = bottom_coefficient(p, se, n);
    const double an = std::abs(n);
    if (mode_ == Mode::classical) return std::sqrt(an) * (se.omega_min / se.omega_bar) * cn;
    return cn * 2.0 * std::abs(std::sinh(0.5 * n * path_.p_star)) / std::sqrt(an);
}

double LogSusceptibility::resonance_asymptotics(int n, double delta_nu, std::vector<std::string>* warn) const {
    if (!(delta_nu > 0.0)) return 0.0;
    if (warn && delta_nu > asymptotic_window * omega_i_) {
        std::ostringstream s;
        s << "delta_nu = " << delta_nu << " is outside the band-edge window (" << asymptotic_window
          << " |omega_I|)";
        warn->push_back(s.str());
    }
    const double an = std::abs(n);
    return prefactor(n) * scale_ * std::pow(delta_nu / (an * omega_i_), 0.5 * (an - 1.0));
}

namespace {

int first_band(double nu, double wmin) { return static_cast<int>(std::floor(std::abs(nu) / wmin)) + 1; }

}  // namespace

int LogSusceptibility::dominant_harmonic(double nu, int n_max) const {
    if (nu == 0.0) throw DomainError("dominant_harmonic: nu must be nonzero");
    const double wmin = geo_.special().omega_min;
    if (std::abs(nu) >= n_max * wmin) throw DomainError("dominant_harmonic: |nu| beyond the harmonic window");
    const int m = first_band(nu, wmin);
    const int n = nu > 0.0 ? m : -m;
    if (n < 0 && geo_.params().delta < 0.0 && m + 1 <= n_max) {
        if (chi(n - 1, nu).abs_chi > chi(n, nu).abs_chi) return n - 1;
    }
    return n;
}

double LogSusceptibility::exponent_correction(double nu, double alpha, int n_max) const {
    return 2.0 * alpha * chi(dominant_harmonic(nu, n_max), nu).abs_chi;
}

LinearFit LogSusceptibility::band_edge_fit(int points, double width) const {
    if (points < 3) throw ValidationError("points", "fit needs at least 3 points");
    const double wmin = geo_.special().omega_min;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 1; k <= points; ++k) {
        double x = width * k / points;
        double y = chi(1, wmin - x * omega_i_).abs_chi / scale_;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double np = points;
    double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    double icpt = (sy - slope * sx) / np;
    return {icpt, slope / icpt};
}

double LogSusceptibility::crossover_temperature() const {
    const OscParams& p = geo_.params();
    const double wmin = geo_.special().omega_min;
    if (!(p.delta > 0.0) || wmin <= p.delta) return std::nan("");
    return p.omega_p / std::log(wmin / p.delta);
}

LSSpectrum compute_spectrum(const LogSusceptibility& ls, const SpectrumConfig& cfg) {
    if (cfg.n_window < 1) throw ValidationError("n_window", "need at least one harmonic");
    LSSpectrum out;
    const OscParams& p = ls.geometry().params();
    if (ls.mode() == Mode::classical) {
        out.regime = "classical";
    } else {
        std::ostringstream s;
        s << "quantum(n_B=" << p.occupation() << ")";
        out.regime = s.str();
    }
    out.warnings = ls.warnings();
    out.points.resize(cfg.nu.size());
    const double wmin = ls.geometry().special().omega_min;
    const bool handoff = p.delta < 0.0;

    auto work = [&](std::size_t k) {
        SpectrumPoint& sp = out.points[k];
        sp.nu = cfg.nu[k];
        if (sp.nu == 0.0) return;
        const int sign = sp.nu > 0.0 ? 1 : -1;
        for (int m = 1; m <= cfg.n_window; ++m) sp.harmonics.push_back(ls.chi(sign * m, sp.nu));
        const int m = first_band(sp.nu, wmin);
        if (m > cfg.n_window) return;
        int idx = m - 1;
        if (sign < 0 && handoff && m < cfg.n_window &&
            sp.harmonics[static_cast<std::size_t>(m)].abs_chi > sp.harmonics[static_cast<std::size_t>(idx)].abs_chi)
            idx = m;
        sp.dominant = sp.harmonics[static_cast<std::size_t>(idx)].n;
        sp.iS1 = 2.0 * cfg.alpha * sp.harmonics[static_cast<std::size_t>(idx)].abs_chi;
    };

    parallel_for(cfg.nu.size(), cfg.threads, work);

    const double s0 = std::abs(ls.path().action);
    double worst = 0.0;
    bool unresolved = false;
    for (const auto& sp : out.points) {
        if (std::isfinite(sp.iS1)) worst = std::max(worst, 0.5 * sp.iS1 / s0);
        for (const auto& h : sp.harmonics) unresolved = unresolved || h.unresolved;
    }
    if (unresolved) {
        std::ostringstream s;
        s << "saddles for |nu|/|n| below " << ls.resolvable_floor()
          << " lie within 1e-12 I_top of the separatrix; those harmonics are reported as NaN";
        out.warnings.push_back(s.str());
    }
    if (worst > perturbative_limit) {
        std::ostringstream s;
        s << "alpha |chi| / |iS0| reaches " << worst << ", above " << perturbative_limit
          << "; first-order correction is not reliable";
        out.warnings.push_back(s.str());
    }
    return out;
}

}  // namespace pslip
