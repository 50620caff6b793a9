#include "pslip/keldysh.hpp"

#include <cmath>
#include <string>

#include "pslip/errors.hpp"

namespace pslip {

EffectiveHamiltonian::EffectiveHamiltonian(WellGeometry geo, Mode mode) : geo_(std::move(geo)), mode_(mode) {
    const OscParams& p = geo_.params();
    double nb = p.occupation();
    gl_ = 2.0 * (nb + 1.0) * p.kappa;
    gg_ = 2.0 * nb * p.kappa;
    if (mode_ == Mode::classical) {
        double T = p.temperature_value();
        if (!(T > 0.0)) throw ValidationError("temperature", "classical mode needs T > 0");
        noise_ = 2.0 * p.kappa * T / p.omega_p;
    }
}

double EffectiveHamiltonian::rate(const OrbitState& o, int n) const {
    HarmonicSums hs = geo_.sums(o);
    return gl_ * hs.weight(n) + gg_ * hs.weight(-n);
}

double EffectiveHamiltonian::drift(const OrbitState& o) const {
    HarmonicSums hs = geo_.sums(o);
    double s1 = hs.positive(1, 0.0) - hs.negative(1, 0.0);
    return (gl_ - gg_) * s1;
}

Strip EffectiveHamiltonian::strip(const OrbitState& o) const {
    if (mode_ == Mode::classical) return {-HUGE_VAL, HUGE_VAL};
    if (gg_ == 0.0) return {-o.p_less, o.p_greater};
    double w = std::min(o.p_less, o.p_greater);
    return {-w, w};
}

void EffectiveHamiltonian::check_strip(const OrbitState& o, double p) const {
    Strip s = strip(o);
    if (p >= s.upper * (1.0 - strip_margin))
        throw StripExitError("p = " + std::to_string(p) + " beyond upper strip bound " + std::to_string(s.upper));
    if (p <= s.lower * (1.0 - strip_margin))
        throw StripExitError("p = " + std::to_string(p) + " beyond lower strip bound " + std::to_string(s.lower));
}

std::pair<double, double> EffectiveHamiltonian::K_parts(const OrbitState& o, double p) const {
    HarmonicSums hs = geo_.sums(o);
    double kl = p == 0.0 ? 0.0 : hs.positive_expm1(p) + hs.negative_expm1(p);
    double kg = 0.0;
    if (gg_ > 0.0 && p != 0.0) kg = hs.positive_expm1(-p) + hs.negative_expm1(-p);
    return {kl, kg};
}

double EffectiveHamiltonian::K0(const OrbitState& o, double p) const {
    if (p == 0.0) return 0.0;
    if (mode_ == Mode::classical) {
        HarmonicSums hs = geo_.sums(o);
        double gamma = hs.positive(2, 0.0) + hs.negative(2, 0.0);
        return -2.0 * geo_.params().kappa * p * o.I + noise_ * gamma * p * p;
    }
    check_strip(o, p);
    auto [kl, kg] = K_parts(o, p);
    return gl_ * kl + gg_ * kg;
}

double EffectiveHamiltonian::K0(double I, double p) const {
    if (p == 0.0) return 0.0;
    return K0(geo_.orbit(I), p);
}

double EffectiveHamiltonian::dK0_dp(const OrbitState& o, double p) const {
    HarmonicSums hs = geo_.sums(o);
    if (mode_ == Mode::classical) {
        double gamma = hs.positive(2, 0.0) + hs.negative(2, 0.0);
        return -2.0 * geo_.params().kappa * o.I + 2.0 * noise_ * gamma * p;
    }
    check_strip(o, p);
    double dl = -hs.positive(1, p) + hs.negative(1, p);
    double dg = gg_ > 0.0 ? hs.positive(1, -p) - hs.negative(1, -p) : 0.0;
    return gl_ * dl + gg_ * dg;
}

double EffectiveHamiltonian::dK0_dp(double I, double p) const {
    if (I == 0.0) return 0.0;
    return dK0_dp(geo_.orbit(I), p);
}

double EffectiveHamiltonian::dK0_dI_bottom(double p) const {
    const SpecialEnergies& s = geo_.special();
    if (mode_ == Mode::classical)
        return -2.0 * geo_.params().kappa * p + noise_ * geo_.noise_slope_bottom() * p * p;
    double ch2 = std::cosh(s.beta) * std::cosh(s.beta), sh2 = std::sinh(s.beta) * std::sinh(s.beta);
    double w1 = gl_ * ch2 + gg_ * sh2;
    double wm1 = gl_ * sh2 + gg_ * ch2;
    return w1 * std::expm1(-p) + wm1 * std::expm1(p);
}

double EffectiveHamiltonian::K0_scale(const OrbitState& o, double p) const {
    if (mode_ == Mode::classical) {
        HarmonicSums hs = geo_.sums(o);
        double gamma = hs.positive(2, 0.0) + hs.negative(2, 0.0);
        return std::abs(2.0 * geo_.params().kappa * p * o.I) + std::abs(noise_ * gamma * p * p);
    }
    HarmonicSums hs = geo_.sums(o);
    double s = gl_ * (std::abs(hs.positive_expm1(p)) + std::abs(hs.negative_expm1(p)));
    if (gg_ > 0.0) s += gg_ * (std::abs(hs.positive_expm1(-p)) + std::abs(hs.negative_expm1(-p)));
    return s;
}

std::pair<double, double> EffectiveHamiltonian::K0_integral_rep(const OrbitState& o, double p) const {
    if (p == 0.0) return {0.0, 0.0};
    const OscParams& prm = geo_.params();
    const double tau = p / (2.0 * o.omega);
    // |phi|^2 on the contour Im t = shift, averaged over a period
    auto average = [&](double shift, int nodes) {
        double s = 0.0;
        for (int k = 0; k < nodes; ++k) {
            double t = o.times.t1 * k / nodes;
            s += std::norm(classical_solution(cplx(t, shift), o.E, prm, o.times));
        }
        return s / nodes;
    };
    auto converged = [&](double shift) {
        int nodes = 512;
        double prev = average(shift, nodes);
        for (; nodes < (1 << 17); nodes *= 2) {
            double next = average(shift, 2 * nodes);
            if (std::abs(next - prev) <= 1e-14 * std::abs(next)) return next;
            prev = next;
        }
        throw ConvergenceError("K0_integral_rep: trapezoid did not converge");
    };
    double base = converged(0.0);
    double kl = converged(-tau) - base;
    double kg = converged(tau) - base;
    return {kl, kg};
}

double EffectiveHamiltonian::K1_sum(const OrbitState& o, double p, double theta, double t, const DriveParams& d,
                                    bool linear) const {
    if (d.alpha == 0.0) return 0.0;
    if (d.alpha < 0.0) throw ValidationError("alpha", "must be non-negative");
    if (mode_ == Mode::quantum && !linear) check_strip(o, p);
    const cplx i1{0.0, 1.0};
    auto term = [&](int n) {
        double f;
        if (mode_ == Mode::classical || linear) f = n * p;
        else f = 2.0 * std::sinh(0.5 * n * p);
        return f * geo_.fourier_coefficient(o, n) * std::exp(-i1 * (n * theta - d.nu * t - d.phase));
    };
    cplx sum = term(1) + term(-1);
    int quiet = 0;
    for (int n = 2; n < 200000; ++n) {
        cplx add = term(n) + term(-n);
        sum += add;
        quiet = std::abs(add) <= 1e-17 * std::abs(sum) ? quiet + 1 : 0;
        if (quiet >= 4) return 2.0 * d.alpha * sum.real();
    }
    throw ConvergenceError("K1: harmonic sum did not converge");
}

double EffectiveHamiltonian::K1(const OrbitState& o, double p, double theta, double t, const DriveParams& d) const {
    return K1_sum(o, p, theta, t, d, false);
}

double EffectiveHamiltonian::K1_linearized(const OrbitState& o, double p, double theta, double t,
                                           const DriveParams& d) const {
    return K1_sum(o, p, theta, t, d, true);
}

double classical_limit_check(const OscParams& prm, double I, double mom, double n_B) {
    if (mom == 0.0) return 0.0;
    OscParams q = prm;
    q.temperature.reset();
    q.n_bose = n_B;
    OscParams c = prm;
    c.n_bose.reset();
    c.temperature = prm.omega_p * n_B;
    WellGeometry geo(q);
    OrbitState o = geo.orbit(I);
    double kq = EffectiveHamiltonian(geo, Mode::quantum).K0(o, mom);
    double kc = EffectiveHamiltonian(WellGeometry(c), Mode::classical).K0(o, mom);
    return std::abs(kq - kc) / std::abs(kc);
}

}  // namespace pslip
