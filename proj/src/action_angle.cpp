#include "pslip/action_angle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "pslip/errors.hpp"

namespace pslip {

namespace {

constexpr double pi = std::numbers::pi;

// sum_{k>N} k^j q^k, with omq = 1 - q passed separately to keep precision
// when q is close to one.
double geometric_tail(int j, double q, double omq, int N) {
    const double M = N + 1.0;
    double lead = std::pow(q, M);
    if (lead == 0.0) return 0.0;
    double r = 1.0 / omq;
    switch (j) {
        case 0: return lead * r;
        case 1: return lead * (M * r + q * r * r);
        case 2: return lead * (M * M * r + 2.0 * M * q * r * r + q * (1.0 + q) * r * r * r);
        case 3:
            return lead * (M * M * M * r + 3.0 * M * M * q * r * r + 3.0 * M * q * (1.0 + q) * r * r * r +
                           q * (1.0 + 4.0 * q + q * q) * r * r * r * r);
        default: throw DomainError("geometric_tail: moment order above 3");
    }
}

}  // namespace

HarmonicSums::HarmonicSums(const OrbitState& o, const OscParams& p) {
    a2_ = o.omega * o.omega / (p.lam * p.g);
    log_rl_ = -o.p_less;
    log_rg_ = -o.p_greater;
    const CharTimes& t = o.times;
    z_ = std::cos(o.omega * t.tS.real()) * std::exp(-o.omega * t.tS.imag());
    double az = std::abs(z_);
    n_direct_ = 8;
    if (az > 0.0) {
        double need = 6.0 * std::log(10.0) / -std::log(az);
        n_direct_ = static_cast<int>(std::clamp(std::ceil(need), 8.0, 1e6));
    }
}

double HarmonicSums::weight(int n) const {
    if (n == 0) return 0.25 * a2_;
    int k = std::abs(n);
    double d = 1.0 + std::pow(z_, k);
    double lr = n > 0 ? log_rl_ : log_rg_;
    return a2_ * std::exp(k * lr) / (d * d);
}

double HarmonicSums::moment(double log_x, int j) const {
    if (!(log_x < 0.0)) throw StripExitError("harmonic sum outside its convergence strip");
    const double x = std::exp(log_x);
    double xk = 1.0, zk = 1.0, sum = 0.0;
    for (int k = 1; k <= n_direct_; ++k) {
        xk *= x;
        zk *= z_;
        double d = 1.0 + zk;
        sum += std::pow(double(k), j) * xk / (d * d);
        if (xk < 1e-300) return sum;
    }
    double tail = 0.0, zr = 1.0;
    for (int r = 0; r <= 2; ++r) {
        double q = x * zr;
        double omq = r == 0 ? -std::expm1(log_x) : 1.0 - q;
        tail += (r + 1) * (r % 2 ? -1.0 : 1.0) * geometric_tail(j, q, omq, n_direct_);
        zr *= z_;
    }
    return sum + tail;
}

double HarmonicSums::shifted(double log_x, double dp) const {
    if (!(log_x + dp < 0.0) || !(log_x < 0.0))
        throw StripExitError("harmonic sum outside its convergence strip");
    const double x = std::exp(log_x);
    double xk = 1.0, zk = 1.0, sum = 0.0;
    for (int k = 1; k <= n_direct_; ++k) {
        xk *= x;
        zk *= z_;
        double d = 1.0 + zk;
        double w = std::exp(k * (log_x + dp));
        sum += xk * std::expm1(k * dp) / (d * d);
        if (xk < 1e-300 && w < 1e-300) return sum;
    }
    const double y = std::exp(log_x + dp);
    double tail = 0.0, zr = 1.0;
    for (int r = 0; r <= 2; ++r) {
        double qs = y * zr, q0 = x * zr;
        double omqs = r == 0 ? -std::expm1(log_x + dp) : 1.0 - qs;
        double omq0 = r == 0 ? -std::expm1(log_x) : 1.0 - q0;
        double diff = geometric_tail(0, qs, omqs, n_direct_) - geometric_tail(0, q0, omq0, n_direct_);
        tail += (r + 1) * (r % 2 ? -1.0 : 1.0) * diff;
        zr *= z_;
    }
    return sum + tail;
}

double HarmonicSums::positive(int j, double p) const { return a2_ * moment(log_rl_ - p, j); }
double HarmonicSums::negative(int j, double p) const { return a2_ * moment(log_rg_ + p, j); }
double HarmonicSums::positive_expm1(double p) const { return a2_ * shifted(log_rl_, -p); }
double HarmonicSums::negative_expm1(double p) const { return a2_ * shifted(log_rg_, p); }

WellGeometry::WellGeometry(const OscParams& p) : p_(p), se_(special_energies(p)) {
    p_.validate();
    double psi0 = std::acos(-p.delta / (2.0 * p.lam));
    i_top_ = 2.0 / (pi * p.g) * (2.0 * p.lam * std::sin(psi0) - p.delta * (pi - psi0));
    if (p.delta < 0.0) {
        e_d_ = se_.e_d;
        i_d_ = action_of_energy(se_.e_d);
    }
}

// Area of the orbit in the (Re phi, Im phi) plane over 2 pi, written as an
// integral over the polar radius variable y in [s, 2 lam - delta] and then
// y = s + (a - s) sin^2 tau, which removes both endpoint singularities.
double WellGeometry::action_of_energy(double E) const {
    if (E >= 0.0) {
        if (E == 0.0) return i_top_;
        throw DomainError("action_of_energy: E above the saddle");
    }
    if (E <= se_.e_min) {
        if (E < se_.e_min * (1.0 + 1e-14)) throw DomainError("action_of_energy: E below the well bottom");
        return 0.0;
    }
    const double a = 2.0 * p_.lam - p_.delta, b = 2.0 * p_.lam + p_.delta;
    const double s = std::min(std::sqrt(-p_.g * E), a);
    const double w = a - s;
    auto f = [&](double tau) {
        double st = std::sin(tau);
        double y = s + w * st * st;
        return st * st * std::sqrt((y + s) / (b + y));
    };
    double err = 0.0;
    double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, pi / 2, 12, 1e-13, &err);
    return 4.0 * w / (pi * p_.g) * val;
}

double WellGeometry::energy_of_action(double I) const {
    if (I < 0.0) throw DomainError("energy_of_action: negative action");
    if (I == 0.0) return se_.e_min;
    if (I >= i_top_) throw DomainError("energy_of_action: action at or above the separatrix");
    double lo = se_.e_min, hi = 0.0;
    double E = std::min(se_.e_min + se_.omega_min * I, 0.5 * se_.e_min);
    if (E <= lo) E = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = action_of_energy(E) - I;
        if (f == 0.0) return E;
        if (f < 0.0) lo = E;
        else hi = E;
        double step = f * 2.0 * pi / period(E, p_);
        double next = E - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - E) <= 1e-15 * std::abs(E) || hi - lo <= 4e-16 * std::abs(lo)) return next;
        E = next;
    }
    throw ConvergenceError("energy_of_action: inversion did not converge");
}

OrbitState WellGeometry::orbit_at_energy(double E) const {
    OrbitState o;
    o.E = E;
    o.I = action_of_energy(E);
    o.times = char_times(E, p_);
    o.omega = o.times.omega();
    o.domega_dI = -std::pow(o.omega, 3) / (2.0 * pi) * period_derivative(E, p_);
    o.p_less = 2.0 * o.omega * o.times.tP.imag();
    o.p_greater = 2.0 * o.omega * (o.times.tS.imag() - o.times.tP.imag());
    return o;
}

OrbitState WellGeometry::orbit(double I) const {
    if (!(I > 0.0)) throw DomainError("orbit: action must be positive");
    OrbitState o = orbit_at_energy(energy_of_action(I));
    o.I = I;
    return o;
}

double WellGeometry::omega(double I) const {
    if (I == 0.0) return se_.omega_min;
    return 2.0 * pi / period(energy_of_action(I), p_);
}

double WellGeometry::domega_dI(double I) const {
    if (I == 0.0) return domega_dI_bottom();
    double E = energy_of_action(I);
    double w = 2.0 * pi / period(E, p_);
    return -std::pow(w, 3) / (2.0 * pi) * period_derivative(E, p_);
}

double WellGeometry::domega_dI_bottom() const {
    return -p_.g * (8.0 * p_.lam - p_.delta) / (4.0 * (2.0 * p_.lam - p_.delta));
}

double WellGeometry::noise_slope_bottom() const { return se_.omega_bar / se_.omega_min; }

cplx WellGeometry::fourier_coefficient(const OrbitState& o, int n) const {
    const cplx i1{0.0, 1.0};
    const CharTimes& t = o.times;
    cplx A = i1 * o.omega / std::sqrt(p_.lam * p_.g);
    double w = o.omega * n;
    if (n >= 0) return A * std::exp(i1 * w * t.tP) / (1.0 + std::exp(i1 * w * t.tS));
    return A * std::exp(i1 * w * (t.tP - t.tS)) / (1.0 + std::exp(-i1 * w * t.tS));
}

FourierTable WellGeometry::fourier_table_unchecked(const OrbitState& o, int n_max) const {
    if (n_max < 1) throw ValidationError("n_max", "must be at least 1");
    FourierTable tab;
    tab.I = o.I;
    tab.n_max = n_max;
    tab.c.resize(2 * static_cast<std::size_t>(n_max) + 1);
    double s1 = 0.0, s2 = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        cplx c = fourier_coefficient(o, n);
        tab.c[static_cast<std::size_t>(n + n_max)] = c;
        s1 += n * std::norm(c);
        s2 += double(n) * n * std::norm(c);
    }
    HarmonicSums hs(o, p_);
    double gamma = hs.positive(2, 0.0) + hs.negative(2, 0.0);
    tab.residual_action = std::abs(s1 - o.I) / o.I;
    tab.residual_noise = std::abs(s2 - gamma) / gamma;
    return tab;
}

FourierTable WellGeometry::fourier_table(double I, int n_max) const {
    FourierTable tab = fourier_table_unchecked(orbit(I), n_max);
    if (tab.residual_action > sum_rule_tolerance || tab.residual_noise > sum_rule_tolerance)
        throw TruncationError("fourier_table: sum rule residual above tolerance", n_max);
    return tab;
}

FourierTable WellGeometry::fourier_table_adaptive(double I, int n_max) const {
    OrbitState o = orbit(I);
    for (; n_max <= (1 << 16); n_max *= 2) {
        FourierTable tab = fourier_table_unchecked(o, n_max);
        if (tab.residual_action <= sum_rule_tolerance && tab.residual_noise <= sum_rule_tolerance) return tab;
    }
    throw TruncationError("fourier_table_adaptive: sum rules not met", n_max);
}

double WellGeometry::noise_kernel(double I) const {
    if (I == 0.0) return 0.0;
    OrbitState o = orbit(I);
    HarmonicSums hs(o, p_);
    return hs.positive(2, 0.0) + hs.negative(2, 0.0);
}

std::pair<double, double> WellGeometry::convergence_radii(double I) const {
    OrbitState o = orbit(I);
    return {o.p_less, o.p_greater};
}

}  // namespace pslip
