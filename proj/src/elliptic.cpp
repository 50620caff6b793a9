#include "pslip/elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "pslip/errors.hpp"

namespace pslip {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I1{0.0, 1.0};
constexpr double pole_tolerance = 1e-6;

cplx agm(cplx a, cplx b) {
    for (int it = 0; it < 64; ++it) {
        if (std::abs(a - b) <= 1e-16 * std::abs(a)) break;
        cplx a1 = 0.5 * (a + b);
        cplx b1 = std::sqrt(a * b);
        if (std::abs(a1 - b1) > std::abs(a1 + b1)) b1 = -b1;
        a = a1;
        b = b1;
    }
    return a;
}

double frac_distance(double x) { return std::abs(x - std::round(x)); }

// Lattice coordinates (alpha, beta) of u in the basis (e1, e2).
std::array<double, 2> lattice_coords(cplx u, cplx e1, cplx e2) {
    double det = e1.real() * e2.imag() - e2.real() * e1.imag();
    double a = (u.real() * e2.imag() - e2.real() * u.imag()) / det;
    double b = (e1.real() * u.imag() - u.real() * e1.imag()) / det;
    return {a, b};
}

// |m| <= 1, Re m >= 0. Argument reduced mod (2K, 2iK') then Landen descent.
Jacobi jacobi_core(cplx u, cplx m, bool check_poles) {
    cplx K = elliptic_k(m);
    cplx Kp = elliptic_k(1.0 - m);
    cplx e1 = 2.0 * K, e2 = 2.0 * I1 * Kp;
    auto [alpha, beta] = lattice_coords(u, e1, e2);
    if (check_poles && frac_distance(alpha) < pole_tolerance && frac_distance(beta - 0.5) < pole_tolerance)
        throw PoleError("jacobi: argument within tolerance of a pole");
    double j = std::round(alpha), l = std::round(beta);
    u -= j * e1 + l * e2;
    double sgn_sn = std::fmod(std::abs(j), 2.0) == 1.0 ? -1.0 : 1.0;
    double sgn_dn = std::fmod(std::abs(l), 2.0) == 1.0 ? -1.0 : 1.0;
    double sgn_cn = sgn_sn * sgn_dn;

    std::vector<cplx> ks;
    cplx kp = std::sqrt(1.0 - m);
    cplx scale = 1.0;
    for (int it = 0; it < 40; ++it) {
        cplx k1 = (1.0 - kp) / (1.0 + kp);
        kp = 2.0 * std::sqrt(kp) / (1.0 + kp);
        ks.push_back(k1);
        scale *= 1.0 + k1;
        if (std::abs(k1) < 1e-10) break;
    }
    cplx w = u / scale;
    cplx mN = ks.back() * ks.back();
    cplx sw = std::sin(w), cw = std::cos(w);
    cplx corr = 0.25 * mN * (w - sw * cw);
    cplx s = sw - corr * cw;
    cplx c = cw + corr * sw;
    cplx d = 1.0 - 0.5 * mN * sw * sw;
    for (auto it = ks.rbegin(); it != ks.rend(); ++it) {
        cplx k1 = *it;
        cplx den = 1.0 + k1 * s * s;
        cplx sn = (1.0 + k1) * s / den;
        cplx cn = c * d / den;
        cplx dn = (1.0 - k1 * s * s) / den;
        s = sn;
        c = cn;
        d = dn;
    }
    return {sgn_sn * s, sgn_cn * c, sgn_dn * d};
}

Jacobi jacobi_impl(cplx u, cplx m, bool check_poles) {
    if (m == cplx(0.0)) return {std::sin(u), std::cos(u), 1.0};
    if (m == cplx(1.0)) {
        cplx ch = std::cosh(u);
        if (check_poles && std::abs(ch) < pole_tolerance) throw PoleError("jacobi: pole at m = 1");
        return {std::tanh(u), 1.0 / ch, 1.0 / ch};
    }
    if (std::abs(m) > 1.0) {
        cplx k = std::sqrt(m);
        Jacobi r = jacobi_impl(u * k, 1.0 / m, check_poles);
        return {r.sn / k, r.dn, r.cn};
    }
    if (m.real() < 0.0) {
        cplx mu = -m / (1.0 - m);
        cplx r = std::sqrt(1.0 - m);
        Jacobi j = jacobi_impl(u * r, mu, check_poles);
        if (check_poles) {
            // Zeros of dn(.|mu) sit at K + iK' modulo (2K, 2iK').
            cplx K = elliptic_k(mu), Kp = elliptic_k(1.0 - mu);
            auto [a, b] = lattice_coords(u * r, 2.0 * K, 2.0 * I1 * Kp);
            if (frac_distance(a - 0.5) < pole_tolerance && frac_distance(b - 0.5) < pole_tolerance)
                throw PoleError("jacobi: argument within tolerance of a pole");
        }
        return {j.sn / (r * j.dn), j.cn / j.dn, 1.0 / j.dn};
    }
    return jacobi_core(u, m, check_poles);
}

}  // namespace

cplx elliptic_k(cplx m, CutSide side) {
    if (m == cplx(1.0)) throw DomainError("elliptic_k: logarithmic singularity at m = 1");
    if (m.imag() == 0.0 && m.real() > 1.0) {
        if (side == CutSide::reject) throw BranchError("elliptic_k: m on the cut (1, inf) without side");
        double x = m.real();
        double re = elliptic_k(1.0 / x) / std::sqrt(x);
        double im = elliptic_k(1.0 - 1.0 / x) / std::sqrt(x);
        return side == CutSide::below ? cplx(re, -im) : cplx(re, im);
    }
    return pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

double elliptic_k(double m) {
    if (!(m < 1.0)) throw DomainError("elliptic_k: real parameter must be below 1");
    return pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)).real());
}

cplx elliptic_k_complement(double m, CutSide side) {
    if (m == 0.0) throw DomainError("elliptic_k: logarithmic singularity at m = 1");
    if (m > 0.0) return pi / (2.0 * agm(1.0, std::sqrt(m)).real());
    if (side == CutSide::reject) throw BranchError("elliptic_k: m on the cut (1, inf) without side");
    // 1 - m = x > 1; 1/x and 1 - 1/x formed without cancellation
    const double x = 1.0 - m, q = -m / x;
    double re = pi / (2.0 * agm(1.0, std::sqrt(q)).real()) / std::sqrt(x);
    double im = elliptic_k(q) / std::sqrt(x);
    return side == CutSide::below ? cplx(re, -im) : cplx(re, im);
}

double carlson_rf(double x, double y, double z) {
    if (x < 0 || y < 0 || z < 0 || (x + y == 0) || (x + z == 0) || (y + z == 0))
        throw DomainError("carlson_rf: invalid arguments");
    for (int it = 0; it < 100; ++it) {
        double mu = (x + y + z) / 3.0;
        double dx = 1.0 - x / mu, dy = 1.0 - y / mu, dz = 1.0 - z / mu;
        double eps = std::max({std::abs(dx), std::abs(dy), std::abs(dz)});
        if (eps < 1e-4) {
            double e2 = dx * dy - dz * dz;
            double e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(mu);
        }
        double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        double lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    throw ConvergenceError("carlson_rf: no convergence");
}

double carlson_rd(double x, double y, double z) {
    if (x < 0 || y < 0 || z <= 0 || (x + y == 0)) throw DomainError("carlson_rd: invalid arguments");
    double sum = 0.0, fac = 1.0;
    for (int it = 0; it < 100; ++it) {
        double mu = (x + y + 3.0 * z) / 5.0;
        double dx = 1.0 - x / mu, dy = 1.0 - y / mu, dz = 1.0 - z / mu;
        double eps = std::max({std::abs(dx), std::abs(dy), std::abs(dz)});
        if (eps < 1e-4) {
            double ea = dx * dy, eb = dz * dz;
            double ec = ea - eb, ed = ea - 6.0 * eb, ee = ed + ec + ec;
            double c1 = 3.0 / 14.0, c2 = 1.0 / 6.0, c3 = 9.0 / 22.0, c4 = 3.0 / 26.0;
            double s1 = ed * (-c1 + 0.25 * c3 * ed - 1.5 * 0.25 * c4 * dz * ee);
            double s2 = dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea));
            return 3.0 * sum + fac * (1.0 + s1 + s2) / (mu * std::sqrt(mu));
        }
        double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        double lam = sx * sy + sx * sz + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    throw ConvergenceError("carlson_rd: no convergence");
}

double elliptic_f(double phi, double m) {
    double s = std::sin(phi), c = std::cos(phi);
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0);
}

double elliptic_k_derivative(double m) {
    if (!(m < 1.0)) throw DomainError("elliptic_k_derivative: m must be below 1");
    return (elliptic_k(m) - carlson_rd(0.0, 1.0 - m, 1.0) / 3.0) / (2.0 * (1.0 - m));
}

Jacobi jacobi(cplx u, cplx m) { return jacobi_impl(u, m, true); }

double CharTimes::omega() const { return 2.0 * pi / t1; }

SpecialEnergies special_energies(const OscParams& p) {
    double a = 2.0 * p.lam - p.delta, b = 2.0 * p.lam + p.delta;
    SpecialEnergies s{};
    s.e_min = -a * a / p.g;
    s.e_d = -b * b / p.g;
    s.omega_min = 2.0 * std::sqrt(2.0 * p.lam * a);
    s.omega_bar = 4.0 * p.lam - p.delta;
    s.beta = 0.5 * std::atanh(p.delta / s.omega_bar);
    return s;
}

OrbitShape orbit_shape(double E, const OscParams& p) {
    double a = 2.0 * p.lam - p.delta, b = 2.0 * p.lam + p.delta;
    if (!(E < 0.0)) throw DomainError("orbit: energy must lie below the saddle (E < 0)");
    double s = std::sqrt(-p.g * E);
    if (s > a * (1.0 + 1e-14)) throw DomainError("orbit: energy below the well bottom");
    s = std::min(s, a);
    OrbitShape o{};
    o.s = s;
    o.m = -(a - s) * (b - s) / (8.0 * p.lam * s);
    o.kp = std::sqrt(a + s);
    o.km = std::sqrt(a - s);
    return o;
}

CharTimes char_times(double E, const OscParams& p) {
    OrbitShape o = orbit_shape(E, p);
    if (o.km == 0.0) throw DomainError("char_times: E at the well bottom");
    if (o.m == 0.0) throw DomainError("char_times: E at the second stationary point");
    double c = std::sqrt(2.0 / (p.lam * o.s));
    double au = std::sqrt(8.0 * p.lam * o.s);
    double K = elliptic_k(o.m);
    cplx Kc = elliptic_k_complement(o.m, CutSide::above);

    CharTimes ct{};
    ct.t1 = c * K;
    cplx t2 = I1 * c * Kc;
    double re = t2.real() - 2.0 * ct.t1 * std::floor(t2.real() / (2.0 * ct.t1) + 1e-9);
    if (std::abs(re - ct.t1) < 1e-9 * ct.t1) re = ct.t1;
    if (std::abs(re) < 1e-9 * ct.t1 || std::abs(re - 2.0 * ct.t1) < 1e-9 * ct.t1) re = 0.0;
    ct.t2 = cplx(re, t2.imag());
    ct.tS = (I1 * Kc + K) / std::sqrt(2.0 * p.lam * o.s);

    // Pole: cn(2K + iv | m) = -1 / cn(v | 1 - m) = -kp/km.
    double d = o.km / o.kp;
    double mc = 1.0 - o.m;
    double v;
    if (mc < 1.0) {
        v = elliptic_f(std::acos(d), mc);
    } else if (mc == 1.0) {
        v = std::acosh(1.0 / d);
    } else {
        double mu = 1.0 / mc;
        double s2 = (1.0 - d * d) / mu;
        if (s2 > 1.0) throw ConvergenceError("char_times: pole equation has no real root");
        v = elliptic_f(std::asin(std::sqrt(s2)), mu) / std::sqrt(mc);
    }
    ct.tP = cplx(0.5 * ct.t1, v / au);
    ct.tQ = cplx(0.0, 0.5 * ct.t2.imag() - 2.0 * ct.tP.imag());
    return ct;
}

double period_derivative(double E, const OscParams& p) {
    OrbitShape o = orbit_shape(E, p);
    double a = 2.0 * p.lam - p.delta, b = 2.0 * p.lam + p.delta;
    double s = o.s;
    double ms = a * b / (8.0 * p.lam * s * s) - 1.0 / (8.0 * p.lam);
    double dt1_ds = std::sqrt(2.0 / p.lam) *
                    (-0.5 * std::pow(s, -1.5) * elliptic_k(o.m) + elliptic_k_derivative(o.m) * ms / std::sqrt(s));
    return dt1_ds * (-p.g / (2.0 * s));
}

double h0(cplx phi, const OscParams& p) {
    double n = std::norm(phi);
    return p.delta * n + 2.0 * p.lam * (phi * phi).real() + 0.25 * p.g * n * n;
}

cplx h0_flow(cplx phi, const OscParams& p) {
    cplx grad = p.delta * phi + 2.0 * p.lam * std::conj(phi) + 0.5 * p.g * std::norm(phi) * phi;
    return -I1 * grad;
}

cplx classical_solution(cplx t, double E, const OscParams& p) {
    OrbitShape o = orbit_shape(E, p);
    if (o.km == 0.0) return {0.0, std::sqrt(2.0 * (2.0 * p.lam - p.delta) / p.g)};
    return classical_solution(t, E, p, char_times(E, p));
}

cplx classical_solution(cplx t, double E, const OscParams& p, const CharTimes& ct) {
    OrbitShape o = orbit_shape(E, p);
    const double h = ct.t2.imag();
    for (cplx q : {t - ct.tP, t - ct.tP + ct.tS}) {
        if (frac_distance(q.real() / ct.t1) < pole_tolerance && frac_distance(q.imag() / h) < pole_tolerance)
            throw PoleError("classical_solution: t within tolerance of a pole");
    }
    cplx u = std::sqrt(8.0 * p.lam * o.s) * t;
    Jacobi j = jacobi_impl(u, o.m, false);
    cplx num = 2.0 * I1 * std::sqrt(o.s) * j.dn - (o.kp * o.km / std::sqrt(2.0 * p.lam)) * j.sn;
    return std::sqrt(o.s / p.g) * num / (o.kp + o.km * j.cn);
}

}  // namespace pslip

namespace pslip {

double period(double E, const OscParams& p) {
    OrbitShape o = orbit_shape(E, p);
    return std::sqrt(2.0 / (p.lam * o.s)) * elliptic_k(o.m);
}

}  // namespace pslip
