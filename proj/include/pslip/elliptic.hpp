#pragma once

#include <complex>

#include "pslip/params.hpp"

namespace pslip {

using cplx = std::complex<double>;

// Side of the cut m in (1, inf) from which a real modulus is approached.
enum class CutSide { below, above, reject };

// Complete elliptic integral K(m) (parameter convention, K(0) = pi/2).
// Analytic off the cut; on the cut the requested side is taken.
[[nodiscard]] cplx elliptic_k(cplx m, CutSide side = CutSide::below);
[[nodiscard]] double elliptic_k(double m);
// K(1 - m) for real m, accurate when |m| is below machine epsilon.
[[nodiscard]] cplx elliptic_k_complement(double m, CutSide side = CutSide::below);

// Carlson symmetric forms, real arguments.
[[nodiscard]] double carlson_rf(double x, double y, double z);
[[nodiscard]] double carlson_rd(double x, double y, double z);

// Incomplete F(phi | m) for real phi in [0, pi/2] and m in [0, 1].
[[nodiscard]] double elliptic_f(double phi, double m);
// dK/dm for real m < 1.
[[nodiscard]] double elliptic_k_derivative(double m);

struct Jacobi {
    cplx sn, cn, dn;
};

// sn, cn, dn for complex argument and parameter. Throws PoleError within
// 1e-6 (in lattice coordinates) of a pole.
[[nodiscard]] Jacobi jacobi(cplx u, cplx m);

// Orbit constants of H0 at energy E.
struct OrbitShape {
    double s;       // sqrt(g |E|)
    double m;       // Jacobi parameter, real side of the -i0 prescription
    double kp, km;  // sqrt(2 lam - delta +- s)
};

struct SpecialEnergies {
    double e_min;       // bottom of the well
    double e_d;         // second stationary value, -(2 lam + delta)^2 / g
    double omega_min;   // small-oscillation frequency
    double omega_bar;   // 4 lam - delta
    double beta;        // Bogoliubov angle
};

struct CharTimes {
    double t1;   // real period
    cplx t2;     // complex period, Re(t2) in {0, t1}
    cplx tS;     // phi(t + tS) = -phi(t)
    cplx tP;     // pole with Re = t1/2, 0 < Im < Im(t2)/4
    cplx tQ;     // purely imaginary quasi-period
    [[nodiscard]] double omega() const;
};

[[nodiscard]] SpecialEnergies special_energies(const OscParams& p);
[[nodiscard]] OrbitShape orbit_shape(double E, const OscParams& p);
[[nodiscard]] CharTimes char_times(double E, const OscParams& p);
// d t1 / dE at fixed parameters.
[[nodiscard]] double period_derivative(double E, const OscParams& p);

[[nodiscard]] double h0(cplx phi, const OscParams& p);
// Right-hand side of i dphi/dt = dH0/dconj(phi).
[[nodiscard]] cplx h0_flow(cplx phi, const OscParams& p);

// Closed-form trajectory phi(t; E), analytic in complex t. At t = 0 the
// orbit sits on the imaginary axis on the far side from the saddle.
[[nodiscard]] cplx classical_solution(cplx t, double E, const OscParams& p);
[[nodiscard]] cplx classical_solution(cplx t, double E, const OscParams& p, const CharTimes& ct);

}  // namespace pslip

namespace pslip {
// Real period t1(E), valid on the closed interval [E_min, 0) including E_D.
[[nodiscard]] double period(double E, const OscParams& p);
}  // namespace pslip
