#include <cmath>

#include "doctest.h"
#include "pslip/errors.hpp"
#include "pslip/keldysh.hpp"
#include "test_support.hpp"

using namespace pslip;
using pslip::test::params;

namespace {

OscParams with_nb(OscParams p, double nb) {
    p.n_bose = nb;
    return p;
}

OscParams with_T(OscParams p, double T) {
    p.temperature = T;
    return p;
}

}  // namespace

TEST_CASE("rates") {
    OscParams p = with_nb(params(0.5, 0.3, 1.0, 0.02), 0.4);
    EffectiveHamiltonian h(WellGeometry(p), Mode::quantum);
    CHECK(h.gamma_loss() - h.gamma_gain() == doctest::Approx(2 * p.kappa).epsilon(1e-15));
    OrbitState o = h.geometry().orbit(0.3);
    for (int n = -6; n <= 6; ++n) CHECK(h.rate(o, n) >= 0.0);
    EffectiveHamiltonian h0(WellGeometry(with_nb(params(0.5, 0.3, 1.0, 0.02), 0.0)), Mode::quantum);
    CHECK(h0.rate(o, -2) == doctest::Approx(h0.gamma_loss() * std::norm(h0.geometry().fourier_coefficient(o, -2))));

    double I = 1e-7;
    double beta = h.geometry().special().beta;
    double slope = h.gamma_loss() * std::pow(std::cosh(beta), 2) + h.gamma_gain() * std::pow(std::sinh(beta), 2);
    CHECK(h.rate(I, 1) / I == doctest::Approx(slope).epsilon(1e-6));
}

TEST_CASE("relaxation law from the rates and from dK0/dp") {
    for (double delta : {0.3, -0.6}) {
        for (double nb : {0.0, 0.7}) {
            OscParams p = with_nb(params(0.5, delta, 1.0, 0.013), nb);
            EffectiveHamiltonian h(WellGeometry(p), Mode::quantum);
            for (int k = 1; k <= 20; ++k) {
                OrbitState o = h.geometry().orbit(h.geometry().i_top() * k / 21.0);
                CHECK(h.drift(o) == doctest::Approx(2 * p.kappa * o.I).epsilon(1e-8));
                CHECK(-h.dK0_dp(o, 0.0) == doctest::Approx(2 * p.kappa * o.I).epsilon(1e-8));
                CHECK(h.K0(o, 0.0) == 0.0);
            }
        }
        OscParams c = with_T(params(0.5, delta, 1.0, 0.013), 0.3);
        EffectiveHamiltonian hc(WellGeometry(c), Mode::classical);
        OrbitState o = hc.geometry().orbit(0.2);
        CHECK(-hc.dK0_dp(o, 0.0) == doctest::Approx(2 * c.kappa * o.I).epsilon(1e-14));
    }
}

TEST_CASE("classical K0 closed form") {
    OscParams c = with_T(params(0.5, 0.3, 1.0, 0.02), 0.25);
    EffectiveHamiltonian h(WellGeometry(c), Mode::classical);
    double I = 0.2, p = 0.7;
    double want = -2 * c.kappa * p * I + 2 * c.kappa * 0.25 / c.omega_p * h.geometry().noise_kernel(I) * p * p;
    CHECK(h.K0(I, p) == doctest::Approx(want).epsilon(1e-14));
    CHECK_THROWS_AS(EffectiveHamiltonian(WellGeometry(params(0.5, 0.3, 1.0)), Mode::classical), ValidationError);
}

TEST_CASE("series and angle-integral forms of the quantum K0 agree") {
    for (double delta : {0.3, -0.6}) {
        OscParams p = with_nb(params(0.5, delta, 1.0), 0.3);
        EffectiveHamiltonian h(WellGeometry(p), Mode::quantum);
        for (double frac : {0.15, 0.55, 0.9}) {
            OrbitState o = h.geometry().orbit(frac * h.geometry().i_top());
            Strip s = h.strip(o);
            for (double x : {-0.8, -0.3, 0.25, 0.85}) {
                double mom = x > 0 ? x * s.upper : -x * s.lower;
                auto [sl, sg] = h.K_parts(o, mom);
                auto [il, ig] = h.K0_integral_rep(o, mom);
                double scale = h.K0_scale(o, mom);
                CHECK(std::abs(h.gamma_loss() * (sl - il) + h.gamma_gain() * (sg - ig)) < 1e-10 * scale);
                CHECK(std::abs(sl - il) < 1e-9 * std::abs(sl));
                // loss part at -p is the gain part at p
                auto [ml, mg] = h.K0_integral_rep(o, -mom);
                CHECK(ml == doctest::Approx(ig).epsilon(1e-10));
                CHECK(mg == doctest::Approx(il).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("the tunneling line annihilates the integrand") {
    OscParams p = params(0.5, 0.3, 1.0);
    WellGeometry geo(p);
    OrbitState o = geo.orbit(0.4 * geo.i_top());
    double tau = 0.5 * o.times.t2.imag();
    for (double t : {0.1, 0.9, 2.3}) {
        double a = std::norm(classical_solution(cplx(t, -tau), o.E, p, o.times));
        double b = std::norm(classical_solution(cplx(t, tau), o.E, p, o.times));
        double c = std::norm(classical_solution(t, o.E, p, o.times));
        CHECK(std::abs(a - c) < 1e-8 * c);
        CHECK(std::abs(b - c) < 1e-8 * c);
    }
    // for delta < 0 below E_D the contour average still vanishes
    OscParams q = params(0.5, -0.4, 1.0);
    EffectiveHamiltonian h(WellGeometry(q), Mode::quantum);
    OrbitState inner = h.geometry().orbit_at_energy(h.geometry().special().e_min * 0.6);
    double mom = inner.omega * inner.times.t2.imag();
    auto [kl, kg] = h.K0_integral_rep(inner, mom);
    CHECK(std::abs(kl) < 1e-8);
    CHECK(std::abs(kg) < 1e-8);
}

TEST_CASE("strip violations name the bound") {
    OscParams p = params(0.5, 0.3, 1.0);
    EffectiveHamiltonian h(WellGeometry(p), Mode::quantum);
    OrbitState o = h.geometry().orbit(0.3);
    Strip s = h.strip(o);
    CHECK(s.upper == doctest::Approx(o.p_greater));
    CHECK(s.lower == doctest::Approx(-o.p_less));
    CHECK_THROWS_WITH_AS((void)h.K0(o, s.upper), doctest::Contains("upper"), StripExitError);
    CHECK_THROWS_WITH_AS((void)h.K0(o, s.lower), doctest::Contains("lower"), StripExitError);
    EffectiveHamiltonian hT(WellGeometry(with_nb(p, 0.1)), Mode::quantum);
    Strip sT = hT.strip(o);
    CHECK(sT.upper == doctest::Approx(std::min(o.p_less, o.p_greater)));
    CHECK(sT.lower == doctest::Approx(-sT.upper));
}

TEST_CASE("drive term") {
    OscParams p = with_nb(params(0.5, 0.3, 1.0), 0.2);
    EffectiveHamiltonian h(WellGeometry(p), Mode::quantum);
    OrbitState o = h.geometry().orbit(0.35);
    DriveParams d{0.0, 1.1, 0.3};
    CHECK(h.K1(o, 0.4, 0.7, 1.2, d) == 0.0);
    d.alpha = 0.05;
    CHECK(h.K1(o, -0.4, 0.7, 1.2, d) == doctest::Approx(-h.K1(o, 0.4, 0.7, 1.2, d)).epsilon(1e-14));
    // relative gap between sinh and its linear term shrinks as p^2
    double r1 = std::abs(h.K1(o, 0.02, 0.7, 1.2, d) / h.K1_linearized(o, 0.02, 0.7, 1.2, d) - 1);
    double r2 = std::abs(h.K1(o, 0.01, 0.7, 1.2, d) / h.K1_linearized(o, 0.01, 0.7, 1.2, d) - 1);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(1e-3));
    OscParams c = with_T(params(0.5, 0.3, 1.0), 0.5);
    EffectiveHamiltonian hc(WellGeometry(c), Mode::classical);
    CHECK(hc.K1(o, 0.3, 0.7, 1.2, d) == doctest::Approx(h.K1_linearized(o, 0.3, 0.7, 1.2, d)).epsilon(1e-13));
}

TEST_CASE("classical limit of the quantum K0") {
    OscParams p = params(0.5, 0.3, 1.0, 0.01);
    WellGeometry geo(p);
    double I = 0.5 * geo.i_top();
    double r50 = classical_limit_check(p, I, 0.01 / 50, 50);
    double r100 = classical_limit_check(p, I, 0.01 / 100, 100);
    CHECK(r50 < 0.02);
    CHECK(r50 / r100 == doctest::Approx(2.0).epsilon(0.02));
    CHECK(classical_limit_check(p, I, 0.0, 50) == 0.0);
}
