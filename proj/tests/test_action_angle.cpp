#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>

#include "doctest.h"
#include "pslip/action_angle.hpp"
#include "pslip/errors.hpp"
#include "test_support.hpp"

using namespace pslip;
using pslip::test::params;

namespace {

constexpr double pi = std::numbers::pi;

double action_by_period(const OscParams& p, double E) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double e0 = special_energies(p).e_min;
    return ts.integrate([&](double e) { return period(e, p) / (2 * pi); }, e0, E, 1e-14);
}

}  // namespace

TEST_CASE("action agrees with the integral of dE / omega") {
    for (double delta : {0.3, -0.4, 0.8, -0.9}) {
        OscParams p = params(0.5, delta, 1.0);
        WellGeometry geo(p);
        for (double frac : {0.95, 0.6, 0.3, 0.05}) {
            double E = geo.special().e_min * frac;
            CHECK(geo.action_of_energy(E) == doctest::Approx(action_by_period(p, E)).epsilon(1e-10));
        }
    }
}

TEST_CASE("separatrix action") {
    WellGeometry geo0(params(0.5, 0.0, 1.0));
    CHECK(geo0.i_top() == doctest::Approx(2.0 / pi).epsilon(1e-15));
    for (double delta : {0.3, -0.6, 0.9}) {
        WellGeometry geo(params(0.5, delta, 1.0));
        CHECK(geo.action_of_energy(-1e-15) == doctest::Approx(geo.i_top()).epsilon(1e-11));
    }
}

TEST_CASE("energy of action inverts the action") {
    WellGeometry geo(params(0.7, -0.5, 1.3));
    for (double frac : {1e-8, 1e-3, 0.2, 0.5, 0.9, 0.999}) {
        double I = frac * geo.i_top();
        double E = geo.energy_of_action(I);
        CHECK(geo.action_of_energy(E) == doctest::Approx(I).epsilon(1e-12));
    }
    CHECK(geo.energy_of_action(0.0) == geo.special().e_min);
    CHECK_THROWS_AS((void)geo.energy_of_action(geo.i_top()), DomainError);
    CHECK_THROWS_AS((void)geo.energy_of_action(-0.1), DomainError);
}

TEST_CASE("frequency near the bottom and its slope") {
    OscParams p = params(0.5, 0.3, 1.0);
    WellGeometry geo(p);
    CHECK(geo.domega_dI_bottom() == doctest::Approx(-1.32143).epsilon(1e-5));
    double I = 1e-6;
    CHECK(geo.omega(I) == doctest::Approx(geo.special().omega_min).epsilon(2e-6));
    CHECK(geo.domega_dI(1e-5) == doctest::Approx(geo.domega_dI_bottom()).epsilon(1e-3));
    for (double frac : {0.1, 0.5, 0.9}) {
        double J = frac * geo.i_top(), h = 1e-5;
        double fd = (geo.omega(J + h) - geo.omega(J - h)) / (2 * h);
        CHECK(geo.domega_dI(J) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("frequency decreases monotonically to zero at the separatrix") {
    for (double delta : {0.3, -0.6}) {
        WellGeometry geo(params(0.5, delta, 1.0));
        double prev = geo.omega(0.0);
        for (int k = 1; k < 200; ++k) {
            double w = geo.omega(geo.i_top() * k / 200.0);
            CHECK(w < prev);
            prev = w;
        }
        CHECK(geo.omega(geo.i_top() * (1 - 1e-12)) < 0.25 * geo.special().omega_min);
    }
}

TEST_CASE("Fourier coefficients against reference values") {
    struct Row {
        double lam, delta, g, frac, c1, cm1, c3;
    };
    const Row rows[] = {
        {0.5, 0.3, 1, 0.5, -0.3851314218837016, -0.053032078490467436, -0.014066414287910918},
        {0.5, -0.4, 1, 0.9, -0.28845141753503943, 0.02269789694031747, -0.0022657928458701325},
        {0.5, -0.4, 1, 0.3, -0.74017199366267945, 0.017915652229675617, -0.066827530915041587},
        {1.3, 0.2, 0.7, 0.2, -1.1200376978719802, -0.13717629497229309, -0.10791508906770795},
    };
    for (const auto& r : rows) {
        WellGeometry geo(params(r.lam, r.delta, r.g));
        OrbitState o = geo.orbit_at_energy(geo.special().e_min * r.frac);
        CHECK(std::abs(geo.fourier_coefficient(o, 1) - cplx(0, r.c1)) < 1e-13);
        CHECK(std::abs(geo.fourier_coefficient(o, -1) - cplx(0, r.cm1)) < 1e-13);
        CHECK(std::abs(geo.fourier_coefficient(o, 3) - cplx(0, r.c3)) < 1e-13);
    }
}

TEST_CASE("closed-form coefficients match quadrature of the trajectory") {
    for (double delta : {0.3, -0.4}) {
        OscParams p = params(0.5, delta, 1.0);
        WellGeometry geo(p);
        for (double frac : {0.2, 0.7, 0.95}) {
            OrbitState o = geo.orbit(frac * geo.i_top());
            for (int n : {-3, -1, 0, 1, 2, 5}) {
                cplx q = test::angle_average(
                    [&](double th) {
                        return std::exp(cplx(0, n * th)) * classical_solution(th / o.omega, o.E, p, o.times);
                    },
                    512);
                CHECK(std::abs(q - geo.fourier_coefficient(o, n)) < 1e-12);
            }
        }
    }
}

TEST_CASE("coefficients are imaginary and c_{-n} vanishes at the second stationary energy") {
    WellGeometry geo(params(0.5, -0.4, 1.0));
    REQUIRE(geo.i_d());
    double id = *geo.i_d();
    OrbitState below = geo.orbit(id * (1 - 1e-3));
    OrbitState above = geo.orbit(id * (1 + 1e-3));
    // odd negative harmonics change sign through the zero, even ones touch it
    for (int n : {-1, -2, -3}) {
        cplx a = geo.fourier_coefficient(below, n), b = geo.fourier_coefficient(above, n);
        CHECK(std::abs(a.real()) < 1e-15);
        CHECK((a.imag() * b.imag() < 0.0) == (n % 2 != 0));
    }
    OrbitState near = geo.orbit(id * (1 + 1e-9));
    CHECK(std::abs(geo.fourier_coefficient(near, -1)) < 1e-6);
}

TEST_CASE("sum rules at n_max = 64") {
    auto start = std::chrono::steady_clock::now();
    for (double ratio : {-0.6, -0.4, 0.3, 0.6}) {
        OscParams p = params(0.5, 2 * 0.5 * ratio, 1.0);
        WellGeometry geo(p);
        for (int k = 1; k <= 30; ++k) {
            double I = 0.9 * geo.i_top() * k / 30.0;
            FourierTable t = geo.fourier_table(I, 64);
            CHECK(t.residual_action < 1e-6);
            CHECK(t.residual_noise < 1e-6);
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 10.0);
}

TEST_CASE("noise kernel equals the angle average of |dphi/dtheta|^2") {
    for (double delta : {0.3, -0.6}) {
        OscParams p = params(0.5, delta, 1.0);
        WellGeometry geo(p);
        for (double frac : {0.1, 0.6, 0.9}) {
            OrbitState o = geo.orbit(frac * geo.i_top());
            cplx q = test::angle_average(
                [&](double th) {
                    cplx z = classical_solution(th / o.omega, o.E, p, o.times);
                    return cplx(std::norm(h0_flow(z, p)) / (o.omega * o.omega));
                },
                1024);
            CHECK(geo.noise_kernel(o.I) == doctest::Approx(q.real()).epsilon(1e-11));
        }
    }
}

TEST_CASE("noise kernel slope at the bottom") {
    WellGeometry geo(params(0.5, 0.3, 1.0));
    CHECK(geo.noise_slope_bottom() == doctest::Approx(1.01595).epsilon(1e-5));
    double I = 1e-6;
    CHECK(geo.noise_kernel(I) / I == doctest::Approx(geo.noise_slope_bottom()).epsilon(1e-5));
}

TEST_CASE("truncation below the needed order is reported") {
    WellGeometry geo(params(0.5, 0.3, 1.0));
    CHECK_THROWS_AS((void)geo.fourier_table(0.8 * geo.i_top(), 4), TruncationError);
    FourierTable t = geo.fourier_table_adaptive(0.999 * geo.i_top());
    CHECK(t.residual_action < 1e-6);
}

TEST_CASE("convergence radii set the decay of the coefficients") {
    WellGeometry geo(params(0.5, 0.3, 1.0));
    OrbitState o = geo.orbit_at_energy(geo.special().e_min * 0.5);
    CHECK(o.p_less == doctest::Approx(3.3148).epsilon(1e-4));
    CHECK(o.p_greater == doctest::Approx(7.2802).epsilon(1e-4));
    double up = std::norm(geo.fourier_coefficient(o, 21)) / std::norm(geo.fourier_coefficient(o, 20));
    double dn = std::norm(geo.fourier_coefficient(o, -21)) / std::norm(geo.fourier_coefficient(o, -20));
    CHECK(-std::log(up) == doctest::Approx(o.p_less).epsilon(1e-6));
    CHECK(-std::log(dn) == doctest::Approx(o.p_greater).epsilon(1e-6));
}

TEST_CASE("resummed harmonic sums match direct summation") {
    for (double delta : {0.3, -0.4}) {
        WellGeometry geo(params(0.5, delta, 1.0));
        for (double frac : {0.3, 0.9, 0.999}) {
            OrbitState o = geo.orbit(frac * geo.i_top());
            HarmonicSums hs = geo.sums(o);
            for (double p : {0.0, 0.3 * o.p_less, -0.3 * std::min(o.p_less, o.p_greater), 0.97 * o.p_less}) {
                double pos = 0, neg = 0, pm = 0, nm = 0;
                for (int n = 1; n < 200000; ++n) {
                    double wp = std::norm(geo.fourier_coefficient(o, n));
                    double wn = std::norm(geo.fourier_coefficient(o, -n));
                    if (wp < 1e-300 && wn < 1e-300) break;
                    pos += n * wp * std::exp(-n * p);
                    pm += wp * std::expm1(-n * p);
                    if (p < 0.5 * o.p_greater) {
                        neg += n * wn * std::exp(n * p);
                        nm += wn * std::expm1(n * p);
                    }
                }
                CHECK(hs.positive(1, p) == doctest::Approx(pos).epsilon(1e-11));
                CHECK(hs.positive_expm1(p) == doctest::Approx(pm).epsilon(1e-11));
                if (p < 0.5 * o.p_greater) {
                    CHECK(hs.negative(1, p) == doctest::Approx(neg).epsilon(1e-11));
                    CHECK(hs.negative_expm1(p) == doctest::Approx(nm).epsilon(1e-11));
                }
                CHECK(hs.weight(3) == doctest::Approx(std::norm(geo.fourier_coefficient(o, 3))).epsilon(1e-13));
            }
            CHECK_THROWS_AS((void)hs.positive(1, -1.01 * o.p_less), StripExitError);
        }
    }
}

TEST_CASE("scaling covariance of the action") {
    // E = (2 lam^2/g) e, I = (lam/g) i at fixed delta / 2 lam
    WellGeometry a(params(0.5, 0.3, 1.0)), b(params(1.3, 0.78, 0.4));
    double ea = a.special().e_min * 0.37, eb = b.special().e_min * 0.37;
    CHECK(b.action_of_energy(eb) / (1.3 / 0.4) == doctest::Approx(a.action_of_energy(ea) / 0.5).epsilon(1e-12));
    CHECK(b.i_top() / (1.3 / 0.4) == doctest::Approx(a.i_top() / 0.5).epsilon(1e-14));
}
