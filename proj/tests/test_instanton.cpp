#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "pslip/errors.hpp"
#include "pslip/instanton.hpp"
#include "test_support.hpp"

using namespace pslip;
using pslip::test::params;

namespace {

OscParams with_t(OscParams p, double T) {
    p.temperature = T;
    return p;
}


double max_residual(const InstantonPath& path) {
    double r = 0.0;
    for (const auto& s : path.samples)
        if (!s.singular && std::isfinite(s.residual)) r = std::max(r, s.residual);
    return r;
}

}  // namespace

TEST_CASE("bottom momenta") {
    WellGeometry geo(params(0.5, 0.3, 1.0));
    CHECK(classical_p_star(geo, 1.0) == doctest::Approx(0.98431).epsilon(1e-4));
    CHECK(quantum_p_star(geo, 0.0) == doctest::Approx(4.83974).epsilon(1e-5));
    // large n_B approaches the classical value at T = omega_p n_B
    CHECK(quantum_p_star(geo, 200.0) == doctest::Approx(classical_p_star(geo, 200.0)).epsilon(1e-4));
}

TEST_CASE("classical path solves K0 = 0 and drives I up at 2 kappa I") {
    OscParams p = with_t(params(0.5, 0.3, 1.0), 1.0);
    WellGeometry geo(p);
    auto path = classical_instanton(geo, 1.0);
    CHECK(max_residual(path) < 1e-8);
    EffectiveHamiltonian h(geo, Mode::classical);
    for (double x : {0.1, 0.4, 0.8, 0.97}) {
        double I = x * geo.i_top();
        CHECK(h.dK0_dp(I, path.p_at(I)) == doctest::Approx(2.0 * p.kappa * I).epsilon(1e-9));
    }
}

TEST_CASE("T = 0 path solves K_l = 0 and drives I up at 2 kappa I") {
    for (double delta : {0.3, -0.4}) {
        OscParams p = params(0.5, delta, 1.0);
        WellGeometry geo(p);
        auto path = quantum_t0_instanton(geo);
        CHECK(max_residual(path) < 1e-8);
        EffectiveHamiltonian h(geo, Mode::quantum);
        for (double x : {0.1, 0.4, 0.8}) {
            double I = x * geo.i_top();
            if (path.i_singular && std::abs(I - *path.i_singular) < 1e-3 * geo.i_top()) continue;
            CHECK(h.dK0_dp(I, path.p_at(I)) == doctest::Approx(2.0 * p.kappa * I).epsilon(1e-7));
        }
    }
}

TEST_CASE("reduced actions are scale invariant") {
    OscParams a = with_t(params(0.5, 0.3, 1.0), 1.0);
    OscParams b = with_t(params(1.3, 0.78, 0.4), 0.37);
    b.omega_p = 0.9;
    WellGeometry ga(a), gb(b);
    double ra = reduced_action(classical_instanton(ga, 1.0), a);
    double rb = reduced_action(classical_instanton(gb, 0.37), b);
    CHECK(ra == doctest::Approx(rb).epsilon(1e-8));
    double qa = reduced_action(quantum_t0_instanton(ga), a);
    double qb = reduced_action(quantum_t0_instanton(gb), b);
    CHECK(qa == doctest::Approx(qb).epsilon(1e-8));
    // T = 0 with delta < 0 keeps the log singularity at I_D
    OscParams c = params(0.5, -0.4, 1.0), d = params(2.0, -1.6, 3.0);
    WellGeometry gc(c), gd(d);
    CHECK(reduced_action(quantum_t0_instanton(gc), c) ==
          doctest::Approx(reduced_action(quantum_t0_instanton(gd), d)).epsilon(1e-8));
}

TEST_CASE("classical action agrees with an energy-variable quadrature") {
    OscParams p = with_t(params(0.5, 0.3, 1.0), 1.0);
    WellGeometry geo(p);
    auto path = classical_instanton(geo, 1.0);
    double err = 0.0;
    double s_i = action_integral(path, &err);
    auto se = special_energies(p);
    boost::math::quadrature::tanh_sinh<double> ts;
    double s_e = -ts.integrate(
        [&](double E) {
            double I = geo.action_of_energy(E);
            return path.p_at(I) * period(E, p) / (2.0 * std::numbers::pi);
        },
        se.e_min, 0.0, 1e-12);
    CHECK(s_i == doctest::Approx(s_e).epsilon(1e-8));
    CHECK(err < 1e-8 * std::abs(s_i));
}

TEST_CASE("classical action scales as 1/T") {
    OscParams p = with_t(params(0.5, 0.3, 1.0), 1.0);
    WellGeometry geo(p);
    double s1 = classical_instanton(geo, 1.0).action;
    double s4 = classical_instanton(geo, 4.0).action;
    CHECK(s1 == doctest::Approx(4.0 * s4).epsilon(1e-10));
}

TEST_CASE("fragility follows E_F = -4 lam (lam - delta) / g") {
    for (double r : {-0.8, -0.4, -0.1, 0.2, 0.3, 0.45}) {
        for (auto [lam, g] : {std::pair{0.5, 1.0}, std::pair{1.2, 0.3}}) {
            OscParams p = params(lam, 2.0 * lam * r, g);
            WellGeometry geo(p);
            auto i_f = fragility_action(geo);
            REQUIRE(i_f.has_value());
            double e_f = geo.energy_of_action(*i_f);
            CHECK(e_f == doctest::Approx(-4.0 * lam * (lam - p.delta) / g).epsilon(1e-8));
            if (r < 0) CHECK(*i_f < *geo.i_d());
        }
    }
    for (double r : {0.5, 0.6, 0.8}) CHECK_FALSE(fragility_action(WellGeometry(params(0.5, r, 1.0))).has_value());
    // delta = 0: fragile from the bottom
    auto z = fragility_action(WellGeometry(params(0.5, 0.0, 1.0)));
    REQUIRE(z.has_value());
    CHECK(*z == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("fragility curve is monotone") {
    std::vector<double> ratios;
    for (int k = 0; k <= 38; ++k) ratios.push_back(-0.95 + 0.05 * k);
    auto curve = fragility_curve(ratios);
    double prev = -1e300;
    for (const auto& fp : curve) {
        if (fp.ratio < 0.5 - 1e-12) {
            REQUIRE(fp.e_f.has_value());
            CHECK(*fp.e_f > prev);
            prev = *fp.e_f;
        } else {
            CHECK_FALSE(fp.e_f.has_value());
        }
    }
}

TEST_CASE("T -> 0 path switches to the pole branch at I_F") {
    WellGeometry geo(params(0.5, 0.3, 1.0));
    auto p0 = quantum_t0_instanton(geo);
    auto pt = quantum_tto0_instanton(geo);
    REQUIRE(pt.i_f.has_value());
    double i_f = *pt.i_f;
    CHECK(pt.p_at(i_f * (1 - 1e-9)) == doctest::Approx(pt.p_at(i_f * (1 + 1e-9))).epsilon(1e-6));
    CHECK(pt.p_at(0.5 * i_f) == doctest::Approx(p0.p_at(0.5 * i_f)).epsilon(1e-12));
    CHECK(pt.p_at(2.0 * i_f) < p0.p_at(2.0 * i_f));
    CHECK(std::abs(pt.action) < std::abs(p0.action));

    WellGeometry stable(params(0.5, 0.6, 1.0));
    auto s0 = quantum_t0_instanton(stable);
    auto st = quantum_tto0_instanton(stable);
    CHECK_FALSE(st.i_f.has_value());
    CHECK(st.action == doctest::Approx(s0.action).epsilon(1e-12));
}

TEST_CASE("T = 0 path with delta < 0 diverges at I_D and stays integrable") {
    WellGeometry geo(params(0.5, -0.4, 1.0));
    auto path = quantum_t0_instanton(geo);
    REQUIRE(path.i_singular.has_value());
    CHECK(*path.i_singular == doctest::Approx(*geo.i_d()).epsilon(1e-12));
    CHECK(path.p_at(*geo.i_d() * (1 - 1e-6)) > path.p_at(*geo.i_d() * (1 - 1e-3)));
    CHECK(std::isfinite(path.action));
    CHECK(path.action_error < 1e-6 * std::abs(path.action));
}

TEST_CASE("finite-T quantum path limits") {
    {
        OscParams p = params(0.5, 0.3, 1.0);
        WellGeometry geo(p);
        auto q = quantum_finite_t_instanton(geo, 50.0);
        auto c = classical_instanton(geo, 50.0);
        CHECK(max_residual(q) < 1e-8);
        double worst = 0.0;
        for (double x : {0.05, 0.3, 0.6, 0.9}) {
            double I = x * geo.i_top();
            worst = std::max(worst, std::abs(q.p_at(I) / c.p_at(I) - 1.0));
        }
        CHECK(worst < 0.03);
    }
    {
        WellGeometry geo(params(0.5, 0.6, 1.0));
        auto q = quantum_finite_t_instanton(geo, 1e-6);
        auto z = quantum_t0_instanton(geo);
        CHECK(q.action == doctest::Approx(z.action).epsilon(0.01));
    }
}

TEST_CASE("regime ordering") {
    WellGeometry geo(params(0.5, 0.3, 1.0));
    double prev = std::abs(quantum_t0_instanton(geo).action);
    for (double n_B : {0.01, 0.1, 1.0, 10.0}) {
        double s = std::abs(quantum_finite_t_instanton(geo, n_B).action);
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("phase portrait") {
    WellGeometry geo(with_t(params(0.5, 0.3, 1.0), 1.0));
    CHECK_THROWS_AS((void)phase_portrait(geo, Mode::classical, 32, 64), ValidationError);
    auto pp = phase_portrait(geo, Mode::classical);
    CHECK(pp.n_i == 64);
    CHECK(pp.k0.size() == 64u * 64u);
    EffectiveHamiltonian h(geo, Mode::classical);
    // K0 and its gradient vanish at the two I = 0 fixed points
    for (double p : {0.0, pp.instanton.p_star}) CHECK(std::abs(h.dK0_dI_bottom(p)) < 1e-10);
    // K0 < 0 between p = 0 and the instanton, > 0 outside
    int i = 20;
    double I = pp.i_axis[static_cast<std::size_t>(i)];
    double pi = pp.instanton.p_at(I);
    for (int j = 0; j < pp.n_p; ++j) {
        double p = pp.p_axis[static_cast<std::size_t>(j)];
        double k = pp.at(i, j);
        if (p > 1e-9 && p < pi * (1 - 1e-6)) CHECK(k < 0);
        if (p > pi * (1 + 1e-6) || p < -1e-9) CHECK(k > 0);
    }

    WellGeometry qgeo(params(0.5, -0.4, 1.0));
    auto qp = phase_portrait(qgeo, Mode::quantum);
    REQUIRE(qp.divergence_i.has_value());
    bool any_nan = false;
    for (double v : qp.k0) any_nan = any_nan || std::isnan(v);
    CHECK(any_nan);
}
