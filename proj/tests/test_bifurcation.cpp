#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pslip/bifurcation.hpp"
#include "pslip/errors.hpp"
#include "test_support.hpp"

using namespace pslip;
using pslip::test::params;

namespace {

constexpr double pi = std::numbers::pi;

OscParams near_bifurcation(double eps, double kappa = 0.05) {
    OscParams p = params(0.5, 0.0, 1.0, kappa);
    p.delta = std::sqrt(4.0 * p.lam * p.lam - kappa * kappa) - 2.0 * p.lam * eps;
    return p;
}

BifurcationParams classical_b(double eps, double T) {
    OscParams p = near_bifurcation(eps);
    p.temperature = T;
    return bifurcation_params(p, Mode::classical);
}

BifurcationParams quantum_b(double eps, double n_B) {
    OscParams p = near_bifurcation(eps);
    p.n_bose = n_B;
    return bifurcation_params(p, Mode::quantum);
}

}  // namespace

TEST_CASE("complex gamma") {
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.3, 20.0}) CHECK(complex_gamma(x).real() == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
    CHECK(complex_gamma(-0.5).real() == doctest::Approx(std::tgamma(-0.5)).epsilon(1e-13));
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int k = 0; k < 50; ++k) {
        double y = dist(rng);
        double lhs = std::norm(complex_gamma(cplx(0.5, y)));
        CHECK(lhs == doctest::Approx(pi / std::cosh(pi * y)).epsilon(1e-12));
        double rhs1 = std::abs(y) < 1e-12 ? 1.0 : pi * y / std::sinh(pi * y);
        CHECK(std::norm(complex_gamma(cplx(1.0, y))) == doctest::Approx(rhs1).epsilon(1e-12));
    }
}

TEST_CASE("gamma product") {
    CHECK(gamma_product(0.0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
    for (double u : {0.3, 1.0, 4.0, 9.0}) {
        CHECK(gamma_product(u) == doctest::Approx(pi * std::sqrt(u / std::sinh(pi * u))).epsilon(1e-12));
        CHECK(gamma_product(-u) == doctest::Approx(gamma_product(u)).epsilon(1e-12));
    }
    double prev = gamma_product(0.0);
    for (int k = 1; k <= 400; ++k) {
        double v = gamma_product(0.025 * k);
        CHECK(v < prev);
        prev = v;
    }
    double slope = ls_decay_constant();
    CHECK(slope < -1.4);
    CHECK(slope > -pi / 2.0);
}

TEST_CASE("gamma product is the Fourier transform of the relaxation path") {
    BifurcationParams b = classical_b(0.02, 1.0);
    const double qm = potential_minimum(b);
    const double a = b.delta_b / b.kappa;
    auto dU = [&](double q) {
        double h = 1e-6 * qm;
        return (effective_potential(q + h, b) - effective_potential(q - h, b)) / (2.0 * h);
    };
    for (double u : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const double w = u * a;
        const double h = 0.005 / a;
        cplx s = 0.0;
        for (double t = -60.0 / a; t <= 40.0 / a; t += h) {
            double q = qm / std::sqrt(1.0 + std::exp(-2.0 * a * t));
            s += -dU(q) * std::exp(cplx(0.0, w * t));
        }
        s *= h;
        CHECK(std::abs(s) / qm == doctest::Approx(gamma_product(u) / std::sqrt(pi)).epsilon(1e-6));
    }
}

TEST_CASE("effective potential") {
    BifurcationParams b = classical_b(0.02, 1.0);
    const double qm = potential_minimum(b);
    CHECK(qm == doctest::Approx(b.kappa / (2.0 * b.lam)).epsilon(1e-15));
    CHECK(effective_potential(0.0, b) == 0.0);
    double h = 1e-6 * qm;
    CHECK(std::abs(effective_potential(qm + h, b) - effective_potential(qm - h, b)) / (2 * h) < 1e-9);
    CHECK(effective_potential(-qm, b) == doctest::Approx(effective_potential(qm, b)).epsilon(1e-15));
    CHECK(-effective_potential(qm, b) == doctest::Approx(barrier_height(b)).epsilon(1e-12));
}

TEST_CASE("base exponent") {
    for (auto b : {classical_b(0.02, 1.0), classical_b(0.05, 0.3), quantum_b(0.02, 0.0), quantum_b(0.03, 2.0)}) {
        // (8 lam eps^2/g) int_{Q_min}^0 U'/D dQ
        const double qm = potential_minimum(b);
        const int n = 2000;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            double q0 = -qm * (1.0 - double(k) / n), q1 = -qm * (1.0 - double(k + 1) / n);
            s += effective_potential(q1, b) - effective_potential(q0, b);
        }
        double quad = -(8.0 * b.lam * b.eps * b.eps / b.g) * s / b.noise;
        CHECK(base_exponent(b) == doctest::Approx(quad).epsilon(1e-12));
    }
    CHECK(base_exponent(quantum_b(0.02, 0.0)) ==
          doctest::Approx(-quantum_b(0.02, 0.0).delta_b * 4e-4 / 1.0).epsilon(1e-14));
    const double T = 50.0;
    double nb = bose_occupation(1.0, T);
    CHECK(base_exponent(quantum_b(0.02, nb)) / base_exponent(classical_b(0.02, T)) == doctest::Approx(1.0).epsilon(0.01));
    BifurcationParams e1 = classical_b(0.02, 1.0), e2 = e1;
    e2.eps *= 2.0;
    CHECK(base_exponent(e2) == doctest::Approx(4.0 * base_exponent(e1)).epsilon(1e-14));
}

TEST_CASE("bifurcation LS") {
    BifurcationParams b = classical_b(0.02, 1.0);
    const double alpha = 1e-3;
    CHECK(bifurcation_ls(0.0, alpha, b) ==
          doctest::Approx(alpha * b.omega_p / (2.0 * b.temperature) * std::sqrt(b.eps / (b.lam * b.g))).epsilon(1e-12));
    for (double u : {0.7, 3.0}) CHECK(bifurcation_ls(u, alpha, b) == doctest::Approx(bifurcation_ls(-u, alpha, b)).epsilon(1e-12));
    double prev = bifurcation_ls(0.0, alpha, b);
    for (int k = 1; k <= 100; ++k) {
        double v = bifurcation_ls(0.1 * k, alpha, b);
        CHECK(v < prev);
        prev = v;
    }
    const double T = 50.0;
    BifurcationParams q = quantum_b(0.02, bose_occupation(1.0, T)), c = classical_b(0.02, T);
    for (double u : {0.0, 1.0, 5.0})
        CHECK(bifurcation_ls(u, alpha, q) / bifurcation_ls(u, alpha, c) == doctest::Approx(1.0).epsilon(0.01));
    // saturates as T -> 0
    CHECK(bifurcation_ls(0.0, alpha, quantum_b(0.02, 0.0)) ==
          doctest::Approx(alpha * std::sqrt(0.02 / (b.lam * b.g))).epsilon(1e-12));
    CHECK(scaled_frequency(1.0, b) == doctest::Approx(b.kappa / (2.0 * b.lam * b.delta_b * b.eps)).epsilon(1e-15));
}

TEST_CASE("bifurcation parameter validation") {
    BifurcationParams b = classical_b(0.02, 1.0);
    CHECK(b.delta_b == doctest::Approx(std::sqrt(1.0 - 0.05 * 0.05)).epsilon(1e-15));
    CHECK(b.eps == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(b.noise == doctest::Approx(0.05 * 1.0 / (1.0 * 0.5)).epsilon(1e-15));
    CHECK(b.warnings.empty());
    CHECK(quantum_b(0.02, 1.0).noise == doctest::Approx(0.05 * 3.0 / 1.0).epsilon(1e-15));
    CHECK(classical_b(0.3, 1.0).warnings.size() == 1);
    OscParams past = near_bifurcation(-0.01);
    past.temperature = 1.0;
    CHECK_THROWS_AS((void)bifurcation_params(past, Mode::classical), ValidationError);
}

TEST_CASE("damping regime selector") {
    auto sel = [](double kappa) { return regime_selector(params(0.5, 0.3, 1.0, kappa)); };
    CHECK(sel(1e-3).regime == DampingRegime::underdamped);
    CHECK(sel(2.0).regime == DampingRegime::overdamped);
    auto mid = sel(0.5);
    CHECK(mid.regime == DampingRegime::crossover);
    CHECK(mid.warnings.size() == 1);
    CHECK(mid.kappa_over_omega_min == doctest::Approx(0.5 / 1.6733200530681511).epsilon(1e-12));
    CHECK(std::string(damping_regime_name(DampingRegime::overdamped)) == "overdamped");
}
