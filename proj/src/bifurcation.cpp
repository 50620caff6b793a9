#include "pslip/bifurcation.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pslip/errors.hpp"

namespace pslip {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double eps_warn = 0.1;
constexpr double underdamped_ratio = 0.1;

// Lanczos, g = 7, n = 9.
constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_c{
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

BifurcationParams bifurcation_params(const OscParams& p, Mode mode) {
    p.validate();
    if (!(p.kappa < 2.0 * p.lam)) throw ValidationError("kappa", "bifurcation needs kappa < 2 lam");
    BifurcationParams b;
    b.lam = p.lam;
    b.g = p.g;
    b.kappa = p.kappa;
    b.omega_p = p.omega_p;
    b.mode = mode;
    b.delta_b = std::sqrt(4.0 * p.lam * p.lam - p.kappa * p.kappa);
    b.eps = (b.delta_b - p.delta) / (2.0 * p.lam);
    if (!(b.eps > 0.0)) throw ValidationError("delta", "bifurcation needs delta < delta_B");
    if (b.eps > eps_warn) {
        std::ostringstream s;
        s << "eps = " << b.eps << " is not small; higher orders in eps are neglected";
        b.warnings.push_back(s.str());
    }
    if (mode == Mode::classical) {
        b.temperature = p.temperature_value();
        if (!(b.temperature > 0.0)) throw ValidationError("temperature", "classical bifurcation needs T > 0");
        b.noise = p.kappa * b.temperature / (p.omega_p * p.lam);
    } else {
        b.n_bose = p.occupation();
        b.noise = p.kappa * (2.0 * b.n_bose + 1.0) / (2.0 * p.lam);
    }
    return b;
}

double effective_potential(double Q, const BifurcationParams& b) {
    const double k = b.kappa;
    return -(b.delta_b / (2.0 * k)) * Q * Q + (b.delta_b * b.lam * b.lam / (k * k * k)) * Q * Q * Q * Q;
}

double potential_minimum(const BifurcationParams& b) { return b.kappa / (2.0 * b.lam); }

double barrier_height(const BifurcationParams& b) { return b.delta_b * b.kappa / (16.0 * b.lam * b.lam); }

double base_exponent(const BifurcationParams& b) {
    const double e2 = b.eps * b.eps;
    if (b.mode == Mode::classical) return -b.delta_b * b.omega_p * e2 / (2.0 * b.g * b.temperature);
    return -b.delta_b * e2 / (b.g * (2.0 * b.n_bose + 1.0));
}

double scaled_frequency(double nu, const BifurcationParams& b) {
    return b.kappa * nu / (2.0 * b.lam * b.delta_b * b.eps);
}

cplx complex_gamma(cplx z) {
    if (z.real() < 0.5) {
        // reflection
        return pi / (std::sin(pi * z) * complex_gamma(1.0 - z));
    }
    z -= 1.0;
    cplx x = lanczos_c[0];
    for (std::size_t i = 1; i < lanczos_c.size(); ++i) x += lanczos_c[i] / (z + double(i));
    cplx t = z + lanczos_g + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

double gamma_product(double upsilon) {
    const cplx i1{0.0, 1.0};
    return std::abs(complex_gamma(0.5 * (1.0 - i1 * upsilon)) * complex_gamma(1.0 + 0.5 * i1 * upsilon));
}

double bifurcation_ls(double upsilon, double alpha, const BifurcationParams& b) {
    double pref = b.mode == Mode::classical ? b.omega_p / (2.0 * b.temperature) : 1.0 / (2.0 * b.n_bose + 1.0);
    return alpha * pref * std::sqrt(b.eps / (pi * b.lam * b.g)) * gamma_product(upsilon);
}

double ls_decay_constant() {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 51;
    for (int k = 0; k < n; ++k) {
        double u = 5.0 + 5.0 * k / (n - 1);
        double y = std::log(gamma_product(u));
        sx += u;
        sy += y;
        sxx += u * u;
        sxy += u * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const char* damping_regime_name(DampingRegime r) {
    switch (r) {
        case DampingRegime::underdamped: return "underdamped";
        case DampingRegime::overdamped: return "overdamped";
        case DampingRegime::crossover: return "crossover";
    }
    return "?";
}

RegimeReport regime_selector(const OscParams& p) {
    p.validate();
    const double wmin = special_energies(p).omega_min;
    RegimeReport r{DampingRegime::crossover, p.kappa / wmin, {}};
    if (r.kappa_over_omega_min < underdamped_ratio) {
        r.regime = DampingRegime::underdamped;
    } else if (r.kappa_over_omega_min > 1.0) {
        r.regime = DampingRegime::overdamped;
    } else {
        std::ostringstream s;
        s << "kappa/omega_min = " << r.kappa_over_omega_min
          << " lies between the underdamped and overdamped limits; neither theory is controlled";
        r.warnings.push_back(s.str());
    }
    return r;
}

}  // namespace pslip
