#pragma once

#include <string>
#include <vector>

#include "pslip/elliptic.hpp"
#include "pslip/params.hpp"

namespace pslip {

// Overdamped theory near the bifurcation, delta = delta_B - 2 lam eps.
struct BifurcationParams {
    double lam = 0, g = 0, kappa = 0, omega_p = 0;
    double eps = 0;
    double delta_b = 0;  // sqrt(4 lam^2 - kappa^2)
    double noise = 0;    // D
    Mode mode = Mode::classical;
    double temperature = 0;  // classical only
    double n_bose = 0;       // quantum only
    std::vector<std::string> warnings;
};

// Throws ValidationError unless 0 < eps and kappa < 2 lam.
[[nodiscard]] BifurcationParams bifurcation_params(const OscParams& p, Mode mode);

[[nodiscard]] double effective_potential(double Q, const BifurcationParams& b);
[[nodiscard]] double potential_minimum(const BifurcationParams& b);  // Q_min > 0
[[nodiscard]] double barrier_height(const BifurcationParams& b);

// iS0: -delta_B omega_p eps^2 / (2 g T) or -tanh(omega_p/2T) delta_B eps^2 / g.
[[nodiscard]] double base_exponent(const BifurcationParams& b);

[[nodiscard]] double scaled_frequency(double nu, const BifurcationParams& b);  // upsilon

[[nodiscard]] cplx complex_gamma(cplx z);
// |Gamma((1 - i u)/2) Gamma(1 + i u/2)|
[[nodiscard]] double gamma_product(double upsilon);

// iS1 as a function of upsilon.
[[nodiscard]] double bifurcation_ls(double upsilon, double alpha, const BifurcationParams& b);

// Slope of log iS1 against upsilon fitted over [5, 10].
[[nodiscard]] double ls_decay_constant();

enum class DampingRegime { underdamped, crossover, overdamped };

[[nodiscard]] const char* damping_regime_name(DampingRegime r);

struct RegimeReport {
    DampingRegime regime;
    double kappa_over_omega_min;
    std::vector<std::string> warnings;
};

[[nodiscard]] RegimeReport regime_selector(const OscParams& p);

}  // namespace pslip
