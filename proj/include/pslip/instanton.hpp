#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pslip/keldysh.hpp"

namespace pslip {

enum class Regime { classical, quantum_T0, quantum_Tto0, quantum_finiteT };

[[nodiscard]] const char* regime_name(Regime r);

struct PathSample {
    double I = 0, p = 0;
    double residual = 0;    // |K0(I, p)| / K0 scale, 0 where not applicable
    bool singular = false;  // p diverges here (I = I_D at T = 0)
};

struct InstantonPath {
    Regime regime = Regime::classical;
    std::vector<PathSample> samples;
    std::optional<double> i_f;          // fragility action, T -> 0 only
    std::optional<double> i_singular;   // I_D for the T = 0 path with delta < 0
    double p_star = 0;
    double i_top = 0;
    double action = 0;        // iS = -int p dI
    double action_error = 0;  // quadrature error estimate
    std::function<double(double)> momentum;  // p_inst(I), exact

    [[nodiscard]] double p_at(double I) const { return momentum(I); }
};

// Pointwise instanton momenta.
[[nodiscard]] double t0_momentum(const OrbitState& o);          // -2 i omega tQ = p_> - p_<
[[nodiscard]] double tunneling_momentum(const OrbitState& o);   // omega Im(t2)
[[nodiscard]] double classical_p_star(const WellGeometry& geo, double T);
[[nodiscard]] double quantum_p_star(const WellGeometry& geo, double n_B);

// Root of p_< = p_inst at T = 0, if any.
[[nodiscard]] std::optional<double> fragility_action(const WellGeometry& geo);

// Finite-T root of K0(I, .) = 0 inside the strip.
[[nodiscard]] double finite_t_momentum(const EffectiveHamiltonian& h, const OrbitState& o);

[[nodiscard]] std::vector<double> path_grid(double i_top, int points = 400);

[[nodiscard]] InstantonPath classical_instanton(const WellGeometry& geo, double T, int points = 400);
[[nodiscard]] InstantonPath quantum_t0_instanton(const WellGeometry& geo, int points = 400);
[[nodiscard]] InstantonPath quantum_tto0_instanton(const WellGeometry& geo, int points = 400);
[[nodiscard]] InstantonPath quantum_finite_t_instanton(const WellGeometry& geo, double n_B, int points = 400);

// Picks the regime from the parameters: classical mode needs T > 0; quantum
// mode uses T = 0 for n_B = 0 unless tto0 is requested.
[[nodiscard]] InstantonPath instanton(const WellGeometry& geo, Mode mode, bool tto0 = false, int points = 400);

// iS = -int_0^{I_top} p dI. Uses the exact evaluator when present and the
// samples otherwise.
[[nodiscard]] double action_integral(const InstantonPath& path, double* error = nullptr);

// R: the action divided by its parameter prefactor (lam/g, times omega_p/T
// for the classical path).
[[nodiscard]] double reduced_action(const InstantonPath& path, const OscParams& p);

struct PortraitPoint {
    double I, p;
};

struct PhasePortrait {
    int n_i = 0, n_p = 0;
    std::vector<double> i_axis, p_axis;
    std::vector<double> k0;  // row-major [i][p]; NaN outside the strip
    InstantonPath instanton;
    std::vector<PortraitPoint> fixed_points;
    std::optional<double> divergence_i;
    [[nodiscard]] double at(int i, int j) const { return k0[static_cast<std::size_t>(i * n_p + j)]; }
};

[[nodiscard]] PhasePortrait phase_portrait(const WellGeometry& geo, Mode mode, int n_i = 64, int n_p = 64);

struct FragilityPoint {
    double ratio;                 // delta / 2 lam
    std::optional<double> i_f;    // in units of I_top
    std::optional<double> e_f;    // quasi-energy E_F
};

[[nodiscard]] std::vector<FragilityPoint> fragility_curve(const std::vector<double>& ratios, double lam = 0.5,
                                                          double g = 1.0);

}  // namespace pslip
