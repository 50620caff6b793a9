#pragma once

#include <utility>

#include "pslip/action_angle.hpp"
#include "pslip/params.hpp"

namespace pslip {

struct Strip {
    double lower, upper;  // open interval for p
};

// Effective Hamiltonians K0, K1 on the (I, p) plane. Classical mode is the
// Langevin (small-p) form; quantum mode keeps every Fourier harmonic.
class EffectiveHamiltonian {
public:
    static constexpr double strip_margin = 1e-3;

    EffectiveHamiltonian(WellGeometry geo, Mode mode);

    [[nodiscard]] const WellGeometry& geometry() const noexcept { return geo_; }
    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] double gamma_loss() const noexcept { return gl_; }
    [[nodiscard]] double gamma_gain() const noexcept { return gg_; }
    // 2 kappa T / omega_p
    [[nodiscard]] double noise_strength() const noexcept { return noise_; }

    [[nodiscard]] double rate(const OrbitState& o, int n) const;
    [[nodiscard]] double rate(double I, int n) const { return rate(geo_.orbit(I), n); }
    // sum_n n W_n, resummed
    [[nodiscard]] double drift(const OrbitState& o) const;

    // Admissible p interval; the whole line in classical mode.
    [[nodiscard]] Strip strip(const OrbitState& o) const;

    [[nodiscard]] double K0(const OrbitState& o, double p) const;
    [[nodiscard]] double K0(double I, double p) const;
    [[nodiscard]] double dK0_dp(const OrbitState& o, double p) const;
    [[nodiscard]] double dK0_dp(double I, double p) const;
    // dK0/dI on the line I = 0.
    [[nodiscard]] double dK0_dI_bottom(double p) const;
    // Natural magnitude of K0: sum_n W_n |e^{-n p} - 1| (quantum) or the sum
    // of the absolute drift and diffusion terms (classical).
    [[nodiscard]] double K0_scale(const OrbitState& o, double p) const;

    // Unweighted loss and gain parts of the quantum K0 from the series.
    [[nodiscard]] std::pair<double, double> K_parts(const OrbitState& o, double p) const;
    // The same parts from the angle integral along the shifted contour.
    [[nodiscard]] std::pair<double, double> K0_integral_rep(const OrbitState& o, double p) const;

    // Drive term at angle theta and time t.
    [[nodiscard]] double K1(const OrbitState& o, double p, double theta, double t, const DriveParams& d) const;
    // Quantum K1 with sinh(n p/2) replaced by n p/2 (reduces to the classical form).
    [[nodiscard]] double K1_linearized(const OrbitState& o, double p, double theta, double t,
                                       const DriveParams& d) const;

private:
    void check_strip(const OrbitState& o, double p) const;
    [[nodiscard]] double K1_sum(const OrbitState& o, double p, double theta, double t, const DriveParams& d,
                                bool linear) const;

    WellGeometry geo_;
    Mode mode_;
    double gl_ = 0, gg_ = 0, noise_ = 0;
};

// |K0_quantum - K0_classical| / |K0_classical| with T = omega_p n_B.
[[nodiscard]] double classical_limit_check(const OscParams& p, double I, double mom, double n_B);

}  // namespace pslip
