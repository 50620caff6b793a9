#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pslip/elliptic.hpp"
#include "pslip/params.hpp"

namespace pslip {

// Everything the Fourier machinery needs at one action.
struct OrbitState {
    double I = 0, E = 0;
    double omega = 0, domega_dI = 0;
    CharTimes times;
    double p_less = 0;     // 2 omega Im(tP), decay rate for n > 0
    double p_greater = 0;  // 2 omega Im(tS - tP), decay rate for n < 0
};

// Resummed lattice sums over |c_n|^2 built from the closed-form
// coefficients. No truncation: the tail beyond a few dozen terms is summed
// as a geometric series.
class HarmonicSums {
public:
    HarmonicSums(const OrbitState& o, const OscParams& p);

    [[nodiscard]] double weight(int n) const;  // |c_n|^2
    // sum_{n>0} n^j |c_n|^2 e^{-n p}  and  sum_{n>0} n^j |c_{-n}|^2 e^{n p}
    [[nodiscard]] double positive(int j, double p) const;
    [[nodiscard]] double negative(int j, double p) const;
    // sum_{n>0} |c_n|^2 (e^{-n p} - 1) and sum_{n>0} |c_{-n}|^2 (e^{n p} - 1)
    [[nodiscard]] double positive_expm1(double p) const;
    [[nodiscard]] double negative_expm1(double p) const;

    [[nodiscard]] double p_less() const noexcept { return -log_rl_; }
    [[nodiscard]] double p_greater() const noexcept { return -log_rg_; }

private:
    [[nodiscard]] double moment(double log_x, int j) const;
    [[nodiscard]] double shifted(double log_x, double dp) const;

    double a2_, log_rl_, log_rg_, z_;
    int n_direct_;
};

struct FourierTable {
    double I = 0;
    int n_max = 0;
    std::vector<cplx> c;  // c[n + n_max] = c_n
    double residual_action = 0;  // |sum n|c_n|^2 - I| / I
    double residual_noise = 0;   // |sum n^2|c_n|^2 - Gamma| / Gamma
    [[nodiscard]] cplx at(int n) const { return c.at(static_cast<std::size_t>(n + n_max)); }
};

class WellGeometry {
public:
    static constexpr double sum_rule_tolerance = 1e-6;

    explicit WellGeometry(const OscParams& p);

    [[nodiscard]] const OscParams& params() const noexcept { return p_; }
    [[nodiscard]] const SpecialEnergies& special() const noexcept { return se_; }
    [[nodiscard]] double i_top() const noexcept { return i_top_; }
    [[nodiscard]] std::optional<double> e_d() const noexcept { return e_d_; }
    [[nodiscard]] std::optional<double> i_d() const noexcept { return i_d_; }

    [[nodiscard]] double action_of_energy(double E) const;
    [[nodiscard]] double energy_of_action(double I) const;
    [[nodiscard]] double omega(double I) const;
    [[nodiscard]] double domega_dI(double I) const;
    [[nodiscard]] OrbitState orbit(double I) const;
    [[nodiscard]] OrbitState orbit_at_energy(double E) const;

    // Small-action limits.
    [[nodiscard]] double domega_dI_bottom() const;
    [[nodiscard]] double noise_slope_bottom() const;  // dGamma/dI at I = 0

    [[nodiscard]] cplx fourier_coefficient(const OrbitState& o, int n) const;
    [[nodiscard]] cplx fourier_coefficient(double I, int n) const { return fourier_coefficient(orbit(I), n); }
    // Throws TruncationError when either sum rule misses by more than the tolerance.
    [[nodiscard]] FourierTable fourier_table(double I, int n_max) const;
    // Doubles n_max from 64 until both sum rules hold.
    [[nodiscard]] FourierTable fourier_table_adaptive(double I, int n_max = 64) const;
    [[nodiscard]] FourierTable fourier_table_unchecked(const OrbitState& o, int n_max) const;

    [[nodiscard]] double noise_kernel(double I) const;  // Gamma(I)
    [[nodiscard]] std::pair<double, double> convergence_radii(double I) const;
    [[nodiscard]] HarmonicSums sums(const OrbitState& o) const { return HarmonicSums(o, p_); }

private:
    OscParams p_;
    SpecialEnergies se_;
    double i_top_;
    std::optional<double> e_d_, i_d_;
};

}  // namespace pslip
