#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pslip/instanton.hpp"

namespace pslip {

// One harmonic of the log-susceptibility at one frequency. Background
// means the saddle nω(I) = ν has no solution; the value is then 0.
// Unresolved means the saddle lies closer than 1e-12 I_top to the separatrix,
// where ω(I) cannot be inverted in double precision; the value is then NaN.
struct Harmonic {
    int n = 0;
    double abs_chi = 0;
    bool background = true;
    bool unresolved = false;
    double I = 0;  // saddle action, 0 unless resolved
};

struct LinearFit {
    double intercept;  // extrapolated |chi_1| at the band edge, in units of peak_scale()
    double slope;      // b_1 (classical) or B_1 (quantum)
};

class LogSusceptibility {
public:
    // Classical mode needs T; quantum mode uses n_B (0 allowed). At n_B = 0 the
    // T -> 0 path is used unless strict_t0 asks for the T = 0 one.
    LogSusceptibility(const WellGeometry& geo, Mode mode, bool strict_t0 = false);

    [[nodiscard]] const WellGeometry& geometry() const noexcept { return geo_; }
    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] const InstantonPath& path() const noexcept { return path_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Saddle action with n ω(I) = ν, bracketed to 1e-12 relative. Empty when
    // no saddle exists; NaN when it sits beyond the resolvable range.
    [[nodiscard]] std::optional<double> saddle_action(int n, double nu) const;
    // Smallest |ν|/|n| with a resolvable saddle.
    [[nodiscard]] double resolvable_floor() const noexcept { return floor_; }
    [[nodiscard]] Harmonic chi(int n, double nu) const;

    // |ω_I| at the well bottom and the peak scale sqrt(pi/(kappa |ω_I|)),
    // times omega_p/T in classical mode.
    [[nodiscard]] double omega_slope() const noexcept { return omega_i_; }
    [[nodiscard]] double peak_scale() const noexcept { return scale_; }

    // a_n (classical) or A_n (quantum) from the small-action limits.
    [[nodiscard]] double prefactor(int n) const;
    // |chi_n| near the band edge |ν| = |n| ω_min - δν. Appends a warning when
    // δν is outside the asymptotic window.
    [[nodiscard]] double resonance_asymptotics(int n, double delta_nu, std::vector<std::string>* warn = nullptr) const;

    // Smallest admissible |n| with sign(n) = sign(ν); for delta < 0 and n < 0
    // steps to n - 1 where that harmonic is larger.
    [[nodiscard]] int dominant_harmonic(double nu, int n_max) const;
    // iS1 = 2 alpha |chi_dominant|.
    [[nodiscard]] double exponent_correction(double nu, double alpha, int n_max) const;

    // Least-squares fit of |chi_1| = peak_scale * c (1 + b δν/|ω_I|) over δν in (0, width |ω_I|].
    [[nodiscard]] LinearFit band_edge_fit(int points = 21, double width = 0.05) const;

    // Crossover temperature T* = omega_p / log(ω_min / delta), NaN for delta <= 0.
    [[nodiscard]] double crossover_temperature() const;

private:
    WellGeometry geo_;
    Mode mode_;
    InstantonPath path_;
    std::vector<std::string> warnings_;
    double omega_i_ = 0, scale_ = 0, temp_ = 0, floor_ = 0;
    std::optional<EffectiveHamiltonian> h_;
};

// Closed-form peak prefactors.
[[nodiscard]] double classical_peak_prefactor(const OscParams& p);             // a_1
[[nodiscard]] double quantum_peak_prefactor(const OscParams& p, double n_B);   // A_1

struct SpectrumConfig {
    std::vector<double> nu;
    int n_window = 3;       // harmonics 1..n_window of each sign
    double alpha = 0.0;
    unsigned threads = 1;
};

struct SpectrumPoint {
    double nu = 0;
    std::vector<Harmonic> harmonics;  // sign(n) = sign(nu), |n| = 1..n_window
    int dominant = 0;                 // 0 when no harmonic is admissible
    double iS1 = 0;
};

struct LSSpectrum {
    std::string regime;
    std::vector<SpectrumPoint> points;
    std::vector<std::string> warnings;
};

[[nodiscard]] LSSpectrum compute_spectrum(const LogSusceptibility& ls, const SpectrumConfig& cfg);

}  // namespace pslip
