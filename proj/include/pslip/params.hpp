#pragma once

#include <optional>

namespace pslip {

// Oscillator in the rotating frame.
//   H0 = delta |phi|^2 + lam (phi^2 + conj(phi)^2) + (g/4) |phi|^4
// Temperature is given either as T (in the same units as omega_p) or as the
// Bose occupation n_B of the pump mode; exactly one should be set.
struct OscParams {
    double delta = 0.3;
    double lam = 0.5;
    double g = 1.0;
    double kappa = 0.01;
    double omega_p = 1.0;
    std::optional<double> temperature;
    std::optional<double> n_bose;

    // Throws ValidationError naming the offending field.
    void validate() const;

    [[nodiscard]] double ratio() const noexcept { return delta / (2.0 * lam); }
    [[nodiscard]] double occupation() const;    // n_B
    [[nodiscard]] double temperature_value() const;  // T, 0 for n_B = 0
};

struct DriveParams {
    double alpha = 0.0;
    double nu = 0.0;
    double phase = 0.0;
};

enum class Mode { classical, quantum };

[[nodiscard]] double bose_occupation(double omega_p, double T);
[[nodiscard]] double temperature_of_occupation(double omega_p, double n_B);

}  // namespace pslip
