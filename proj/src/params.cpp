#include "pslip/params.hpp"

#include <cmath>
#include <limits>

#include "pslip/errors.hpp"

namespace pslip {

namespace {

void require_finite(const char* name, double v) {
    if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
}

}  // namespace

void OscParams::validate() const {
    require_finite("delta", delta);
    require_finite("lam", lam);
    require_finite("g", g);
    require_finite("kappa", kappa);
    require_finite("omega_p", omega_p);
    if (!(lam > 0)) throw ValidationError("lam", "must be positive");
    if (!(g > 0)) throw ValidationError("g", "must be positive");
    if (!(kappa > 0)) throw ValidationError("kappa", "must be positive (the instanton is parametrized by the relaxation time)");
    if (!(omega_p > 0)) throw ValidationError("omega_p", "must be positive");
    if (!(std::abs(delta) < 2.0 * lam))
        throw ValidationError("delta", "outside the bistable window |delta| < 2 lam");
    if (temperature && n_bose) throw ValidationError("temperature", "give either T or n_B, not both");
    if (temperature) {
        require_finite("temperature", *temperature);
        if (*temperature < 0) throw ValidationError("temperature", "must be non-negative");
    }
    if (n_bose) {
        require_finite("n_bose", *n_bose);
        if (*n_bose < 0) throw ValidationError("n_bose", "must be non-negative");
    }
}

double OscParams::occupation() const {
    if (n_bose) return *n_bose;
    if (temperature) return bose_occupation(omega_p, *temperature);
    return 0.0;
}

double OscParams::temperature_value() const {
    if (temperature) return *temperature;
    if (n_bose) return temperature_of_occupation(omega_p, *n_bose);
    return 0.0;
}

double bose_occupation(double omega_p, double T) {
    if (T <= 0) return 0.0;
    return 1.0 / std::expm1(omega_p / T);
}

double temperature_of_occupation(double omega_p, double n_B) {
    if (n_B <= 0) return 0.0;
    return omega_p / std::log1p(1.0 / n_B);
}

}  // namespace pslip
