#include "bimodal/core.hpp"

#include <cmath>

namespace bimodal {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw ValidationError(std::string(name) + " must be finite");
    }
}

void require_finite(cplx value, const char* name) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw ValidationError(std::string(name) + " must be finite");
    }
}

void require_positive(double value, const char* name) {
    require_finite(value, name);
    if (!(value > 0.0)) {
        throw ValidationError(std::string(name) + " must be positive");
    }
}

void require_nonnegative(double value, const char* name) {
    require_finite(value, name);
    if (!(value >= 0.0)) {
        throw ValidationError(std::string(name) + " must be nonnegative");
    }
}

}  // namespace

SystemParams validate(const SystemParams& params) {
    require_positive(params.kappa2, "kappa2");
    require_finite(params.delta, "delta");
    require_finite(params.omega, "omega");
    require_nonnegative(params.gamma1, "gamma1");
    require_nonnegative(params.gamma2, "gamma2");
    require_finite(params.g1, "g1");
    require_finite(params.g2, "g2");
    require_nonnegative(params.nbar1, "nbar1");
    require_nonnegative(params.nbar2, "nbar2");
    return params;
}

PhononModeSpec validate(const PhononModeSpec& mode) {
    require_positive(mode.center_frequency, "center_frequency");
    require_nonnegative(mode.half_width, "half_width");
    require_nonnegative(mode.occupancy, "occupancy");
    return mode;
}

SystemParams make_system_params(const PhononModeSpec& mode1, const PhononModeSpec& mode2,
                                double kappa2, double cavity_frequency,
                                double pump_frequency, cplx g1, cplx g2) {
    validate(mode1);
    validate(mode2);
    require_finite(cavity_frequency, "cavity_frequency");
    require_finite(pump_frequency, "pump_frequency");

    const double mean = 0.5 * (mode1.center_frequency + mode2.center_frequency);
    SystemParams p;
    p.kappa2 = kappa2;
    p.delta = cavity_frequency - (pump_frequency + mean);
    p.omega = 0.5 * (mode1.center_frequency - mode2.center_frequency);
    p.gamma1 = mode1.half_width;
    p.gamma2 = mode2.half_width;
    p.g1 = g1;
    p.g2 = g2;
    p.nbar1 = mode1.occupancy;
    p.nbar2 = mode2.occupancy;
    return validate(p);
}

ThreeWaveParams validate(const ThreeWaveParams& params) {
    // Zero optical loss is allowed: the lossless limit is where the
    // Manley-Rowe invariants hold.
    require_nonnegative(params.kappa1, "kappa1");
    require_nonnegative(params.kappa2, "kappa2");
    require_nonnegative(params.gamma, "gamma");
    require_finite(params.delta1, "delta1");
    require_finite(params.delta2, "delta2");
    require_finite(params.delta, "delta");
    require_finite(params.beta, "beta");
    require_finite(params.pump, "pump");
    return params;
}

bool ThreeWaveState::finite() const {
    auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(a1) && ok(a2) && ok(u) && std::isfinite(t);
}

}  // namespace bimodal
