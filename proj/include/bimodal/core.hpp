#pragma once

// Shared domain types for the two-phonon / single-cavity cooling model.
//
// Rates and detunings are angular frequencies (rad/s). The library does not
// impose a scale; the CLI works in units of the cavity half-linewidth
// (kappa2 = 1) and records the physical scale separately.

#include <complex>
#include <stdexcept>
#include <string>

namespace bimodal {

using cplx = std::complex<double>;

// Raised when an input violates a documented invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure cannot produce a trustworthy result
// (singular solve, non-convergent quadrature, non-finite state, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rotating-frame parameters of the cavity mode a2 coupled to phonon modes
// b1 and b2. The phonon centre frequencies enter only through the
// half-splitting omega = (Omega1 - Omega2)/2; the mean Omega0 is absorbed by
// the frame.
struct SystemParams {
    double kappa2 = 1.0;   // cavity half-linewidth (full linewidth 2*kappa2)
    double delta = 0.0;    // omega_c - (omega_pump + Omega0)
    double omega = 0.0;    // (Omega1 - Omega2)/2
    double gamma1 = 0.0;   // phonon half-widths
    double gamma2 = 0.0;
    cplx g1{0.0, 0.0};     // pump-enhanced couplings G_i = beta_i * E_pump
    cplx g2{0.0, 0.0};
    double nbar1 = 0.0;    // thermal occupancies, flat over the band
    double nbar2 = 0.0;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

// Returns params unchanged if every invariant holds, otherwise throws
// ValidationError naming the first offending field.
SystemParams validate(const SystemParams& params);

// One phonon mode in the lab frame.
struct PhononModeSpec {
    double center_frequency = 0.0;
    double half_width = 0.0;
    double occupancy = 0.0;
};

PhononModeSpec validate(const PhononModeSpec& mode);

// Builds rotating-frame parameters from two lab-frame phonon modes, the cavity
// resonance and the pump frequency (delta = omega_c - (omega_pump + Omega0)).
SystemParams make_system_params(const PhononModeSpec& mode1, const PhononModeSpec& mode2,
                                double kappa2, double cavity_frequency,
                                double pump_frequency, cplx g1, cplx g2);

// Parameters of the deterministic pump / anti-Stokes / phonon amplitude
// equations. beta carries rate units once the mode amplitudes are absorbed.
struct ThreeWaveParams {
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    double gamma = 0.0;    // phonon half-width
    double delta1 = 0.0;   // omega_c1 - omega_1
    double delta2 = 0.0;   // omega_c2 - omega_2
    double delta = 0.0;    // omega_2 - omega_1 - omega_m
    cplx beta{0.0, 0.0};
    cplx pump{0.0, 0.0};   // dimensionless external drive of the pump mode
};

ThreeWaveParams validate(const ThreeWaveParams& params);

struct ThreeWaveState {
    cplx a1{0.0, 0.0};
    cplx a2{0.0, 0.0};
    cplx u{0.0, 0.0};
    double t = 0.0;

    bool finite() const;
};

}  // namespace bimodal
