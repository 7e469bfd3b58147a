#pragma once

// Frequency-domain fluctuation spectra of the two phonon modes and of the
// generated anti-Stokes field, with occupancies and cooling ratios.
//
// Conventions: b(t) = (1/2pi) Int b(w) e^{-iwt} dw, so <b^dag b> = (1/2pi) Int S_b(w) dw.
// Phonon noise channels enter with density 2 Gamma_i nbar_i (normal order);
// the cavity channel does not contribute to normally ordered moments.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "bimodal/core.hpp"

namespace bimodal {

enum class SpectrumKind { phonon1, phonon2, antistokes };

std::string to_string(SpectrumKind kind);

struct SpectrumCurve {
    std::vector<double> omegas;   // strictly increasing, rad/s
    std::vector<double> values;   // >= 0
    SpectrumKind kind = SpectrumKind::phonon1;
    bool normalized = false;      // values are Gamma_i S / (2 nbar_i)
};

// n uniformly spaced points on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

// Default grid: 4001 points over [-1.5 kappa2, 1.5 kappa2].
std::vector<double> default_grid(double kappa2);

// d(w) = (i delta - i w + kappa2) + |G1|^2/(i Omega - i w + Gamma1) + |G2|^2/(-i Omega - i w + Gamma2)
cplx d_of_omega(const SystemParams& params, double omega);

// Pointwise closed forms. mode is 1 or 2.
double phonon_density(const SystemParams& params, int mode, double omega);
double antistokes_density(const SystemParams& params, double omega);

// Curves over a grid that must cover [-|Omega| - 20 Gamma, |Omega| + 20 Gamma].
SpectrumCurve phonon_spectrum(const SystemParams& params, int mode, const std::vector<double>& omegas,
                              bool normalized = false);
SpectrumCurve antistokes_spectrum(const SystemParams& params, const std::vector<double>& omegas);

// Independent route: per frequency, solve (-i w I - M) x = e_j for every noise
// channel j and sum |x|^2 weighted by the channel densities.
struct OracleSpectra {
    SpectrumCurve phonon1;
    SpectrumCurve phonon2;
    SpectrumCurve antistokes;
};

OracleSpectra spectrum_oracle(const SystemParams& params, const std::vector<double>& omegas);

struct OccupancyResult {
    double value = 0.0;           // <b_i^dag b_i>
    double error_estimate = 0.0;  // quadrature error estimate, same units
    double core_window = 0.0;     // half-width of the finite core interval; tails are mapped
};

// (1/2pi) Int S_bi(w) dw over the whole real line.
OccupancyResult occupancy(const SystemParams& params, int mode);

// Adaptive quadrature of (1/2pi) Int_lo^hi S_bi(w) dw.
OccupancyResult occupancy_window(const SystemParams& params, int mode, double lo, double hi);

// Uniform trapezoid sum of the same integral, for quadrature self-checks.
double occupancy_trapezoid(const SystemParams& params, int mode, double lo, double hi, std::size_t points);

// occupancy / nbar_i; equal to the final/initial temperature ratio in the
// classical (k_B T >> hbar Omega) limit.
double cooling_ratio(const SystemParams& params, int mode);

// Single-mode adiabatic estimate Gamma_i / Gamma_i,eff with the cavity
// response evaluated at the mode's resonance w = +-Omega.
double adiabatic_cooling_ratio(const SystemParams& params, int mode);

// "# "-prefixed header lines, then "omega_over_kappa2,<column>" and rows.
void write_spectrum_csv(std::ostream& out, const SpectrumCurve& curve, double kappa2,
                        const std::vector<std::string>& header_lines = {});

}  // namespace bimodal
