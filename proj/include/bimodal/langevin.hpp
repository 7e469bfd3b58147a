#pragma once

// Monte Carlo simulation of the linear Langevin system dx/dt = M x + f(t)
// for x = (a2, b1, b2), driven by white complex Gaussian noise.
//
// The update x(t+dt) = exp(M dt) x(t) + xi is exact in distribution: xi has
// the covariance Int_0^dt e^{Ms} D e^{M^dag s} ds, with D = diag(0, 2 Gamma1
// nbar1, 2 Gamma2 nbar2) (normally ordered noise; the cavity input
// contributes nothing to normally ordered moments).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bimodal/core.hpp"
#include "bimodal/spectra.hpp"

namespace bimodal {

// Index order used by every per-mode array below.
namespace channel {
inline constexpr std::size_t cavity = 0;
inline constexpr std::size_t phonon1 = 1;
inline constexpr std::size_t phonon2 = 2;
}  // namespace channel

struct ExactDiscretization {
    double dt = 0.0;
    Eigen::Matrix3cd transition;     // exp(M dt)
    Eigen::Matrix3cd covariance;     // Int_0^dt e^{Ms} D e^{M^dag s} ds
    Eigen::Matrix3cd noise_factor;   // S with S S^dag = covariance
};

ExactDiscretization discretize(const SystemParams& params, double dt);

struct ModeEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

struct EnsembleStats {
    std::size_t n_traj = 0;
    double t_end = 0.0;
    double dt = 0.0;
    double burn_in = 0.0;
    std::uint64_t seed = 0;
    std::string scheme = "exact_exponential";
    // Time-averaged <|x_c|^2> after burn-in; standard error over trajectory means.
    std::array<ModeEstimate, 3> occupancy;
    // Same estimate restricted to the first / second half of each record.
    std::array<ModeEstimate, 3> first_half;
    std::array<ModeEstimate, 3> second_half;
};

struct SimulationOptions {
    // When set, every trajectory is written to <dir>/trajectory_<index>.csv.
    std::optional<std::string> dump_directory;
    std::size_t dump_stride = 1;
    std::size_t workers = 0;  // 0: worker_count()
};

// Minimum burn-in accepted by simulate_ensemble: 10 / slowest decay rate.
double minimum_burn_in(const SystemParams& params);

EnsembleStats simulate_ensemble(const SystemParams& params, std::size_t n_traj, double t_end, double dt,
                                double burn_in, std::uint64_t seed, const SimulationOptions& options = {});

struct PeriodogramConfig {
    std::size_t n_traj = 16;
    double record_length = 0.0;   // per trajectory, after burn-in
    double dt = 0.1;
    double burn_in = 0.0;         // 0: minimum_burn_in(params)
    double segment_length = 0.0;  // Welch segment duration; 0: record_length / 8
    std::uint64_t seed = 0;
    std::size_t workers = 0;
};

struct PeriodogramResult {
    // Indexed by channel: antistokes (cavity), phonon1, phonon2.
    std::array<SpectrumCurve, 3> curves;
    std::array<std::vector<double>, 3> standard_error;
    // (1/N) sum |x_n|^2 over every sample that entered a segment.
    std::array<double, 3> time_average{};
    std::size_t segments = 0;
};

// Welch-averaged (periodic Hann, 50% overlap) periodogram of the simulated
// amplitudes, P(w) = dt |sum_n w_n x_n e^{i w n dt}|^2 / sum_n w_n^2, so that
// (1/2pi) Int P dw reproduces the window-weighted time average.
PeriodogramResult periodogram(const SystemParams& params, const PeriodogramConfig& config,
                              const std::vector<double>& omegas);

}  // namespace bimodal
