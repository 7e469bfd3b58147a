#pragma once

// Command-line front end. All rates are in units of kappa2 (kappa2 = 1);
// --kappa2-hz only annotates the metadata.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bimodal/core.hpp"

namespace bimodal::cli {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Parameters used when a flag is not given: kappa2 = 1, Omega = 0.1,
// Gamma1 = Gamma2 = 0.01, G1 = 0.3, G2 = 0.5, delta = 0, nbar1 = nbar2 = 1.
SystemParams default_params();
struct ThreeWaveSpec;
ThreeWaveSpec default_three_wave();

// Reads a config file: either flat "key=value" lines ('#' comments) or a
// metadata sidecar written by a previous run (its "config" object is used).
KeyValues load_config(const std::string& path);

struct SweepSpec {
    std::string axis;
    double from = 0.0;
    double to = 1.0;
    std::size_t count = 2;
    std::string scale = "linear";
    std::string metric = "cooling-ratio:1";
};

struct SimulateSpec {
    std::size_t n_traj = 200;
    double t_end = 0.0;    // 0: burn_in + 500
    double dt = 0.1;
    double burn_in = 0.0;  // 0: 10 / slowest decay rate
    bool dump = false;          // per-trajectory CSVs under <output>.trajectories/
    std::size_t dump_stride = 1;
    bool periodogram = false;   // Welch spectra to <output stem>_periodogram.csv
    double segment_length = 0.0;
};

struct CouplingSpec {
    std::string phi1, phi2, psi, raman;
    std::string periodic;  // subset of "xyz"
    std::string scheme = "fd";
    double gamma_e = 1.0;
    double omega_c1 = 1.0, omega_c2 = 1.0;
    double eps1 = 1.0, eps2 = 1.0;
    double rho0 = 0.0, omega_m = 0.0, hbar = 0.0;  // normalize psi when all positive
};

struct ThreeWaveSpec {
    ThreeWaveParams params;
    ThreeWaveState init;
    double t_end = 10.0;
    double dt = 1e-3;
    std::size_t stride = 1;
};

struct RunConfig {
    std::string command;
    SystemParams params = default_params();
    std::optional<double> kappa2_hz;
    int mode = 1;
    bool normalized = false;
    double omega_min = -1.5;
    double omega_max = 1.5;
    std::size_t points = 4001;
    std::string output;       // empty: command default
    std::string config_path;  // file the config was loaded from, if any
    std::uint64_t seed = 0;
    SweepSpec sweep;
    SimulateSpec simulate;
    CouplingSpec coupling;
    ThreeWaveSpec three_wave = default_three_wave();
};

// Parses argv (config file values first, command-line flags override).
// Throws ValidationError on bad input; returns nullopt after printing help.
std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out);

// Canonical key/value form of a config; loading it reproduces the config.
KeyValues effective_config(const RunConfig& config);

// Executes a parsed config. Exit codes: 0 ok, 1 validation, 2 numerical.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse + execute with error handling.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace bimodal::cli
