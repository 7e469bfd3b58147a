#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "bimodal/coupling.hpp"
#include "bimodal/dynamics.hpp"
#include "bimodal/langevin.hpp"
#include "bimodal/parallel.hpp"
#include "bimodal/spectra.hpp"
#include "output.hpp"

namespace bimodal::cli {

namespace fs = std::filesystem;

SystemParams default_params() {
    SystemParams p;
    p.kappa2 = 1.0;
    p.delta = 0.0;
    p.omega = 0.1;
    p.gamma1 = 0.01;
    p.gamma2 = 0.01;
    p.g1 = 0.3;
    p.g2 = 0.5;
    p.nbar1 = 1.0;
    p.nbar2 = 1.0;
    return p;
}

ThreeWaveSpec default_three_wave() {
    ThreeWaveSpec s;
    s.params.kappa1 = 1.0;
    s.params.kappa2 = 1.0;
    s.params.gamma = 0.01;
    s.params.beta = 0.1;
    s.params.pump = 1.0;
    s.init.u = 1.0;
    s.t_end = 10.0;
    s.dt = 1e-3;
    s.stride = 10;
    return s;
}

namespace {

const std::array<std::string, 8> kCommands{"spectrum", "antistokes", "cooling-ratio", "simulate",
                                           "sweep", "coupling", "collective", "three-wave"};
const std::array<std::string, 8> kSweepAxes{"delta", "omega", "gamma1", "gamma2", "g1", "g2", "nbar1", "nbar2"};

bool uses_physics(const std::string& command) { return command != "coupling" && command != "three-wave"; }

std::string bool_str(bool b) { return b ? "true" : "false"; }

// Option targets for complex quantities that are entered as real/imaginary pairs.
struct Scratch {
    double g1_re, g1_im, g2_re, g2_im;
    double nbar1, nbar2;
    double kappa2_hz = 0.0;
    double beta_re, beta_im, pump_re, pump_im;
    double a1_re, a1_im, a2_re, a2_im, u_re, u_im;
};

void add_physics(CLI::App* sub, RunConfig& c, Scratch& s) {
    sub->add_option("--delta", c.params.delta, "Cavity detuning")->capture_default_str();
    sub->add_option("--omega", c.params.omega, "Half the phonon frequency splitting")->capture_default_str();
    sub->add_option("--gamma1", c.params.gamma1, "Phonon 1 half-width")->capture_default_str();
    sub->add_option("--gamma2", c.params.gamma2, "Phonon 2 half-width")->capture_default_str();
    sub->add_option("--g1", s.g1_re, "Coupling G1 (real part)")->capture_default_str();
    sub->add_option("--g1-im", s.g1_im, "Coupling G1 (imaginary part)")->capture_default_str();
    sub->add_option("--g2", s.g2_re, "Coupling G2 (real part)")->capture_default_str();
    sub->add_option("--g2-im", s.g2_im, "Coupling G2 (imaginary part)")->capture_default_str();
    sub->add_option("--nbar1", s.nbar1, "Thermal occupancy of phonon 1 (copied to nbar2 if only one is given)")
        ->capture_default_str();
    sub->add_option("--nbar2", s.nbar2, "Thermal occupancy of phonon 2")->capture_default_str();
    sub->add_option("--kappa2-hz", s.kappa2_hz, "Physical cavity half-width, recorded in metadata only");
}

void add_grid(CLI::App* sub, RunConfig& c) {
    sub->add_option("--omega-min", c.omega_min, "Lowest frequency of the grid")->capture_default_str();
    sub->add_option("--omega-max", c.omega_max, "Highest frequency of the grid")->capture_default_str();
    sub->add_option("--points", c.points, "Number of grid points")->capture_default_str();
}

void build_app(CLI::App& app, RunConfig& c, Scratch& s) {
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", c.config_path, "key=value file or a previous run's .meta.json");

    auto* spectrum = app.add_subcommand("spectrum", "Phonon fluctuation spectrum S_b(omega)");
    add_physics(spectrum, c, s);
    add_grid(spectrum, c);
    spectrum->add_option("--mode", c.mode, "Phonon mode (1 or 2)")->capture_default_str();
    spectrum->add_flag("--normalized", c.normalized, "Report Gamma S / (2 nbar)");

    auto* antistokes = app.add_subcommand("antistokes", "Anti-Stokes spectrum S_a(omega)");
    add_physics(antistokes, c, s);
    add_grid(antistokes, c);

    auto* cooling = app.add_subcommand("cooling-ratio", "Final/initial phonon occupancy ratio");
    add_physics(cooling, c, s);
    cooling->add_option("--mode", c.mode, "Phonon mode (1 or 2)")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo Langevin ensemble");
    add_physics(simulate, c, s);
    add_grid(simulate, c);
    auto& sim = c.simulate;
    simulate->add_option("--n-traj", sim.n_traj, "Number of trajectories")->capture_default_str();
    simulate->add_option("--t-end", sim.t_end, "End time (0: burn-in + 500)")->capture_default_str();
    simulate->add_option("--dt", sim.dt, "Time step")->capture_default_str();
    simulate->add_option("--burn-in", sim.burn_in, "Discarded initial time (0: 10 / slowest decay rate)")
        ->capture_default_str();
    simulate->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    simulate->add_flag("--dump", sim.dump, "Write every trajectory to <output>.trajectories/");
    simulate->add_option("--dump-stride", sim.dump_stride, "Keep every n-th sample in dumps")->capture_default_str();
    simulate->add_flag("--periodogram", sim.periodogram, "Also write Welch spectra over the grid");
    simulate->add_option("--segment-length", sim.segment_length, "Welch segment duration (0: record / 8)")
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Scan one parameter and record a metric");
    add_physics(sweep, c, s);
    sweep->add_option("--axis", c.sweep.axis, "Parameter to scan")->required();
    sweep->add_option("--from", c.sweep.from, "First value")->capture_default_str();
    sweep->add_option("--to", c.sweep.to, "Last value")->capture_default_str();
    sweep->add_option("--count", c.sweep.count, "Number of points (>= 2)")->capture_default_str();
    sweep->add_option("--scale", c.sweep.scale, "linear or log")->capture_default_str();
    sweep->add_option("--metric", c.sweep.metric, "cooling-ratio:N, occupancy:N or adiabatic-ratio:N")
        ->capture_default_str();

    auto* collective = app.add_subcommand("collective", "Collective phonon modes after cavity elimination");
    add_physics(collective, c, s);

    auto* coupling = app.add_subcommand("coupling", "Coupling constants from sampled mode functions");
    auto& cp = c.coupling;
    coupling->add_option("--phi1", cp.phi1, "Pump optical mode file")->required();
    coupling->add_option("--phi2", cp.phi2, "Anti-Stokes optical mode file")->required();
    coupling->add_option("--psi", cp.psi, "Phonon mode file")->required();
    coupling->add_option("--raman", cp.raman, "Raman tensor file (lines: i j k re im)");
    coupling->add_option("--periodic", cp.periodic, "Periodic axes, e.g. xy");
    coupling->add_option("--scheme", cp.scheme, "Derivative scheme: fd or spectral")->capture_default_str();
    coupling->add_option("--gamma-e", cp.gamma_e, "Electrostrictive constant")->capture_default_str();
    coupling->add_option("--omega-c1", cp.omega_c1, "Pump cavity frequency")->capture_default_str();
    coupling->add_option("--omega-c2", cp.omega_c2, "Anti-Stokes cavity frequency")->capture_default_str();
    coupling->add_option("--eps1", cp.eps1, "Permittivity at the pump")->capture_default_str();
    coupling->add_option("--eps2", cp.eps2, "Permittivity at the anti-Stokes line")->capture_default_str();
    coupling->add_option("--rho0", cp.rho0, "Mass density for phonon normalization");
    coupling->add_option("--omega-m", cp.omega_m, "Phonon frequency for normalization");
    coupling->add_option("--hbar", cp.hbar, "Reduced Planck constant in the input units");

    auto* three = app.add_subcommand("three-wave", "Integrate the pump/anti-Stokes/phonon amplitude equations");
    auto& tw = c.three_wave;
    three->add_option("--kappa1", tw.params.kappa1, "Pump cavity half-width")->capture_default_str();
    three->add_option("--kappa2", tw.params.kappa2, "Anti-Stokes cavity half-width")->capture_default_str();
    three->add_option("--gamma", tw.params.gamma, "Phonon half-width")->capture_default_str();
    three->add_option("--delta1", tw.params.delta1, "Pump cavity detuning")->capture_default_str();
    three->add_option("--delta2", tw.params.delta2, "Anti-Stokes cavity detuning")->capture_default_str();
    three->add_option("--delta", tw.params.delta, "Three-wave phase mismatch")->capture_default_str();
    three->add_option("--beta", s.beta_re, "Coupling (real part)")->capture_default_str();
    three->add_option("--beta-im", s.beta_im, "Coupling (imaginary part)")->capture_default_str();
    three->add_option("--pump", s.pump_re, "Pump drive (real part)")->capture_default_str();
    three->add_option("--pump-im", s.pump_im, "Pump drive (imaginary part)")->capture_default_str();
    three->add_option("--a1", s.a1_re, "Initial pump amplitude (real part)")->capture_default_str();
    three->add_option("--a1-im", s.a1_im, "Initial pump amplitude (imaginary part)")->capture_default_str();
    three->add_option("--a2", s.a2_re, "Initial anti-Stokes amplitude (real part)")->capture_default_str();
    three->add_option("--a2-im", s.a2_im, "Initial anti-Stokes amplitude (imaginary part)")->capture_default_str();
    three->add_option("--u", s.u_re, "Initial phonon amplitude (real part)")->capture_default_str();
    three->add_option("--u-im", s.u_im, "Initial phonon amplitude (imaginary part)")->capture_default_str();
    three->add_option("--t-end", tw.t_end, "End time")->capture_default_str();
    three->add_option("--dt", tw.dt, "RK4 step")->capture_default_str();
    three->add_option("--stride", tw.stride, "Record every n-th step")->capture_default_str();

    for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) {
        sub->add_option("--output,-o", c.output, "Output data file");
    }
}

// Removes "--config X" / "--config=X" from args and returns X.
std::string take_config(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("--config needs a file name");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return path;
}

void check_choice(const std::string& what, const std::string& value, const auto& allowed) {
    if (std::find(allowed.begin(), allowed.end(), value) == allowed.end())
        throw ValidationError(what + " '" + value + "' is not recognized");
}

struct Metric {
    std::string kind;
    int mode = 1;
};

Metric parse_metric(const std::string& text) {
    const auto colon = text.find(':');
    Metric m{text.substr(0, colon), 1};
    if (colon != std::string::npos) {
        const std::string n = text.substr(colon + 1);
        if (n != "1" && n != "2") throw ValidationError("metric mode must be 1 or 2, got '" + n + "'");
        m.mode = n == "1" ? 1 : 2;
    }
    static const std::array<std::string, 3> kinds{"cooling-ratio", "occupancy", "adiabatic-ratio"};
    check_choice("metric", m.kind, kinds);
    return m;
}

void check_config(const RunConfig& c) {
    if (uses_physics(c.command)) validate(c.params);
    if (c.kappa2_hz && !(*c.kappa2_hz > 0.0 && std::isfinite(*c.kappa2_hz)))
        throw ValidationError("kappa2-hz must be positive");
    if (c.mode != 1 && c.mode != 2) throw ValidationError("mode must be 1 or 2");
    if (c.command == "spectrum" || c.command == "antistokes" || (c.command == "simulate" && c.simulate.periodogram)) {
        if (!(c.omega_min < c.omega_max)) throw ValidationError("omega-min must be below omega-max");
        if (c.points < 2) throw ValidationError("points must be at least 2");
    }
    if (c.command == "sweep") {
        check_choice("sweep axis", c.sweep.axis, kSweepAxes);
        if (c.sweep.count < 2) throw ValidationError("sweep count must be at least 2");
        if (c.sweep.scale != "linear" && c.sweep.scale != "log")
            throw ValidationError("sweep scale must be linear or log");
        if (c.sweep.scale == "log" && !(c.sweep.from > 0.0 && c.sweep.to > 0.0))
            throw ValidationError("log sweeps need positive endpoints");
        if (!std::isfinite(c.sweep.from) || !std::isfinite(c.sweep.to))
            throw ValidationError("sweep endpoints must be finite");
        parse_metric(c.sweep.metric);
    }
    if (c.command == "simulate") {
        if (c.simulate.n_traj < 2) throw ValidationError("n-traj must be at least 2");
        if (!(c.simulate.dt > 0.0)) throw ValidationError("dt must be positive");
        if (c.simulate.dump_stride < 1) throw ValidationError("dump-stride must be at least 1");
    }
    if (c.command == "coupling") {
        if (c.coupling.scheme != "fd" && c.coupling.scheme != "spectral")
            throw ValidationError("scheme must be fd or spectral");
        for (char ch : c.coupling.periodic) {
            if (ch != 'x' && ch != 'y' && ch != 'z') throw ValidationError("periodic axes must be drawn from xyz");
        }
    }
    if (c.command == "three-wave") {
        validate(c.three_wave.params);
        if (c.three_wave.stride < 1) throw ValidationError("stride must be at least 1");
    }
}

}  // namespace

std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const std::string config_path = take_config(args);
    KeyValues file_values;
    if (!config_path.empty()) file_values = load_config(config_path);

    std::string command;
    auto first = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
    if (first != args.end() && std::find(kCommands.begin(), kCommands.end(), *first) != kCommands.end()) {
        command = *first;
        args.erase(first);
    }
    for (const auto& [key, value] : file_values) {
        if (key != "command") continue;
        if (command.empty()) command = value;
    }

    // Config values go first so that later command-line flags win.
    std::vector<std::string> tokens;
    if (!command.empty()) tokens.push_back(command);
    for (const auto& [key, value] : file_values) {
        if (key == "command") continue;
        tokens.push_back("--" + key + "=" + value);
    }
    tokens.insert(tokens.end(), args.begin(), args.end());

    RunConfig c;
    Scratch s{c.params.g1.real(), c.params.g1.imag(), c.params.g2.real(), c.params.g2.imag(),
              c.params.nbar1, c.params.nbar2, 0.0,
              c.three_wave.params.beta.real(), c.three_wave.params.beta.imag(),
              c.three_wave.params.pump.real(), c.three_wave.params.pump.imag(),
              c.three_wave.init.a1.real(), c.three_wave.init.a1.imag(),
              c.three_wave.init.a2.real(), c.three_wave.init.a2.imag(),
              c.three_wave.init.u.real(), c.three_wave.init.u.imag()};

    CLI::App app{"Sideband cooling of two phonon modes through one cavity", "bimodal"};
    build_app(app, c, s);
    std::reverse(tokens.begin(), tokens.end());
    try {
        app.parse(tokens);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, out);
            return std::nullopt;
        }
        std::string msg = e.what();
        if (msg.empty()) msg = e.get_name();
        throw ValidationError(msg);
    }

    auto* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    c.config_path = config_path;
    if (uses_physics(c.command)) {
        c.params.g1 = cplx(s.g1_re, s.g1_im);
        c.params.g2 = cplx(s.g2_re, s.g2_im);
        const bool has1 = sub->count("--nbar1") > 0;
        const bool has2 = sub->count("--nbar2") > 0;
        c.params.nbar1 = s.nbar1;
        c.params.nbar2 = s.nbar2;
        if (has1 && !has2) c.params.nbar2 = s.nbar1;
        if (has2 && !has1) c.params.nbar1 = s.nbar2;
        if (sub->count("--kappa2-hz") > 0) c.kappa2_hz = s.kappa2_hz;
    }
    if (c.command == "three-wave") {
        auto& tw = c.three_wave;
        tw.params.beta = cplx(s.beta_re, s.beta_im);
        tw.params.pump = cplx(s.pump_re, s.pump_im);
        tw.init.a1 = cplx(s.a1_re, s.a1_im);
        tw.init.a2 = cplx(s.a2_re, s.a2_im);
        tw.init.u = cplx(s.u_re, s.u_im);
    }
    check_config(c);
    return c;
}

KeyValues effective_config(const RunConfig& c) {
    KeyValues kv;
    auto put = [&kv](const std::string& key, const std::string& value) {
        if (!value.empty()) kv.emplace_back(key, value);
    };
    auto num = [&put](const std::string& key, double x) { put(key, format_double(x)); };
    const auto& p = c.params;

    if (uses_physics(c.command)) {
        num("delta", p.delta);
        num("omega", p.omega);
        num("gamma1", p.gamma1);
        num("gamma2", p.gamma2);
        num("g1", p.g1.real());
        num("g1-im", p.g1.imag());
        num("g2", p.g2.real());
        num("g2-im", p.g2.imag());
        num("nbar1", p.nbar1);
        num("nbar2", p.nbar2);
        if (c.kappa2_hz) num("kappa2-hz", *c.kappa2_hz);
    }
    auto grid = [&] {
        num("omega-min", c.omega_min);
        num("omega-max", c.omega_max);
        put("points", std::to_string(c.points));
    };
    if (c.command == "spectrum") {
        put("mode", std::to_string(c.mode));
        put("normalized", bool_str(c.normalized));
        grid();
    } else if (c.command == "antistokes") {
        grid();
    } else if (c.command == "cooling-ratio") {
        put("mode", std::to_string(c.mode));
    } else if (c.command == "simulate") {
        const auto& sim = c.simulate;
        put("n-traj", std::to_string(sim.n_traj));
        num("t-end", sim.t_end);
        num("dt", sim.dt);
        num("burn-in", sim.burn_in);
        put("seed", std::to_string(c.seed));
        put("dump", bool_str(sim.dump));
        put("dump-stride", std::to_string(sim.dump_stride));
        put("periodogram", bool_str(sim.periodogram));
        num("segment-length", sim.segment_length);
        grid();
    } else if (c.command == "sweep") {
        put("axis", c.sweep.axis);
        num("from", c.sweep.from);
        num("to", c.sweep.to);
        put("count", std::to_string(c.sweep.count));
        put("scale", c.sweep.scale);
        put("metric", c.sweep.metric);
    } else if (c.command == "coupling") {
        const auto& cp = c.coupling;
        put("phi1", cp.phi1);
        put("phi2", cp.phi2);
        put("psi", cp.psi);
        put("raman", cp.raman);
        put("periodic", cp.periodic);
        put("scheme", cp.scheme);
        num("gamma-e", cp.gamma_e);
        num("omega-c1", cp.omega_c1);
        num("omega-c2", cp.omega_c2);
        num("eps1", cp.eps1);
        num("eps2", cp.eps2);
        num("rho0", cp.rho0);
        num("omega-m", cp.omega_m);
        num("hbar", cp.hbar);
    } else if (c.command == "three-wave") {
        const auto& tw = c.three_wave;
        num("kappa1", tw.params.kappa1);
        num("kappa2", tw.params.kappa2);
        num("gamma", tw.params.gamma);
        num("delta1", tw.params.delta1);
        num("delta2", tw.params.delta2);
        num("delta", tw.params.delta);
        num("beta", tw.params.beta.real());
        num("beta-im", tw.params.beta.imag());
        num("pump", tw.params.pump.real());
        num("pump-im", tw.params.pump.imag());
        num("a1", tw.init.a1.real());
        num("a1-im", tw.init.a1.imag());
        num("a2", tw.init.a2.real());
        num("a2-im", tw.init.a2.imag());
        num("u", tw.init.u.real());
        num("u-im", tw.init.u.imag());
        num("t-end", tw.t_end);
        num("dt", tw.dt);
        put("stride", std::to_string(tw.stride));
    }
    return kv;
}

namespace {

std::string mode_tag(int mode) { return "b" + std::to_string(mode); }

std::string output_or(const RunConfig& c, const std::string& fallback) {
    const std::string path = c.output.empty() ? fallback : c.output;
    guard_against_inputs(path, c);
    return path;
}

ordered_json grid_json(const RunConfig& c) {
    return ordered_json{{"omega_min", c.omega_min}, {"omega_max", c.omega_max}, {"points", c.points},
                        {"spacing", "uniform"}};
}

int run_spectrum(const RunConfig& c, std::ostream& out) {
    const auto omegas = uniform_grid(c.omega_min, c.omega_max, c.points);
    SpectrumCurve curve;
    std::string path;
    if (c.command == "spectrum") {
        curve = phonon_spectrum(c.params, c.mode, omegas, c.normalized);
        path = output_or(c, "spectrum_" + mode_tag(c.mode) + ".csv");
    } else {
        curve = antistokes_spectrum(c.params, omegas);
        path = output_or(c, "antistokes.csv");
    }
    OutputFile file(path);
    write_spectrum_csv(file.stream(), curve, 1.0, header_lines(c));
    file.close();

    ordered_json extra;
    extra["params"] = params_json(c.params);
    extra["grid"] = grid_json(c);
    extra["normalization"] = c.normalized ? "Gamma_i S / (2 nbar_i)" : "S in units of 1/kappa2";
    extra["columns"] = {"omega_over_kappa2", to_string(curve.kind)};
    write_sidecar(path, c, extra);
    out << "wrote " << path << " (" << curve.omegas.size() << " rows)\n";
    return 0;
}

ordered_json quadrature_json() {
    return ordered_json{{"method", "adaptive Gauss-Kronrod (31 points)"},
                        {"interval", "whole real line: core window |Omega| + 50 kappa2 plus mapped tails"}};
}

int run_cooling_ratio(const RunConfig& c, std::ostream& out) {
    const double nbar = c.mode == 1 ? c.params.nbar1 : c.params.nbar2;
    if (!(nbar > 0.0)) throw ValidationError("cooling ratio needs nbar" + std::to_string(c.mode) + " > 0");
    const auto occ = occupancy(c.params, c.mode);
    const double ratio = occ.value / nbar;
    const double adiabatic = adiabatic_cooling_ratio(c.params, c.mode);

    const std::string path = output_or(c, "cooling_ratio_" + mode_tag(c.mode) + ".csv");
    OutputFile file(path);
    auto& f = file.stream();
    for (const auto& line : header_lines(c)) f << "# " << line << '\n';
    f << "mode,R_occupancy_over_nbar,occupancy_quanta,quadrature_error_quanta,R_adiabatic_estimate\n";
    f << c.mode << ',' << format_double(ratio) << ',' << format_double(occ.value) << ','
      << format_double(occ.error_estimate) << ',' << format_double(adiabatic) << '\n';
    file.close();

    ordered_json extra;
    extra["params"] = params_json(c.params);
    extra["quadrature"] = quadrature_json();
    write_sidecar(path, c, extra);

    char buf[64];
    std::snprintf(buf, sizeof buf, "R=%.3f", ratio);
    out << buf << '\n';
    return 0;
}

ordered_json estimates_json(const std::array<ModeEstimate, 3>& e) {
    ordered_json j;
    for (std::size_t ch = 0; ch < 3; ++ch) {
        j[DriftMatrix::labels[ch]] = {{"mean", e[ch].mean}, {"standard_error", e[ch].standard_error}};
    }
    return j;
}

int run_simulate(const RunConfig& c, std::ostream& out) {
    const auto& sim = c.simulate;
    const double burn_in = sim.burn_in > 0.0 ? sim.burn_in : minimum_burn_in(c.params);
    const double t_end = sim.t_end > 0.0 ? sim.t_end : burn_in + 500.0;

    const std::string path = output_or(c, "simulate.json");
    SimulationOptions options;
    if (sim.dump) {
        const std::string dir = path + ".trajectories";
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw ValidationError("cannot create " + dir + ": " + ec.message());
        options.dump_directory = dir;
        options.dump_stride = sim.dump_stride;
    }
    out << "seed=" << c.seed << '\n';
    const auto stats = simulate_ensemble(c.params, sim.n_traj, t_end, sim.dt, burn_in, c.seed, options);

    ordered_json record;
    record["n_traj"] = stats.n_traj;
    record["t_end"] = stats.t_end;
    record["dt"] = stats.dt;
    record["burn_in"] = stats.burn_in;
    record["seed"] = stats.seed;
    record["scheme"] = stats.scheme;
    record["units"] = "occupancies in quanta";
    record["occupancy"] = estimates_json(stats.occupancy);
    record["first_half"] = estimates_json(stats.first_half);
    record["second_half"] = estimates_json(stats.second_half);
    OutputFile file(path);
    file.stream() << record.dump(2) << '\n';
    file.close();

    ordered_json extra;
    extra["params"] = params_json(c.params);
    extra["burn_in"] = burn_in;
    extra["t_end"] = t_end;
    write_sidecar(path, c, extra);
    out << "wrote " << path << '\n';

    if (sim.periodogram) {
        PeriodogramConfig pc;
        pc.n_traj = sim.n_traj;
        pc.record_length = t_end - burn_in;
        pc.dt = sim.dt;
        pc.burn_in = burn_in;
        pc.segment_length = sim.segment_length;
        pc.seed = c.seed;
        const auto omegas = uniform_grid(c.omega_min, c.omega_max, c.points);
        const auto result = periodogram(c.params, pc, omegas);

        const std::string ppath = (fs::path(path).parent_path() / fs::path(path).stem()).string() + "_periodogram.csv";
        guard_against_inputs(ppath, c);
        OutputFile pfile(ppath);
        auto& f = pfile.stream();
        for (const auto& line : header_lines(c)) f << "# " << line << '\n';
        f << "# Welch segments: " << result.segments << '\n';
        f << "omega_over_kappa2,P_a_per_kappa2,P_b1_per_kappa2,P_b2_per_kappa2,"
             "stderr_a_per_kappa2,stderr_b1_per_kappa2,stderr_b2_per_kappa2\n";
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            f << format_double(omegas[i]);
            for (std::size_t ch = 0; ch < 3; ++ch) f << ',' << format_double(result.curves[ch].values[i]);
            for (std::size_t ch = 0; ch < 3; ++ch) f << ',' << format_double(result.standard_error[ch][i]);
            f << '\n';
        }
        pfile.close();
        ordered_json pextra;
        pextra["params"] = params_json(c.params);
        pextra["grid"] = grid_json(c);
        pextra["segments"] = result.segments;
        write_sidecar(ppath, c, pextra);
        out << "wrote " << ppath << '\n';
    }
    return 0;
}

void set_axis(SystemParams& p, const std::string& axis, double v) {
    if (axis == "delta") p.delta = v;
    else if (axis == "omega") p.omega = v;
    else if (axis == "gamma1") p.gamma1 = v;
    else if (axis == "gamma2") p.gamma2 = v;
    else if (axis == "g1") p.g1 = cplx(v, p.g1.imag());
    else if (axis == "g2") p.g2 = cplx(v, p.g2.imag());
    else if (axis == "nbar1") p.nbar1 = v;
    else if (axis == "nbar2") p.nbar2 = v;
}

std::vector<double> sweep_values(const SweepSpec& s) {
    std::vector<double> v(s.count);
    const double n = static_cast<double>(s.count - 1);
    for (std::size_t i = 0; i < s.count; ++i) {
        const double t = static_cast<double>(i) / n;
        v[i] = s.scale == "log" ? s.from * std::pow(s.to / s.from, t) : s.from + (s.to - s.from) * t;
    }
    v.back() = s.to;
    return v;
}

int run_sweep(const RunConfig& c, std::ostream& out) {
    const Metric metric = parse_metric(c.sweep.metric);
    const auto values = sweep_values(c.sweep);
    std::vector<SystemParams> points(values.size(), c.params);
    for (std::size_t i = 0; i < values.size(); ++i) {
        set_axis(points[i], c.sweep.axis, values[i]);
        validate(points[i]);
    }

    struct Row {
        double value = 0.0;
        double error = 0.0;
    };
    std::vector<Row> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        const auto& p = points[i];
        const double nbar = metric.mode == 1 ? p.nbar1 : p.nbar2;
        if (metric.kind == "adiabatic-ratio") {
            rows[i] = {adiabatic_cooling_ratio(p, metric.mode), 0.0};
            return;
        }
        const auto occ = occupancy(p, metric.mode);
        if (metric.kind == "occupancy") {
            rows[i] = {occ.value, occ.error_estimate};
        } else {
            if (!(nbar > 0.0)) throw ValidationError("cooling ratio needs nbar > 0 at sweep point " + std::to_string(i));
            rows[i] = {occ.value / nbar, occ.error_estimate / nbar};
        }
    });

    const std::string tag = mode_tag(metric.mode);
    const bool quanta_axis = c.sweep.axis.rfind("nbar", 0) == 0;
    const std::string axis_column = c.sweep.axis + (quanta_axis ? "_quanta" : "_over_kappa2");
    std::string value_column, error_column;
    if (metric.kind == "cooling-ratio") {
        value_column = "R_" + tag;
        error_column = "R_quadrature_error";
    } else if (metric.kind == "occupancy") {
        value_column = "occupancy_" + tag + "_quanta";
        error_column = "quadrature_error_quanta";
    } else {
        value_column = "R_adiabatic_" + tag;
        error_column = "not_applicable";
    }

    const std::string path = output_or(c, "sweep.csv");
    OutputFile file(path);
    auto& f = file.stream();
    for (const auto& line : header_lines(c)) f << "# " << line << '\n';
    f << "index," << axis_column << ',' << value_column << ',' << error_column << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        f << i << ',' << format_double(values[i]) << ',' << format_double(rows[i].value) << ','
          << format_double(rows[i].error) << '\n';
    }
    file.close();

    ordered_json extra;
    extra["params"] = params_json(c.params);
    extra["sweep"] = {{"axis", c.sweep.axis}, {"from", c.sweep.from}, {"to", c.sweep.to},
                      {"count", c.sweep.count}, {"scale", c.sweep.scale}, {"metric", c.sweep.metric}};
    if (metric.kind != "adiabatic-ratio") extra["quadrature"] = quadrature_json();
    write_sidecar(path, c, extra);
    out << "wrote " << path << " (" << rows.size() << " rows)\n";
    return 0;
}

int run_collective(const RunConfig& c, std::ostream& out) {
    const auto reduced = adiabatic_reduce(c.params);
    const auto modes = collective_rates(c.params);
    const auto drift = drift_eigenvalues(c.params);

    const std::string path = output_or(c, "collective.csv");
    OutputFile file(path);
    auto& f = file.stream();
    for (const auto& line : header_lines(c)) f << "# " << line << '\n';
    f << "# labeling: " << to_string(modes.labeling) << '\n';
    f << "# adiabatic_regime: " << bool_str(reduced.adiabatic_regime) << '\n';
    if (!reduced.warning.empty()) f << "# warning: " << reduced.warning << '\n';
    f << "# effective_width_over_kappa2: " << format_double(reduced.effective_width[0]) << ' '
      << format_double(reduced.effective_width[1]) << '\n';
    f << "# full drift eigenvalues over kappa2:";
    for (const auto& ev : drift) f << ' ' << format_double(ev.real()) << (ev.imag() < 0 ? "" : "+") << format_double(ev.imag()) << 'i';
    f << '\n';
    f << "label,decay_rate_over_kappa2,frequency_over_kappa2,eigenvalue_re_over_kappa2,eigenvalue_im_over_kappa2,"
         "v_b1_re,v_b1_im,v_b2_re,v_b2_im,overlap_plus,overlap_minus\n";
    for (const auto& m : modes.modes) {
        f << to_string(m.label) << ',' << format_double(m.rate.real()) << ',' << format_double(m.rate.imag()) << ','
          << format_double(m.eigenvalue.real()) << ',' << format_double(m.eigenvalue.imag()) << ','
          << format_double(m.vector(0).real()) << ',' << format_double(m.vector(0).imag()) << ','
          << format_double(m.vector(1).real()) << ',' << format_double(m.vector(1).imag()) << ','
          << format_double(m.overlap_plus) << ',' << format_double(m.overlap_minus) << '\n';
    }
    file.close();

    ordered_json extra;
    extra["params"] = params_json(c.params);
    extra["labeling"] = to_string(modes.labeling);
    extra["adiabatic_regime"] = reduced.adiabatic_regime;
    write_sidecar(path, c, extra);

    out << "labeling=" << to_string(modes.labeling) << '\n';
    for (const auto& m : modes.modes) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: rate=%.6g frequency=%.6g", to_string(m.label).c_str(), m.rate.real(),
                      m.rate.imag());
        out << buf << '\n';
    }
    if (!reduced.warning.empty()) out << "warning: " << reduced.warning << '\n';
    out << "wrote " << path << '\n';
    return 0;
}

RamanTensor read_raman(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open Raman tensor file " + path);
    RamanTensor t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        std::istringstream row(line);
        int i, j, k;
        double re, im;
        if (!(row >> i >> j >> k >> re >> im) || i < 0 || i > 2 || j < 0 || j > 2 || k < 0 || k > 2)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected 'i j k re im' with indices 0..2");
        t(i, j, k) = cplx(re, im);
    }
    return t;
}

int run_coupling(const RunConfig& c, std::ostream& out) {
    const auto& cp = c.coupling;
    std::array<bool, 3> periodic{cp.periodic.find('x') != std::string::npos,
                                 cp.periodic.find('y') != std::string::npos,
                                 cp.periodic.find('z') != std::string::npos};
    const auto phi1 = read_mode_field(cp.phi1, periodic);
    const auto phi2 = read_mode_field(cp.phi2, periodic);
    auto psi = read_mode_field(cp.psi, periodic);
    const int norm_given = (cp.rho0 > 0.0) + (cp.omega_m > 0.0) + (cp.hbar > 0.0);
    if (norm_given != 0 && norm_given != 3)
        throw ValidationError("phonon normalization needs rho0, omega-m and hbar together");
    if (norm_given == 3) psi = normalize_mode(psi, cp.rho0, cp.omega_m, cp.hbar);

    const OpticalPair optics{cp.omega_c1, cp.omega_c2, cp.eps1, cp.eps2};
    const auto scheme = cp.scheme == "spectral" ? DerivativeScheme::spectral : DerivativeScheme::finite_difference;
    const cplx acoustic = beta_acoustic(phi2, phi1, psi, cp.gamma_e, optics, scheme);
    std::vector<std::pair<std::string, cplx>> rows{{"beta_acoustic", acoustic}};
    if (!cp.raman.empty()) rows.emplace_back("beta_raman", beta_raman(read_raman(cp.raman), phi2, phi1, psi, optics));

    const std::string path = output_or(c, "coupling.csv");
    OutputFile file(path);
    auto& f = file.stream();
    for (const auto& line : header_lines(c)) f << "# " << line << '\n';
    f << "# psi normalized: " << bool_str(norm_given == 3) << '\n';
    f << "quantity,re,im,abs\n";
    for (const auto& [name, v] : rows) {
        f << name << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << ','
          << format_double(std::abs(v)) << '\n';
    }
    file.close();

    ordered_json extra;
    extra["grid_points"] = psi.grid.size();
    extra["scheme"] = cp.scheme;
    write_sidecar(path, c, extra);
    for (const auto& [name, v] : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s=%.10g%+.10gi", name.c_str(), v.real(), v.imag());
        out << buf << '\n';
    }
    out << "wrote " << path << '\n';
    return 0;
}

int run_three_wave(const RunConfig& c, std::ostream& out) {
    const auto& tw = c.three_wave;
    const auto traj = evolve_three_wave(tw.params, tw.init, tw.t_end, tw.dt, tw.stride);
    const std::string path = output_or(c, "three_wave.csv");
    OutputFile file(path);
    for (const auto& line : header_lines(c)) file.stream() << "# " << line << '\n';
    write_trajectory_csv(file.stream(), traj);
    file.close();

    ordered_json extra;
    extra["integrator"] = "classical RK4, fixed step";
    extra["samples"] = traj.size();
    write_sidecar(path, c, extra);
    out << "wrote " << path << " (" << traj.size() << " rows)\n";
    return 0;
}

}  // namespace

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        check_config(c);
        if (c.command == "spectrum" || c.command == "antistokes") return run_spectrum(c, out);
        if (c.command == "cooling-ratio") return run_cooling_ratio(c, out);
        if (c.command == "simulate") return run_simulate(c, out);
        if (c.command == "sweep") return run_sweep(c, out);
        if (c.command == "collective") return run_collective(c, out);
        if (c.command == "coupling") return run_coupling(c, out);
        if (c.command == "three-wave") return run_three_wave(c, out);
        err << "error: unknown command '" << c.command << "'\n";
        return 1;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> config;
    try {
        config = parse(argc, argv, out);
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << msg << '\n';
        return 1;
    }
    if (!config) return 0;
    return execute(*config, out, err);
}

}  // namespace bimodal::cli
