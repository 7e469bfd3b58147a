#include "output.hpp"

#include <cstdio>
#include <filesystem>

namespace bimodal::cli {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);
    return buf;
}

std::string version() { return BIMODAL_VERSION; }

std::vector<std::string> header_lines(const RunConfig& config) {
    std::vector<std::string> lines;
    lines.push_back("bimodal " + version() + " " + config.command);
    if (config.command == "three-wave" || config.command == "coupling") {
        lines.push_back("units: as supplied on input");
    } else {
        lines.push_back("units: rates and frequencies in kappa2 (kappa2 = 1)");
        if (config.kappa2_hz) lines.push_back("kappa2_hz=" + format_double(*config.kappa2_hz));
    }
    for (const auto& [key, value] : effective_config(config)) lines.push_back(key + "=" + value);
    return lines;
}

ordered_json params_json(const SystemParams& p) {
    ordered_json j;
    j["kappa2"] = p.kappa2;
    j["delta"] = p.delta;
    j["omega"] = p.omega;
    j["gamma1"] = p.gamma1;
    j["gamma2"] = p.gamma2;
    j["g1"] = {p.g1.real(), p.g1.imag()};
    j["g2"] = {p.g2.real(), p.g2.imag()};
    j["nbar1"] = p.nbar1;
    j["nbar2"] = p.nbar2;
    return j;
}

std::string sidecar_path(const std::string& data_path) { return data_path + ".meta.json"; }

void write_sidecar(const std::string& data_path, const RunConfig& config, const ordered_json& extra) {
    ordered_json j;
    j["tool"] = "bimodal";
    j["version"] = version();
    j["command"] = config.command;
    ordered_json units;
    if (config.command == "three-wave" || config.command == "coupling") {
        units["frequency"] = "as supplied";
    } else {
        units["frequency"] = "kappa2";
        units["kappa2_hz"] = config.kappa2_hz ? ordered_json(*config.kappa2_hz) : ordered_json(nullptr);
    }
    j["units"] = units;
    j["seed"] = config.seed;
    for (const auto& [key, value] : extra.items()) j[key] = value;
    ordered_json cfg = ordered_json::object();
    cfg["command"] = config.command;
    for (const auto& [key, value] : effective_config(config)) cfg[key] = value;
    j["config"] = cfg;

    const std::string path = sidecar_path(data_path);
    guard_against_inputs(path, config);
    OutputFile out(path);
    out.stream() << j.dump(2) << '\n';
    out.close();
}

namespace {

bool same_file(const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) return false;
    std::error_code ec;
    if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
    return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

}  // namespace

void guard_against_inputs(const std::string& path, const RunConfig& config) {
    const std::vector<std::string> inputs{config.config_path, config.coupling.phi1, config.coupling.phi2,
                                          config.coupling.psi, config.coupling.raman};
    for (const auto& input : inputs) {
        if (same_file(path, input)) throw ValidationError("refusing to overwrite input file " + input);
    }
}

OutputFile::OutputFile(const std::string& path) : path_(path), file_(std::make_unique<std::ofstream>(path)) {
    if (!*file_) throw ValidationError("cannot open " + path + " for writing");
}

std::ostream& OutputFile::stream() { return *file_; }

void OutputFile::close() {
    file_->close();
    if (!*file_) throw ValidationError("failed writing " + path_);
}

}  // namespace bimodal::cli
