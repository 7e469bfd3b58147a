#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bimodal/cli.hpp"

namespace bimodal::cli {

using ordered_json = nlohmann::ordered_json;

// %.17g: round-trips through strtod.
std::string format_double(double x);

// Lines for the '#' header of every CSV written by a command.
std::vector<std::string> header_lines(const RunConfig& config);

ordered_json params_json(const SystemParams& params);

// Sidecar for a data file: <data_path>.meta.json. `extra` members are
// appended after the common ones; the effective config comes last.
void write_sidecar(const std::string& data_path, const RunConfig& config, const ordered_json& extra);

std::string sidecar_path(const std::string& data_path);

// Throws ValidationError if `path` names one of the command's input files.
void guard_against_inputs(const std::string& path, const RunConfig& config);

// Opens `path` for writing; throws ValidationError if that fails.
class OutputFile {
public:
    explicit OutputFile(const std::string& path);
    std::ostream& stream();
    void close();

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
};

}  // namespace bimodal::cli
