#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bimodal/cli.hpp"

namespace bimodal::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

KeyValues from_json(const std::string& text, const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config " + path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("config") || !doc["config"].is_object())
        throw ValidationError("config " + path + ": JSON config needs a \"config\" object");
    KeyValues kv;
    for (const auto& [key, value] : doc["config"].items()) {
        if (!value.is_string()) throw ValidationError("config " + path + ": value of '" + key + "' must be a string");
        kv.emplace_back(key, value.get<std::string>());
    }
    return kv;
}

}  // namespace

KeyValues load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return from_json(text, path);

    KeyValues kv;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config " + path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty())
            throw ValidationError("config " + path + ":" + std::to_string(lineno) + ": empty key");
        kv.emplace_back(key, trim(t.substr(eq + 1)));
    }
    return kv;
}

}  // namespace bimodal::cli
