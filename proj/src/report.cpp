#include "kmre/report.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace kmre {

json make_report(const std::string& command, uint64_t seed, json params, json results,
                 json checks) {
    json rep;
    rep["command"] = command;
    rep["version"] = kVersion;
    rep["seed"] = seed;
    rep["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    rep["params"] = std::move(params);
    rep["results"] = std::move(results);
    rep["checks"] = std::move(checks);
    return rep;
}

bool all_checks_pass(const json& report) {
    if (!report.contains("checks")) return true;
    for (const auto& [key, value] : report.at("checks").items()) {
        (void)key;
        if (value.is_boolean() && !value.get<bool>()) return false;
    }
    return true;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

void write_json(const std::string& path, const json& report) {
    write_text_file(path, report.dump(2) + "\n");
}

std::string output_dir() {
    const char* env = std::getenv("KMRE_OUT_DIR");
    return env && *env ? std::string(env) : std::string(".");
}

std::string output_path(const std::string& explicit_path, const std::string& fallback_name) {
    if (!explicit_path.empty()) return explicit_path;
    return output_dir() + "/" + fallback_name;
}

} // namespace kmre
