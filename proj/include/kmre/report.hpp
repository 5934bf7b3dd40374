#pragma once
// Report assembly: every command emits one JSON summary (config echo, seed,
// version, timestamp) and optional CSV detail for external plotting.

#include <string>

#include <json.hpp>

namespace kmre {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

// {command, version, seed, timestamp, params, results, checks}; identical
// configs and seeds reproduce everything except the timestamp field.
json make_report(const std::string& command, uint64_t seed, json params, json results,
                 json checks);

bool all_checks_pass(const json& report);

void write_text_file(const std::string& path, const std::string& content);
void write_json(const std::string& path, const json& report);

// default output directory: $KMRE_OUT_DIR or "."
std::string output_dir();
std::string output_path(const std::string& explicit_path, const std::string& fallback_name);

} // namespace kmre
