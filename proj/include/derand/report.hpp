#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

// Experiment runs: a command plus a parameter record in, a JSON report out.
namespace derand {

// Malformed or inconsistent run configuration; maps to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Commands: "prg sample", "fool", "graph build", "graph audit", "graph fold",
// "graph cut", "gap", "audit-all".
struct RunConfig {
    std::string command;
    nlohmann::json params = nlohmann::json::object();
};

struct Sidecar {
    std::string path;
    std::string content;
};

struct RunResult {
    nlohmann::json report;
    int exit_code = 0;                  // 0 all asserted invariants pass, 1 otherwise
    std::vector<std::string> failing;   // failing claim ids
    std::vector<Sidecar> sidecars;      // files requested by output-path parameters
};

const std::vector<std::string>& known_commands();

struct ParamInfo {
    std::string name;
    std::string kind;   // "uint", "int", "number", "bool", "string", "object", "int_array"
    nlohmann::json def; // null: no default
    bool required = false;
};
std::vector<ParamInfo> param_info(const std::string& command);
// Defaults for every parameter the command accepts.
nlohmann::json default_params(const std::string& command);
// Fills defaults and rejects unknown keys or ill-typed values (UsageError).
nlohmann::json resolve_params(const std::string& command, const nlohmann::json& given);
// Reads a config file: either {"command": ..., "params": {...}} or a flat
// parameter object. A command in the file must match `command`.
nlohmann::json load_config_params(const std::string& path, const std::string& command);

// Throws UsageError for bad configs; other library errors are mapped the
// same way (ParameterError, SeedError, CapExceeded). ConstructionError becomes
// a failing claim.
RunResult run(const RunConfig& config);

// Copy of a report without timing fields, for determinism comparisons.
nlohmann::json strip_timing(const nlohmann::json& report);

}  // namespace derand
