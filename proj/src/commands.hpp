#pragma once
// Command drivers shared by the CLI and the C interface. Each command writes its tables and
// reports into one output directory together with a checksummed manifest.
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace fw {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
    std::string out_dir;  // empty: derived from the config and FRONTWAVE_OUT
    std::optional<double> horizon;
};

enum class RunStatus { Pass = 0, Fail = 1, Error = 2 };

struct CommandResult {
    RunStatus status = RunStatus::Pass;
    std::string out_dir;
    std::string summary;
    nlohmann::ordered_json report;
    std::vector<std::string> files;
};

const std::vector<std::string>& command_names();

// Assumption failures and failed checks come back as Fail with a report; other errors throw.
CommandResult run_command(const std::string& command, const RunConfig& cfg, const RunOptions& opt = {});

std::string resolve_out_dir(const std::string& command, const RunConfig& cfg, const RunOptions& opt);

}  // namespace fw
