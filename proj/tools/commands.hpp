#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace phonon::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_solver = 2, exit_verify = 3 };

inline constexpr const char* version = "1.0.0";

struct RunContext {
    std::size_t jobs = 1;
    std::ostream* log = nullptr;  // progress and summaries; may be null
    std::string preset;           // provenance only
};

struct VerifyRow {
    std::string probe;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation;  // "<=" or ">="
    bool pass = false;
};

// Each command writes into cfg.output.dir (created if needed) and returns an exit code.
// Errors propagate as exceptions; run_command maps them to exit codes.
int cmd_forward(const RunConfig& cfg, const RunContext& ctx);
int cmd_adjoint(const RunConfig& cfg, const RunContext& ctx);
int cmd_generate(const RunConfig& cfg, const RunContext& ctx);
int cmd_reconstruct(const RunConfig& cfg, const RunContext& ctx);
int cmd_verify(const RunConfig& cfg, const RunContext& ctx);

std::vector<VerifyRow> verify_battery(const RunConfig& cfg, std::size_t jobs, std::ostream* log);

// Validates the config, runs the command, and converts failures into exit codes
// with a module-qualified message on `err`.
int run_command(const std::string& command, const RunConfig& cfg, const RunContext& ctx, std::ostream& err);

}  // namespace phonon::cli
