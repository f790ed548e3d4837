#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ionclock/config.hpp"

namespace ionclock::app {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_validation = 2,
    exit_convergence = 3,
    exit_range = 4,
    exit_instability = 5,
};

struct RunOptions {
    bool orientation_sweep = false;
    bool compensate = false;
};

void cmd_solve(const ScenarioConfig& cfg, std::ostream& log);
void cmd_shifts(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log);
void cmd_magic_scan(const ScenarioConfig& cfg, std::ostream& log);
void cmd_ramsey(const ScenarioConfig& cfg, std::ostream& log);
void cmd_budget(const ScenarioConfig& cfg, std::ostream& log);
void cmd_oracle(const ScenarioConfig& cfg, std::ostream& log);

/// Parses flags, runs the subcommand and maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ionclock::app
