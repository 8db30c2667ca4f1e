#pragma once

// Subcommand implementations behind the `magicsim` executable. They are
// library functions so tests can drive them without spawning a process.

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "magicsim/config.hpp"
#include "magicsim/energy.hpp"
#include "magicsim/netlist.hpp"
#include "magicsim/oracle.hpp"

namespace magicsim {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitParse = 2,
    kExitValidate = 3,
    kExitConfig = 4,
    kExitSim = 5,
    kExitVerify = 6,
    kExitIo = 7,
};

// Maps a pipeline exception to its exit code and stage tag.
int exit_code_for(const std::exception& e);
const char* stage_for(const std::exception& e);

// Reads, parses and validates a plan. Count mismatches are reported on
// `warn`; any other violation throws PlanError.
ExecutionPlan load_plan(const std::string& path, std::ostream& warn);
std::string plan_name_from_path(const std::string& path);

Manifest cmd_gen(const std::string& plan_path, const RunConfig& cfg, const std::string& pattern,
                 const std::string& out_dir, std::ostream& out, std::ostream& err);

struct SimOutcome {
    std::string pattern;
    std::string dir;
    bool pass = false;
    VerificationReport verification;
    EnergyReport energy;
};

// One run per pattern. With several patterns each gets its own
// subdirectory named after the pattern.
std::vector<SimOutcome> cmd_sim(const std::string& plan_path, const RunConfig& cfg,
                                const std::vector<std::string>& patterns, const std::string& out_dir,
                                std::ostream& out, std::ostream& err);

// CSV with one row per plan that simulated successfully.
std::string cmd_energy_table(const std::vector<std::string>& plan_paths, const RunConfig& cfg, std::ostream& err);

struct CalibrationOutcome {
    VteamParams params;
    bool truth_tables_pass = false;
    std::vector<std::string> failures;
};

CalibrationOutcome cmd_calibrate(const CalibrationTargets& targets, const RunConfig& cfg, const std::string& out_path,
                                 std::ostream& out);

// Writes the committed example plans and truth tables.
std::vector<std::string> cmd_fixtures(const std::string& out_dir);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace magicsim
