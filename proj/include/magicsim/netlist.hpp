#pragma once

// Spectre-shaped testbench emission for a single crossbar row:
//
//   crossbar.scs   subckt with one VTEAM instance per column, plus its call
//   switches.scs   relay per row/column pin
//   sources.scs    PWL vsource per switch control and column drive
//   simparams.scs  model include, input/variation parameters, saves, tran
//   energy.ocn     per-device integral of V*I and the row total
//   main.scs       includes the above
//   pwl/           r0.txt, c<i>.txt, s<i>.txt

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "magicsim/device.hpp"
#include "magicsim/mapping_ir.hpp"
#include "magicsim/schedule.hpp"

namespace magicsim {

struct EmitConfig {
    std::string output_dir = "out";
    std::string model_include_path = "./vteam.va";
    std::string subckt_name = "crossbar_sub";
    std::string instance_prefix = "crossbar0";
    std::string pwl_dir = "./pwl";
    double switch_open_resistance = 1e12;
    double switch_closed_resistance = 1.0;
    double tran_step = 1e-12;
};

// One per-device parameter override carried on the `parameters` line as
// var_<field>_<device>.
struct VariationAssignment {
    std::size_t device;
    std::string field;
    double value;

    std::string param_name() const { return "var_" + field + "_" + std::to_string(device); }
};

std::vector<VariationAssignment> make_variation_assignments(std::span<const VteamParams> per_device,
                                                            const VariationSpec& spec);

std::string emit_crossbar_subckt(std::size_t n_columns, const VteamParams& params, const EmitConfig& config,
                                 std::span<const VariationAssignment> assignments = {});
std::string emit_switches(std::size_t n_columns, const EmitConfig& config);
std::string emit_sources(std::size_t n_columns, const std::string& pwl_dir, const EmitConfig& config);
std::string emit_sim_params(const Schedule& schedule, const InputPattern& pattern,
                            std::span<const VariationAssignment> assignments, const EmitConfig& config);
std::string emit_energy_ocn(std::size_t n_columns, const Schedule& schedule, const EmitConfig& config);
std::string emit_main(const EmitConfig& config);

// Dangling-net check: every net named by a relay or source is defined
// exactly once across the three texts. Returns one message per problem.
std::vector<std::string> lint_netlist(const std::string& crossbar, const std::string& switches,
                                      const std::string& sources);

struct Manifest {
    std::string root;
    std::vector<std::string> files;  // relative to root, in write order
};

Manifest emit_tree(const ExecutionPlan& plan, const InputPattern& pattern, const Schedule& schedule,
                   const VteamParams& params, const EmitConfig& config,
                   std::span<const VariationAssignment> assignments = {});

}  // namespace magicsim
