#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "io.hpp"
#include "opgrowth/analysis.hpp"

namespace opgrowth::cli {

struct BuiltModel {
  ModelData data;
  /// Envelope class known from the construction (random ensembles, boxes).
  std::optional<StructureSpec> structure;
};

BuiltModel build_model(const ModelConfig& m, std::uint64_t seed);

/// Lanczos on the configured model; random ensembles with lanczos.seeds > 1 average
/// b_n over consecutive seeds (run on `jobs` threads).
LanczosSequence run_lanczos(const RunConfig& c, const BuiltModel& model, int jobs);

/// Growth report with the decay class taken from analysis.expected, the model, or
/// (for chains) the extracted structure function.
GrowthReport report_for(const RunConfig& c, const BuiltModel& model, const LanczosSequence& b);

nlohmann::json report_json(const GrowthReport& r);
nlohmann::json structure_json(const StructureFunctionFit& f);

void cmd_model(const RunConfig& c, OutputDir& out);
void cmd_lanczos(const RunConfig& c, OutputDir& out, int jobs);
void cmd_dynamics(const RunConfig& c, OutputDir& out, int jobs);
void cmd_structure(const RunConfig& c, OutputDir& out);
void cmd_sweep(const RunConfig& c, OutputDir& out, int jobs);

/// Runs `command` with its output directory and manifest; returns the process exit code.
int run_command(const std::string& command, const RunConfig& c, int jobs);

}  // namespace opgrowth::cli
