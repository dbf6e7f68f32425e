#pragma once

// Run configuration: one JSON document per run. Unknown keys are hard errors.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "opgrowth/lanczos.hpp"
#include "opgrowth/models.hpp"
#include "opgrowth/spin_chain.hpp"

namespace opgrowth::cli {

enum class ModelKind { harmonic, box1d, box2d, anharmonic, semiclassical, random, xxz };

const char* to_string(ModelKind k) noexcept;

// Which observable of the harmonic oscillator seeds the run.
enum class HarmonicOperator { x, x_power, u_power };

struct ModelConfig {
  ModelKind kind = ModelKind::harmonic;
  std::size_t dim = 100;
  double mass = 1.0;

  // harmonic
  double omega = 1.0;
  HarmonicOperator harmonic_op = HarmonicOperator::x;
  int q = 1;

  // box1d / box2d
  double length = 1.0;
  std::array<std::size_t, 2> dims{40, 40};
  std::array<double, 2> lengths{1.0, 1.0};

  // anharmonic / semiclassical
  AnharmonicConfig anharmonic;
  double prefactor = 1.0;

  // random
  double bandwidth = 400.0;
  StructureSpec structure;

  // xxz
  ChainConfig chain;
  std::optional<std::size_t> keep_n;
};

struct LanczosConfig {
  std::size_t n_max = 40;
  LanczosOptions options;
  /// Random ensembles: average b_n over this many consecutive seeds.
  std::size_t seeds = 1;
};

struct DynamicsConfig {
  double t_max = 5.0;
  std::size_t t_points = 101;
  std::vector<double> grid() const;
};

struct StructureConfig {
  StructureOptions options;
};

struct AnalysisConfig {
  std::optional<std::pair<std::size_t, std::size_t>> window;
  double tolerance = 0.1;
  /// Decay class used for the growth-rate prediction; random models default to
  /// their own envelope, chains to the extracted structure function.
  std::optional<StructureSpec> expected;
};

struct SweepConfig {
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<int> p;
  std::vector<int> sites;
  bool empty() const { return beta.empty() && gamma.empty() && p.empty() && sites.empty(); }
};

struct RunConfig {
  ModelConfig model;
  double beta = 1.0;
  std::uint64_t seed = 1;
  LanczosConfig lanczos;
  DynamicsConfig dynamics;
  StructureConfig structure;
  AnalysisConfig analysis;
  SweepConfig sweep;
  std::filesystem::path output = "out";
};

/// Parses and validates; throws Error(invalid_config) naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Fully expanded configuration (every default spelled out); parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);

}  // namespace opgrowth::cli
