#pragma once

// Run configuration: every tunable of a pipeline run in one JSON document.
// Missing keys keep their defaults; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "puckplan/ebm.hpp"
#include "puckplan/harness.hpp"
#include "puckplan/kinematics.hpp"
#include "puckplan/planner.hpp"
#include "puckplan/table.hpp"
#include "puckplan/truth_sim.hpp"

namespace puckplan {

struct CollectSettings {
  std::size_t episodes = 100;
  std::size_t steps = 50;
};

struct EbmSettings {
  std::size_t scenarios = 3000;
  TrainConfig train;
  SamplerSettings sampler;
};

struct PolicySpec {
  std::string name;
  SocWeights weights;
  PlannerKind planner = PlannerKind::BruteForce;
  std::string weights_file;  // energy model for PlannerKind::Ebm, may be empty
};

struct HarnessConfig {
  GridSpec grid;
  bool exec_noise = true;
  std::vector<PolicySpec> policies;
};

struct RunConfig {
  std::uint64_t seed = 0;
  TableGeometry table;
  SimConfig sim;
  CollectSettings collect;
  PlanarArm arm;
  SocWeights weights;
  PlannerSettings planner;
  EbmSettings ebm;
  HarnessConfig harness;

  RunConfig();

  void validate() const;
  PlanningProblem problem(const PuckModel& model) const;
};

/// Throws Format with the offending key path.
RunConfig parse_config(const std::string& json_text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, fixed formatting) of the full configuration.
std::string dump_config(const RunConfig& config);

/// sha256 of dump_config.
std::string config_hash(const RunConfig& config);

}  // namespace puckplan
