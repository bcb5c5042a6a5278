#pragma once

// Plain-text artifacts: trajectory/measurement CSV, model and weights JSON,
// the JSONL scenario dataset, evaluation reports and the run manifest.
// Every artifact carries the producing config hash, dt and table geometry.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "puckplan/config.hpp"
#include "puckplan/contact_model.hpp"
#include "puckplan/ebm.hpp"
#include "puckplan/estimator.hpp"
#include "puckplan/harness.hpp"
#include "puckplan/planner.hpp"
#include "puckplan/prediction.hpp"
#include "puckplan/truth_sim.hpp"

namespace puckplan {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

struct ArtifactMeta {
  std::string kind;
  std::string config_hash;
  double dt = 0.02;
  TableGeometry table;

  static ArtifactMeta of(const std::string& kind, const RunConfig& config);
};

/// Throws Mismatch when dt or geometry differ from the running configuration.
void check_compatible(const ArtifactMeta& meta, const RunConfig& config, const std::string& source);

// Trajectories: "# {meta json}" then header t,px,py,pvx,pvy,mx,my,mvx,mvy,mode.
// A row with t == 0 starts a new episode.
std::string trajectory_csv(const TrajectoryDataset& data, const ArtifactMeta& meta);
struct LoadedTrajectories {
  TrajectoryDataset data;
  ArtifactMeta meta;
};
LoadedTrajectories parse_trajectory_csv(const std::string& text, const std::string& source);

std::string model_json(const PuckModel& model, const ArtifactMeta& meta);
struct LoadedModel {
  PuckModel model;
  ArtifactMeta meta;
};
LoadedModel parse_model_json(const std::string& text, const std::string& source);

/// First line {"meta": ...}; then one scenario per line.
std::string dataset_jsonl(const std::vector<ScenarioRecord>& records, const SocWeights& weights,
                          const ArtifactMeta& meta);
struct LoadedDataset {
  std::vector<ScenarioRecord> records;
  SocWeights weights;
  ArtifactMeta meta;
};
LoadedDataset parse_dataset_jsonl(const std::string& text, const std::string& source);

std::string energy_model_json(const EnergyModel& model, const ArtifactMeta& meta);
struct LoadedEnergyModel {
  EnergyModel model;
  ArtifactMeta meta;
};
LoadedEnergyModel parse_energy_model_json(const std::string& text, const std::string& source);

// Measurements: header t,x,y; empty x/y marks a missing frame.
struct MeasurementSeries {
  std::vector<double> t;
  std::vector<std::optional<Vec2>> z;
  std::optional<ArtifactMeta> meta;  // absent for hand-written files
};
std::string measurement_csv(const std::vector<double>& t, const std::vector<std::optional<Vec2>>& z,
                            const ArtifactMeta& meta);
MeasurementSeries parse_measurement_csv(const std::string& text, const std::string& source);

// Mallet track: header t,mx,my,mvx,mvy.
std::vector<MalletState> parse_mallet_csv(const std::string& text, const std::string& source);

/// t,x,y,vx,vy
std::string truth_csv(const std::vector<double>& t, const std::vector<PuckState>& states, const ArtifactMeta& meta);

/// t,x,y,vx,vy,trace_p
std::string estimate_csv(const std::vector<double>& t, const std::vector<FilterState>& states,
                         const ArtifactMeta& meta);

/// k,x,y,vx,vy,var_x,var_y,var_vx,var_vy,mode
std::string rollout_csv(const BeliefTrajectory& traj, const ArtifactMeta& meta);

/// k,u,g_hat,v_puck,banks,feasible,objective
std::string candidates_csv(const std::vector<CandidateEvaluation>& candidates, const ArtifactMeta& meta);

/// epoch,loss; epoch 0 is the loss before training.
std::string loss_curve_csv(const TrainResult& result, const ArtifactMeta& meta);
std::vector<double> parse_loss_curve_csv(const std::string& text, const std::string& source);

/// iteration,u_hat,energy,sigma,best_u,best_energy
std::string inference_trace_csv(const InferenceResult& result, const ArtifactMeta& meta);

std::string report_json(const EvalReport& report, const ArtifactMeta& meta, std::uint64_t seed);
std::string shots_csv(const EvalReport& report, const ArtifactMeta& meta);

/// Score / speed / banks per policy in the layout of a results table.
std::string summary_table(const EvalReport& report);

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

std::string manifest_json(const Manifest& manifest);

}  // namespace puckplan
