#pragma once

// Seeded shot evaluation of policy instances against the ground truth, and
// the EBM-versus-brute-force fidelity comparison.

#include <memory>
#include <string>
#include <vector>

#include "puckplan/ebm.hpp"
#include "puckplan/estimator.hpp"
#include "puckplan/planner.hpp"
#include "puckplan/truth_sim.hpp"

namespace puckplan {

enum class PlannerKind { BruteForce, Ebm };

const char* to_string(PlannerKind kind);
PlannerKind planner_kind_from_string(const std::string& name);

struct PolicyInstance {
  std::string name;
  SocWeights weights;
  PlannerKind planner = PlannerKind::BruteForce;
  std::shared_ptr<const EnergyModel> ebm;  // required for PlannerKind::Ebm
};

/// The three reference instances: accuracy only, balanced, speed only.
std::vector<PolicyInstance> reference_policies(PlannerKind planner = PlannerKind::BruteForce);

/// nx * ny placements over a rectangle of the robot half, `reps` shots each.
struct GridSpec {
  double x_min = 0.35;
  double x_max = 0.75;
  double y_min = -0.3;
  double y_max = 0.3;
  std::size_t nx = 5;
  std::size_t ny = 5;
  std::size_t reps = 4;
  double drift = 0.1;              // m/s, uniform per axis
  std::size_t observe_steps = 15;  // filtered frames before the shot

  std::size_t shots() const { return nx * ny * reps; }
  Vec2 placement(std::size_t shot) const;
  void validate(const TableGeometry& table) const;
};

struct HarnessSettings {
  GridSpec grid;
  SimConfig sim;
  SamplerSettings sampler;
  bool exec_noise = true;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct ShotRecord {
  std::size_t policy = 0;
  std::size_t shot = 0;
  Vec4 truth = Vec4::Zero();     // puck at contact
  Vec4 estimate = Vec4::Zero();  // filtered state the plan was made for
  double u = 0.0;
  double v_star = 0.0;
  double planned_g = 0.0;
  double planned_v = 0.0;
  bool scored = false;
  double speed = 0.0;
  int banks = 0;
  double crossing_y = 0.0;
  std::string outcome;  // goal, own_goal, own_half, timeout, or a failure code
};

struct PolicySummary {
  std::string name;
  std::size_t shots = 0;
  std::size_t scored = 0;
  double score = 0.0;
  double speed_mean = 0.0;  // successful shots only
  double speed_std = 0.0;
  double banks_mean = 0.0;  // successful shots only
  double planned_g_mean = 0.0;
};

struct EvalReport {
  std::vector<PolicySummary> policies;
  std::vector<ShotRecord> shots;
};

/// Pure fold over one policy's shot log.
PolicySummary summarize(const std::string& name, const std::vector<ShotRecord>& shots);

/// Per shot: place the puck with a small drift, filter noisy observations,
/// plan at the estimate, execute on the true puck with execution noise.
/// Shot streams derive from (seed, policy index, shot index).
EvalReport run_eval(const std::vector<PolicyInstance>& policies, const PlanningProblem& problem,
                    const HarnessSettings& settings);

struct RegretStats {
  std::vector<double> regrets;  // max(0, J_ref - J) / J_ref per scenario
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;

  double fraction_within(double tol) const;
};

RegretStats regret_stats(std::vector<double> regrets);

/// Objective regret of the EBM's u_hat against each record's brute-force
/// optimum, evaluated with the record's own Monte-Carlo seed.
RegretStats compare_planners(const std::vector<ScenarioRecord>& scenarios, const PlanningProblem& problem,
                             const SocWeights& weights, const EnergyLandscape& ebm, const SamplerSettings& sampler,
                             std::uint64_t seed, std::size_t workers = 1);

}  // namespace puckplan
