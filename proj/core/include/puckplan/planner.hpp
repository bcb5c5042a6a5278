#pragma once

// Chance-constrained shot selection: objective evaluation, brute-force
// search over the shooting angle and offline dataset generation.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "puckplan/contact_model.hpp"
#include "puckplan/kinematics.hpp"
#include "puckplan/prediction.hpp"
#include "puckplan/table.hpp"

namespace puckplan {

/// J = lambda1 * G + lambda2 * v_puck, admissible when G > beta.
struct SocWeights {
  double lambda1 = 1.0;
  double lambda2 = 0.0;  // per m/s
  double beta = 0.5;

  void validate() const;
  double objective(double g_hat, double v_puck) const { return lambda1 * g_hat + lambda2 * v_puck; }
};

struct PlannerSettings {
  ActionSpace actions;
  std::size_t goal_samples = kDefaultGoalSamples;
  std::size_t max_steps = kDefaultMaxSteps;
  std::size_t candidates = 100;

  void validate() const;
};

/// Everything a shot evaluation needs besides the state and the weights.
struct PlanningProblem {
  TableGeometry table;
  PuckModel model;
  PlanarArm arm;
  PlannerSettings settings;
};

struct CandidateEvaluation {
  double u = 0.0;
  ShotPlan plan;
  ShotEvaluation eval;
  double objective = 0.0;  // J, regardless of feasibility

  /// J for admissible candidates, 0 otherwise.
  double constrained_objective() const { return eval.feasible ? objective : 0.0; }
};

/// plan_from_angle -> apply_mallet_collision -> stochastic_rollout -> G, v_puck.
/// The Monte-Carlo stream is seeded by `mc_seed`, so candidates sharing a seed
/// use common random numbers. Kinematic failures give an infeasible zero result.
CandidateEvaluation evaluate_objective(const PlanningProblem& problem, const PuckState& puck, double u,
                                       const SocWeights& weights, std::uint64_t mc_seed);

/// m evenly spaced angles covering U, endpoints included.
std::vector<double> candidate_angles(const ActionSpace& actions, std::size_t m);

struct ScenarioRecord {
  Vec4 state = Vec4::Zero();
  double u_pos = 0.0;
  std::size_t pos_index = 0;
  std::uint64_t mc_seed = 0;      // Monte-Carlo seed shared by all candidates
  std::vector<double> angles;      // all candidates, u_pos included at pos_index
  std::vector<double> objectives;  // constrained objective per candidate
  std::vector<double> g_hats;
  std::vector<double> v_pucks;

  std::vector<double> negatives() const;
};

class NoFeasibleShot : public Error {
 public:
  NoFeasibleShot(const CandidateEvaluation& best_g, const std::string& what)
      : Error(ErrorCode::NoFeasibleShot, what), best_(best_g) {}

  /// Candidate with the highest G among all evaluated.
  const CandidateEvaluation& best() const { return best_; }

 private:
  CandidateEvaluation best_;
};

/// Maximises J over the feasible candidates of an evenly spaced grid of
/// `m` angles; ties go to the smaller |u|. Throws NoFeasibleShot.
ScenarioRecord solve_brute_force(const PlanningProblem& problem, const PuckState& puck, const SocWeights& weights,
                                 std::uint64_t mc_seed, std::size_t m);

/// Uniform contact state over the robot half, margin puck_radius from the walls,
/// velocity uniform in [-max_vel, max_vel] per axis.
PuckState sample_contact_state(const TableGeometry& table, Rng& rng, double max_vel = 0.3);

/// Scenario i draws its state and Monte-Carlo seed from derive_seed(seed, {i, attempt});
/// scenarios without a feasible shot are redrawn with the next attempt.
/// Workers split the index range; the result is ordered by index.
std::vector<ScenarioRecord> generate_dataset(const PlanningProblem& problem, const SocWeights& weights,
                                             std::size_t n_scenarios, std::size_t m, std::uint64_t seed,
                                             std::size_t workers = 1);

/// Runs fn(i) for i in [0, n) on up to `workers` threads; exceptions are rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace puckplan
