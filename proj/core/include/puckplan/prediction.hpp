#pragma once

// Gaussian rollout of the learned model after a planned mallet contact and
// the goal statistics read off it.

#include <optional>
#include <vector>

#include "puckplan/contact_model.hpp"
#include "puckplan/gauss.hpp"
#include "puckplan/table.hpp"

namespace puckplan {

using PositionBelief = Gaussian<2>;

/// Belief right after the contact: the mallet-mode mean in world frame,
/// position unchanged, covariance blkdiag(0, R^T Sigma_3 R).
StateBelief apply_mallet_collision(const PuckState& pre, const MalletState& mallet, const PuckModel& model);

enum class RolloutEnd { Goal, OwnHalf, MaxSteps };

const char* to_string(RolloutEnd end);

struct BeliefTrajectory {
  std::vector<StateBelief> beliefs;  // s_0 .. s_K
  std::vector<ModeId> modes;         // mode applied on step k -> k+1
  std::optional<std::size_t> k_goal; // last step before the mean crosses the goal line
  double crossing_y = 0.0;           // interpolated crossing point of the mean
  int bank_count = 0;
  RolloutEnd end = RolloutEnd::MaxSteps;

  /// Positional marginal at k_goal, centred on the crossing point. Requires k_goal.
  PositionBelief goal_marginal(const TableGeometry& table) const;
  double goal_position_trace() const;
};

inline constexpr std::size_t kDefaultMaxSteps = 500;
inline constexpr std::size_t kDefaultGoalSamples = 128;

/// Propagates mean and covariance with the mode detected on the mean (no
/// mallet after the contact). Stops when the mean crosses the opponent goal
/// line, turns back inside the robot half, or after max_steps.
BeliefTrajectory stochastic_rollout(const StateBelief& s0, const PuckModel& model, const TableGeometry& table,
                                    std::size_t max_steps = kDefaultMaxSteps);

/// Fraction of n draws from the marginal that fall inside the goal opening.
double goal_probability(const PositionBelief& marginal, const TableGeometry& table, std::size_t n, Rng& rng);

/// 0 when the rollout never reached the goal line.
double goal_probability(const BeliefTrajectory& traj, const TableGeometry& table, std::size_t n, Rng& rng);

/// Norm of the mean velocity at k_goal, 0 without a crossing.
double puck_speed_at_goal(const BeliefTrajectory& traj);

struct ShotEvaluation {
  double g_hat = 0.0;
  double v_puck = 0.0;
  int bank_count = 0;
  bool feasible = false;  // g_hat > beta
};

}  // namespace puckplan
