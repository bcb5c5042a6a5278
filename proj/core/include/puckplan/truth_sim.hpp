#pragma once

// Ground-truth planar puck physics: the stand-in for a physics engine, used to
// collect training trajectories and to judge executed shots.

#include <cstdint>
#include <optional>
#include <vector>

#include "puckplan/common.hpp"
#include "puckplan/kinematics.hpp"
#include "puckplan/table.hpp"

namespace puckplan {

struct SimConfig {
  double dt = 0.02;                    // s
  double damping = 0.12;               // 1/s, linear velocity decay
  double wall_restitution = 0.92;
  double wall_tangent_friction = 0.05;
  double mallet_restitution = 0.9;
  double vel_noise_std = 0.01;         // m/s per step, every step
  double wall_noise_std = 0.3;         // m/s, extra at wall contacts
  double mallet_noise_std = 0.05;      // m/s, extra at mallet contacts
  double meas_noise_std = 1e-3;        // m, simulated position measurements
  double exec_noise_angle = 0.02;      // rad, shot execution error on u
  double exec_noise_speed = 0.05;      // m/s, shot execution error on v*
  std::uint64_t seed = 0;

  void validate() const;
  SimConfig noise_free() const;
};

/// Velocity transition used by the integrator. The ground truth and the
/// learned model (as a generative process) both implement it.
class VelocityLaw {
 public:
  virtual ~VelocityLaw() = default;
  virtual Vec2 next_velocity(ModeId mode, const PuckState& puck, const std::optional<MalletState>& mallet,
                             Rng& rng) const = 0;
};

/// Damped flight, restitution/friction wall law and a heavy-mallet impact law.
class PhysicsLaw final : public VelocityLaw {
 public:
  explicit PhysicsLaw(SimConfig config) : config_(config) {}

  Vec2 next_velocity(ModeId mode, const PuckState& puck, const std::optional<MalletState>& mallet,
                     Rng& rng) const override;

  /// Noise-free impact: v - (1 + e) min(0, (v - v_m).n) n.
  Vec2 mallet_impact(const PuckState& puck, const MalletState& mallet) const;

 private:
  SimConfig config_;
};

struct GoalCrossing {
  bool opponent_goal = true;  // false: the robot's own goal at x = 0
  double y = 0.0;             // interpolated crossing point
};

struct StepResult {
  PuckState puck;
  ModeId mode;                             // mode detected at the start of the step
  std::optional<GoalCrossing> crossing;    // set when the centre left through a goal mouth
};

/// One integration step: detect mode, draw next velocity from the law,
/// advance position with the new velocity, then re-seat out of any
/// penetration with the mallet (moved by dt) and the solid walls.
StepResult advance(const TableGeometry& table, double dt, const PuckState& puck,
                   const std::optional<MalletState>& mallet, const VelocityLaw& law, Rng& rng);

/// Ground-truth step with the physics law.
StepResult step(const TableGeometry& table, const PuckState& puck, const std::optional<MalletState>& mallet,
                const SimConfig& config, Rng& rng);

struct TrajectoryStep {
  double t = 0.0;
  PuckState puck;
  MalletState mallet;
  ModeId mode;
};

using Trajectory = std::vector<TrajectoryStep>;

struct TrajectoryDataset {
  double dt = 0.02;
  std::vector<Trajectory> episodes;

  std::size_t total_steps() const;
};

/// First half of the episodes: a contact-seeking mallet strikes a slow puck.
/// Second half: a parked mallet and a puck launched at high random velocity.
/// Episodes end early when the puck leaves through a goal mouth.
TrajectoryDataset collect_dataset(const TableGeometry& table, const VelocityLaw& law, double dt,
                                  std::size_t episodes, std::size_t steps, Rng& rng);
TrajectoryDataset collect_dataset(const TableGeometry& table, const SimConfig& config, std::size_t episodes,
                                  std::size_t steps, Rng& rng);

enum class ShotTermination { Goal, OwnGoal, OwnHalf, Timeout };

struct ShotOutcome {
  bool scored = false;
  double speed_at_goal = 0.0;  // > 0 iff the puck crossed the opponent goal line in the mouth
  int bank_count = 0;
  double crossing_y = 0.0;
  ShotTermination termination = ShotTermination::Timeout;
  std::vector<PuckState> trajectory;
};

const char* to_string(ShotTermination t);

/// Applies the planned contact (optionally perturbed by execution noise on
/// angle and speed) to the true puck, then rolls the ground truth until the
/// puck crosses a goal line, returns into the robot's half or times out.
ShotOutcome simulate_shot(const TableGeometry& table, const PuckState& puck_at_contact, const ShotPlan& plan,
                          const SimConfig& config, Rng& rng, bool exec_noise, std::size_t max_steps = 500);

/// Ground-truth free flight with noisy position measurements, as a camera would report them.
struct ObservedTrack {
  std::vector<PuckState> truth;
  std::vector<Vec2> measurements;
};
ObservedTrack observe_free_flight(const TableGeometry& table, const PuckState& start, std::size_t steps,
                                  const SimConfig& config, Rng& rng);

}  // namespace puckplan
