#pragma once

// Mixture of linear-Gaussian contact modes: dataset fragmentation, per-mode
// fitting, one-step velocity prediction and the equivalent state-space form.

#include <array>
#include <string>
#include <vector>

#include "puckplan/gauss.hpp"
#include "puckplan/table.hpp"
#include "puckplan/truth_sim.hpp"

namespace puckplan {

/// Index of the three parameter sets. All four walls share `Wall`.
enum class ModeSlot : std::size_t { Floating = 0, Wall = 1, Mallet = 2 };

inline constexpr std::array<ModeSlot, 3> kAllSlots = {ModeSlot::Floating, ModeSlot::Wall, ModeSlot::Mallet};

ModeSlot slot_of(ModeId mode);
const char* to_string(ModeSlot slot);

/// Velocity map of one mode, expressed in world coordinates for Floating and
/// in the contact frame for Wall and Mallet:
///   y ~ N(theta_mat * puck_vel + theta_mat_mallet * mallet_vel + theta_vec, sigma)
struct ModeParams {
  Mat2 theta_mat = Mat2::Identity();
  Vec2 theta_vec = Vec2::Zero();
  Mat2 sigma = Mat2::Zero();
  Mat2 theta_mat_mallet = Mat2::Zero();  // only used by the mallet mode
  std::size_t sample_count = 0;
  bool fitted = false;
};

/// x_{k+1} = x_k + dt * v_k  (constant rows),  v_{k+1} from the mode map.
struct PuckModel {
  std::array<ModeParams, 3> modes{};
  double dt = 0.02;

  const ModeParams& operator[](ModeSlot s) const { return modes[static_cast<std::size_t>(s)]; }
  ModeParams& operator[](ModeSlot s) { return modes[static_cast<std::size_t>(s)]; }

  /// Throws EmptyMode if the requested mode was never fitted.
  const ModeParams& require(ModeSlot s) const;
};

struct ModeSample {
  Vec2 y = Vec2::Zero();
  VecX xi;  // 2-D, or 4-D (puck then mallet velocity) for the mallet mode
  ModeId mode;
};

struct ModeSampleSets {
  std::array<std::vector<ModeSample>, 3> sets;

  const std::vector<ModeSample>& operator[](ModeSlot s) const { return sets[static_cast<std::size_t>(s)]; }
  std::vector<ModeSample>& operator[](ModeSlot s) { return sets[static_cast<std::size_t>(s)]; }
  std::size_t total() const { return sets[0].size() + sets[1].size() + sets[2].size(); }
};

/// Consecutive velocity pairs (k, k+1) labelled by the mode logged at k.
/// Wall and mallet pairs are rotated into their contact frames.
ModeSampleSets fragment_dataset(const TrajectoryDataset& data);

/// Joint fit + conditioning of one mode. Throws EmptyMode on no samples and
/// propagates TooFewSamples / NonFinite / SingularCondition.
ModeParams fit_mode(const std::vector<ModeSample>& samples);

struct FitReport {
  PuckModel model;
  std::vector<std::string> skipped;  // modes without samples, not fitted
};

/// Fits every mode that has samples; empty modes are reported, not fatal.
FitReport fit_model(const ModeSampleSets& sets, double dt);

/// One-step velocity prediction in the mode's native frame.
VelocityBelief predict_velocity(const ModeParams& params, const Vec2& puck_vel, const Vec2& mallet_vel = Vec2::Zero());

struct StateSpace {
  Mat4 a = Mat4::Identity();
  Vec4 b = Vec4::Zero();
  Mat4 q = Mat4::Zero();
};

/// World-frame (A, b, Q) for a mode. `frame` rotates world to contact
/// coordinates (ignored for Floating); `mallet_vel` enters b for the mallet mode.
StateSpace state_space(const PuckModel& model, ModeSlot slot, const ContactFrame& frame = {},
                       const Vec2& mallet_vel = Vec2::Zero());

/// (A, b, Q) for a detected mode at a given puck/mallet configuration.
StateSpace state_space_for(const PuckModel& model, ModeId mode, const PuckState& puck,
                           const std::optional<MalletState>& mallet);

/// After a step under `mode`: re-seats the mean (see reseat) and, for a wall
/// hit, mirrors the covariance about the wall with it.
void reseat(const TableGeometry& table, ModeId mode, StateBelief& belief);

/// The fitted model used as a generative process (for self-consistency checks).
class ModelLaw final : public VelocityLaw {
 public:
  explicit ModelLaw(const PuckModel& model) : model_(model) {}

  Vec2 next_velocity(ModeId mode, const PuckState& puck, const std::optional<MalletState>& mallet,
                     Rng& rng) const override;

 private:
  const PuckModel& model_;
};

}  // namespace puckplan
