#include "puckplan/prediction.hpp"

#include <array>

namespace puckplan {

StateBelief apply_mallet_collision(const PuckState& pre, const MalletState& mallet, const PuckModel& model) {
  const ContactFrame frame = mallet_frame(pre.pos, mallet.pos);
  const ModeParams& p = model.require(ModeSlot::Mallet);
  const VelocityBelief v = predict_velocity(p, frame.to_contact(pre.vel), frame.to_contact(mallet.vel));
  const Mat2& r = frame.rotation;

  StateBelief out;
  out.mean << pre.pos, r.transpose() * v.mean;
  out.cov.setZero();
  const Mat2 cov = r.transpose() * v.cov * r;
  out.cov.bottomRightCorner<2, 2>() = 0.5 * (cov + cov.transpose());
  return out;
}

const char* to_string(RolloutEnd end) {
  switch (end) {
    case RolloutEnd::Goal: return "goal";
    case RolloutEnd::OwnHalf: return "own_half";
    case RolloutEnd::MaxSteps: return "max_steps";
  }
  return "unknown";
}

PositionBelief BeliefTrajectory::goal_marginal(const TableGeometry& table) const {
  if (!k_goal) throw Error(ErrorCode::InvalidArgument, "goal_marginal: rollout has no goal crossing");
  const StateBelief& b = beliefs[*k_goal];
  return {Vec2(table.goal_line_x(), crossing_y), b.cov.topLeftCorner<2, 2>()};
}

double BeliefTrajectory::goal_position_trace() const {
  if (!k_goal) return 0.0;
  return beliefs[*k_goal].cov.topLeftCorner<2, 2>().trace();
}

BeliefTrajectory stochastic_rollout(const StateBelief& s0, const PuckModel& model, const TableGeometry& table,
                                    std::size_t max_steps) {
  const StateSpace floating = state_space(model, ModeSlot::Floating);
  std::array<StateSpace, 4> walls;
  for (Wall w : kAllWalls) walls[static_cast<std::size_t>(w)] = state_space(model, ModeSlot::Wall, wall_frame(w));

  const double line = table.goal_line_x();
  BeliefTrajectory traj;
  traj.beliefs.reserve(max_steps + 1);
  traj.modes.reserve(max_steps);
  traj.beliefs.push_back(s0);

  for (std::size_t k = 0; k < max_steps; ++k) {
    const StateBelief& cur = traj.beliefs.back();
    const ModeId mode = detect_mode(table, PuckState::from_vector(cur.mean), std::nullopt);
    const StateSpace& ss = mode.kind == ModeKind::Wall ? walls[static_cast<std::size_t>(mode.wall)] : floating;

    StateBelief next;
    next.mean = ss.a * cur.mean + ss.b;
    const Mat4 cov = ss.a * cur.cov * ss.a.transpose() + ss.q;
    next.cov = 0.5 * (cov + cov.transpose());
    reseat(table, mode, next);
    traj.modes.push_back(mode);

    const bool top_hit = mode.kind == ModeKind::Wall && mode.wall == Wall::Top;
    if (!top_hit && cur.mean.x() < line && next.mean.x() >= line) {
      const double frac = (line - cur.mean.x()) / (next.mean.x() - cur.mean.x());
      traj.crossing_y = cur.mean.y() + frac * (next.mean.y() - cur.mean.y());
      traj.k_goal = k;
      traj.end = RolloutEnd::Goal;
      traj.beliefs.push_back(next);
      return traj;
    }
    if (mode.kind == ModeKind::Wall) ++traj.bank_count;
    traj.beliefs.push_back(next);
    if (next.mean.x() < 0.5 * table.length && next.mean[2] < 0.0) {
      traj.end = RolloutEnd::OwnHalf;
      return traj;
    }
  }
  traj.end = RolloutEnd::MaxSteps;
  return traj;
}

double goal_probability(const PositionBelief& marginal, const TableGeometry& table, std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "goal_probability: n must be >= 1");
  const auto draws = sample_gaussian(marginal, n, rng);
  std::size_t inside = 0;
  for (const auto& d : draws) inside += table.in_goal_opening(d.y()) ? 1 : 0;
  return static_cast<double>(inside) / static_cast<double>(n);
}

double goal_probability(const BeliefTrajectory& traj, const TableGeometry& table, std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "goal_probability: n must be >= 1");
  if (!traj.k_goal) return 0.0;
  return goal_probability(traj.goal_marginal(table), table, n, rng);
}

double puck_speed_at_goal(const BeliefTrajectory& traj) {
  if (!traj.k_goal) return 0.0;
  return traj.beliefs[*traj.k_goal].mean.tail<2>().norm();
}

}  // namespace puckplan
