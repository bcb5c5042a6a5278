#include "puckplan/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <numbers>
#include <numeric>

namespace puckplan {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

struct TwoLinkSolution {
  double shoulder;
  double elbow;
};

// Planar two-link inverse kinematics relative to the link origin; returns
// both elbow branches (identical at the workspace boundary).
std::optional<std::array<TwoLinkSolution, 2>> two_link_ik(double l1, double l2, const Vec2& target) {
  const double d2 = target.squaredNorm();
  double c = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (c > 1.0 + 1e-9 || c < -1.0 - 1e-9) return std::nullopt;
  c = std::clamp(c, -1.0, 1.0);
  const double heading = std::atan2(target.y(), target.x());
  std::array<TwoLinkSolution, 2> out{};
  for (int branch = 0; branch < 2; ++branch) {
    const double elbow = (branch == 0 ? 1.0 : -1.0) * std::acos(c);
    const double shoulder = heading - std::atan2(l2 * std::sin(elbow), l1 + l2 * std::cos(elbow));
    out[static_cast<std::size_t>(branch)] = {wrap_angle(shoulder), wrap_angle(elbow)};
  }
  return out;
}

}  // namespace

double PlanarArm::reach() const { return std::accumulate(link_lengths.begin(), link_lengths.end(), 0.0); }

void PlanarArm::validate() const {
  if (link_lengths.empty()) throw Error(ErrorCode::InvalidArgument, "arm: no links");
  if (link_lengths.size() != joint_vel_limits.size()) {
    throw Error(ErrorCode::InvalidArgument, "arm: link_lengths and joint_vel_limits differ in size");
  }
  for (double l : link_lengths) {
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidArgument, "arm: link lengths must be > 0");
  }
  for (double l : joint_vel_limits) {
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidArgument, "arm: joint velocity limits must be > 0");
  }
  if (!base.allFinite()) throw Error(ErrorCode::InvalidArgument, "arm: base must be finite");
}

Vec2 mallet_contact_pose(const TableGeometry& table, const Vec2& puck_pos, double u) {
  const Vec2 pos = puck_pos - table.contact_distance() * shooting_direction(u);
  const double r = table.mallet_radius;
  if (pos.x() < r || pos.x() > 0.5 * table.length || std::abs(pos.y()) > table.half_width() - r) {
    throw Error(ErrorCode::OutOfTable, "mallet contact pose leaves the robot half of the table");
  }
  return pos;
}

Vec2 forward_kinematics(const PlanarArm& arm, const VecX& q) {
  Vec2 p = arm.base;
  double angle = 0.0;
  for (std::size_t i = 0; i < arm.dof(); ++i) {
    angle += q[static_cast<Eigen::Index>(i)];
    p += arm.link_lengths[i] * Vec2(std::cos(angle), std::sin(angle));
  }
  return p;
}

Jacobian jacobian(const PlanarArm& arm, const VecX& q) {
  const auto n = static_cast<Eigen::Index>(arm.dof());
  Jacobian jac = Jacobian::Zero(2, n);
  double angle = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    angle += q[i];
    const Vec2 column = arm.link_lengths[static_cast<std::size_t>(i)] * Vec2(-std::sin(angle), std::cos(angle));
    // Link i moves with every joint at or before it.
    jac.leftCols(i + 1).colwise() += column;
  }
  return jac;
}

MaxSpeed max_speed(const Jacobian& jac, const std::vector<double>& limits, const Vec2& direction) {
  const auto n = static_cast<std::size_t>(jac.cols());
  if (limits.size() != n) throw Error(ErrorCode::InvalidArgument, "max_speed: limit count does not match Jacobian");
  const Vec2 e = direction.normalized();
  const VecX gain = jac.transpose() * e;               // v = gain . qdot
  const VecX off_axis = jac.transpose() * perp(e);     // must vanish
  const double scale = (off_axis.cwiseAbs().array() * Eigen::Map<const VecX>(limits.data(), n).array()).sum();
  const double tol = 1e-12 * std::max(scale, 1e-300);

  MaxSpeed best;
  best.qdot = VecX::Zero(static_cast<Eigen::Index>(n));
  VecX qdot(static_cast<Eigen::Index>(n));

  auto consider = [&]() {
    const double v = gain.dot(qdot);
    if (v > best.v_star) {
      best.v_star = v;
      best.qdot = qdot;
    }
  };

  const std::size_t patterns = std::size_t{1} << n;
  // Every joint at a bound.
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    for (std::size_t i = 0; i < n; ++i) qdot[static_cast<Eigen::Index>(i)] = ((mask >> i) & 1u) ? limits[i] : -limits[i];
    if (std::abs(off_axis.dot(qdot)) <= tol) consider();
  }
  // Exactly one joint strictly inside its bounds, solving the equality.
  for (std::size_t free = 0; free < n; ++free) {
    const auto f = static_cast<Eigen::Index>(free);
    if (std::abs(off_axis[f]) <= tol) continue;
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      if ((mask >> free) & 1u) continue;  // each pattern of the other joints once
      double rest = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == free) continue;
        const auto k = static_cast<Eigen::Index>(i);
        qdot[k] = ((mask >> i) & 1u) ? limits[i] : -limits[i];
        rest += off_axis[k] * qdot[k];
      }
      const double value = -rest / off_axis[f];
      if (std::abs(value) > limits[free] * (1.0 + 1e-12)) continue;
      qdot[f] = std::clamp(value, -limits[free], limits[free]);
      consider();
    }
  }
  return best;
}

MaxSpeed max_speed(const PlanarArm& arm, const VecX& q, const Vec2& direction) {
  return max_speed(jacobian(arm, q), arm.joint_vel_limits, direction);
}

VecX contact_configuration(const PlanarArm& arm, const Vec2& mallet_pos, double u) {
  const Vec2 target = mallet_pos - arm.base;
  const Vec2 e_u = shooting_direction(u);
  const auto& l = arm.link_lengths;

  VecX best_q;
  double best_v = -1.0;
  auto consider = [&](const VecX& q) {
    const double v = max_speed(arm, q, e_u).v_star;
    if (v > best_v) {
      best_v = v;
      best_q = q;
    }
  };

  if (arm.dof() == 2) {
    if (auto sols = two_link_ik(l[0], l[1], target)) {
      for (const auto& s : *sols) consider((VecX(2) << s.shoulder, s.elbow).finished());
    }
  } else if (arm.dof() == 3) {
    constexpr int kOrientationSamples = 16;
    const double heading = std::atan2(target.y(), target.x());
    for (int j = 0; j < kOrientationSamples; ++j) {
      const double end_angle = heading + 2.0 * std::numbers::pi * j / kOrientationSamples;
      const Vec2 wrist = target - l[2] * Vec2(std::cos(end_angle), std::sin(end_angle));
      auto sols = two_link_ik(l[0], l[1], wrist);
      if (!sols) continue;
      for (const auto& s : *sols) {
        consider((VecX(3) << s.shoulder, s.elbow, wrap_angle(end_angle - s.shoulder - s.elbow)).finished());
      }
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "contact_configuration: only 2- and 3-link arms are supported");
  }

  if (best_v < 0.0) throw Error(ErrorCode::Unreachable, "contact_configuration: mallet position outside the workspace");
  return best_q;
}

ShotPlan plan_from_angle(const TableGeometry& table, const PlanarArm& arm, const ActionSpace& actions,
                         const PuckState& puck, double u) {
  if (!actions.contains(u)) {
    throw Error(ErrorCode::InvalidArgument, "plan_from_angle: shooting angle outside the action space");
  }
  ShotPlan plan;
  plan.u = u;
  plan.mallet_pos = mallet_contact_pose(table, puck.pos, u);
  plan.q0 = contact_configuration(arm, plan.mallet_pos, u);
  const MaxSpeed speed = max_speed(arm, plan.q0, shooting_direction(u));
  plan.v_star = speed.v_star;
  plan.qdot0 = speed.qdot;
  plan.mallet_vel = plan.v_star * shooting_direction(u);
  return plan;
}

}  // namespace puckplan
