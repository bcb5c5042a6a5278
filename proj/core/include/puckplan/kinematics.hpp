#pragma once

// Shooting-angle action space and the maximum mallet speed of a planar arm
// under joint velocity limits.

#include <cmath>
#include <vector>

#include "puckplan/common.hpp"
#include "puckplan/table.hpp"

namespace puckplan {

using Jacobian = Eigen::Matrix<double, 2, Eigen::Dynamic>;

struct PlanarArm {
  std::vector<double> link_lengths{0.55, 0.55, 0.30};
  Vec2 base{-0.4, 0.0};
  /// rad/s, symmetric box |qdot_i| <= limit_i
  std::vector<double> joint_vel_limits{85.0 * kDegToRad, 85.0 * kDegToRad, 100.0 * kDegToRad};

  static constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

  std::size_t dof() const { return link_lengths.size(); }
  double reach() const;
  void validate() const;
};

/// Admissible shooting angles U = [u_min, u_max]; u = 0 is parallel to the side walls.
struct ActionSpace {
  double u_min = -1.2;
  double u_max = 1.2;

  bool contains(double u) const { return u >= u_min && u <= u_max; }
  double clip(double u) const { return u < u_min ? u_min : (u > u_max ? u_max : u); }
  double half_width() const { return 0.5 * (u_max - u_min); }
  double center() const { return 0.5 * (u_max + u_min); }
};

struct ShotPlan {
  double u = 0.0;
  double v_star = 0.0;
  Vec2 mallet_pos = Vec2::Zero();
  Vec2 mallet_vel = Vec2::Zero();
  VecX q0;
  VecX qdot0;

  bool feasible() const { return v_star > 0.0; }
  MalletState mallet() const { return {mallet_pos, mallet_vel}; }
};

inline Vec2 shooting_direction(double u) { return {std::cos(u), std::sin(u)}; }

/// Mallet centre on the contact circle behind the puck. Throws OutOfTable
/// when the mallet would leave the robot's half of the table.
Vec2 mallet_contact_pose(const TableGeometry& table, const Vec2& puck_pos, double u);

Vec2 forward_kinematics(const PlanarArm& arm, const VecX& q);
Jacobian jacobian(const PlanarArm& arm, const VecX& q);

struct MaxSpeed {
  double v_star = 0.0;
  VecX qdot;
};

/// Exact solution of  max v  s.t.  J qdot = v e,  |qdot_i| <= limit_i,  v >= 0.
/// Eliminating v leaves one equality constraint, so every vertex of the
/// reduced polytope has at most one joint strictly inside its bounds;
/// those vertices are enumerated.
MaxSpeed max_speed(const Jacobian& jac, const std::vector<double>& limits, const Vec2& direction);
MaxSpeed max_speed(const PlanarArm& arm, const VecX& q, const Vec2& direction);

/// Inverse kinematics placing the end point at `mallet_pos`. For three links
/// the redundancy is resolved over 16 end-link orientations (both elbow
/// branches) by maximal v*. Throws Unreachable outside the workspace.
VecX contact_configuration(const PlanarArm& arm, const Vec2& mallet_pos, double u);

/// mallet_contact_pose -> contact_configuration -> max_speed.
/// Throws InvalidArgument for u outside U; OutOfTable / Unreachable propagate.
ShotPlan plan_from_angle(const TableGeometry& table, const PlanarArm& arm, const ActionSpace& actions,
                         const PuckState& puck, double u);

}  // namespace puckplan
