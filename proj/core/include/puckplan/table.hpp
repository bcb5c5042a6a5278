#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "puckplan/common.hpp"

namespace puckplan {

/// Playing surface. x runs from the robot's end (x = 0) to the opponent's
/// goal line (x = length); y = 0 is the long axis of symmetry.
struct TableGeometry {
  double length = 1.948;
  double width = 1.038;
  double goal_width = 0.25;
  double puck_radius = 0.03165;
  double mallet_radius = 0.04815;

  double half_width() const { return 0.5 * width; }
  double goal_line_x() const { return length; }
  double contact_distance() const { return puck_radius + mallet_radius; }
  bool in_goal_opening(double y) const { return std::abs(y) <= 0.5 * goal_width; }

  /// Throws InvalidArgument on a degenerate geometry.
  void validate() const;
  bool operator==(const TableGeometry&) const = default;
};

struct PuckState {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();

  Vec4 as_vector() const { return (Vec4() << pos, vel).finished(); }
  static PuckState from_vector(const Vec4& s) { return {s.head<2>(), s.tail<2>()}; }
};

struct MalletState {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
};

enum class Wall { Left, Right, Top, Bottom };

inline constexpr std::array<Wall, 4> kAllWalls = {Wall::Left, Wall::Right, Wall::Top, Wall::Bottom};

enum class ModeKind { Floating, Wall, Mallet };

struct ModeId {
  ModeKind kind = ModeKind::Floating;
  Wall wall = Wall::Left;  // meaningful only for ModeKind::Wall

  static ModeId floating() { return {}; }
  static ModeId wall_hit(Wall w) { return {ModeKind::Wall, w}; }
  static ModeId mallet() { return {ModeKind::Mallet, Wall::Left}; }

  bool operator==(const ModeId& o) const { return kind == o.kind && (kind != ModeKind::Wall || wall == o.wall); }
};

/// "floating", "wall_left", ..., "mallet".
std::string to_string(ModeId mode);
ModeId mode_from_string(const std::string& name);

/// Rotation mapping world vectors to (normal, tangential) components.
/// Row 0 is the contact normal, row 1 the normal turned +90 degrees.
struct ContactFrame {
  Mat2 rotation = Mat2::Identity();

  Vec2 normal() const { return rotation.row(0).transpose(); }
  Vec2 tangent() const { return rotation.row(1).transpose(); }
  Vec2 to_contact(const Vec2& world) const { return rotation * world; }
  Vec2 to_world(const Vec2& contact) const { return rotation.transpose() * contact; }

  static ContactFrame from_normal(const Vec2& unit_normal);
};

/// Frame whose normal points from the wall into the playing field.
ContactFrame wall_frame(Wall wall);

/// Frame whose normal points from the mallet centre towards the puck centre.
/// Throws CoincidentCenters when the centres are closer than 1e-9 m.
ContactFrame mallet_frame(const Vec2& puck_pos, const Vec2& mallet_pos);

/// Signed distance from a point to the wall line, positive inside the table.
double wall_distance(const TableGeometry& table, Wall wall, const Vec2& pos);

/// Whether the wall physically reflects at this point (false inside the goal mouth).
bool wall_is_solid(const TableGeometry& table, Wall wall, const Vec2& pos);

/// Relative normal velocity below this counts as approaching a contact.
inline constexpr double kApproachThreshold = -1e-6;

/// Slack on contact distances so a puck re-seated exactly onto a contact still counts.
inline constexpr double kContactTolerance = 1e-9;

/// Mallet contact dominates wall contact dominates free flight.
ModeId detect_mode(const TableGeometry& table, const PuckState& puck, const std::optional<MalletState>& mallet);

/// Puts a position that ended up inside a solid wall back on the table. The
/// overshoot is mirrored about the contact line for the wall hit during the
/// step (`mode`) and projected out for any other wall.
Vec2 reseat(const TableGeometry& table, Vec2 pos, ModeId mode);

}  // namespace puckplan
