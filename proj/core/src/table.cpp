#include "puckplan/table.hpp"

#include <cmath>
#include <limits>

namespace puckplan {

void TableGeometry::validate() const {
  if (!(length > 0.0 && width > 0.0)) throw Error(ErrorCode::InvalidArgument, "table: length and width must be > 0");
  if (!(puck_radius > 0.0 && mallet_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "table: radii must be > 0");
  if (!(goal_width > 0.0 && goal_width < width)) {
    throw Error(ErrorCode::InvalidArgument, "table: goal_width must be in (0, width)");
  }
  if (2.0 * puck_radius >= width) throw Error(ErrorCode::InvalidArgument, "table: puck does not fit");
}

std::string to_string(ModeId mode) {
  switch (mode.kind) {
    case ModeKind::Floating: return "floating";
    case ModeKind::Mallet: return "mallet";
    case ModeKind::Wall:
      switch (mode.wall) {
        case Wall::Left: return "wall_left";
        case Wall::Right: return "wall_right";
        case Wall::Top: return "wall_top";
        case Wall::Bottom: return "wall_bottom";
      }
  }
  return "unknown";
}

ModeId mode_from_string(const std::string& name) {
  if (name == "floating") return ModeId::floating();
  if (name == "mallet") return ModeId::mallet();
  if (name == "wall_left") return ModeId::wall_hit(Wall::Left);
  if (name == "wall_right") return ModeId::wall_hit(Wall::Right);
  if (name == "wall_top") return ModeId::wall_hit(Wall::Top);
  if (name == "wall_bottom") return ModeId::wall_hit(Wall::Bottom);
  throw Error(ErrorCode::Format, "unknown mode label '" + name + "'");
}

ContactFrame ContactFrame::from_normal(const Vec2& unit_normal) {
  ContactFrame frame;
  frame.rotation.row(0) = unit_normal.transpose();
  frame.rotation.row(1) = perp(unit_normal).transpose();
  return frame;
}

ContactFrame wall_frame(Wall wall) {
  switch (wall) {
    case Wall::Left: return ContactFrame::from_normal({0.0, -1.0});
    case Wall::Right: return ContactFrame::from_normal({0.0, 1.0});
    case Wall::Top: return ContactFrame::from_normal({-1.0, 0.0});
    case Wall::Bottom: return ContactFrame::from_normal({1.0, 0.0});
  }
  throw Error(ErrorCode::InvalidArgument, "wall_frame: unknown wall");
}

ContactFrame mallet_frame(const Vec2& puck_pos, const Vec2& mallet_pos) {
  const Vec2 d = puck_pos - mallet_pos;
  const double dist = d.norm();
  if (!(dist >= 1e-9)) throw Error(ErrorCode::CoincidentCenters, "mallet_frame: puck and mallet centres coincide");
  return ContactFrame::from_normal(d / dist);
}

double wall_distance(const TableGeometry& table, Wall wall, const Vec2& pos) {
  switch (wall) {
    case Wall::Left: return table.half_width() - pos.y();
    case Wall::Right: return pos.y() + table.half_width();
    case Wall::Top: return table.length - pos.x();
    case Wall::Bottom: return pos.x();
  }
  return std::numeric_limits<double>::infinity();
}

bool wall_is_solid(const TableGeometry& table, Wall wall, const Vec2& pos) {
  if (wall == Wall::Top || wall == Wall::Bottom) return !table.in_goal_opening(pos.y());
  return true;
}

ModeId detect_mode(const TableGeometry& table, const PuckState& puck, const std::optional<MalletState>& mallet) {
  if (mallet) {
    const Vec2 d = puck.pos - mallet->pos;
    const double dist = d.norm();
    if (dist >= 1e-9 && dist <= table.contact_distance() + kContactTolerance) {
      const double rel_normal = (puck.vel - mallet->vel).dot(d / dist);
      if (rel_normal < kApproachThreshold) return ModeId::mallet();
    }
  }

  // One wall per step: the deepest contact that the puck is moving into.
  std::optional<Wall> hit;
  double deepest = std::numeric_limits<double>::infinity();
  for (Wall w : kAllWalls) {
    const double dist = wall_distance(table, w, puck.pos);
    if (dist > table.puck_radius + kContactTolerance || !wall_is_solid(table, w, puck.pos)) continue;
    if (puck.vel.dot(wall_frame(w).normal()) >= kApproachThreshold) continue;
    if (dist < deepest) {
      deepest = dist;
      hit = w;
    }
  }
  if (hit) return ModeId::wall_hit(*hit);
  return ModeId::floating();
}

Vec2 reseat(const TableGeometry& table, Vec2 pos, ModeId mode) {
  for (Wall w : kAllWalls) {
    const double dist = wall_distance(table, w, pos);
    if (dist >= table.puck_radius || !wall_is_solid(table, w, pos)) continue;
    const double depth = table.puck_radius - dist;
    const bool hit = mode.kind == ModeKind::Wall && mode.wall == w;
    pos += (hit ? 2.0 * depth : depth) * wall_frame(w).normal();
  }
  return pos;
}

}  // namespace puckplan
