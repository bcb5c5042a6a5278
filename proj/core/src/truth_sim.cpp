#include "puckplan/truth_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace puckplan {

namespace {

Vec2 gaussian_pair(Rng& rng, double std) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = normal(rng);
  const double b = normal(rng);
  return std * Vec2(a, b);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, std::string("sim: ") + name + " must be > 0");
}

void check_non_negative(double v, const char* name) {
  if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, std::string("sim: ") + name + " must be >= 0");
}

MalletState clamp_to_robot_half(const TableGeometry& table, MalletState m) {
  const double r = table.mallet_radius;
  m.pos.x() = std::clamp(m.pos.x(), r, 0.5 * table.length);
  m.pos.y() = std::clamp(m.pos.y(), -table.half_width() + r, table.half_width() - r);
  return m;
}

Vec2 unit_or_zero(const Vec2& v) {
  const double n = v.norm();
  return n > 1e-12 ? Vec2(v / n) : Vec2::Zero();
}

}  // namespace

void SimConfig::validate() const {
  check_positive(dt, "dt");
  check_non_negative(damping, "damping");
  if (!(damping * dt < 1.0)) throw Error(ErrorCode::InvalidArgument, "sim: damping * dt must be < 1");
  if (!(wall_restitution > 0.0 && wall_restitution <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "sim: wall_restitution must be in (0, 1]");
  }
  if (!(mallet_restitution > 0.0 && mallet_restitution <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "sim: mallet_restitution must be in (0, 1]");
  }
  if (!(wall_tangent_friction >= 0.0 && wall_tangent_friction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "sim: wall_tangent_friction must be in [0, 1]");
  }
  check_non_negative(vel_noise_std, "vel_noise_std");
  check_non_negative(wall_noise_std, "wall_noise_std");
  check_non_negative(mallet_noise_std, "mallet_noise_std");
  check_non_negative(meas_noise_std, "meas_noise_std");
  check_non_negative(exec_noise_angle, "exec_noise_angle");
  check_non_negative(exec_noise_speed, "exec_noise_speed");
}

SimConfig SimConfig::noise_free() const {
  SimConfig c = *this;
  c.vel_noise_std = 0.0;
  c.wall_noise_std = 0.0;
  c.mallet_noise_std = 0.0;
  c.meas_noise_std = 0.0;
  c.exec_noise_angle = 0.0;
  c.exec_noise_speed = 0.0;
  return c;
}

Vec2 PhysicsLaw::mallet_impact(const PuckState& puck, const MalletState& mallet) const {
  const Vec2 n = mallet_frame(puck.pos, mallet.pos).normal();
  const double approach = std::min(0.0, (puck.vel - mallet.vel).dot(n));
  return puck.vel - (1.0 + config_.mallet_restitution) * approach * n;
}

Vec2 PhysicsLaw::next_velocity(ModeId mode, const PuckState& puck, const std::optional<MalletState>& mallet,
                               Rng& rng) const {
  Vec2 v = puck.vel;
  double contact_noise = 0.0;
  if (mode.kind == ModeKind::Wall) {
    const ContactFrame frame = wall_frame(mode.wall);
    const Vec2 c = frame.to_contact(v);
    v = frame.to_world({-config_.wall_restitution * c.x(), (1.0 - config_.wall_tangent_friction) * c.y()});
    contact_noise = config_.wall_noise_std;
  } else if (mode.kind == ModeKind::Mallet && mallet) {
    v = mallet_impact(puck, *mallet);
    contact_noise = config_.mallet_noise_std;
  }
  v *= 1.0 - config_.damping * config_.dt;
  const double std = std::hypot(config_.vel_noise_std, contact_noise);
  return v + gaussian_pair(rng, std);
}

StepResult advance(const TableGeometry& table, double dt, const PuckState& puck,
                   const std::optional<MalletState>& mallet, const VelocityLaw& law, Rng& rng) {
  StepResult result;
  result.mode = detect_mode(table, puck, mallet);
  const Vec2 vel = law.next_velocity(result.mode, puck, mallet, rng);
  Vec2 pos = puck.pos + dt * vel;

  // Leaving through a goal mouth ends the episode; no re-seating.
  auto crossing_y = [&](double line) {
    const double frac = (line - puck.pos.x()) / (pos.x() - puck.pos.x());
    return puck.pos.y() + frac * (pos.y() - puck.pos.y());
  };
  if (puck.pos.x() < table.length && pos.x() >= table.length) {
    const double y = crossing_y(table.length);
    if (table.in_goal_opening(y)) {
      result.puck = {pos, vel};
      result.crossing = GoalCrossing{true, y};
      return result;
    }
  }
  if (puck.pos.x() > 0.0 && pos.x() <= 0.0) {
    const double y = crossing_y(0.0);
    if (table.in_goal_opening(y)) {
      result.puck = {pos, vel};
      result.crossing = GoalCrossing{false, y};
      return result;
    }
  }

  if (mallet) {
    const Vec2 mallet_next = mallet->pos + dt * mallet->vel;
    const Vec2 d = pos - mallet_next;
    const double dist = d.norm();
    if (dist < table.contact_distance() && dist > 1e-12) pos = mallet_next + d * (table.contact_distance() / dist);
  }
  for (Wall w : kAllWalls) {
    const double dist = wall_distance(table, w, pos);
    if (dist < table.puck_radius && wall_is_solid(table, w, pos)) {
      pos += (table.puck_radius - dist) * wall_frame(w).normal();
    }
  }
  result.puck = {pos, vel};
  return result;
}

StepResult step(const TableGeometry& table, const PuckState& puck, const std::optional<MalletState>& mallet,
                const SimConfig& config, Rng& rng) {
  return advance(table, config.dt, puck, mallet, PhysicsLaw(config), rng);
}

std::size_t TrajectoryDataset::total_steps() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.size();
  return n;
}

TrajectoryDataset collect_dataset(const TableGeometry& table, const VelocityLaw& law, double dt,
                                  std::size_t episodes, std::size_t steps, Rng& rng) {
  if (episodes == 0 || steps == 0) throw Error(ErrorCode::InvalidArgument, "collect_dataset: episodes and steps must be > 0");
  const double rp = table.puck_radius;
  const double rm = table.mallet_radius;
  const double hw = table.half_width();
  const Vec2 home(0.2, 0.0);

  TrajectoryDataset data;
  data.dt = dt;
  data.episodes.reserve(episodes);

  for (std::size_t e = 0; e < episodes; ++e) {
    const bool striker = e < episodes / 2;
    PuckState puck;
    MalletState mallet;
    if (striker) {
      do {
        puck.pos = {uniform(rng, rp + 0.05, 0.5 * table.length), uniform(rng, -hw + rp, hw - rp)};
        mallet.pos = {uniform(rng, rm, 0.5 * table.length - 0.1), uniform(rng, -hw + rm, hw - rm)};
      } while ((puck.pos - mallet.pos).norm() < table.contact_distance() + 0.05);
      puck.vel = {uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
    } else {
      mallet.pos = {rm + 0.02, 0.0};
      do {
        puck.pos = {uniform(rng, rp, table.length - rp), uniform(rng, -hw + rp, hw - rp)};
      } while ((puck.pos - mallet.pos).norm() < table.contact_distance() + 0.05);
      const double speed = uniform(rng, 1.0, 4.0);
      const double heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      puck.vel = speed * Vec2(std::cos(heading), std::sin(heading));
    }

    double strike_speed = uniform(rng, 0.5, 3.0);
    double strike_offset = uniform(rng, -0.6, 0.6) * table.contact_distance();
    int cooldown = 0;

    Trajectory traj;
    traj.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      if (striker) {
        const Vec2 to_puck = unit_or_zero(puck.pos - mallet.pos);
        if (cooldown > 0) {
          mallet.vel = -0.5 * to_puck;
          --cooldown;
        } else if (puck.pos.x() > 0.5 * table.length) {
          mallet.vel = (home - mallet.pos).norm() > 0.01 ? Vec2(unit_or_zero(home - mallet.pos)) : Vec2::Zero();
        } else {
          const Vec2 target = puck.pos + 0.1 * puck.vel + strike_offset * perp(to_puck);
          mallet.vel = strike_speed * unit_or_zero(target - mallet.pos);
        }
      }

      const StepResult res = advance(table, dt, puck, mallet, law, rng);
      traj.push_back({static_cast<double>(k) * dt, puck, mallet, res.mode});

      if (res.mode.kind == ModeKind::Mallet) {
        cooldown = 5;
        strike_speed = uniform(rng, 0.5, 3.0);
        strike_offset = uniform(rng, -0.6, 0.6) * table.contact_distance();
      }
      if (res.crossing) break;
      puck = res.puck;
      mallet.pos += dt * mallet.vel;
      mallet = clamp_to_robot_half(table, mallet);
    }
    data.episodes.push_back(std::move(traj));
  }
  return data;
}

TrajectoryDataset collect_dataset(const TableGeometry& table, const SimConfig& config, std::size_t episodes,
                                  std::size_t steps, Rng& rng) {
  return collect_dataset(table, PhysicsLaw(config), config.dt, episodes, steps, rng);
}

const char* to_string(ShotTermination t) {
  switch (t) {
    case ShotTermination::Goal: return "goal";
    case ShotTermination::OwnGoal: return "own_goal";
    case ShotTermination::OwnHalf: return "own_half";
    case ShotTermination::Timeout: return "timeout";
  }
  return "unknown";
}

ShotOutcome simulate_shot(const TableGeometry& table, const PuckState& puck_at_contact, const ShotPlan& plan,
                          const SimConfig& config, Rng& rng, bool exec_noise, std::size_t max_steps) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double u = plan.u;
  double speed = plan.v_star;
  if (exec_noise) {
    u += config.exec_noise_angle * normal(rng);
    speed = std::max(0.0, speed + config.exec_noise_speed * normal(rng));
  }
  const Vec2 e = shooting_direction(u);
  const MalletState mallet{puck_at_contact.pos - table.contact_distance() * e, speed * e};

  const PhysicsLaw law(config);
  PuckState puck = puck_at_contact;
  // The plan places the mallet on the contact circle, so the impact is applied
  // directly rather than through detect_mode's distance test.
  puck.vel = law.mallet_impact(puck, mallet) +
             gaussian_pair(rng, std::hypot(config.vel_noise_std, config.mallet_noise_std));

  ShotOutcome out;
  out.trajectory.push_back(puck);
  for (std::size_t k = 0; k < max_steps; ++k) {
    const StepResult res = advance(table, config.dt, puck, std::nullopt, law, rng);
    if (res.mode.kind == ModeKind::Wall) ++out.bank_count;
    out.trajectory.push_back(res.puck);
    if (res.crossing) {
      out.crossing_y = res.crossing->y;
      if (res.crossing->opponent_goal) {
        out.scored = true;
        out.speed_at_goal = res.puck.vel.norm();
        out.termination = ShotTermination::Goal;
      } else {
        out.termination = ShotTermination::OwnGoal;
      }
      return out;
    }
    puck = res.puck;
    if (puck.pos.x() < 0.5 * table.length && puck.vel.x() < 0.0) {
      out.termination = ShotTermination::OwnHalf;
      return out;
    }
  }
  out.termination = ShotTermination::Timeout;
  return out;
}

ObservedTrack observe_free_flight(const TableGeometry& table, const PuckState& start, std::size_t steps,
                                  const SimConfig& config, Rng& rng) {
  ObservedTrack track;
  const PhysicsLaw law(config);
  PuckState puck = start;
  for (std::size_t k = 0; k < steps; ++k) {
    track.truth.push_back(puck);
    track.measurements.push_back(puck.pos + gaussian_pair(rng, config.meas_noise_std));
    const StepResult res = advance(table, config.dt, puck, std::nullopt, law, rng);
    if (res.crossing) break;
    puck = res.puck;
  }
  return track;
}

}  // namespace puckplan
