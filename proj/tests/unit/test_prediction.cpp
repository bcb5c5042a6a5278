#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "puckplan/prediction.hpp"

using namespace puckplan;

namespace {

PuckModel simple_model() {
  PuckModel m;
  m[ModeSlot::Floating] = {Mat2{{0.998, 0.0}, {0.0, 0.998}}, Vec2::Zero(), Mat2{{1e-4, 0.0}, {0.0, 1e-4}}};
  m[ModeSlot::Wall] = {Mat2{{-0.9, 0.0}, {0.0, 0.95}}, Vec2::Zero(), Mat2{{3e-3, 0.0}, {0.0, 3e-3}}};
  m[ModeSlot::Mallet] = {Mat2{{-0.9, 0.0}, {0.0, 1.0}}, Vec2::Zero(), Mat2{{3e-3, 0.0}, {0.0, 3e-3}},
                         Mat2{{1.9, 0.0}, {0.0, 0.0}}};
  for (auto& p : m.modes) p.fitted = true;
  return m;
}

StateBelief point(double x, double y, double vx, double vy) { return {Vec4(x, y, vx, vy), Mat4::Zero()}; }

}  // namespace

TEST_CASE("covariance follows A P A^T + Q through free flight") {
  const PuckModel m = simple_model();
  const TableGeometry t;
  StateBelief s0 = point(0.4, 0.0, 1.5, 0.1);
  s0.cov.bottomRightCorner<2, 2>() = 0.01 * Mat2::Identity();
  const BeliefTrajectory traj = stochastic_rollout(s0, m, t);
  REQUIRE(traj.k_goal);
  CHECK(traj.end == RolloutEnd::Goal);
  CHECK(traj.bank_count == 0);

  const StateSpace ss = state_space(m, ModeSlot::Floating);
  Mat4 p = s0.cov;
  for (std::size_t k = 0; k < traj.beliefs.size() - 1; ++k) {
    CHECK(traj.modes[k] == ModeId::floating());
    p = ss.a * p * ss.a.transpose() + ss.q;
    CHECK((traj.beliefs[k + 1].cov - p).norm() < 1e-12);
  }
}

TEST_CASE("goal crossing is interpolated on the mean") {
  const PuckModel m = simple_model();
  const TableGeometry t;
  const BeliefTrajectory traj = stochastic_rollout(point(0.5, -0.05, 2.0, 0.1), m, t);
  REQUIRE(traj.k_goal);
  const Vec4& a = traj.beliefs[*traj.k_goal].mean;
  const Vec4& b = traj.beliefs[*traj.k_goal + 1].mean;
  CHECK(a.x() < t.length);
  CHECK(b.x() >= t.length);
  // Straight line through both means.
  CHECK(traj.crossing_y == doctest::Approx(a.y() + (t.length - a.x()) * (b.y() - a.y()) / (b.x() - a.x())));
  CHECK(puck_speed_at_goal(traj) == doctest::Approx(a.tail<2>().norm()));
  CHECK(traj.goal_marginal(t).mean.isApprox(Vec2(t.length, traj.crossing_y)));
}

TEST_CASE("a bank off the side wall adds process noise") {
  const PuckModel m = simple_model();
  const TableGeometry t;
  const BeliefTrajectory direct = stochastic_rollout(point(0.5, 0.0, 1.5, 0.0), m, t);
  const BeliefTrajectory bank = stochastic_rollout(point(0.5, 0.0, 1.5, 1.0), m, t);
  REQUIRE(direct.k_goal);
  REQUIRE(bank.k_goal);
  CHECK(bank.bank_count == 1);
  CHECK(bank.goal_position_trace() > direct.goal_position_trace());
}

TEST_CASE("a wall step keeps the mean on the table and mirrors the spread") {
  const PuckModel m = simple_model();
  const TableGeometry t;
  StateBelief s0 = point(0.5, 0.0, 1.5, 1.0);
  s0.cov.bottomRightCorner<2, 2>() = 0.01 * Mat2::Identity();
  const BeliefTrajectory traj = stochastic_rollout(s0, m, t);
  const double edge = t.half_width() - t.puck_radius;
  for (const auto& b : traj.beliefs) CHECK(std::abs(b.mean.y()) <= edge + 1e-12);

  std::size_t k = 0;
  while (traj.modes[k].kind != ModeKind::Wall) ++k;
  const StateSpace ss = state_space(m, ModeSlot::Wall, wall_frame(traj.modes[k].wall));
  const Mat4& p = traj.beliefs[k].cov;
  Mat4 flip = Mat4::Identity();
  flip(1, 1) = -1.0;
  const Mat4 expect = flip * (ss.a * p * ss.a.transpose() + ss.q) * flip;
  CHECK((traj.beliefs[k + 1].cov - expect).norm() < 1e-12);
  // Position and velocity errors stay positively coupled across the bounce.
  CHECK(traj.beliefs[k + 1].cov(1, 3) > 0.0);
}

TEST_CASE("rollout end conditions") {
  const PuckModel m = simple_model();
  const TableGeometry t;
  SUBCASE("returning puck") {
    const BeliefTrajectory r = stochastic_rollout(point(0.9, 0.0, -1.0, 0.0), m, t);
    CHECK(r.end == RolloutEnd::OwnHalf);
    CHECK_FALSE(r.k_goal);
    Rng rng(1);
    CHECK(goal_probability(r, t, 16, rng) == 0.0);
    CHECK(puck_speed_at_goal(r) == 0.0);
  }
  SUBCASE("step budget") {
    const BeliefTrajectory r = stochastic_rollout(point(0.5, 0.0, 0.5, 0.0), m, t, 10);
    CHECK(r.end == RolloutEnd::MaxSteps);
    CHECK(r.beliefs.size() == 11);
  }
  SUBCASE("the end wall beside the goal is not a goal") {
    const BeliefTrajectory r = stochastic_rollout(point(1.9, 0.3, 1.0, 0.0), m, t);
    CHECK_FALSE(r.k_goal);
    CHECK(r.bank_count == 1);
    CHECK(r.end == RolloutEnd::OwnHalf);
  }
}

TEST_CASE("goal probability of a centred marginal") {
  const TableGeometry t;
  Rng rng(13);
  const double hw = 0.5 * t.goal_width;
  const PositionBelief b{Vec2(t.length, 0.0), Vec2(1e-6, hw * hw).asDiagonal()};
  const std::size_t n = 20000;
  const double g = goal_probability(b, t, n, rng);
  const double exact = std::erf(1.0 / std::sqrt(2.0));
  CHECK(std::abs(g - exact) < 3.0 * std::sqrt(exact * (1.0 - exact) / n));
  CHECK_THROWS_AS(goal_probability(b, t, 0, rng), Error);

  const PositionBelief sharp{Vec2(t.length, 0.0), Mat2::Zero()};
  CHECK(goal_probability(sharp, t, 10, rng) == 1.0);
  const PositionBelief wide_miss{Vec2(t.length, 0.3), Mat2::Zero()};
  CHECK(goal_probability(wide_miss, t, 10, rng) == 0.0);
}

TEST_CASE("mallet collision belief") {
  const PuckModel m = simple_model();
  const PuckState pre{{0.5, 0.0}, {0.0, 0.0}};
  const MalletState mallet{{0.5 - 0.08 / std::sqrt(2.0), -0.08 / std::sqrt(2.0)}, {1.0, 1.0}};
  const StateBelief b = apply_mallet_collision(pre, mallet, m);
  CHECK(b.mean.head<2>() == pre.pos);
  // Normal along (1,1)/sqrt2; the mallet closes at sqrt2 along it.
  const double vn = 1.9 * std::sqrt(2.0);
  CHECK(b.mean(2) == doctest::Approx(vn / std::sqrt(2.0)));
  CHECK(b.mean(3) == doctest::Approx(vn / std::sqrt(2.0)));
  CHECK(b.cov.topLeftCorner<2, 2>().norm() == 0.0);
  CHECK(b.cov.bottomRightCorner<2, 2>().isApprox(3e-3 * Mat2::Identity()));
}
