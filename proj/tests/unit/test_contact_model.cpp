#include <doctest.h>

#include "helpers.hpp"
#include "puckplan/contact_model.hpp"

using namespace puckplan;

namespace {

PuckModel known_model() {
  PuckModel m;
  m[ModeSlot::Floating] = {Mat2{{0.998, 0.001}, {-0.002, 0.997}}, Vec2(0.001, -0.002), Mat2{{2e-4, 0.0}, {0.0, 2e-4}}};
  m[ModeSlot::Wall] = {Mat2{{-0.9, 0.02}, {0.0, 0.95}}, Vec2(0.01, 0.0), Mat2{{4e-3, 1e-3}, {1e-3, 3e-3}}};
  m[ModeSlot::Mallet] = {Mat2{{-0.85, 0.0}, {0.05, 0.99}}, Vec2(0.0, 0.01), Mat2{{5e-3, 0.0}, {0.0, 2e-3}},
                         Mat2{{1.9, 0.0}, {0.0, 0.1}}};
  for (auto& p : m.modes) p.fitted = true;
  return m;
}

}  // namespace

TEST_CASE("fragment_dataset labels and rotates pairs") {
  const TableGeometry t;
  TrajectoryDataset data;
  Trajectory e;
  const MalletState far{{0.1, 0.0}, {0.0, 0.0}};
  e.push_back({0.00, {{0.5, 0.2}, {1.0, 0.5}}, far, ModeId::floating()});
  e.push_back({0.02, {{0.5, t.half_width() - t.puck_radius}, {1.0, 0.5}}, far, ModeId::wall_hit(Wall::Left)});
  e.push_back({0.04, {{0.52, 0.47}, {0.9, -0.45}}, far, ModeId::floating()});
  data.episodes.push_back(e);

  const ModeSampleSets sets = fragment_dataset(data);
  REQUIRE(sets[ModeSlot::Floating].size() == 1);
  REQUIRE(sets[ModeSlot::Wall].size() == 1);
  CHECK(sets[ModeSlot::Mallet].empty());
  const ModeSample& w = sets[ModeSlot::Wall].front();
  // Left wall normal is -y: approaching shows as a negative normal component.
  CHECK(w.xi(0) == doctest::Approx(-0.5));
  CHECK(w.y(0) == doctest::Approx(0.45));
  CHECK(w.y(1) == doctest::Approx(wall_frame(Wall::Left).to_contact(Vec2(0.9, -0.45)).y()));
}

TEST_CASE("fit_model on a generated dataset recovers the generator") {
  const PuckModel truth = known_model();
  const ModelLaw law(truth);
  Rng rng(21);
  const TableGeometry t;
  const auto data = collect_dataset(t, law, truth.dt, 200, 60, rng);
  const FitReport fit = fit_model(fragment_dataset(data), truth.dt);
  CHECK(fit.skipped.empty());
  for (ModeSlot s : {ModeSlot::Floating, ModeSlot::Wall}) {
    CHECK(testing::rel_frob(fit.model[s].theta_mat, truth[s].theta_mat) < 0.05);
    CHECK(testing::rel_frob(fit.model[s].sigma, truth[s].sigma) < 0.25);
  }
  CHECK(testing::rel_frob(fit.model[ModeSlot::Floating].sigma, truth[ModeSlot::Floating].sigma) < 0.1);
}

TEST_CASE("empty modes are skipped and refused at use") {
  ModeSampleSets sets;
  Rng rng(2);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 50; ++i) {
    ModeSample s;
    s.xi = Vec2(nd(rng), nd(rng));
    s.y = 0.9 * s.xi.head<2>();
    s.mode = ModeId::floating();
    sets[ModeSlot::Floating].push_back(s);
  }
  const FitReport fit = fit_model(sets, 0.02);
  CHECK(fit.skipped == std::vector<std::string>{"wall", "mallet"});
  CHECK(fit.model[ModeSlot::Floating].theta_mat.isApprox(0.9 * Mat2::Identity(), 1e-6));
  try {
    state_space(fit.model, ModeSlot::Wall, wall_frame(Wall::Left));
    FAIL("expected EmptyMode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyMode);
  }
  CHECK_THROWS_AS(fit_mode({}), Error);
}

TEST_CASE("state_space applies the mode map in its contact frame") {
  const PuckModel m = known_model();
  Rng rng(6);
  const Vec4 x = testing::random_matrix(4, 1, rng);
  const Vec2 v = x.tail<2>();

  SUBCASE("floating") {
    const StateSpace ss = state_space(m, ModeSlot::Floating);
    const Vec4 next = ss.a * x + ss.b;
    const ModeParams& p = m[ModeSlot::Floating];
    CHECK((next.head<2>() - (x.head<2>() + m.dt * v)).norm() < 1e-14);
    CHECK((next.tail<2>() - (p.theta_mat * v + p.theta_vec)).norm() < 1e-14);
    CHECK((ss.q.bottomRightCorner<2, 2>() - p.sigma).norm() < 1e-14);
    CHECK(ss.q.topLeftCorner<2, 2>().norm() == 0.0);
  }

  SUBCASE("wall, rotated by hand") {
    const ContactFrame f = wall_frame(Wall::Right);
    const StateSpace ss = state_space(m, ModeSlot::Wall, f);
    const ModeParams& p = m[ModeSlot::Wall];
    // Right wall normal is +y: contact coordinates are (vy, -vx).
    const Vec2 c(v.y(), -v.x());
    const Vec2 cn = p.theta_mat * c + p.theta_vec;
    const Vec2 world(-cn.y(), cn.x());
    CHECK(((ss.a * x + ss.b).tail<2>() - world).norm() < 1e-14);
  }

  SUBCASE("mallet includes the mallet velocity") {
    const PuckState puck{{0.5, 0.1}, v};
    const MalletState mallet{{0.42, 0.1}, {1.5, 0.3}};
    const StateSpace ss = state_space_for(m, ModeId::mallet(), puck, mallet);
    const ModeParams& p = m[ModeSlot::Mallet];
    // Normal along +x: contact and world frames coincide.
    const Vec2 expect = p.theta_mat * v + p.theta_mat_mallet * mallet.vel + p.theta_vec;
    CHECK(((ss.a * x + ss.b).tail<2>() - expect).norm() < 1e-14);
    CHECK_THROWS_AS(state_space_for(m, ModeId::mallet(), puck, std::nullopt), Error);
  }
}

TEST_CASE("predict_velocity") {
  const PuckModel m = known_model();
  const VelocityBelief b = predict_velocity(m[ModeSlot::Mallet], Vec2(0.1, 0.2), Vec2(2.0, 0.0));
  CHECK(b.mean.x() == doctest::Approx(-0.85 * 0.1 + 1.9 * 2.0));
  CHECK(b.mean.y() == doctest::Approx(0.05 * 0.1 + 0.99 * 0.2 + 0.01));
  CHECK(b.cov.isApprox(m[ModeSlot::Mallet].sigma));
}
