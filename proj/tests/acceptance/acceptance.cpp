// Acceptance suite: one pass/fail line per criterion, exit status 0 only if
// every line passes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "puckplan/config.hpp"
#include "puckplan/estimator.hpp"
#include "puckplan/harness.hpp"
#include "puckplan/io.hpp"
#include "puckplan/prediction.hpp"

using namespace puckplan;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel_frob(const MatX& a, const MatX& ref) { return (a - ref).norm() / ref.norm(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// State shared by the criteria that need a fitted model or a trained EBM.
struct Fixture {
  RunConfig config;
  std::optional<PuckModel> model;
  std::optional<TrainResult> trained;
  std::vector<ScenarioRecord> train_set;

  const PuckModel& fitted() {
    if (!model) {
      Rng rng(derive_seed(config.seed, {1}));
      const auto data = collect_dataset(config.table, config.sim, config.collect.episodes, config.collect.steps, rng);
      model = fit_model(fragment_dataset(data), config.sim.dt).model;
    }
    return *model;
  }
};

// ---------------------------------------------------------------------------

PuckModel generator_model() {
  PuckModel m;
  m[ModeSlot::Floating] = {Mat2{{0.996, 0.002}, {-0.003, 0.995}}, Vec2(0.02, -0.03), Mat2{{4e-4, 1e-4}, {1e-4, 3e-4}}};
  m[ModeSlot::Wall] = {Mat2{{-0.88, 0.03}, {0.02, 0.93}}, Vec2(0.05, -0.04), Mat2{{6e-3, 1e-3}, {1e-3, 4e-3}}};
  m[ModeSlot::Mallet] = {Mat2{{-0.8, 0.05}, {0.04, 0.97}}, Vec2(0.06, 0.05), Mat2{{8e-3, 0.0}, {0.0, 3e-3}},
                         Mat2{{1.85, 0.0}, {0.03, 0.2}}};
  for (auto& p : m.modes) p.fitted = true;
  return m;
}

MatX stacked_gain(const ModeParams& p, ModeSlot slot) {
  MatX g(2, slot == ModeSlot::Mallet ? 5 : 3);
  if (slot == ModeSlot::Mallet) {
    g << p.theta_mat, p.theta_mat_mallet, p.theta_vec;
  } else {
    g << p.theta_mat, p.theta_vec;
  }
  return g;
}

Verdict model_identification(Fixture&) {
  const PuckModel truth = generator_model();
  const ModelLaw law(truth);
  const TableGeometry table;
  constexpr std::size_t kPerMode = 10000;

  ModeSampleSets all;
  Rng rng(101);
  for (int batch = 0; batch < 50; ++batch) {
    const ModeSampleSets sets = fragment_dataset(collect_dataset(table, law, truth.dt, 400, 60, rng));
    for (ModeSlot s : kAllSlots) all[s].insert(all[s].end(), sets[s].begin(), sets[s].end());
    if (std::all_of(kAllSlots.begin(), kAllSlots.end(), [&](ModeSlot s) { return all[s].size() >= kPerMode; })) break;
  }
  for (ModeSlot s : kAllSlots) {
    if (all[s].size() < kPerMode) return {false, fmt("only %zu %s samples generated", all[s].size(), to_string(s))};
    all[s].resize(kPerMode);
  }

  const auto t0 = Clock::now();
  const FitReport fit = fit_model(all, truth.dt);
  const double secs = seconds_since(t0);

  double gain_err = 0.0, sigma_err = 0.0;
  for (ModeSlot s : kAllSlots) {
    gain_err = std::max(gain_err, rel_frob(stacked_gain(fit.model[s], s), stacked_gain(truth[s], s)));
    sigma_err = std::max(sigma_err, rel_frob(fit.model[s].sigma, truth[s].sigma));
  }
  return {gain_err <= 0.05 && sigma_err <= 0.10 && secs < 5.0,
          fmt("10^4 samples/mode: max rel err Theta,theta %.4f (<=0.05), Sigma %.4f (<=0.10), fit %.3f s (<5)",
              gain_err, sigma_err, secs)};
}

// ---------------------------------------------------------------------------

Verdict conditioning(Fixture&) {
  Rng rng(202);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index dy = 1 + trial % 3;
    const Eigen::Index dx = 1 + (trial / 3) % 4;
    const Eigen::Index d = dy + dx;
    // Random joint Gaussian, then samples from it.
    MatX a(d, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
    Gaussian<Eigen::Dynamic> joint{VecX::NullaryExpr(d, [&] { return nd(rng); }), a * a.transpose() + 0.1 * MatX::Identity(d, d)};
    const auto draws = sample_gaussian(joint, 300, rng);
    MatX data(300, d);
    for (std::size_t i = 0; i < draws.size(); ++i) data.row(static_cast<Eigen::Index>(i)) = draws[i].transpose();

    const VecX mean = data.colwise().mean();
    const MatX c = data.rowwise() - mean.transpose();
    const MatX cov = c.transpose() * c / 299.0;
    const LinearGaussianMap map = condition(JointGaussian{mean.head(dy), mean.tail(dx), cov.topLeftCorner(dy, dy),
                                                          cov.topRightCorner(dy, dx), cov.bottomRightCorner(dx, dx)});
    const oracles::Regression ref = oracles::regress(data.leftCols(dy), data.rightCols(dx));
    worst = std::max({worst, (map.gain - ref.gain).cwiseAbs().maxCoeff(), (map.offset - ref.offset).cwiseAbs().maxCoeff(),
                      (map.cov - ref.cov).cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-8, fmt("50 random joints vs least squares: max abs diff %.2e (<=1e-8)", worst)};
}

// ---------------------------------------------------------------------------

Verdict kalman(Fixture& fx) {
  // Floating-mode-only data against the textbook filter.
  PuckModel m;
  m[ModeSlot::Floating] = {Mat2{{0.997, 0.001}, {0.0, 0.996}}, Vec2(0.001, 0.0), Mat2{{1e-4, 2e-5}, {2e-5, 8e-5}}};
  m[ModeSlot::Floating].fitted = true;
  const TableGeometry table;
  const MeasurementModel meas = MeasurementModel::position(2e-3);
  Rng rng(303);
  std::normal_distribution<double> noise(0.0, 2e-3);
  double kf_diff = 0.0;
  for (int run = 0; run < 20; ++run) {
    std::vector<std::optional<Vec2>> z;
    Vec2 p(0.4 + 0.01 * run, -0.2 + 0.02 * run), v(1.0, 0.3 - 0.03 * run);
    for (int k = 0; k < 40; ++k) {
      if (k > 1 && (k + run) % 6 == 0) {
        z.emplace_back();
      } else {
        z.emplace_back(p + Vec2(noise(rng), noise(rng)));
      }
      p += 0.02 * v;
    }
    const auto est = run_filter(z, {}, m, table, meas);
    const StateSpace ss = state_space(m, ModeSlot::Floating);
    oracles::TextbookKf ref{est[0].belief.mean, est[0].belief.cov};
    for (std::size_t k = 1; k < z.size(); ++k) {
      ref.predict(ss.a, ss.b, ss.q);
      if (z[k]) ref.update(*z[k], meas.r);
      kf_diff = std::max({kf_diff, (est[k].belief.mean - ref.x).cwiseAbs().maxCoeff(),
                          (est[k].belief.cov - ref.p).cwiseAbs().maxCoeff()});
    }
  }

  // Ground-truth free flight, cut at the first contact, filtered with the identified model.
  const PuckModel& model = fx.fitted();
  const SimConfig& sim = fx.config.sim;
  std::uniform_real_distribution<double> ux(0.2, 1.7), uy(-0.4, 0.4), uv(-2.0, 2.0);
  double se_est = 0.0, se_meas = 0.0;
  std::size_t n = 0;
  bool psd = true;
  for (int run = 0; run < 100;) {
    const PuckState start{Vec2(ux(rng), uy(rng)), Vec2(uv(rng), uv(rng))};
    ObservedTrack track = observe_free_flight(table, start, 60, sim, rng);
    std::size_t len = 0;
    while (len < track.truth.size() && detect_mode(table, track.truth[len], std::nullopt) == ModeId::floating()) ++len;
    if (len < 10) continue;
    ++run;
    track.truth.resize(len);
    track.measurements.resize(len);
    std::vector<std::optional<Vec2>> z(track.measurements.begin(), track.measurements.end());
    const auto est = run_filter(z, {}, model, table, MeasurementModel::position(sim.meas_noise_std));
    for (std::size_t k = 1; k < est.size(); ++k) {
      se_est += (est[k].belief.mean.head<2>() - track.truth[k].pos).squaredNorm();
      se_meas += (track.measurements[k] - track.truth[k].pos).squaredNorm();
      psd = psd && is_psd(MatX(est[k].belief.cov));
      ++n;
    }
  }
  const double rmse_est = std::sqrt(se_est / n), rmse_meas = std::sqrt(se_meas / n);
  return {kf_diff <= 1e-10 && rmse_est < rmse_meas && psd,
          fmt("vs textbook KF %.2e (<=1e-10); position RMSE %.3e < measurement %.3e over 100 contact-free runs; PSD %s", kf_diff,
              rmse_est, rmse_meas, psd ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

Verdict covariance_propagation(Fixture& fx) {
  const PuckModel& model = fx.fitted();
  const TableGeometry table;
  struct Step {
    ModeSlot slot;
    ContactFrame frame;
    Vec2 mallet_vel;
  };
  std::vector<Step> seq;
  for (int k = 0; k < 8; ++k) seq.push_back({ModeSlot::Floating, {}, Vec2::Zero()});
  seq.push_back({ModeSlot::Mallet, ContactFrame::from_normal(shooting_direction(0.3)), Vec2(1.5, 0.5)});
  for (int k = 0; k < 15; ++k) seq.push_back({ModeSlot::Floating, {}, Vec2::Zero()});
  seq.push_back({ModeSlot::Wall, wall_frame(Wall::Left), Vec2::Zero()});
  for (int k = 0; k < 15; ++k) seq.push_back({ModeSlot::Floating, {}, Vec2::Zero()});
  seq.push_back({ModeSlot::Wall, wall_frame(Wall::Right), Vec2::Zero()});
  for (int k = 0; k < 10; ++k) seq.push_back({ModeSlot::Floating, {}, Vec2::Zero()});

  StateBelief b{Vec4(0.5, 0.1, 0.2, -0.1), Vec4(1e-4, 1e-4, 4e-2, 4e-2).asDiagonal()};
  constexpr std::size_t kParticles = 10000;
  Rng rng(404);
  std::vector<Vec4> particles = sample_gaussian(b, kParticles, rng);
  std::normal_distribution<double> nd;
  for (const Step& s : seq) {
    const StateSpace ss = state_space(model, s.slot, s.frame, s.mallet_vel);
    b.mean = ss.a * b.mean + ss.b;
    b.cov = ss.a * b.cov * ss.a.transpose() + ss.q;
    // Particles: mode map in its own frame, noise drawn there.
    const ModeParams& p = model[s.slot];
    const Mat2 r = s.slot == ModeSlot::Floating ? Mat2::Identity() : s.frame.rotation;
    const Eigen::LLT<Mat2> chol(p.sigma);
    const Mat2 l = chol.matrixL();
    for (Vec4& x : particles) {
      const Vec2 vc = r * x.tail<2>();
      const Vec2 next = p.theta_mat * vc + p.theta_mat_mallet * (r * s.mallet_vel) + p.theta_vec + l * Vec2(nd(rng), nd(rng));
      x.head<2>() += model.dt * x.tail<2>();
      x.tail<2>() = r.transpose() * next;
    }
  }
  Vec4 mean = Vec4::Zero();
  for (const Vec4& x : particles) mean += x;
  mean /= kParticles;
  Mat4 cov = Mat4::Zero();
  for (const Vec4& x : particles) cov += (x - mean) * (x - mean).transpose();
  cov /= kParticles - 1;
  const double err = rel_frob(b.cov, cov);
  return {err < 0.10, fmt("%zu steps, 3 contacts: rel Frobenius error vs 10^4 particles %.4f (<0.10)", seq.size(), err)};
}

// ---------------------------------------------------------------------------

Verdict goal_probability_check(Fixture&) {
  const TableGeometry table;
  const double half = 0.5 * table.goal_width;
  const std::size_t n = kDefaultGoalSamples;
  Rng rng(505);
  std::uniform_real_distribution<double> um(-0.2, 0.2), us(0.04, 0.25), uc(-0.8, 0.8);
  int ok = 0, tested = 0;
  double worst = 0.0;
  while (tested < 20) {
    const double sy = us(rng), sx = us(rng), corr = uc(rng);
    PositionBelief b{Vec2(table.length, um(rng)), Mat2{{sx * sx, corr * sx * sy}, {corr * sx * sy, sy * sy}}};
    const double exact = oracles::interval_mass_quadrature(b.mean.y(), b.cov(1, 1), half);
    if (exact < 0.05 || exact > 0.95) continue;
    ++tested;
    const double g = goal_probability(b, table, n, rng);
    const double tol = 3.0 * std::sqrt(g * (1.0 - g) / static_cast<double>(n));
    worst = std::max(worst, std::abs(g - exact) / std::max(tol, 1e-300));
    ok += std::abs(g - exact) <= tol ? 1 : 0;
  }
  const PositionBelief one_sigma{Vec2(table.length, 0.0), Mat2{{0.01, 0.0}, {0.0, half * half}}};
  const double exact = oracles::interval_mass_quadrature(0.0, half * half, half);
  const double g_ng = goal_probability(one_sigma, table, n, rng);
  const double g_big = goal_probability(one_sigma, table, 100000, rng);
  const bool pass = ok == 20 && std::abs(exact - 0.6827) < 1e-4 && std::abs(g_ng - exact) <= 3.0 * std::sqrt(g_ng * (1 - g_ng) / n) &&
                    std::abs(g_big - 0.683) < 0.005;
  return {pass, fmt("%d/20 beliefs within 3 sigma (worst %.2f sigma-units); sigma=half-width: exact %.4f, "
                    "G(N=%zu) %.3f, G(N=1e5) %.4f",
                    ok, worst, exact, n, g_ng, g_big)};
}

// ---------------------------------------------------------------------------

StateBelief launched(const PuckModel& model, const Vec2& puck, double u, double speed) {
  // Mallet speed that gives the requested mean puck speed, by bisection.
  double lo = 0.0, hi = 10.0;
  StateBelief b;
  for (int it = 0; it < 100; ++it) {
    const double vm = 0.5 * (lo + hi);
    const MalletState mallet{puck - 0.08 * shooting_direction(u), vm * shooting_direction(u)};
    b = apply_mallet_collision({puck, Vec2::Zero()}, mallet, model);
    (b.mean.tail<2>().norm() < speed ? lo : hi) = vm;
  }
  return b;
}

Verdict trace_ordering(Fixture& fx) {
  const PuckModel& model = fx.fitted();
  const TableGeometry table;
  const Vec2 puck(0.5, 0.0);
  const BeliefTrajectory fast = stochastic_rollout(launched(model, puck, 0.0, 2.0), model, table);
  const BeliefTrajectory slow = stochastic_rollout(launched(model, puck, 0.0, 1.2), model, table);
  // Bank angle whose mean crosses closest to the goal centre.
  std::optional<BeliefTrajectory> bank;
  for (double u = 0.4; u <= 1.2; u += 0.005) {
    BeliefTrajectory t = stochastic_rollout(launched(model, puck, u, 1.2), model, table);
    if (!t.k_goal || t.bank_count != 1) continue;
    if (!bank || std::abs(t.crossing_y) < std::abs(bank->crossing_y)) bank = std::move(t);
  }
  if (!fast.k_goal || !slow.k_goal || !bank) return {false, "a rollout did not reach the goal"};
  const double a = fast.goal_position_trace(), b = slow.goal_position_trace(), c = bank->goal_position_trace();
  return {a < b && b < c, fmt("goal-line trace: direct@2.0 %.3e < direct@1.2 %.3e < bank@1.2 %.3e", a, b, c)};
}

// ---------------------------------------------------------------------------

Verdict max_speed_lp(Fixture&) {
  Rng rng(707);
  std::uniform_real_distribution<double> uq(-3.0, 3.0), ul(0.2, 0.8), ulim(0.5, 3.0), uu(-M_PI, M_PI);
  double worst = 0.0;
  bool invariants = true;
  int configs = 0;
  while (configs < 1000) {
    PlanarArm arm;
    const std::size_t n = configs % 2 ? 3 : 2;
    arm.link_lengths.assign(n, 0.0);
    arm.joint_vel_limits.assign(n, 0.0);
    VecX q(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      arm.link_lengths[i] = ul(rng);
      arm.joint_vel_limits[i] = ulim(rng);
      q[static_cast<Eigen::Index>(i)] = uq(rng);
    }
    const Jacobian jac = jacobian(arm, q);
    if (Eigen::JacobiSVD<MatX>(jac).singularValues().minCoeff() < 1e-3) continue;  // near-singular pose
    ++configs;
    const Vec2 e = shooting_direction(uu(rng));
    const double v = max_speed(jac, arm.joint_vel_limits, e).v_star;
    const double ref = oracles::max_speed(jac, arm.joint_vel_limits, e);
    worst = std::max(worst, std::abs(v - ref) / std::max(1.0, ref));

    std::vector<double> scaled = arm.joint_vel_limits;
    for (double& l : scaled) l *= 2.5;
    invariants = invariants && std::abs(max_speed(jac, scaled, e).v_star - 2.5 * v) <= 1e-9 * std::max(1.0, v);
    invariants = invariants && std::abs(max_speed(jac, arm.joint_vel_limits, 4.0 * e).v_star - v) <= 1e-9 * std::max(1.0, v);
    invariants = invariants && std::abs(max_speed(MatX(3.0 * jac), arm.joint_vel_limits, e).v_star - 3.0 * v) <= 1e-9 * std::max(1.0, v);
  }
  return {worst <= 1e-9 && invariants,
          fmt("1000 configurations (2 and 3 links): max diff vs vertex oracle %.2e (<=1e-9); invariants %s", worst,
              invariants ? "hold" : "violated")};
}

// ---------------------------------------------------------------------------

Verdict ebm_training(Fixture& fx) {
  const RunConfig& c = fx.config;
  const PlanningProblem problem = c.problem(fx.fitted());
  auto t0 = Clock::now();
  fx.train_set = generate_dataset(problem, c.weights, c.ebm.scenarios, c.planner.candidates, derive_seed(c.seed, {8}));
  const double gen_secs = seconds_since(t0);
  t0 = Clock::now();
  fx.trained = train(fx.train_set, InputNorm::for_table(c.table, c.planner.actions), c.ebm.train);
  const double train_secs = seconds_since(t0);
  const TrainResult& r = *fx.trained;
  const double ln_m = std::log(static_cast<double>(c.planner.candidates));

  std::vector<double> windows;
  for (std::size_t w = 0; w + 100 <= r.loss_curve.size(); w += 100) {
    windows.push_back(std::accumulate(r.loss_curve.begin() + static_cast<long>(w), r.loss_curve.begin() + static_cast<long>(w + 100), 0.0) / 100.0);
  }
  bool monotone = windows.size() == c.ebm.train.epochs / 100;
  for (std::size_t i = 1; i < windows.size(); ++i) monotone = monotone && windows[i] < windows[i - 1];
  const double final_loss = r.loss_curve.back();

  // Finite differences on the trained network, in double precision.
  const Mlp<double> net = r.model.net();
  const std::size_t m = c.planner.candidates;
  const std::size_t batch = 8;
  Mlp<double>::Matrix x(5, static_cast<Eigen::Index>(batch * m));
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < batch; ++i) {
    const ScenarioRecord& rec = fx.train_set[i];
    for (std::size_t j = 0; j < m; ++j) x.col(static_cast<Eigen::Index>(i * m + j)) = r.model.norm().apply(rec.state, rec.angles[j]);
    pos.push_back(rec.pos_index);
  }
  Mlp<double> grad = net.zeros_like();
  infonce_batch<double>(net, x, pos, m, &grad);
  Rng rng(808);
  double worst = 0.0;
  for (int probe = 0; probe < 300; ++probe) {
    const std::size_t l = std::uniform_int_distribution<std::size_t>(0, net.layers() - 1)(rng);
    const bool bias = probe % 4 == 0;
    const auto size = bias ? net.biases[l].size() : net.weights[l].size();
    const auto k = std::uniform_int_distribution<Eigen::Index>(0, size - 1)(rng);
    auto central = [&](double h) {
      Mlp<double> plus = net, minus = net;
      (bias ? plus.biases[l].data() : plus.weights[l].data())[k] += h;
      (bias ? minus.biases[l].data() : minus.weights[l].data())[k] -= h;
      return (infonce_batch<double>(plus, x, pos, m, nullptr) - infonce_batch<double>(minus, x, pos, m, nullptr)) / (2 * h);
    };
    // Richardson-extrapolated central difference keeps roundoff far below the tolerance.
    const double fd = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
    const double g = (bias ? grad.biases[l].data() : grad.weights[l].data())[k];
    // Relative error, with an absolute floor for vanishing entries.
    worst = std::max(worst, std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-6}));
  }
  const bool pass = std::abs(r.initial_loss - ln_m) < 1e-9 && monotone && final_loss < 1.0 && worst <= 1e-4;
  return {pass, fmt("N=%zu M=%zu: initial %.4f (ln M %.4f), 100-epoch means %s, final %.4f (<1.0) after %zu epochs; "
                    "grad vs FD max rel %.1e (<=1e-4); dataset %.0f s, training %.0f s",
                    fx.train_set.size(), m, r.initial_loss, ln_m, monotone ? "decreasing" : "NOT decreasing", final_loss,
                    r.loss_curve.size(), worst, gen_secs, train_secs)};
}

// ---------------------------------------------------------------------------

Verdict inference_fidelity(Fixture& fx) {
  if (!fx.trained) return {false, "needs the trained model from criterion 8"};
  const RunConfig& c = fx.config;
  const PlanningProblem problem = c.problem(fx.fitted());
  const EnergyModel& ebm = fx.trained->model;
  const auto held_out = generate_dataset(problem, c.weights, 300, c.planner.candidates, derive_seed(c.seed, {9}));

  const RegretStats vs_brute = compare_planners(held_out, problem, c.weights, ebm, c.ebm.sampler, derive_seed(c.seed, {9, 1}));

  std::vector<double> grid_regret, times;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    const ScenarioRecord& rec = held_out[i];
    Rng rng = make_rng(c.seed, {9, 2, i});
    const auto t0 = Clock::now();
    const double u = infer(ebm, rec.state, c.planner.actions, c.ebm.sampler, rng).u_hat;
    times.push_back(1e3 * seconds_since(t0));
    const double u_grid = grid_argmin(ebm, rec.state, c.planner.actions, 1000);
    const PuckState s = PuckState::from_vector(rec.state);
    const double j = evaluate_objective(problem, s, u, c.weights, rec.mc_seed).constrained_objective();
    const double j_grid = evaluate_objective(problem, s, u_grid, c.weights, rec.mc_seed).constrained_objective();
    grid_regret.push_back(j_grid > 0.0 ? std::max(0.0, j_grid - j) / j_grid : 0.0);
  }
  const double within = regret_stats(grid_regret).fraction_within(0.05);
  const double ms = median(times);
  return {vs_brute.median <= 0.05 && within >= 0.90 && ms < 20.0,
          fmt("300 held-out: median regret vs brute force %.4f (<=0.05, mean %.3f); within 5%% of 1000-point "
              "energy-grid argmin %.3f (>=0.90); median infer %.2f ms (<20)",
              vs_brute.median, vs_brute.mean, within, ms)};
}

// ---------------------------------------------------------------------------

Verdict policy_orderings(Fixture& fx) {
  const RunConfig& c = fx.config;
  PlanningProblem problem = c.problem(fx.fitted());
  HarnessSettings h;
  h.grid = c.harness.grid;
  h.sim = c.sim;
  h.sampler = c.ebm.sampler;
  h.exec_noise = c.harness.exec_noise;
  h.seed = derive_seed(c.seed, {10});
  const auto t0 = Clock::now();
  const EvalReport r = run_eval(reference_policies(), problem, h);
  const double secs = seconds_since(t0);
  const PolicySummary &p1 = r.policies[0], &p2 = r.policies[1], &p3 = r.policies[2];
  const bool pass = p1.shots == 100 && p1.score >= p2.score && p2.score >= p3.score &&
                    p3.speed_mean >= p2.speed_mean && p2.speed_mean >= p1.speed_mean && p1.banks_mean == 0.0 &&
                    p3.banks_mean >= 0.5 && secs < 600.0;
  return {pass, fmt("%zu shots each: score %.2f >= %.2f >= %.2f; speed %.2f <= %.2f <= %.2f m/s; banks #1 %.2f (=0), "
                    "#3 %.2f (>=0.5); %.0f s (<600)",
                    p1.shots, p1.score, p2.score, p3.score, p1.speed_mean, p2.speed_mean, p3.speed_mean, p1.banks_mean,
                    p3.banks_mean, secs)};
}

// ---------------------------------------------------------------------------

int sh(const std::string& args) {
  const std::string cmd = std::string(PUCKPLAN_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism(Fixture&) {
  const fs::path root = fs::temp_directory_path() / "puckplan_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "small.json");
    cfg << R"({"seed": 7, "sim": {"episodes": 60},
               "planner": {"lambda2": 0.2, "candidates": 25},
               "ebm": {"scenarios": 120, "epochs": 30, "hidden": [32, 32]},
               "harness": {"nx": 3, "ny": 2, "reps": 1,
                           "policies": [{"name": "ours_1", "lambda1": 1, "lambda2": 0},
                                        {"name": "ours_2", "lambda1": 1, "lambda2": 0.2},
                                        {"name": "ebm", "lambda1": 1, "lambda2": 0.2, "planner": "ebm"}]}})";
  }
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const fs::path d = root / ("run" + std::to_string(run));
    const std::string g = "--config " + (root / "small.json").string() + " --workers " + std::to_string(1 + run) +
                          " --out " + d.string() + " ";
    const std::vector<std::string> steps = {
        "collect",
        "fit --data " + (d / "trajectories.csv").string(),
        "plan-offline --model " + (d / "model.json").string(),
        "train --quiet --dataset " + (d / "dataset.jsonl").string(),
        "bench --model " + (d / "model.json").string() + " --weights " + (d / "weights.json").string(),
    };
    for (const auto& s : steps) {
      if (const int code = sh(g + s); code != 0) return {false, fmt("'%s' exited with %d", s.c_str(), code)};
    }
    reports.push_back(read_file(d / "report.json"));
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same, fmt("collect->fit->plan-offline->train->bench twice (1 and 2 workers): report.json %s (%zu bytes, sha256 %.12s)",
                    same ? "byte-identical" : "DIFFERS", reports[0].size(), sha256_hex(reports[0]).c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict(Fixture&)>>> criteria = {
      {"model identification", model_identification},
      {"conditioning", conditioning},
      {"kalman filter", kalman},
      {"covariance propagation", covariance_propagation},
      {"goal probability", goal_probability_check},
      {"uncertainty ordering", trace_ordering},
      {"max-speed LP", max_speed_lp},
      {"EBM training", ebm_training},
      {"inference fidelity", inference_fidelity},
      {"policy orderings", policy_orderings},
      {"determinism", determinism},
  };
  Fixture fx;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = criteria[i].second(fx);
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("[%s] %2zu %-24s %s  (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
