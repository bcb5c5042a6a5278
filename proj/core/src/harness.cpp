#include "puckplan/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace puckplan {

const char* to_string(PlannerKind kind) { return kind == PlannerKind::Ebm ? "ebm" : "brute_force"; }

PlannerKind planner_kind_from_string(const std::string& name) {
  if (name == "brute_force") return PlannerKind::BruteForce;
  if (name == "ebm") return PlannerKind::Ebm;
  throw Error(ErrorCode::Format, "unknown planner '" + name + "' (expected brute_force or ebm)");
}

std::vector<PolicyInstance> reference_policies(PlannerKind planner) {
  return {
      {"ours_1", {1.0, 0.0, 0.5}, planner, nullptr},
      {"ours_2", {1.0, 0.2, 0.5}, planner, nullptr},
      {"ours_3", {0.0, 1.0, 0.5}, planner, nullptr},
  };
}

Vec2 GridSpec::placement(std::size_t shot) const {
  const std::size_t cell = (shot / reps) % (nx * ny);
  const std::size_t ix = cell % nx;
  const std::size_t iy = cell / nx;
  auto lerp = [](double a, double b, std::size_t i, std::size_t n) {
    return n == 1 ? 0.5 * (a + b) : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  return {lerp(x_min, x_max, ix, nx), lerp(y_min, y_max, iy, ny)};
}

void GridSpec::validate(const TableGeometry& table) const {
  if (nx == 0 || ny == 0 || reps == 0) throw Error(ErrorCode::InvalidArgument, "grid: counts must be > 0");
  if (!(x_min <= x_max && y_min <= y_max)) throw Error(ErrorCode::InvalidArgument, "grid: empty placement region");
  if (x_min < table.puck_radius || x_max > 0.5 * table.length ||
      std::max(std::abs(y_min), std::abs(y_max)) > table.half_width() - table.puck_radius) {
    throw Error(ErrorCode::InvalidArgument, "grid: placement region leaves the robot half");
  }
  if (!(drift >= 0.0)) throw Error(ErrorCode::InvalidArgument, "grid: drift must be >= 0");
  if (observe_steps < 2) throw Error(ErrorCode::InvalidArgument, "grid: observe_steps must be >= 2");
}

PolicySummary summarize(const std::string& name, const std::vector<ShotRecord>& shots) {
  PolicySummary s;
  s.name = name;
  s.shots = shots.size();
  double speed_sum = 0.0;
  double banks_sum = 0.0;
  double g_sum = 0.0;
  for (const auto& r : shots) {
    g_sum += r.planned_g;
    if (!r.scored) continue;
    ++s.scored;
    speed_sum += r.speed;
    banks_sum += r.banks;
  }
  if (s.shots > 0) {
    s.score = static_cast<double>(s.scored) / static_cast<double>(s.shots);
    s.planned_g_mean = g_sum / static_cast<double>(s.shots);
  }
  if (s.scored > 0) {
    s.speed_mean = speed_sum / static_cast<double>(s.scored);
    s.banks_mean = banks_sum / static_cast<double>(s.scored);
    double var = 0.0;
    for (const auto& r : shots) {
      if (r.scored) var += (r.speed - s.speed_mean) * (r.speed - s.speed_mean);
    }
    s.speed_std = s.scored > 1 ? std::sqrt(var / static_cast<double>(s.scored - 1)) : 0.0;
  }
  return s;
}

namespace {

ShotRecord run_shot(const PolicyInstance& policy, std::size_t policy_index, std::size_t shot,
                    const PlanningProblem& problem, const HarnessSettings& settings) {
  ShotRecord rec;
  rec.policy = policy_index;
  rec.shot = shot;
  Rng rng = make_rng(settings.seed, {policy_index, shot});
  const TableGeometry& table = problem.table;

  std::uniform_real_distribution<double> drift(-settings.grid.drift, settings.grid.drift);
  PuckState start;
  start.pos = settings.grid.placement(shot);
  start.vel.x() = drift(rng);
  start.vel.y() = drift(rng);

  const ObservedTrack track = observe_free_flight(table, start, settings.grid.observe_steps, settings.sim, rng);
  std::vector<std::optional<Vec2>> meas(track.measurements.begin(), track.measurements.end());
  const auto filtered = run_filter(meas, {}, problem.model, table, MeasurementModel::position(settings.sim.meas_noise_std));
  const PuckState estimate = PuckState::from_vector(filtered.back().belief.mean);
  const PuckState truth = track.truth.back();
  rec.truth = truth.as_vector();
  rec.estimate = estimate.as_vector();
  const std::uint64_t mc_seed = rng();

  try {
    double u = 0.0;
    if (policy.planner == PlannerKind::BruteForce) {
      try {
        u = solve_brute_force(problem, estimate, policy.weights, mc_seed, problem.settings.candidates).u_pos;
      } catch (const NoFeasibleShot& e) {
        u = e.best().u;
      }
    } else {
      Rng infer_rng(rng());
      u = infer(*policy.ebm, estimate.as_vector(), problem.settings.actions, settings.sampler, infer_rng).u_hat;
    }
    const CandidateEvaluation planned = evaluate_objective(problem, estimate, u, policy.weights, mc_seed);
    rec.u = u;
    rec.v_star = planned.plan.v_star;
    rec.planned_g = planned.eval.g_hat;
    rec.planned_v = planned.eval.v_puck;
    if (!planned.plan.feasible()) {
      rec.outcome = "infeasible";
      return rec;
    }
    const ShotOutcome out = simulate_shot(table, truth, planned.plan, settings.sim, rng, settings.exec_noise);
    rec.scored = out.scored;
    rec.speed = out.speed_at_goal;
    rec.banks = out.bank_count;
    rec.crossing_y = out.crossing_y;
    rec.outcome = to_string(out.termination);
  } catch (const Error& e) {
    rec.outcome = to_string(e.code());
  }
  return rec;
}

}  // namespace

EvalReport run_eval(const std::vector<PolicyInstance>& policies, const PlanningProblem& problem,
                    const HarnessSettings& settings) {
  settings.grid.validate(problem.table);
  const std::size_t n = settings.grid.shots();
  EvalReport report;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    for (std::size_t q = 0; q < p; ++q) {
      if (policies[q].name == policies[p].name) throw Error(ErrorCode::InvalidArgument, "duplicate policy name " + policies[p].name);
    }
    policies[p].weights.validate();
    if (policies[p].planner == PlannerKind::Ebm && !policies[p].ebm) {
      throw Error(ErrorCode::InvalidArgument, "policy " + policies[p].name + " has no energy model");
    }
    std::vector<ShotRecord> shots(n);
    parallel_for(n, settings.workers,
                 [&](std::size_t i) { shots[i] = run_shot(policies[p], p, i, problem, settings); });
    report.policies.push_back(summarize(policies[p].name, shots));
    report.shots.insert(report.shots.end(), shots.begin(), shots.end());
  }
  return report;
}

double RegretStats::fraction_within(double tol) const {
  if (regrets.empty()) return 0.0;
  const auto n = std::count_if(regrets.begin(), regrets.end(), [&](double r) { return r <= tol; });
  return static_cast<double>(n) / static_cast<double>(regrets.size());
}

RegretStats regret_stats(std::vector<double> regrets) {
  RegretStats s;
  s.regrets = regrets;
  if (regrets.empty()) return s;
  std::sort(regrets.begin(), regrets.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(regrets.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, regrets.size() - 1);
    return regrets[lo] + (pos - static_cast<double>(lo)) * (regrets[hi] - regrets[lo]);
  };
  s.mean = std::accumulate(regrets.begin(), regrets.end(), 0.0) / static_cast<double>(regrets.size());
  s.median = quantile(0.5);
  s.p90 = quantile(0.9);
  s.max = regrets.back();
  return s;
}

RegretStats compare_planners(const std::vector<ScenarioRecord>& scenarios, const PlanningProblem& problem,
                             const SocWeights& weights, const EnergyLandscape& ebm, const SamplerSettings& sampler,
                             std::uint64_t seed, std::size_t workers) {
  std::vector<double> regrets(scenarios.size());
  parallel_for(scenarios.size(), workers, [&](std::size_t i) {
    const ScenarioRecord& rec = scenarios[i];
    const double ref = rec.objectives.at(rec.pos_index);
    Rng rng = make_rng(seed, {i});
    const double u = infer(ebm, rec.state, problem.settings.actions, sampler, rng).u_hat;
    const double j = evaluate_objective(problem, PuckState::from_vector(rec.state), u, weights, rec.mc_seed)
                         .constrained_objective();
    regrets[i] = ref > 0.0 ? std::max(0.0, ref - j) / ref : 0.0;
  });
  return regret_stats(std::move(regrets));
}

}  // namespace puckplan
