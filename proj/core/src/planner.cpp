#include "puckplan/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace puckplan {

void SocWeights::validate() const {
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "weights: lambdas must be >= 0");
  if (lambda1 == 0.0 && lambda2 == 0.0) throw Error(ErrorCode::InvalidArgument, "weights: lambdas are both zero");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorCode::InvalidArgument, "weights: beta must be in [0, 1)");
}

void PlannerSettings::validate() const {
  if (!(actions.u_min < actions.u_max)) throw Error(ErrorCode::InvalidArgument, "planner: u_min must be < u_max");
  if (goal_samples == 0) throw Error(ErrorCode::InvalidArgument, "planner: goal_samples must be >= 1");
  if (max_steps == 0) throw Error(ErrorCode::InvalidArgument, "planner: max_steps must be >= 1");
  if (candidates < 2) throw Error(ErrorCode::InvalidArgument, "planner: candidates must be >= 2");
}

CandidateEvaluation evaluate_objective(const PlanningProblem& problem, const PuckState& puck, double u,
                                       const SocWeights& weights, std::uint64_t mc_seed) {
  CandidateEvaluation out;
  out.u = u;
  try {
    out.plan = plan_from_angle(problem.table, problem.arm, problem.settings.actions, puck, u);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw;
    out.plan.u = u;
    return out;
  }
  if (!out.plan.feasible()) return out;

  const StateBelief s0 = apply_mallet_collision(puck, out.plan.mallet(), problem.model);
  const BeliefTrajectory traj = stochastic_rollout(s0, problem.model, problem.table, problem.settings.max_steps);
  Rng rng(mc_seed);
  out.eval.g_hat = goal_probability(traj, problem.table, problem.settings.goal_samples, rng);
  out.eval.v_puck = puck_speed_at_goal(traj);
  out.eval.bank_count = traj.bank_count;
  out.eval.feasible = out.eval.g_hat > weights.beta;
  out.objective = weights.objective(out.eval.g_hat, out.eval.v_puck);
  return out;
}

std::vector<double> candidate_angles(const ActionSpace& actions, std::size_t m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "candidate_angles: m must be >= 2");
  std::vector<double> u(m);
  const double step = (actions.u_max - actions.u_min) / static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i) u[i] = actions.u_min + step * static_cast<double>(i);
  u.back() = actions.u_max;
  return u;
}

std::vector<double> ScenarioRecord::negatives() const {
  std::vector<double> out;
  out.reserve(angles.size() - 1);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (i != pos_index) out.push_back(angles[i]);
  }
  return out;
}

ScenarioRecord solve_brute_force(const PlanningProblem& problem, const PuckState& puck, const SocWeights& weights,
                                 std::uint64_t mc_seed, std::size_t m) {
  const std::vector<double> angles = candidate_angles(problem.settings.actions, m);
  ScenarioRecord rec;
  rec.state = puck.as_vector();
  rec.mc_seed = mc_seed;
  rec.angles = angles;
  rec.objectives.resize(m);
  rec.g_hats.resize(m);
  rec.v_pucks.resize(m);

  std::optional<std::size_t> best;
  std::optional<CandidateEvaluation> best_g;
  for (std::size_t i = 0; i < m; ++i) {
    const CandidateEvaluation c = evaluate_objective(problem, puck, angles[i], weights, mc_seed);
    rec.objectives[i] = c.constrained_objective();
    rec.g_hats[i] = c.eval.g_hat;
    rec.v_pucks[i] = c.eval.v_puck;
    if (!best_g || c.eval.g_hat > best_g->eval.g_hat) best_g = c;
    if (!c.eval.feasible) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double diff = c.objective - rec.objectives[*best];
    if (diff > 1e-12 || (std::abs(diff) <= 1e-12 && std::abs(angles[i]) < std::abs(angles[*best]))) best = i;
  }
  if (!best) throw NoFeasibleShot(*best_g, "no candidate satisfies the chance constraint");
  rec.pos_index = *best;
  rec.u_pos = angles[*best];
  return rec;
}

PuckState sample_contact_state(const TableGeometry& table, Rng& rng, double max_vel) {
  std::uniform_real_distribution<double> ux(table.puck_radius, 0.5 * table.length);
  std::uniform_real_distribution<double> uy(-table.half_width() + table.puck_radius,
                                            table.half_width() - table.puck_radius);
  std::uniform_real_distribution<double> uv(-max_vel, max_vel);
  PuckState s;
  s.pos.x() = ux(rng);
  s.pos.y() = uy(rng);
  s.vel.x() = uv(rng);
  s.vel.y() = uv(rng);
  return s;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ScenarioRecord> generate_dataset(const PlanningProblem& problem, const SocWeights& weights,
                                             std::size_t n_scenarios, std::size_t m, std::uint64_t seed,
                                             std::size_t workers) {
  if (n_scenarios == 0) throw Error(ErrorCode::InvalidArgument, "generate_dataset: n_scenarios must be > 0");
  weights.validate();
  problem.settings.validate();
  constexpr std::uint64_t kMaxAttempts = 1000;

  std::vector<ScenarioRecord> records(n_scenarios);
  parallel_for(n_scenarios, workers, [&](std::size_t i) {
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Rng rng = make_rng(seed, {i, attempt});
      const PuckState s = sample_contact_state(problem.table, rng);
      const std::uint64_t mc_seed = rng();
      try {
        records[i] = solve_brute_force(problem, s, weights, mc_seed, m);
        return;
      } catch (const NoFeasibleShot&) {
      }
    }
    throw Error(ErrorCode::NoFeasibleShot, "generate_dataset: scenario " + std::to_string(i) + " never feasible");
  });
  return records;
}

}  // namespace puckplan
