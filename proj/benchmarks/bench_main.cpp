#include <benchmark/benchmark.h>

#include "puckplan/config.hpp"
#include "puckplan/estimator.hpp"
#include "puckplan/harness.hpp"

using namespace puckplan;

namespace {

const RunConfig& config() {
  static const RunConfig c;
  return c;
}

const PuckModel& model() {
  static const PuckModel m = [] {
    Rng rng(1);
    const auto data = collect_dataset(config().table, config().sim, config().collect.episodes, config().collect.steps, rng);
    return fit_model(fragment_dataset(data), config().sim.dt).model;
  }();
  return m;
}

const EnergyModel& energy_model() {
  static const EnergyModel e = [] {
    Rng rng(2);
    EnergyModel m = EnergyModel::initial(InputNorm::for_table(config().table, config().planner.actions),
                                         config().ebm.train.hidden, rng);
    m.net().weights.back().setConstant(0.01);
    return m;
  }();
  return e;
}

const PuckState kPuck{Vec2(0.5, 0.1), Vec2(0.05, -0.02)};

void BM_FilterStep(benchmark::State& state) {
  FilterState f = initialize_filter(Vec2(0.5, 0.1), Vec2(0.52, 0.1), model().dt);
  const MeasurementModel meas = MeasurementModel::position(1e-3);
  for (auto _ : state) {
    FilterState next = update(predict(f, model(), config().table, std::nullopt), Vec2(0.54, 0.1), meas);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_FilterStep);

void BM_Rollout(benchmark::State& state) {
  const double u = static_cast<double>(state.range(0)) / 100.0;
  const PlanningProblem p = config().problem(model());
  const ShotPlan plan = plan_from_angle(p.table, p.arm, p.settings.actions, kPuck, u);
  const StateBelief s0 = apply_mallet_collision(kPuck, plan.mallet(), model());
  for (auto _ : state) benchmark::DoNotOptimize(stochastic_rollout(s0, model(), p.table));
}
BENCHMARK(BM_Rollout)->Arg(0)->Arg(70);

void BM_EvaluateObjective(benchmark::State& state) {
  const PlanningProblem p = config().problem(model());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_objective(p, kPuck, 0.2, config().weights, 3));
}
BENCHMARK(BM_EvaluateObjective);

void BM_BruteForce(benchmark::State& state) {
  const PlanningProblem p = config().problem(model());
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_brute_force(p, kPuck, config().weights, 3, m));
}
BENCHMARK(BM_BruteForce)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MaxSpeed(benchmark::State& state) {
  const PlanarArm arm;
  const VecX q = (VecX(3) << 0.3, 1.1, -0.7).finished();
  const Jacobian jac = jacobian(arm, q);
  const Vec2 e = shooting_direction(0.4);
  for (auto _ : state) benchmark::DoNotOptimize(max_speed(jac, arm.joint_vel_limits, e));
}
BENCHMARK(BM_MaxSpeed);

void BM_Infer(benchmark::State& state) {
  const SamplerSettings& s = config().ebm.sampler;
  Rng rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(infer(energy_model(), kPuck.as_vector(), config().planner.actions, s, rng));
  }
}
BENCHMARK(BM_Infer)->Unit(benchmark::kMillisecond);

void BM_TrainBatch(benchmark::State& state) {
  const std::size_t m = config().planner.candidates;
  const std::size_t batch = config().ebm.train.batch_size;
  const Mlp<float> net = energy_model().net().cast<float>();
  Rng rng(5);
  std::uniform_real_distribution<float> ud(-1.0f, 1.0f);
  Mlp<float>::Matrix x(5, static_cast<Eigen::Index>(batch * m));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = ud(rng);
  const std::vector<std::size_t> pos(batch, 7);
  Mlp<float> grad = net.zeros_like();
  for (auto _ : state) benchmark::DoNotOptimize(infonce_batch<float>(net, x, pos, m, &grad));
}
BENCHMARK(BM_TrainBatch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
