// puckplan: command-line front end for the contact-planning pipeline.
//
//   collect -> fit -> plan-offline -> train -> bench
//
// Every subcommand writes its artifacts and a manifest.json under --out.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "puckplan/config.hpp"
#include "puckplan/io.hpp"
#include "puckplan/svg.hpp"

namespace fs = std::filesystem;
using namespace puckplan;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Sub-streams of --seed, one per stage.
enum Stream : std::uint64_t { kCollect = 1, kSimulate, kPlan, kDataset, kInfer, kBench, kRollout };

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out = "run";
};

struct StateOptions {
  double x = 0.5;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  PuckState state() const {
    PuckState s;
    s.pos = {x, y};
    s.vel = {vx, vy};
    return s;
  }
};

void add_state_options(CLI::App* cmd, StateOptions& s) {
  cmd->add_option("--x", s.x, "puck x [m]")->capture_default_str();
  cmd->add_option("--y", s.y, "puck y [m]")->capture_default_str();
  cmd->add_option("--vx", s.vx, "puck x velocity [m/s]")->capture_default_str();
  cmd->add_option("--vy", s.vy, "puck y velocity [m/s]")->capture_default_str();
}

class RunContext {
 public:
  RunContext(std::string command, const GlobalOptions& opts)
      : command_(std::move(command)), out_(opts.out), workers_(std::max<std::size_t>(1, opts.workers)) {
    if (!opts.config.empty()) config_ = parse_config(read(opts.config), opts.config);
    if (opts.seed) {
      config_.seed = *opts.seed;
      config_.sim.seed = *opts.seed;
      config_.ebm.train.seed = *opts.seed;
    }
  }

  const RunConfig& config() const { return config_; }
  RunConfig& config() { return config_; }
  std::size_t workers() const { return workers_; }
  const fs::path& out() const { return out_; }

  ArtifactMeta meta(const std::string& kind) const { return ArtifactMeta::of(kind, config_); }
  Rng rng(Stream stream) const { return make_rng(config_.seed, {stream}); }

  std::string read(const std::string& path) {
    std::string text = read_file(path);
    inputs_.push_back({path, sha256_hex(text)});
    return text;
  }

  fs::path write(const std::string& name, const std::string& content) {
    const fs::path path = out_ / name;
    write_file(path, content);
    outputs_.push_back({name, sha256_hex(content)});
    return path;
  }

  void finish() const {
    const Manifest m{command_, config_.seed, config_hash(config_), inputs_, outputs_};
    write_file(out_ / "manifest.json", manifest_json(m));
  }

 private:
  std::string command_;
  fs::path out_;
  std::size_t workers_;
  RunConfig config_;
  std::vector<FileDigest> inputs_;
  std::vector<FileDigest> outputs_;
};

PuckModel load_model(RunContext& run, const std::string& path) {
  LoadedModel m = parse_model_json(run.read(path), path);
  check_compatible(m.meta, run.config(), path);
  return m.model;
}

EnergyModel load_energy_model(RunContext& run, const std::string& path) {
  LoadedEnergyModel m = parse_energy_model_json(run.read(path), path);
  check_compatible(m.meta, run.config(), path);
  return m.model;
}

LoadedDataset load_dataset(RunContext& run, const std::string& path) {
  LoadedDataset d = parse_dataset_jsonl(run.read(path), path);
  check_compatible(d.meta, run.config(), path);
  return d;
}

std::vector<double> time_axis(std::size_t n, double dt) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = static_cast<double>(k) * dt;
  return t;
}

// ---------------------------------------------------------------------------

void cmd_simulate(RunContext& run, const StateOptions& state, std::size_t steps, double dropout) {
  const RunConfig& c = run.config();
  Rng rng = run.rng(kSimulate);
  const ObservedTrack track = observe_free_flight(c.table, state.state(), steps, c.sim, rng);
  std::bernoulli_distribution drop(dropout);
  std::vector<std::optional<Vec2>> z;
  for (std::size_t k = 0; k < track.measurements.size(); ++k) {
    if (k >= 2 && drop(rng)) {
      z.emplace_back();
    } else {
      z.emplace_back(track.measurements[k]);
    }
  }
  const auto t = time_axis(track.truth.size(), c.sim.dt);
  run.write("truth.csv", truth_csv(t, track.truth, run.meta("truth")));
  run.write("measurements.csv", measurement_csv(t, z, run.meta("measurements")));
  std::printf("simulated %zu steps\n", track.truth.size());
}

void cmd_collect(RunContext& run) {
  const RunConfig& c = run.config();
  Rng rng = run.rng(kCollect);
  const TrajectoryDataset data = collect_dataset(c.table, c.sim, c.collect.episodes, c.collect.steps, rng);
  run.write("trajectories.csv", trajectory_csv(data, run.meta("trajectories")));
  std::printf("collected %zu episodes, %zu steps\n", data.episodes.size(), data.total_steps());
}

void cmd_fit(RunContext& run, const std::string& data_path) {
  LoadedTrajectories loaded = parse_trajectory_csv(run.read(data_path), data_path);
  check_compatible(loaded.meta, run.config(), data_path);
  const ModeSampleSets sets = fragment_dataset(loaded.data);
  const FitReport fit = fit_model(sets, loaded.data.dt);
  for (const auto& s : fit.skipped) std::fprintf(stderr, "warning: mode %s has no samples, left unfitted\n", s.c_str());
  run.write("model.json", model_json(fit.model, run.meta("model")));
  for (ModeSlot slot : {ModeSlot::Floating, ModeSlot::Wall, ModeSlot::Mallet}) {
    const ModeParams& p = fit.model[slot];
    std::printf("%-8s samples=%zu trace(sigma)=%.3g\n", to_string(slot), p.sample_count, p.sigma.trace());
  }
}

void cmd_filter(RunContext& run, const std::string& model_path, const std::string& meas_path,
                const std::string& mallet_path) {
  const RunConfig& c = run.config();
  const PuckModel model = load_model(run, model_path);
  const MeasurementSeries series = parse_measurement_csv(run.read(meas_path), meas_path);
  if (series.meta) check_compatible(*series.meta, c, meas_path);
  std::vector<std::optional<MalletState>> mallet;
  if (!mallet_path.empty()) {
    for (const auto& m : parse_mallet_csv(run.read(mallet_path), mallet_path)) mallet.emplace_back(m);
  }
  const auto states = run_filter(series.z, mallet, model, c.table, MeasurementModel::position(c.sim.meas_noise_std));
  run.write("estimates.csv", estimate_csv(series.t, states, run.meta("estimates")));
  const Vec4& m = states.back().belief.mean;
  std::printf("final estimate x=%.4f y=%.4f vx=%.4f vy=%.4f\n", m(0), m(1), m(2), m(3));
}

BeliefTrajectory rollout_for(const RunConfig& c, const PuckModel& model, const PuckState& puck,
                             std::optional<double> u, ShotPlan* plan) {
  StateBelief s0;
  if (u) {
    const ShotPlan p = plan_from_angle(c.table, c.arm, c.planner.actions, puck, *u);
    if (!p.feasible()) throw Error(ErrorCode::Unreachable, "no admissible mallet speed for u=" + format_double(*u));
    s0 = apply_mallet_collision(puck, p.mallet(), model);
    if (plan) *plan = p;
  } else {
    s0.mean = puck.as_vector();
    s0.cov = Mat4::Zero();
  }
  return stochastic_rollout(s0, model, c.table, c.planner.max_steps);
}

void cmd_rollout(RunContext& run, const std::string& model_path, const StateOptions& state, std::optional<double> u) {
  const RunConfig& c = run.config();
  const PuckModel model = load_model(run, model_path);
  ShotPlan plan;
  const BeliefTrajectory traj = rollout_for(c, model, state.state(), u, &plan);
  Rng rng = run.rng(kRollout);
  const double g = goal_probability(traj, c.table, c.planner.goal_samples, rng);
  run.write("rollout.csv", rollout_csv(traj, run.meta("rollout")));
  if (u) std::printf("v*=%.3f m/s\n", plan.v_star);
  std::printf("end=%s steps=%zu banks=%d", to_string(traj.end), traj.beliefs.size() - 1, traj.bank_count);
  if (traj.k_goal) {
    std::printf(" k_goal=%zu crossing_y=%.4f trace=%.3g g_hat=%.3f v_puck=%.3f", *traj.k_goal, traj.crossing_y,
                traj.goal_position_trace(), g, puck_speed_at_goal(traj));
  }
  std::printf("\n");
}

void cmd_plan(RunContext& run, const std::string& model_path, const StateOptions& state) {
  const RunConfig& c = run.config();
  const PuckModel model = load_model(run, model_path);
  const PlanningProblem problem = c.problem(model);
  const PuckState puck = state.state();
  Rng rng = run.rng(kPlan);
  const std::uint64_t mc_seed = rng();
  std::vector<CandidateEvaluation> candidates;
  for (double u : candidate_angles(c.planner.actions, c.planner.candidates)) {
    candidates.push_back(evaluate_objective(problem, puck, u, c.weights, mc_seed));
  }
  run.write("candidates.csv", candidates_csv(candidates, run.meta("candidates")));
  try {
    const ScenarioRecord rec = solve_brute_force(problem, puck, c.weights, mc_seed, c.planner.candidates);
    const CandidateEvaluation& best = candidates[rec.pos_index];
    std::printf("u=%.4f v*=%.3f g_hat=%.3f v_puck=%.3f banks=%d J=%.4f\n", best.u, best.plan.v_star, best.eval.g_hat,
                best.eval.v_puck, best.eval.bank_count, best.objective);
  } catch (const NoFeasibleShot& e) {
    std::printf("no feasible shot; best g_hat=%.3f at u=%.4f\n", e.best().eval.g_hat, e.best().u);
  }
}

void cmd_plan_offline(RunContext& run, const std::string& model_path, std::optional<std::size_t> scenarios) {
  const RunConfig& c = run.config();
  const PuckModel model = load_model(run, model_path);
  const std::size_t n = scenarios.value_or(c.ebm.scenarios);
  const auto records = generate_dataset(c.problem(model), c.weights, n, c.planner.candidates,
                                        derive_seed(c.seed, {kDataset}), run.workers());
  run.write("dataset.jsonl", dataset_jsonl(records, c.weights, run.meta("dataset")));
  std::printf("%zu scenarios x %zu candidates\n", records.size(), c.planner.candidates);
}

void cmd_train(RunContext& run, const std::string& dataset_path, bool quiet) {
  const RunConfig& c = run.config();
  const LoadedDataset data = load_dataset(run, dataset_path);
  const InputNorm norm = InputNorm::for_table(c.table, c.planner.actions);
  const TrainResult result = train(data.records, norm, c.ebm.train, [&](std::size_t epoch, double loss) {
    if (!quiet && (epoch + 1) % 50 == 0) std::printf("epoch %4zu  loss %.4f\n", epoch + 1, loss);
  });
  run.write("weights.json", energy_model_json(result.model, run.meta("energy_model")));
  run.write("loss_curve.csv", loss_curve_csv(result, run.meta("loss_curve")));
  std::printf("initial loss %.4f, final loss %.4f\n", result.initial_loss,
              result.loss_curve.empty() ? result.initial_loss : result.loss_curve.back());
}

void cmd_infer(RunContext& run, const std::string& weights_path, const StateOptions& state,
               const std::string& dataset_path, const std::string& model_path) {
  const RunConfig& c = run.config();
  const EnergyModel ebm = load_energy_model(run, weights_path);
  if (dataset_path.empty()) {
    Rng rng = run.rng(kInfer);
    const InferenceResult r = infer(ebm, state.state().as_vector(), c.planner.actions, c.ebm.sampler, rng);
    run.write("inference_trace.csv", inference_trace_csv(r, run.meta("inference_trace")));
    std::printf("u_hat=%.4f energy=%.4f\n", r.u_hat, r.trace.empty() ? 0.0 : r.trace.back().energy);
    return;
  }
  if (model_path.empty()) throw CLI::RequiredError("--model (needed with --dataset)");
  const PuckModel model = load_model(run, model_path);
  const LoadedDataset data = load_dataset(run, dataset_path);
  const RegretStats s = compare_planners(data.records, c.problem(model), data.weights, ebm, c.ebm.sampler,
                                         derive_seed(c.seed, {kInfer}), run.workers());
  std::ostringstream csv;
  csv << "scenario,regret\n";
  for (std::size_t i = 0; i < s.regrets.size(); ++i) csv << i << ',' << format_double(s.regrets[i]) << '\n';
  run.write("regret.csv", csv.str());
  std::printf("regret over %zu scenarios: mean %.4f median %.4f p90 %.4f max %.4f, within 5%%: %.1f%%\n",
              s.regrets.size(), s.mean, s.median, s.p90, s.max, 100.0 * s.fraction_within(0.05));
}

EvalReport run_bench(RunContext& run, const PuckModel& model, const std::string& weights_path) {
  const RunConfig& c = run.config();
  std::shared_ptr<const EnergyModel> shared;
  std::vector<PolicyInstance> policies;
  for (const auto& spec : c.harness.policies) {
    PolicyInstance p{spec.name, spec.weights, spec.planner, {}};
    if (spec.planner == PlannerKind::Ebm) {
      if (!spec.weights_file.empty()) {
        p.ebm = std::make_shared<const EnergyModel>(load_energy_model(run, spec.weights_file));
      } else {
        if (weights_path.empty()) throw Error(ErrorCode::InvalidArgument, "policy " + spec.name + " needs --weights");
        if (!shared) shared = std::make_shared<const EnergyModel>(load_energy_model(run, weights_path));
        p.ebm = shared;
      }
    }
    policies.push_back(std::move(p));
  }
  HarnessSettings hs;
  hs.grid = c.harness.grid;
  hs.sim = c.sim;
  hs.sampler = c.ebm.sampler;
  hs.exec_noise = c.harness.exec_noise;
  hs.seed = derive_seed(c.seed, {kBench});
  hs.workers = run.workers();
  EvalReport report = run_eval(policies, c.problem(model), hs);

  run.write("report.json", report_json(report, run.meta("report"), c.seed));
  run.write("shots.csv", shots_csv(report, run.meta("shots")));
  const std::string table = summary_table(report);
  run.write("summary.txt", table);
  run.write("scores.svg", svg_score_bars(report));
  for (std::size_t i = 0; i < report.policies.size(); ++i) {
    run.write("shots_" + report.policies[i].name + ".svg", svg_shot_fan(c.table, report, i));
  }
  std::fputs(table.c_str(), stdout);
  return report;
}

void cmd_bench(RunContext& run, const std::string& model_path, const std::string& weights_path) {
  const PuckModel model = load_model(run, model_path);
  run_bench(run, model, weights_path);
}

std::vector<double> parse_angle_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--u", "not a number: '" + tok + "'");
    }
  }
  return out;
}

void cmd_plot(RunContext& run, const std::string& model_path, const std::string& weights_path,
              const std::string& loss_path, const StateOptions& state, const std::string& angles) {
  const RunConfig& c = run.config();
  if (model_path.empty() && weights_path.empty() && loss_path.empty()) {
    throw CLI::RequiredError("one of --model, --weights, --loss");
  }
  if (!model_path.empty()) {
    const PuckModel model = load_model(run, model_path);
    std::vector<BeliefTrajectory> rollouts;
    const auto us = parse_angle_list(angles);
    if (us.empty()) rollouts.push_back(rollout_for(c, model, state.state(), std::nullopt, nullptr));
    for (double u : us) rollouts.push_back(rollout_for(c, model, state.state(), u, nullptr));
    run.write("rollout.svg", svg_rollout(c.table, rollouts));
  }
  if (!weights_path.empty()) {
    const EnergyModel ebm = load_energy_model(run, weights_path);
    const Vec4 s = state.state().as_vector();
    const std::vector<double> grid = candidate_angles(c.planner.actions, 400);
    Rng rng = run.rng(kInfer);
    const InferenceResult r = infer(ebm, s, c.planner.actions, c.ebm.sampler, rng);
    // Replay the sampler for the particle strips.
    Rng replay = run.rng(kInfer);
    std::vector<ParticleSnapshot> snaps;
    SamplerState st = sampler_init(c.planner.actions, c.ebm.sampler, replay);
    snaps.push_back({0, st.particles});
    for (std::size_t j = 1; j <= c.ebm.sampler.iterations; ++j) {
      st = sampler_step(ebm, s, st, c.planner.actions, c.ebm.sampler, replay).state;
      if (j == 1 || j == 5 || j == c.ebm.sampler.iterations) snaps.push_back({j, st.particles});
    }
    run.write("energy.svg", svg_energy_landscape(grid, ebm.energies(s, grid), snaps, r.u_hat));
  }
  if (!loss_path.empty()) run.write("loss.svg", svg_loss_curve(parse_loss_curve_csv(run.read(loss_path), loss_path)));
}

void cmd_demo(RunContext& run, bool quick) {
  RunConfig& c = run.config();
  if (quick) {
    c.ebm.scenarios = std::min<std::size_t>(c.ebm.scenarios, 300);
    c.ebm.train.epochs = std::min<std::size_t>(c.ebm.train.epochs, 100);
    c.harness.grid.reps = 1;
  }
  bool has_ebm = false;
  for (const auto& p : c.harness.policies) has_ebm = has_ebm || p.planner == PlannerKind::Ebm;
  if (!has_ebm) c.harness.policies.push_back({"ebm_" + c.harness.policies.front().name, c.weights, PlannerKind::Ebm, {}});

  std::printf("[1/5] collect\n");
  Rng rng = run.rng(kCollect);
  const TrajectoryDataset data = collect_dataset(c.table, c.sim, c.collect.episodes, c.collect.steps, rng);
  run.write("trajectories.csv", trajectory_csv(data, run.meta("trajectories")));

  std::printf("[2/5] fit\n");
  const FitReport fit = fit_model(fragment_dataset(data), data.dt);
  run.write("model.json", model_json(fit.model, run.meta("model")));

  std::printf("[3/5] plan-offline (%zu scenarios)\n", c.ebm.scenarios);
  const auto records = generate_dataset(c.problem(fit.model), c.weights, c.ebm.scenarios, c.planner.candidates,
                                        derive_seed(c.seed, {kDataset}), run.workers());
  run.write("dataset.jsonl", dataset_jsonl(records, c.weights, run.meta("dataset")));

  std::printf("[4/5] train (%zu epochs)\n", c.ebm.train.epochs);
  const TrainResult result = train(records, InputNorm::for_table(c.table, c.planner.actions), c.ebm.train);
  const fs::path weights = run.write("weights.json", energy_model_json(result.model, run.meta("energy_model")));
  run.write("loss_curve.csv", loss_curve_csv(result, run.meta("loss_curve")));
  run.write("loss.svg", svg_loss_curve(result.loss_curve));
  std::printf("      loss %.4f -> %.4f\n", result.initial_loss, result.loss_curve.back());

  std::printf("[5/5] bench\n");
  run_bench(run, fit.model, weights.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-mode puck prediction and chance-constrained shot planning", "puckplan"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "puckplan 0.1.0");

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "global seed (overrides the config)");
  app.add_option("--workers", g.workers, "parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", g.out, "run directory")->capture_default_str();
  app.fallthrough();

  StateOptions state;
  std::string model, data, weights, dataset, meas, mallet, loss, angles;
  std::optional<double> u;
  std::optional<std::size_t> scenarios;
  std::size_t steps = 60;
  double dropout = 0.0;
  bool quiet = false, quick = false;

  auto* simulate = app.add_subcommand("simulate", "free flight from a state; writes truth.csv and measurements.csv");
  add_state_options(simulate, state);
  simulate->add_option("--steps", steps, "time steps")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--dropout", dropout, "probability of a missing frame")->check(CLI::Range(0.0, 1.0));

  app.add_subcommand("collect", "ground-truth trajectories for identification; writes trajectories.csv");

  auto* fit = app.add_subcommand("fit", "identify the contact-mode model; writes model.json");
  fit->add_option("--data", data, "trajectories.csv")->required()->check(CLI::ExistingFile);

  auto* filter = app.add_subcommand("filter", "piecewise Kalman filter over measurements; writes estimates.csv");
  filter->add_option("--model", model, "model.json")->required()->check(CLI::ExistingFile);
  filter->add_option("--measurements", meas, "measurements.csv")->required()->check(CLI::ExistingFile);
  filter->add_option("--mallet", mallet, "mallet track CSV (t,mx,my,mvx,mvy)")->check(CLI::ExistingFile);

  auto* rollout = app.add_subcommand("rollout", "belief rollout of a state or a planned shot; writes rollout.csv");
  rollout->add_option("--model", model, "model.json")->required()->check(CLI::ExistingFile);
  add_state_options(rollout, state);
  rollout->add_option("--u", u, "shooting angle [rad]; without it the state rolls freely");

  auto* plan = app.add_subcommand("plan", "brute-force shot planning for one state; writes candidates.csv");
  plan->add_option("--model", model, "model.json")->required()->check(CLI::ExistingFile);
  add_state_options(plan, state);

  auto* offline = app.add_subcommand("plan-offline", "brute-force scenario dataset; writes dataset.jsonl");
  offline->add_option("--model", model, "model.json")->required()->check(CLI::ExistingFile);
  offline->add_option("--scenarios", scenarios, "number of scenarios (default: ebm.scenarios)");

  auto* trn = app.add_subcommand("train", "InfoNCE training; writes weights.json and loss_curve.csv");
  trn->add_option("--dataset", dataset, "dataset.jsonl")->required()->check(CLI::ExistingFile);
  trn->add_flag("--quiet", quiet, "no per-epoch output");

  auto* inf = app.add_subcommand("infer", "sampler inference for one state, or regret over a dataset");
  inf->add_option("--weights", weights, "weights.json")->required()->check(CLI::ExistingFile);
  add_state_options(inf, state);
  inf->add_option("--dataset", dataset, "dataset.jsonl for regret against the brute-force optimum")
      ->check(CLI::ExistingFile);
  inf->add_option("--model", model, "model.json, required with --dataset")->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "seeded shot evaluation of the configured policies");
  bench->add_option("--model", model, "model.json")->required()->check(CLI::ExistingFile);
  bench->add_option("--weights", weights, "weights.json for ebm policies")->check(CLI::ExistingFile);

  auto* plot = app.add_subcommand("plot", "SVG figures: rollout.svg, energy.svg, loss.svg");
  plot->add_option("--model", model, "model.json; rollout of the state for each --u")->check(CLI::ExistingFile);
  plot->add_option("--weights", weights, "weights.json; energy landscape at the state")->check(CLI::ExistingFile);
  plot->add_option("--loss", loss, "loss_curve.csv")->check(CLI::ExistingFile);
  plot->add_option("--u", angles, "comma separated shooting angles [rad]");
  add_state_options(plot, state);

  auto* demo = app.add_subcommand("demo", "collect -> fit -> plan-offline -> train -> bench in one run directory");
  demo->add_flag("--quick", quick, "300 scenarios, 100 epochs, one shot per grid cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc != 0) {
      const auto subs = app.get_subcommands();
      std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    }
    return rc == 0 ? 0 : kUsageError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    RunContext run(cmd->get_name(), g);
    const std::string name = cmd->get_name();
    if (name == "simulate") {
      cmd_simulate(run, state, steps, dropout);
    } else if (name == "collect") {
      cmd_collect(run);
    } else if (name == "fit") {
      cmd_fit(run, data);
    } else if (name == "filter") {
      cmd_filter(run, model, meas, mallet);
    } else if (name == "rollout") {
      cmd_rollout(run, model, state, u);
    } else if (name == "plan") {
      cmd_plan(run, model, state);
    } else if (name == "plan-offline") {
      cmd_plan_offline(run, model, scenarios);
    } else if (name == "train") {
      cmd_train(run, dataset, quiet);
    } else if (name == "infer") {
      cmd_infer(run, weights, state, dataset, model);
    } else if (name == "bench") {
      cmd_bench(run, model, weights);
    } else if (name == "plot") {
      cmd_plot(run, model, weights, loss, state, angles);
    } else if (name == "demo") {
      cmd_demo(run, quick);
    }
    run.finish();
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n" << cmd->help();
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
