#include "puckplan/config.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace puckplan {

using detail::json;
using detail::ObjectReader;

RunConfig::RunConfig() {
  for (const auto& p : reference_policies()) harness.policies.push_back({p.name, p.weights, p.planner, {}});
}

void RunConfig::validate() const {
  table.validate();
  sim.validate();
  arm.validate();
  weights.validate();
  planner.validate();
  if (collect.episodes == 0 || collect.steps < 2) throw Error(ErrorCode::InvalidArgument, "sim: episodes must be > 0 and steps >= 2");
  if (ebm.scenarios == 0) throw Error(ErrorCode::InvalidArgument, "ebm: scenarios must be > 0");
  ebm.train.validate();
  ebm.sampler.validate();
  harness.grid.validate(table);
  for (std::size_t i = 0; i < harness.policies.size(); ++i) {
    const auto& p = harness.policies[i];
    if (p.name.empty()) throw Error(ErrorCode::InvalidArgument, "harness.policies: empty name");
    p.weights.validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (harness.policies[j].name == p.name) throw Error(ErrorCode::InvalidArgument, "harness.policies: duplicate name " + p.name);
    }
  }
}

PlanningProblem RunConfig::problem(const PuckModel& model) const { return {table, model, arm, planner}; }

namespace {

SocWeights read_weights(ObjectReader& r) {
  SocWeights w;
  r.opt("lambda1", w.lambda1);
  r.opt("lambda2", w.lambda2);
  r.opt("beta", w.beta);
  return w;
}

void read_sim(const json& j, RunConfig& c) {
  ObjectReader r(j, "sim");
  SimConfig& s = c.sim;
  r.opt("dt", s.dt);
  r.opt("damping", s.damping);
  r.opt("wall_restitution", s.wall_restitution);
  r.opt("wall_tangent_friction", s.wall_tangent_friction);
  r.opt("mallet_restitution", s.mallet_restitution);
  r.opt("vel_noise_std", s.vel_noise_std);
  r.opt("wall_noise_std", s.wall_noise_std);
  r.opt("mallet_noise_std", s.mallet_noise_std);
  r.opt("meas_noise_std", s.meas_noise_std);
  r.opt("exec_noise_angle", s.exec_noise_angle);
  r.opt("exec_noise_speed", s.exec_noise_speed);
  r.opt("episodes", c.collect.episodes);
  r.opt("steps", c.collect.steps);
  r.finish();
}

void read_arm(const json& j, PlanarArm& arm) {
  ObjectReader r(j, "arm");
  r.opt("link_lengths", arm.link_lengths);
  std::vector<double> base;
  if (r.opt("base", base)) {
    if (base.size() != 2) throw Error(ErrorCode::Format, "arm.base: expected [x, y]");
    arm.base = {base[0], base[1]};
  }
  std::vector<double> limits_deg;
  if (r.opt("joint_vel_limits_deg", limits_deg)) {
    arm.joint_vel_limits.clear();
    for (double d : limits_deg) arm.joint_vel_limits.push_back(d * PlanarArm::kDegToRad);
  }
  r.finish();
}

void read_planner(const json& j, RunConfig& c) {
  ObjectReader r(j, "planner");
  c.weights = read_weights(r);
  r.opt("u_min", c.planner.actions.u_min);
  r.opt("u_max", c.planner.actions.u_max);
  r.opt("goal_samples", c.planner.goal_samples);
  r.opt("max_steps", c.planner.max_steps);
  r.opt("candidates", c.planner.candidates);
  r.finish();
}

void read_ebm(const json& j, EbmSettings& e) {
  ObjectReader r(j, "ebm");
  r.opt("scenarios", e.scenarios);
  r.opt("hidden", e.train.hidden);
  r.opt("epochs", e.train.epochs);
  r.opt("learning_rate", e.train.learning_rate);
  r.opt("decay_every", e.train.decay_every);
  r.opt("decay_factor", e.train.decay_factor);
  r.opt("batch_size", e.train.batch_size);
  r.opt("particles", e.sampler.particles);
  r.opt("sigma_init", e.sampler.sigma_init);
  r.opt("gamma", e.sampler.gamma);
  r.opt("sigma_min", e.sampler.sigma_min);
  r.opt("iterations", e.sampler.iterations);
  r.finish();
}

void read_harness(const json& j, HarnessConfig& h) {
  ObjectReader r(j, "harness");
  GridSpec& g = h.grid;
  r.opt("x_min", g.x_min);
  r.opt("x_max", g.x_max);
  r.opt("y_min", g.y_min);
  r.opt("y_max", g.y_max);
  r.opt("nx", g.nx);
  r.opt("ny", g.ny);
  r.opt("reps", g.reps);
  r.opt("drift", g.drift);
  r.opt("observe_steps", g.observe_steps);
  r.opt("exec_noise", h.exec_noise);
  if (const json* list = r.child("policies")) {
    if (!list->is_array()) throw Error(ErrorCode::Format, "harness.policies: expected an array");
    h.policies.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      ObjectReader p((*list)[i], "harness.policies[" + std::to_string(i) + "]");
      PolicySpec spec;
      spec.name = p.req<std::string>("name");
      spec.weights = read_weights(p);
      std::string planner = "brute_force";
      p.opt("planner", planner);
      spec.planner = planner_kind_from_string(planner);
      p.opt("weights_file", spec.weights_file);
      p.finish();
      h.policies.push_back(std::move(spec));
    }
  }
  r.finish();
}

json weights_json(const SocWeights& w) { return {{"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"beta", w.beta}}; }

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, source + ": " + e.what());
  }
  RunConfig c;
  try {
    ObjectReader r(j, "");
    r.opt("seed", c.seed);
    if (const json* t = r.child("table")) c.table = detail::table_from_json(*t, "table");
    if (const json* s = r.child("sim")) read_sim(*s, c);
    if (const json* a = r.child("arm")) read_arm(*a, c.arm);
    if (const json* p = r.child("planner")) read_planner(*p, c);
    if (const json* e = r.child("ebm")) read_ebm(*e, c.ebm);
    if (const json* h = r.child("harness")) read_harness(*h, c.harness);
    r.finish();
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.what());
  }
  c.sim.seed = c.seed;
  c.ebm.train.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string dump_config(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["table"] = detail::table_to_json(c.table);
  const SimConfig& s = c.sim;
  j["sim"] = {{"dt", s.dt},
              {"damping", s.damping},
              {"wall_restitution", s.wall_restitution},
              {"wall_tangent_friction", s.wall_tangent_friction},
              {"mallet_restitution", s.mallet_restitution},
              {"vel_noise_std", s.vel_noise_std},
              {"wall_noise_std", s.wall_noise_std},
              {"mallet_noise_std", s.mallet_noise_std},
              {"meas_noise_std", s.meas_noise_std},
              {"exec_noise_angle", s.exec_noise_angle},
              {"exec_noise_speed", s.exec_noise_speed},
              {"episodes", c.collect.episodes},
              {"steps", c.collect.steps}};
  std::vector<double> limits_deg;
  for (double l : c.arm.joint_vel_limits) limits_deg.push_back(l / PlanarArm::kDegToRad);
  j["arm"] = {{"link_lengths", c.arm.link_lengths},
              {"base", {c.arm.base.x(), c.arm.base.y()}},
              {"joint_vel_limits_deg", limits_deg}};
  j["planner"] = weights_json(c.weights);
  j["planner"]["u_min"] = c.planner.actions.u_min;
  j["planner"]["u_max"] = c.planner.actions.u_max;
  j["planner"]["goal_samples"] = c.planner.goal_samples;
  j["planner"]["max_steps"] = c.planner.max_steps;
  j["planner"]["candidates"] = c.planner.candidates;
  const EbmSettings& e = c.ebm;
  j["ebm"] = {{"scenarios", e.scenarios},
              {"hidden", e.train.hidden},
              {"epochs", e.train.epochs},
              {"learning_rate", e.train.learning_rate},
              {"decay_every", e.train.decay_every},
              {"decay_factor", e.train.decay_factor},
              {"batch_size", e.train.batch_size},
              {"particles", e.sampler.particles},
              {"sigma_init", e.sampler.sigma_init},
              {"gamma", e.sampler.gamma},
              {"sigma_min", e.sampler.sigma_min},
              {"iterations", e.sampler.iterations}};
  const GridSpec& g = c.harness.grid;
  json policies = json::array();
  for (const auto& p : c.harness.policies) {
    json pj = weights_json(p.weights);
    pj["name"] = p.name;
    pj["planner"] = to_string(p.planner);
    if (!p.weights_file.empty()) pj["weights_file"] = p.weights_file;
    policies.push_back(std::move(pj));
  }
  j["harness"] = {{"x_min", g.x_min},   {"x_max", g.x_max},     {"y_min", g.y_min},
                  {"y_max", g.y_max},   {"nx", g.nx},           {"ny", g.ny},
                  {"reps", g.reps},     {"drift", g.drift},     {"observe_steps", g.observe_steps},
                  {"exec_noise", c.harness.exec_noise},         {"policies", policies}};
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& config) { return detail::sha256_hex_impl(dump_config(config)); }

}  // namespace puckplan
