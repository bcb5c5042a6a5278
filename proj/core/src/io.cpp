#include "puckplan/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace puckplan {

using detail::json;
using detail::ObjectReader;

namespace detail {

std::string sha256_hex_impl(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace detail

std::string sha256_hex(const std::string& bytes) { return detail::sha256_hex_impl(bytes); }

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

json meta_to_json(const ArtifactMeta& m) {
  return {{"kind", m.kind}, {"config_hash", m.config_hash}, {"dt", m.dt}, {"table", detail::table_to_json(m.table)}};
}

ArtifactMeta meta_from_json(const json& j, const std::string& source) {
  ArtifactMeta m;
  ObjectReader r(j, source + ":meta");
  m.kind = r.req<std::string>("kind");
  m.config_hash = r.req<std::string>("config_hash");
  m.dt = r.req<double>("dt");
  m.table = detail::table_from_json(r.req_child("table"), source + ":meta.table");
  r.child("counts");
  r.child("weights");
  r.child("m");
  r.finish();
  return m;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, source + ": " + e.what());
  }
}

void expect_kind(const ArtifactMeta& m, const std::string& kind, const std::string& source) {
  if (m.kind != kind) throw Error(ErrorCode::Mismatch, source + ": expected a " + kind + " artifact, found " + m.kind);
}

std::string comment_line(const ArtifactMeta& meta) { return "# " + meta_to_json(meta).dump() + "\n"; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) throw Error(ErrorCode::Format, where + ": not a number '" + s + "'");
  return v;
}

/// Splits a CSV into the meta comment and data rows, checking the header.
struct CsvTable {
  std::optional<ArtifactMeta> meta;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::string& text, const std::string& source, const std::string& header, bool need_meta) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  bool header_seen = false;
  const std::size_t cols = split(header, ',').size();
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!t.meta && !header_seen) {
        const std::string body = line.substr(1);
        if (body.find('{') != std::string::npos) t.meta = meta_from_json(parse_json(body, source), source);
      }
      continue;
    }
    if (!header_seen) {
      if (line != header) throw Error(ErrorCode::Format, source + ":" + std::to_string(n) + ": expected header '" + header + "'");
      header_seen = true;
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != cols) {
      throw Error(ErrorCode::Format, source + ":" + std::to_string(n) + ": expected " + std::to_string(cols) + " fields");
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(n);
  }
  if (!header_seen) throw Error(ErrorCode::Format, source + ": missing header '" + header + "'");
  if (need_meta && !t.meta) throw Error(ErrorCode::Format, source + ": missing '# {meta}' comment line");
  return t;
}

std::string where(const std::string& source, const CsvTable& t, std::size_t row) {
  return source + ":" + std::to_string(t.line_numbers[row]);
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
}

constexpr const char* kTrajectoryHeader = "t,px,py,pvx,pvy,mx,my,mvx,mvy,mode";

}  // namespace

ArtifactMeta ArtifactMeta::of(const std::string& kind, const RunConfig& config) {
  return {kind, puckplan::config_hash(config), config.sim.dt, config.table};
}

void check_compatible(const ArtifactMeta& meta, const RunConfig& config, const std::string& source) {
  if (meta.dt != config.sim.dt) {
    throw Error(ErrorCode::Mismatch, source + ": dt " + format_double(meta.dt) + " does not match config dt " +
                                         format_double(config.sim.dt));
  }
  if (!(meta.table == config.table)) throw Error(ErrorCode::Mismatch, source + ": table geometry does not match the config");
}

std::string trajectory_csv(const TrajectoryDataset& data, const ArtifactMeta& meta) {
  std::string out = comment_line(meta);
  out += kTrajectoryHeader;
  out += '\n';
  for (const auto& ep : data.episodes) {
    for (const auto& s : ep) {
      append_row(out, {s.t, s.puck.pos.x(), s.puck.pos.y(), s.puck.vel.x(), s.puck.vel.y(), s.mallet.pos.x(),
                       s.mallet.pos.y(), s.mallet.vel.x(), s.mallet.vel.y()});
      out += ',' + to_string(s.mode) + '\n';
    }
  }
  return out;
}

LoadedTrajectories parse_trajectory_csv(const std::string& text, const std::string& source) {
  const CsvTable t = read_csv(text, source, kTrajectoryHeader, true);
  LoadedTrajectories out;
  out.meta = *t.meta;
  expect_kind(out.meta, "trajectories", source);
  out.data.dt = out.meta.dt;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    const std::string w = where(source, t, i);
    double v[9];
    for (int k = 0; k < 9; ++k) v[k] = parse_double(f[static_cast<std::size_t>(k)], w);
    TrajectoryStep s;
    s.t = v[0];
    s.puck = {{v[1], v[2]}, {v[3], v[4]}};
    s.mallet = {{v[5], v[6]}, {v[7], v[8]}};
    try {
      s.mode = mode_from_string(f[9]);
    } catch (const Error& e) {
      throw Error(ErrorCode::Format, w + ": " + e.what());
    }
    if (s.t == 0.0 || out.data.episodes.empty()) out.data.episodes.emplace_back();
    out.data.episodes.back().push_back(s);
  }
  return out;
}

std::string model_json(const PuckModel& model, const ArtifactMeta& meta) {
  json modes;
  json counts;
  for (ModeSlot slot : kAllSlots) {
    const ModeParams& p = model[slot];
    counts[to_string(slot)] = p.sample_count;
    if (!p.fitted) continue;
    json m = {{"theta_mat", detail::matrix_to_json(p.theta_mat)},
              {"theta_vec", detail::vector_to_json(p.theta_vec)},
              {"sigma", detail::matrix_to_json(p.sigma)}};
    if (slot == ModeSlot::Mallet) m["theta_mat_mallet"] = detail::matrix_to_json(p.theta_mat_mallet);
    modes[to_string(slot)] = std::move(m);
  }
  json meta_j = meta_to_json(meta);
  meta_j["counts"] = counts;
  const json j = {{"dt", model.dt}, {"modes", modes}, {"meta", meta_j}};
  return j.dump(2) + "\n";
}

LoadedModel parse_model_json(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  LoadedModel out;
  ObjectReader r(j, source);
  out.model.dt = r.req<double>("dt");
  const json& meta_j = r.req_child("meta");
  out.meta = meta_from_json(meta_j, source);
  expect_kind(out.meta, "model", source);
  std::map<std::string, std::size_t> counts;
  if (meta_j.contains("counts")) counts = meta_j["counts"].get<std::map<std::string, std::size_t>>();
  ObjectReader modes(r.req_child("modes"), source + ":modes");
  for (ModeSlot slot : kAllSlots) {
    const std::string name = to_string(slot);
    const json* m = modes.child(name);
    if (!m) continue;
    const std::string path = source + ":modes." + name;
    ObjectReader mr(*m, path);
    ModeParams& p = out.model[slot];
    p.theta_mat = detail::matrix_from_json(mr.req_child("theta_mat"), path + ".theta_mat", 2, 2);
    p.theta_vec = detail::vector_from_json(mr.req_child("theta_vec"), path + ".theta_vec", 2);
    p.sigma = detail::matrix_from_json(mr.req_child("sigma"), path + ".sigma", 2, 2);
    if (const json* tm = mr.child("theta_mat_mallet")) {
      p.theta_mat_mallet = detail::matrix_from_json(*tm, path + ".theta_mat_mallet", 2, 2);
    } else if (slot == ModeSlot::Mallet) {
      throw Error(ErrorCode::Format, path + ".theta_mat_mallet: missing");
    }
    mr.finish();
    if (!is_psd(MatX(p.sigma))) throw Error(ErrorCode::Format, path + ".sigma: not positive semidefinite");
    p.fitted = true;
    p.sample_count = counts.count(name) ? counts[name] : 0;
  }
  modes.finish();
  r.finish();
  if (out.model.dt != out.meta.dt) throw Error(ErrorCode::Mismatch, source + ": model dt differs from meta dt");
  return out;
}

std::string dataset_jsonl(const std::vector<ScenarioRecord>& records, const SocWeights& weights,
                          const ArtifactMeta& meta) {
  json meta_j = meta_to_json(meta);
  meta_j["weights"] = {{"lambda1", weights.lambda1}, {"lambda2", weights.lambda2}, {"beta", weights.beta}};
  meta_j["m"] = records.empty() ? 0 : records.front().angles.size();
  std::string out = json{{"meta", meta_j}}.dump() + "\n";
  for (const auto& r : records) {
    const json line = {{"s", detail::vector_to_json(r.state)},
                       {"u_pos", r.u_pos},
                       {"pos_index", r.pos_index},
                       {"mc_seed", r.mc_seed},
                       {"u_neg", r.negatives()},
                       {"objective", r.objectives},
                       {"g_hat", r.g_hats},
                       {"v_puck", r.v_pucks}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

LoadedDataset parse_dataset_jsonl(const std::string& text, const std::string& source) {
  LoadedDataset out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const std::string w = source + ":" + std::to_string(n);
    const json j = parse_json(line, w);
    if (!have_meta) {
      ObjectReader r(j, w);
      const json& meta_j = r.req_child("meta");
      r.finish();
      out.meta = meta_from_json(meta_j, w);
      expect_kind(out.meta, "dataset", w);
      if (meta_j.contains("weights")) {
        ObjectReader wr(meta_j["weights"], w + ":meta.weights");
        wr.opt("lambda1", out.weights.lambda1);
        wr.opt("lambda2", out.weights.lambda2);
        wr.opt("beta", out.weights.beta);
        wr.finish();
      }
      have_meta = true;
      continue;
    }
    ObjectReader r(j, w);
    ScenarioRecord rec;
    rec.state = detail::vector_from_json(r.req_child("s"), w + ".s", 4);
    rec.u_pos = r.req<double>("u_pos");
    rec.pos_index = r.req<std::size_t>("pos_index");
    rec.mc_seed = r.req<std::uint64_t>("mc_seed");
    const auto neg = r.req<std::vector<double>>("u_neg");
    rec.objectives = r.req<std::vector<double>>("objective");
    rec.g_hats = r.req<std::vector<double>>("g_hat");
    rec.v_pucks = r.req<std::vector<double>>("v_puck");
    r.finish();
    const std::size_t m = neg.size() + 1;
    if (rec.pos_index >= m || rec.objectives.size() != m || rec.g_hats.size() != m || rec.v_pucks.size() != m) {
      throw Error(ErrorCode::Format, w + ": inconsistent candidate lists");
    }
    rec.angles = neg;
    rec.angles.insert(rec.angles.begin() + static_cast<std::ptrdiff_t>(rec.pos_index), rec.u_pos);
    out.records.push_back(std::move(rec));
  }
  if (!have_meta) throw Error(ErrorCode::Format, source + ": empty dataset");
  return out;
}

std::string energy_model_json(const EnergyModel& model, const ArtifactMeta& meta) {
  const InputNorm& n = model.norm();
  json layers = json::array();
  const auto& net = model.net();
  for (std::size_t l = 0; l < net.layers(); ++l) {
    layers.push_back({{"w", detail::matrix_to_json(net.weights[l])}, {"b", detail::vector_to_json(net.biases[l])}});
  }
  const json j = {{"norm",
                   {{"center", detail::vector_to_json(n.center)},
                    {"scale", detail::vector_to_json(n.scale)},
                    {"u_center", n.u_center},
                    {"u_scale", n.u_scale}}},
                  {"activation", "tanh"},
                  {"layers", layers},
                  {"meta", meta_to_json(meta)}};
  return j.dump() + "\n";
}

LoadedEnergyModel parse_energy_model_json(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  ObjectReader r(j, source);
  LoadedEnergyModel out;
  out.meta = meta_from_json(r.req_child("meta"), source);
  expect_kind(out.meta, "energy_model", source);
  if (r.req<std::string>("activation") != "tanh") throw Error(ErrorCode::Format, source + ".activation: only tanh is supported");
  ObjectReader nr(r.req_child("norm"), source + ".norm");
  InputNorm norm;
  norm.center = detail::vector_from_json(nr.req_child("center"), source + ".norm.center", 4);
  norm.scale = detail::vector_from_json(nr.req_child("scale"), source + ".norm.scale", 4);
  norm.u_center = nr.req<double>("u_center");
  norm.u_scale = nr.req<double>("u_scale");
  nr.finish();
  Mlp<double> net;
  const json& layers = r.req_child("layers");
  if (!layers.is_array() || layers.empty()) throw Error(ErrorCode::Format, source + ".layers: expected a non-empty array");
  Eigen::Index in = 5;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string path = source + ".layers[" + std::to_string(l) + "]";
    ObjectReader lr(layers[l], path);
    MatX w = detail::matrix_from_json(lr.req_child("w"), path + ".w", -1, in);
    VecX b = detail::vector_from_json(lr.req_child("b"), path + ".b", w.rows());
    lr.finish();
    in = w.rows();
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  if (in != 1) throw Error(ErrorCode::Format, source + ".layers: last layer must have one output");
  r.finish();
  out.model = EnergyModel(norm, std::move(net));
  return out;
}

std::string measurement_csv(const std::vector<double>& t, const std::vector<std::optional<Vec2>>& z,
                            const ArtifactMeta& meta) {
  std::string out = comment_line(meta) + "t,x,y\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += format_double(t[i]);
    out += z[i] ? "," + format_double(z[i]->x()) + "," + format_double(z[i]->y()) : std::string(",,");
    out += '\n';
  }
  return out;
}

MeasurementSeries parse_measurement_csv(const std::string& text, const std::string& source) {
  const CsvTable t = read_csv(text, source, "t,x,y", false);
  MeasurementSeries out;
  out.meta = t.meta;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    const std::string w = where(source, t, i);
    out.t.push_back(parse_double(f[0], w));
    if (f[1].empty() && f[2].empty()) {
      out.z.emplace_back();
    } else {
      out.z.emplace_back(Vec2(parse_double(f[1], w), parse_double(f[2], w)));
    }
  }
  return out;
}

std::vector<MalletState> parse_mallet_csv(const std::string& text, const std::string& source) {
  const CsvTable t = read_csv(text, source, "t,mx,my,mvx,mvy", false);
  std::vector<MalletState> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    const std::string w = where(source, t, i);
    out.push_back({{parse_double(f[1], w), parse_double(f[2], w)}, {parse_double(f[3], w), parse_double(f[4], w)}});
  }
  return out;
}

std::string truth_csv(const std::vector<double>& t, const std::vector<PuckState>& states, const ArtifactMeta& meta) {
  if (t.size() != states.size()) throw Error(ErrorCode::InvalidArgument, "truth_csv: length mismatch");
  std::string out = comment_line(meta) + "t,x,y,vx,vy\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const PuckState& p = states[i];
    append_row(out, {t[i], p.pos.x(), p.pos.y(), p.vel.x(), p.vel.y()});
    out += '\n';
  }
  return out;
}

std::string estimate_csv(const std::vector<double>& t, const std::vector<FilterState>& states,
                         const ArtifactMeta& meta) {
  std::string out = comment_line(meta) + "t,x,y,vx,vy,trace_p\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Vec4& m = states[i].belief.mean;
    append_row(out, {t[i], m(0), m(1), m(2), m(3), states[i].belief.cov.trace()});
    out += '\n';
  }
  return out;
}

std::string rollout_csv(const BeliefTrajectory& traj, const ArtifactMeta& meta) {
  std::string out = comment_line(meta) + "k,x,y,vx,vy,var_x,var_y,var_vx,var_vy,mode\n";
  for (std::size_t k = 0; k < traj.beliefs.size(); ++k) {
    const auto& b = traj.beliefs[k];
    append_row(out, {double(k), b.mean(0), b.mean(1), b.mean(2), b.mean(3), b.cov(0, 0), b.cov(1, 1), b.cov(2, 2),
                     b.cov(3, 3)});
    out += ',';
    out += k < traj.modes.size() ? to_string(traj.modes[k]) : std::string("end");
    out += '\n';
  }
  return out;
}

std::string candidates_csv(const std::vector<CandidateEvaluation>& candidates, const ArtifactMeta& meta) {
  std::string out = comment_line(meta) + "k,u,g_hat,v_puck,banks,feasible,objective\n";
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    append_row(out, {double(k), c.u, c.eval.g_hat, c.eval.v_puck, double(c.eval.bank_count),
                     c.eval.feasible ? 1.0 : 0.0, c.constrained_objective()});
    out += '\n';
  }
  return out;
}

std::string loss_curve_csv(const TrainResult& result, const ArtifactMeta& meta) {
  std::string out = comment_line(meta) + "epoch,loss\n";
  append_row(out, {0.0, result.initial_loss});
  out += '\n';
  for (std::size_t e = 0; e < result.loss_curve.size(); ++e) {
    append_row(out, {double(e + 1), result.loss_curve[e]});
    out += '\n';
  }
  return out;
}

std::vector<double> parse_loss_curve_csv(const std::string& text, const std::string& source) {
  const CsvTable t = read_csv(text, source, "epoch,loss", false);
  std::vector<double> losses;
  for (std::size_t i = 0; i < t.rows.size(); ++i) losses.push_back(parse_double(t.rows[i][1], where(source, t, i)));
  return losses;
}

std::string inference_trace_csv(const InferenceResult& result, const ArtifactMeta& meta) {
  std::string out = comment_line(meta) + "iteration,u_hat,energy,sigma,best_u,best_energy\n";
  for (const auto& it : result.trace) {
    append_row(out, {double(it.iteration), it.u_hat, it.energy, it.sigma, it.best_u, it.best_energy});
    out += '\n';
  }
  return out;
}

std::string report_json(const EvalReport& report, const ArtifactMeta& meta, std::uint64_t seed) {
  json policies = json::array();
  for (const auto& p : report.policies) {
    policies.push_back({{"name", p.name},
                        {"shots", p.shots},
                        {"scored", p.scored},
                        {"score", p.score},
                        {"speed_mean", p.speed_mean},
                        {"speed_std", p.speed_std},
                        {"banks_mean", p.banks_mean},
                        {"planned_g_mean", p.planned_g_mean}});
  }
  const json j = {{"meta", meta_to_json(meta)}, {"seed", seed}, {"policies", policies}};
  return j.dump(2) + "\n";
}

std::string shots_csv(const EvalReport& report, const ArtifactMeta& meta) {
  std::string out = comment_line(meta) +
                    "policy,shot,px,py,pvx,pvy,ex,ey,evx,evy,u,v_star,planned_g,planned_v,scored,speed,banks,"
                    "crossing_y,outcome\n";
  for (const auto& s : report.shots) {
    const std::string name = s.policy < report.policies.size() ? report.policies[s.policy].name : std::to_string(s.policy);
    out += name + ',';
    append_row(out, {double(s.shot), s.truth(0), s.truth(1), s.truth(2), s.truth(3), s.estimate(0), s.estimate(1),
                     s.estimate(2), s.estimate(3), s.u, s.v_star, s.planned_g, s.planned_v, s.scored ? 1.0 : 0.0,
                     s.speed, double(s.banks), s.crossing_y});
    out += ',' + s.outcome + '\n';
  }
  return out;
}

std::string summary_table(const EvalReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %8s %22s %12s\n", "Policy", "Score", "Puck Speed [m/s]", "Num. Banks");
  out += buf;
  for (const auto& p : report.policies) {
    char speed[64];
    std::snprintf(speed, sizeof(speed), "%.2f +- %.2f", p.speed_mean, p.speed_std);
    std::snprintf(buf, sizeof(buf), "%-12s %8.2f %22s %12.2f\n", p.name.c_str(), p.score, speed, p.banks_mean);
    out += buf;
  }
  return out;
}

std::string manifest_json(const Manifest& m) {
  auto digests = [](const std::vector<FileDigest>& files) {
    json arr = json::array();
    for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return arr;
  };
  const json j = {{"command", m.command},
                  {"seed", m.seed},
                  {"config_hash", m.config_hash},
                  {"inputs", digests(m.inputs)},
                  {"outputs", digests(m.outputs)}};
  return j.dump(2) + "\n";
}

}  // namespace puckplan
