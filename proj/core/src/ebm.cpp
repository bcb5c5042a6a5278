#include "puckplan/ebm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace puckplan {

template <typename Scalar>
Mlp<Scalar> Mlp<Scalar>::init(const std::vector<int>& sizes, Rng& rng) {
  if (sizes.size() < 2) throw Error(ErrorCode::InvalidArgument, "mlp: need at least input and output sizes");
  for (int s : sizes) {
    if (s <= 0) throw Error(ErrorCode::InvalidArgument, "mlp: layer sizes must be > 0");
  }
  Mlp net;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    Matrix w = Matrix::Zero(out, in);
    Vector b = Vector::Zero(out);
    if (l + 2 < sizes.size()) {
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      const double bound = 1.0 / std::sqrt(static_cast<double>(in));
      for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) w(r, c) = static_cast<Scalar>(bound * dist(rng));
      }
      for (int r = 0; r < out; ++r) b(r) = static_cast<Scalar>(bound * dist(rng));
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

template <typename Scalar>
typename Mlp<Scalar>::Row Mlp<Scalar>::forward(const Matrix& x) const {
  Matrix a = x;
  for (std::size_t l = 0; l + 1 < weights.size(); ++l) {
    Matrix z = weights[l] * a;
    z.colwise() += biases[l];
    a = z.array().tanh().matrix();
  }
  Row e = weights.back() * a;
  e.array() += biases.back()(0);
  return e;
}

template <typename Scalar>
Mlp<Scalar> Mlp<Scalar>::zeros_like() const {
  Mlp out;
  for (const auto& w : weights) out.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) out.biases.push_back(Vector::Zero(b.size()));
  return out;
}

template <typename Scalar>
std::size_t Mlp<Scalar>::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

template struct Mlp<float>;
template struct Mlp<double>;

InputNorm InputNorm::for_table(const TableGeometry& table, const ActionSpace& actions) {
  InputNorm n;
  n.center << 0.5 * table.length, 0.0, 0.0, 0.0;
  n.scale << 0.5 * table.length, table.half_width(), 3.0, 3.0;
  n.u_center = actions.center();
  n.u_scale = actions.half_width();
  return n;
}

Eigen::Matrix<double, 5, 1> InputNorm::apply(const Vec4& s, double u) const {
  Eigen::Matrix<double, 5, 1> x;
  x << (s - center).cwiseQuotient(scale), (u - u_center) / u_scale;
  return x;
}

EnergyModel EnergyModel::initial(const InputNorm& norm, const std::vector<int>& hidden, Rng& rng) {
  std::vector<int> sizes{5};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return EnergyModel(norm, Mlp<double>::init(sizes, rng));
}

double EnergyModel::energy(const Vec4& s, double u) const { return energies(s, {u})(0); }

VecX EnergyModel::energies(const Vec4& s, const std::vector<double>& u) const {
  MatX x(5, static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = norm_.apply(s, u[i]);
  return net_.forward(x).transpose();
}

double infonce_loss(const VecX& energies, std::size_t pos) {
  if (pos >= static_cast<std::size_t>(energies.size())) throw Error(ErrorCode::InvalidArgument, "infonce: bad positive index");
  const double shift = (-energies).maxCoeff();
  const double lse = shift + std::log((-energies.array() - shift).exp().sum());
  return energies(static_cast<Eigen::Index>(pos)) + lse;
}

template <typename Scalar>
Scalar infonce_batch(const Mlp<Scalar>& net, const typename Mlp<Scalar>::Matrix& x,
                     const std::vector<std::size_t>& positives, std::size_t m, Mlp<Scalar>* grad) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  using Row = typename Mlp<Scalar>::Row;
  const std::size_t n = positives.size();
  const auto cols = static_cast<Eigen::Index>(n * m);
  if (x.cols() != cols) throw Error(ErrorCode::InvalidArgument, "infonce: input columns do not match the batch");
  const std::size_t layers = net.layers();

  std::vector<Matrix> hidden;
  hidden.reserve(layers - 1);
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    Matrix z = net.weights[l] * (l == 0 ? x : hidden.back());
    z.colwise() += net.biases[l];
    hidden.push_back(z.array().tanh().matrix());
  }
  const Matrix& last = layers > 1 ? hidden.back() : x;
  Row e = net.weights.back() * last;
  e.array() += net.biases.back()(0);

  Row de(cols);
  Scalar total = 0;
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto off = static_cast<Eigen::Index>(i * m);
    const auto seg = e.segment(off, static_cast<Eigen::Index>(m));
    const Scalar shift = (-seg).maxCoeff();
    const Scalar lse = shift + std::log((-seg.array() - shift).exp().sum());
    const auto pos = static_cast<Eigen::Index>(positives[i]);
    total += seg(pos) + lse;
    de.segment(off, static_cast<Eigen::Index>(m)) = -(-seg.array() - lse).exp().matrix() * inv_n;
    de(off + pos) += inv_n;
  }
  const Scalar loss = total * inv_n;
  if (!grad) return loss;

  if (grad->layers() != layers) *grad = net.zeros_like();
  grad->weights.back().noalias() = de * last.transpose();
  grad->biases.back()(0) = de.sum();
  if (layers == 1) return loss;

  Matrix delta = net.weights.back().transpose() * de;
  for (std::size_t l = layers - 1; l-- > 0;) {
    delta.array() *= Scalar(1) - hidden[l].array().square();
    const Matrix& in = l == 0 ? x : hidden[l - 1];
    grad->weights[l].noalias() = delta * in.transpose();
    grad->biases[l] = delta.rowwise().sum();
    if (l > 0) delta = net.weights[l].transpose() * delta;
  }
  return loss;
}

template float infonce_batch<float>(const Mlp<float>&, const Mlp<float>::Matrix&, const std::vector<std::size_t>&,
                                    std::size_t, Mlp<float>*);
template double infonce_batch<double>(const Mlp<double>&, const Mlp<double>::Matrix&,
                                      const std::vector<std::size_t>&, std::size_t, Mlp<double>*);

namespace {

std::size_t common_candidate_count(const std::vector<ScenarioRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "ebm: empty dataset");
  const std::size_t m = records.front().angles.size();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "ebm: records need at least two candidates");
  for (const auto& r : records) {
    if (r.angles.size() != m) throw Error(ErrorCode::InvalidArgument, "ebm: records differ in candidate count");
    if (r.pos_index >= m) throw Error(ErrorCode::InvalidArgument, "ebm: positive index out of range");
  }
  return m;
}

template <typename Scalar>
typename Mlp<Scalar>::Matrix build_inputs(const std::vector<ScenarioRecord>& records, const InputNorm& norm,
                                          std::size_t m) {
  typename Mlp<Scalar>::Matrix x(5, static_cast<Eigen::Index>(records.size() * m));
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      x.col(static_cast<Eigen::Index>(i * m + j)) = norm.apply(records[i].state, records[i].angles[j]).cast<Scalar>();
    }
  }
  return x;
}

struct Adam {
  Mlp<float> m1, m2;
  std::size_t t = 0;
  static constexpr float kBeta1 = 0.9f;
  static constexpr float kBeta2 = 0.999f;
  static constexpr float kEps = 1e-8f;

  explicit Adam(const Mlp<float>& net) : m1(net.zeros_like()), m2(net.zeros_like()) {}

  template <typename P>
  static void apply(P& param, const P& g, P& a, P& b, float lr_t) {
    a = kBeta1 * a + (1.0f - kBeta1) * g;
    b.array() = kBeta2 * b.array() + (1.0f - kBeta2) * g.array().square();
    param.array() -= lr_t * a.array() / (b.array().sqrt() + kEps);
  }

  void step(Mlp<float>& net, const Mlp<float>& grad, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(double(kBeta1), double(t));
    const double c2 = 1.0 - std::pow(double(kBeta2), double(t));
    const auto lr_t = static_cast<float>(lr * std::sqrt(c2) / c1);
    for (std::size_t l = 0; l < net.layers(); ++l) {
      apply(net.weights[l], grad.weights[l], m1.weights[l], m2.weights[l], lr_t);
      apply(net.biases[l], grad.biases[l], m1.biases[l], m2.biases[l], lr_t);
    }
  }
};

}  // namespace

double infonce_loss(const EnergyModel& model, const std::vector<ScenarioRecord>& records) {
  const std::size_t m = common_candidate_count(records);
  constexpr std::size_t kChunk = 256;
  double total = 0.0;
  std::vector<std::size_t> positives;
  for (std::size_t start = 0; start < records.size(); start += kChunk) {
    const std::size_t end = std::min(records.size(), start + kChunk);
    const std::vector<ScenarioRecord> chunk(records.begin() + static_cast<std::ptrdiff_t>(start),
                                            records.begin() + static_cast<std::ptrdiff_t>(end));
    positives.clear();
    for (const auto& r : chunk) positives.push_back(r.pos_index);
    total += infonce_batch<double>(model.net(), build_inputs<double>(chunk, model.norm(), m), positives, m, nullptr) *
             static_cast<double>(chunk.size());
  }
  return total / static_cast<double>(records.size());
}

void TrainConfig::validate() const {
  if (hidden.empty()) throw Error(ErrorCode::InvalidArgument, "train: at least one hidden layer");
  if (epochs == 0) throw Error(ErrorCode::InvalidArgument, "train: epochs must be > 0");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "train: learning_rate must be > 0");
  if (decay_every == 0) throw Error(ErrorCode::InvalidArgument, "train: decay_every must be > 0");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw Error(ErrorCode::InvalidArgument, "train: decay_factor must be in (0, 1]");
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "train: batch_size must be > 0");
}

TrainResult train(const std::vector<ScenarioRecord>& data, const InputNorm& norm, const TrainConfig& config,
                  const std::function<void(std::size_t, double)>& on_epoch) {
  config.validate();
  const std::size_t m = common_candidate_count(data);
  const std::size_t n = data.size();
  Rng rng(config.seed);

  TrainResult result;
  result.model = EnergyModel::initial(norm, config.hidden, rng);
  result.initial_loss = infonce_loss(result.model, data);

  const Mlp<float>::Matrix all = build_inputs<float>(data, norm, m);
  Mlp<float> net = result.model.net().cast<float>();
  Mlp<float> grad = net.zeros_like();
  Adam adam(net);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto m_cols = static_cast<Eigen::Index>(m);
  Mlp<float>::Matrix batch;
  std::vector<std::size_t> positives;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate * std::pow(config.decay_factor, double(epoch / config.decay_every));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - start);
      batch.resize(5, static_cast<Eigen::Index>(count) * m_cols);
      positives.resize(count);
      for (std::size_t b = 0; b < count; ++b) {
        const std::size_t idx = order[start + b];
        batch.middleCols(static_cast<Eigen::Index>(b) * m_cols, m_cols) =
            all.middleCols(static_cast<Eigen::Index>(idx) * m_cols, m_cols);
        positives[b] = data[idx].pos_index;
      }
      const float loss = infonce_batch<float>(net, batch, positives, m, &grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::Diverged, "train: non-finite loss at epoch " + std::to_string(epoch));
      }
      adam.step(net, grad, lr);
      epoch_loss += double(loss) * double(count);
    }
    epoch_loss /= double(n);
    result.loss_curve.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  result.model = EnergyModel(norm, net.cast<double>());
  return result;
}

void SamplerSettings::validate() const {
  if (particles == 0) throw Error(ErrorCode::InvalidArgument, "sampler: particles must be >= 1");
  if (!(sigma_init >= 0.0 && sigma_min >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sampler: sigmas must be >= 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sampler: gamma must be in (0, 1]");
}

std::vector<double> softmax_neg(const VecX& energies) {
  const double lo = energies.minCoeff();
  std::vector<double> p(static_cast<std::size_t>(energies.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-(energies(static_cast<Eigen::Index>(i)) - lo));
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

SamplerState sampler_init(const ActionSpace& actions, const SamplerSettings& settings, Rng& rng) {
  settings.validate();
  std::uniform_real_distribution<double> dist(actions.u_min, actions.u_max);
  SamplerState st;
  st.particles.resize(settings.particles);
  for (double& u : st.particles) u = dist(rng);
  st.probs.assign(settings.particles, 1.0 / static_cast<double>(settings.particles));
  st.sigma = std::max(settings.sigma_init, settings.sigma_min);
  return st;
}

SamplerStep sampler_step(const EnergyLandscape& landscape, const Vec4& s, const SamplerState& state,
                         const ActionSpace& actions, const SamplerSettings& settings, Rng& rng) {
  const std::size_t n = state.particles.size();
  if (n == 0 || state.probs.size() != n) throw Error(ErrorCode::InvalidArgument, "sampler: malformed state");

  std::discrete_distribution<std::size_t> pick(state.probs.begin(), state.probs.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  SamplerStep out;
  out.state.particles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = state.particles[n == 1 ? 0 : pick(rng)] + state.sigma * normal(rng);
    out.state.particles[i] = actions.clip(u);
  }
  const VecX e = landscape.energies(s, out.state.particles);
  out.state.probs = softmax_neg(e);
  const auto best = static_cast<std::size_t>(std::max_element(out.state.probs.begin(), out.state.probs.end()) -
                                             out.state.probs.begin());
  out.u_hat = out.state.particles[best];
  out.energy = e(static_cast<Eigen::Index>(best));
  out.state.sigma = std::max(settings.sigma_min, settings.gamma * state.sigma);
  out.state.iteration = state.iteration + 1;
  return out;
}

InferenceResult infer(const EnergyLandscape& landscape, const Vec4& s, const ActionSpace& actions,
                      const SamplerSettings& settings, Rng& rng, const std::optional<SamplerState>& warm) {
  settings.validate();
  InferenceResult result;
  result.state = warm ? *warm : sampler_init(actions, settings, rng);
  result.u_hat = result.state.particles.front();
  double best_u = result.u_hat;
  double best_e = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < settings.iterations; ++it) {
    SamplerStep step = sampler_step(landscape, s, result.state, actions, settings, rng);
    if (step.energy < best_e) {
      best_e = step.energy;
      best_u = step.u_hat;
    }
    result.trace.push_back({step.state.iteration, step.u_hat, step.energy, result.state.sigma, best_u, best_e});
    result.u_hat = step.u_hat;
    result.state = std::move(step.state);
  }
  return result;
}

double grid_argmin(const EnergyLandscape& landscape, const Vec4& s, const ActionSpace& actions, std::size_t n) {
  const std::vector<double> grid = candidate_angles(actions, n);
  const VecX e = landscape.energies(s, grid);
  Eigen::Index best = 0;
  e.minCoeff(&best);
  return grid[static_cast<std::size_t>(best)];
}

}  // namespace puckplan
