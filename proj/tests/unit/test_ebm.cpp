#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "puckplan/ebm.hpp"

using namespace puckplan;

namespace {

/// E(s, u) = k (u - s_y)^2, minimum at the puck's y coordinate.
class Quadratic final : public EnergyLandscape {
 public:
  explicit Quadratic(double k) : k_(k) {}
  VecX energies(const Vec4& s, const std::vector<double>& u) const override {
    VecX e(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) e(static_cast<Eigen::Index>(i)) = k_ * (u[i] - s.y()) * (u[i] - s.y());
    return e;
  }

 private:
  double k_;
};

Mlp<double> random_net(Rng& rng) {
  Mlp<double> net = Mlp<double>::init({5, 6, 4, 1}, rng);
  net.weights.back() = testing::random_matrix(1, 4, rng);
  net.biases.back() = testing::random_matrix(1, 1, rng);
  return net;
}

double& param(Mlp<double>& net, std::size_t k) {
  for (std::size_t l = 0; l < net.layers(); ++l) {
    if (k < static_cast<std::size_t>(net.weights[l].size())) return net.weights[l].data()[k];
    k -= static_cast<std::size_t>(net.weights[l].size());
    if (k < static_cast<std::size_t>(net.biases[l].size())) return net.biases[l].data()[k];
    k -= static_cast<std::size_t>(net.biases[l].size());
  }
  throw std::out_of_range("param");
}

/// Records whose positive is the candidate nearest a fixed function of y.
std::vector<ScenarioRecord> toy_records(std::size_t n, Rng& rng) {
  const TableGeometry t;
  const std::vector<double> angles = candidate_angles(ActionSpace{}, 9);
  std::vector<ScenarioRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    ScenarioRecord r;
    r.state = sample_contact_state(t, rng).as_vector();
    r.angles = angles;
    r.pos_index = r.state.y() < 0.0 ? 6 : 2;
    r.u_pos = angles[r.pos_index];
    r.objectives.assign(angles.size(), 0.0);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("InfoNCE of an energy vector") {
  const VecX e = (VecX(4) << 0.3, -1.0, 2.0, 0.5).finished();
  double z = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) z += std::exp(-e(i));
  CHECK(infonce_loss(e, 1) == doctest::Approx(-std::log(std::exp(1.0) / z)));
  // Shifting every energy leaves the loss unchanged, even far from zero.
  const VecX big = e.array() + 1e4;
  CHECK(infonce_loss(big, 1) == doctest::Approx(infonce_loss(e, 1)));
  CHECK(std::isfinite(infonce_loss(VecX(e * 1e3), 2)));
  CHECK(infonce_loss(VecX::Zero(7), 3) == doctest::Approx(std::log(7.0)));
}

TEST_CASE("an untrained model starts at ln M") {
  Rng rng(2);
  const auto records = toy_records(20, rng);
  const EnergyModel model = EnergyModel::initial(InputNorm::for_table(TableGeometry{}, ActionSpace{}), {16, 16}, rng);
  CHECK(infonce_loss(model, records) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  CHECK(model.net().input_dim() == 5);
  CHECK(model.net().parameter_count() == (5 * 16 + 16) + (16 * 16 + 16) + (16 + 1));
}

TEST_CASE("batch gradient matches finite differences") {
  Rng rng(4);
  Mlp<double> net = random_net(rng);
  const std::size_t m = 5, scenarios = 3;
  const MatX x = testing::random_matrix(5, static_cast<Eigen::Index>(m * scenarios), rng);
  const std::vector<std::size_t> pos{0, 3, 4};
  Mlp<double> grad = net.zeros_like();
  const double loss = infonce_batch<double>(net, x, pos, m, &grad);
  CHECK(loss == doctest::Approx(infonce_batch<double>(net, x, pos, m, nullptr)));

  // Mean of the per-scenario losses.
  const auto e = net.forward(x);
  double mean = 0.0;
  for (std::size_t i = 0; i < scenarios; ++i) {
    mean += infonce_loss(VecX(e.segment(static_cast<Eigen::Index>(i * m), static_cast<Eigen::Index>(m)).transpose()), pos[i]);
  }
  CHECK(loss == doctest::Approx(mean / scenarios).epsilon(1e-12));

  const double h = 1e-6;
  for (std::size_t k = 0; k < net.parameter_count(); ++k) {
    Mlp<double> plus = net, minus = net;
    param(plus, k) += h;
    param(minus, k) -= h;
    const double fd = (infonce_batch<double>(plus, x, pos, m, nullptr) - infonce_batch<double>(minus, x, pos, m, nullptr)) / (2 * h);
    CHECK(param(grad, k) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("softmax of negative energies") {
  const VecX e = (VecX(3) << 1.0, 0.0, 2.0).finished();
  const auto p = softmax_neg(e);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
  CHECK(p[1] > p[0]);
  CHECK(p[0] > p[2]);
  CHECK(p[1] / p[0] == doctest::Approx(std::exp(1.0)));
  const auto shifted = softmax_neg(VecX(e.array() + 800.0));
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(shifted[i] == doctest::Approx(p[i]));
}

TEST_CASE("sampler converges on a quadratic energy") {
  const Quadratic q(2000.0);
  const ActionSpace a;
  const SamplerSettings st;
  for (double target : {-0.8, 0.0, 0.37, 1.1}) {
    Rng rng(10);
    const Vec4 s(0.5, target, 0.0, 0.0);
    const InferenceResult r = infer(q, s, a, st, rng);
    CHECK(r.trace.size() == st.iterations);
    CHECK(std::abs(r.u_hat - target) < 0.02);
    CHECK(r.state.sigma == doctest::Approx(std::max(st.sigma_min, st.sigma_init * std::pow(st.gamma, 25))));
    for (double u : r.state.particles) CHECK(a.contains(u));
    CHECK(grid_argmin(q, s, a, 241) == doctest::Approx(target).epsilon(1e-9).scale(1.0));
  }
  // Minimum outside U: particles pile up on the boundary.
  Rng rng(1);
  const InferenceResult edge = infer(q, Vec4(0.5, 2.0, 0, 0), a, st, rng);
  CHECK(edge.u_hat == doctest::Approx(a.u_max).epsilon(1e-3));
}

TEST_CASE("sampler bookkeeping") {
  const ActionSpace a;
  SamplerSettings st;
  Rng rng(6);
  const SamplerState init = sampler_init(a, st, rng);
  CHECK(init.particles.size() == st.particles);
  CHECK(init.sigma == st.sigma_init);
  const SamplerStep step = sampler_step(Quadratic(1.0), Vec4::Zero(), init, a, st, rng);
  CHECK(step.state.iteration == 1);
  CHECK(step.state.sigma == doctest::Approx(st.gamma * st.sigma_init));
  // Warm start continues from the given state.
  st.iterations = 3;
  const InferenceResult warm = infer(Quadratic(1.0), Vec4::Zero(), a, st, rng, step.state);
  CHECK(warm.trace.front().iteration == 2);
  st.particles = 0;
  CHECK_THROWS_AS(st.validate(), Error);
}

TEST_CASE("training lowers the loss on a separable toy set") {
  Rng rng(12);
  const auto records = toy_records(256, rng);
  TrainConfig cfg;
  cfg.hidden = {16, 16};
  cfg.epochs = 60;
  cfg.learning_rate = 1e-2;
  cfg.seed = 3;
  std::size_t calls = 0;
  const TrainResult r = train(records, InputNorm::for_table(TableGeometry{}, ActionSpace{}), cfg,
                              [&](std::size_t, double) { ++calls; });
  CHECK(calls == cfg.epochs);
  CHECK(r.loss_curve.size() == cfg.epochs);
  CHECK(r.initial_loss == doctest::Approx(std::log(9.0)));
  CHECK(infonce_loss(r.model, records) < 0.3);
  CHECK(grid_argmin(r.model, Vec4(0.5, -0.3, 0, 0), ActionSpace{}, 9) == doctest::Approx(0.6));
  CHECK(grid_argmin(r.model, Vec4(0.5, 0.3, 0, 0), ActionSpace{}, 9) == doctest::Approx(-0.6));

  // Same seed, same network.
  const TrainResult again = train(records, InputNorm::for_table(TableGeometry{}, ActionSpace{}), cfg);
  CHECK(again.loss_curve == r.loss_curve);

  auto uneven = records;
  uneven[3].angles.pop_back();
  CHECK_THROWS_AS(train(uneven, InputNorm::for_table(TableGeometry{}, ActionSpace{}), cfg), Error);
}
