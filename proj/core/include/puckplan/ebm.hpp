#pragma once

// Energy-based shooting policy: an MLP energy E(s, u), InfoNCE training with
// Adam, and the warm-started particle sampler used at inference time.

#include <cstdint>
#include <optional>
#include <vector>

#include "puckplan/common.hpp"
#include "puckplan/kinematics.hpp"
#include "puckplan/planner.hpp"
#include "puckplan/table.hpp"

namespace puckplan {

/// Fully connected tanh network with a linear scalar head. weights[l] is out x in.
template <typename Scalar>
struct Mlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  /// Uniform(+-1/sqrt(fan_in)) hidden layers, all-zero output layer.
  static Mlp init(const std::vector<int>& sizes, Rng& rng);

  /// Energies of the input columns.
  Row forward(const Matrix& x) const;

  Mlp zeros_like() const;
  std::size_t parameter_count() const;
  std::size_t layers() const { return weights.size(); }
  int input_dim() const { return static_cast<int>(weights.front().cols()); }

  template <typename To>
  Mlp<To> cast() const {
    Mlp<To> out;
    for (const auto& w : weights) out.weights.push_back(w.template cast<To>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<To>());
    return out;
  }
};

/// Maps (s, u) to network inputs: positions about the table centre over the
/// half-extents, velocities over 3 m/s, u about the centre of U over its half-width.
struct InputNorm {
  Vec4 center = Vec4::Zero();
  Vec4 scale = Vec4::Ones();
  double u_center = 0.0;
  double u_scale = 1.0;

  static InputNorm for_table(const TableGeometry& table, const ActionSpace& actions);
  Eigen::Matrix<double, 5, 1> apply(const Vec4& s, double u) const;
};

/// Anything the sampler can minimise over u for a fixed state.
class EnergyLandscape {
 public:
  virtual ~EnergyLandscape() = default;
  virtual VecX energies(const Vec4& s, const std::vector<double>& u) const = 0;
};

class EnergyModel final : public EnergyLandscape {
 public:
  EnergyModel() = default;
  EnergyModel(InputNorm norm, Mlp<double> net) : norm_(norm), net_(std::move(net)) {}

  static EnergyModel initial(const InputNorm& norm, const std::vector<int>& hidden, Rng& rng);

  double energy(const Vec4& s, double u) const;
  VecX energies(const Vec4& s, const std::vector<double>& u) const override;

  const InputNorm& norm() const { return norm_; }
  const Mlp<double>& net() const { return net_; }
  Mlp<double>& net() { return net_; }

 private:
  InputNorm norm_;
  Mlp<double> net_;
};

/// -log softmax(-E)[pos] with log-sum-exp stabilisation.
double infonce_loss(const VecX& energies, std::size_t pos);

/// Mean per-scenario InfoNCE. `x` holds m consecutive input columns per
/// scenario; positives[i] indexes the positive within scenario i. When
/// `grad` is given it receives d(loss)/d(parameters).
template <typename Scalar>
Scalar infonce_batch(const Mlp<Scalar>& net, const typename Mlp<Scalar>::Matrix& x,
                     const std::vector<std::size_t>& positives, std::size_t m, Mlp<Scalar>* grad);

/// Mean per-scenario InfoNCE of a model on a set of records.
double infonce_loss(const EnergyModel& model, const std::vector<ScenarioRecord>& records);

struct TrainConfig {
  std::vector<int> hidden{128, 128};
  std::size_t epochs = 800;
  double learning_rate = 1e-3;
  std::size_t decay_every = 200;  // epochs
  double decay_factor = 0.5;
  std::size_t batch_size = 64;    // scenarios
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  EnergyModel model;
  double initial_loss = 0.0;
  std::vector<double> loss_curve;  // mean mini-batch loss per epoch
};

/// Mini-batch Adam on the InfoNCE loss in single precision. All records must
/// share one candidate count. Throws Diverged on a non-finite loss.
TrainResult train(const std::vector<ScenarioRecord>& data, const InputNorm& norm, const TrainConfig& config,
                  const std::function<void(std::size_t, double)>& on_epoch = {});

struct SamplerSettings {
  std::size_t particles = 64;
  double sigma_init = 0.2;  // rad
  double gamma = 0.9;
  double sigma_min = 0.01;  // rad
  std::size_t iterations = 25;

  void validate() const;
};

struct SamplerState {
  std::vector<double> particles;
  std::vector<double> probs;
  double sigma = 0.0;
  std::size_t iteration = 0;
};

/// softmax(-E), shifted by the minimum energy.
std::vector<double> softmax_neg(const VecX& energies);

SamplerState sampler_init(const ActionSpace& actions, const SamplerSettings& settings, Rng& rng);

struct SamplerStep {
  double u_hat = 0.0;
  double energy = 0.0;  // energy of u_hat
  SamplerState state;
};

/// Resample by probs, perturb with N(0, sigma), clip to U, re-weight by
/// softmax(-E); u_hat is the most probable particle. sigma decays by gamma.
SamplerStep sampler_step(const EnergyLandscape& landscape, const Vec4& s, const SamplerState& state,
                         const ActionSpace& actions, const SamplerSettings& settings, Rng& rng);

struct InferenceIteration {
  std::size_t iteration = 0;
  double u_hat = 0.0;
  double energy = 0.0;
  double sigma = 0.0;
  double best_u = 0.0;  // lowest energy seen so far, any iteration
  double best_energy = 0.0;
};

struct InferenceResult {
  double u_hat = 0.0;
  SamplerState state;
  std::vector<InferenceIteration> trace;
};

/// sampler_init (or the warm state) followed by settings.iterations steps.
/// Returns the last iteration's u_hat.
InferenceResult infer(const EnergyLandscape& landscape, const Vec4& s, const ActionSpace& actions,
                      const SamplerSettings& settings, Rng& rng, const std::optional<SamplerState>& warm = std::nullopt);

/// Energy argmin over an evenly spaced grid of n angles.
double grid_argmin(const EnergyLandscape& landscape, const Vec4& s, const ActionSpace& actions, std::size_t n);

}  // namespace puckplan
