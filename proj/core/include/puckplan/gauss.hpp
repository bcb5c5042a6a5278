#pragma once

// Dense Gaussian algebra: joint fitting, conditioning, PSD handling and sampling.

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <random>
#include <vector>

#include "puckplan/common.hpp"

namespace puckplan {

/// Mean + positive-semidefinite covariance. `Dim` is fixed for the hot
/// rollout paths (4-D puck state, 2-D velocity) and dynamic elsewhere.
template <int Dim>
struct Gaussian {
  using Vector = Eigen::Matrix<double, Dim, 1>;
  using Matrix = Eigen::Matrix<double, Dim, Dim>;

  Vector mean;
  Matrix cov;

  Eigen::Index dim() const { return mean.size(); }
};

using GaussianBelief = Gaussian<Eigen::Dynamic>;
using StateBelief = Gaussian<4>;
using VelocityBelief = Gaussian<2>;

/// Joint distribution over (y, xi), stored blockwise.
struct JointGaussian {
  VecX mean_y;
  VecX mean_xi;
  MatX cov_y;
  MatX cov_y_xi;
  MatX cov_xi;

  Eigen::Index dim_y() const { return mean_y.size(); }
  Eigen::Index dim_xi() const { return mean_xi.size(); }
  MatX full_cov() const;
  VecX full_mean() const;
};

/// y | xi ~ N(gain * xi + offset, cov)
struct LinearGaussianMap {
  MatX gain;
  VecX offset;
  MatX cov;
};

/// Diagonal regulariser used before any inversion: 1e-9 * max(1, trace).
double regularization_for(const MatX& cov);

/// Sample mean and unbiased sample covariance of the stacked rows [y xi],
/// plus the diagonal regulariser. Rows of `y` and `xi` are paired samples.
JointGaussian fit_joint_gaussian(const MatX& y, const MatX& xi);

/// Conditions the joint on xi. The returned covariance is symmetrised and clamped PSD.
LinearGaussianMap condition(const JointGaussian& joint);

/// Rebuilds the joint blocks from a conditional map and the xi marginal.
JointGaussian reconstruct_joint(const LinearGaussianMap& map, const VecX& mean_xi, const MatX& cov_xi);

/// Symmetric part with negative eigenvalues set to zero.
MatX clamp_psd(const MatX& cov);

/// Symmetry within 1e-9 relative and eigenvalues >= -tol * max(trace, tiny).
bool is_psd(const MatX& cov, double tol = 1e-9);

template <int Dim>
bool is_valid(const Gaussian<Dim>& g) {
  return g.cov.rows() == g.mean.size() && g.cov.cols() == g.mean.size() && g.mean.allFinite() &&
         g.cov.allFinite() && is_psd(MatX(g.cov));
}

/// Square-root factor L with L L^T = cov. Cholesky when positive definite,
/// otherwise eigen-decomposition with negative eigenvalues clipped.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> sqrt_factor(const Eigen::Matrix<double, Dim, Dim>& cov) {
  Eigen::LLT<Eigen::Matrix<double, Dim, Dim>> llt(cov);
  if (llt.info() == Eigen::Success) {
    Eigen::Matrix<double, Dim, Dim> l = llt.matrixL();
    if (l.allFinite()) return l;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, Dim, Dim>> eig(cov);
  auto values = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * values.asDiagonal();
}

/// n i.i.d. draws. Deterministic for a given engine state.
template <int Dim>
std::vector<typename Gaussian<Dim>::Vector> sample_gaussian(const Gaussian<Dim>& belief, std::size_t n, Rng& rng) {
  using Vector = typename Gaussian<Dim>::Vector;
  const auto factor = sqrt_factor<Dim>(belief.cov);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> draws;
  draws.reserve(n);
  Vector z(belief.mean.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = normal(rng);
    draws.push_back(belief.mean + factor * z);
  }
  return draws;
}

}  // namespace puckplan
