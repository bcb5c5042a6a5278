#include "puckplan/gauss.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace puckplan {

MatX JointGaussian::full_cov() const {
  const auto ny = dim_y();
  const auto nx = dim_xi();
  MatX full(ny + nx, ny + nx);
  full.topLeftCorner(ny, ny) = cov_y;
  full.topRightCorner(ny, nx) = cov_y_xi;
  full.bottomLeftCorner(nx, ny) = cov_y_xi.transpose();
  full.bottomRightCorner(nx, nx) = cov_xi;
  return full;
}

VecX JointGaussian::full_mean() const {
  VecX full(dim_y() + dim_xi());
  full << mean_y, mean_xi;
  return full;
}

double regularization_for(const MatX& cov) { return 1e-9 * std::max(1.0, cov.trace()); }

JointGaussian fit_joint_gaussian(const MatX& y, const MatX& xi) {
  if (y.rows() != xi.rows()) {
    throw Error(ErrorCode::InvalidArgument, "fit_joint_gaussian: y and xi row counts differ");
  }
  const Eigen::Index n = y.rows();
  const Eigen::Index ny = y.cols();
  const Eigen::Index nx = xi.cols();
  if (n < ny + nx + 1) {
    throw Error(ErrorCode::TooFewSamples, "fit_joint_gaussian: need at least " + std::to_string(ny + nx + 1) +
                                              " samples, got " + std::to_string(n));
  }
  if (!y.allFinite() || !xi.allFinite()) {
    throw Error(ErrorCode::NonFinite, "fit_joint_gaussian: sample contains NaN or Inf");
  }

  MatX data(n, ny + nx);
  data << y, xi;
  const VecX mean = data.colwise().mean();
  const MatX centered = data.rowwise() - mean.transpose();
  MatX cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());
  cov.diagonal().array() += regularization_for(cov);

  JointGaussian joint;
  joint.mean_y = mean.head(ny);
  joint.mean_xi = mean.tail(nx);
  joint.cov_y = cov.topLeftCorner(ny, ny);
  joint.cov_y_xi = cov.topRightCorner(ny, nx);
  joint.cov_xi = cov.bottomRightCorner(nx, nx);
  return joint;
}

LinearGaussianMap condition(const JointGaussian& joint) {
  MatX cov_xi = joint.cov_xi;
  Eigen::LLT<MatX> llt(cov_xi);
  if (llt.info() != Eigen::Success) {
    cov_xi.diagonal().array() += regularization_for(cov_xi);
    llt.compute(cov_xi);
  }
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularCondition, "condition: covariance of the conditioning block is not invertible");
  }
  // gain = cov_y_xi * cov_xi^-1, solved as cov_xi * gain^T = cov_y_xi^T.
  const MatX gain = llt.solve(joint.cov_y_xi.transpose()).transpose();
  if (!gain.allFinite()) {
    throw Error(ErrorCode::SingularCondition, "condition: gain is not finite");
  }

  LinearGaussianMap map;
  map.gain = gain;
  map.offset = joint.mean_y - gain * joint.mean_xi;
  map.cov = clamp_psd(joint.cov_y - gain * joint.cov_y_xi.transpose());
  return map;
}

JointGaussian reconstruct_joint(const LinearGaussianMap& map, const VecX& mean_xi, const MatX& cov_xi) {
  JointGaussian joint;
  joint.mean_xi = mean_xi;
  joint.cov_xi = cov_xi;
  joint.mean_y = map.gain * mean_xi + map.offset;
  joint.cov_y_xi = map.gain * cov_xi;
  joint.cov_y = map.cov + map.gain * cov_xi * map.gain.transpose();
  return joint;
}

MatX clamp_psd(const MatX& cov) {
  const MatX sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<MatX> eig(sym);
  if (eig.eigenvalues().minCoeff() >= 0.0) return sym;
  const VecX clipped = eig.eigenvalues().cwiseMax(0.0);
  MatX out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

bool is_psd(const MatX& cov, double tol) {
  if (cov.rows() != cov.cols() || !cov.allFinite()) return false;
  const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1e-300);
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
  if (cov.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<MatX> eig(0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
  const double trace = std::max(std::abs(cov.trace()), 1e-300);
  return eig.eigenvalues().minCoeff() >= -tol * trace;
}

}  // namespace puckplan
