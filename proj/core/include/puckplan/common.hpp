#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

namespace puckplan {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Every random draw in the library goes through a caller-owned engine of this type.
using Rng = std::mt19937_64;

enum class ErrorCode {
  InvalidArgument,
  TooFewSamples,
  NonFinite,
  SingularCondition,
  CoincidentCenters,
  OutOfTable,
  Unreachable,
  EmptyMode,
  NoFeasibleShot,
  Diverged,
  Io,
  Format,
  Mismatch,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Deterministically derives an independent stream seed from a base seed and
/// an index path, e.g. (run seed, policy index, shot index).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(base, path));
}

/// Counter-clockwise rotation of a 2-vector by 90 degrees.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

}  // namespace puckplan
