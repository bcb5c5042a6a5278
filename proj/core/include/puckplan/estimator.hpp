#pragma once

// Piecewise-linear Kalman filter over the puck state s = (x, y, vx, vy).
// The transition (A, b, Q) switches with the mode detected on the mean.

#include <optional>
#include <vector>

#include "puckplan/contact_model.hpp"
#include "puckplan/gauss.hpp"
#include "puckplan/table.hpp"

namespace puckplan {

struct MeasurementModel {
  Eigen::Matrix<double, 2, 4> h = (Eigen::Matrix<double, 2, 4>() << 1, 0, 0, 0, 0, 1, 0, 0).finished();
  Mat2 r = 1e-6 * Mat2::Identity();

  static MeasurementModel position(double std) { return {.r = std * std * Mat2::Identity()}; }
};

struct FilterInit {
  double pos_std = 1e-2;  // m
  double vel_std = 0.5;   // m/s
};

struct FilterState {
  StateBelief belief;
  ModeId last_mode;
  std::size_t step = 0;
};

/// Position from z0, velocity by finite difference (z1 - z0) / dt, or zero without z1.
FilterState initialize_filter(const Vec2& z0, const std::optional<Vec2>& z1, double dt, const FilterInit& init = {});

FilterState predict(const FilterState& state, const PuckModel& model, const TableGeometry& table,
                    const std::optional<MalletState>& mallet);

/// Kalman update with the Joseph-form covariance.
FilterState update(const FilterState& state, const Vec2& z, const MeasurementModel& meas);

/// One estimate per measurement slot. Slot 0 is the initialisation; every
/// later slot is predict followed by update, or predict alone when the
/// measurement is missing. `mallet_track` may be empty (no mallet on the table).
std::vector<FilterState> run_filter(const std::vector<std::optional<Vec2>>& measurements,
                                    const std::vector<std::optional<MalletState>>& mallet_track,
                                    const PuckModel& model, const TableGeometry& table,
                                    const MeasurementModel& meas, const FilterInit& init = {});

}  // namespace puckplan
