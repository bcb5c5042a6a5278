#include "puckplan/estimator.hpp"

namespace puckplan {

FilterState initialize_filter(const Vec2& z0, const std::optional<Vec2>& z1, double dt, const FilterInit& init) {
  if (!z0.allFinite() || (z1 && !z1->allFinite())) throw Error(ErrorCode::NonFinite, "filter: non-finite measurement");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "filter: dt must be > 0");
  FilterState st;
  st.belief.mean << z0, (z1 ? Vec2((*z1 - z0) / dt) : Vec2::Zero());
  st.belief.cov.setZero();
  st.belief.cov.diagonal() << Vec2::Constant(init.pos_std * init.pos_std), Vec2::Constant(init.vel_std * init.vel_std);
  return st;
}

FilterState predict(const FilterState& state, const PuckModel& model, const TableGeometry& table,
                    const std::optional<MalletState>& mallet) {
  const PuckState mean = PuckState::from_vector(state.belief.mean);
  const ModeId mode = detect_mode(table, mean, mallet);
  const StateSpace ss = state_space_for(model, mode, mean, mallet);

  FilterState out;
  out.belief.mean = ss.a * state.belief.mean + ss.b;
  const Mat4 cov = ss.a * state.belief.cov * ss.a.transpose() + ss.q;
  out.belief.cov = 0.5 * (cov + cov.transpose());
  out.last_mode = mode;
  out.step = state.step + 1;
  return out;
}

FilterState update(const FilterState& state, const Vec2& z, const MeasurementModel& meas) {
  if (!z.allFinite()) throw Error(ErrorCode::NonFinite, "filter: non-finite measurement");
  const auto& h = meas.h;
  const Mat4& p = state.belief.cov;
  const Mat2 s = h * p * h.transpose() + meas.r;
  const Eigen::Matrix<double, 4, 2> k = p * h.transpose() * s.inverse();
  const Mat4 i_kh = Mat4::Identity() - k * h;

  FilterState out = state;
  out.belief.mean = state.belief.mean + k * (z - h * state.belief.mean);
  const Mat4 cov = i_kh * p * i_kh.transpose() + k * meas.r * k.transpose();
  out.belief.cov = 0.5 * (cov + cov.transpose());
  return out;
}

std::vector<FilterState> run_filter(const std::vector<std::optional<Vec2>>& measurements,
                                    const std::vector<std::optional<MalletState>>& mallet_track,
                                    const PuckModel& model, const TableGeometry& table,
                                    const MeasurementModel& meas, const FilterInit& init) {
  if (measurements.empty() || !measurements.front()) {
    throw Error(ErrorCode::InvalidArgument, "filter: the first measurement must be present");
  }
  if (!mallet_track.empty() && mallet_track.size() != measurements.size()) {
    throw Error(ErrorCode::InvalidArgument, "filter: mallet track and measurements differ in length");
  }
  const std::optional<Vec2> second = measurements.size() > 1 ? measurements[1] : std::nullopt;

  std::vector<FilterState> out;
  out.reserve(measurements.size());
  out.push_back(initialize_filter(*measurements.front(), second, model.dt, init));
  for (std::size_t k = 1; k < measurements.size(); ++k) {
    const std::optional<MalletState> mallet = mallet_track.empty() ? std::nullopt : mallet_track[k - 1];
    FilterState st = predict(out.back(), model, table, mallet);
    if (measurements[k]) st = update(st, *measurements[k], meas);
    out.push_back(st);
  }
  return out;
}

}  // namespace puckplan
