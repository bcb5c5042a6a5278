#include "puckplan/contact_model.hpp"

namespace puckplan {

ModeSlot slot_of(ModeId mode) {
  switch (mode.kind) {
    case ModeKind::Floating: return ModeSlot::Floating;
    case ModeKind::Wall: return ModeSlot::Wall;
    case ModeKind::Mallet: return ModeSlot::Mallet;
  }
  return ModeSlot::Floating;
}

const char* to_string(ModeSlot slot) {
  switch (slot) {
    case ModeSlot::Floating: return "floating";
    case ModeSlot::Wall: return "wall";
    case ModeSlot::Mallet: return "mallet";
  }
  return "unknown";
}

const ModeParams& PuckModel::require(ModeSlot s) const {
  const ModeParams& p = (*this)[s];
  if (!p.fitted) throw Error(ErrorCode::EmptyMode, std::string("model has no parameters for mode ") + to_string(s));
  return p;
}

ModeSampleSets fragment_dataset(const TrajectoryDataset& data) {
  ModeSampleSets out;
  for (const auto& episode : data.episodes) {
    for (std::size_t k = 0; k + 1 < episode.size(); ++k) {
      const TrajectoryStep& now = episode[k];
      const TrajectoryStep& next = episode[k + 1];
      ModeSample sample;
      sample.mode = now.mode;
      switch (now.mode.kind) {
        case ModeKind::Floating:
          sample.y = next.puck.vel;
          sample.xi = now.puck.vel;
          break;
        case ModeKind::Wall: {
          const ContactFrame frame = wall_frame(now.mode.wall);
          sample.y = frame.to_contact(next.puck.vel);
          sample.xi = frame.to_contact(now.puck.vel);
          break;
        }
        case ModeKind::Mallet: {
          const ContactFrame frame = mallet_frame(now.puck.pos, now.mallet.pos);
          sample.y = frame.to_contact(next.puck.vel);
          sample.xi.resize(4);
          sample.xi << frame.to_contact(now.puck.vel), frame.to_contact(now.mallet.vel);
          break;
        }
      }
      out[slot_of(now.mode)].push_back(std::move(sample));
    }
  }
  return out;
}

ModeParams fit_mode(const std::vector<ModeSample>& samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyMode, "fit_mode: no samples");
  const auto n = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index dim_xi = samples.front().xi.size();
  if (dim_xi != 2 && dim_xi != 4) throw Error(ErrorCode::InvalidArgument, "fit_mode: input must be 2-D or 4-D");

  MatX y(n, 2);
  MatX xi(n, dim_xi);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ModeSample& s = samples[static_cast<std::size_t>(i)];
    if (s.xi.size() != dim_xi) throw Error(ErrorCode::InvalidArgument, "fit_mode: mixed input dimensions");
    y.row(i) = s.y.transpose();
    xi.row(i) = s.xi.transpose();
  }

  const LinearGaussianMap map = condition(fit_joint_gaussian(y, xi));
  ModeParams params;
  params.theta_mat = map.gain.leftCols(2);
  if (dim_xi == 4) params.theta_mat_mallet = map.gain.rightCols(2);
  params.theta_vec = map.offset;
  params.sigma = map.cov;
  params.sample_count = samples.size();
  params.fitted = true;
  return params;
}

FitReport fit_model(const ModeSampleSets& sets, double dt) {
  FitReport report;
  report.model.dt = dt;
  for (ModeSlot slot : kAllSlots) {
    const auto& samples = sets[slot];
    if (samples.empty()) {
      report.skipped.emplace_back(to_string(slot));
      continue;
    }
    report.model[slot] = fit_mode(samples);
  }
  return report;
}

VelocityBelief predict_velocity(const ModeParams& params, const Vec2& puck_vel, const Vec2& mallet_vel) {
  VelocityBelief out;
  out.mean = params.theta_mat * puck_vel + params.theta_mat_mallet * mallet_vel + params.theta_vec;
  out.cov = params.sigma;
  return out;
}

StateSpace state_space(const PuckModel& model, ModeSlot slot, const ContactFrame& frame, const Vec2& mallet_vel) {
  const ModeParams& p = model.require(slot);
  Mat2 gain = p.theta_mat;
  Vec2 offset = p.theta_vec;
  Mat2 sigma = p.sigma;
  if (slot != ModeSlot::Floating) {
    const Mat2& r = frame.rotation;
    gain = r.transpose() * p.theta_mat * r;
    offset = r.transpose() * (p.theta_mat_mallet * (r * mallet_vel) + p.theta_vec);
    sigma = r.transpose() * p.sigma * r;
  }

  StateSpace ss;
  ss.a.setZero();
  ss.a.topLeftCorner<2, 2>().setIdentity();
  ss.a.topRightCorner<2, 2>() = model.dt * Mat2::Identity();
  ss.a.bottomRightCorner<2, 2>() = gain;
  ss.b.tail<2>() = offset;
  ss.q.bottomRightCorner<2, 2>() = 0.5 * (sigma + sigma.transpose());
  return ss;
}

StateSpace state_space_for(const PuckModel& model, ModeId mode, const PuckState& puck,
                           const std::optional<MalletState>& mallet) {
  switch (mode.kind) {
    case ModeKind::Floating: return state_space(model, ModeSlot::Floating);
    case ModeKind::Wall: return state_space(model, ModeSlot::Wall, wall_frame(mode.wall));
    case ModeKind::Mallet:
      if (!mallet) throw Error(ErrorCode::InvalidArgument, "state_space_for: mallet mode without a mallet state");
      return state_space(model, ModeSlot::Mallet, mallet_frame(puck.pos, mallet->pos), mallet->vel);
  }
  return state_space(model, ModeSlot::Floating);
}

Vec2 ModelLaw::next_velocity(ModeId mode, const PuckState& puck, const std::optional<MalletState>& mallet,
                             Rng& rng) const {
  ContactFrame frame;
  Vec2 mallet_vel = Vec2::Zero();
  if (mode.kind == ModeKind::Wall) {
    frame = wall_frame(mode.wall);
  } else if (mode.kind == ModeKind::Mallet && mallet) {
    frame = mallet_frame(puck.pos, mallet->pos);
    mallet_vel = frame.to_contact(mallet->vel);
  } else {
    mode = ModeId::floating();
  }
  const ModeParams& params = model_.require(slot_of(mode));
  const VelocityBelief belief = predict_velocity(params, frame.to_contact(puck.vel), mallet_vel);
  const Vec2 draw = sample_gaussian(belief, 1, rng).front();
  return frame.to_world(draw);
}

void reseat(const TableGeometry& table, ModeId mode, StateBelief& belief) {
  belief.mean.head<2>() = reseat(table, belief.mean.head<2>(), mode);
  if (mode.kind != ModeKind::Wall) return;
  // Position rows run straight through the wall.
  const Vec2 n = wall_frame(mode.wall).normal();
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<2, 2>() -= 2.0 * n * n.transpose();
  belief.cov = m * belief.cov * m.transpose();
}

}  // namespace puckplan
