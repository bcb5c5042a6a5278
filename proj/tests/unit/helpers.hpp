#pragma once

#include <cmath>
#include <random>

#include "puckplan/config.hpp"
#include "puckplan/contact_model.hpp"
#include "puckplan/truth_sim.hpp"

namespace testing {

using namespace puckplan;

inline MatX random_spd(Eigen::Index n, Rng& rng, double floor = 0.1) {
  std::normal_distribution<double> nd;
  MatX a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  return a * a.transpose() + floor * MatX::Identity(n, n);
}

inline MatX random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  MatX a(r, c);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  return a;
}

inline double rel_frob(const MatX& a, const MatX& ref) { return (a - ref).norm() / ref.norm(); }

/// Model fitted once on the default ground truth, shared across test cases.
inline const PuckModel& default_model() {
  static const PuckModel model = [] {
    const RunConfig c;
    Rng rng(1);
    const auto data = collect_dataset(c.table, c.sim, c.collect.episodes, c.collect.steps, rng);
    return fit_model(fragment_dataset(data), c.sim.dt).model;
  }();
  return model;
}

}  // namespace testing
