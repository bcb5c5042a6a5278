#pragma once

// Minimal SVG figures: belief rollouts on the table, energy landscapes with
// sampler particles, shot fans, score bars and loss curves.

#include <string>
#include <vector>

#include "puckplan/ebm.hpp"
#include "puckplan/harness.hpp"
#include "puckplan/prediction.hpp"
#include "puckplan/table.hpp"

namespace puckplan {

/// Mean path with 2-sigma position ellipses every `ellipse_every` steps.
std::string svg_rollout(const TableGeometry& table, const std::vector<BeliefTrajectory>& rollouts,
                        std::size_t ellipse_every = 5);

struct ParticleSnapshot {
  std::size_t iteration = 0;
  std::vector<double> particles;
};

/// Energy over U with particle sets of selected iterations underneath.
std::string svg_energy_landscape(const std::vector<double>& u, const VecX& energies,
                                 const std::vector<ParticleSnapshot>& snapshots, double u_hat);

/// Contact points and shooting directions of one policy; scored shots drawn
/// to their goal-line crossing.
std::string svg_shot_fan(const TableGeometry& table, const EvalReport& report, std::size_t policy);

std::string svg_score_bars(const EvalReport& report);

std::string svg_loss_curve(const std::vector<double>& losses);

}  // namespace puckplan
