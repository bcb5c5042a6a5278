#include "puckplan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace puckplan {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

class Canvas {
 public:
  Canvas(double width, double height) : w_(width), h_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke = "none") {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\" fill=\"" + fill + "\"/>\n";
  }
  void ellipse(double x, double y, double rx, double ry, double deg, const std::string& stroke) {
    body_ += "<ellipse cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" rx=\"" + num(rx) + "\" ry=\"" + num(ry) +
             "\" transform=\"rotate(" + num(deg) + " " + num(x) + " " + num(y) + ")\" fill=\"none\" stroke=\"" +
             stroke + "\" stroke-width=\"0.8\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width = 1.5) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\" points=\"";
    for (const auto& [x, y] : pts) body_ += num(x) + "," + num(y) + " ";
    body_ += "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 12, const std::string& anchor = "start") {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
             std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) + "\" height=\"" + num(h_) +
           "\" viewBox=\"0 0 " + num(w_) + " " + num(h_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
  }

 private:
  double w_, h_;
  std::string body_;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

/// Table drawn with x to the right; pixels per metre `s`, margin `m`.
struct TableView {
  const TableGeometry& t;
  double s = 400.0;
  double m = 20.0;

  double px(double x) const { return m + s * x; }
  double py(double y) const { return m + s * (t.half_width() - y); }
  double width() const { return 2 * m + s * t.length; }
  double height() const { return 2 * m + s * t.width; }

  void draw(Canvas& c) const {
    c.rect(px(0), py(t.half_width()), s * t.length, s * t.width, "#eef4fb", "#333");
    const double g = 0.5 * t.goal_width;
    c.line(px(t.length), py(g), px(t.length), py(-g), "#2ca02c", 4);
    c.line(px(0), py(g), px(0), py(-g), "#999", 4);
    c.line(px(0.5 * t.length), py(t.half_width()), px(0.5 * t.length), py(-t.half_width()), "#bbb");
  }
};

template <typename Fn>
std::pair<double, double> range_of(const std::vector<double>& v, Fn pad) {
  if (v.empty()) return {0.0, 1.0};
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double a = *lo, b = *hi;
  if (b - a < 1e-12) {
    a -= 0.5;
    b += 0.5;
  }
  const double p = pad(b - a);
  return {a - p, b + p};
}

}  // namespace

std::string svg_rollout(const TableGeometry& table, const std::vector<BeliefTrajectory>& rollouts,
                        std::size_t ellipse_every) {
  const TableView view{table};
  Canvas c(view.width(), view.height());
  view.draw(c);
  for (std::size_t r = 0; r < rollouts.size(); ++r) {
    const std::string color = kPalette[r % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    const auto& beliefs = rollouts[r].beliefs;
    for (std::size_t k = 0; k < beliefs.size(); ++k) {
      const auto& b = beliefs[k];
      pts.emplace_back(view.px(b.mean(0)), view.py(b.mean(1)));
      if (ellipse_every == 0 || k % ellipse_every != 0) continue;
      Eigen::SelfAdjointEigenSolver<Mat2> eig(Mat2(b.cov.topLeftCorner<2, 2>()));
      const Vec2 ev = eig.eigenvalues().cwiseMax(0.0);
      const Vec2 axis = eig.eigenvectors().col(1);
      const double deg = -std::atan2(axis.y(), axis.x()) * 180.0 / std::numbers::pi;
      c.ellipse(pts.back().first, pts.back().second, 2.0 * view.s * std::sqrt(ev(1)), 2.0 * view.s * std::sqrt(ev(0)),
                deg, color);
    }
    c.polyline(pts, color);
    if (!beliefs.empty()) c.circle(pts.front().first, pts.front().second, view.s * table.puck_radius, color);
  }
  return c.str();
}

std::string svg_energy_landscape(const std::vector<double>& u, const VecX& energies,
                                 const std::vector<ParticleSnapshot>& snapshots, double u_hat) {
  const double w = 640, plot_h = 300, strip = 24, m = 40;
  const double h = plot_h + m * 2 + strip * static_cast<double>(snapshots.size());
  Canvas c(w, h);
  const std::vector<double> e(energies.data(), energies.data() + energies.size());
  const auto [ulo, uhi] = range_of(u, [](double) { return 0.0; });
  const auto [elo, ehi] = range_of(e, [](double d) { return 0.05 * d; });
  auto px = [&, ulo = ulo, uhi = uhi](double v) { return m + (w - 2 * m) * (v - ulo) / (uhi - ulo); };
  auto py = [&, elo = elo, ehi = ehi](double v) { return m + plot_h * (1.0 - (v - elo) / (ehi - elo)); };
  c.rect(m, m, w - 2 * m, plot_h, "none", "#333");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < u.size(); ++i) pts.emplace_back(px(u[i]), py(e[i]));
  c.polyline(pts, "#1f77b4");
  c.line(px(u_hat), m, px(u_hat), m + plot_h, "#d62728", 1.5);
  c.text(w / 2, h - 6, "shooting angle u [rad]", 12, "middle");
  c.text(m, m - 8, "energy");
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    const double y = m + plot_h + strip * (static_cast<double>(s) + 0.8);
    c.text(4, y + 4, "j=" + std::to_string(snapshots[s].iteration), 10);
    for (double p : snapshots[s].particles) c.circle(px(p), y, 2.5, kPalette[(s + 1) % std::size(kPalette)]);
  }
  return c.str();
}

std::string svg_shot_fan(const TableGeometry& table, const EvalReport& report, std::size_t policy) {
  const TableView view{table};
  Canvas c(view.width(), view.height() + 20);
  view.draw(c);
  std::string name;
  if (policy < report.policies.size()) name = report.policies[policy].name;
  c.text(view.m, view.height() + 12, name);
  for (const auto& s : report.shots) {
    if (s.policy != policy) continue;
    const double x0 = view.px(s.truth(0));
    const double y0 = view.py(s.truth(1));
    if (s.scored) {
      c.line(x0, y0, view.px(table.length), view.py(s.crossing_y), "#2ca02c", 0.8);
    } else {
      const double len = 0.25;
      c.line(x0, y0, view.px(s.truth(0) + len * std::cos(s.u)), view.py(s.truth(1) + len * std::sin(s.u)), "#d62728", 0.8);
    }
    c.circle(x0, y0, 2.5, "#333");
  }
  return c.str();
}

std::string svg_score_bars(const EvalReport& report) {
  const double bar = 80, gap = 40, m = 40, plot_h = 240;
  const double w = 2 * m + static_cast<double>(report.policies.size()) * (bar + gap);
  Canvas c(w, plot_h + 2 * m);
  c.line(m, m + plot_h, w - m, m + plot_h, "#333");
  for (std::size_t i = 0; i < report.policies.size(); ++i) {
    const auto& p = report.policies[i];
    const double x = m + gap / 2 + static_cast<double>(i) * (bar + gap);
    const double hgt = plot_h * p.score;
    c.rect(x, m + plot_h - hgt, bar, hgt, kPalette[i % std::size(kPalette)]);
    c.text(x + bar / 2, m + plot_h - hgt - 4, num(p.score), 12, "middle");
    c.text(x + bar / 2, m + plot_h + 16, p.name, 12, "middle");
  }
  c.text(m, m - 10, "score");
  return c.str();
}

std::string svg_loss_curve(const std::vector<double>& losses) {
  const double w = 640, h = 360, m = 40;
  Canvas c(w, h);
  c.rect(m, m, w - 2 * m, h - 2 * m, "none", "#333");
  const auto [lo, hi] = range_of(losses, [](double d) { return 0.05 * d; });
  const double n = std::max<double>(1.0, static_cast<double>(losses.size()) - 1.0);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    pts.emplace_back(m + (w - 2 * m) * static_cast<double>(i) / n, m + (h - 2 * m) * (1.0 - (losses[i] - lo) / (hi - lo)));
  }
  c.polyline(pts, "#1f77b4");
  c.text(w / 2, h - 8, "epoch", 12, "middle");
  c.text(m, m - 8, "InfoNCE loss (" + num(lo) + " .. " + num(hi) + ")");
  return c.str();
}

}  // namespace puckplan
