#include "omr/staffref.hpp"

#include <cmath>
#include <tuple>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cv_bridge.hpp"

namespace omr {

namespace {

// Values are computed as integer/denominator when the step is a clean
// reciprocal, so grid points compare equal to their decimal literals.
std::vector<double> grid_values(double min, double max, double step) {
  if (!(step > 0.0) || max < min) throw std::invalid_argument("SearchGrid: invalid range or step");
  const auto count = static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
  const double inv = 1.0 / step;
  const bool clean = std::abs(inv - std::round(inv)) < 1e-9;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  const double first = std::round(min / step);
  for (int k = 0; k < count; ++k) {
    out.push_back(clean ? (first + k) / std::round(inv) : min + k * step);
  }
  return out;
}

}  // namespace

std::vector<double> SearchGrid::alphas() const { return grid_values(alpha_min, alpha_max, alpha_step); }
std::vector<double> SearchGrid::betas() const { return grid_values(beta_min, beta_max, beta_step); }

std::vector<double> StaffGeometry::extended_line_ys() const {
  std::vector<double> out;
  const double g = gap();
  if (!(g > 0.0)) return out;
  const int k_min = static_cast<int>(std::ceil((0.0 - middle()) / g));
  const int k_max = static_cast<int>(std::floor((1.0 - middle()) / g));
  for (int k = k_min; k <= k_max; ++k) out.push_back(middle() + k * g);
  return out;
}

StaffGeometry simulate_lines(double alpha, double beta, const StaffLayout& layout) {
  StaffGeometry g;
  g.alpha = alpha;
  g.beta = beta;
  g.base_gap = layout.base_gap();
  const double middle = 0.5 + alpha;
  for (int i = 0; i < 5; ++i) g.line_ys[static_cast<std::size_t>(i)] = middle + (i - 2) * g.gap();
  return g;
}

double black_area_score(const RasterImage& unit, const StaffGeometry& geometry, const ScoreParams& params) {
  return BlackAreaScorer(unit, params).score(geometry);
}

StaffFit fit_staff(const RasterImage& unit, const SearchGrid& grid, const StaffLayout& layout,
                   const ScoreParams& params) {
  const BlackAreaScorer scorer(unit, params);
  const auto alphas = grid.alphas();
  const auto betas = grid.betas();

  StaffFit best;
  bool have = false;
  double first_score = 0.0;
  bool all_equal = true;
  for (const double a : alphas) {
    for (const double b : betas) {
      const auto geometry = simulate_lines(a, b, layout);
      const double s = scorer.score(geometry);
      if (!have) first_score = s;
      all_equal = all_equal && s == first_score;
      const auto key = std::make_tuple(s, std::abs(a), std::abs(b), a, b);
      const auto best_key = std::make_tuple(best.score, std::abs(best.alpha), std::abs(best.beta), best.alpha, best.beta);
      if (!have || key < best_key) {
        best = {a, b, geometry, s, false};
        have = true;
      }
    }
  }
  best.degenerate = all_equal;
  return best;
}

std::optional<int> y_to_position(const StaffGeometry& geometry, double y, int limit) {
  const double half_gap = geometry.gap() / 2.0;
  if (!(half_gap > 0.0)) return std::nullopt;
  const long pos = std::lround((geometry.middle() - y) / half_gap);
  if (std::labs(pos) > limit) return std::nullopt;
  return static_cast<int>(pos);
}

void write_overlay_png(const RasterImage& unit, const StaffGeometry& geometry, const std::filesystem::path& path) {
  cv::Mat color;
  cv::cvtColor(detail::as_mat(unit), color, cv::COLOR_GRAY2BGR);
  const int w = unit.width();
  const double h = unit.height();
  for (const double y : geometry.extended_line_ys()) {
    const int py = static_cast<int>(std::lround(y * h));
    const bool middle = std::abs(y - geometry.middle()) < 1e-12;
    cv::line(color, {0, py}, {w - 1, py}, middle ? cv::Scalar(0, 0, 255) : cv::Scalar(255, 0, 0), 1);
  }
  if (!cv::imwrite(path.string(), color)) throw Error("failed to write " + path.string());
}

}  // namespace omr
