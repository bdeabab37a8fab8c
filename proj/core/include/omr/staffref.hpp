#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "omr/raster.hpp"

namespace omr {

/// Grid of (alpha, beta) candidates; both ranges include their endpoints.
struct SearchGrid {
  double alpha_min = -0.03;
  double alpha_max = 0.03;
  double alpha_step = 0.01;
  double beta_min = -0.005;
  double beta_max = 0.005;
  double beta_step = 0.001;

  std::vector<double> alphas() const;
  std::vector<double> betas() const;
};

/// Vertical layout of a measure unit: the staff sits in the middle with
/// `margin_factor` staff heights of margin above and below; the unit
/// height is 1.0.
struct StaffLayout {
  double margin_factor = 1.2;

  double staff_height() const { return 1.0 / (1.0 + 2.0 * margin_factor); }
  double base_gap() const { return staff_height() / 4.0; }
};

/// Five staff lines in normalized unit ordinates (0 = top, 1 = bottom).
/// alpha shifts the middle line off the unit center; beta is added to
/// every line gap.
struct StaffGeometry {
  double alpha = 0.0;
  double beta = 0.0;
  double base_gap = 0.0;
  std::array<double, 5> line_ys{};  // top to bottom

  double middle() const { return line_ys[2]; }
  double gap() const { return base_gap + beta; }
  /// Ordinate of a staff position (half-gap steps, up positive).
  double position_y(int position) const { return middle() - position * gap() / 2.0; }
  /// Line ordinates continued into the margins (ledger lines included),
  /// restricted to [0,1].
  std::vector<double> extended_line_ys() const;
};

StaffGeometry simulate_lines(double alpha, double beta, const StaffLayout& layout = {});

struct ScoreParams {
  int block_size = 15;          // adaptive threshold window, unit pixels
  double offset = 4.0;          // subtracted from the local mean
  double line_thickness = 2.0;  // simulated line, unit pixels
  int supersample = 4;          // vertical oversampling factor
};

/// Black area after superimposing simulated staff lines and applying a
/// Gaussian-weighted adaptive threshold.
///
/// The unit is oversampled vertically (linear interpolation) so that
/// sub-pixel shifts of the simulated lines change the result. A pixel is
/// black when it is pure black or darker than its local weighted mean
/// minus `offset`. Weighted means use fixed-point integer kernels, so the
/// incremental evaluation in `score()` is exact. Scores are reported in
/// unit pixels (oversampled count divided by the factor).
class BlackAreaScorer {
 public:
  explicit BlackAreaScorer(const RasterImage& unit, const ScoreParams& params = {});

  /// Score of the unmodified unit.
  double base_score() const;
  double score(const StaffGeometry& geometry) const;

  int unit_width() const { return width_; }
  int unit_height() const { return height_; }

  /// Oversampled rows [first, last) covered by a line at normalized `y`.
  std::pair<int, int> line_rows(double y) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int factor_ = 1;
  int rows_ = 0;  // oversampled height
  int radius_v_ = 0;
  double line_thickness_ = 2.0;
  struct Tap {
    int lo;
    int hi;
    int a;
  };
  // Horizontal weighted sums of the unit at native resolution.
  std::vector<std::int32_t> hblur_native_;
  std::vector<Tap> taps_;  // oversampled row -> native rows and weight
  std::vector<std::int32_t> weights_v_;
  // Per oversampled pixel: the largest mean reduction that keeps it
  // white, i.e. black iff reduction < slack. Pure black pixels get the
  // maximum value.
  std::vector<std::int32_t> slack_;
  std::vector<std::int32_t> row_black_;
  std::int64_t base_black_ = 0;
};

double black_area_score(const RasterImage& unit, const StaffGeometry& geometry, const ScoreParams& params = {});

struct StaffFit {
  double alpha = 0.0;
  double beta = 0.0;
  StaffGeometry geometry;
  double score = 0.0;
  bool degenerate = false;  // every candidate scored the same; (0,0) returned
};

/// Exhaustive grid search for the minimum black area. Ties prefer smaller
/// |alpha|, then smaller |beta|.
StaffFit fit_staff(const RasterImage& unit, const SearchGrid& grid = {}, const StaffLayout& layout = {},
                   const ScoreParams& params = {});

inline constexpr int kMaxStaffPosition = 12;

/// round((middle - y) / (gap / 2)); nullopt beyond +-limit.
std::optional<int> y_to_position(const StaffGeometry& geometry, double y, int limit = kMaxStaffPosition);

/// Writes a color overlay: middle line red, other lines and their
/// extensions blue.
void write_overlay_png(const RasterImage& unit, const StaffGeometry& geometry, const std::filesystem::path& path);

}  // namespace omr
