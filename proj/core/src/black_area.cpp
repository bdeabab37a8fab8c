#include <algorithm>
#include <cmath>
#include <limits>

#include "omr/staffref.hpp"

namespace omr {

namespace {

constexpr std::int32_t kHorizontalSum = 256;
constexpr std::int32_t kVerticalSum = 2048;

// Gaussian kernel quantized to integers summing exactly to `total`. sigma
// follows the usual default for a given aperture when not supplied.
std::vector<std::int32_t> quantized_gaussian(int size, double sigma, std::int32_t total) {
  std::vector<double> g(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double x = i - c;
    g[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += g[static_cast<std::size_t>(i)];
  }
  std::vector<std::int32_t> w(static_cast<std::size_t>(size));
  std::int32_t acc = 0;
  for (int i = 0; i < size; ++i) {
    w[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(std::lround(g[static_cast<std::size_t>(i)] / sum * total));
    acc += w[static_cast<std::size_t>(i)];
  }
  w[static_cast<std::size_t>(size / 2)] += total - acc;
  return w;
}

double default_sigma(int size) { return 0.3 * ((size - 1) * 0.5 - 1.0) + 0.8; }

}  // namespace

BlackAreaScorer::BlackAreaScorer(const RasterImage& unit, const ScoreParams& params)
    : width_(unit.width()), height_(unit.height()), factor_(std::max(1, params.supersample)),
      line_thickness_(params.line_thickness) {
  if (unit.empty()) throw std::invalid_argument("BlackAreaScorer: empty unit");
  if (params.block_size < 3 || params.block_size % 2 == 0) {
    throw std::invalid_argument("BlackAreaScorer: block size must be odd and >= 3");
  }
  rows_ = height_ * factor_;
  const int up_scale = 2 * factor_;  // interpolation weights are multiples of 1/(2S)
  const auto W = static_cast<std::size_t>(width_);

  // Horizontal pass at native resolution.
  const int hsize = params.block_size;
  const auto weights_h = quantized_gaussian(hsize, default_sigma(hsize), kHorizontalSum);
  const int rh = hsize / 2;
  auto& hb_native = hblur_native_;
  hb_native.resize(W * static_cast<std::size_t>(height_));
  for (int y = 0; y < height_; ++y) {
    const auto row = unit.row(y);
    auto* out = hb_native.data() + static_cast<std::size_t>(y) * W;
    for (int x = 0; x < width_; ++x) {
      std::int32_t acc = 0;
      for (int k = -rh; k <= rh; ++k) {
        acc += weights_h[static_cast<std::size_t>(k + rh)] * row[static_cast<std::size_t>(std::clamp(x + k, 0, width_ - 1))];
      }
      out[x] = acc;
    }
  }

  // Vertical oversampling by linear interpolation. It commutes with the
  // horizontal pass, so the blurred rows interpolate the same way.
  taps_.resize(static_cast<std::size_t>(rows_));
  for (int j = 0; j < rows_; ++j) {
    const int num = 2 * j + 1 - factor_;  // position * 2S in pixel-center coordinates
    const int r0 = static_cast<int>(std::floor(static_cast<double>(num) / up_scale));
    taps_[static_cast<std::size_t>(j)] = {std::clamp(r0, 0, height_ - 1), std::clamp(r0 + 1, 0, height_ - 1),
                                          num - r0 * up_scale};
  }

  // Vertical pass on the oversampled grid. Each oversampled row is a
  // combination of two native rows, so the kernel is folded onto native
  // rows first; integer arithmetic keeps the result identical.
  int vsize = params.block_size * factor_;
  if (vsize % 2 == 0) ++vsize;
  weights_v_ = quantized_gaussian(vsize, default_sigma(params.block_size) * factor_, kVerticalSum);
  radius_v_ = vsize / 2;
  const std::int64_t offset_scaled = std::llround(params.offset * up_scale * kHorizontalSum * kVerticalSum);
  constexpr std::int64_t mean_scale = static_cast<std::int64_t>(kHorizontalSum) * kVerticalSum;
  slack_.resize(W * static_cast<std::size_t>(rows_));
  row_black_.assign(static_cast<std::size_t>(rows_), 0);
  std::vector<std::int32_t> coeff(static_cast<std::size_t>(height_), 0);
  std::vector<std::int32_t> mean(W);
  for (int j = 0; j < rows_; ++j) {
    int first = height_;
    int last = -1;
    for (int k = -radius_v_; k <= radius_v_; ++k) {
      const auto [lo, hi, a] = taps_[static_cast<std::size_t>(std::clamp(j + k, 0, rows_ - 1))];
      const std::int32_t w = weights_v_[static_cast<std::size_t>(k + radius_v_)];
      coeff[static_cast<std::size_t>(lo)] += w * (up_scale - a);
      coeff[static_cast<std::size_t>(hi)] += w * a;
      first = std::min(first, lo);
      last = std::max(last, hi);
    }
    std::fill(mean.begin(), mean.end(), 0);
    for (int n = first; n <= last; ++n) {
      const std::int32_t c = coeff[static_cast<std::size_t>(n)];
      coeff[static_cast<std::size_t>(n)] = 0;
      if (c == 0) continue;
      const auto* src = hb_native.data() + static_cast<std::size_t>(n) * W;
      for (std::size_t x = 0; x < W; ++x) mean[x] += c * src[x];
    }

    const auto [lo, hi, a] = taps_[static_cast<std::size_t>(j)];
    const auto src_lo = unit.row(lo);
    const auto src_hi = unit.row(hi);
    auto* slack = slack_.data() + static_cast<std::size_t>(j) * W;
    std::int32_t count = 0;
    for (std::size_t x = 0; x < W; ++x) {
      const std::int32_t u = src_lo[x] * (up_scale - a) + src_hi[x] * a;
      const std::int64_t s =
          u == 0 ? std::numeric_limits<std::int32_t>::max() : mean[x] - offset_scaled - u * mean_scale;
      slack[x] = static_cast<std::int32_t>(
          std::clamp<std::int64_t>(s, std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::max()));
      count += 0 < slack[x] ? 1 : 0;
    }
    row_black_[static_cast<std::size_t>(j)] = count;
    base_black_ += count;
  }
}

double BlackAreaScorer::base_score() const { return static_cast<double>(base_black_) / factor_; }

std::pair<int, int> BlackAreaScorer::line_rows(double y) const {
  const double center = y * height_ * factor_;
  const double half = line_thickness_ * factor_ / 2.0;
  const int first = static_cast<int>(std::ceil(center - half - 0.5));
  const int last = static_cast<int>(std::ceil(center + half - 0.5));
  return {std::clamp(first, 0, rows_), std::clamp(last, 0, rows_)};
}

double BlackAreaScorer::score(const StaffGeometry& geometry) const {
  const auto W = static_cast<std::size_t>(width_);
  std::vector<char> drawn(static_cast<std::size_t>(rows_), 0);
  std::vector<char> affected(static_cast<std::size_t>(rows_), 0);
  for (const double y : geometry.line_ys) {
    const auto [first, last] = line_rows(y);
    for (int j = first; j < last; ++j) drawn[static_cast<std::size_t>(j)] = 1;
    if (first < last) {
      const int a0 = std::max(0, first - radius_v_);
      const int a1 = std::min(rows_, last + radius_v_);
      for (int j = a0; j < a1; ++j) affected[static_cast<std::size_t>(j)] = 1;
    }
  }

  // Horizontal sums of the drawn rows, interpolated once.
  const int up_scale = 2 * factor_;
  std::vector<int> drawn_slot(static_cast<std::size_t>(rows_), -1);
  std::vector<std::int32_t> drawn_rows;
  drawn_rows.reserve(W * static_cast<std::size_t>(std::count(drawn.begin(), drawn.end(), 1)));
  for (int r = 0; r < rows_; ++r) {
    if (!drawn[static_cast<std::size_t>(r)]) continue;
    drawn_slot[static_cast<std::size_t>(r)] = static_cast<int>(drawn_rows.size() / W);
    const auto [lo, hi, a] = taps_[static_cast<std::size_t>(r)];
    const auto* hb_lo = hblur_native_.data() + static_cast<std::size_t>(lo) * W;
    const auto* hb_hi = hblur_native_.data() + static_cast<std::size_t>(hi) * W;
    for (std::size_t x = 0; x < W; ++x) drawn_rows.push_back(hb_lo[x] * (up_scale - a) + hb_hi[x] * a);
  }

  std::vector<std::int32_t> delta(W);
  std::int64_t black = base_black_;
  for (int q = 0; q < rows_; ++q) {
    if (!affected[static_cast<std::size_t>(q)]) continue;
    if (drawn[static_cast<std::size_t>(q)]) {
      // Drawn pixels are pure black.
      black += width_ - row_black_[static_cast<std::size_t>(q)];
      continue;
    }
    std::fill(delta.begin(), delta.end(), 0);
    for (int k = -radius_v_; k <= radius_v_; ++k) {
      const int r = std::clamp(q + k, 0, rows_ - 1);
      const int slot = drawn_slot[static_cast<std::size_t>(r)];
      if (slot < 0) continue;
      const std::int32_t w = weights_v_[static_cast<std::size_t>(k + radius_v_)];
      const auto* src = drawn_rows.data() + static_cast<std::size_t>(slot) * W;
      for (std::size_t x = 0; x < W; ++x) delta[x] += w * src[x];
    }
    const auto* slack = slack_.data() + static_cast<std::size_t>(q) * W;
    std::int32_t count = 0;
    for (std::size_t x = 0; x < W; ++x) count += delta[x] < slack[x] ? 1 : 0;
    black += count - row_black_[static_cast<std::size_t>(q)];
  }
  return static_cast<double>(black) / factor_;
}

}  // namespace omr
