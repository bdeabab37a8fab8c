#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "omr/diagnostics.hpp"
#include "omr/geometry.hpp"

namespace omr {

/// Row-major 8-bit grayscale image. 0 is black, 255 is white.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, std::uint8_t fill = 255);
  RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }
  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(pixels_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Interleaved 8-bit image as decoded from disk: 1 (gray), 3 (BGR) or
/// 4 (BGRA) channels.
struct ColorImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> bytes;
};

/// Decodes PNG/JPEG bytes. Throws InputFormatError.
ColorImage decode_image(std::span<const std::uint8_t> encoded);
ColorImage read_image_file(const std::filesystem::path& path);

/// Luminance-weighted conversion (0.299 R + 0.587 G + 0.114 B). One-channel
/// input is copied unchanged.
RasterImage to_grayscale(const ColorImage& image);

RasterImage load_grayscale(const std::filesystem::path& path);
void write_png(const RasterImage& image, const std::filesystem::path& path);

struct LineSegment {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double length() const;
  /// Degrees from horizontal in (-90, 90]. Positive means the segment
  /// rises to the right as displayed (y axis points down).
  double angle_deg() const;
};

/// Canny + probabilistic Hough settings for tilt estimation.
struct EdgeParams {
  double blur_sigma = 1.0;
  double canny_low = 50.0;
  double canny_high = 150.0;
  double min_length_fraction = 0.25;  // of image width
  double max_gap = 5.0;
  double theta_step_deg = 0.2;
  double horizontal_limit_deg = 30.0;
};

std::vector<LineSegment> detect_line_segments(const RasterImage& image, const EdgeParams& params = {});

struct TiltEstimate {
  double degrees = 0.0;
  bool found = false;  // false: no line detected, degrees is 0
  LineSegment line;
};

/// Angle of the longest straight line. With `horizontal_only`, lines
/// steeper than `horizontal_limit_deg` are ignored. Equal lengths prefer
/// the smaller absolute angle.
TiltEstimate estimate_tilt(const RasterImage& image, bool horizontal_only, const EdgeParams& params = {});

/// Rotates by -angle about the image center (bilinear, white fill) so a
/// line at `angle_deg` becomes horizontal. Angles beyond +-45 degrees are
/// clamped with a warning.
RasterImage rotate_level(const RasterImage& image, double angle_deg, Diagnostics* diagnostics = nullptr);

/// Pads to a centered square with white, then scales to side x side.
RasterImage resize_square(const RasterImage& image, int side = 416);

/// Anamorphic resize to an exact size.
RasterImage resize_to(const RasterImage& image, int width, int height);

/// Copies `rect` out of `image`; parts outside the image are white.
RasterImage crop_with_fill(const RasterImage& image, const PixelRect& rect);

}  // namespace omr
