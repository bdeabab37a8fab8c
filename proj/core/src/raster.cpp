#include "omr/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cv_bridge.hpp"

namespace omr {

RasterImage::RasterImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), fill) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("RasterImage: dimensions must be positive");
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("RasterImage: dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("RasterImage: pixel count does not match dimensions");
  }
}

namespace {

ColorImage from_mat(const cv::Mat& decoded) {
  cv::Mat m = decoded;
  if (m.depth() != CV_8U) m.convertTo(m, CV_8U, m.depth() == CV_16U ? 1.0 / 257.0 : 1.0);
  if (!m.isContinuous()) m = m.clone();
  ColorImage out;
  out.width = m.cols;
  out.height = m.rows;
  out.channels = m.channels();
  out.bytes.assign(m.data, m.data + m.total() * m.elemSize());
  return out;
}

}  // namespace

ColorImage decode_image(std::span<const std::uint8_t> encoded) {
  if (encoded.empty()) throw InputFormatError("empty image data");
  const cv::Mat buffer(1, static_cast<int>(encoded.size()), CV_8U, const_cast<std::uint8_t*>(encoded.data()));
  const cv::Mat decoded = cv::imdecode(buffer, cv::IMREAD_UNCHANGED);
  if (decoded.empty() || decoded.cols == 0 || decoded.rows == 0) {
    throw InputFormatError("could not decode image data");
  }
  return from_mat(decoded);
}

ColorImage read_image_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFormatError("cannot open image file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const InputFormatError&) {
    throw InputFormatError("could not decode image file " + path.string());
  }
}

RasterImage to_grayscale(const ColorImage& image) {
  if (image.width <= 0 || image.height <= 0) throw InputFormatError("image has zero dimensions");
  const int type = CV_MAKETYPE(CV_8U, image.channels);
  const cv::Mat src(image.height, image.width, type, const_cast<std::uint8_t*>(image.bytes.data()));
  cv::Mat gray;
  switch (image.channels) {
    case 1: gray = src; break;
    case 3: cv::cvtColor(src, gray, cv::COLOR_BGR2GRAY); break;
    case 4: cv::cvtColor(src, gray, cv::COLOR_BGRA2GRAY); break;
    default: throw InputFormatError("unsupported channel count " + std::to_string(image.channels));
  }
  return detail::to_raster(gray);
}

RasterImage load_grayscale(const std::filesystem::path& path) { return to_grayscale(read_image_file(path)); }

void write_png(const RasterImage& image, const std::filesystem::path& path) {
  if (!cv::imwrite(path.string(), detail::as_mat(image))) {
    throw Error("failed to write " + path.string());
  }
}

double LineSegment::length() const { return std::hypot(x2 - x1, y2 - y1); }

double LineSegment::angle_deg() const {
  double deg = std::atan2(-(y2 - y1), x2 - x1) * 180.0 / std::numbers::pi;
  while (deg > 90.0) deg -= 180.0;
  while (deg <= -90.0) deg += 180.0;
  return deg;
}

std::vector<LineSegment> detect_line_segments(const RasterImage& image, const EdgeParams& params) {
  const cv::Mat src = detail::as_mat(image);
  cv::Mat blurred;
  cv::GaussianBlur(src, blurred, cv::Size(0, 0), params.blur_sigma);
  cv::Mat edges;
  cv::Canny(blurred, edges, params.canny_low, params.canny_high);

  const double min_length = std::max(2.0, params.min_length_fraction * image.width());
  const int votes = std::max(10, static_cast<int>(min_length * 0.5));
  std::vector<cv::Vec4i> raw;
  cv::HoughLinesP(edges, raw, 1.0, params.theta_step_deg * std::numbers::pi / 180.0, votes, min_length,
                  params.max_gap);

  std::vector<LineSegment> out;
  out.reserve(raw.size());
  for (const auto& l : raw) {
    LineSegment s{static_cast<double>(l[0]), static_cast<double>(l[1]), static_cast<double>(l[2]),
                  static_cast<double>(l[3])};
    if (s.length() > 0.0) out.push_back(s);
  }
  return out;
}

TiltEstimate estimate_tilt(const RasterImage& image, bool horizontal_only, const EdgeParams& params) {
  TiltEstimate best;
  double best_length = -1.0;
  for (const auto& seg : detect_line_segments(image, params)) {
    const double angle = seg.angle_deg();
    if (horizontal_only && std::abs(angle) > params.horizontal_limit_deg) continue;
    const double length = seg.length();
    const bool longer = length > best_length;
    const bool tie_but_flatter = length == best_length && std::abs(angle) < std::abs(best.degrees);
    if (longer || tie_but_flatter) {
      best_length = length;
      best = {angle, true, seg};
    }
  }
  return best;
}

RasterImage rotate_level(const RasterImage& image, double angle_deg, Diagnostics* diagnostics) {
  if (std::abs(angle_deg) >= 45.0) {
    const double clamped = std::clamp(angle_deg, -45.0, 45.0);
    report(diagnostics, "rotation_clamped",
           "rotation of " + std::to_string(angle_deg) + " deg clamped to " + std::to_string(clamped));
    angle_deg = clamped;
  }
  if (angle_deg == 0.0) return image;

  const cv::Mat src = detail::as_mat(image);
  const cv::Point2f center(static_cast<float>(image.width() - 1) / 2.0F, static_cast<float>(image.height() - 1) / 2.0F);
  // OpenCV treats positive angles as counter-clockwise on screen.
  const cv::Mat rot = cv::getRotationMatrix2D(center, -angle_deg, 1.0);
  cv::Mat dst;
  cv::warpAffine(src, dst, rot, src.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar(255));
  return detail::to_raster(dst);
}

RasterImage resize_to(const RasterImage& image, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("resize_to: size must be positive");
  if (image.width() == width && image.height() == height) return image;
  const cv::Mat src = detail::as_mat(image);
  cv::Mat dst;
  const bool shrinking = width < image.width() && height < image.height();
  cv::resize(src, dst, cv::Size(width, height), 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  return detail::to_raster(dst);
}

RasterImage resize_square(const RasterImage& image, int side) {
  if (side <= 0) throw std::invalid_argument("resize_square: side must be positive");
  const int extent = std::max(image.width(), image.height());
  RasterImage padded(extent, extent, 255);
  const int ox = (extent - image.width()) / 2;
  const int oy = (extent - image.height()) / 2;
  for (int y = 0; y < image.height(); ++y) {
    const auto src = image.row(y);
    std::copy(src.begin(), src.end(), padded.pixels().begin() + static_cast<std::ptrdiff_t>(y + oy) * extent + ox);
  }
  return resize_to(padded, side, side);
}

RasterImage crop_with_fill(const RasterImage& image, const PixelRect& rect) {
  if (rect.width <= 0 || rect.height <= 0) throw std::invalid_argument("crop_with_fill: empty rectangle");
  RasterImage out(rect.width, rect.height, 255);
  const int x0 = std::max(rect.x, 0);
  const int x1 = std::min(rect.x + rect.width, image.width());
  if (x1 <= x0) return out;
  for (int y = std::max(rect.y, 0); y < std::min(rect.y + rect.height, image.height()); ++y) {
    const auto src = image.row(y);
    std::copy(src.begin() + x0, src.begin() + x1,
              out.pixels().begin() + static_cast<std::ptrdiff_t>(y - rect.y) * rect.width + (x0 - rect.x));
  }
  return out;
}

}  // namespace omr
