#pragma once

#include <algorithm>

namespace omr {

/// Axis-aligned box, y axis pointing down. Used both for normalized
/// [0,1] coordinates and for pixel coordinates; the owner decides which.
struct Box {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  static Box from_center(double cx, double cy, double w, double h) {
    return {cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0};
  }

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  double cx() const { return (left + right) / 2.0; }
  double cy() const { return (top + bottom) / 2.0; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }

  Box scaled(double sx, double sy) const { return {left * sx, top * sy, right * sx, bottom * sy}; }

  friend bool operator==(const Box&, const Box&) = default;
};

inline double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

/// Horizontal intersection as a fraction of the narrower box width.
inline double horizontal_overlap_ratio(const Box& a, const Box& b) {
  const double narrower = std::min(a.width(), b.width());
  if (narrower <= 0.0) return 0.0;
  return interval_overlap(a.left, a.right, b.left, b.right) / narrower;
}

/// Vertical intersection as a fraction of the shorter box height.
inline double vertical_overlap_ratio(const Box& a, const Box& b) {
  const double shorter = std::min(a.height(), b.height());
  if (shorter <= 0.0) return 0.0;
  return interval_overlap(a.top, a.bottom, b.top, b.bottom) / shorter;
}

inline double iou(const Box& a, const Box& b) {
  const double inter = interval_overlap(a.left, a.right, b.left, b.right) *
                       interval_overlap(a.top, a.bottom, b.top, b.bottom);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

/// Integer pixel rectangle.
struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

}  // namespace omr
