#pragma once

// Internal: zero-copy views between RasterImage and cv::Mat.

#include <opencv2/core.hpp>

#include "omr/raster.hpp"

namespace omr::detail {

/// Read-only view; callers must not write through it.
inline cv::Mat as_mat(const RasterImage& image) {
  return {image.height(), image.width(), CV_8UC1, const_cast<std::uint8_t*>(image.pixels().data())};
}

inline RasterImage to_raster(const cv::Mat& gray) {
  CV_Assert(gray.type() == CV_8UC1);
  const cv::Mat m = gray.isContinuous() ? gray : gray.clone();
  return {m.cols, m.rows, std::vector<std::uint8_t>(m.data, m.data + m.total())};
}

}  // namespace omr::detail
