#include "omr/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "omr/parallel.hpp"

namespace omr {

namespace {

auto canonical_key(const MeasureBox& b) {
  return std::make_tuple(b.bbox.top, b.bbox.left, b.bbox.bottom, b.bbox.right, static_cast<int>(b.label),
                         b.confidence);
}

bool canonical_less(const MeasureBox& a, const MeasureBox& b) { return canonical_key(a) < canonical_key(b); }

bool is_seed(Label l) { return l == Label::x0 || l == Label::x1; }

}  // namespace

std::vector<MeasureBox> measure_boxes_from_detections(std::span<const Detection> detections, int page_width,
                                                      int page_height) {
  std::vector<MeasureBox> out;
  for (const auto& d : detections) {
    if (d.category != Category::measure) continue;
    out.push_back({d.label, d.box().scaled(page_width, page_height), d.confidence});
  }
  return out;
}

Alignment align_measures(std::span<const MeasureBox> boxes, const AlignOptions& options) {
  std::vector<MeasureBox> sorted(boxes.begin(), boxes.end());
  std::sort(sorted.begin(), sorted.end(), canonical_less);

  Alignment result;

  // Duplicate suppression, strongest first.
  std::vector<std::size_t> by_confidence(sorted.size());
  std::iota(by_confidence.begin(), by_confidence.end(), 0);
  std::stable_sort(by_confidence.begin(), by_confidence.end(),
                   [&](std::size_t a, std::size_t b) { return sorted[a].confidence > sorted[b].confidence; });
  std::vector<bool> keep(sorted.size(), false);
  std::vector<std::size_t> kept;
  for (const std::size_t i : by_confidence) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou(sorted[i].bbox, sorted[k].bbox) > options.duplicate_iou;
    });
    if (dup) {
      result.rejected.push_back({sorted[i], RejectReason::duplicate});
    } else {
      keep[i] = true;
      kept.push_back(i);
    }
  }

  std::vector<MeasureBox> seeds;
  std::vector<MeasureBox> others;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!keep[i]) continue;
    (is_seed(sorted[i].label) ? seeds : others).push_back(sorted[i]);
  }
  if (seeds.empty()) throw AlignmentError("no clef-bearing measure (x0/x1) to seed rows");

  std::stable_sort(seeds.begin(), seeds.end(), [](const MeasureBox& a, const MeasureBox& b) {
    return std::make_tuple(a.bbox.cy(), a.bbox.left) < std::make_tuple(b.bbox.cy(), b.bbox.left);
  });

  std::vector<Box> row_seed_box;
  for (const auto& s : seeds) {
    if (!result.rows.empty() && vertical_overlap_ratio(row_seed_box.back(), s.bbox) >= options.row_overlap) {
      result.rows.back().boxes.push_back(s);
      continue;
    }
    MeasureRow row;
    row.seed_label = s.label;
    row.boxes.push_back(s);
    result.rows.push_back(std::move(row));
    row_seed_box.push_back(s.bbox);
  }

  for (const auto& b : others) {
    int best = -1;
    double best_overlap = 0.0;
    for (std::size_t r = 0; r < row_seed_box.size(); ++r) {
      const double ov = vertical_overlap_ratio(row_seed_box[r], b.bbox);
      if (ov >= options.row_overlap && ov > best_overlap) {
        best = static_cast<int>(r);
        best_overlap = ov;
      }
    }
    if (best < 0) {
      result.rejected.push_back({b, RejectReason::no_row});
    } else {
      result.rows[static_cast<std::size_t>(best)].boxes.push_back(b);
    }
  }

  for (auto& row : result.rows) {
    std::sort(row.boxes.begin(), row.boxes.end(), [](const MeasureBox& a, const MeasureBox& b) {
      return std::make_tuple(a.bbox.left, a.bbox.top, static_cast<int>(a.label), a.confidence) <
             std::make_tuple(b.bbox.left, b.bbox.top, static_cast<int>(b.label), b.confidence);
    });
  }
  std::sort(result.rejected.begin(), result.rejected.end(),
            [](const RejectedBox& a, const RejectedBox& b) { return canonical_less(a.box, b.box); });
  return result;
}

void assign_staves(std::vector<MeasureRow>& rows) {
  int previous = 0;
  int system = -1;
  for (auto& row : rows) {
    if (row.seed_label == Label::x1) {
      row.staff_id = 2;
    } else {
      row.staff_id = previous == 1 ? 2 : 1;
    }
    if (!(row.staff_id == 2 && previous == 1)) ++system;
    row.system_index = system;
    previous = row.staff_id;
  }
}

PixelRect measure_crop_rect(const Box& bbox, double margin_factor) {
  const double staff_height = bbox.height();
  const int x0 = static_cast<int>(std::lround(bbox.left));
  const int x1 = static_cast<int>(std::lround(bbox.right));
  const int y0 = static_cast<int>(std::lround(bbox.top - margin_factor * staff_height));
  const int height = static_cast<int>(std::lround(staff_height * (1.0 + 2.0 * margin_factor)));
  return {x0, y0, std::max(1, x1 - x0), std::max(1, height)};
}

std::vector<MeasureUnit> extract_measure_units(const RasterImage& page, std::span<const MeasureRow> rows,
                                               const ExtractOptions& options, Diagnostics* diagnostics) {
  std::vector<MeasureUnit> units;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    for (std::size_t c = 0; c < row.boxes.size(); ++c) {
      MeasureUnit u;
      u.row_index = static_cast<int>(r);
      u.col_index = static_cast<int>(c);
      u.staff_id = row.staff_id == 0 ? 1 : row.staff_id;
      u.pair_index = row.system_index < 0 ? static_cast<int>(r) : row.system_index;
      u.label = row.boxes[c].label;
      u.seed_label = row.seed_label;
      u.source_rect = measure_crop_rect(row.boxes[c].bbox, options.margin_factor);
      units.push_back(std::move(u));
    }
  }
  std::stable_sort(units.begin(), units.end(), [](const MeasureUnit& a, const MeasureUnit& b) {
    return std::make_tuple(a.staff_id, a.pair_index, a.row_index, a.col_index) <
           std::make_tuple(b.staff_id, b.pair_index, b.row_index, b.col_index);
  });

  std::vector<Diagnostics> local(units.size());
  parallel_for(units.size(), options.workers, [&](std::size_t i) {
    auto& u = units[i];
    const auto& rect = u.source_rect;
    if (rect.x < 0 || rect.y < 0 || rect.x + rect.width > page.width() || rect.y + rect.height > page.height()) {
      report(&local[i], "crop_clamped",
             "measure row " + std::to_string(u.row_index) + " col " + std::to_string(u.col_index) +
                 ": crop extends past the page; outside filled white");
    }
    RasterImage crop = crop_with_fill(page, rect);
    if (options.level) {
      const auto tilt = estimate_tilt(crop, /*horizontal_only=*/true, options.edges);
      if (tilt.found && tilt.degrees != 0.0) {
        crop = rotate_level(crop, tilt.degrees, &local[i]);
        u.tilt_deg = tilt.degrees;
      }
    }
    u.image = resize_to(crop, options.side, options.side);
  });
  for (auto& d : local) {
    if (diagnostics) diagnostics->insert(diagnostics->end(), d.begin(), d.end());
  }
  return units;
}

}  // namespace omr
