#pragma once

#include <span>
#include <vector>

#include "omr/detect_io.hpp"
#include "omr/raster.hpp"

namespace omr {

/// A measure-category detection in page pixels.
struct MeasureBox {
  Label label = Label::y0;  // x0, x1 or y0
  Box bbox;
  double confidence = 0.0;

  friend bool operator==(const MeasureBox&, const MeasureBox&) = default;
};

struct MeasureRow {
  Label seed_label = Label::x0;   // label of the clef-bearing box that opened the row
  std::vector<MeasureBox> boxes;  // left to right
  int staff_id = 0;               // 1 or 2 once assigned
  int system_index = -1;          // grand-staff system the row belongs to
};

enum class RejectReason { duplicate, no_row };

struct RejectedBox {
  MeasureBox box;
  RejectReason reason = RejectReason::duplicate;
};

struct Alignment {
  std::vector<MeasureRow> rows;       // top to bottom
  std::vector<RejectedBox> rejected;  // every input box is in rows or here
};

struct AlignOptions {
  double row_overlap = 0.5;    // vertical overlap / shorter height
  double duplicate_iou = 0.6;  // above this the lower-confidence box goes
};

/// Converts measure-category detections (normalized to the page) into
/// page-pixel boxes; other categories are skipped.
std::vector<MeasureBox> measure_boxes_from_detections(std::span<const Detection> detections, int page_width,
                                                      int page_height);

/// Clef-bearing boxes (x0/x1), sorted by vertical center, seed rows; each
/// y0 box joins the row whose seed it overlaps most. Overlapping
/// duplicates are removed first. The result does not depend on input
/// order. Throws AlignmentError when no x0/x1 box exists.
Alignment align_measures(std::span<const MeasureBox> boxes, const AlignOptions& options = {});

/// Alternates staff 1 / staff 2 from the top. An x1 seed (F clef) forces
/// staff 2 and alternation continues from there. Consecutive staff 1 and
/// staff 2 rows share a system index.
void assign_staves(std::vector<MeasureRow>& rows);

struct MeasureUnit {
  int row_index = 0;
  int col_index = 0;
  int staff_id = 1;
  int pair_index = 0;  // system index
  Label label = Label::y0;
  Label seed_label = Label::x0;
  PixelRect source_rect;  // crop on the page, before clamping
  double tilt_deg = 0.0;  // per-measure correction applied
  RasterImage image;      // leveled and resized to side x side
};

struct ExtractOptions {
  int side = 416;
  double margin_factor = 1.2;  // margin above and below, in staff heights
  bool level = true;
  EdgeParams edges;
  int workers = 1;
};

/// Crops every box with vertical margins, levels it using horizontal
/// lines only, and resizes it to the standard square (anamorphic, so the
/// staff-plus-margins band spans the full unit height). Output is ordered
/// by (staff, system, column).
std::vector<MeasureUnit> extract_measure_units(const RasterImage& page, std::span<const MeasureRow> rows,
                                               const ExtractOptions& options = {},
                                               Diagnostics* diagnostics = nullptr);

/// Crop rectangle for a box: full width, staff height plus margins.
PixelRect measure_crop_rect(const Box& bbox, double margin_factor);

}  // namespace omr
