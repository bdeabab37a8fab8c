#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "omr/detect_io.hpp"
#include "omr/raster.hpp"

namespace omr::synth {

/// Grayscale drawing surface. Shapes are anti-aliased by pixel coverage
/// and combined with max(ink).
class Canvas {
 public:
  Canvas(int width, int height);

  /// Straight stroke of the given thickness between two points. Coverage
  /// is exact for horizontal strokes.
  void line(double x0, double y0, double x1, double y1, double thickness);
  void fill_ellipse(double cx, double cy, double rx, double ry);
  void ring_ellipse(double cx, double cy, double rx, double ry, double thickness);
  void fill_rect(double left, double top, double right, double bottom);

  int width() const { return width_; }
  int height() const { return height_; }
  RasterImage image() const;

 private:
  void put(int x, int y, double coverage);
  template <class Inside>
  void supersample(double left, double top, double right, double bottom, Inside inside);

  int width_;
  int height_;
  std::vector<double> ink_;
};

/// Staff-only measure unit: five lines at middle 0.5 + alpha with gap
/// base_gap + beta, the usual 1.2 staff-height margins.
RasterImage render_unit(int side, double alpha, double beta, double thickness = 2.0);

/// Symbol inside a measure. x is a fraction of the measure width, position
/// is in staff steps (half gaps, up positive), sizes are in gaps.
struct Symbol {
  Label label = Label::bd0;
  double x = 0.5;
  double position = 0.0;
  double width = 1.3;
  double height = 1.0;
  double span = 0.0;  // extra width as a fraction of the measure (beams)
};

struct MeasureSpec {
  std::vector<Symbol> symbols;
};

struct SystemSpec {
  std::vector<MeasureSpec> staff1;
  std::vector<MeasureSpec> staff2;  // empty for single-staff systems
};

struct PageSpec {
  double gap = 14.0;            // staff line spacing, px
  double thickness = 2.0;       // staff line thickness, px
  double measure_width = 260.0;
  double margin_left = 60.0;
  double margin_top = 90.0;
  double staff_distance = 10.0;   // middle line to middle line inside a system, gaps
  double system_distance = 24.0;  // between systems, gaps
  double tilt_deg = 0.0;          // rotation about the page center, positive rises to the right
  int min_width = 0;
  std::vector<SystemSpec> systems;
};

struct RenderedPage {
  RasterImage image;
  std::vector<Detection> measures;            // normalized to the page
  std::vector<std::vector<Detection>> units;  // per unit, in pipeline unit order
};

/// Renders the page and the detections a perfect detector would report.
/// Detections are only meaningful for untilted pages.
RenderedPage render_page(const PageSpec& spec);

/// Writes page.png, page.measure.det and one file per unit and category.
void write_fixture(const RenderedPage& page, const std::filesystem::path& directory);

// Symbol helpers for hand-built measures: a note is a notehead plus an
// optional arm, placed like engraved music.
Symbol head(Label body, double x, double position);
/// Arm above (stem up) or below (stem down) the notehead at `position`.
Symbol arm(Label arm, double x, double position, bool up);
/// Arm spanning from the lowest to the highest notehead of a chord.
Symbol chord_arm(Label arm, double x, double low, double high, bool up);
/// Beam box covering the columns from x0 to x1, stems from `position`.
Symbol beam(Label beam, double x0, double x1, double position, bool up);
Symbol rest(Label rest, double x, double position = 0.0);
Symbol clef(Label clef, double x = 0.07);
Symbol accidental(Label accidental, double x, double position);

/// Hand-built scores used by golden and end-to-end tests.
PageSpec melody_score();
PageSpec two_voice_score();
PageSpec chord_score();
/// 48 measures (6 systems x 2 staves x 4) of mixed notes.
PageSpec workload_score();

}  // namespace omr::synth
