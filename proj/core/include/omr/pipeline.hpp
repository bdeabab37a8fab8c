#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "omr/assembly.hpp"
#include "omr/measures.hpp"
#include "omr/mxml.hpp"
#include "omr/staffref.hpp"
#include "omr/voicing.hpp"

namespace omr {

/// Supplies detections for the page and for each measure unit. Calls for
/// different units may run concurrently.
class DetectionSource {
 public:
  virtual ~DetectionSource() = default;
  /// Measure detections, normalized to `page`.
  virtual std::vector<Detection> page(const RasterImage& page) = 0;
  /// Detections of one category, normalized to the unit image.
  virtual std::vector<Detection> unit(std::size_t unit_index, const RasterImage& image, Category category) = 0;
};

/// Reads `page.measure.det` and `<unit>.<category>.det` from a directory.
/// A missing unit file means no detections.
class FixtureSource final : public DetectionSource {
 public:
  explicit FixtureSource(std::filesystem::path directory);
  std::vector<Detection> page(const RasterImage& page) override;
  std::vector<Detection> unit(std::size_t unit_index, const RasterImage& image, Category category) override;

  static std::filesystem::path unit_file(const std::filesystem::path& directory, std::size_t unit_index,
                                         Category category);
  static std::filesystem::path page_file(const std::filesystem::path& directory);

 private:
  std::filesystem::path directory_;
};

/// Runs a shell command template and parses its standard output. `{image}`
/// is replaced by a quoted image path, `{category}` by the category name.
/// Throws ConfigError without an `{image}` placeholder, DetectorError on a
/// nonzero exit, ParseError/ValidationError on bad output. Records of other
/// categories are ignored.
std::vector<Detection> external_detector(const std::string& command_template, const std::filesystem::path& image,
                                         Category category);

/// Writes images to a scratch directory and calls external_detector.
class CommandSource final : public DetectionSource {
 public:
  explicit CommandSource(std::string command_template);
  ~CommandSource() override;
  std::vector<Detection> page(const RasterImage& page) override;
  std::vector<Detection> unit(std::size_t unit_index, const RasterImage& image, Category category) override;

 private:
  std::string template_;
  std::filesystem::path scratch_;
};

/// Adds a fixed per-unit delay (spread over the symbol categories) to
/// another source; models detector inference cost.
class DelayedSource final : public DetectionSource {
 public:
  DelayedSource(DetectionSource& inner, std::chrono::milliseconds per_unit);
  std::vector<Detection> page(const RasterImage& page) override;
  std::vector<Detection> unit(std::size_t unit_index, const RasterImage& image, Category category) override;

 private:
  DetectionSource& inner_;
  std::chrono::microseconds per_call_;
};

enum class RunMode : std::uint8_t { sequential, parallel };

struct PipelineConfig {
  std::filesystem::path image;
  std::optional<std::filesystem::path> detections_dir;
  std::optional<std::string> detector_command;
  std::optional<std::filesystem::path> semantics_file;
  int fifths = 0;
  TimeSpec time;
  ConfidenceThresholds thresholds;
  RunMode mode = RunMode::sequential;
  int workers = 1;
  bool level_page = true;
  std::optional<std::filesystem::path> output;
  bool split_staves = false;
  std::optional<std::filesystem::path> dump_measures;
  std::optional<std::filesystem::path> dump_overlays;

  /// Workers actually used: 1 in sequential mode.
  int effective_workers() const { return mode == RunMode::parallel ? workers : 1; }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

struct StageTime {
  std::string stage;
  double ms = 0.0;
};

struct MeasureReport {
  std::size_t unit_index = 0;
  int staff = 1;
  int number = 0;  // 1-based within the staff
  double tilt_deg = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t components = 0;
  std::size_t events = 0;
  Diagnostics diagnostics;
};

struct RunReport {
  std::vector<StageTime> stages;
  double total_ms = 0.0;
  RunMode mode = RunMode::sequential;
  int workers = 1;
  double page_tilt_deg = 0.0;
  std::size_t measures_found = 0;
  std::size_t events_emitted = 0;
  std::size_t components_unresolved = 0;
  Diagnostics diagnostics;  // page and score level
  std::vector<MeasureReport> measures;

  std::size_t diagnostic_count() const;
  std::string to_json() const;
  std::string to_table() const;
};

/// Per-unit result of the parallel stage.
struct UnitWork {
  StaffFit fit;
  PreparedMeasure prepared;
  Diagnostics diagnostics;
  bool failed = false;
};

/// Fetches and filters detections, fits the staff and groups symbols for
/// every unit. Results are in unit order whatever the worker count; a
/// failing unit comes back empty with a diagnostic.
std::vector<UnitWork> process_units(std::span<const MeasureUnit> units, DetectionSource& source,
                                    const ConfidenceThresholds& thresholds, int workers);

/// Clef chaining, assembly and voice adjustment, in reading order.
struct StaffAssembly {
  std::vector<std::size_t> unit_index;
  std::vector<MeasureAssembly> measures;
};
std::array<StaffAssembly, 2> assemble_units(std::span<const MeasureUnit> units, std::span<const UnitWork> work,
                                            const SemanticsTable& semantics, int fifths, const TimeSpec& time);

struct RunResult {
  std::string musicxml;
  std::vector<std::string> part_documents;  // filled with split_staves
  RunReport report;
};

/// Full run with the source chosen by the config.
RunResult run(const PipelineConfig& config);
/// Full run with an explicit detection source.
RunResult run(const PipelineConfig& config, DetectionSource& source);

/// Writes `text` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace omr
