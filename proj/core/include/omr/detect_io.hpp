#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "omr/diagnostics.hpp"
#include "omr/geometry.hpp"

namespace omr {

enum class Category : std::uint8_t { measure, accidental, arm_beam, body, clef, rest };

inline constexpr std::array<Category, 6> kAllCategories = {Category::measure, Category::accidental,
                                                           Category::arm_beam, Category::body,
                                                           Category::clef,    Category::rest};
inline constexpr std::array<Category, 5> kSymbolCategories = {Category::accidental, Category::arm_beam,
                                                              Category::body, Category::clef, Category::rest};

std::string_view category_name(Category category);
std::optional<Category> parse_category(std::string_view name);

// clang-format off
enum class Label : std::uint8_t {
  x0, x1, y0,
  ac0, ac1, ac2,
  am0, am1, am2, am3, bm0, bm1, bm2, bm3,
  bd0, bd1, bd2, bd3, bd4, bd5,
  cf0, cf1, cf2,
  re0, re1, re2, re3, re4, re5,
};
// clang-format on

inline constexpr std::size_t kLabelCount = 29;

std::string_view label_name(Label label);
Category label_category(Label label);
std::span<const Label> labels_of(Category category);
/// nullopt when `name` is not a label of `category`.
std::optional<Label> parse_label(Category category, std::string_view name);

inline bool is_arm(Label l) { return l >= Label::am0 && l <= Label::am3; }
inline bool is_beam(Label l) { return l >= Label::bm0 && l <= Label::bm3; }

/// One scored box. `bbox` is normalized to the image the detector saw.
struct Detection {
  Category category = Category::body;
  Label label = Label::bd0;
  double confidence = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  Box box() const { return Box::from_center(cx, cy, w, h); }

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Parses `category label confidence cx cy w h` records, one per line,
/// with `#` comments. Throws ParseError on malformed lines and
/// ValidationError on unknown labels or out-of-range values.
std::vector<Detection> load_detections(std::istream& in);
std::vector<Detection> load_detections(std::string_view text);
std::vector<Detection> load_detections_file(const std::filesystem::path& path);

/// Canonical text form: shortest round-trip decimal for every number.
std::string serialize_detections(std::span<const Detection> detections);

class ConfidenceThresholds {
 public:
  static constexpr double kDefault = 0.60;

  ConfidenceThresholds() { values_.fill(kDefault); }
  static ConfidenceThresholds uniform(double value);

  double operator[](Category c) const { return values_[static_cast<std::size_t>(c)]; }
  /// Throws ConfigError outside [0,1].
  void set(Category c, double value);

 private:
  std::array<double, 6> values_{};
};

/// Keeps detections whose confidence reaches their category threshold,
/// preserving order.
std::vector<Detection> filter_confidence(std::span<const Detection> detections,
                                         const ConfidenceThresholds& thresholds);

// ---------------------------------------------------------------------------
// Symbol semantics

enum class ClefSign : std::uint8_t { G, F };
enum class NoteheadClass : std::uint8_t { closed, open, whole };
enum class StemDirection : std::uint8_t { up, down };
enum class NoteType : std::uint8_t { whole, half, quarter, eighth, sixteenth, thirty_second };

std::string_view note_type_name(NoteType type);  // MusicXML spelling
/// Duration in divisions; `divisions` is per quarter note.
int note_type_duration(NoteType type, int divisions);

struct Unmapped {
  friend bool operator==(const Unmapped&, const Unmapped&) = default;
};
struct AccidentalMeaning {
  int alter = 0;
  friend bool operator==(const AccidentalMeaning&, const AccidentalMeaning&) = default;
};
struct ClefMeaning {
  ClefSign sign = ClefSign::G;
  friend bool operator==(const ClefMeaning&, const ClefMeaning&) = default;
};
struct BodyMeaning {
  NoteheadClass notehead = NoteheadClass::closed;
  friend bool operator==(const BodyMeaning&, const BodyMeaning&) = default;
};
struct ArmMeaning {
  int flags = 0;
  StemDirection stem = StemDirection::up;
  friend bool operator==(const ArmMeaning&, const ArmMeaning&) = default;
};
struct BeamMeaning {
  int beams = 1;
  StemDirection stem = StemDirection::up;
  friend bool operator==(const BeamMeaning&, const BeamMeaning&) = default;
};
struct RestMeaning {
  NoteType type = NoteType::quarter;
  friend bool operator==(const RestMeaning&, const RestMeaning&) = default;
};

using LabelMeaning =
    std::variant<Unmapped, AccidentalMeaning, ClefMeaning, BodyMeaning, ArmMeaning, BeamMeaning, RestMeaning>;

/// Meaning of every symbol label (measure labels are structural and not
/// part of the table).
class SemanticsTable {
 public:
  /// Built-in table: ac0/ac1/ac2 = sharp/flat/natural; cf0 = G, cf1 = F,
  /// cf2 unmapped; bd0-1 closed, bd2-3 open, bd4-5 whole; am0/am1 plain
  /// stems, am2/am3 single flag; bm0/bm1 single beam, bm2/bm3 double;
  /// re0..re5 whole..32nd rests.
  static SemanticsTable defaults();

  const LabelMeaning& operator[](Label label) const { return meanings_[static_cast<std::size_t>(label)]; }
  bool is_mapped(Label label) const { return !std::holds_alternative<Unmapped>((*this)[label]); }

  /// Throws ConfigError if the meaning kind does not fit the label's category.
  void set(Label label, LabelMeaning meaning);

  std::string to_json() const;

  friend bool operator==(const SemanticsTable&, const SemanticsTable&) = default;

 private:
  std::array<LabelMeaning, kLabelCount> meanings_{};
};

/// Parses a complete table. Every symbol label must be present, either as
/// an object of the right shape or as the string "unmapped".
SemanticsTable parse_semantics(std::string_view json_text);

/// No path: built-in defaults.
SemanticsTable load_semantics(const std::optional<std::filesystem::path>& path);

}  // namespace omr
