#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "omr/detect_io.hpp"
#include "omr/staffref.hpp"

namespace omr {

/// Diatonic letter; values follow C=0 .. B=6.
enum class Letter : std::uint8_t { C, D, E, F, G, A, B };

char letter_char(Letter letter);

struct Pitch {
  Letter letter = Letter::C;
  int octave = 4;

  friend bool operator==(const Pitch&, const Pitch&) = default;
  friend auto operator<=>(const Pitch&, const Pitch&) = default;
};

/// G clef: -12 -> D3, 0 -> B4, +12 -> G6. F clef: -12 -> F1, 0 -> D3,
/// +12 -> B4. nullopt outside [-12, 12].
std::optional<Pitch> position_to_pitch(ClefSign clef, int position);

/// Key signature plus in-measure accidentals.
class AccidentalTable {
 public:
  /// Throws ConfigError unless fifths is in [-7, 7].
  explicit AccidentalTable(int fifths = 0);

  int fifths() const { return fifths_; }
  int key_alter(Letter letter) const { return key_[static_cast<std::size_t>(letter)]; }
  /// Override if one was set for this letter and octave, key alter otherwise.
  int effective_alter(const Pitch& pitch) const;
  void set_override(const Pitch& pitch, int alter);
  const std::map<std::pair<Letter, int>, int>& overrides() const { return overrides_; }

 private:
  int fifths_ = 0;
  std::array<int, 7> key_{};
  std::map<std::pair<Letter, int>, int> overrides_;
};

AccidentalTable init_accidental_table(int fifths);

/// One symbol detection placed in a measure unit.
struct SymbolComponent {
  int id = 0;  // stable index into the measure's component list
  Category category = Category::body;
  Label label = Label::bd0;
  Box box;  // unit-normalized
  double confidence = 1.0;
  std::optional<int> staff_position;  // bodies, accidentals, rests

  friend bool operator==(const SymbolComponent&, const SymbolComponent&) = default;
};

/// Converts symbol detections of one unit to components, computing staff
/// positions from the box center. Positions beyond +-12 are dropped with a
/// diagnostic; measure-category detections are ignored.
std::vector<SymbolComponent> make_components(std::span<const Detection> detections, const StaffGeometry& geometry,
                                             Diagnostics* diagnostics = nullptr);

enum class BeamRole : std::uint8_t { begin, cont, end };
std::string_view beam_role_name(BeamRole role);  // MusicXML spelling

/// Which side of the notehead the stem (arm or beam) that set its
/// duration sits on.
enum class StemSide : std::uint8_t { none, top, bottom };

struct NoteEvent {
  bool is_rest = false;
  Pitch pitch;  // unused for rests
  int alter = 0;
  int duration = 0;  // divisions
  NoteType type = NoteType::quarter;
  int voice = 1;
  bool chord_member = false;
  std::optional<BeamRole> beam_role;
  int beam_count = 0;
  StemSide stem_side = StemSide::none;
  bool whole_body = false;  // bd4/bd5 style stemless notehead
  int source_id = -1;       // component id that produced the event

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

using OutputSequence = std::vector<NoteEvent>;

/// Components that overlap horizontally, ordered top to bottom.
struct VodMS {
  std::vector<SymbolComponent> members;

  bool singleton() const { return members.size() == 1; }
  double left() const;  // column left edge, ignoring shared beams
};

struct GroupingOptions {
  double horizontal_overlap = 0.3;  // intersection / narrower width
};

/// Groups arm/beam, body and rest components into vertical stacks. Every
/// pair in a stack overlaps horizontally. Beams may join several stacks.
/// Stacks come back ordered by left edge. Accidentals and clefs are not
/// grouped.
std::vector<VodMS> build_vodms(std::span<const SymbolComponent> components, const GroupingOptions& options = {});

struct ResolveContext {
  ClefSign clef = ClefSign::G;
  const AccidentalTable* table = nullptr;
  const SemanticsTable* semantics = nullptr;
  int divisions = 8;
  /// Fallback stems for stacks without a usable one (case vi): beams and
  /// arms that are not part of any stack holding a body.
  std::span<const SymbolComponent> spare_stems;
};

enum class VodmsCase : std::uint8_t { none, both_stems, top_rest, bottom_rest, top_stem, bottom_stem, bodies_only };

struct Resolution {
  VodmsCase matched = VodmsCase::none;
  OutputSequence events;
  std::vector<int> used_stems;  // component ids of arms/beams that set a duration
  Diagnostics diagnostics;
};

/// Annotates one stack, applying the first matching case in this order:
/// both ends stems, top rest, bottom rest, top stem, bottom stem, both
/// ends bodies.
Resolution resolve_vodms(const VodMS& group, const ResolveContext& context);

enum class Disposition : std::uint8_t { event, modifier, diagnostic };

/// Clef change inside a measure, taking effect before `before_event`.
struct ClefChange {
  std::size_t before_event = 0;
  ClefSign sign = ClefSign::G;

  friend bool operator==(const ClefChange&, const ClefChange&) = default;
};

struct MeasureAssembly {
  OutputSequence events;
  ClefSign clef_in = ClefSign::G;
  ClefSign clef_out = ClefSign::G;
  std::vector<ClefChange> clef_changes;
  Diagnostics diagnostics;
  std::vector<Disposition> dispositions;  // parallel to the input components
};

/// Clef-independent part of assembly: stacks, scan order and spare stems.
struct PreparedMeasure {
  std::vector<SymbolComponent> components;  // sorted; ids are positions here
  std::vector<int> input_index;             // components[i] came from input[input_index[i]]
  std::vector<VodMS> groups;
  struct Item {
    enum class Kind : std::uint8_t { clef, accidental, group, other } kind = Kind::other;
    int index = 0;  // component id, or group index
    double left = 0.0;
  };
  std::vector<Item> scan;
  std::vector<SymbolComponent> spare_stems;
};

PreparedMeasure prepare_measure(std::span<const SymbolComponent> components, const GroupingOptions& options = {});

MeasureAssembly assemble_prepared(const PreparedMeasure& prepared, ClefSign clef_in, int fifths,
                                  const SemanticsTable& semantics, int divisions = 8);

/// Left-to-right scan: clefs update the clef, accidentals set overrides
/// at their own pitch, free rests are emitted, stacks are resolved.
MeasureAssembly assemble_measure(std::span<const SymbolComponent> components, ClefSign clef_in, int fifths,
                                 const SemanticsTable& semantics, int divisions = 8);

}  // namespace omr
