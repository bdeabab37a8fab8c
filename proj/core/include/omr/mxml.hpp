#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omr/assembly.hpp"
#include "omr/voicing.hpp"

namespace omr {

/// One measure of one staff as produced by assembly (and voicing).
struct StaffMeasure {
  OutputSequence events;
  ClefSign clef_in = ClefSign::G;
  std::vector<ClefChange> clef_changes;
};

StaffMeasure to_staff_measure(const MeasureAssembly& assembly);

struct ScoreMeasure {
  int number = 1;
  bool header = false;              // divisions, key and time
  std::optional<ClefSign> clef;     // clef at the measure start
  std::vector<ClefChange> changes;  // clef changes after the start
  OutputSequence events;            // empty: whole-measure rest
};

struct ScorePart {
  std::string id;
  std::string name;
  std::vector<ScoreMeasure> measures;
};

struct ScoreTree {
  TimeSpec time;
  int fifths = 0;
  std::vector<ScorePart> parts;
};

/// One part per staff (P1, P2); a staff without measures gets no part.
/// When both staves exist the shorter one is padded with empty measures
/// and a diagnostic. A clef is written in measure 1 and wherever the clef
/// in effect differs from the one shown before.
ScoreTree build_tree(std::span<const StaffMeasure> staff1, std::span<const StaffMeasure> staff2, const TimeSpec& time,
                     int fifths, Diagnostics* diagnostics = nullptr);

/// MusicXML 3.1 score-partwise text; byte-deterministic.
std::string serialize(const ScoreTree& tree);

/// Same document restricted to one part.
std::string serialize_part(const ScoreTree& tree, std::size_t part_index);

}  // namespace omr
