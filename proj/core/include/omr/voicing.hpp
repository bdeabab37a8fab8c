#pragma once

#include "omr/assembly.hpp"

namespace omr {

struct TimeSpec {
  int beats = 4;
  int beat_type = 4;
  int divisions = 8;  // per quarter note

  friend bool operator==(const TimeSpec&, const TimeSpec&) = default;
};

/// Parses "B/T". Throws ConfigError on malformed text or invalid values.
TimeSpec parse_time(std::string_view text, int divisions = 8);

/// beats * divisions * 4 / beat_type. Throws ConfigError unless beats > 0,
/// beat_type is a power of two and the result is a whole number.
int measure_capacity(const TimeSpec& spec);

/// Duration per voice (index 0 = voice 1); chord members add nothing.
std::array<int, 2> voice_totals(const OutputSequence& sequence);

struct VoiceAdjustment {
  OutputSequence events;
  int stages_applied = 0;  // 0 when the input already fit
  Diagnostics diagnostics;
};

/// Moves events between voices until both fit `capacity`, trying in turn:
/// notes stemmed from above to voice 2; notes stemmed from below to
/// voice 1 with stemless notes to voice 2; whole notes to voice 2. Only
/// voice fields change; chord members follow their anchor.
VoiceAdjustment adjust_voices(const OutputSequence& sequence, int capacity);

}  // namespace omr
