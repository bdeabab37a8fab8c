#include "omr/voicing.hpp"

#include <charconv>
#include <string>

namespace omr {

namespace {

bool fits(const OutputSequence& s, int capacity) {
  const auto totals = voice_totals(s);
  return totals[0] <= capacity && totals[1] <= capacity;
}

int parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("invalid time signature number '" + std::string(text) + "'");
  return value;
}

// Applies `pick` to every anchor event; chord members copy their anchor.
template <class Pick>
void reassign(OutputSequence& s, Pick pick) {
  int anchor_voice = 1;
  for (auto& e : s) {
    if (e.chord_member) {
      e.voice = anchor_voice;
      continue;
    }
    if (const auto v = pick(e)) e.voice = *v;
    anchor_voice = e.voice;
  }
}

}  // namespace

TimeSpec parse_time(std::string_view text, int divisions) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) throw ConfigError("time signature must look like B/T, got '" + std::string(text) + "'");
  TimeSpec spec{parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)), divisions};
  (void)measure_capacity(spec);
  return spec;
}

int measure_capacity(const TimeSpec& spec) {
  if (spec.beats <= 0) throw ConfigError("beats must be positive");
  if (spec.divisions <= 0) throw ConfigError("divisions must be positive");
  if (spec.beat_type <= 0 || (spec.beat_type & (spec.beat_type - 1)) != 0) {
    throw ConfigError("beat type must be a power of two, got " + std::to_string(spec.beat_type));
  }
  const long numerator = static_cast<long>(spec.beats) * spec.divisions * 4;
  if (numerator % spec.beat_type != 0) throw ConfigError("capacity is not a whole number of divisions");
  return static_cast<int>(numerator / spec.beat_type);
}

std::array<int, 2> voice_totals(const OutputSequence& sequence) {
  std::array<int, 2> totals{0, 0};
  for (const auto& e : sequence) {
    if (e.chord_member) continue;
    totals[e.voice == 2 ? 1 : 0] += e.duration;
  }
  return totals;
}

VoiceAdjustment adjust_voices(const OutputSequence& sequence, int capacity) {
  VoiceAdjustment out{sequence, 0, {}};
  if (fits(out.events, capacity)) return out;

  using Stage = std::optional<int> (*)(const NoteEvent&);
  constexpr Stage stages[] = {
      [](const NoteEvent& e) -> std::optional<int> {
        if (!e.is_rest && e.stem_side == StemSide::top) return 2;
        return std::nullopt;
      },
      [](const NoteEvent& e) -> std::optional<int> {
        if (e.is_rest) return std::nullopt;
        if (e.stem_side == StemSide::bottom) return 1;
        if (e.stem_side == StemSide::none) return 2;
        return std::nullopt;
      },
      [](const NoteEvent& e) -> std::optional<int> {
        if (!e.is_rest && e.whole_body) return 2;
        return std::nullopt;
      },
  };
  for (const Stage stage : stages) {
    reassign(out.events, stage);
    ++out.stages_applied;
    if (fits(out.events, capacity)) return out;
  }
  const auto totals = voice_totals(out.events);
  report(&out.diagnostics, "overfull_measure",
         "voice totals " + std::to_string(totals[0]) + "/" + std::to_string(totals[1]) + " exceed capacity " +
             std::to_string(capacity));
  return out;
}

}  // namespace omr
