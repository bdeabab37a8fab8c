#include "omr/mxml.hpp"

#include <algorithm>

namespace omr {

namespace {

class XmlWriter {
 public:
  void open(std::string_view tag, std::string_view attributes = {}) {
    indent();
    out_ += '<';
    out_ += tag;
    if (!attributes.empty()) {
      out_ += ' ';
      out_ += attributes;
    }
    out_ += ">\n";
    ++depth_;
  }
  void close(std::string_view tag) {
    --depth_;
    indent();
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }
  void leaf(std::string_view tag, std::string_view text, std::string_view attributes = {}) {
    indent();
    out_ += '<';
    out_ += tag;
    if (!attributes.empty()) {
      out_ += ' ';
      out_ += attributes;
    }
    out_ += '>';
    out_ += text;
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }
  void empty(std::string_view tag, std::string_view attributes = {}) {
    indent();
    out_ += '<';
    out_ += tag;
    if (!attributes.empty()) {
      out_ += ' ';
      out_ += attributes;
    }
    out_ += "/>\n";
  }
  void raw(std::string_view text) { out_ += text; }
  std::string take() { return std::move(out_); }

 private:
  void indent() { out_.append(static_cast<std::size_t>(depth_) * 2, ' '); }

  std::string out_;
  int depth_ = 0;
};

void write_clef(XmlWriter& w, ClefSign sign) {
  w.open("clef");
  w.leaf("sign", sign == ClefSign::G ? "G" : "F");
  w.leaf("line", sign == ClefSign::G ? "2" : "4");
  w.close("clef");
}

void write_note(XmlWriter& w, const NoteEvent& e) {
  w.open("note");
  if (e.chord_member) w.empty("chord");
  if (e.is_rest) {
    w.empty("rest");
  } else {
    w.open("pitch");
    w.leaf("step", std::string(1, letter_char(e.pitch.letter)));
    if (e.alter != 0) w.leaf("alter", std::to_string(e.alter));
    w.leaf("octave", std::to_string(e.pitch.octave));
    w.close("pitch");
  }
  w.leaf("duration", std::to_string(e.duration));
  w.leaf("voice", std::to_string(e.voice));
  w.leaf("type", note_type_name(e.type));
  if (e.beam_role) {
    for (int n = 1; n <= e.beam_count; ++n) {
      w.leaf("beam", beam_role_name(*e.beam_role), "number=\"" + std::to_string(n) + "\"");
    }
  }
  w.close("note");
}

void write_measure(XmlWriter& w, const ScoreTree& tree, const ScoreMeasure& m) {
  w.open("measure", "number=\"" + std::to_string(m.number) + "\"");
  if (m.header || m.clef) {
    w.open("attributes");
    if (m.header) {
      w.leaf("divisions", std::to_string(tree.time.divisions));
      w.open("key");
      w.leaf("fifths", std::to_string(tree.fifths));
      w.close("key");
      w.open("time");
      w.leaf("beats", std::to_string(tree.time.beats));
      w.leaf("beat-type", std::to_string(tree.time.beat_type));
      w.close("time");
    }
    if (m.clef) write_clef(w, *m.clef);
    w.close("attributes");
  }

  if (m.events.empty()) {
    w.open("note");
    w.empty("rest", "measure=\"yes\"");
    w.leaf("duration", std::to_string(measure_capacity(tree.time)));
    w.leaf("voice", "1");
    w.close("note");
    for (const auto& c : m.changes) {
      w.open("attributes");
      write_clef(w, c.sign);
      w.close("attributes");
    }
    w.close("measure");
    return;
  }

  // Voice 1 carries the clef changes, placed before the first voice-1
  // event at or after the change position.
  std::size_t next_change = 0;
  auto flush_changes = [&](std::size_t index) {
    while (next_change < m.changes.size() && m.changes[next_change].before_event <= index) {
      w.open("attributes");
      write_clef(w, m.changes[next_change].sign);
      w.close("attributes");
      ++next_change;
    }
  };
  int voice1_total = 0;
  bool has_voice2 = false;
  for (std::size_t i = 0; i < m.events.size(); ++i) {
    const auto& e = m.events[i];
    if (e.voice == 2) {
      has_voice2 = true;
      continue;
    }
    flush_changes(i);
    write_note(w, e);
    if (!e.chord_member) voice1_total += e.duration;
  }
  flush_changes(m.events.size());
  if (has_voice2) {
    if (voice1_total > 0) {
      w.open("backup");
      w.leaf("duration", std::to_string(voice1_total));
      w.close("backup");
    }
    for (const auto& e : m.events) {
      if (e.voice == 2) write_note(w, e);
    }
  }
  w.close("measure");
}

std::string serialize_parts(const ScoreTree& tree, std::span<const ScorePart> parts) {
  XmlWriter w;
  w.raw("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
  w.raw(
      "<!DOCTYPE score-partwise PUBLIC \"-//Recordare//DTD MusicXML 3.1 Partwise//EN\" "
      "\"http://www.musicxml.org/dtds/partwise.dtd\">\n");
  w.open("score-partwise", "version=\"3.1\"");
  w.open("part-list");
  for (const auto& p : parts) {
    w.open("score-part", "id=\"" + p.id + "\"");
    w.leaf("part-name", p.name);
    w.close("score-part");
  }
  w.close("part-list");
  for (const auto& p : parts) {
    w.open("part", "id=\"" + p.id + "\"");
    for (const auto& m : p.measures) write_measure(w, tree, m);
    w.close("part");
  }
  w.close("score-partwise");
  return w.take();
}

ScorePart build_part(std::string id, std::string name, std::span<const StaffMeasure> staff, std::size_t count) {
  ScorePart part{std::move(id), std::move(name), {}};
  std::optional<ClefSign> shown;
  for (std::size_t i = 0; i < count; ++i) {
    ScoreMeasure m;
    m.number = static_cast<int>(i) + 1;
    m.header = i == 0;
    if (i < staff.size()) {
      const auto& s = staff[i];
      m.events = s.events;
      ClefSign start = s.clef_in;
      std::size_t c = 0;
      // Changes before the first event are folded into the start clef.
      for (; c < s.clef_changes.size() && s.clef_changes[c].before_event == 0; ++c) start = s.clef_changes[c].sign;
      if (shown != start) m.clef = start;
      shown = start;
      for (; c < s.clef_changes.size(); ++c) {
        if (s.clef_changes[c].sign == *shown) continue;
        m.changes.push_back(s.clef_changes[c]);
        shown = s.clef_changes[c].sign;
      }
    } else if (!shown) {
      m.clef = ClefSign::G;
      shown = m.clef;
    }
    part.measures.push_back(std::move(m));
  }
  return part;
}

}  // namespace

StaffMeasure to_staff_measure(const MeasureAssembly& assembly) {
  return {assembly.events, assembly.clef_in, assembly.clef_changes};
}

ScoreTree build_tree(std::span<const StaffMeasure> staff1, std::span<const StaffMeasure> staff2, const TimeSpec& time,
                     int fifths, Diagnostics* diagnostics) {
  (void)measure_capacity(time);
  ScoreTree tree;
  tree.time = time;
  tree.fifths = fifths;
  const std::size_t count = std::max(staff1.size(), staff2.size());
  if (staff1.size() != staff2.size() && !staff1.empty() && !staff2.empty()) {
    const bool first_short = staff1.size() < staff2.size();
    report(diagnostics, "part_padded",
           std::string("staff ") + (first_short ? "1" : "2") + " padded with " +
               std::to_string(count - std::min(staff1.size(), staff2.size())) + " empty measure(s)");
  }
  // A staff with no measures at all is a single-staff score, not a gap.
  if (!staff1.empty() || staff2.empty()) tree.parts.push_back(build_part("P1", "Staff 1", staff1, count));
  if (!staff2.empty()) tree.parts.push_back(build_part("P2", "Staff 2", staff2, count));
  return tree;
}

std::string serialize(const ScoreTree& tree) { return serialize_parts(tree, tree.parts); }

std::string serialize_part(const ScoreTree& tree, std::size_t part_index) {
  if (part_index >= tree.parts.size()) throw std::out_of_range("serialize_part: no such part");
  return serialize_parts(tree, std::span<const ScorePart>(&tree.parts[part_index], 1));
}

}  // namespace omr
