#include "omr/assembly.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>

namespace omr {

namespace {

constexpr std::array<Letter, 7> kSharpOrder = {Letter::F, Letter::C, Letter::G, Letter::D,
                                               Letter::A, Letter::E, Letter::B};
constexpr std::array<Letter, 7> kFlatOrder = {Letter::B, Letter::E, Letter::A, Letter::D,
                                              Letter::G, Letter::C, Letter::F};

// Diatonic index (octave * 7 + letter) of the middle staff line.
constexpr int kTrebleMiddle = 4 * 7 + 6;  // B4
constexpr int kBassMiddle = 3 * 7 + 1;    // D3

std::string describe(const SymbolComponent& c) {
  return std::string(label_name(c.label)) + " #" + std::to_string(c.id);
}

bool is_grouped(Category c) { return c == Category::arm_beam || c == Category::body || c == Category::rest; }

auto component_key(const SymbolComponent& c) {
  return std::make_tuple(c.box.left, c.box.top, static_cast<int>(c.category), static_cast<int>(c.label), c.box.right,
                         c.box.bottom, c.confidence, c.staff_position.value_or(0));
}

bool overlaps_all(const VodMS& group, const SymbolComponent& c, double threshold) {
  return std::all_of(group.members.begin(), group.members.end(),
                     [&](const SymbolComponent& m) { return horizontal_overlap_ratio(m.box, c.box) >= threshold; });
}

void sort_top_down(VodMS& group) {
  std::stable_sort(group.members.begin(), group.members.end(), [](const SymbolComponent& a, const SymbolComponent& b) {
    return std::make_tuple(a.box.cy(), a.box.left, a.id) < std::make_tuple(b.box.cy(), b.box.left, b.id);
  });
}

}  // namespace

char letter_char(Letter letter) { return "CDEFGAB"[static_cast<std::size_t>(letter)]; }

std::optional<Pitch> position_to_pitch(ClefSign clef, int position) {
  if (position < -kMaxStaffPosition || position > kMaxStaffPosition) return std::nullopt;
  const int index = (clef == ClefSign::G ? kTrebleMiddle : kBassMiddle) + position;
  return Pitch{static_cast<Letter>(index % 7), index / 7};
}

AccidentalTable::AccidentalTable(int fifths) : fifths_(fifths) {
  if (fifths < -7 || fifths > 7) throw ConfigError("fifths must be in [-7, 7], got " + std::to_string(fifths));
  const auto& order = fifths >= 0 ? kSharpOrder : kFlatOrder;
  const int alter = fifths >= 0 ? 1 : -1;
  for (int i = 0; i < std::abs(fifths); ++i) key_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = alter;
}

int AccidentalTable::effective_alter(const Pitch& pitch) const {
  const auto it = overrides_.find({pitch.letter, pitch.octave});
  return it != overrides_.end() ? it->second : key_alter(pitch.letter);
}

void AccidentalTable::set_override(const Pitch& pitch, int alter) { overrides_[{pitch.letter, pitch.octave}] = alter; }

AccidentalTable init_accidental_table(int fifths) { return AccidentalTable(fifths); }

std::string_view beam_role_name(BeamRole role) {
  switch (role) {
    case BeamRole::begin:
      return "begin";
    case BeamRole::cont:
      return "continue";
    case BeamRole::end:
      return "end";
  }
  return "continue";
}

std::vector<SymbolComponent> make_components(std::span<const Detection> detections, const StaffGeometry& geometry,
                                             Diagnostics* diagnostics) {
  std::vector<SymbolComponent> out;
  for (const auto& d : detections) {
    if (d.category == Category::measure) continue;
    SymbolComponent c;
    c.id = static_cast<int>(out.size());
    c.category = d.category;
    c.label = d.label;
    c.box = d.box();
    c.confidence = d.confidence;
    if (d.category == Category::body || d.category == Category::accidental || d.category == Category::rest) {
      c.staff_position = y_to_position(geometry, d.cy);
      if (!c.staff_position && d.category != Category::rest) {
        report(diagnostics, "position_out_of_range",
               std::string(label_name(d.label)) + " at y=" + std::to_string(d.cy) + " is beyond the staff range; dropped");
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

double VodMS::left() const {
  // Shared beams extend past the column, so they only count when alone.
  std::optional<double> column;
  double all = members.empty() ? 0.0 : members.front().box.left;
  for (const auto& m : members) {
    all = std::min(all, m.box.left);
    if (m.category == Category::arm_beam && is_beam(m.label)) continue;
    column = std::min(column.value_or(m.box.left), m.box.left);
  }
  return column.value_or(all);
}

std::vector<VodMS> build_vodms(std::span<const SymbolComponent> components, const GroupingOptions& options) {
  std::vector<SymbolComponent> columns;
  std::vector<SymbolComponent> beams;
  for (const auto& c : components) {
    if (!is_grouped(c.category)) continue;
    (c.category == Category::arm_beam && is_beam(c.label) ? beams : columns).push_back(c);
  }
  auto by_left = [](const SymbolComponent& a, const SymbolComponent& b) {
    return std::make_tuple(a.box.left, a.box.top, a.id) < std::make_tuple(b.box.left, b.box.top, b.id);
  };
  std::stable_sort(columns.begin(), columns.end(), by_left);
  std::stable_sort(beams.begin(), beams.end(), by_left);

  std::vector<VodMS> groups;
  for (const auto& c : columns) {
    if (!groups.empty() && overlaps_all(groups.back(), c, options.horizontal_overlap)) {
      groups.back().members.push_back(c);
    } else {
      groups.push_back({{c}});
    }
  }
  // Beams span several columns and may belong to each of them.
  const std::size_t column_groups = groups.size();
  for (const auto& b : beams) {
    bool joined = false;
    for (std::size_t g = 0; g < column_groups; ++g) {
      if (overlaps_all(groups[g], b, options.horizontal_overlap)) {
        groups[g].members.push_back(b);
        joined = true;
      }
    }
    if (!joined) groups.push_back({{b}});
  }
  for (auto& g : groups) sort_top_down(g);
  std::stable_sort(groups.begin(), groups.end(), [](const VodMS& a, const VodMS& b) { return a.left() < b.left(); });
  return groups;
}

PreparedMeasure prepare_measure(std::span<const SymbolComponent> components, const GroupingOptions& options) {
  PreparedMeasure p;
  p.input_index.resize(components.size());
  std::iota(p.input_index.begin(), p.input_index.end(), 0);
  std::stable_sort(p.input_index.begin(), p.input_index.end(), [&](int a, int b) {
    return component_key(components[static_cast<std::size_t>(a)]) <
           component_key(components[static_cast<std::size_t>(b)]);
  });
  for (std::size_t i = 0; i < p.input_index.size(); ++i) {
    auto c = components[static_cast<std::size_t>(p.input_index[i])];
    c.id = static_cast<int>(i);
    p.components.push_back(c);
  }

  p.groups = build_vodms(p.components, options);

  std::vector<bool> near_body(p.components.size(), false);
  for (const auto& g : p.groups) {
    const bool has_body = std::any_of(g.members.begin(), g.members.end(),
                                      [](const SymbolComponent& m) { return m.category == Category::body; });
    if (!has_body) continue;
    for (const auto& m : g.members) near_body[static_cast<std::size_t>(m.id)] = true;
  }
  for (const auto& c : p.components) {
    if (c.category == Category::arm_beam && !near_body[static_cast<std::size_t>(c.id)]) p.spare_stems.push_back(c);
  }

  using Kind = PreparedMeasure::Item::Kind;
  for (const auto& c : p.components) {
    if (c.category == Category::clef) p.scan.push_back({Kind::clef, c.id, c.box.left});
    if (c.category == Category::accidental) p.scan.push_back({Kind::accidental, c.id, c.box.left});
  }
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    p.scan.push_back({Kind::group, static_cast<int>(g), p.groups[g].left()});
  }
  std::stable_sort(p.scan.begin(), p.scan.end(), [](const PreparedMeasure::Item& a, const PreparedMeasure::Item& b) {
    return std::make_tuple(a.left, static_cast<int>(a.kind), a.index) <
           std::make_tuple(b.left, static_cast<int>(b.kind), b.index);
  });
  return p;
}

MeasureAssembly assemble_prepared(const PreparedMeasure& prepared, ClefSign clef_in, int fifths,
                                  const SemanticsTable& semantics, int divisions) {
  MeasureAssembly out;
  out.clef_in = clef_in;
  ClefSign clef = clef_in;
  AccidentalTable table(fifths);

  const std::size_t n = prepared.components.size();
  std::vector<std::optional<Disposition>> disposition(n);
  std::vector<bool> stem_used(n, false);

  using Kind = PreparedMeasure::Item::Kind;
  for (const auto& item : prepared.scan) {
    if (item.kind == Kind::clef || item.kind == Kind::accidental) {
      const auto& c = prepared.components[static_cast<std::size_t>(item.index)];
      auto& slot = disposition[static_cast<std::size_t>(c.id)];
      const auto& meaning = semantics[c.label];
      if (const auto* cm = std::get_if<ClefMeaning>(&meaning)) {
        if (cm->sign != clef) out.clef_changes.push_back({out.events.size(), cm->sign});
        clef = cm->sign;
        slot = Disposition::modifier;
      } else if (const auto* am = std::get_if<AccidentalMeaning>(&meaning)) {
        const auto pitch = c.staff_position ? position_to_pitch(clef, *c.staff_position) : std::nullopt;
        if (pitch) {
          table.set_override(*pitch, am->alter);
          slot = Disposition::modifier;
        } else {
          report(&out.diagnostics, "position_out_of_range", describe(c) + " has no usable staff position");
          slot = Disposition::diagnostic;
        }
      } else {
        report(&out.diagnostics, "unmapped_label", describe(c) + " has no meaning; ignored");
        slot = Disposition::diagnostic;
      }
      continue;
    }

    const auto& group = prepared.groups[static_cast<std::size_t>(item.index)];
    ResolveContext ctx;
    ctx.clef = clef;
    ctx.table = &table;
    ctx.semantics = &semantics;
    ctx.divisions = divisions;
    ctx.spare_stems = prepared.spare_stems;
    auto res = resolve_vodms(group, ctx);
    out.diagnostics.insert(out.diagnostics.end(), res.diagnostics.begin(), res.diagnostics.end());
    for (const auto& e : res.events) disposition[static_cast<std::size_t>(e.source_id)] = Disposition::event;
    for (const int id : res.used_stems) stem_used[static_cast<std::size_t>(id)] = true;
    out.events.insert(out.events.end(), res.events.begin(), res.events.end());
  }

  // Anything not yet accounted for: used stems are modifiers, the rest is
  // reported once.
  for (std::size_t i = 0; i < n; ++i) {
    if (disposition[i]) continue;
    const auto& c = prepared.components[i];
    if (c.category == Category::arm_beam && stem_used[i]) {
      disposition[i] = Disposition::modifier;
      continue;
    }
    report(&out.diagnostics, c.category == Category::arm_beam ? "unused_stem" : "unresolved_component",
           describe(c) + " produced no event");
    disposition[i] = Disposition::diagnostic;
  }

  out.dispositions.assign(n, Disposition::diagnostic);
  for (std::size_t i = 0; i < n; ++i) {
    out.dispositions[static_cast<std::size_t>(prepared.input_index[i])] = *disposition[i];
  }
  out.clef_out = clef;
  return out;
}

MeasureAssembly assemble_measure(std::span<const SymbolComponent> components, ClefSign clef_in, int fifths,
                                 const SemanticsTable& semantics, int divisions) {
  return assemble_prepared(prepare_measure(components), clef_in, fifths, semantics, divisions);
}

}  // namespace omr
