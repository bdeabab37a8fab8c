#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "omr/assembly.hpp"

namespace omr {

namespace {

enum class Role : std::uint8_t { stem, body, rest };

struct Member {
  const SymbolComponent* component = nullptr;
  Role role = Role::body;
};

struct Assignment {
  const SymbolComponent* body = nullptr;
  const SymbolComponent* stem = nullptr;
  int voice = 1;
};

std::string describe(const SymbolComponent& c) {
  return std::string(label_name(c.label)) + " #" + std::to_string(c.id);
}

std::optional<Role> role_of(const SemanticsTable& semantics, const SymbolComponent& c) {
  const auto& meaning = semantics[c.label];
  if (std::holds_alternative<ArmMeaning>(meaning) || std::holds_alternative<BeamMeaning>(meaning)) return Role::stem;
  if (std::holds_alternative<BodyMeaning>(meaning)) return Role::body;
  if (std::holds_alternative<RestMeaning>(meaning)) return Role::rest;
  return std::nullopt;
}

NoteType type_at(int level) { return static_cast<NoteType>(std::clamp(level, 0, 5)); }

BeamRole beam_role_for(const Box& body, const Box& beam) {
  if (body.cx() <= beam.left + body.width()) return BeamRole::begin;
  if (body.cx() >= beam.right - body.width()) return BeamRole::end;
  return BeamRole::cont;
}

// Nearest stem inside the group by vertical center distance (ties to the
// lower stem), else the nearest spare stem by center distance.
const SymbolComponent* choose_stem(const SymbolComponent& body, const std::vector<const SymbolComponent*>& in_group,
                                   std::span<const SymbolComponent> spare) {
  const SymbolComponent* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto* s : in_group) {
    const double d = std::abs(s->box.cy() - body.box.cy());
    if (d < best_d || (d == best_d && best != nullptr && s->box.cy() > best->box.cy())) {
      best = s;
      best_d = d;
    }
  }
  if (best != nullptr) return best;
  for (const auto& s : spare) {
    const double d = std::hypot(s.box.cx() - body.box.cx(), s.box.cy() - body.box.cy());
    if (d < best_d) {
      best = &s;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

Resolution resolve_vodms(const VodMS& group, const ResolveContext& context) {
  Resolution out;
  const SemanticsTable& semantics = context.semantics != nullptr ? *context.semantics : SemanticsTable::defaults();
  const AccidentalTable fallback_table(0);
  const AccidentalTable& table = context.table != nullptr ? *context.table : fallback_table;

  std::vector<Member> members;
  for (const auto& c : group.members) {
    const auto role = role_of(semantics, c);
    if (!role) {
      report(&out.diagnostics, "unmapped_label", describe(c) + " has no meaning; ignored");
      continue;
    }
    members.push_back({&c, *role});
  }
  if (members.empty()) {
    report(&out.diagnostics, "unresolved_group", "group holds only unmapped labels");
    return out;
  }

  std::vector<const SymbolComponent*> bodies;
  std::vector<const SymbolComponent*> stems;
  std::vector<const SymbolComponent*> rests;
  for (const auto& m : members) {
    (m.role == Role::body ? bodies : m.role == Role::stem ? stems : rests).push_back(m.component);
  }

  auto rest_event = [&](const SymbolComponent& r, int voice) {
    NoteEvent e;
    e.is_rest = true;
    e.type = std::get<RestMeaning>(semantics[r.label]).type;
    e.duration = note_type_duration(e.type, context.divisions);
    e.voice = voice;
    e.source_id = r.id;
    return e;
  };

  if (bodies.empty()) {
    for (const auto* r : rests) out.events.push_back(rest_event(*r, 1));
    return out;
  }

  const Member& top = members.front();
  const Member& bottom = members.back();
  std::vector<Assignment> assigned;
  const SymbolComponent* voice2_rest = nullptr;

  if (members.size() >= 2 && top.role == Role::stem && bottom.role == Role::stem) {
    out.matched = VodmsCase::both_stems;
    std::vector<const SymbolComponent*> upper;
    std::vector<const SymbolComponent*> lower;
    if (bodies.size() == 1) {
      const double dt = std::abs(bodies[0]->box.cy() - top.component->box.cy());
      const double db = std::abs(bodies[0]->box.cy() - bottom.component->box.cy());
      (dt < db ? upper : lower).push_back(bodies[0]);
    } else {
      upper.push_back(bodies.front());
      lower.push_back(bodies.back());
      for (std::size_t i = 1; i + 1 < bodies.size(); ++i) {
        const double y = bodies[i]->box.cy();
        auto nearest = [y](const std::vector<const SymbolComponent*>& set) {
          double d = std::numeric_limits<double>::infinity();
          for (const auto* b : set) d = std::min(d, std::abs(b->box.cy() - y));
          return d;
        };
        (nearest(upper) < nearest(lower) ? upper : lower).push_back(bodies[i]);
      }
    }
    for (const auto* b : upper) assigned.push_back({b, top.component, 2});
    for (const auto* b : lower) assigned.push_back({b, bottom.component, 1});
  } else if (top.role == Role::rest) {
    out.matched = VodmsCase::top_rest;
    voice2_rest = top.component;
    for (const auto* b : bodies) assigned.push_back({b, choose_stem(*b, stems, context.spare_stems), 1});
  } else if (bottom.role == Role::rest) {
    out.matched = VodmsCase::bottom_rest;
    for (const auto* b : bodies) assigned.push_back({b, choose_stem(*b, stems, context.spare_stems), 2});
  } else if (top.role == Role::stem) {
    out.matched = VodmsCase::top_stem;
    for (const auto* b : bodies) assigned.push_back({b, top.component, 1});
  } else if (bottom.role == Role::stem) {
    out.matched = VodmsCase::bottom_stem;
    for (const auto* b : bodies) assigned.push_back({b, bottom.component, 1});
  } else {
    out.matched = VodmsCase::bodies_only;
    for (const auto* b : bodies) assigned.push_back({b, choose_stem(*b, stems, context.spare_stems), 1});
  }

  auto note_event = [&](const Assignment& a) -> std::optional<NoteEvent> {
    const SymbolComponent& body = *a.body;
    if (!body.staff_position) {
      report(&out.diagnostics, "no_position", describe(body) + " has no staff position");
      return std::nullopt;
    }
    const auto pitch = position_to_pitch(context.clef, *body.staff_position);
    if (!pitch) {
      report(&out.diagnostics, "position_out_of_range",
             describe(body) + " at position " + std::to_string(*body.staff_position));
      return std::nullopt;
    }
    NoteEvent e;
    e.pitch = *pitch;
    e.alter = table.effective_alter(*pitch);
    e.voice = a.voice;
    e.source_id = body.id;
    const auto head = std::get<BodyMeaning>(semantics[body.label]).notehead;
    if (head == NoteheadClass::whole) {
      e.type = NoteType::whole;
      e.whole_body = true;
    } else if (a.stem == nullptr) {
      e.type = head == NoteheadClass::closed ? NoteType::quarter : NoteType::half;
      report(&out.diagnostics, "missing_stem", describe(body) + " has no arm/beam; assumed " +
                                                   std::string(note_type_name(e.type)));
    } else {
      const SymbolComponent& stem = *a.stem;
      const auto& meaning = semantics[stem.label];
      const auto* arm = std::get_if<ArmMeaning>(&meaning);
      const auto* beam = std::get_if<BeamMeaning>(&meaning);
      e.stem_side = stem.box.cy() < body.box.cy() ? StemSide::top : StemSide::bottom;
      if (head == NoteheadClass::closed) {
        e.type = type_at(2 + (arm != nullptr ? arm->flags : beam->beams));
        if (beam != nullptr) {
          e.beam_count = beam->beams;
          e.beam_role = beam_role_for(body.box, stem.box);
        }
      } else {
        e.type = NoteType::half;
        if (beam != nullptr || arm->flags > 0) {
          report(&out.diagnostics, "open_notehead_short_stem",
                 describe(body) + " with " + describe(stem) + "; kept as half");
        }
      }
      if (std::find(out.used_stems.begin(), out.used_stems.end(), stem.id) == out.used_stems.end()) {
        out.used_stems.push_back(stem.id);
      }
    }
    e.duration = note_type_duration(e.type, context.divisions);
    return e;
  };

  // One chord per voice: lowest note first, others marked as chord members.
  auto emit_voice = [&](int voice) {
    std::vector<Assignment> in_voice;
    for (const auto& a : assigned) {
      if (a.voice == voice) in_voice.push_back(a);
    }
    std::stable_sort(in_voice.begin(), in_voice.end(), [](const Assignment& x, const Assignment& y) {
      if (x.body->box.cy() != y.body->box.cy()) return x.body->box.cy() > y.body->box.cy();
      return x.body->id < y.body->id;
    });
    bool first = true;
    for (const auto& a : in_voice) {
      auto e = note_event(a);
      if (!e) continue;
      if (!first) {
        e->chord_member = true;
        e->beam_role.reset();
        e->beam_count = 0;
      }
      first = false;
      out.events.push_back(*e);
    }
  };

  double mean_body_y = 0.0;
  for (const auto* b : bodies) mean_body_y += b->box.cy();
  mean_body_y /= static_cast<double>(bodies.size());

  OutputSequence after;
  for (const auto* r : rests) {
    const int voice = r == voice2_rest ? 2 : 1;
    (r->box.cy() < mean_body_y ? out.events : after).push_back(rest_event(*r, voice));
  }
  emit_voice(1);
  emit_voice(2);
  out.events.insert(out.events.end(), after.begin(), after.end());
  return out;
}

}  // namespace omr
