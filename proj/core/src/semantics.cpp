#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "omr/detect_io.hpp"

namespace omr {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 6> kTypeNames = {"whole", "half", "quarter", "eighth", "16th", "32nd"};

bool meaning_fits(Category category, const LabelMeaning& meaning) {
  if (std::holds_alternative<Unmapped>(meaning)) return true;
  switch (category) {
    case Category::accidental: return std::holds_alternative<AccidentalMeaning>(meaning);
    case Category::clef: return std::holds_alternative<ClefMeaning>(meaning);
    case Category::body: return std::holds_alternative<BodyMeaning>(meaning);
    case Category::rest: return std::holds_alternative<RestMeaning>(meaning);
    case Category::arm_beam:
      return std::holds_alternative<ArmMeaning>(meaning) || std::holds_alternative<BeamMeaning>(meaning);
    case Category::measure: return false;
  }
  return false;
}

std::string_view stem_name(StemDirection d) { return d == StemDirection::up ? "up" : "down"; }

StemDirection parse_stem(const json& j, std::string_view label) {
  const auto s = j.get<std::string>();
  if (s == "up") return StemDirection::up;
  if (s == "down") return StemDirection::down;
  throw ConfigError("semantics: " + std::string(label) + ": stem must be \"up\" or \"down\"");
}

NoteType parse_note_type(const std::string& name, std::string_view label) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
    if (kTypeNames[i] == name) return static_cast<NoteType>(i);
  }
  throw ConfigError("semantics: " + std::string(label) + ": unknown rest type '" + name + "'");
}

const json& require(const json& obj, const char* key, std::string_view label) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("semantics: " + std::string(label) + ": missing \"" + key + "\"");
  return *it;
}

LabelMeaning parse_meaning(Label label, const json& value) {
  const auto name = label_name(label);
  if (value.is_string()) {
    if (value.get<std::string>() == "unmapped") return Unmapped{};
    throw ConfigError("semantics: " + std::string(name) + ": expected an object or \"unmapped\"");
  }
  if (!value.is_object()) throw ConfigError("semantics: " + std::string(name) + ": expected an object");

  switch (label_category(label)) {
    case Category::accidental: {
      const int alter = require(value, "alter", name).get<int>();
      if (alter < -1 || alter > 1) throw ConfigError("semantics: " + std::string(name) + ": alter must be -1, 0 or 1");
      return AccidentalMeaning{alter};
    }
    case Category::clef: {
      const auto sign = require(value, "clef", name).get<std::string>();
      if (sign == "G") return ClefMeaning{ClefSign::G};
      if (sign == "F") return ClefMeaning{ClefSign::F};
      throw ConfigError("semantics: " + std::string(name) + ": clef must be \"G\" or \"F\"");
    }
    case Category::body: {
      const auto cls = require(value, "notehead", name).get<std::string>();
      if (cls == "closed") return BodyMeaning{NoteheadClass::closed};
      if (cls == "open") return BodyMeaning{NoteheadClass::open};
      if (cls == "whole") return BodyMeaning{NoteheadClass::whole};
      throw ConfigError("semantics: " + std::string(name) + ": notehead must be closed, open or whole");
    }
    case Category::arm_beam: {
      if (value.contains("beams")) {
        const int beams = value.at("beams").get<int>();
        if (beams < 1 || beams > 3) throw ConfigError("semantics: " + std::string(name) + ": beams must be 1..3");
        return BeamMeaning{beams, parse_stem(require(value, "stem", name), name)};
      }
      const int flags = require(value, "flags", name).get<int>();
      if (flags < 0 || flags > 3) throw ConfigError("semantics: " + std::string(name) + ": flags must be 0..3");
      return ArmMeaning{flags, parse_stem(require(value, "stem", name), name)};
    }
    case Category::rest:
      return RestMeaning{parse_note_type(require(value, "rest", name).get<std::string>(), name)};
    case Category::measure: break;
  }
  throw ConfigError("semantics: " + std::string(name) + " is not a symbol label");
}

json meaning_to_json(const LabelMeaning& meaning) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Unmapped>) {
          return "unmapped";
        } else if constexpr (std::is_same_v<T, AccidentalMeaning>) {
          return {{"alter", m.alter}};
        } else if constexpr (std::is_same_v<T, ClefMeaning>) {
          return {{"clef", m.sign == ClefSign::G ? "G" : "F"}};
        } else if constexpr (std::is_same_v<T, BodyMeaning>) {
          constexpr std::array<const char*, 3> names = {"closed", "open", "whole"};
          return {{"notehead", names[static_cast<std::size_t>(m.notehead)]}};
        } else if constexpr (std::is_same_v<T, ArmMeaning>) {
          return {{"flags", m.flags}, {"stem", stem_name(m.stem)}};
        } else if constexpr (std::is_same_v<T, BeamMeaning>) {
          return {{"beams", m.beams}, {"stem", stem_name(m.stem)}};
        } else {
          return {{"rest", note_type_name(m.type)}};
        }
      },
      meaning);
}

}  // namespace

std::string_view note_type_name(NoteType type) { return kTypeNames[static_cast<std::size_t>(type)]; }

int note_type_duration(NoteType type, int divisions) {
  const int whole = divisions * 4;
  return whole >> static_cast<int>(type);
}

SemanticsTable SemanticsTable::defaults() {
  SemanticsTable t;
  t.set(Label::ac0, AccidentalMeaning{+1});
  t.set(Label::ac1, AccidentalMeaning{-1});
  t.set(Label::ac2, AccidentalMeaning{0});
  t.set(Label::cf0, ClefMeaning{ClefSign::G});
  t.set(Label::cf1, ClefMeaning{ClefSign::F});
  t.set(Label::cf2, Unmapped{});
  t.set(Label::bd0, BodyMeaning{NoteheadClass::closed});
  t.set(Label::bd1, BodyMeaning{NoteheadClass::closed});
  t.set(Label::bd2, BodyMeaning{NoteheadClass::open});
  t.set(Label::bd3, BodyMeaning{NoteheadClass::open});
  t.set(Label::bd4, BodyMeaning{NoteheadClass::whole});
  t.set(Label::bd5, BodyMeaning{NoteheadClass::whole});
  t.set(Label::am0, ArmMeaning{0, StemDirection::up});
  t.set(Label::am1, ArmMeaning{0, StemDirection::down});
  t.set(Label::am2, ArmMeaning{1, StemDirection::up});
  t.set(Label::am3, ArmMeaning{1, StemDirection::down});
  t.set(Label::bm0, BeamMeaning{1, StemDirection::up});
  t.set(Label::bm1, BeamMeaning{1, StemDirection::down});
  t.set(Label::bm2, BeamMeaning{2, StemDirection::up});
  t.set(Label::bm3, BeamMeaning{2, StemDirection::down});
  t.set(Label::re0, RestMeaning{NoteType::whole});
  t.set(Label::re1, RestMeaning{NoteType::half});
  t.set(Label::re2, RestMeaning{NoteType::quarter});
  t.set(Label::re3, RestMeaning{NoteType::eighth});
  t.set(Label::re4, RestMeaning{NoteType::sixteenth});
  t.set(Label::re5, RestMeaning{NoteType::thirty_second});
  return t;
}

void SemanticsTable::set(Label label, LabelMeaning meaning) {
  if (!meaning_fits(label_category(label), meaning)) {
    throw ConfigError("semantics: meaning does not fit label " + std::string(label_name(label)));
  }
  meanings_[static_cast<std::size_t>(label)] = meaning;
}

std::string SemanticsTable::to_json() const {
  json j = json::object();
  for (const Category c : kSymbolCategories) {
    for (const Label l : labels_of(c)) j[std::string(label_name(l))] = meaning_to_json((*this)[l]);
  }
  return j.dump(2) + "\n";
}

SemanticsTable parse_semantics(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("semantics: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("semantics: top level must be an object");

  for (const auto& [key, _] : root.items()) {
    bool known = false;
    for (const Category c : kSymbolCategories) known = known || parse_label(c, key).has_value();
    if (!known) throw ConfigError("semantics: unknown label '" + key + "'");
  }

  SemanticsTable table;
  try {
    for (const Category c : kSymbolCategories) {
      for (const Label l : labels_of(c)) {
        const auto it = root.find(std::string(label_name(l)));
        if (it == root.end()) {
          throw ConfigError("semantics: label " + std::string(label_name(l)) + " missing (use \"unmapped\")");
        }
        table.set(l, parse_meaning(l, *it));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("semantics: ") + e.what());
  }
  return table;
}

SemanticsTable load_semantics(const std::optional<std::filesystem::path>& path) {
  if (!path) return SemanticsTable::defaults();
  std::ifstream in(*path);
  if (!in) throw ConfigError("cannot open semantics file " + path->string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_semantics(buf.str());
}

}  // namespace omr
