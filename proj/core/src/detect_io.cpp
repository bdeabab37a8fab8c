#include "omr/detect_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace omr {

namespace {

constexpr std::array<std::string_view, 6> kCategoryNames = {"measure", "accidental", "arm_beam",
                                                            "body",    "clef",       "rest"};

// clang-format off
constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
  "x0", "x1", "y0",
  "ac0", "ac1", "ac2",
  "am0", "am1", "am2", "am3", "bm0", "bm1", "bm2", "bm3",
  "bd0", "bd1", "bd2", "bd3", "bd4", "bd5",
  "cf0", "cf1", "cf2",
  "re0", "re1", "re2", "re3", "re4", "re5",
};

constexpr std::array<Label, kLabelCount> kLabels = {
  Label::x0, Label::x1, Label::y0,
  Label::ac0, Label::ac1, Label::ac2,
  Label::am0, Label::am1, Label::am2, Label::am3, Label::bm0, Label::bm1, Label::bm2, Label::bm3,
  Label::bd0, Label::bd1, Label::bd2, Label::bd3, Label::bd4, Label::bd5,
  Label::cf0, Label::cf1, Label::cf2,
  Label::re0, Label::re1, Label::re2, Label::re3, Label::re4, Label::re5,
};
// clang-format on

struct CategorySpan {
  std::size_t first;
  std::size_t count;
};

constexpr std::array<CategorySpan, 6> kCategorySpans = {{{0, 3}, {3, 3}, {6, 8}, {14, 6}, {20, 3}, {23, 6}}};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no, std::string_view what) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, "invalid " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

void append_number(std::string& out, double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace

std::string_view category_name(Category category) { return kCategoryNames[static_cast<std::size_t>(category)]; }

std::optional<Category> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::string_view label_name(Label label) { return kLabelNames[static_cast<std::size_t>(label)]; }

Category label_category(Label label) {
  const auto idx = static_cast<std::size_t>(label);
  for (std::size_t c = 0; c < kCategorySpans.size(); ++c) {
    if (idx >= kCategorySpans[c].first && idx < kCategorySpans[c].first + kCategorySpans[c].count) {
      return static_cast<Category>(c);
    }
  }
  return Category::measure;  // unreachable for valid labels
}

std::span<const Label> labels_of(Category category) {
  const auto& s = kCategorySpans[static_cast<std::size_t>(category)];
  return std::span<const Label>(kLabels).subspan(s.first, s.count);
}

std::optional<Label> parse_label(Category category, std::string_view name) {
  for (const Label l : labels_of(category)) {
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

std::vector<Detection> load_detections(std::istream& in) {
  std::vector<Detection> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto fields = split_fields(view);
    if (fields.empty()) continue;
    if (fields.size() != 7) {
      throw ParseError(line_no, "expected 7 fields (category label confidence cx cy w h), got " +
                                    std::to_string(fields.size()));
    }
    const auto category = parse_category(fields[0]);
    if (!category) {
      throw ValidationError("line " + std::to_string(line_no) + ": unknown category '" + std::string(fields[0]) + "'");
    }
    const auto label = parse_label(*category, fields[1]);
    if (!label) {
      throw ValidationError("line " + std::to_string(line_no) + ": unknown label '" + std::string(fields[1]) +
                            "' for category " + std::string(fields[0]));
    }
    Detection d;
    d.category = *category;
    d.label = *label;
    d.confidence = parse_number(fields[2], line_no, "confidence");
    d.cx = parse_number(fields[3], line_no, "cx");
    d.cy = parse_number(fields[4], line_no, "cy");
    d.w = parse_number(fields[5], line_no, "w");
    d.h = parse_number(fields[6], line_no, "h");

    const auto where = "line " + std::to_string(line_no) + ": ";
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw ValidationError(where + "confidence " + std::string(fields[2]) + " outside [0,1]");
    }
    if (!(d.cx >= 0.0 && d.cx <= 1.0 && d.cy >= 0.0 && d.cy <= 1.0)) {
      throw ValidationError(where + "box center outside [0,1]");
    }
    if (!(d.w > 0.0 && d.w <= 1.0 && d.h > 0.0 && d.h <= 1.0)) {
      throw ValidationError(where + "box size outside (0,1]");
    }
    out.push_back(d);
  }
  return out;
}

std::vector<Detection> load_detections(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_detections(in);
}

std::vector<Detection> load_detections_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open detection file " + path.string());
  return load_detections(in);
}

std::string serialize_detections(std::span<const Detection> detections) {
  std::string out;
  for (const auto& d : detections) {
    out.append(category_name(d.category));
    out.push_back(' ');
    out.append(label_name(d.label));
    for (const double v : {d.confidence, d.cx, d.cy, d.w, d.h}) {
      out.push_back(' ');
      append_number(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

ConfidenceThresholds ConfidenceThresholds::uniform(double value) {
  ConfidenceThresholds t;
  for (const Category c : kAllCategories) t.set(c, value);
  return t;
}

void ConfidenceThresholds::set(Category c, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError("confidence threshold for " + std::string(category_name(c)) + " outside [0,1]");
  }
  values_[static_cast<std::size_t>(c)] = value;
}

std::vector<Detection> filter_confidence(std::span<const Detection> detections,
                                         const ConfidenceThresholds& thresholds) {
  std::vector<Detection> out;
  out.reserve(detections.size());
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(out),
               [&](const Detection& d) { return d.confidence >= thresholds[d.category]; });
  return out;
}

}  // namespace omr
