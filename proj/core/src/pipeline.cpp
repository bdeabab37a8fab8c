#include "omr/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "omr/parallel.hpp"

namespace omr {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& report) : report_(report), start_(Clock::now()), last_(start_) {}

  void lap(std::string stage) {
    const auto now = Clock::now();
    report_.stages.push_back({std::move(stage), std::chrono::duration<double, std::milli>(now - last_).count()});
    last_ = now;
    report_.total_ms = std::chrono::duration<double, std::milli>(now - start_).count();
  }

 private:
  RunReport& report_;
  Clock::time_point start_;
  Clock::time_point last_;
};

std::string_view mode_name(RunMode mode) { return mode == RunMode::parallel ? "parallel" : "sequential"; }

std::string_view reason_name(RejectReason r) { return r == RejectReason::duplicate ? "duplicate" : "no_row"; }

nlohmann::json diagnostics_json(const Diagnostics& diagnostics) {
  auto out = nlohmann::json::array();
  for (const auto& d : diagnostics) out.push_back({{"code", d.code}, {"message", d.message}});
  return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& path, std::string_view suffix) {
  auto out = path;
  out.replace_extension();
  out += suffix;
  return out;
}

std::atomic<unsigned long> g_temp_counter{0};

}  // namespace

void PipelineConfig::validate() const {
  if (workers < 1) throw ConfigError("worker count must be at least 1");
  if (detections_dir && detector_command) throw ConfigError("give either a detections directory or a detector command");
  (void)measure_capacity(time);
  (void)AccidentalTable(fifths);
}

std::size_t RunReport::diagnostic_count() const {
  std::size_t n = diagnostics.size();
  for (const auto& m : measures) n += m.diagnostics.size();
  return n;
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["mode"] = mode_name(mode);
  j["workers"] = workers;
  j["total_ms"] = total_ms;
  auto stages_json = nlohmann::json::array();
  for (const auto& s : stages) stages_json.push_back({{"stage", s.stage}, {"ms", s.ms}});
  j["stages"] = stages_json;
  j["page_tilt_deg"] = page_tilt_deg;
  j["counts"] = {{"measures_found", measures_found},
                 {"events_emitted", events_emitted},
                 {"components_unresolved", components_unresolved}};
  j["diagnostics"] = diagnostics_json(diagnostics);
  auto ms = nlohmann::json::array();
  for (const auto& m : measures) {
    ms.push_back({{"unit", m.unit_index},
                  {"staff", m.staff},
                  {"number", m.number},
                  {"tilt_deg", m.tilt_deg},
                  {"alpha", m.alpha},
                  {"beta", m.beta},
                  {"components", m.components},
                  {"events", m.events},
                  {"diagnostics", diagnostics_json(m.diagnostics)}});
  }
  j["measures"] = ms;
  return j.dump(2) + "\n";
}

std::string RunReport::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "mode " << mode_name(mode) << ", workers " << workers << "\n";
  for (const auto& s : stages) os << "  " << std::left << std::setw(18) << s.stage << std::right << std::setw(10) << s.ms << " ms\n";
  os << "  " << std::left << std::setw(18) << "total" << std::right << std::setw(10) << total_ms << " ms\n";
  os << "measures " << measures_found << ", events " << events_emitted << ", unresolved components "
     << components_unresolved << ", diagnostics " << diagnostic_count() << "\n";
  for (const auto& d : diagnostics) os << "  page: [" << d.code << "] " << d.message << "\n";
  for (const auto& m : measures) {
    for (const auto& d : m.diagnostics) {
      os << "  staff " << m.staff << " measure " << m.number << ": [" << d.code << "] " << d.message << "\n";
    }
  }
  return os.str();
}

std::vector<UnitWork> process_units(std::span<const MeasureUnit> units, DetectionSource& source,
                                    const ConfidenceThresholds& thresholds, int workers) {
  std::vector<UnitWork> work(units.size());
  parallel_for(units.size(), workers, [&](std::size_t i) {
    auto& w = work[i];
    const auto& unit = units[i];
    std::vector<Detection> detections;
    try {
      for (const Category c : kSymbolCategories) {
        auto d = source.unit(i, unit.image, c);
        detections.insert(detections.end(), d.begin(), d.end());
      }
    } catch (const std::exception& e) {
      w.failed = true;
      report(&w.diagnostics, "detector_failed", e.what());
      return;
    }
    if (detections.empty()) report(&w.diagnostics, "no_symbols", "detector returned no records");
    const auto kept = filter_confidence(detections, thresholds);
    try {
      w.fit = fit_staff(unit.image);
      if (w.fit.degenerate) report(&w.diagnostics, "staff_fit_degenerate", "every staff candidate scored the same");
      const auto components = make_components(kept, w.fit.geometry, &w.diagnostics);
      w.prepared = prepare_measure(components);
    } catch (const std::exception& e) {
      w.failed = true;
      w.prepared = {};
      report(&w.diagnostics, "measure_failed", e.what());
    }
  });
  return work;
}

std::array<StaffAssembly, 2> assemble_units(std::span<const MeasureUnit> units, std::span<const UnitWork> work,
                                            const SemanticsTable& semantics, int fifths, const TimeSpec& time) {
  const int capacity = measure_capacity(time);
  std::array<StaffAssembly, 2> staves;
  std::array<ClefSign, 2> clef{ClefSign::G, ClefSign::F};
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& unit = units[i];
    const std::size_t s = unit.staff_id == 2 ? 1 : 0;
    // A row starts with the clef its seed measure carries.
    if (unit.col_index == 0) clef[s] = unit.seed_label == Label::x1 ? ClefSign::F : ClefSign::G;
    auto assembly = assemble_prepared(work[i].prepared, clef[s], fifths, semantics, time.divisions);
    auto adjusted = adjust_voices(assembly.events, capacity);
    assembly.events = std::move(adjusted.events);
    assembly.diagnostics.insert(assembly.diagnostics.begin(), work[i].diagnostics.begin(), work[i].diagnostics.end());
    assembly.diagnostics.insert(assembly.diagnostics.end(), adjusted.diagnostics.begin(), adjusted.diagnostics.end());
    clef[s] = assembly.clef_out;
    staves[s].unit_index.push_back(i);
    staves[s].measures.push_back(std::move(assembly));
  }
  return staves;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  auto temp = path;
  temp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(g_temp_counter++);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + temp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(temp, ec);
      throw Error("cannot write " + temp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw Error("cannot move output into place: " + path.string());
  }
}

RunResult run(const PipelineConfig& config) {
  config.validate();
  if (config.detections_dir) {
    FixtureSource source(*config.detections_dir);
    return run(config, source);
  }
  if (config.detector_command) {
    CommandSource source(*config.detector_command);
    return run(config, source);
  }
  throw ConfigError("no detection source: give a detections directory or a detector command");
}

RunResult run(const PipelineConfig& config, DetectionSource& source) {
  config.validate();
  const auto semantics = load_semantics(config.semantics_file);
  const int workers = config.effective_workers();

  RunResult result;
  RunReport& report = result.report;
  report.mode = config.mode;
  report.workers = workers;
  Stopwatch watch(report);

  RasterImage page = load_grayscale(config.image);
  if (config.level_page) {
    const auto tilt = estimate_tilt(page, /*horizontal_only=*/true);
    if (tilt.found && tilt.degrees != 0.0) {
      page = rotate_level(page, tilt.degrees, &report.diagnostics);
      report.page_tilt_deg = tilt.degrees;
    }
  }
  watch.lap("load_level");

  const auto page_detections = filter_confidence(source.page(page), config.thresholds);
  const auto boxes = measure_boxes_from_detections(page_detections, page.width(), page.height());
  auto alignment = align_measures(boxes);
  for (const auto& r : alignment.rejected) {
    omr::report(&report.diagnostics, "measure_rejected",
           std::string(label_name(r.box.label)) + " box rejected (" + std::string(reason_name(r.reason)) + ")");
  }
  assign_staves(alignment.rows);
  watch.lap("measures");

  ExtractOptions extract;
  extract.workers = workers;
  const auto units = extract_measure_units(page, alignment.rows, extract, &report.diagnostics);
  report.measures_found = units.size();
  watch.lap("extract");

  const auto work = process_units(units, source, config.thresholds, workers);
  watch.lap("detect_fit_group");

  const auto staves = assemble_units(units, work, semantics, config.fifths, config.time);
  watch.lap("assemble");

  // Pad each system so both staves carry the same number of measures.
  const bool grand_staff = !staves[0].measures.empty() && !staves[1].measures.empty();
  std::array<std::vector<StaffMeasure>, 2> parts;
  std::map<int, std::array<std::vector<std::size_t>, 2>> systems;
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t k = 0; k < staves[s].measures.size(); ++k) {
      systems[units[staves[s].unit_index[k]].pair_index][s].push_back(k);
    }
  }
  for (const auto& [system, members] : systems) {
    const std::size_t count = std::max(members[0].size(), members[1].size());
    for (std::size_t s = 0; s < 2; ++s) {
      if (!grand_staff && members[s].empty()) continue;
      for (const std::size_t k : members[s]) {
        const auto& m = staves[s].measures[k];
        const auto& unit = units[staves[s].unit_index[k]];
        const auto& w = work[staves[s].unit_index[k]];
        parts[s].push_back(to_staff_measure(m));
        MeasureReport mr;
        mr.unit_index = staves[s].unit_index[k];
        mr.staff = static_cast<int>(s) + 1;
        mr.number = static_cast<int>(parts[s].size());
        mr.tilt_deg = unit.tilt_deg;
        mr.alpha = w.fit.alpha;
        mr.beta = w.fit.beta;
        mr.components = w.prepared.components.size();
        mr.events = m.events.size();
        mr.diagnostics = m.diagnostics;
        report.events_emitted += m.events.size();
        report.components_unresolved += static_cast<std::size_t>(
            std::count(m.dispositions.begin(), m.dispositions.end(), Disposition::diagnostic));
        report.measures.push_back(std::move(mr));
      }
      if (members[s].size() < count) {
        const ClefSign clef = parts[s].empty()                       ? (s == 0 ? ClefSign::G : ClefSign::F)
                              : parts[s].back().clef_changes.empty() ? parts[s].back().clef_in
                                                                     : parts[s].back().clef_changes.back().sign;
        for (std::size_t k = members[s].size(); k < count; ++k) parts[s].push_back({{}, clef, {}});
        omr::report(&report.diagnostics, "system_padded",
               "system " + std::to_string(system + 1) + ": staff " + std::to_string(s + 1) + " padded with " +
                   std::to_string(count - members[s].size()) + " empty measure(s)");
      }
    }
  }
  std::stable_sort(report.measures.begin(), report.measures.end(), [](const MeasureReport& a, const MeasureReport& b) {
    return std::make_pair(a.staff, a.number) < std::make_pair(b.staff, b.number);
  });

  const auto tree = build_tree(parts[0], parts[1], config.time, config.fifths, &report.diagnostics);
  result.musicxml = serialize(tree);
  if (config.split_staves) {
    for (std::size_t p = 0; p < tree.parts.size(); ++p) result.part_documents.push_back(serialize_part(tree, p));
  }
  watch.lap("serialize");

  if (config.dump_measures || config.dump_overlays) {
    for (const auto* dir : {&config.dump_measures, &config.dump_overlays}) {
      if (*dir) std::filesystem::create_directories(**dir);
    }
    for (std::size_t i = 0; i < units.size(); ++i) {
      const std::string stem = "unit-" + std::to_string(i);
      if (config.dump_measures) write_png(units[i].image, *config.dump_measures / (stem + ".png"));
      if (config.dump_overlays) {
        write_overlay_png(units[i].image, work[i].fit.geometry, *config.dump_overlays / (stem + "-overlay.png"));
      }
    }
  }
  if (config.output) {
    if (config.split_staves) {
      for (std::size_t p = 0; p < tree.parts.size(); ++p) {
        write_file_atomic(with_suffix(*config.output, "-" + tree.parts[p].id + ".musicxml"), result.part_documents[p]);
      }
    } else {
      write_file_atomic(*config.output, result.musicxml);
    }
  }
  watch.lap("write");
  if (config.output) write_file_atomic(with_suffix(*config.output, ".report.json"), report.to_json());
  return result;
}

}  // namespace omr
