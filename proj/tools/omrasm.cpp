#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "omr/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kAlignment = 3, kDetector = 4 };

void apply_confidence(omr::PipelineConfig& config, const std::vector<std::string>& specs) {
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw omr::ConfigError("--confidence expects CAT=VALUE, got '" + spec + "'");
    const auto category = omr::parse_category(spec.substr(0, eq));
    if (!category) throw omr::ConfigError("unknown category '" + spec.substr(0, eq) + "'");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(spec.substr(eq + 1), &used);
      if (used != spec.size() - eq - 1) throw std::invalid_argument(spec);
    } catch (const std::logic_error&) {
      throw omr::ConfigError("invalid confidence value in '" + spec + "'");
    }
    config.thresholds.set(*category, value);
  }
}

int assemble(omr::PipelineConfig config, const std::string& time, const std::string& mode,
             const std::vector<std::string>& confidences, bool quiet) {
  config.time = omr::parse_time(time);
  config.mode = mode == "par" ? omr::RunMode::parallel : omr::RunMode::sequential;
  apply_confidence(config, confidences);
  const auto result = omr::run(config);
  if (!config.output) std::cout << result.musicxml;
  if (!quiet) std::cerr << result.report.to_table();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assemble MusicXML from a page image and symbol detections"};
  app.require_subcommand(1);

  omr::PipelineConfig config;
  std::string image;
  std::string detections;
  std::string detector;
  std::string semantics;
  std::string out;
  std::string dump_measures;
  std::string dump_overlays;
  std::string time = "4/4";
  std::string mode = "seq";
  std::vector<std::string> confidences;
  bool quiet = false;
  bool no_level = false;

  auto* cmd = app.add_subcommand("assemble", "Run the full pipeline on one page");
  cmd->add_option("image", image, "Page image (PNG or JPEG)")->required()->check(CLI::ExistingFile);
  auto* det_dir = cmd->add_option("--detections", detections, "Directory of detection fixture files");
  auto* det_cmd = cmd->add_option("--detector", detector, "Detector command with {image} and {category} placeholders");
  det_dir->excludes(det_cmd);
  cmd->add_option("--semantics", semantics, "Label semantics JSON")->check(CLI::ExistingFile);
  cmd->add_option("--fifths", config.fifths, "Key signature, -7..7")->check(CLI::Range(-7, 7));
  cmd->add_option("--time", time, "Time signature B/T")->capture_default_str();
  cmd->add_option("--mode", mode, "seq or par")->check(CLI::IsMember({"seq", "par"}))->capture_default_str();
  cmd->add_option("--workers", config.workers, "Worker threads in parallel mode")->check(CLI::PositiveNumber);
  cmd->add_option("--out", out, "Output MusicXML file (stdout when omitted)");
  cmd->add_flag("--split-staves", config.split_staves, "Write one file per staff");
  cmd->add_option("--dump-measures", dump_measures, "Directory for measure unit images");
  cmd->add_option("--dump-overlays", dump_overlays, "Directory for staff-fit overlays");
  cmd->add_option("--confidence", confidences, "Per-category threshold CAT=VALUE")->take_all();
  cmd->add_flag("--no-level", no_level, "Skip page leveling");
  cmd->add_flag("-q,--quiet", quiet, "Do not print the run report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  config.image = image;
  if (!detections.empty()) config.detections_dir = detections;
  if (!detector.empty()) config.detector_command = detector;
  if (!semantics.empty()) config.semantics_file = semantics;
  if (!out.empty()) config.output = out;
  if (!dump_measures.empty()) config.dump_measures = dump_measures;
  if (!dump_overlays.empty()) config.dump_overlays = dump_overlays;
  config.level_page = !no_level;
  if (config.split_staves && !config.output) {
    std::cerr << "error: --split-staves needs --out\n";
    return kConfig;
  }

  try {
    return assemble(config, time, mode, confidences, quiet);
  } catch (const omr::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const omr::InputFormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfig;
  } catch (const omr::AlignmentError& e) {
    std::cerr << "alignment error: " << e.what() << "\n";
    return kAlignment;
  } catch (const omr::DetectorError& e) {
    std::cerr << "detector error: " << e.what() << "\n";
    return kDetector;
  } catch (const omr::ParseError& e) {
    std::cerr << "detection parse error: " << e.what() << "\n";
    return kDetector;
  } catch (const omr::ValidationError& e) {
    std::cerr << "detection validation error: " << e.what() << "\n";
    return kDetector;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
