#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unistd.h>

#include "omr/pipeline.hpp"
#include "synth.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string golden(const std::string& name) { return read_file(fs::path(OMR_TEST_DATA_DIR) / "golden" / name); }

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("omr-pipeline-" + std::to_string(::getpid()) + "-" +
                                         ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path fixture(const std::string& name, const omr::synth::PageSpec& spec) {
    const auto dir = root_ / name;
    omr::synth::write_fixture(omr::synth::render_page(spec), dir);
    return dir;
  }

  static omr::PipelineConfig config_for(const fs::path& dir) {
    omr::PipelineConfig c;
    c.image = dir / "page.png";
    c.detections_dir = dir;
    return c;
  }

  fs::path root_;
};

}  // namespace

TEST_F(PipelineTest, MelodyMatchesGolden) {
  const auto result = omr::run(config_for(fixture("melody", omr::synth::melody_score())));
  EXPECT_EQ(result.musicxml, golden("melody.musicxml"));
  EXPECT_EQ(result.report.measures_found, 2u);
  EXPECT_EQ(result.report.events_emitted, 8u);
  EXPECT_EQ(result.report.diagnostic_count(), 0u);
}

TEST_F(PipelineTest, ParallelRunIsByteIdentical) {
  const auto dir = fixture("chord", omr::synth::chord_score());
  auto config = config_for(dir);
  const auto seq = omr::run(config);
  config.mode = omr::RunMode::parallel;
  config.workers = 4;
  const auto par = omr::run(config);
  EXPECT_EQ(seq.musicxml, par.musicxml);
  EXPECT_EQ(seq.musicxml, golden("chord.musicxml"));
  EXPECT_EQ(par.report.workers, 4);
  EXPECT_EQ(par.report.mode, omr::RunMode::parallel);
}

TEST_F(PipelineTest, SequentialModeIgnoresWorkerCount) {
  omr::PipelineConfig c;
  c.workers = 8;
  EXPECT_EQ(c.effective_workers(), 1);
  c.mode = omr::RunMode::parallel;
  EXPECT_EQ(c.effective_workers(), 8);
}

TEST_F(PipelineTest, UnmappedClefIsReportedOnce) {
  auto spec = omr::synth::melody_score();
  spec.systems[0].staff1[1].symbols.push_back(omr::synth::clef(omr::Label::cf2, 0.92));
  const auto result = omr::run(config_for(fixture("cf2", spec)));
  EXPECT_EQ(result.musicxml, golden("melody.musicxml"));
  ASSERT_EQ(result.report.diagnostic_count(), 1u);
  const auto& d = result.report.measures.at(1).diagnostics.at(0);
  EXPECT_EQ(d.code, "unmapped_label");
  EXPECT_NE(d.message.find("cf2"), std::string::npos);
  EXPECT_EQ(result.report.components_unresolved, 1u);
}

TEST_F(PipelineTest, MissingUnitDetectionsAreDiagnosed) {
  const auto dir = fixture("empty", omr::synth::melody_score());
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().starts_with("1.")) fs::remove(e.path());
  }
  const auto result = omr::run(config_for(dir));
  ASSERT_EQ(result.report.measures.size(), 2u);
  const auto& diags = result.report.measures[1].diagnostics;
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "no_symbols");
  EXPECT_NE(result.musicxml.find("<rest measure=\"yes\"/>"), std::string::npos);
}

TEST_F(PipelineTest, ShortStaffInASystemIsPadded) {
  auto spec = omr::synth::chord_score();
  spec.systems[0].staff1.push_back(spec.systems[0].staff1[0]);
  const auto result = omr::run(config_for(fixture("pad", spec)));
  ASSERT_EQ(result.report.diagnostics.size(), 1u);
  EXPECT_EQ(result.report.diagnostics[0].code, "system_padded");

  std::istringstream in(result.musicxml);
  boost::property_tree::ptree doc;
  boost::property_tree::read_xml(in, doc);
  std::vector<int> measures;
  for (const auto& [tag, part] : doc.get_child("score-partwise")) {
    if (tag == "part") measures.push_back(static_cast<int>(part.count("measure")));
  }
  EXPECT_EQ(measures, (std::vector<int>{2, 2}));
}

TEST_F(PipelineTest, StageTimesAddUpToTotal) {
  const auto result = omr::run(config_for(fixture("melody", omr::synth::melody_score())));
  const auto& stages = result.report.stages;
  std::vector<std::string> names;
  for (const auto& s : stages) {
    names.push_back(s.stage);
    EXPECT_GE(s.ms, 0.0);
  }
  EXPECT_EQ(names, (std::vector<std::string>{"load_level", "measures", "extract", "detect_fit_group", "assemble",
                                             "serialize", "write"}));
  const double sum = std::accumulate(stages.begin(), stages.end(), 0.0,
                                     [](double a, const omr::StageTime& s) { return a + s.ms; });
  EXPECT_NEAR(sum, result.report.total_ms, 1e-6 * std::max(1.0, result.report.total_ms));
}

TEST_F(PipelineTest, WritesOutputAndReport) {
  auto config = config_for(fixture("melody", omr::synth::melody_score()));
  config.output = root_ / "out" / "melody.musicxml";
  fs::create_directories(root_ / "out");
  const auto result = omr::run(config);
  EXPECT_EQ(read_file(*config.output), result.musicxml);
  const auto report = read_file(root_ / "out" / "melody.report.json");
  EXPECT_NE(report.find("\"events_emitted\": 8"), std::string::npos);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(root_ / "out")) ++files;
  EXPECT_EQ(files, 2u);
}

TEST_F(PipelineTest, SplitStavesWritesOneFilePerPart) {
  auto config = config_for(fixture("chord", omr::synth::chord_score()));
  config.output = root_ / "chord.musicxml";
  config.split_staves = true;
  const auto result = omr::run(config);
  ASSERT_EQ(result.part_documents.size(), 2u);
  EXPECT_EQ(read_file(root_ / "chord-P1.musicxml"), result.part_documents[0]);
  EXPECT_EQ(read_file(root_ / "chord-P2.musicxml"), result.part_documents[1]);
  EXPECT_FALSE(fs::exists(root_ / "chord.musicxml"));
}

TEST_F(PipelineTest, DumpsUnitImagesAndOverlays) {
  auto config = config_for(fixture("melody", omr::synth::melody_score()));
  config.dump_measures = root_ / "units";
  config.dump_overlays = root_ / "overlays";
  omr::run(config);
  EXPECT_TRUE(fs::exists(root_ / "units" / "unit-0.png"));
  EXPECT_TRUE(fs::exists(root_ / "units" / "unit-1.png"));
  const auto overlay = omr::load_grayscale(root_ / "overlays" / "unit-1-overlay.png");
  EXPECT_EQ(overlay.width(), 416);
}

TEST_F(PipelineTest, MissingSourceIsAConfigError) {
  omr::PipelineConfig config;
  config.image = root_ / "page.png";
  EXPECT_THROW(omr::run(config), omr::ConfigError);
  config.detections_dir = root_ / "absent";
  EXPECT_THROW(omr::run(config), omr::ConfigError);
}

TEST_F(PipelineTest, InvalidSettingsAreConfigErrors) {
  omr::PipelineConfig config;
  config.workers = 0;
  EXPECT_THROW(config.validate(), omr::ConfigError);
  config.workers = 1;
  config.fifths = 8;
  EXPECT_THROW(config.validate(), omr::ConfigError);
  config.fifths = 0;
  config.detections_dir = root_;
  config.detector_command = "cat {image}";
  EXPECT_THROW(config.validate(), omr::ConfigError);
}

TEST_F(PipelineTest, AtomicWriteReplacesContentAndLeavesNoTemporaries) {
  const auto path = root_ / "a.txt";
  omr::write_file_atomic(path, "first");
  omr::write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(root_)) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_ANY_THROW(omr::write_file_atomic(root_ / "no" / "such" / "dir.txt", "x"));
}
