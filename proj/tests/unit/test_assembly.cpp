#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "omr/assembly.hpp"
#include "oracles.hpp"

namespace {

using omr::Category;
using omr::ClefSign;
using omr::Label;
using omr::Letter;
using omr::SymbolComponent;

const omr::StaffGeometry kGeometry = omr::simulate_lines(0.0, 0.0);
const double kGap = kGeometry.gap();

// Component centered at column x (unit width) and staff position `pos`,
// `w` and `h` in gaps.
SymbolComponent at(Label label, double x, double pos, double w = 1.3, double h = 1.0) {
  SymbolComponent c;
  c.label = label;
  c.category = omr::label_category(label);
  c.box = omr::Box::from_center(x, kGeometry.position_y(0) - pos * kGap / 2.0, w * kGap, h * kGap);
  if (c.category == Category::body || c.category == Category::accidental || c.category == Category::rest) {
    c.staff_position = omr::y_to_position(kGeometry, c.box.cy());
  }
  return c;
}

SymbolComponent stem_up(Label label, double x, double pos) { return at(label, x, pos + 3.5, 1.3, 3.5); }
SymbolComponent stem_down(Label label, double x, double pos) { return at(label, x, pos - 3.5, 1.3, 3.5); }

std::vector<SymbolComponent> numbered(std::vector<SymbolComponent> cs) {
  for (std::size_t i = 0; i < cs.size(); ++i) cs[i].id = static_cast<int>(i);
  return cs;
}

std::string pitch_name(const omr::NoteEvent& e) {
  return std::string(1, omr::letter_char(e.pitch.letter)) + std::to_string(e.pitch.octave);
}

omr::MeasureAssembly assemble(const std::vector<SymbolComponent>& cs, ClefSign clef = ClefSign::G, int fifths = 0) {
  return omr::assemble_measure(numbered(cs), clef, fifths, omr::SemanticsTable::defaults());
}

}  // namespace

TEST(AccidentalTable, NoKeyMeansNoAlters) {
  const auto t = omr::init_accidental_table(0);
  for (int l = 0; l < 7; ++l) EXPECT_EQ(t.key_alter(static_cast<Letter>(l)), 0);
  EXPECT_TRUE(t.overrides().empty());
}

TEST(AccidentalTable, FollowsTheCircleOfFifths) {
  // Oracle: the n-th sharp is a fifth (4 letters) above the previous,
  // starting on F; the n-th flat is a fourth above, starting on B.
  for (int fifths = -7; fifths <= 7; ++fifths) {
    std::set<int> altered;
    int letter = fifths >= 0 ? 3 : 6;
    for (int i = 0; i < std::abs(fifths); ++i) {
      altered.insert(letter);
      letter = (letter + (fifths >= 0 ? 4 : 3)) % 7;
    }
    const auto t = omr::init_accidental_table(fifths);
    for (int l = 0; l < 7; ++l) {
      const int expected = altered.count(l) ? (fifths > 0 ? 1 : -1) : 0;
      EXPECT_EQ(t.key_alter(static_cast<Letter>(l)), expected) << "fifths " << fifths << " letter " << l;
    }
  }
}

TEST(AccidentalTable, TwoSharpsAndOneFlat) {
  const auto d = omr::init_accidental_table(2);
  EXPECT_EQ(d.key_alter(Letter::F), 1);
  EXPECT_EQ(d.key_alter(Letter::C), 1);
  EXPECT_EQ(d.key_alter(Letter::G), 0);
  const auto f = omr::init_accidental_table(-1);
  EXPECT_EQ(f.key_alter(Letter::B), -1);
  EXPECT_EQ(f.key_alter(Letter::E), 0);
}

TEST(AccidentalTable, OutOfRangeIsAConfigError) {
  EXPECT_THROW(omr::init_accidental_table(8), omr::ConfigError);
  EXPECT_THROW(omr::init_accidental_table(-8), omr::ConfigError);
}

TEST(AccidentalTable, OverridesAreKeyedByLetterAndOctave) {
  auto t = omr::init_accidental_table(-1);
  t.set_override({Letter::B, 4}, 0);
  EXPECT_EQ(t.effective_alter({Letter::B, 4}), 0);
  EXPECT_EQ(t.effective_alter({Letter::B, 3}), -1);
}

TEST(PositionToPitch, SpanEndpointsAndMiddleLines) {
  auto name = [](ClefSign c, int p) {
    const auto pitch = omr::position_to_pitch(c, p);
    return std::string(1, omr::letter_char(pitch->letter)) + std::to_string(pitch->octave);
  };
  EXPECT_EQ(name(ClefSign::G, -12), "D3");
  EXPECT_EQ(name(ClefSign::G, 12), "G6");
  EXPECT_EQ(name(ClefSign::F, -12), "F1");
  EXPECT_EQ(name(ClefSign::F, 12), "B4");
  EXPECT_EQ(name(ClefSign::G, 0), "B4");
  EXPECT_EQ(name(ClefSign::F, 0), "D3");
}

TEST(PositionToPitch, MatchesHandWrittenSpans) {
  for (int p = -12; p <= 12; ++p) {
    const auto g = omr::position_to_pitch(ClefSign::G, p);
    const auto f = omr::position_to_pitch(ClefSign::F, p);
    ASSERT_TRUE(g && f);
    EXPECT_EQ(std::string(1, omr::letter_char(g->letter)) + std::to_string(g->octave),
              omr::oracle::treble_span()[static_cast<std::size_t>(p + 12)]);
    EXPECT_EQ(std::string(1, omr::letter_char(f->letter)) + std::to_string(f->octave),
              omr::oracle::bass_span()[static_cast<std::size_t>(p + 12)]);
  }
  EXPECT_FALSE(omr::position_to_pitch(ClefSign::G, 13));
  EXPECT_FALSE(omr::position_to_pitch(ClefSign::F, -13));
}

TEST(MakeComponents, ComputesPositionsAndDropsOutliers) {
  const std::vector<omr::Detection> dets = {
      {Category::body, Label::bd0, 0.9, 0.5, kGeometry.position_y(3), 0.05, kGap},
      {Category::body, Label::bd0, 0.9, 0.5, 0.01, 0.05, kGap},  // far above the ledger range
      {Category::arm_beam, Label::am0, 0.9, 0.5, 0.3, 0.05, 0.1},
      {Category::measure, Label::y0, 0.9, 0.5, 0.5, 1.0, 1.0},
      {Category::rest, Label::re2, 0.9, 0.3, 0.5, 0.05, 0.1},
  };
  omr::Diagnostics d;
  const auto cs = omr::make_components(dets, kGeometry, &d);
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_EQ(cs[0].staff_position, 3);
  EXPECT_FALSE(cs[1].staff_position);
  EXPECT_EQ(cs[2].staff_position, 0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "position_out_of_range");
}

TEST(BuildVodms, LoneBodyIsASingleton) {
  const auto groups = omr::build_vodms(numbered({at(Label::bd0, 0.5, 0)}));
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_TRUE(groups[0].singleton());
}

TEST(BuildVodms, ArmAboveBodyComesFirst) {
  const auto groups = omr::build_vodms(numbered({at(Label::bd0, 0.5, -2), stem_up(Label::am0, 0.5, -2)}));
  ASSERT_EQ(groups.size(), 1u);
  ASSERT_EQ(groups[0].members.size(), 2u);
  EXPECT_EQ(groups[0].members[0].label, Label::am0);
  EXPECT_EQ(groups[0].members[1].label, Label::bd0);
}

TEST(BuildVodms, ChordUnderABeam) {
  auto beam = at(Label::bm0, 0.5, 7, 1.6, 3.0);
  const auto groups =
      omr::build_vodms(numbered({at(Label::bd0, 0.5, 1), at(Label::bd0, 0.5, -1), beam}));
  ASSERT_EQ(groups.size(), 1u);
  ASSERT_EQ(groups[0].members.size(), 3u);
  EXPECT_EQ(groups[0].members[0].label, Label::bm0);
  EXPECT_EQ(groups[0].members[1].staff_position, 1);
  EXPECT_EQ(groups[0].members[2].staff_position, -1);
}

TEST(BuildVodms, SeparatesColumnsAndSharesBeams) {
  // Three eighths under one beam spanning all columns.
  std::vector<SymbolComponent> cs = {at(Label::bd0, 0.3, -1), at(Label::bd0, 0.5, 0), at(Label::bd0, 0.7, 1)};
  auto beam = at(Label::bm0, 0.5, 6, 1.3, 3.0);
  beam.box.left = 0.3 - 0.65 * kGap;
  beam.box.right = 0.7 + 0.65 * kGap;
  cs.push_back(beam);
  // The beam is far wider than each column; it overlaps every one fully.
  const auto groups = omr::build_vodms(numbered(cs));
  ASSERT_EQ(groups.size(), 3u);
  for (const auto& g : groups) {
    ASSERT_EQ(g.members.size(), 2u);
    EXPECT_EQ(g.members[0].label, Label::bm0);
  }
  EXPECT_LT(groups[0].left(), groups[1].left());
  EXPECT_LT(groups[1].left(), groups[2].left());
}

TEST(BuildVodms, KeepsAccidentalsAndClefsOut) {
  const auto groups = omr::build_vodms(numbered({at(Label::ac0, 0.5, 0), at(Label::cf0, 0.1, -1)}));
  EXPECT_TRUE(groups.empty());
}

TEST(BuildVodms, EveryPairInAGroupOverlaps) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> x(0.1, 0.9);
  std::uniform_int_distribution<int> pos(-6, 6);
  const std::array<Label, 5> labels = {Label::bd0, Label::bd2, Label::am0, Label::am1, Label::re2};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SymbolComponent> cs;
    for (int i = 0; i < 12; ++i) cs.push_back(at(labels[rng() % labels.size()], x(rng), pos(rng)));
    const auto groups = omr::build_vodms(numbered(cs));
    std::size_t total = 0;
    for (const auto& g : groups) {
      total += g.members.size();
      for (std::size_t i = 0; i < g.members.size(); ++i) {
        if (i > 0) EXPECT_LE(g.members[i - 1].box.cy(), g.members[i].box.cy());
        for (std::size_t j = i + 1; j < g.members.size(); ++j) {
          EXPECT_GE(omr::horizontal_overlap_ratio(g.members[i].box, g.members[j].box), 0.3);
        }
      }
    }
    EXPECT_EQ(total, cs.size());
  }
}

TEST(AssembleMeasure, WholeNoteOnTheMiddleLine) {
  const auto m = assemble({at(Label::cf0, 0.08, -1, 2.4, 6.5), at(Label::bd4, 0.5, 0, 1.6)});
  ASSERT_EQ(m.events.size(), 1u);
  const auto& e = m.events[0];
  EXPECT_EQ(pitch_name(e), "B4");
  EXPECT_EQ(e.type, omr::NoteType::whole);
  EXPECT_EQ(e.duration, 32);
  EXPECT_EQ(e.voice, 1);
  EXPECT_TRUE(m.diagnostics.empty());
}

TEST(AssembleMeasure, AccidentalOverridesItsPitch) {
  const auto m = assemble({at(Label::cf0, 0.08, -1, 2.4, 6.5), at(Label::ac0, 0.40, 1, 0.9, 2.5),
                           at(Label::bd0, 0.5, 1), stem_down(Label::am1, 0.5, 1)});
  ASSERT_EQ(m.events.size(), 1u);
  EXPECT_EQ(pitch_name(m.events[0]), "C5");
  EXPECT_EQ(m.events[0].alter, 1);
  EXPECT_EQ(m.events[0].type, omr::NoteType::quarter);
  EXPECT_EQ(m.events[0].stem_side, omr::StemSide::bottom);
}

TEST(AssembleMeasure, AccidentalOnlyAffectsItsOctave) {
  const auto m = assemble({at(Label::ac0, 0.2, 1, 0.9, 2.5), at(Label::bd0, 0.3, 1), at(Label::bd0, 0.6, -6)});
  ASSERT_EQ(m.events.size(), 2u);
  EXPECT_EQ(m.events[0].alter, 1);
  EXPECT_EQ(pitch_name(m.events[1]), "C4");
  EXPECT_EQ(m.events[1].alter, 0);
}

TEST(AssembleMeasure, AccidentalsDoNotOutliveTheMeasure) {
  const auto first = assemble({at(Label::ac1, 0.2, -4, 0.9, 2.5), at(Label::bd0, 0.3, -4)}, ClefSign::G, 0);
  EXPECT_EQ(first.events[0].alter, -1);
  const auto second = assemble({at(Label::bd0, 0.3, -4)}, ClefSign::G, 0);
  EXPECT_EQ(second.events[0].alter, 0);
}

TEST(AssembleMeasure, KeySignatureApplies) {
  const auto m = assemble({at(Label::bd0, 0.3, -3), at(Label::ac2, 0.45, -3, 0.9, 2.5), at(Label::bd0, 0.55, -3)},
                          ClefSign::G, 1);
  ASSERT_EQ(m.events.size(), 2u);
  EXPECT_EQ(pitch_name(m.events[0]), "F4");
  EXPECT_EQ(m.events[0].alter, 1);
  EXPECT_EQ(m.events[1].alter, 0);
}

TEST(AssembleMeasure, ClefOnlyMeasure) {
  const auto m = assemble({at(Label::cf1, 0.08, 1, 2.4, 3.5)});
  EXPECT_TRUE(m.events.empty());
  EXPECT_EQ(m.clef_out, ClefSign::F);
  ASSERT_EQ(m.clef_changes.size(), 1u);
  EXPECT_EQ(m.clef_changes[0], (omr::ClefChange{0, ClefSign::F}));
}

TEST(AssembleMeasure, ClefChangeMidMeasure) {
  const auto m = assemble({at(Label::bd0, 0.3, 0), at(Label::cf1, 0.5, 1, 2.4, 3.5), at(Label::bd0, 0.7, 0)});
  ASSERT_EQ(m.events.size(), 2u);
  EXPECT_EQ(pitch_name(m.events[0]), "B4");
  EXPECT_EQ(pitch_name(m.events[1]), "D3");
  ASSERT_EQ(m.clef_changes.size(), 1u);
  EXPECT_EQ(m.clef_changes[0].before_event, 1u);
  EXPECT_EQ(m.clef_in, ClefSign::G);
  EXPECT_EQ(m.clef_out, ClefSign::F);
}

TEST(AssembleMeasure, ClefThatRepeatsTheCurrentOneIsNotAChange) {
  const auto m = assemble({at(Label::cf0, 0.08, -1, 2.4, 6.5), at(Label::bd0, 0.5, 0)});
  EXPECT_TRUE(m.clef_changes.empty());
}

TEST(AssembleMeasure, FreeRestIsEmitted) {
  const auto m = assemble({at(Label::re2, 0.3, 0, 1.0, 2.5), at(Label::bd0, 0.6, -2)});
  ASSERT_EQ(m.events.size(), 2u);
  EXPECT_TRUE(m.events[0].is_rest);
  EXPECT_EQ(m.events[0].duration, 8);
  EXPECT_EQ(m.events[0].voice, 1);
  EXPECT_FALSE(m.events[1].is_rest);
}

TEST(AssembleMeasure, UnmappedClefIsReportedAndSkipped) {
  const auto m = assemble({at(Label::cf2, 0.08, -1, 2.4, 6.5), at(Label::bd4, 0.5, 0, 1.6)});
  ASSERT_EQ(m.events.size(), 1u);
  ASSERT_EQ(m.diagnostics.size(), 1u);
  EXPECT_EQ(m.diagnostics[0].code, "unmapped_label");
  EXPECT_EQ(m.dispositions[0], omr::Disposition::diagnostic);
  EXPECT_EQ(m.dispositions[1], omr::Disposition::event);
}

TEST(AssembleMeasure, BeamRolesAndDurations) {
  std::vector<SymbolComponent> cs = {at(Label::bd0, 0.3, -1), at(Label::bd0, 0.5, 0), at(Label::bd0, 0.7, 1)};
  auto beam = at(Label::bm2, 0.5, 6, 1.3, 3.0);
  beam.box.left = 0.3 - 0.65 * kGap;
  beam.box.right = 0.7 + 0.65 * kGap;
  cs.push_back(beam);
  const auto m = assemble(cs);
  ASSERT_EQ(m.events.size(), 3u);
  EXPECT_EQ(m.events[0].beam_role, omr::BeamRole::begin);
  EXPECT_EQ(m.events[1].beam_role, omr::BeamRole::cont);
  EXPECT_EQ(m.events[2].beam_role, omr::BeamRole::end);
  for (const auto& e : m.events) {
    EXPECT_EQ(e.type, omr::NoteType::sixteenth);
    EXPECT_EQ(e.duration, 2);
    EXPECT_EQ(e.beam_count, 2);
    EXPECT_EQ(e.stem_side, omr::StemSide::top);
  }
  EXPECT_EQ(m.dispositions[3], omr::Disposition::modifier);
  EXPECT_TRUE(m.diagnostics.empty());
}

TEST(AssembleMeasure, StrayStemIsReported) {
  const auto m = assemble({stem_up(Label::am0, 0.3, 0), at(Label::bd4, 0.7, 0, 1.6)});
  EXPECT_EQ(m.events.size(), 1u);
  ASSERT_EQ(m.diagnostics.size(), 1u);
  EXPECT_EQ(m.diagnostics[0].code, "unused_stem");
}

TEST(AssembleMeasure, ConservesEveryComponent) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> x(0.15, 0.95);
  std::uniform_int_distribution<int> pos(-8, 8);
  std::uniform_int_distribution<int> label_index(3, static_cast<int>(omr::kLabelCount) - 1);
  const auto semantics = omr::SemanticsTable::defaults();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SymbolComponent> cs;
    const int n = 1 + static_cast<int>(rng() % 14);
    for (int i = 0; i < n; ++i) {
      const auto label = static_cast<Label>(label_index(rng));
      cs.push_back(omr::is_arm(label) || omr::is_beam(label) ? stem_up(label, x(rng), pos(rng))
                                                            : at(label, x(rng), pos(rng)));
    }
    cs = numbered(cs);
    const auto m = omr::assemble_measure(cs, ClefSign::G, 0, semantics);
    ASSERT_EQ(m.dispositions.size(), cs.size());
    // Every event comes from a distinct event-disposed component.
    std::set<int> sources;
    for (const auto& e : m.events) sources.insert(e.source_id);
    EXPECT_EQ(sources.size(), m.events.size());
    const auto events = std::count(m.dispositions.begin(), m.dispositions.end(), omr::Disposition::event);
    const auto modifiers = std::count(m.dispositions.begin(), m.dispositions.end(), omr::Disposition::modifier);
    const auto reported = std::count(m.dispositions.begin(), m.dispositions.end(), omr::Disposition::diagnostic);
    EXPECT_EQ(static_cast<std::size_t>(events), m.events.size());
    EXPECT_LE(static_cast<std::size_t>(reported), m.diagnostics.size());
    EXPECT_EQ(static_cast<std::size_t>(events + modifiers + reported), cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (m.dispositions[i] == omr::Disposition::modifier) {
        const auto c = cs[i].category;
        EXPECT_TRUE(c == Category::accidental || c == Category::clef || c == Category::arm_beam);
      }
    }
  }
}

TEST(AssembleMeasure, IndependentOfInputOrder) {
  std::vector<SymbolComponent> cs = {at(Label::cf0, 0.08, -1, 2.4, 6.5), at(Label::ac1, 0.2, -4, 0.9, 2.5),
                                     at(Label::bd0, 0.3, -4),           stem_up(Label::am0, 0.3, -4),
                                     at(Label::re3, 0.45, 0, 1.0, 2.5), at(Label::bd2, 0.6, 2),
                                     at(Label::bd2, 0.6, -2),           stem_down(Label::am1, 0.6, -2),
                                     at(Label::bd4, 0.8, 1, 1.6)};
  const auto reference = assemble(cs);
  std::mt19937 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::size_t> perm(cs.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<SymbolComponent> shuffled;
    for (const auto i : perm) shuffled.push_back(cs[i]);
    const auto m = assemble(shuffled);
    EXPECT_EQ(m.events, reference.events);
    EXPECT_EQ(m.diagnostics, reference.diagnostics);
    for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_EQ(m.dispositions[k], reference.dispositions[perm[k]]);
  }
}

TEST(AssembleMeasure, ChordPitchesMatchBodyPositions) {
  const auto m = assemble({at(Label::bd0, 0.5, -6), at(Label::bd0, 0.5, -4), at(Label::bd0, 0.5, -2),
                           omr::SymbolComponent{0, Category::arm_beam, Label::am0,
                                                omr::Box{0.5 - 0.65 * kGap, kGeometry.position_y(5),
                                                         0.5 + 0.65 * kGap, kGeometry.position_y(-6)},
                                                1.0, std::nullopt}});
  ASSERT_EQ(m.events.size(), 3u);
  std::multiset<std::string> names;
  for (const auto& e : m.events) names.insert(pitch_name(e));
  EXPECT_EQ(names, (std::multiset<std::string>{"C4", "E4", "G4"}));
  EXPECT_FALSE(m.events[0].chord_member);
  EXPECT_TRUE(m.events[1].chord_member);
  EXPECT_TRUE(m.events[2].chord_member);
  EXPECT_EQ(pitch_name(m.events[0]), "C4");
}
