#include <benchmark/benchmark.h>
#include <unistd.h>

#include <filesystem>

#include "omr/pipeline.hpp"
#include "oracles.hpp"
#include "synth.hpp"

namespace {

namespace fs = std::filesystem;

void BM_FitStaff(benchmark::State& state) {
  const auto unit = omr::synth::render_unit(416, 0.01, -0.002);
  for (auto _ : state) benchmark::DoNotOptimize(omr::fit_staff(unit));
}
BENCHMARK(BM_FitStaff)->Unit(benchmark::kMillisecond);

void BM_BlackAreaScore(benchmark::State& state) {
  const auto unit = omr::synth::render_unit(416, 0.0, 0.0);
  const omr::BlackAreaScorer scorer(unit);
  const auto geometry = omr::simulate_lines(0.01, 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score(geometry));
}
BENCHMARK(BM_BlackAreaScore)->Unit(benchmark::kMicrosecond);

void BM_EstimateTilt(benchmark::State& state) {
  auto spec = omr::synth::melody_score();
  spec.tilt_deg = 3.0;
  const auto page = omr::synth::render_page(spec).image;
  for (auto _ : state) benchmark::DoNotOptimize(omr::estimate_tilt(page, true));
}
BENCHMARK(BM_EstimateTilt)->Unit(benchmark::kMillisecond);

void BM_ResolveVodms(benchmark::State& state) {
  const auto group = omr::oracle::stack_group({omr::Label::am0, omr::Label::bd0, omr::Label::bd1, omr::Label::am1});
  const omr::ResolveContext ctx;
  for (auto _ : state) benchmark::DoNotOptimize(omr::resolve_vodms(group, ctx));
}
BENCHMARK(BM_ResolveVodms);

// Whole pipeline on the 48-measure page; the argument is the worker count
// (1 = sequential) and the detector costs 50 ms per measure.
void BM_Pipeline(benchmark::State& state) {
  const auto dir = fs::temp_directory_path() / ("omr-bench-" + std::to_string(::getpid()));
  omr::synth::write_fixture(omr::synth::render_page(omr::synth::workload_score()), dir);
  omr::FixtureSource fixture(dir);
  omr::DelayedSource source(fixture, std::chrono::milliseconds(50));
  omr::PipelineConfig config;
  config.image = dir / "page.png";
  const int workers = static_cast<int>(state.range(0));
  config.mode = workers > 1 ? omr::RunMode::parallel : omr::RunMode::sequential;
  config.workers = workers;
  for (auto _ : state) benchmark::DoNotOptimize(omr::run(config, source));
  fs::remove_all(dir);
}
BENCHMARK(BM_Pipeline)->Arg(1)->Arg(4)->Iterations(1)->Unit(benchmark::kSecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
