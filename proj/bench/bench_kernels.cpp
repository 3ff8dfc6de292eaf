// Serial reference vs OpenMP kernels on a 320x350 ROI. The parallel mixture
// update picks its vector path at run time; SLEEPMON_ISA=scalar|avx2 caps it.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sleepmon/background_model.hpp"
#include "sleepmon/synth.hpp"

namespace {

using namespace sleepmon;

constexpr int kWidth = 320;
constexpr int kHeight = 350;

// A noisy static bed with a moving block, so some pixels miss every component.
std::vector<DepthFrame> depth_frames(int count) {
  std::mt19937 rng(11);
  std::normal_distribution<float> noise(0.0f, 2.0f);
  std::vector<DepthFrame> frames;
  for (int f = 0; f < count; ++f) {
    DepthFrame d(kWidth, kHeight);
    for (int y = 0; y < kHeight; ++y) {
      for (int x = 0; x < kWidth; ++x) {
        const bool block = x >= 4 * f % kWidth && x < 4 * f % kWidth + 40 && y > 100 && y < 200;
        d.at(x, y) = static_cast<std::uint16_t>(1300 + y / 6 - (block ? 150 : 0) + noise(rng));
      }
    }
    frames.push_back(std::move(d));
  }
  return frames;
}

void BM_GmmDepth(benchmark::State& state, Execution execution) {
  const auto frames = depth_frames(32);
  BackgroundModel model(GmmParams::depth_defaults(), frames[0], execution);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.update_and_classify(frames[i++ % frames.size()]));
  }
  state.SetItemsProcessed(state.iterations() * kWidth * kHeight);
}
BENCHMARK_CAPTURE(BM_GmmDepth, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GmmDepth, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);

void BM_MorphSmooth(benchmark::State& state, Execution execution) {
  const auto frames = depth_frames(2);
  BackgroundModel model(GmmParams::depth_defaults(), frames[0], Execution::serial);
  const auto mask = model.update_and_classify(frames[1]);
  for (auto _ : state) benchmark::DoNotOptimize(morph_smooth(mask, execution));
  state.SetItemsProcessed(state.iterations() * kWidth * kHeight);
}
BENCHMARK_CAPTURE(BM_MorphSmooth, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MorphSmooth, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);

// One full pipeline frame: render both ROI crops, both models, morphology.
void BM_PipelineFrame(benchmark::State& state) {
  const SyntheticSession session(preset(PresetName::posture_test));
  auto models = make_models(session, GmmParams::depth_defaults(), GmmParams::luma_defaults());
  std::size_t i = 1;
  for (auto _ : state) {
    const auto d = models.depth.update_and_classify(session.depth_roi(i));
    const auto c = models.color.update_and_classify(to_luma(session.color_roi(i)));
    benchmark::DoNotOptimize(morph_smooth(d, Execution::parallel));
    benchmark::DoNotOptimize(morph_smooth(c, Execution::parallel));
    i = i % (session.manifest().frame_count - 1) + 1;
  }
  state.counters["fps"] = benchmark::Counter(static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_PipelineFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
