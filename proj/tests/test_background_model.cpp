#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sleepmon/background_model.hpp"
#include "sleepmon/error.hpp"

using namespace sleepmon;

namespace {

DepthFrame constant_depth(int w, int h, std::uint16_t v) { return DepthFrame(w, h, v); }

GmmParams params_for(const oracle::GmmSettings& s) {
  GmmParams p;
  p.components = s.k;
  p.initial_variance = s.init_var;
  return p;
}

void expect_mixture_invariants(const BackgroundModel& model) {
  for (int y = 0; y < model.height(); ++y) {
    for (int x = 0; x < model.width(); ++x) {
      if (!model.observed(x, y)) continue;
      double total = 0.0;
      for (const auto& c : model.pixel(x, y)) {
        total += c.weight;
        ASSERT_GE(c.variance, model.params().variance_floor);
        ASSERT_GE(c.weight, 0.0f);
        ASSERT_LE(c.weight, 1.0f);
      }
      ASSERT_NEAR(total, 1.0, 1e-6);
      const auto mix = model.pixel(x, y);
      for (std::size_t i = 1; i < mix.size(); ++i) {
        ASSERT_GE(mix[i - 1].weight / std::sqrt(mix[i - 1].variance) * (1 + 1e-6),
                  mix[i].weight / std::sqrt(mix[i].variance));
      }
    }
  }
}

}  // namespace

TEST(BackgroundModel, SeedsOneComponentPerPixel) {
  BackgroundModel m(GmmParams::depth_defaults(), constant_depth(4, 3, 1000));
  const auto mix = m.pixel(2, 1);
  ASSERT_EQ(mix.size(), 3u);
  EXPECT_EQ(mix[0].weight, 1.0f);
  EXPECT_EQ(mix[0].mean, 1000.0f);
  EXPECT_EQ(mix[0].variance, 2500.0f);
  EXPECT_EQ(mix[1].weight, 0.0f);
  EXPECT_EQ(mix[2].weight, 0.0f);
}

TEST(BackgroundModel, MissingDepthSeedsUnobserved) {
  auto first = constant_depth(4, 4, 1000);
  first.at(1, 1) = 0;
  BackgroundModel m(GmmParams::depth_defaults(), first);
  EXPECT_FALSE(m.observed(1, 1));
  EXPECT_EQ(m.pixel(1, 1)[0].mean, 0.0f);
  EXPECT_TRUE(m.observed(0, 0));
  // Its first valid reading re-seeds it instead of being flagged.
  auto next = constant_depth(4, 4, 1000);
  next.at(1, 1) = 1500;
  const auto mask = m.update_and_classify(next);
  EXPECT_EQ(mask.at(1, 1), 0);
  EXPECT_TRUE(m.observed(1, 1));
  EXPECT_EQ(m.pixel(1, 1)[0].mean, 1500.0f);
}

TEST(BackgroundModel, ZeroDepthIsBackgroundAndLeavesModelAlone) {
  BackgroundModel m(GmmParams::depth_defaults(), constant_depth(3, 3, 900));
  const auto before = m.pixel(1, 1);
  const auto mask = m.update_and_classify(constant_depth(3, 3, 0));
  EXPECT_EQ(foreground_area(mask), 0u);
  const auto after = m.pixel(1, 1);
  EXPECT_EQ(before[0].weight, after[0].weight);
  EXPECT_EQ(before[0].mean, after[0].mean);
}

TEST(BackgroundModel, RejectsBadParameters) {
  GmmParams p;
  p.learning_rate = 0.0;
  try {
    BackgroundModel m(p, constant_depth(2, 2, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_parameter);
    EXPECT_NE(std::string(e.what()).find("learning rate out of range"), std::string::npos);
  }
  p = GmmParams{};
  p.components = 6;
  EXPECT_THROW(BackgroundModel(p, constant_depth(2, 2, 5)), Error);
}

TEST(BackgroundModel, DimensionMismatch) {
  BackgroundModel m(GmmParams::depth_defaults(), constant_depth(4, 4, 5));
  EXPECT_THROW(m.update_and_classify(constant_depth(4, 5, 5)), Error);
  EXPECT_THROW(m.update_and_classify(LumaFrame(4, 4, 5)), Error);
}

TEST(BackgroundModel, ConstantInputConvergesToBackground) {
  BackgroundModel m(GmmParams::depth_defaults(), constant_depth(8, 8, 1234));
  ForegroundMask mask;
  for (int i = 0; i < 500; ++i) mask = m.update_and_classify(constant_depth(8, 8, 1234));
  EXPECT_EQ(foreground_area(mask), 0u);
  EXPECT_EQ(m.pixel(3, 3)[0].mean, 1234.0f);
  expect_mixture_invariants(m);
}

TEST(BackgroundModel, LargeJumpIsForeground) {
  BackgroundModel m(GmmParams::depth_defaults(), constant_depth(8, 8, 1000));
  for (int i = 0; i < 500; ++i) m.update_and_classify(constant_depth(8, 8, 1000));
  // 100 initial standard deviations is off the depth scale; use the top of the range.
  const auto mask = m.update_and_classify(constant_depth(8, 8, kMaxDepth));
  EXPECT_EQ(foreground_area(mask), 64u);
}

// A new value becomes background once its component's weight accumulates
// past the background fraction: within ceil(ln(T) / ln(1 - alpha)) frames of
// the switch the mask is empty again.
TEST(BackgroundModel, ConvergenceBound) {
  const auto p = GmmParams::depth_defaults();
  const int bound = static_cast<int>(std::ceil(std::log(p.background_fraction) / std::log(1.0 - p.learning_rate)));
  BackgroundModel m(p, constant_depth(6, 6, 1000));
  for (int i = 0; i < 300; ++i) m.update_and_classify(constant_depth(6, 6, 1000));
  int last_foreground = -1;
  for (int i = 0; i < 3 * bound; ++i) {
    if (foreground_area(m.update_and_classify(constant_depth(6, 6, 1800))) > 0) last_foreground = i;
  }
  EXPECT_GE(last_foreground, 0);
  EXPECT_LT(last_foreground, bound);
}

TEST(BackgroundModel, MatchesIndependentOracle) {
  std::mt19937 rng(42);
  for (int k = 1; k <= 5; ++k) {
    oracle::GmmSettings s;
    s.k = k;
    const int w = 7, h = 5;
    DepthFrame frame(w, h);
    const auto draw = [&] {
      for (auto& v : frame.pixels) {
        const auto r = rng() % 20;
        v = r == 0 ? 0 : r < 4 ? static_cast<std::uint16_t>(400 + rng() % 1600) : static_cast<std::uint16_t>(1200 + rng() % 7);
      }
    };
    draw();
    BackgroundModel model(params_for(s), frame, Execution::serial);
    std::vector<oracle::Pixel> ref(frame.size());
    for (std::size_t p = 0; p < ref.size(); ++p) {
      ref[p].seed(frame.pixels[p], s);
      ref[p].observed = frame.pixels[p] != 0;
    }
    for (int t = 0; t < 300; ++t) {
      draw();
      const auto mask = model.update_and_classify(frame);
      for (std::size_t p = 0; p < ref.size(); ++p) {
        const bool fg = ref[p].update(frame.pixels[p], s);
        ASSERT_EQ(mask.pixels[p], fg ? 1 : 0) << "k=" << k << " frame " << t << " pixel " << p;
        const auto mix = model.pixel(static_cast<int>(p) % w, static_cast<int>(p) / w);
        for (int i = 0; i < k; ++i) {
          ASSERT_FLOAT_EQ(mix[i].weight, ref[p].mix[i].w);
          ASSERT_FLOAT_EQ(mix[i].mean, ref[p].mix[i].m);
          ASSERT_FLOAT_EQ(mix[i].variance, ref[p].mix[i].v);
        }
      }
    }
    expect_mixture_invariants(model);
  }
}

// The OpenMP kernels reproduce the serial reference bit for bit, for every
// component count, grid sizes that leave partial pixel blocks, and any thread count.
TEST(BackgroundModel, ParallelMatchesSerialBitForBit) {
  std::mt19937 rng(7);
  const int max_threads = omp_get_max_threads();
  for (int k = 1; k <= 5; ++k) {
    for (const auto [w, h] : {std::pair{13, 7}, std::pair{64, 9}, std::pair{3, 1}}) {
      for (const int threads : {1, std::max(2, max_threads)}) {
        omp_set_num_threads(threads);
        GmmParams p = GmmParams::luma_defaults();
        p.components = k;
        LumaFrame frame(w, h);
        const auto draw = [&] {
          for (auto& v : frame.pixels) v = rng() % 6 == 0 ? rng() % 256 : 100 + rng() % 4;
        };
        draw();
        BackgroundModel serial(p, frame, Execution::serial);
        BackgroundModel parallel(p, frame, Execution::parallel);
        for (int t = 0; t < 200; ++t) {
          draw();
          ASSERT_EQ(serial.update_and_classify(frame), parallel.update_and_classify(frame));
        }
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const auto a = serial.pixel(x, y), b = parallel.pixel(x, y);
            for (int i = 0; i < k; ++i) {
              ASSERT_EQ(a[i].weight, b[i].weight);
              ASSERT_EQ(a[i].mean, b[i].mean);
              ASSERT_EQ(a[i].variance, b[i].variance);
            }
          }
        }
      }
    }
  }
  omp_set_num_threads(max_threads);
}

TEST(BackgroundModel, StaticNoiseStaysBackground) {
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0.0, 2.0);
  const auto frame = [&] {
    DepthFrame d(64, 64);
    for (auto& v : d.pixels) v = static_cast<std::uint16_t>(std::lround(1300 + noise(rng)));
    return d;
  };
  BackgroundModel m(GmmParams::depth_defaults(), frame());
  for (int i = 0; i < 300; ++i) m.update_and_classify(frame());
  std::size_t fg = 0;
  for (int i = 0; i < 300; ++i) fg += foreground_area(m.update_and_classify(frame()));
  EXPECT_LT(static_cast<double>(fg) / (300.0 * 64 * 64), 0.01);
  expect_mixture_invariants(m);
}

TEST(Luma, IntegerRounding) {
  EXPECT_EQ(luma({0, 0, 0}), 0);
  EXPECT_EQ(luma({255, 255, 255}), 255);
  for (int r = 0; r < 256; r += 5) {
    for (int g = 0; g < 256; g += 7) {
      for (int b = 0; b < 256; b += 11) {
        const double y = 0.299 * r + 0.587 * g + 0.114 * b;
        const Rgb px{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
        ASSERT_LE(std::abs(luma(px) - y), 0.5 + 1e-9);
      }
    }
  }
}

TEST(Morphology, Examples) {
  ForegroundMask empty(20, 20);
  EXPECT_EQ(morph_smooth(empty), empty);

  ForegroundMask dot(20, 20);
  dot.at(10, 10) = 1;
  EXPECT_EQ(foreground_area(morph_smooth(dot)), 0u);

  ForegroundMask block(20, 20);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) block.at(x, y) = 1;
  }
  EXPECT_EQ(morph_smooth(block), block);
  EXPECT_EQ(foreground_area(block), 100u);
  EXPECT_EQ(foreground_area(ForegroundMask(320, 350, 1)), 112000u);
}

TEST(Morphology, MatchesLiteralDefinition) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = trial < 400 ? 8 : 1 + static_cast<int>(rng() % 40);
    const int h = trial < 400 ? 8 : 1 + static_cast<int>(rng() % 40);
    ForegroundMask m(w, h);
    const auto density = rng() % 100;
    for (auto& v : m.pixels) v = rng() % 100 < density;
    const auto expected = oracle::smooth(m.pixels, w, h);
    ASSERT_EQ(morph_smooth(m, Execution::serial).pixels, expected);
    ASSERT_EQ(morph_smooth(m, Execution::parallel).pixels, expected);
    ASSERT_EQ(erode(m).pixels, oracle::morph(m.pixels, w, h, true));
    ASSERT_EQ(dilate(m).pixels, oracle::morph(m.pixels, w, h, false));
  }
}

TEST(Morphology, Properties) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    ForegroundMask m(30, 20);
    for (auto& v : m.pixels) v = rng() % 3 == 0;
    const auto opening = [](const ForegroundMask& x) { return dilate(erode(x)); };
    EXPECT_EQ(opening(opening(m)), opening(m));
    const auto smoothed = morph_smooth(m);
    const auto grown = dilate(m);
    EXPECT_LE(foreground_area(smoothed), foreground_area(grown));
    for (std::size_t p = 0; p < m.size(); ++p) {
      if (smoothed.pixels[p]) ASSERT_TRUE(grown.pixels[p]);
    }
    EXPECT_EQ(morph_smooth(m), smoothed);
  }
}

TEST(BackgroundModel, DepthModelIgnoresLuma) {
  std::mt19937 rng(1);
  DepthFrame d(16, 16, 1000);
  LumaFrame l(16, 16, 50);
  BackgroundModel depth_a(GmmParams::depth_defaults(), d), depth_b(GmmParams::depth_defaults(), d);
  BackgroundModel luma_a(GmmParams::luma_defaults(), l), luma_b(GmmParams::luma_defaults(), l);
  for (int t = 0; t < 50; ++t) {
    for (auto& v : d.pixels) v = static_cast<std::uint16_t>(1000 + rng() % 30);
    for (auto& v : l.pixels) v = static_cast<std::uint8_t>(50 + rng() % 10);
    LumaFrame scaled = l;
    for (auto& v : scaled.pixels) v = static_cast<std::uint8_t>(v * 3);
    luma_a.update_and_classify(l);
    luma_b.update_and_classify(scaled);
    ASSERT_EQ(depth_a.update_and_classify(d), depth_b.update_and_classify(d));
  }
}
