#pragma once

// Per-pixel data-parallel kernels. Every kernel exists twice: `serial` is a
// straightforward reference kept for testing and benchmarking, `parallel` is
// the OpenMP version used by the pipeline. Both produce bit-identical output
// for any thread count, because no pixel reads another pixel's model state.

#include <cstddef>
#include <cstdint>
#include <span>

namespace sleepmon {

struct GaussianComponent {
  float weight = 0.0f;
  float mean = 0.0f;
  float variance = 0.0f;
};

/// True if component a ranks strictly ahead of component b by weight / sigma.
/// Compared as w_a^2 * var_b > w_b^2 * var_a so no square root or division
/// is needed.
inline bool ranks_ahead(float weight_a, float variance_a, float weight_b, float variance_b) {
  return weight_a * weight_a * variance_b > weight_b * weight_b * variance_a;
}

enum class Execution { serial, parallel };

namespace kernels {

inline constexpr int kMaxComponents = 5;

struct GmmCoefficients {
  int components = 3;
  float learning_rate = 0.01f;
  float match_k = 2.5f;
  float background_fraction = 0.7f;
  float initial_variance = 2500.0f;
  float variance_floor = 4.0f;
  float replacement_weight = 0.05f;
  /// Depth: value 0 means "no reading"; such pixels are skipped and reported background.
  bool zero_is_missing = false;
};

/// Mixture state is stored in blocks of kBlockPixels consecutive pixels. A
/// block holds, for each component k in rank order, a run of weights, a run
/// of means and a run of variances, so SIMD code loads one field of one
/// component for a whole block at once.
inline constexpr std::size_t kBlockPixels = 16;

enum class Field { weight = 0, mean = 1, variance = 2 };

/// Floats needed for `pixels` pixels with `components` components each.
inline std::size_t gmm_state_size(std::size_t pixels, int components) {
  const std::size_t blocks = (pixels + kBlockPixels - 1) / kBlockPixels;
  return blocks * static_cast<std::size_t>(components) * 3 * kBlockPixels;
}

/// Position of field `f` of component k of pixel p.
inline std::size_t gmm_index(std::size_t p, int components, int k, Field f) {
  const std::size_t block_stride = static_cast<std::size_t>(components) * 3 * kBlockPixels;
  return (p / kBlockPixels) * block_stride +
         (static_cast<std::size_t>(k) * 3 + static_cast<std::size_t>(f)) * kBlockPixels + p % kBlockPixels;
}

struct GmmGrid {
  int width = 0;
  int height = 0;
  int components = 3;
  std::span<float> state;  ///< gmm_state_size(width * height, components) floats
  std::span<std::uint8_t> observed;

  std::size_t pixels() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  std::size_t index(std::size_t p, int k, Field f) const { return gmm_index(p, components, k, f); }
  GaussianComponent get(std::size_t p, int k) const {
    return {state[index(p, k, Field::weight)], state[index(p, k, Field::mean)], state[index(p, k, Field::variance)]};
  }
  void set(std::size_t p, int k, const GaussianComponent& g) const {
    state[index(p, k, Field::weight)] = g.weight;
    state[index(p, k, Field::mean)] = g.mean;
    state[index(p, k, Field::variance)] = g.variance;
  }
};

namespace serial {
void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint16_t> frame, std::span<std::uint8_t> mask);
void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint8_t> frame, std::span<std::uint8_t> mask);
void erode3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height);
void dilate3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height);
}  // namespace serial

namespace parallel {
void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint16_t> frame, std::span<std::uint8_t> mask);
void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint8_t> frame, std::span<std::uint8_t> mask);
void erode3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height);
void dilate3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height);
}  // namespace parallel

}  // namespace kernels
}  // namespace sleepmon
