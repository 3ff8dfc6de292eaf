// OpenMP kernels. The mixture update is specialized on the component count.
// On x86-64 CPUs with AVX2 or AVX-512 whole pixel blocks go through the vector
// units (kernels_avx2.cpp, kernels_avx512.cpp); otherwise, and for the pixels
// after the last whole block, it runs one pixel at a time. Every path mirrors
// the serial reference operation for operation, so they agree bit for bit.

#include <algorithm>
#include <cstdlib>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

#include "sleepmon/error.hpp"
#include "sleepmon/kernels.hpp"

#ifdef SLEEPMON_SIMD
#include "gmm_simd.hpp"
#endif

namespace sleepmon::kernels::parallel {
namespace {

template <int K, typename Pixel>
inline std::uint8_t update_pixel(const GmmCoefficients& c, const GmmGrid& g, std::size_t p, Pixel raw) {
  if (c.zero_is_missing && raw == 0) return 0;
  const float x = static_cast<float>(raw);
  const float alpha = c.learning_rate;
  float* block = g.state.data() + (p / kBlockPixels) * K * 3 * kBlockPixels + p % kBlockPixels;
  const auto at = [block](int k, Field f) -> float& {
    return block[(static_cast<std::size_t>(k) * 3 + static_cast<std::size_t>(f)) * kBlockPixels];
  };

  if (!g.observed[p]) {
    for (int i = 0; i < K; ++i) {
      at(i, Field::weight) = i == 0 ? 1.0f : 0.0f;
      at(i, Field::mean) = i == 0 ? x : 0.0f;
      at(i, Field::variance) = c.initial_variance;
    }
    g.observed[p] = 1;
    return 0;
  }

  float w[K], m[K], v[K];
  for (int i = 0; i < K; ++i) {
    w[i] = at(i, Field::weight);
    m[i] = at(i, Field::mean);
    v[i] = at(i, Field::variance);
  }

  int matched = -1;
  for (int i = 0; i < K; ++i) {
    const float d = x - m[i];
    if (w[i] > 0.0f && d * d <= c.match_k * c.match_k * v[i]) {
      matched = i;
      break;
    }
  }

  if (matched >= 0) {
    const float keep = 1.0f - alpha;
    for (int i = 0; i < K; ++i) w[i] = keep * w[i];
    w[matched] = w[matched] + alpha;
    const float rho = std::clamp(alpha / w[matched], alpha, 1.0f);
    m[matched] = (1.0f - rho) * m[matched] + rho * x;
    const float d = x - m[matched];
    v[matched] = std::max((1.0f - rho) * v[matched] + rho * (d * d), c.variance_floor);
  } else {
    w[K - 1] = c.replacement_weight;
    m[K - 1] = x;
    v[K - 1] = c.initial_variance;
  }

  float total = 0.0f;
  for (int i = 0; i < K; ++i) total += w[i];
  const float scale = 1.0f / total;
  for (int i = 0; i < K; ++i) w[i] = w[i] * scale;

  // Insertion sort, carrying the matched component's position along.
  int matched_rank = matched;
  for (int i = 1; i < K; ++i) {
    for (int j = i; j > 0 && ranks_ahead(w[j], v[j], w[j - 1], v[j - 1]); --j) {
      std::swap(w[j], w[j - 1]);
      std::swap(m[j], m[j - 1]);
      std::swap(v[j], v[j - 1]);
      if (matched_rank == j) {
        matched_rank = j - 1;
      } else if (matched_rank == j - 1) {
        matched_rank = j;
      }
    }
  }
  for (int i = 0; i < K; ++i) {
    at(i, Field::weight) = w[i];
    at(i, Field::mean) = m[i];
    at(i, Field::variance) = v[i];
  }

  int background_count = K;
  float cumulative = 0.0f;
  for (int b = 0; b < K; ++b) {
    cumulative += w[b];
    if (cumulative > c.background_fraction) {
      background_count = b + 1;
      break;
    }
  }
  return (matched < 0 || matched_rank >= background_count) ? 1 : 0;
}

template <int K, typename Pixel>
void update_scalar(const GmmCoefficients& c, const GmmGrid& g, const Pixel* in, std::uint8_t* out) {
  const auto n = static_cast<std::int64_t>(g.pixels());
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) {
    out[p] = update_pixel<K>(c, g, static_cast<std::size_t>(p), in[p]);
  }
}

#ifdef SLEEPMON_SIMD
enum class Isa { scalar, avx2, avx512 };

// SLEEPMON_ISA=scalar|avx2 caps the instruction set, for testing and timing.
Isa detect_isa() {
  static const Isa isa = [] {
    const char* forced = std::getenv("SLEEPMON_ISA");
    const std::string_view cap = forced ? forced : "";
    if (cap == "scalar") return Isa::scalar;
    if (cap != "avx2" && __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512bw") &&
        __builtin_cpu_supports("avx512vl")) {
      return Isa::avx512;
    }
    return __builtin_cpu_supports("avx2") ? Isa::avx2 : Isa::scalar;
  }();
  return isa;
}

template <int K, typename Pixel>
bool update_simd(const GmmCoefficients& c, const GmmGrid& g, const Pixel* in, std::uint8_t* out) {
  const Isa isa = detect_isa();
  if (isa == Isa::scalar) return false;
  const std::size_t n = g.pixels();
  const auto blocks = static_cast<std::int64_t>(n / kBlockPixels);
  if (isa == Isa::avx512) {
    simd::blocks_avx512(c, g.state.data(), g.observed.data(), in, out, blocks);
  } else {
    simd::blocks_avx2(c, g.state.data(), g.observed.data(), in, out, blocks);
  }
  for (std::size_t p = static_cast<std::size_t>(blocks) * kBlockPixels; p < n; ++p) {
    out[p] = update_pixel<K>(c, g, p, in[p]);
  }
  return true;
}
#endif

template <int K, typename Pixel>
void update_grid(const GmmCoefficients& c, GmmGrid grid, std::span<const Pixel> frame, std::span<std::uint8_t> mask) {
#ifdef SLEEPMON_SIMD
  if (update_simd<K>(c, grid, frame.data(), mask.data())) return;
#endif
  update_scalar<K>(c, grid, frame.data(), mask.data());
}

template <typename Pixel>
void dispatch(const GmmCoefficients& c, GmmGrid grid, std::span<const Pixel> frame, std::span<std::uint8_t> mask) {
  if (grid.components != c.components) {
    throw Error(Errc::invalid_parameter, "grid holds " + std::to_string(grid.components) + " components, update expects " +
                                             std::to_string(c.components));
  }
  switch (c.components) {
    case 1: return update_grid<1>(c, grid, frame, mask);
    case 2: return update_grid<2>(c, grid, frame, mask);
    case 3: return update_grid<3>(c, grid, frame, mask);
    case 4: return update_grid<4>(c, grid, frame, mask);
    case 5: return update_grid<5>(c, grid, frame, mask);
    default:
      throw Error(Errc::invalid_parameter, "component count out of range: " + std::to_string(c.components));
  }
}

// Binary 3-tap pass along rows (horizontal) or columns; out-of-grid is 0.
// For 0/1 values erosion is AND and dilation is OR.
template <bool Erode>
inline std::uint8_t combine(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
  if constexpr (Erode) {
    return static_cast<std::uint8_t>(a & b & c);
  } else {
    return static_cast<std::uint8_t>(a | b | c);
  }
}

template <bool Erode>
void horizontal_pass(const std::uint8_t* in, std::uint8_t* out, int width, int height) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src = in + static_cast<std::size_t>(y) * width;
    std::uint8_t* dst = out + static_cast<std::size_t>(y) * width;
    if (width == 1) {
      dst[0] = combine<Erode>(0, src[0], 0);
      continue;
    }
    dst[0] = combine<Erode>(0, src[0], src[1]);
    for (int x = 1; x < width - 1; ++x) dst[x] = combine<Erode>(src[x - 1], src[x], src[x + 1]);
    dst[width - 1] = combine<Erode>(src[width - 2], src[width - 1], 0);
  }
}

template <bool Erode>
void vertical_pass(const std::uint8_t* in, std::uint8_t* out, int width, int height) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* mid = in + static_cast<std::size_t>(y) * width;
    const std::uint8_t* up = y > 0 ? mid - width : nullptr;
    const std::uint8_t* down = y + 1 < height ? mid + width : nullptr;
    std::uint8_t* dst = out + static_cast<std::size_t>(y) * width;
    if (up && down) {
      for (int x = 0; x < width; ++x) dst[x] = combine<Erode>(up[x], mid[x], down[x]);
    } else if (up) {
      for (int x = 0; x < width; ++x) dst[x] = combine<Erode>(up[x], mid[x], 0);
    } else if (down) {
      for (int x = 0; x < width; ++x) dst[x] = combine<Erode>(0, mid[x], down[x]);
    } else {
      for (int x = 0; x < width; ++x) dst[x] = combine<Erode>(0, mid[x], 0);
    }
  }
}

template <bool Erode>
void square3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height) {
  std::vector<std::uint8_t> tmp(static_cast<std::size_t>(width) * height);
  horizontal_pass<Erode>(in.data(), tmp.data(), width, height);
  vertical_pass<Erode>(tmp.data(), out.data(), width, height);
}

}  // namespace

void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint16_t> frame,
                std::span<std::uint8_t> mask) {
  dispatch(c, grid, frame, mask);
}

void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint8_t> frame,
                std::span<std::uint8_t> mask) {
  dispatch(c, grid, frame, mask);
}

void erode3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height) {
  square3x3<true>(in, out, width, height);
}

void dilate3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height) {
  square3x3<false>(in, out, width, height);
}

}  // namespace sleepmon::kernels::parallel
