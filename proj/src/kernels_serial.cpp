// Reference kernels: one pixel at a time, generic component count, written
// to read like the update rules rather than to run fast.

#include <algorithm>
#include <vector>

#include "sleepmon/kernels.hpp"

namespace sleepmon::kernels::serial {
namespace {

template <typename Pixel>
void gmm_update_impl(const GmmCoefficients& c, GmmGrid grid, std::span<const Pixel> frame,
                     std::span<std::uint8_t> mask) {
  const int k = c.components;
  const float alpha = c.learning_rate;
  const float keep = 1.0f - alpha;
  const float match_sq = c.match_k * c.match_k;
  const std::size_t n = grid.pixels();

  for (std::size_t p = 0; p < n; ++p) {
    const Pixel raw = frame[p];
    if (c.zero_is_missing && raw == 0) {
      mask[p] = 0;
      continue;
    }
    const float x = static_cast<float>(raw);

    if (!grid.observed[p]) {
      grid.set(p, 0, {1.0f, x, c.initial_variance});
      for (int i = 1; i < k; ++i) grid.set(p, i, {0.0f, 0.0f, c.initial_variance});
      grid.observed[p] = 1;
      mask[p] = 0;
      continue;
    }
    std::vector<GaussianComponent> mix(k);
    for (int i = 0; i < k; ++i) mix[i] = grid.get(p, i);

    int matched = -1;
    for (int i = 0; i < k; ++i) {
      const float d = x - mix[i].mean;
      if (mix[i].weight > 0.0f && d * d <= match_sq * mix[i].variance) {
        matched = i;
        break;
      }
    }

    if (matched >= 0) {
      for (int i = 0; i < k; ++i) mix[i].weight = keep * mix[i].weight;
      GaussianComponent& m = mix[matched];
      m.weight = m.weight + alpha;
      const float rho = std::clamp(alpha / m.weight, alpha, 1.0f);
      m.mean = (1.0f - rho) * m.mean + rho * x;
      const float d = x - m.mean;
      m.variance = std::max((1.0f - rho) * m.variance + rho * (d * d), c.variance_floor);
    } else {
      mix[k - 1] = {c.replacement_weight, x, c.initial_variance};
    }

    float total = 0.0f;
    for (int i = 0; i < k; ++i) total += mix[i].weight;
    const float scale = 1.0f / total;
    for (int i = 0; i < k; ++i) mix[i].weight = mix[i].weight * scale;

    // Rank by weight / sigma, descending; ties keep their previous order.
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return ranks_ahead(mix[a].weight, mix[a].variance, mix[b].weight, mix[b].variance);
    });
    std::vector<GaussianComponent> sorted(k);
    int matched_rank = -1;
    for (int r = 0; r < k; ++r) {
      sorted[r] = mix[order[r]];
      if (order[r] == matched) matched_rank = r;
    }
    for (int i = 0; i < k; ++i) grid.set(p, i, sorted[i]);
    mix = sorted;

    int background_count = k;
    float cumulative = 0.0f;
    for (int b = 0; b < k; ++b) {
      cumulative += mix[b].weight;
      if (cumulative > c.background_fraction) {
        background_count = b + 1;
        break;
      }
    }
    mask[p] = (matched < 0 || matched_rank >= background_count) ? 1 : 0;
  }
}

std::uint8_t neighborhood(std::span<const std::uint8_t> in, int width, int height, int x, int y, bool all) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int nx = x + dx;
      const int ny = y + dy;
      const bool inside = nx >= 0 && ny >= 0 && nx < width && ny < height;
      const bool set = inside && in[static_cast<std::size_t>(ny) * width + nx] != 0;
      if (all && !set) return 0;
      if (!all && set) return 1;
    }
  }
  return all ? 1 : 0;
}

}  // namespace

void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint16_t> frame,
                std::span<std::uint8_t> mask) {
  gmm_update_impl(c, grid, frame, mask);
}

void gmm_update(const GmmCoefficients& c, GmmGrid grid, std::span<const std::uint8_t> frame,
                std::span<std::uint8_t> mask) {
  gmm_update_impl(c, grid, frame, mask);
}

void erode3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height) {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out[static_cast<std::size_t>(y) * width + x] = neighborhood(in, width, height, x, y, true);
}

void dilate3x3(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, int width, int height) {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out[static_cast<std::size_t>(y) * width + x] = neighborhood(in, width, height, x, y, false);
}

}  // namespace sleepmon::kernels::serial
