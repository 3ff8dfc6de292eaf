#pragma once

// Mixture update for one run of W pixels held in vector lanes. Included by
// the per-ISA translation units only; `Ops` supplies the vector types and the
// few operations that differ between instruction sets. Everything here has
// internal linkage so code built for one ISA is never shared with another.
//
// The arithmetic is the serial reference's, operation for operation, with
// every decision turned into a lane mask. Components are ranked by an
// odd-even transposition network that only swaps strictly out-of-order
// neighbours, which yields the same order as a stable sort.

#include <cstddef>
#include <cstdint>
#include <cstring>

#include "sleepmon/kernels.hpp"

namespace sleepmon::kernels::lanes {
namespace {

// `block` points at lane 0 of weight run 0; field runs are `run` floats apart.
template <typename Ops, int K, typename Pixel>
[[gnu::always_inline]] inline void update(const GmmCoefficients& c, float* block, std::size_t run,
                                          std::uint8_t* observed, const Pixel* in, std::uint8_t* out) {
  using Lanes = typename Ops::F;
  using LaneMask = typename Ops::M;
  const auto field = [block, run](int k, Field f) { return block + (k * 3 + static_cast<int>(f)) * run; };
  const Lanes alpha = Ops::splat(c.learning_rate);
  const Lanes one = Ops::splat(1.0f);
  const Lanes zero = Ops::splat(0.0f);
  const Lanes x = Ops::load(in);
  const Lanes seen = Ops::load(observed);
  const LaneMask missing = c.zero_is_missing ? Ops::eq(x, zero) : LaneMask{};
  const LaneMask fresh = Ops::eq(seen, zero);

  Lanes w0[K], m0[K], v0[K];
  for (int k = 0; k < K; ++k) {
    w0[k] = Ops::load_f(field(k, Field::weight));
    m0[k] = Ops::load_f(field(k, Field::mean));
    v0[k] = Ops::load_f(field(k, Field::variance));
  }

  LaneMask hit[K];
  LaneMask found{};
  const Lanes match_sq = Ops::splat(c.match_k * c.match_k);
  for (int k = 0; k < K; ++k) {
    const Lanes d = x - m0[k];
    hit[k] = ~found & Ops::gt(w0[k], zero) & Ops::le(d * d, match_sq * v0[k]);
    found = found | hit[k];
  }

  Lanes w[K], m[K], v[K];
  Lanes hw = zero, hm = zero, hv = zero;
  for (int k = 0; k < K; ++k) {
    w[k] = Ops::pick(found, (one - alpha) * w0[k], w0[k]);
    m[k] = m0[k];
    v[k] = v0[k];
    hw = Ops::pick(hit[k], w[k], hw);
    hm = Ops::pick(hit[k], m0[k], hm);
    hv = Ops::pick(hit[k], v0[k], hv);
  }
  hw = hw + alpha;
  Lanes rho = alpha / hw;
  rho = Ops::pick(Ops::lt(rho, alpha), alpha, Ops::pick(Ops::lt(one, rho), one, rho));
  hm = (one - rho) * hm + rho * x;
  const Lanes d = x - hm;
  const Lanes spread = (one - rho) * hv + rho * (d * d);
  const Lanes var_floor = Ops::splat(c.variance_floor);
  hv = Ops::pick(Ops::lt(spread, var_floor), var_floor, spread);
  for (int k = 0; k < K; ++k) {
    w[k] = Ops::pick(hit[k], hw, w[k]);
    m[k] = Ops::pick(hit[k], hm, m[k]);
    v[k] = Ops::pick(hit[k], hv, v[k]);
  }
  w[K - 1] = Ops::pick(found, w[K - 1], Ops::splat(c.replacement_weight));
  m[K - 1] = Ops::pick(found, m[K - 1], x);
  v[K - 1] = Ops::pick(found, v[K - 1], Ops::splat(c.initial_variance));

  Lanes total = zero;
  for (int k = 0; k < K; ++k) total = total + w[k];
  const Lanes scale = one / total;
  for (int k = 0; k < K; ++k) w[k] = w[k] * scale;

  for (int round = 0; round < K; ++round) {
    for (int j = round % 2; j + 1 < K; j += 2) {
      const LaneMask swap = Ops::gt(w[j + 1] * w[j + 1] * v[j], w[j] * w[j] * v[j + 1]);
      const Lanes tw = w[j], tm = m[j], tv = v[j];
      const LaneMask th = hit[j];
      w[j] = Ops::pick(swap, w[j + 1], w[j]);
      m[j] = Ops::pick(swap, m[j + 1], m[j]);
      v[j] = Ops::pick(swap, v[j + 1], v[j]);
      hit[j] = (swap & hit[j + 1]) | (~swap & hit[j]);
      w[j + 1] = Ops::pick(swap, tw, w[j + 1]);
      m[j + 1] = Ops::pick(swap, tm, m[j + 1]);
      v[j + 1] = Ops::pick(swap, tv, v[j + 1]);
      hit[j + 1] = (swap & th) | (~swap & hit[j + 1]);
    }
  }

  // A match ranked after the first component whose cumulative weight
  // exceeds the background fraction is foreground.
  const Lanes fraction = Ops::splat(c.background_fraction);
  LaneMask foreground = ~found;
  LaneMask beyond{};
  Lanes cumulative = zero;
  for (int k = 0; k < K; ++k) {
    foreground = foreground | (beyond & hit[k]);
    cumulative = cumulative + w[k];
    beyond = beyond | Ops::gt(cumulative, fraction);
  }

  const LaneMask seed = fresh & ~missing;
  const Lanes seed_v = Ops::splat(c.initial_variance);
  for (int k = 0; k < K; ++k) {
    const Lanes seed_w = k == 0 ? one : zero;
    const Lanes seed_m = k == 0 ? x : zero;
    Ops::store_f(field(k, Field::weight), Ops::pick(missing, w0[k], Ops::pick(seed, seed_w, w[k])));
    Ops::store_f(field(k, Field::mean), Ops::pick(missing, m0[k], Ops::pick(seed, seed_m, m[k])));
    Ops::store_f(field(k, Field::variance), Ops::pick(missing, v0[k], Ops::pick(seed, seed_v, v[k])));
  }
  Ops::store_bits(observed, seed | ~fresh);
  Ops::store_bits(out, foreground & ~missing & ~fresh);
}

template <typename Ops, int K, typename Pixel>
void update_blocks(const GmmCoefficients& c, float* state, std::uint8_t* observed, const Pixel* in,
                   std::uint8_t* out, std::int64_t blocks) {
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const auto p = static_cast<std::size_t>(b) * kBlockPixels;
    float* block = state + static_cast<std::size_t>(b) * K * 3 * kBlockPixels;
    for (std::size_t lane = 0; lane < kBlockPixels; lane += Ops::width) {
      update<Ops, K>(c, block + lane, kBlockPixels, observed + p + lane, in + p + lane, out + p + lane);
    }
  }
}

template <typename Ops, typename Pixel>
void dispatch(const GmmCoefficients& c, float* state, std::uint8_t* observed, const Pixel* in, std::uint8_t* out,
              std::int64_t blocks) {
  switch (c.components) {
    case 1: return update_blocks<Ops, 1>(c, state, observed, in, out, blocks);
    case 2: return update_blocks<Ops, 2>(c, state, observed, in, out, blocks);
    case 3: return update_blocks<Ops, 3>(c, state, observed, in, out, blocks);
    case 4: return update_blocks<Ops, 4>(c, state, observed, in, out, blocks);
    default: return update_blocks<Ops, 5>(c, state, observed, in, out, blocks);
  }
}

}  // namespace
}  // namespace sleepmon::kernels::lanes
