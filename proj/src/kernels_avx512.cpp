// Built with -mavx512f -mavx512bw -mavx512vl. Sixteen lanes with mask
// registers; GCC's vector extension scalarizes 512-bit compares and selects,
// so those go through intrinsics.

#include <immintrin.h>

#include "gmm_lanes.hpp"
#include "gmm_simd.hpp"

namespace sleepmon::kernels::simd {
namespace {

struct Avx512 {
  static constexpr std::size_t width = 16;
  using F = __m512;
  using M = __mmask16;

  static F splat(float value) { return _mm512_set1_ps(value); }
  static F load(const std::uint16_t* in) {
    return _mm512_cvtepi32_ps(_mm512_cvtepu16_epi32(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(in))));
  }
  static F load(const std::uint8_t* in) {
    return _mm512_cvtepi32_ps(_mm512_cvtepu8_epi32(_mm_loadu_si128(reinterpret_cast<const __m128i*>(in))));
  }
  static F load_f(const float* p) { return _mm512_loadu_ps(p); }
  static void store_f(float* p, F v) { _mm512_storeu_ps(p, v); }
  static void store_bits(std::uint8_t* p, M mask) {
    _mm_storeu_si128(reinterpret_cast<__m128i*>(p), _mm_maskz_mov_epi8(mask, _mm_set1_epi8(1)));
  }
  static M eq(F a, F b) { return _mm512_cmp_ps_mask(a, b, _CMP_EQ_OQ); }
  static M lt(F a, F b) { return _mm512_cmp_ps_mask(a, b, _CMP_LT_OQ); }
  static M le(F a, F b) { return _mm512_cmp_ps_mask(a, b, _CMP_LE_OQ); }
  static M gt(F a, F b) { return _mm512_cmp_ps_mask(a, b, _CMP_GT_OQ); }
  static F pick(M mask, F a, F b) { return _mm512_mask_blend_ps(mask, b, a); }
};

}  // namespace

void blocks_avx512(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint16_t* in,
                   std::uint8_t* out, std::int64_t blocks) {
  lanes::dispatch<Avx512>(c, state, observed, in, out, blocks);
}

void blocks_avx512(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint8_t* in,
                   std::uint8_t* out, std::int64_t blocks) {
  lanes::dispatch<Avx512>(c, state, observed, in, out, blocks);
}

}  // namespace sleepmon::kernels::simd
