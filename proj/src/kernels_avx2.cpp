// Built with -mavx2. Eight lanes through the GCC/Clang vector extension.

#include "gmm_lanes.hpp"
#include "gmm_simd.hpp"

namespace sleepmon::kernels::simd {
namespace {

struct Avx2 {
  static constexpr std::size_t width = 8;
  typedef float F __attribute__((vector_size(32)));
  typedef std::int32_t M __attribute__((vector_size(32)));
  typedef std::uint16_t Words __attribute__((vector_size(16)));
  typedef std::uint8_t Bytes __attribute__((vector_size(8)));

  static F splat(float value) { return F{} + value; }
  static F load(const std::uint16_t* in) {
    Words raw;
    std::memcpy(&raw, in, sizeof raw);
    return __builtin_convertvector(__builtin_convertvector(raw, M), F);
  }
  static F load(const std::uint8_t* in) {
    Bytes raw;
    std::memcpy(&raw, in, sizeof raw);
    return __builtin_convertvector(__builtin_convertvector(raw, M), F);
  }
  static F load_f(const float* p) {
    F v;
    std::memcpy(&v, p, sizeof v);
    return v;
  }
  static void store_f(float* p, F v) { std::memcpy(p, &v, sizeof v); }
  static void store_bits(std::uint8_t* p, M mask) {
    const Bytes bits = __builtin_convertvector(mask, Bytes) & 1;
    std::memcpy(p, &bits, sizeof bits);
  }
  static M eq(F a, F b) { return a == b; }
  static M lt(F a, F b) { return a < b; }
  static M le(F a, F b) { return a <= b; }
  static M gt(F a, F b) { return a > b; }
  static F pick(M mask, F a, F b) { return mask ? a : b; }
};

}  // namespace

void blocks_avx2(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint16_t* in,
                 std::uint8_t* out, std::int64_t blocks) {
  lanes::dispatch<Avx2>(c, state, observed, in, out, blocks);
}

void blocks_avx2(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint8_t* in,
                 std::uint8_t* out, std::int64_t blocks) {
  lanes::dispatch<Avx2>(c, state, observed, in, out, blocks);
}

}  // namespace sleepmon::kernels::simd
