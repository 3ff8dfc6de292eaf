#pragma once

// Vectorized mixture updates over whole blocks of kBlockPixels pixels. Each
// entry point lives in a translation unit built for its instruction set and
// must only be called when the CPU supports it. The caller validates the
// component count and handles the pixels after the last whole block.

#include <cstdint>

#include "sleepmon/kernels.hpp"

namespace sleepmon::kernels::simd {

void blocks_avx2(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint16_t* in,
                 std::uint8_t* out, std::int64_t blocks);
void blocks_avx2(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint8_t* in,
                 std::uint8_t* out, std::int64_t blocks);
void blocks_avx512(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint16_t* in,
                   std::uint8_t* out, std::int64_t blocks);
void blocks_avx512(const GmmCoefficients& c, float* state, std::uint8_t* observed, const std::uint8_t* in,
                   std::uint8_t* out, std::int64_t blocks);

}  // namespace sleepmon::kernels::simd
