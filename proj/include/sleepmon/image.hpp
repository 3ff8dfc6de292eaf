#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sleepmon/error.hpp"

namespace sleepmon {

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool fits_in(int frame_width, int frame_height) const {
    return x >= 0 && y >= 0 && width > 0 && height > 0 && x + width <= frame_width &&
           y + height <= frame_height;
  }
  bool operator==(const Rect&) const = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Row-major 2-D grid of pixels tagged with its frame ordinal.
template <typename Pixel>
struct Frame {
  std::size_t index = 0;
  int width = 0;
  int height = 0;
  std::vector<Pixel> pixels;

  Frame() = default;
  Frame(int w, int h, Pixel fill = Pixel{})
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t size() const { return pixels.size(); }
  Pixel& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Pixel& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::span<Pixel> row(int y) { return {pixels.data() + static_cast<std::size_t>(y) * width, static_cast<std::size_t>(width)}; }
  std::span<const Pixel> row(int y) const {
    return {pixels.data() + static_cast<std::size_t>(y) * width, static_cast<std::size_t>(width)};
  }

  bool operator==(const Frame&) const = default;
};

using DepthFrame = Frame<std::uint16_t>;
using ColorFrame = Frame<Rgb>;
using LumaFrame = Frame<std::uint8_t>;
/// Binary grid: 1 = foreground, 0 = background.
using ForegroundMask = Frame<std::uint8_t>;

inline constexpr std::uint16_t kMaxDepth = 2047;
inline constexpr std::uint16_t kNoDepthReading = 0;

/// Sub-grid copy; the source frame is untouched.
template <typename Pixel>
Frame<Pixel> crop_roi(const Frame<Pixel>& frame, const Rect& roi) {
  if (!roi.fits_in(frame.width, frame.height)) {
    throw Error(Errc::roi_out_of_range,
                "roi out of range: (" + std::to_string(roi.x) + ", " + std::to_string(roi.y) + ", " +
                    std::to_string(roi.width) + ", " + std::to_string(roi.height) + ") on " +
                    std::to_string(frame.width) + "x" + std::to_string(frame.height));
  }
  Frame<Pixel> out(roi.width, roi.height);
  out.index = frame.index;
  for (int y = 0; y < roi.height; ++y) {
    const auto src = frame.row(roi.y + y).subspan(static_cast<std::size_t>(roi.x), static_cast<std::size_t>(roi.width));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

}  // namespace sleepmon
