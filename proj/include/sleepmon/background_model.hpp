#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sleepmon/image.hpp"
#include "sleepmon/kernels.hpp"

namespace sleepmon {

enum class ChannelKind { depth, luma };

struct GmmParams {
  int components = 3;
  double learning_rate = 0.01;
  double match_k = 2.5;
  double background_fraction = 0.7;
  double initial_variance = 50.0 * 50.0;
  double variance_floor = 4.0;
  double replacement_weight = 0.05;

  static GmmParams depth_defaults();
  static GmmParams luma_defaults();

  /// Throws Error(invalid_parameter), e.g. "learning rate out of range".
  void validate() const;
  bool operator==(const GmmParams&) const = default;
};

/// Adaptive per-pixel Gaussian mixture over one single-valued channel.
class BackgroundModel {
 public:
  /// Seeds every pixel from `first`. A depth pixel holding 0 gets mean 0 but
  /// stays unobserved; its first non-zero reading re-seeds it.
  BackgroundModel(const GmmParams& params, const DepthFrame& first, Execution execution = Execution::parallel);
  BackgroundModel(const GmmParams& params, const LumaFrame& first, Execution execution = Execution::parallel);

  /// Updates the model with one frame and returns the raw foreground mask.
  /// Throws Error(dimension_mismatch) if the frame does not match the grid,
  /// or if a depth model receives luma input and vice versa.
  ForegroundMask update_and_classify(const DepthFrame& frame);
  ForegroundMask update_and_classify(const LumaFrame& frame);

  int width() const { return width_; }
  int height() const { return height_; }
  ChannelKind kind() const { return kind_; }
  const GmmParams& params() const { return params_; }
  Execution execution() const { return execution_; }
  void set_execution(Execution execution) { execution_ = execution; }

  /// Components of one pixel in rank order.
  std::vector<GaussianComponent> pixel(int x, int y) const;
  bool observed(int x, int y) const { return observed_[static_cast<std::size_t>(y) * width_ + x] != 0; }

 private:
  template <typename Pixel>
  void seed(const Frame<Pixel>& first);
  template <typename Pixel>
  ForegroundMask update(const Frame<Pixel>& frame);
  kernels::GmmCoefficients coefficients() const;
  kernels::GmmGrid grid();

  GmmParams params_;
  ChannelKind kind_;
  Execution execution_;
  int width_ = 0;
  int height_ = 0;
  std::vector<float> state_;
  std::vector<std::uint8_t> observed_;
};

/// y = round(0.299 r + 0.587 g + 0.114 b), computed exactly in integers.
std::uint8_t luma(Rgb px);
LumaFrame to_luma(const ColorFrame& frame);

/// Opening then closing, 3x3 square element, out-of-grid pixels are background.
ForegroundMask morph_smooth(const ForegroundMask& mask, Execution execution = Execution::parallel);
ForegroundMask erode(const ForegroundMask& mask, Execution execution = Execution::parallel);
ForegroundMask dilate(const ForegroundMask& mask, Execution execution = Execution::parallel);

std::size_t foreground_area(const ForegroundMask& mask);

}  // namespace sleepmon
