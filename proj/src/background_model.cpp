#include "sleepmon/background_model.hpp"

#include <algorithm>
#include <string>

#include "sleepmon/error.hpp"

namespace sleepmon {
namespace {

[[noreturn]] void bad_param(const std::string& what) { throw Error(Errc::invalid_parameter, what); }

}  // namespace

GmmParams GmmParams::depth_defaults() { return GmmParams{}; }

GmmParams GmmParams::luma_defaults() {
  GmmParams p;
  p.initial_variance = 30.0 * 30.0;
  return p;
}

void GmmParams::validate() const {
  if (components < 1 || components > kernels::kMaxComponents) {
    bad_param("component count out of range: " + std::to_string(components));
  }
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) bad_param("learning rate out of range");
  if (!(match_k > 0.0)) bad_param("match_k out of range");
  if (!(background_fraction > 0.0 && background_fraction <= 1.0)) bad_param("background fraction out of range");
  if (!(variance_floor > 0.0)) bad_param("variance floor out of range");
  if (!(initial_variance >= variance_floor)) bad_param("initial variance below variance floor");
  if (!(replacement_weight > 0.0 && replacement_weight < 1.0)) bad_param("replacement weight out of range");
}

BackgroundModel::BackgroundModel(const GmmParams& params, const DepthFrame& first, Execution execution)
    : params_(params), kind_(ChannelKind::depth), execution_(execution) {
  params_.validate();
  seed(first);
}

BackgroundModel::BackgroundModel(const GmmParams& params, const LumaFrame& first, Execution execution)
    : params_(params), kind_(ChannelKind::luma), execution_(execution) {
  params_.validate();
  seed(first);
}

template <typename Pixel>
void BackgroundModel::seed(const Frame<Pixel>& first) {
  if (first.width <= 0 || first.height <= 0 || first.pixels.size() != first.size()) {
    throw Error(Errc::dimension_mismatch, "background model needs a non-empty first frame");
  }
  width_ = first.width;
  height_ = first.height;
  const auto n = first.size();
  const auto init_var = static_cast<float>(params_.initial_variance);
  state_.assign(kernels::gmm_state_size(n, params_.components), 0.0f);
  observed_.assign(n, 0);
  const auto g = grid();
  for (std::size_t p = 0; p < n; ++p) {
    const auto v = first.pixels[p];
    g.set(p, 0, {1.0f, static_cast<float>(v), init_var});
    for (int k = 1; k < params_.components; ++k) g.set(p, k, {0.0f, 0.0f, init_var});
    observed_[p] = (kind_ == ChannelKind::depth && v == kNoDepthReading) ? 0 : 1;
  }
}

kernels::GmmCoefficients BackgroundModel::coefficients() const {
  kernels::GmmCoefficients c;
  c.components = params_.components;
  c.learning_rate = static_cast<float>(params_.learning_rate);
  c.match_k = static_cast<float>(params_.match_k);
  c.background_fraction = static_cast<float>(params_.background_fraction);
  c.initial_variance = static_cast<float>(params_.initial_variance);
  c.variance_floor = static_cast<float>(params_.variance_floor);
  c.replacement_weight = static_cast<float>(params_.replacement_weight);
  c.zero_is_missing = kind_ == ChannelKind::depth;
  return c;
}

kernels::GmmGrid BackgroundModel::grid() { return {width_, height_, params_.components, state_, observed_}; }

template <typename Pixel>
ForegroundMask BackgroundModel::update(const Frame<Pixel>& frame) {
  if (frame.width != width_ || frame.height != height_ || frame.pixels.size() != frame.size()) {
    throw Error(Errc::dimension_mismatch, "frame " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                                              " does not match model " + std::to_string(width_) + "x" +
                                              std::to_string(height_));
  }
  ForegroundMask mask(width_, height_);
  mask.index = frame.index;
  const std::span<const Pixel> in(frame.pixels);
  if (execution_ == Execution::serial) {
    kernels::serial::gmm_update(coefficients(), grid(), in, mask.pixels);
  } else {
    kernels::parallel::gmm_update(coefficients(), grid(), in, mask.pixels);
  }
  return mask;
}

ForegroundMask BackgroundModel::update_and_classify(const DepthFrame& frame) {
  if (kind_ != ChannelKind::depth) throw Error(Errc::dimension_mismatch, "luma model fed a depth frame");
  return update(frame);
}

ForegroundMask BackgroundModel::update_and_classify(const LumaFrame& frame) {
  if (kind_ != ChannelKind::luma) throw Error(Errc::dimension_mismatch, "depth model fed a luma frame");
  return update(frame);
}

std::vector<GaussianComponent> BackgroundModel::pixel(int x, int y) const {
  using kernels::Field;
  const auto p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  const int n = params_.components;
  std::vector<GaussianComponent> out;
  for (int k = 0; k < n; ++k) {
    out.push_back({state_[kernels::gmm_index(p, n, k, Field::weight)], state_[kernels::gmm_index(p, n, k, Field::mean)],
                   state_[kernels::gmm_index(p, n, k, Field::variance)]});
  }
  return out;
}

std::uint8_t luma(Rgb px) {
  const unsigned weighted = 299u * px.r + 587u * px.g + 114u * px.b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

LumaFrame to_luma(const ColorFrame& frame) {
  LumaFrame out(frame.width, frame.height);
  out.index = frame.index;
  std::transform(frame.pixels.begin(), frame.pixels.end(), out.pixels.begin(), luma);
  return out;
}

ForegroundMask erode(const ForegroundMask& mask, Execution execution) {
  ForegroundMask out(mask.width, mask.height);
  out.index = mask.index;
  if (execution == Execution::serial) {
    kernels::serial::erode3x3(mask.pixels, out.pixels, mask.width, mask.height);
  } else {
    kernels::parallel::erode3x3(mask.pixels, out.pixels, mask.width, mask.height);
  }
  return out;
}

ForegroundMask dilate(const ForegroundMask& mask, Execution execution) {
  ForegroundMask out(mask.width, mask.height);
  out.index = mask.index;
  if (execution == Execution::serial) {
    kernels::serial::dilate3x3(mask.pixels, out.pixels, mask.width, mask.height);
  } else {
    kernels::parallel::dilate3x3(mask.pixels, out.pixels, mask.width, mask.height);
  }
  return out;
}

ForegroundMask morph_smooth(const ForegroundMask& mask, Execution execution) {
  const auto opened = dilate(erode(mask, execution), execution);
  return erode(dilate(opened, execution), execution);
}

std::size_t foreground_area(const ForegroundMask& mask) {
  std::size_t count = 0;
  for (auto v : mask.pixels) count += v != 0;
  return count;
}

}  // namespace sleepmon
