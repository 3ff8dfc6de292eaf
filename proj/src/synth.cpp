#include "sleepmon/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "sleepmon/error.hpp"
#include "sleepmon/keyvalue.hpp"

namespace sleepmon {
namespace {

constexpr int kNoiseTableBits = 20;
constexpr std::size_t kNoiseTableMask = (std::size_t{1} << kNoiseTableBits) - 1;

constexpr std::uint64_t kDepthSalt = 0x6465707468ULL;
constexpr std::uint64_t kLumaSalt = 0x6c756d61ULL;
constexpr std::uint64_t kAudioSalt = 0x617564696fULL;
constexpr std::uint64_t kPlacementSalt = 0x706c616365ULL;

// Depth offsets cycled by a moving region. Consecutive levels are >= 400
// apart and the cycle is longer than the number of non-background mixture
// slots, so every flickering frame misses every component.
constexpr int kFlickerLevels[] = {-600, 200, -200, 600, -400, 400};
constexpr int kFlickerCycle = 6;
constexpr int kLumaBlobContrast = 2;
constexpr int kBedDepth = 1300;
constexpr int kBedDepthSlope = 60;
constexpr int kBodyRise = 150;
constexpr double kTalkPitchHz = 200.0;
constexpr double kTalkSyllableHz = 3.0;
// Leave/return: the body appears or vanishes this long before the item ends,
// so the background model has absorbed the change by the end of the item.
constexpr double kPresenceSettleSeconds = 1.5;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

std::vector<std::int16_t> gaussian_table(std::uint64_t seed, std::uint64_t salt, double sigma) {
  std::vector<std::int16_t> table(kNoiseTableMask + 1, 0);
  if (sigma <= 0.0) return table;
  std::mt19937_64 rng(mix(seed, salt));
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& v : table) v = static_cast<std::int16_t>(std::clamp(std::lround(normal(rng)), -32768L, 32767L));
  return table;
}

bool is_body_kind(ItemKind k) {
  return k == ItemKind::calm || k == ItemKind::tiny_twitch || k == ItemKind::limb_move || k == ItemKind::full_turn ||
         k == ItemKind::leave_bed || k == ItemKind::return_bed;
}
bool is_moving_kind(ItemKind k) { return is_body_kind(k) && k != ItemKind::calm; }
bool is_light_kind(ItemKind k) { return k == ItemKind::light_on || k == ItemKind::light_off; }

[[noreturn]] void bad_timeline(const std::string& what) { throw Error(Errc::invalid_timeline, "invalid timeline: " + what); }

std::string describe(std::size_t i, const TimelineItem& item) {
  return "item " + std::to_string(i) + " (" + std::string(to_string(item.kind)) + " " + std::to_string(item.start) + ".." +
         std::to_string(item.end) + ")";
}

Rect scaled_rect(const Rect& roi, double fraction) {
  const double s = std::sqrt(fraction);
  const int w = std::clamp(static_cast<int>(std::lround(roi.width * s)), std::min(3, roi.width), roi.width);
  const int h = std::clamp(static_cast<int>(std::lround(roi.height * s)), std::min(3, roi.height), roi.height);
  return {0, 0, w, h};
}

Rect body_rect(const Scenario& s) {
  Rect r = scaled_rect(s.roi, s.body_fraction);
  r.x = s.roi.x + (s.roi.width - r.width) / 2;
  r.y = s.roi.y + (s.roi.height - r.height) / 2;
  return r;
}

bool contains(const Rect& r, int x, int y) { return x >= r.x && y >= r.y && x < r.x + r.width && y < r.y + r.height; }

int settle_frames(const Scenario& s) { return static_cast<int>(std::lround(kPresenceSettleSeconds * s.video_rate)); }

}  // namespace

std::string_view to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::calm: return "calm";
    case ItemKind::tiny_twitch: return "tiny_twitch";
    case ItemKind::limb_move: return "limb_move";
    case ItemKind::full_turn: return "full_turn";
    case ItemKind::leave_bed: return "leave_bed";
    case ItemKind::return_bed: return "return_bed";
    case ItemKind::light_on: return "light_on";
    case ItemKind::light_off: return "light_off";
    case ItemKind::talk: return "talk";
  }
  return "?";
}

ItemKind parse_item_kind(std::string_view name) {
  for (auto k : {ItemKind::calm, ItemKind::tiny_twitch, ItemKind::limb_move, ItemKind::full_turn, ItemKind::leave_bed,
                 ItemKind::return_bed, ItemKind::light_on, ItemKind::light_off, ItemKind::talk}) {
    if (to_string(k) == name) return k;
  }
  bad_timeline("unknown item kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  if (duration < 1) bad_timeline("duration must be >= 1 s");
  if (video_rate <= 0 || audio_rate <= 0) bad_timeline("rates must be positive");
  if (!(depth_noise >= 0.0 && luma_noise >= 0.0 && audio_noise >= 0.0)) bad_timeline("noise levels must be >= 0");
  if (!(body_fraction > 0.0 && body_fraction <= 1.0)) bad_timeline("body_fraction must lie in (0, 1]");
  if (ambient_luma < 0 || ambient_luma > 255) bad_timeline("ambient_luma must lie in 0..255");
  if (frame_width <= 0 || frame_height <= 0 || !roi.fits_in(frame_width, frame_height)) {
    bad_timeline("roi must lie inside the frame");
  }

  const TimelineItem* last_body = nullptr;
  const TimelineItem* last_light = nullptr;
  const TimelineItem* last_talk = nullptr;
  bool in_bed = true;
  int luma = ambient_luma;
  bool light_is_on = false;
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const auto& item = timeline[i];
    const auto name = describe(i, item);
    if (item.start < 0 || item.end <= item.start || item.end > duration) bad_timeline(name + ": span outside 0..duration");
    if (i > 0 && item.start < timeline[i - 1].start) bad_timeline(name + ": items must be ordered by start");
    const auto band = [&](double lo, double hi, bool hi_inclusive) {
      const bool ok = item.magnitude >= lo && (hi_inclusive ? item.magnitude <= hi : item.magnitude < hi);
      if (!ok) bad_timeline(name + ": magnitude " + std::to_string(item.magnitude) + " outside its band");
    };
    const auto overlaps = [&](const TimelineItem* prev) { return prev && item.start < prev->end; };
    switch (item.kind) {
      case ItemKind::calm: band(0.0, 0.0, true); break;
      case ItemKind::tiny_twitch: band(0.005, 0.015, true); break;
      case ItemKind::limb_move: band(0.03, 0.08, true); break;
      case ItemKind::full_turn: band(0.15, 0.30, false); break;
      case ItemKind::leave_bed:
      case ItemKind::return_bed: band(0.30, 1.0, true); break;
      case ItemKind::light_on:
      case ItemKind::light_off: band(1.0, 255.0, true); break;
      case ItemKind::talk: band(0.2, 1.0, true); break;
    }
    if (is_body_kind(item.kind)) {
      if (overlaps(last_body)) bad_timeline(name + ": overlaps another body item");
      last_body = &item;
      if (item.kind == ItemKind::leave_bed) {
        if (!in_bed) bad_timeline(name + ": leave_bed while out of bed");
        if (item.end - item.start < 2) bad_timeline(name + ": leave_bed needs >= 2 s");
        in_bed = false;
      } else if (item.kind == ItemKind::return_bed) {
        if (in_bed) bad_timeline(name + ": return_bed without a preceding leave_bed");
        if (item.end - item.start < 2) bad_timeline(name + ": return_bed needs >= 2 s");
        in_bed = true;
      } else if (!in_bed) {
        bad_timeline(name + ": body item while out of bed");
      }
    } else if (is_light_kind(item.kind)) {
      if (overlaps(last_light)) bad_timeline(name + ": overlaps another light item");
      last_light = &item;
      const int step = static_cast<int>(std::lround(item.magnitude));
      if (item.kind == ItemKind::light_on) {
        if (light_is_on) bad_timeline(name + ": light_on while the light is on");
        luma += step;
        light_is_on = true;
      } else {
        if (!light_is_on) bad_timeline(name + ": light_off while the light is off");
        luma -= step;
        light_is_on = false;
      }
      if (luma < 0 || luma > 255) bad_timeline(name + ": luma leaves 0..255");
    } else {
      if (overlaps(last_talk)) bad_timeline(name + ": overlaps another talk item");
      last_talk = &item;
    }
  }
  if (!in_bed) bad_timeline("leave_bed without a matching return_bed");
}

SessionManifest Scenario::manifest() const {
  SessionManifest m;
  m.depth_width = m.color_width = frame_width;
  m.depth_height = m.color_height = frame_height;
  m.video_rate = video_rate;
  m.audio_rate = audio_rate;
  m.frame_count = static_cast<std::size_t>(duration) * static_cast<std::size_t>(video_rate);
  m.roi = roi;
  return m;
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "duration=" << s.duration << '\n'
      << "seed=" << s.seed << '\n'
      << "depth_noise=" << fixed(s.depth_noise, 6) << '\n'
      << "luma_noise=" << fixed(s.luma_noise, 6) << '\n'
      << "audio_noise=" << fixed(s.audio_noise, 6) << '\n'
      << "body_fraction=" << fixed(s.body_fraction, 6) << '\n'
      << "ambient_luma=" << s.ambient_luma << '\n'
      << "frame_width=" << s.frame_width << '\n'
      << "frame_height=" << s.frame_height << '\n'
      << "roi_x=" << s.roi.x << '\n'
      << "roi_y=" << s.roi.y << '\n'
      << "roi_w=" << s.roi.width << '\n'
      << "roi_h=" << s.roi.height << '\n'
      << "video_rate=" << s.video_rate << '\n'
      << "audio_rate=" << s.audio_rate << '\n';
  for (const auto& item : s.timeline) {
    out << "item=" << item.start << ' ' << item.end << ' ' << to_string(item.kind) << ' ' << fixed(item.magnitude, 6)
        << '\n';
  }
  return out.str();
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::map<std::string, bool> seen;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "item") {
      std::istringstream fields(value);
      std::string start, end, kind, magnitude, extra;
      if (!(fields >> start >> end >> kind >> magnitude) || (fields >> extra)) {
        bad_timeline("item needs 'start end kind magnitude', got '" + value + "'");
      }
      s.timeline.push_back({static_cast<int>(parse_integer("start", start)), static_cast<int>(parse_integer("end", end)),
                            parse_item_kind(kind), parse_double("magnitude", magnitude)});
      continue;
    }
    if (seen[key]) bad_timeline("duplicate key '" + key + "'");
    seen[key] = true;
    const auto as_int = [&] { return static_cast<int>(parse_integer(key, value)); };
    if (key == "duration") s.duration = as_int();
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    else if (key == "depth_noise") s.depth_noise = parse_double(key, value);
    else if (key == "luma_noise") s.luma_noise = parse_double(key, value);
    else if (key == "audio_noise") s.audio_noise = parse_double(key, value);
    else if (key == "body_fraction") s.body_fraction = parse_double(key, value);
    else if (key == "ambient_luma") s.ambient_luma = as_int();
    else if (key == "frame_width") s.frame_width = as_int();
    else if (key == "frame_height") s.frame_height = as_int();
    else if (key == "roi_x") s.roi.x = as_int();
    else if (key == "roi_y") s.roi.y = as_int();
    else if (key == "roi_w") s.roi.width = as_int();
    else if (key == "roi_h") s.roi.height = as_int();
    else if (key == "video_rate") s.video_rate = as_int();
    else if (key == "audio_rate") s.audio_rate = as_int();
    else bad_timeline("unknown scenario key '" + key + "'");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Ground truth

std::vector<Event> GroundTruth::all_events() const {
  std::vector<Event> out(motion);
  out.insert(out.end(), light.begin(), light.end());
  out.insert(out.end(), noise.begin(), noise.end());
  return out;
}

GroundTruth ground_truth(const Scenario& scenario) {
  scenario.validate();
  const auto manifest = scenario.manifest();
  GroundTruth gt;
  gt.epoch_classes.assign(static_cast<std::size_t>(scenario.duration), EpochClass::calmness);
  int left_at = -1;
  for (const auto& item : scenario.timeline) {
    const EpochSpan span{static_cast<std::size_t>(item.start), static_cast<std::size_t>(item.end - 1)};
    const auto label = [&](EpochClass c) {
      for (int s = item.start; s < item.end; ++s) gt.epoch_classes[static_cast<std::size_t>(s)] = c;
    };
    const auto add = [&](std::vector<Event>& list, EventChannel channel, double peak) {
      list.push_back({channel, span.start, span.end, peak, record_clip(channel, span, manifest)});
    };
    switch (item.kind) {
      case ItemKind::calm: label(EpochClass::calmness); break;
      case ItemKind::tiny_twitch: label(EpochClass::tiny_movement); break;
      case ItemKind::limb_move:
        label(EpochClass::limb_movement);
        add(gt.motion, EventChannel::motion, item.magnitude);
        break;
      case ItemKind::full_turn:
        label(EpochClass::full_posture_change);
        add(gt.motion, EventChannel::motion, item.magnitude);
        break;
      case ItemKind::leave_bed:
        label(EpochClass::full_posture_change);
        add(gt.motion, EventChannel::motion, item.magnitude);
        left_at = item.end;
        break;
      case ItemKind::return_bed:
        for (int s = left_at; s < item.start; ++s) gt.epoch_classes[static_cast<std::size_t>(s)] = EpochClass::out_of_view;
        label(EpochClass::full_posture_change);
        add(gt.motion, EventChannel::motion, item.magnitude);
        break;
      case ItemKind::light_on:
      case ItemKind::light_off: add(gt.light, EventChannel::light, 1.0); break;
      case ItemKind::talk: add(gt.noise, EventChannel::noise, item.magnitude); break;
    }
  }
  gt.sleep_efficiency = sleep_efficiency(gt.epoch_classes);
  return gt;
}

// ---------------------------------------------------------------------------
// Rendering

SyntheticSession::SyntheticSession(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  manifest_ = scenario_.manifest();
  body_ = body_rect(scenario_);
  const auto& s = scenario_;
  const auto rate = static_cast<std::size_t>(s.video_rate);

  regions_.assign(s.timeline.size(), Rect{});
  flicker_start_frame_.assign(s.timeline.size(), 0);
  for (std::size_t i = 0; i < s.timeline.size(); ++i) {
    const auto& item = s.timeline[i];
    if (!is_moving_kind(item.kind)) continue;
    Rect r = scaled_rect(s.roi, item.magnitude);
    if (item.kind == ItemKind::leave_bed || item.kind == ItemKind::return_bed) {
      r.x = std::clamp(body_.x + (body_.width - r.width) / 2, s.roi.x, s.roi.x + s.roi.width - r.width);
      r.y = std::clamp(body_.y + (body_.height - r.height) / 2, s.roi.y, s.roi.y + s.roi.height - r.height);
    } else {
      const Rect& bounds = (r.width <= body_.width && r.height <= body_.height) ? body_ : s.roi;
      std::mt19937_64 rng(mix(s.seed ^ kPlacementSalt, i));
      r.x = bounds.x + std::uniform_int_distribution<int>(0, bounds.width - r.width)(rng);
      r.y = bounds.y + std::uniform_int_distribution<int>(0, bounds.height - r.height)(rng);
    }
    regions_[i] = r;
    flicker_start_frame_[i] = static_cast<std::size_t>(item.start) * rate;
  }

  frames_.assign(manifest_.frame_count, FrameState{-1, true, s.ambient_luma});
  int luma = s.ambient_luma;
  std::size_t luma_from = 0;
  bool present = true;
  std::size_t presence_from = 0;
  const auto settle = static_cast<std::size_t>(settle_frames(s));
  for (std::size_t i = 0; i < s.timeline.size(); ++i) {
    const auto& item = s.timeline[i];
    const auto first = static_cast<std::size_t>(item.start) * rate;
    const auto last = static_cast<std::size_t>(item.end) * rate;  // exclusive
    if (is_light_kind(item.kind)) {
      for (std::size_t f = luma_from; f < first; ++f) frames_[f].luma_level = luma;
      const int step = static_cast<int>(std::lround(item.magnitude));
      luma += item.kind == ItemKind::light_on ? step : -step;
      luma_from = first;
    } else if (is_moving_kind(item.kind)) {
      auto flicker_end = last;
      if (item.kind == ItemKind::leave_bed || item.kind == ItemKind::return_bed) {
        flicker_end = std::max(first + 1, last > settle ? last - settle : first + 1);
        for (std::size_t f = presence_from; f < flicker_end; ++f) frames_[f].body_present = present;
        present = item.kind == ItemKind::return_bed;
        presence_from = flicker_end;
      }
      for (std::size_t f = first; f < flicker_end; ++f) frames_[f].flicker_item = static_cast<int>(i);
    }
  }
  for (std::size_t f = luma_from; f < frames_.size(); ++f) frames_[f].luma_level = luma;
  for (std::size_t f = presence_from; f < frames_.size(); ++f) frames_[f].body_present = present;

  depth_noise_ = gaussian_table(s.seed, kDepthSalt, s.depth_noise);
  luma_noise_ = gaussian_table(s.seed, kLumaSalt, s.luma_noise);
  audio_noise_ = gaussian_table(s.seed, kAudioSalt, s.audio_noise * 32768.0);
}

DepthFrame SyntheticSession::render_depth(std::size_t index, const Rect& area) const {
  if (index >= frames_.size()) throw Error(Errc::invalid_parameter, "frame index out of range");
  const auto& state = frames_[index];
  const int width = scenario_.frame_width;
  const int height = scenario_.frame_height;
  const Rect* region = state.flicker_item >= 0 ? &regions_[static_cast<std::size_t>(state.flicker_item)] : nullptr;
  const int level = region ? kFlickerLevels[(index - flicker_start_frame_[static_cast<std::size_t>(state.flicker_item)]) %
                                            kFlickerCycle]
                           : 0;
  const std::uint64_t offset = mix(scenario_.seed ^ kDepthSalt, index);

  DepthFrame out(area.width, area.height);
  out.index = index;
#pragma omp parallel for schedule(static)
  for (int row = 0; row < area.height; ++row) {
    const int y = area.y + row;
    const int bed = kBedDepth + kBedDepthSlope * y / height;
    std::uint16_t* dst = out.pixels.data() + static_cast<std::size_t>(row) * area.width;
    const std::size_t noise_base = offset + static_cast<std::size_t>(y) * width;
    for (int col = 0; col < area.width; ++col) {
      const int x = area.x + col;
      int v = (state.body_present && contains(body_, x, y)) ? bed - kBodyRise : bed;
      if (region && contains(*region, x, y)) v += level;
      v += depth_noise_[(noise_base + static_cast<std::size_t>(x)) & kNoiseTableMask];
      dst[col] = static_cast<std::uint16_t>(std::clamp(v, 1, static_cast<int>(kMaxDepth)));
    }
  }
  return out;
}

ColorFrame SyntheticSession::render_color(std::size_t index, const Rect& area) const {
  if (index >= frames_.size()) throw Error(Errc::invalid_parameter, "frame index out of range");
  const auto& state = frames_[index];
  const int width = scenario_.frame_width;
  const Rect* region = state.flicker_item >= 0 ? &regions_[static_cast<std::size_t>(state.flicker_item)] : nullptr;
  const int blob =
      region ? (((index - flicker_start_frame_[static_cast<std::size_t>(state.flicker_item)]) % 2) ? -kLumaBlobContrast
                                                                                                     : kLumaBlobContrast)
             : 0;
  const std::uint64_t offset = mix(scenario_.seed ^ kLumaSalt, index);

  ColorFrame out(area.width, area.height);
  out.index = index;
#pragma omp parallel for schedule(static)
  for (int row = 0; row < area.height; ++row) {
    const int y = area.y + row;
    Rgb* dst = out.pixels.data() + static_cast<std::size_t>(row) * area.width;
    const std::size_t noise_base = offset + static_cast<std::size_t>(y) * width;
    for (int col = 0; col < area.width; ++col) {
      const int x = area.x + col;
      int v = state.luma_level + luma_noise_[(noise_base + static_cast<std::size_t>(x)) & kNoiseTableMask];
      if (region && contains(*region, x, y)) v += blob;
      const auto c = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
      dst[col] = {c, c, c};
    }
  }
  return out;
}

DepthFrame SyntheticSession::depth_frame(std::size_t index) const {
  return render_depth(index, {0, 0, scenario_.frame_width, scenario_.frame_height});
}
ColorFrame SyntheticSession::color_frame(std::size_t index) const {
  return render_color(index, {0, 0, scenario_.frame_width, scenario_.frame_height});
}
DepthFrame SyntheticSession::depth_roi(std::size_t index) const { return render_depth(index, scenario_.roi); }
ColorFrame SyntheticSession::color_roi(std::size_t index) const { return render_color(index, scenario_.roi); }

std::vector<std::int16_t> SyntheticSession::audio(std::size_t begin, std::size_t end) const {
  if (end > audio_length() || begin > end) {
    throw Error(Errc::audio_underrun, "audio underrun: requested samples [" + std::to_string(begin) + ", " +
                                          std::to_string(end) + ") of " + std::to_string(audio_length()));
  }
  const auto rate = static_cast<std::size_t>(scenario_.audio_rate);
  std::vector<std::int16_t> out(end - begin);
  for (std::size_t j = begin; j < end; ++j) {
    const std::uint64_t offset = mix(scenario_.seed ^ kAudioSalt, j / rate);
    double v = audio_noise_[(offset + j) & kNoiseTableMask];
    const auto second = static_cast<int>(j / rate);
    for (const auto& item : scenario_.timeline) {
      if (item.kind != ItemKind::talk || second < item.start || second >= item.end) continue;
      const double t = static_cast<double>(j) / static_cast<double>(rate);
      const double envelope = 0.9 + 0.1 * std::sin(2.0 * std::numbers::pi * kTalkSyllableHz * t);
      v += item.magnitude * 32767.0 * envelope * std::sin(2.0 * std::numbers::pi * kTalkPitchHz * t);
    }
    out[j - begin] = static_cast<std::int16_t>(std::clamp(std::lround(v), -32768L, 32767L));
  }
  return out;
}

std::pair<SyntheticSession, GroundTruth> generate(const Scenario& scenario) {
  return {SyntheticSession(scenario), ground_truth(scenario)};
}

// ---------------------------------------------------------------------------
// Presets

PresetName parse_preset_name(std::string_view name) {
  if (name == "posture_test") return PresetName::posture_test;
  if (name == "trouble_sleeping") return PresetName::trouble_sleeping;
  if (name == "successful_sleeping") return PresetName::successful_sleeping;
  throw Error(Errc::unknown_preset, "unknown preset '" + std::string(name) +
                                        "' (valid: posture_test, trouble_sleeping, successful_sleeping)");
}

namespace {

// Appends shuffled movement blocks separated by calm gaps into [from, to).
// Blocks that produce motion events keep >= 3 s of calm after them.
struct Block {
  ItemKind kind;
  int length;
  double magnitude;
};

void lay_out(std::vector<TimelineItem>& out, std::vector<Block> blocks, int from, int to, std::mt19937_64& rng) {
  std::shuffle(blocks.begin(), blocks.end(), rng);
  int busy = 0;
  for (const auto& b : blocks) busy += b.length + (b.kind == ItemKind::tiny_twitch ? 1 : 3);
  const int spare = std::max(0, (to - from) - busy);
  // Spread the spare calm time over the gaps at random.
  std::vector<int> extra(blocks.size() + 1, 0);
  std::uniform_int_distribution<std::size_t> pick(0, extra.size() - 1);
  for (int s = 0; s < spare; ++s) ++extra[pick(rng)];
  int t = from + extra.back();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (t + b.length > to) break;
    out.push_back({t, t + b.length, b.kind, b.magnitude});
    t += b.length + (b.kind == ItemKind::tiny_twitch ? 1 : 3) + extra[i];
  }
}

std::vector<Block> movement_blocks(std::mt19937_64& rng, int full_turns, int limb_moves, int tiny_seconds,
                                   int tiny_min, int tiny_max) {
  std::uniform_real_distribution<double> full_mag(0.16, 0.26);
  std::uniform_real_distribution<double> limb_mag(0.035, 0.075);
  std::uniform_real_distribution<double> tiny_mag(0.007, 0.013);
  std::uniform_int_distribution<int> tiny_len(tiny_min, tiny_max);
  std::vector<Block> blocks;
  for (int i = 0; i < full_turns; ++i) blocks.push_back({ItemKind::full_turn, 3, full_mag(rng)});
  for (int i = 0; i < limb_moves; ++i) blocks.push_back({ItemKind::limb_move, 4, limb_mag(rng)});
  for (int left = tiny_seconds; left > 0;) {
    const int len = std::min(left, tiny_len(rng));
    if (len < 1) break;
    blocks.push_back({ItemKind::tiny_twitch, len, tiny_mag(rng)});
    left -= len;
  }
  return blocks;
}

// Magnitudes are rounded to what the scenario text format keeps.
void round_magnitudes(Scenario& s) {
  for (auto& item : s.timeline) item.magnitude = std::round(item.magnitude * 1e6) / 1e6;
}

Scenario posture_test(std::uint64_t seed) {
  Scenario s;
  s.duration = 600;
  s.seed = seed;
  s.ambient_luma = 120;  // light room
  for (int t : {120, 240, 360, 480}) s.timeline.push_back({t, t + 3, ItemKind::full_turn, 0.20});
  return s;
}

Scenario trouble_sleeping(std::uint64_t seed) {
  Scenario s;
  s.duration = 3600;
  s.seed = seed;
  std::mt19937_64 rng(20130501);
  std::vector<TimelineItem> items;

  // Restless before the long motionless-but-awake stretch.
  lay_out(items, movement_blocks(rng, 10, 36, 930, 3, 8), 30, 1500, rng);
  items.push_back({1500, 2000, ItemKind::calm, 0.0});
  lay_out(items, movement_blocks(rng, 3, 12, 250, 3, 8), 2000, 2400, rng);
  // Leaves the bed, turns on a light, comes back later.
  items.push_back({2400, 2403, ItemKind::leave_bed, 0.40});
  items.push_back({2420, 2421, ItemKind::light_on, 90.0});
  items.push_back({2740, 2741, ItemKind::light_off, 90.0});
  items.push_back({2760, 2763, ItemKind::return_bed, 0.40});
  lay_out(items, movement_blocks(rng, 5, 16, 480, 3, 8), 2766, 3600, rng);
  items.push_back({3300, 3302, ItemKind::talk, 0.30});

  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  s.timeline = std::move(items);
  round_magnitudes(s);
  return s;
}

Scenario successful_sleeping(std::uint64_t seed, int duration) {
  if (duration < 600 || duration > 6 * 3600) {
    throw Error(Errc::invalid_timeline, "invalid timeline: successful_sleeping duration must lie in 600..21600 s");
  }
  Scenario s;
  s.duration = duration;
  s.seed = seed;
  std::mt19937_64 rng(20130502);
  std::vector<TimelineItem> items;
  const double scale = duration / 1200.0;
  const auto scaled = [&](double v) { return std::max(1, static_cast<int>(std::lround(v * scale))); };

  // Falling asleep: most of the motion happens early.
  const int settle_end = static_cast<int>(0.15 * duration);
  lay_out(items, movement_blocks(rng, scaled(1), scaled(10), scaled(70), 3, 6), 30, settle_end, rng);
  // Asleep: long tiny-movement stretches (REM twitches) between calm.
  const int mid = duration / 2;
  lay_out(items, movement_blocks(rng, 0, 0, scaled(280), 5, 12), settle_end, mid, rng);
  const int away = std::max(2, static_cast<int>(std::lround(0.0225 * duration)));
  items.push_back({mid, mid + 3, ItemKind::leave_bed, 0.40});
  items.push_back({mid + 3 + away, mid + 6 + away, ItemKind::return_bed, 0.40});
  const int wake = static_cast<int>(0.95 * duration);
  lay_out(items, movement_blocks(rng, 0, scaled(2), scaled(280), 5, 12), mid + 9 + away, wake, rng);
  items.push_back({wake, wake + 1, ItemKind::light_on, 90.0});
  const int voice = static_cast<int>(0.97 * duration);
  items.push_back({voice, voice + 2, ItemKind::talk, 0.30});

  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  s.timeline = std::move(items);
  round_magnitudes(s);
  return s;
}

}  // namespace

Scenario preset(PresetName name, std::uint64_t seed, std::optional<int> duration) {
  switch (name) {
    case PresetName::posture_test: return posture_test(seed);
    case PresetName::trouble_sleeping: return trouble_sleeping(seed);
    case PresetName::successful_sleeping: return successful_sleeping(seed, duration.value_or(1200));
  }
  throw Error(Errc::unknown_preset, "unknown preset");
}

Scenario preset(std::string_view name, std::uint64_t seed, std::optional<int> duration) {
  return preset(parse_preset_name(name), seed, duration);
}

}  // namespace sleepmon
