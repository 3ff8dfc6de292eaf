#include "sleepmon/session_io.hpp"

#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "sleepmon/keyvalue.hpp"

namespace sleepmon {
namespace fs = std::filesystem;
namespace {

constexpr std::array<const char*, 14> kManifestKeys = {
    "depth_width", "depth_height", "color_width", "color_height", "video_rate", "audio_rate", "frame_count",
    "roi_x",       "roi_y",        "roi_w",       "roi_h",        "depth_file", "color_file", "audio_file"};

[[noreturn]] void corrupt(const std::string& detail) { throw Error(Errc::corrupt_session, "corrupt session: " + detail); }
[[noreturn]] void mismatch(const std::string& detail) {
  throw Error(Errc::manifest_mismatch, "manifest mismatch: " + detail);
}

void check_depth_range(std::span<const std::uint16_t> pixels, std::size_t frame_index) {
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (pixels[i] > kMaxDepth) {
      throw Error(Errc::invalid_depth_sample, "invalid depth sample: value " + std::to_string(pixels[i]) +
                                                  " in frame " + std::to_string(frame_index) + " at offset " +
                                                  std::to_string(i));
    }
  }
}

// Little-endian encode/decode, independent of host byte order.
void append_u16(std::vector<char>& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xFF));
  buf.push_back(static_cast<char>(v >> 8));
}

std::uint16_t read_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

std::uintmax_t file_size_or_corrupt(const fs::path& file) {
  std::error_code ec;
  const auto size = fs::file_size(file, ec);
  if (ec) corrupt("missing file '" + file.string() + "'");
  return size;
}

void read_exact(std::ifstream& in, char* dst, std::size_t bytes, const fs::path& file) {
  in.read(dst, static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) corrupt("short read from '" + file.string() + "'");
}

std::ifstream open_or_corrupt(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) corrupt("cannot open '" + file.string() + "'");
  return in;
}

SessionManifest read_manifest(const fs::path& dir) {
  const auto file = dir / kManifestFile;
  std::ifstream in(file, std::ios::binary);
  if (!in) corrupt("missing manifest '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

// Decodes `count` rows of `width` depth pixels starting at byte offset.
void read_depth_rows(std::ifstream& in, const fs::path& file, std::uintmax_t offset, int width, int x0, int rows,
                     int frame_width, std::uint16_t* dst) {
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * 2);
  for (int r = 0; r < rows; ++r) {
    in.seekg(static_cast<std::streamoff>(offset + (static_cast<std::uintmax_t>(r) * frame_width + x0) * 2));
    read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), file);
    for (int x = 0; x < width; ++x) dst[static_cast<std::size_t>(r) * width + x] = read_u16(&raw[2 * x]);
  }
}

void read_color_rows(std::ifstream& in, const fs::path& file, std::uintmax_t offset, int width, int x0, int rows,
                     int frame_width, Rgb* dst) {
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * 3);
  for (int r = 0; r < rows; ++r) {
    in.seekg(static_cast<std::streamoff>(offset + (static_cast<std::uintmax_t>(r) * frame_width + x0) * 3));
    read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), file);
    for (int x = 0; x < width; ++x) dst[static_cast<std::size_t>(r) * width + x] = {raw[3 * x], raw[3 * x + 1], raw[3 * x + 2]};
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

void SessionManifest::validate() const {
  if (video_rate <= 0) corrupt("video_rate must be > 0");
  if (audio_rate <= 0) corrupt("audio_rate must be > 0");
  if (depth_width <= 0 || depth_height <= 0 || color_width <= 0 || color_height <= 0) {
    corrupt("frame dimensions must be positive");
  }
  if (!roi.fits_in(depth_width, depth_height) || !roi.fits_in(color_width, color_height)) {
    corrupt("roi does not lie inside the depth and color frames");
  }
  if (depth_file.empty() || color_file.empty() || audio_file.empty()) corrupt("stream file names must be non-empty");
}

std::size_t SessionManifest::audio_sample_count() const {
  return frame_count * static_cast<std::size_t>(audio_rate) / static_cast<std::size_t>(video_rate);
}

std::string format_manifest(const SessionManifest& m) {
  std::ostringstream out;
  out << "depth_width=" << m.depth_width << '\n'
      << "depth_height=" << m.depth_height << '\n'
      << "color_width=" << m.color_width << '\n'
      << "color_height=" << m.color_height << '\n'
      << "video_rate=" << m.video_rate << '\n'
      << "audio_rate=" << m.audio_rate << '\n'
      << "frame_count=" << m.frame_count << '\n'
      << "roi_x=" << m.roi.x << '\n'
      << "roi_y=" << m.roi.y << '\n'
      << "roi_w=" << m.roi.width << '\n'
      << "roi_h=" << m.roi.height << '\n'
      << "depth_file=" << m.depth_file << '\n'
      << "color_file=" << m.color_file << '\n'
      << "audio_file=" << m.audio_file << '\n';
  return out.str();
}

SessionManifest parse_manifest(std::string_view text) {
  KeyValues kv;
  try {
    kv = parse_key_values(text);
  } catch (const Error& e) {
    corrupt(e.what());
  }
  std::map<std::string, std::string> values;
  for (auto& [k, v] : kv) {
    if (std::find(kManifestKeys.begin(), kManifestKeys.end(), k) == kManifestKeys.end()) {
      corrupt("unknown manifest key '" + k + "'");
    }
    if (!values.emplace(k, v).second) corrupt("duplicate manifest key '" + k + "'");
  }
  for (const char* key : kManifestKeys) {
    if (!values.contains(key)) corrupt(std::string("missing manifest key '") + key + "'");
  }
  const auto integer = [&](const char* key) {
    try {
      return parse_integer(key, values.at(key));
    } catch (const Error& e) {
      corrupt(e.what());
    }
  };
  const auto int32 = [&](const char* key) {
    const auto v = integer(key);
    if (v < -(1LL << 30) || v > (1LL << 30)) corrupt(std::string("value out of range for '") + key + "'");
    return static_cast<int>(v);
  };
  SessionManifest m;
  m.depth_width = int32("depth_width");
  m.depth_height = int32("depth_height");
  m.color_width = int32("color_width");
  m.color_height = int32("color_height");
  m.video_rate = int32("video_rate");
  m.audio_rate = int32("audio_rate");
  const auto frames = integer("frame_count");
  if (frames < 0) corrupt("frame_count must be >= 0");
  m.frame_count = static_cast<std::size_t>(frames);
  m.roi = {int32("roi_x"), int32("roi_y"), int32("roi_w"), int32("roi_h")};
  m.depth_file = values.at("depth_file");
  m.color_file = values.at("color_file");
  m.audio_file = values.at("audio_file");
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// In-memory session

Session::Session(SessionManifest manifest, std::vector<DepthFrame> depth, std::vector<ColorFrame> color,
                 std::vector<std::int16_t> audio)
    : manifest_(std::move(manifest)), depth_(std::move(depth)), color_(std::move(color)), audio_(std::move(audio)) {}

void Session::validate() const {
  manifest_.validate();
  if (depth_.size() != manifest_.frame_count || color_.size() != manifest_.frame_count) {
    mismatch("frame_count " + std::to_string(manifest_.frame_count) + " but " + std::to_string(depth_.size()) +
             " depth / " + std::to_string(color_.size()) + " color frames");
  }
  for (std::size_t i = 0; i < depth_.size(); ++i) {
    const auto& d = depth_[i];
    if (d.width != manifest_.depth_width || d.height != manifest_.depth_height || d.pixels.size() != d.size() ||
        d.pixels.size() != manifest_.depth_frame_pixels()) {
      mismatch("depth frame " + std::to_string(i) + " dimensions");
    }
    check_depth_range(d.pixels, i);
    const auto& c = color_[i];
    if (c.width != manifest_.color_width || c.height != manifest_.color_height ||
        c.pixels.size() != manifest_.color_frame_pixels()) {
      mismatch("color frame " + std::to_string(i) + " dimensions");
    }
  }
  if (audio_.size() != manifest_.audio_sample_count()) {
    mismatch("audio holds " + std::to_string(audio_.size()) + " samples, expected " +
             std::to_string(manifest_.audio_sample_count()));
  }
}

DepthFrame Session::depth_frame(std::size_t index) const { return depth_.at(index); }
ColorFrame Session::color_frame(std::size_t index) const { return color_.at(index); }

std::vector<std::int16_t> Session::audio(std::size_t begin, std::size_t end) const {
  if (end > audio_.size() || begin > end) {
    throw Error(Errc::audio_underrun, "audio underrun: requested samples [" + std::to_string(begin) + ", " +
                                          std::to_string(end) + ") of " + std::to_string(audio_.size()));
  }
  return {audio_.begin() + static_cast<std::ptrdiff_t>(begin), audio_.begin() + static_cast<std::ptrdiff_t>(end)};
}

bool Session::operator==(const Session& other) const {
  return manifest_ == other.manifest_ && depth_ == other.depth_ && color_ == other.color_ && audio_ == other.audio_;
}

Session materialize(const FrameSource& source) {
  const auto& m = source.manifest();
  std::vector<DepthFrame> depth;
  std::vector<ColorFrame> color;
  depth.reserve(m.frame_count);
  color.reserve(m.frame_count);
  for (std::size_t i = 0; i < m.frame_count; ++i) {
    depth.push_back(source.depth_frame(i));
    color.push_back(source.color_frame(i));
  }
  return Session(m, std::move(depth), std::move(color), source.audio(0, source.audio_length()));
}

// ---------------------------------------------------------------------------
// Disk I/O

SessionReader::SessionReader(const fs::path& dir) : dir_(dir), manifest_(read_manifest(dir)) {
  const auto& m = manifest_;
  const auto depth_path = dir_ / m.depth_file;
  const auto color_path = dir_ / m.color_file;
  const auto audio_path = dir_ / m.audio_file;
  const auto depth_bytes = file_size_or_corrupt(depth_path);
  const auto color_bytes = file_size_or_corrupt(color_path);
  const auto audio_bytes = file_size_or_corrupt(audio_path);

  const std::uintmax_t want_depth = m.frame_count * m.depth_frame_pixels() * 2;
  const std::uintmax_t want_color = m.frame_count * m.color_frame_pixels() * 3;
  const std::uintmax_t want_audio = m.audio_sample_count() * 2;
  if (depth_bytes != want_depth) {
    mismatch("depth stream holds " + std::to_string(depth_bytes) + " bytes, expected " + std::to_string(want_depth));
  }
  if (color_bytes != want_color) {
    mismatch("color stream holds " + std::to_string(color_bytes) + " bytes, expected " + std::to_string(want_color));
  }
  if (audio_bytes != want_audio) {
    mismatch("audio stream holds " + std::to_string(audio_bytes) + " bytes, expected " + std::to_string(want_audio));
  }

  auto in = open_or_corrupt(depth_path);
  std::vector<unsigned char> raw(m.depth_frame_pixels() * 2);
  std::vector<std::uint16_t> frame(m.depth_frame_pixels());
  for (std::size_t i = 0; i < m.frame_count; ++i) {
    read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), depth_path);
    for (std::size_t p = 0; p < frame.size(); ++p) frame[p] = read_u16(&raw[2 * p]);
    check_depth_range(frame, i);
  }
}

DepthFrame SessionReader::depth_frame(std::size_t index) const {
  const auto& m = manifest_;
  if (index >= m.frame_count) throw Error(Errc::corrupt_session, "corrupt session: depth frame index out of range");
  const auto file = dir_ / m.depth_file;
  auto in = open_or_corrupt(file);
  DepthFrame f(m.depth_width, m.depth_height);
  f.index = index;
  read_depth_rows(in, file, index * m.depth_frame_pixels() * 2, m.depth_width, 0, m.depth_height, m.depth_width,
                  f.pixels.data());
  return f;
}

DepthFrame SessionReader::depth_roi(std::size_t index) const {
  const auto& m = manifest_;
  if (index >= m.frame_count) throw Error(Errc::corrupt_session, "corrupt session: depth frame index out of range");
  const auto file = dir_ / m.depth_file;
  auto in = open_or_corrupt(file);
  DepthFrame f(m.roi.width, m.roi.height);
  f.index = index;
  const std::uintmax_t offset = index * m.depth_frame_pixels() * 2 +
                                static_cast<std::uintmax_t>(m.roi.y) * m.depth_width * 2;
  read_depth_rows(in, file, offset, m.roi.width, m.roi.x, m.roi.height, m.depth_width, f.pixels.data());
  return f;
}

ColorFrame SessionReader::color_frame(std::size_t index) const {
  const auto& m = manifest_;
  if (index >= m.frame_count) throw Error(Errc::corrupt_session, "corrupt session: color frame index out of range");
  const auto file = dir_ / m.color_file;
  auto in = open_or_corrupt(file);
  ColorFrame f(m.color_width, m.color_height);
  f.index = index;
  read_color_rows(in, file, index * m.color_frame_pixels() * 3, m.color_width, 0, m.color_height, m.color_width,
                  f.pixels.data());
  return f;
}

ColorFrame SessionReader::color_roi(std::size_t index) const {
  const auto& m = manifest_;
  if (index >= m.frame_count) throw Error(Errc::corrupt_session, "corrupt session: color frame index out of range");
  const auto file = dir_ / m.color_file;
  auto in = open_or_corrupt(file);
  ColorFrame f(m.roi.width, m.roi.height);
  f.index = index;
  const std::uintmax_t offset = index * m.color_frame_pixels() * 3 +
                                static_cast<std::uintmax_t>(m.roi.y) * m.color_width * 3;
  read_color_rows(in, file, offset, m.roi.width, m.roi.x, m.roi.height, m.color_width, f.pixels.data());
  return f;
}

std::vector<std::int16_t> SessionReader::audio(std::size_t begin, std::size_t end) const {
  if (end > audio_length() || begin > end) {
    throw Error(Errc::audio_underrun, "audio underrun: requested samples [" + std::to_string(begin) + ", " +
                                          std::to_string(end) + ") of " + std::to_string(audio_length()));
  }
  const auto file = dir_ / manifest_.audio_file;
  auto in = open_or_corrupt(file);
  in.seekg(static_cast<std::streamoff>(begin * 2));
  std::vector<unsigned char> raw((end - begin) * 2);
  read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), file);
  std::vector<std::int16_t> out(end - begin);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::int16_t>(read_u16(&raw[2 * i]));
  return out;
}

Session load_session(const fs::path& dir) { return materialize(SessionReader(dir)); }

void write_session(const FrameSource& source, const fs::path& dir) {
  const auto& m = source.manifest();
  m.validate();
  // Validation pass: nothing touches the disk until the whole source is known good.
  for (std::size_t i = 0; i < m.frame_count; ++i) {
    const auto d = source.depth_frame(i);
    if (d.width != m.depth_width || d.height != m.depth_height || d.pixels.size() != m.depth_frame_pixels()) {
      mismatch("depth frame " + std::to_string(i) + " dimensions");
    }
    check_depth_range(d.pixels, i);
    const auto c = source.color_frame(i);
    if (c.width != m.color_width || c.height != m.color_height || c.pixels.size() != m.color_frame_pixels()) {
      mismatch("color frame " + std::to_string(i) + " dimensions");
    }
  }
  if (source.audio_length() != m.audio_sample_count()) {
    mismatch("audio holds " + std::to_string(source.audio_length()) + " samples, expected " +
             std::to_string(m.audio_sample_count()));
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create '" + dir.string() + "': " + ec.message());
  write_text_file((dir / kManifestFile).string(), format_manifest(m));

  const auto open_out = [](const fs::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + file.string() + "'");
    return out;
  };
  auto depth_out = open_out(dir / m.depth_file);
  auto color_out = open_out(dir / m.color_file);
  std::vector<char> buf;
  for (std::size_t i = 0; i < m.frame_count; ++i) {
    buf.clear();
    for (auto v : source.depth_frame(i).pixels) append_u16(buf, v);
    depth_out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
    for (const auto& px : source.color_frame(i).pixels) {
      buf.push_back(static_cast<char>(px.r));
      buf.push_back(static_cast<char>(px.g));
      buf.push_back(static_cast<char>(px.b));
    }
    color_out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  auto audio_out = open_out(dir / m.audio_file);
  constexpr std::size_t kBlock = 1 << 16;
  for (std::size_t begin = 0; begin < m.audio_sample_count(); begin += kBlock) {
    const auto end = std::min(begin + kBlock, m.audio_sample_count());
    buf.clear();
    for (auto s : source.audio(begin, end)) append_u16(buf, static_cast<std::uint16_t>(s));
    audio_out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!depth_out || !color_out || !audio_out) throw Error(Errc::io_error, "write failed in '" + dir.string() + "'");
}

void write_wav(const fs::path& file, std::span<const std::int16_t> samples, int sample_rate) {
  std::vector<char> buf;
  const auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  const auto tag = [&](const char* t) { buf.insert(buf.end(), t, t + 4); };
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  tag("RIFF");
  u32(36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  append_u16(buf, 1);  // PCM
  append_u16(buf, 1);  // mono
  u32(static_cast<std::uint32_t>(sample_rate));
  u32(static_cast<std::uint32_t>(sample_rate) * 2);
  append_u16(buf, 2);
  append_u16(buf, 16);
  tag("data");
  u32(data_bytes);
  for (auto s : samples) append_u16(buf, static_cast<std::uint16_t>(s));
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + file.string() + "'");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace sleepmon
