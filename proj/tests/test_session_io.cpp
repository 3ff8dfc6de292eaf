#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "oracles.hpp"
#include "sleepmon/error.hpp"
#include "sleepmon/keyvalue.hpp"
#include "sleepmon/session_io.hpp"

using namespace sleepmon;
namespace fs = std::filesystem;

namespace {

Session random_session(std::mt19937& rng, int w, int h, std::size_t frames) {
  SessionManifest m;
  m.depth_width = m.color_width = w;
  m.depth_height = m.color_height = h;
  m.frame_count = frames;
  m.roi = {1, 1, w - 2, h - 1};
  m.audio_rate = 8000;
  m.video_rate = 15;
  std::vector<DepthFrame> depth;
  std::vector<ColorFrame> color;
  for (std::size_t i = 0; i < frames; ++i) {
    DepthFrame d(w, h);
    d.index = i;
    for (auto& v : d.pixels) v = static_cast<std::uint16_t>(rng() % (kMaxDepth + 1));
    ColorFrame c(w, h);
    c.index = i;
    for (auto& px : c.pixels) px = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
    depth.push_back(std::move(d));
    color.push_back(std::move(c));
  }
  std::vector<std::int16_t> audio(m.audio_sample_count());
  for (auto& s : audio) s = static_cast<std::int16_t>(rng());
  return Session(m, std::move(depth), std::move(color), std::move(audio));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Errc load_error(const fs::path& dir) {
  try {
    load_session(dir);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io_error;
}

}  // namespace

TEST(Manifest, RoundTripAndStrictKeys) {
  SessionManifest m;
  m.frame_count = 42;
  m.roi = {10, 20, 30, 40};
  EXPECT_EQ(parse_manifest(format_manifest(m)), m);
  EXPECT_THROW(parse_manifest(format_manifest(m) + "bogus=1\n"), Error);
  EXPECT_THROW(parse_manifest(format_manifest(m) + "frame_count=3\n"), Error);
  EXPECT_THROW(parse_manifest("depth_width=640\n"), Error);
  SessionManifest bad = m;
  bad.roi = {630, 470, 320, 350};
  EXPECT_THROW(bad.validate(), Error);
  bad = m;
  bad.video_rate = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(CropRoi, Examples) {
  DepthFrame f(640, 480);
  for (int y = 0; y < 480; ++y) {
    for (int x = 0; x < 640; ++x) f.at(x, y) = static_cast<std::uint16_t>((x * 7 + y * 3) % 2048);
  }
  EXPECT_EQ(crop_roi(f, {0, 0, 640, 480}), f);
  const auto c = crop_roi(f, {160, 65, 320, 350});
  EXPECT_EQ(c.width, 320);
  EXPECT_EQ(c.height, 350);
  EXPECT_EQ(c.at(0, 0), f.at(160, 65));
  EXPECT_EQ(c.at(319, 349), f.at(479, 414));
  try {
    crop_roi(f, {630, 470, 320, 350});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::roi_out_of_range);
  }
}

TEST(SessionFiles, RoundTripProperty) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    const auto s = random_session(rng, 3 + static_cast<int>(rng() % 6), 2 + static_cast<int>(rng() % 5), rng() % 6);
    TempDir dir("rt");
    write_session(s, dir.path);
    EXPECT_EQ(load_session(dir.path), s);
    // The lazy reader sees the same data.
    const SessionReader reader(dir.path);
    for (std::size_t i = 0; i < s.manifest().frame_count; ++i) {
      ASSERT_EQ(reader.depth_frame(i), s.depth_frame(i));
      ASSERT_EQ(reader.color_roi(i), s.color_roi(i));
      ASSERT_EQ(reader.depth_roi(i), s.depth_roi(i));
    }
    EXPECT_EQ(reader.audio(0, reader.audio_length()), s.audio_samples());
  }
}

TEST(SessionFiles, EmptySession) {
  std::mt19937 rng(1);
  const auto s = random_session(rng, 4, 3, 0);
  TempDir dir("empty");
  write_session(s, dir.path);
  const auto back = load_session(dir.path);
  EXPECT_EQ(back.manifest().frame_count, 0u);
  EXPECT_TRUE(back.depth_frames().empty());
  EXPECT_TRUE(back.audio_samples().empty());
}

TEST(SessionFiles, WritesAreByteIdentical) {
  std::mt19937 rng(5);
  const auto s = random_session(rng, 5, 4, 3);
  TempDir a("a"), b("b");
  write_session(s, a.path);
  write_session(s, b.path);
  for (const char* f : {"manifest.txt", "depth.raw", "color.raw", "audio.raw"}) {
    EXPECT_EQ(slurp(a.path / f), slurp(b.path / f)) << f;
  }
  // Little-endian 16-bit depth, row-major.
  const auto raw = slurp(a.path / "depth.raw");
  const auto v = s.depth_frame(0).pixels[1];
  EXPECT_EQ(static_cast<unsigned char>(raw[2]), v & 0xff);
  EXPECT_EQ(static_cast<unsigned char>(raw[3]), v >> 8);
}

TEST(SessionFiles, LoadErrors) {
  std::mt19937 rng(9);
  const auto s = random_session(rng, 6, 4, 2);
  {
    TempDir dir("missing");
    EXPECT_EQ(load_error(dir.path), Errc::corrupt_session);
    write_session(s, dir.path);
    fs::remove(dir.path / "color.raw");
    EXPECT_EQ(load_error(dir.path), Errc::corrupt_session);
    EXPECT_THROW(SessionReader{dir.path}, Error);
  }
  {
    // One column short: 5x4 pixels of data for a 6x4 manifest.
    TempDir dir("short");
    write_session(s, dir.path);
    fs::resize_file(dir.path / "depth.raw", 2 * 5 * 4 * 2);
    EXPECT_EQ(load_error(dir.path), Errc::manifest_mismatch);
  }
  {
    TempDir dir("range");
    write_session(s, dir.path);
    std::fstream f(dir.path / "depth.raw", std::ios::in | std::ios::out | std::ios::binary);
    const char big[2] = {static_cast<char>(0x00), static_cast<char>(0x08)};  // 2048
    f.seekp(6);
    f.write(big, 2);
    f.close();
    EXPECT_EQ(load_error(dir.path), Errc::invalid_depth_sample);
  }
  {
    TempDir dir("audio");
    write_session(s, dir.path);
    fs::resize_file(dir.path / "audio.raw", fs::file_size(dir.path / "audio.raw") - 2);
    EXPECT_EQ(load_error(dir.path), Errc::manifest_mismatch);
  }
}

TEST(SessionFiles, InvalidSessionWritesNothing) {
  std::mt19937 rng(3);
  auto s = random_session(rng, 4, 4, 2);
  auto depth = s.depth_frames();
  depth[1].pixels[5] = 3000;
  const Session bad(s.manifest(), depth, s.color_frames(), s.audio_samples());
  TempDir dir("invalid");
  const auto target = dir.path / "out";
  EXPECT_THROW(write_session(bad, target), Error);
  EXPECT_FALSE(fs::exists(target));
}

TEST(SessionFiles, AudioUnderrun) {
  std::mt19937 rng(4);
  const auto s = random_session(rng, 4, 4, 2);
  EXPECT_THROW(s.audio(0, s.audio_length() + 1), Error);
}

TEST(Wav, Header) {
  TempDir dir("wav");
  const std::vector<std::int16_t> samples = {1, -1, 300};
  write_wav(dir.path / "x.wav", samples, 16000);
  const auto bytes = slurp(dir.path / "x.wav");
  ASSERT_EQ(bytes.size(), 44u + 6u);
  EXPECT_EQ(bytes.substr(0, 4), "RIFF");
  EXPECT_EQ(bytes.substr(8, 8), "WAVEfmt ");
  EXPECT_EQ(bytes.substr(36, 4), "data");
  EXPECT_EQ(static_cast<unsigned char>(bytes[44]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[46]), 0xff);
}

TEST(KeyValues, Parsing) {
  const auto kv = parse_key_values("# c\n a = 1 \n\nb=x=y\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"a", "1"}));
  EXPECT_EQ(kv[1].second, "x=y");
  EXPECT_THROW(parse_key_values("novalue\n"), Error);
  EXPECT_THROW(parse_double("k", "1.5x"), Error);
  EXPECT_THROW(parse_integer("k", "2.0"), Error);
  EXPECT_EQ(fixed(0.5, 2), "0.50");
}
