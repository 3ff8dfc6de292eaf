#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"
#include "oracles.hpp"
#include "sleepmon/synth.hpp"

using namespace sleepmon;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 70 s in a small frame: one turn, a light toggle and a short talk.
Scenario scene() {
  Scenario s;
  s.duration = 70;
  s.seed = 11;
  s.frame_width = 64;
  s.frame_height = 70;
  s.roi = {0, 0, 64, 70};
  s.timeline = {{30, 33, ItemKind::full_turn, 0.2},
                {45, 46, ItemKind::light_on, 80},
                {55, 56, ItemKind::light_off, 80},
                {62, 64, ItemKind::talk, 0.4}};
  return s;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto scenario_file = dir.path / "scene.txt";
    std::ofstream(scenario_file) << format_scenario(scene());
    const auto r = run({"generate", "--scenario", scenario_file.string(), "--out", session().string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  fs::path session() const { return dir.path / "session"; }
  TempDir dir{"cli"};
};

}  // namespace

TEST_F(Cli, GenerateDetectReportCompare) {
  EXPECT_TRUE(fs::exists(session() / cli::kGroundTruthFile));
  EXPECT_TRUE(fs::exists(session() / cli::kScenarioFile));
  EXPECT_EQ(parse_scenario(slurp(session() / cli::kScenarioFile)), scene());

  const auto det = dir.path / "det";
  auto r = run({"detect", "--session", session().string(), "--out", det.string(), "--clips"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {cli::kEventsFile, cli::kScoresFile, cli::kEpochsFile, cli::kAppliedConfigFile}) {
    EXPECT_TRUE(fs::exists(det / f)) << f;
  }
  EXPECT_EQ(parse_config(slurp(det / cli::kAppliedConfigFile)), PipelineConfig{});
  std::ifstream events_in(det / cli::kEventsFile);
  const auto events = read_event_log(events_in);
  EXPECT_FALSE(events.empty());
  EXPECT_EQ(static_cast<std::size_t>(std::distance(fs::directory_iterator(det / "clips"), {})),
            events.size() + std::count_if(events.begin(), events.end(),
                                          [](const Event& e) { return e.channel == EventChannel::motion; }));

  r = run({"report", "--session", session().string(), "--detection", det.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(det / cli::kReportFile));
  double total = 0.0;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    for (const char* key : {"full_posture_changes=", "limb_movements=", "tiny_movements=", "calmness=", "out_of_view="}) {
      if (line.rfind(key, 0) == 0) total += std::stod(line.substr(std::string(key).size()));
    }
  }
  EXPECT_NEAR(total, 100.0, 0.03);

  r = run({"compare", "--events", (det / cli::kEventsFile).string(), "--truth",
           (session() / cli::kGroundTruthFile).string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST_F(Cli, DeterministicAcrossThreadCounts) {
  const auto a = dir.path / "a", b = dir.path / "b";
  ASSERT_EQ(run({"detect", "--session", session().string(), "--out", a.string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(run({"detect", "--session", session().string(), "--out", b.string(), "--threads", "4"}).code, 0);
  for (const char* f : {cli::kEventsFile, cli::kScoresFile, cli::kEpochsFile, cli::kAppliedConfigFile}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST_F(Cli, ConfigOverridesAreRecorded) {
  const auto cfg = dir.path / "tuned.cfg";
  std::ofstream(cfg) << "depth_threshold=0.2\n";
  const auto det = dir.path / "det";
  ASSERT_EQ(run({"detect", "--session", session().string(), "--config", cfg.string(), "--out", det.string()}).code, 0);
  EXPECT_EQ(parse_config(slurp(det / cli::kAppliedConfigFile)).detector.depth_threshold, 0.2);

  std::ofstream(cfg) << "nonsense=3\n";
  const auto r = run({"detect", "--session", session().string(), "--config", cfg.string(), "--out", det.string()});
  EXPECT_EQ(r.code, cli::kDomainError);
  EXPECT_NE(r.err.find("nonsense"), std::string::npos);
}

TEST(CliExitCodes, UsageAndDomainErrors) {
  TempDir dir("codes");
  EXPECT_EQ(run({}).code, cli::kUsageError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(run({"detect", "--session", dir.path.string()}).code, cli::kUsageError);
  EXPECT_EQ(run({"generate", "--out", (dir.path / "x").string()}).code, cli::kUsageError);
  const auto unknown = run({"generate", "--preset", "nap", "--out", (dir.path / "x").string()});
  EXPECT_EQ(unknown.code, cli::kDomainError);
  EXPECT_NE(unknown.err.find("successful_sleeping"), std::string::npos);
  EXPECT_EQ(run({"detect", "--session", (dir.path / "none").string(), "--out", (dir.path / "o").string()}).code,
            cli::kDomainError);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST(CliMatch, OneToOneWithTolerance) {
  const std::vector<Event> truth = {{EventChannel::motion, 10, 12, 0, {}}, {EventChannel::motion, 50, 50, 0, {}}};
  const std::vector<Event> detected = {{EventChannel::motion, 13, 14, 0, {}},
                                       {EventChannel::motion, 15, 15, 0, {}},
                                       {EventChannel::noise, 3, 3, 0, {}}};
  const auto m = cli::match_events(detected, truth, 2);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].channel, EventChannel::motion);
  EXPECT_EQ(m[0].matched, 1u);
  EXPECT_DOUBLE_EQ(m[0].precision(), 0.5);
  EXPECT_DOUBLE_EQ(m[0].recall(), 0.5);
  const auto& noise = m[2];
  EXPECT_EQ(noise.detected, 1u);
  EXPECT_DOUBLE_EQ(noise.recall(), 1.0);
  EXPECT_DOUBLE_EQ(noise.precision(), 0.0);
  EXPECT_EQ(cli::match_events(detected, truth, 0)[0].matched, 0u);
}
