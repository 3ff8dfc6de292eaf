#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "sleepmon/error.hpp"
#include "sleepmon/keyvalue.hpp"
#include "sleepmon/session_io.hpp"
#include "sleepmon/synth.hpp"

namespace sleepmon::cli {
namespace fs = std::filesystem;

namespace {

// Thrown for flag values CLI11 accepts but the command cannot use.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const fs::path& file, const char* what) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::io_error, std::string("missing ") + what + " '" + file.string() + "'");
  return in;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + file.string() + "'");
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create '" + dir.string() + "': " + ec.message());
}

std::vector<int> split_ints(const std::string& text, char sep, std::size_t count, const char* flag) {
  std::vector<int> values;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep)) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + text + "' is not a number list");
    }
  }
  if (values.size() != count) throw UsageError(std::string(flag) + ": expected " + std::to_string(count) + " values");
  return values;
}

struct GenerateArgs {
  std::string preset;
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> duration;
  std::string frame;
  std::string roi;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  Scenario s;
  if (!a.preset.empty()) {
    s = preset(a.preset, a.seed.value_or(1), a.duration);
  } else {
    if (a.duration) throw UsageError("--duration only applies to presets");
    s = parse_scenario(read_text_file(a.scenario_file));
    if (a.seed) s.seed = *a.seed;
  }
  if (!a.frame.empty()) {
    const auto wh = split_ints(a.frame, 'x', 2, "--frame");
    s.frame_width = wh[0];
    s.frame_height = wh[1];
  }
  if (!a.roi.empty()) {
    const auto r = split_ints(a.roi, ',', 4, "--roi");
    s.roi = Rect{r[0], r[1], r[2], r[3]};
  }
  s.validate();

  const auto [session, truth] = generate(s);
  const fs::path dir(a.out);
  write_session(session, dir);
  write_text_file((dir / kScenarioFile).string(), format_scenario(s));
  {
    auto log = open_out(dir / kGroundTruthFile);
    const auto events = truth.all_events();
    write_event_log(log, events);
  }

  std::map<std::string_view, int> kinds;
  for (const auto& item : s.timeline) ++kinds[to_string(item.kind)];
  out << "duration=" << s.duration << " frames=" << session.manifest().frame_count << " seed=" << s.seed
      << " items=" << s.timeline.size() << '\n';
  for (const auto& [kind, n] : kinds) out << "  " << kind << '=' << n << '\n';
  out << "ground truth: motion=" << truth.motion.size() << " light=" << truth.light.size()
      << " noise=" << truth.noise.size() << " efficiency=" << fixed(truth.sleep_efficiency, 4) << '\n';
  return kOk;
}

PipelineConfig load_config(const std::string& file) {
  return file.empty() ? PipelineConfig{} : parse_config(read_text_file(file));
}

void write_clips(const FrameSource& source, std::span<const Event> events, const fs::path& dir) {
  make_dir(dir);
  const auto& m = source.manifest();
  std::map<EventChannel, int> next;
  for (const auto& e : events) {
    const auto stem = std::string(to_string(e.channel)) + "_" + std::to_string(next[e.channel]++);
    if (e.clip.unit == ClipUnit::samples) {
      const auto samples = source.audio(e.clip.begin, e.clip.end);
      write_wav(dir / (stem + ".wav"), samples, m.audio_rate);
      continue;
    }
    std::vector<char> buf;
    if (e.channel == EventChannel::motion) {
      auto depth = open_out(dir / (stem + "_depth.raw"));
      for (auto i = e.clip.begin; i < e.clip.end; ++i) {
        buf.clear();
        for (auto v : source.depth_frame(i).pixels) {
          buf.push_back(static_cast<char>(v & 0xff));
          buf.push_back(static_cast<char>(v >> 8));
        }
        depth.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      }
    }
    auto color = open_out(dir / (stem + "_color.raw"));
    for (auto i = e.clip.begin; i < e.clip.end; ++i) {
      buf.clear();
      for (const auto& px : source.color_frame(i).pixels) {
        buf.push_back(static_cast<char>(px.r));
        buf.push_back(static_cast<char>(px.g));
        buf.push_back(static_cast<char>(px.b));
      }
      color.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
  }
}

struct DetectArgs {
  std::string session;
  std::string config;
  std::string out;
  int threads = 0;
  bool clips = false;
};

int cmd_detect(const DetectArgs& a, std::ostream& out) {
  if (a.threads > 0) omp_set_num_threads(a.threads);
  const auto config = load_config(a.config);
  const SessionReader source{fs::path(a.session)};
  auto models = make_models(source, config.depth_model, config.luma_model);
  const auto result = run_detector(source, models.depth, models.color, config.detector);

  const fs::path dir(a.out);
  make_dir(dir);
  write_text_file((dir / kAppliedConfigFile).string(), format_config(config));
  const auto events = result.all_events();
  {
    auto log = open_out(dir / kEventsFile);
    write_event_log(log, events);
    auto scores = open_out(dir / kScoresFile);
    write_scores_csv(scores, result.scores);
    auto epochs = open_out(dir / kEpochsFile);
    write_epochs_csv(epochs, result.counts);
  }
  if (a.clips) write_clips(source, events, dir / "clips");
  out << "frames=" << result.scores.size() << " motion=" << result.motion.size() << " light=" << result.light.size()
      << " noise=" << result.noise.size() << '\n';
  return kOk;
}

struct ReportArgs {
  std::string session;
  std::string detection;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const fs::path det(a.detection);
  const auto manifest = parse_manifest(read_text_file((fs::path(a.session) / kManifestFile).string()));
  manifest.validate();
  auto scores_in = open_in(det / kScoresFile, "scores");
  const auto scores = read_scores_csv(scores_in);
  if (scores.size() != manifest.frame_count) {
    throw Error(Errc::manifest_mismatch, "manifest mismatch: scores.csv holds " + std::to_string(scores.size()) +
                                             " frames, session has " + std::to_string(manifest.frame_count));
  }
  auto events_in = open_in(det / kEventsFile, "event log");
  const auto events = read_event_log(events_in);
  const auto applied = det / kAppliedConfigFile;
  const auto config = fs::exists(applied) ? parse_config(read_text_file(applied.string())) : PipelineConfig{};

  std::vector<Event> light, noise;
  for (const auto& e : events) {
    if (e.channel == EventChannel::light) light.push_back(e);
    if (e.channel == EventChannel::noise) noise.push_back(e);
  }
  const auto analysis = analyze(scores.depth.values, light, noise, manifest.video_rate, config.classes);
  std::ostringstream text;
  write_report(text, analysis.report, analysis.actigraphy);
  write_text_file((det / kReportFile).string(), text.str());
  out << text.str();
  return kOk;
}

struct CompareArgs {
  std::string events;
  std::string truth;
  std::size_t tolerance = 2;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  auto events_in = open_in(a.events, "event log");
  const auto detected = read_event_log(events_in);
  auto truth_in = open_in(a.truth, "ground truth log");
  const auto truth = read_event_log(truth_in);
  bool perfect = true;
  for (const auto& m : match_events(detected, truth, a.tolerance)) {
    out << to_string(m.channel) << " detected=" << m.detected << " truth=" << m.truth << " matched=" << m.matched
        << " precision=" << fixed(m.precision(), 4) << " recall=" << fixed(m.recall(), 4) << '\n';
    perfect = perfect && m.matched == m.detected && m.matched == m.truth;
  }
  return perfect ? kOk : kDomainError;
}

}  // namespace

Analysis analyze(std::span<const double> depth_scores, std::span<const Event> light, std::span<const Event> noise,
                 int video_rate, const ClassThresholds& thresholds) {
  Analysis a;
  a.classes = classify_epochs(epoch_peaks(depth_scores, video_rate), thresholds);
  a.report = build_report(a.classes, light, noise, static_cast<double>(depth_scores.size()) / video_rate);
  a.activity = counts_from_scores(depth_scores, video_rate, thresholds.tiny);
  a.cole = cole_sleep_wake(a.activity);
  a.sadeh = sadeh_sleep_wake(a.activity);
  a.actigraphy = {wake_series_efficiency(a.cole), wake_series_efficiency(a.sadeh)};
  return a;
}

double ChannelMatch::precision() const {
  return detected == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(detected);
}

double ChannelMatch::recall() const {
  return truth == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(truth);
}

std::vector<ChannelMatch> match_events(std::span<const Event> detected, std::span<const Event> truth,
                                       std::size_t tolerance) {
  const auto by_start = [](const Event& a, const Event& b) {
    return a.start_epoch != b.start_epoch ? a.start_epoch < b.start_epoch : a.end_epoch < b.end_epoch;
  };
  std::vector<ChannelMatch> result;
  for (const auto channel : {EventChannel::motion, EventChannel::light, EventChannel::noise}) {
    std::vector<Event> d, t;
    std::copy_if(detected.begin(), detected.end(), std::back_inserter(d),
                 [&](const Event& e) { return e.channel == channel; });
    std::copy_if(truth.begin(), truth.end(), std::back_inserter(t),
                 [&](const Event& e) { return e.channel == channel; });
    std::sort(d.begin(), d.end(), by_start);
    std::sort(t.begin(), t.end(), by_start);
    ChannelMatch m{channel, d.size(), t.size(), 0};
    std::vector<bool> taken(t.size(), false);
    for (const auto& e : d) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        if (taken[j]) continue;
        if (e.start_epoch <= t[j].end_epoch + tolerance && t[j].start_epoch <= e.end_epoch + tolerance) {
          taken[j] = true;
          ++m.matched;
          break;
        }
      }
    }
    result.push_back(m);
  }
  return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sleep monitoring from depth, color and audio recordings", "sleepmon"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Render a synthetic session and its ground truth");
  auto* preset_opt = generate_cmd->add_option("--preset", gen.preset,
                                              "posture_test, trouble_sleeping or successful_sleeping");
  auto* scenario_opt = generate_cmd->add_option("--scenario", gen.scenario_file, "Scenario file")->check(CLI::ExistingFile);
  preset_opt->excludes(scenario_opt);
  generate_cmd->add_option("--seed", gen.seed, "Noise and layout seed");
  generate_cmd->add_option("--duration", gen.duration, "Seconds (successful_sleeping only)");
  generate_cmd->add_option("--frame", gen.frame, "Frame size WxH");
  generate_cmd->add_option("--roi", gen.roi, "Region of interest X,Y,W,H");
  generate_cmd->add_option("--out", gen.out, "Session directory")->required();

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "Score a session and detect events");
  detect_cmd->add_option("--session", det.session, "Session directory")->required();
  detect_cmd->add_option("--config", det.config, "key=value overrides")->check(CLI::ExistingFile);
  detect_cmd->add_option("--out", det.out, "Output directory")->required();
  detect_cmd->add_option("--threads", det.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  detect_cmd->add_flag("--clips", det.clips, "Also write the media clip of every event");

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Sleep analysis report from detection output");
  report_cmd->add_option("--session", rep.session, "Session directory")->required();
  report_cmd->add_option("--detection", rep.detection, "Directory written by detect")->required();

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Precision and recall of an event log against ground truth");
  compare_cmd->add_option("--events", cmp.events, "Detected events.log")->required();
  compare_cmd->add_option("--truth", cmp.truth, "groundtruth.log")->required();
  compare_cmd->add_option("--tolerance", cmp.tolerance, "Epochs of slack on each side of a span");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (generate_cmd->parsed() && gen.preset.empty() && gen.scenario_file.empty()) {
      throw UsageError("generate needs --preset or --scenario");
    }
    if (generate_cmd->parsed()) return cmd_generate(gen, out);
    if (detect_cmd->parsed()) return cmd_detect(det, out);
    if (report_cmd->parsed()) return cmd_report(rep, out);
    return cmd_compare(cmp, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
}

}  // namespace sleepmon::cli
