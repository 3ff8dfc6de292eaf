#include "sleepmon/config.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "sleepmon/error.hpp"
#include "sleepmon/keyvalue.hpp"

namespace sleepmon {
namespace {

struct Key {
  std::string_view name;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

// Shared mixture settings are written to both channel models.
template <typename T>
void set_both(PipelineConfig& c, T GmmParams::*field, T value) {
  c.depth_model.*field = value;
  c.luma_model.*field = value;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    const auto real = [&t](std::string_view name, auto field_of) {
      t.push_back({name,
                   [name, field_of](PipelineConfig& c, std::string_view v) { field_of(c) = parse_double(name, v); },
                   [field_of](const PipelineConfig& c) {
                     PipelineConfig copy = c;
                     return fixed(field_of(copy), 6);
                   }});
    };
    real("depth_threshold", [](PipelineConfig& c) -> double& { return c.detector.depth_threshold; });
    real("color_threshold", [](PipelineConfig& c) -> double& { return c.detector.color_threshold; });
    real("audio_threshold", [](PipelineConfig& c) -> double& { return c.detector.audio_threshold; });
    real("burn_in_seconds", [](PipelineConfig& c) -> double& { return c.detector.burn_in_seconds; });
    real("theta_tiny", [](PipelineConfig& c) -> double& { return c.classes.tiny; });
    real("theta_limb", [](PipelineConfig& c) -> double& { return c.classes.limb; });
    real("theta_full", [](PipelineConfig& c) -> double& { return c.classes.full; });
    real("theta_exit", [](PipelineConfig& c) -> double& { return c.classes.exit; });
    real("theta_absent", [](PipelineConfig& c) -> double& { return c.classes.absent; });
    t.push_back({"min_absent_epochs",
                 [](PipelineConfig& c, std::string_view v) {
                   c.classes.min_absent_epochs = static_cast<int>(parse_integer("min_absent_epochs", v));
                 },
                 [](const PipelineConfig& c) { return std::to_string(c.classes.min_absent_epochs); }});
    t.push_back({"gmm_components",
                 [](PipelineConfig& c, std::string_view v) {
                   set_both(c, &GmmParams::components, static_cast<int>(parse_integer("gmm_components", v)));
                 },
                 [](const PipelineConfig& c) { return std::to_string(c.depth_model.components); }});
    const auto shared = [&t](std::string_view name, double GmmParams::*field) {
      t.push_back({name, [name, field](PipelineConfig& c, std::string_view v) { set_both(c, field, parse_double(name, v)); },
                   [field](const PipelineConfig& c) { return fixed(c.depth_model.*field, 6); }});
    };
    shared("gmm_learning_rate", &GmmParams::learning_rate);
    shared("gmm_match_k", &GmmParams::match_k);
    shared("gmm_background_fraction", &GmmParams::background_fraction);
    real("gmm_depth_initial_variance", [](PipelineConfig& c) -> double& { return c.depth_model.initial_variance; });
    real("gmm_luma_initial_variance", [](PipelineConfig& c) -> double& { return c.luma_model.initial_variance; });
    shared("gmm_variance_floor", &GmmParams::variance_floor);
    shared("gmm_replacement_weight", &GmmParams::replacement_weight);
    return t;
  }();
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  detector.validate();
  classes.validate();
  depth_model.validate();
  luma_model.validate();
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig config;
  std::set<std::string> seen;
  KeyValues pairs;
  try {
    pairs = parse_key_values(text);
  } catch (const Error& e) {
    throw Error(Errc::invalid_parameter, std::string("invalid parameter: ") + e.what());
  }
  for (const auto& [name, value] : pairs) {
    const Key* key = nullptr;
    for (const auto& k : keys()) {
      if (k.name == name) key = &k;
    }
    if (!key) throw Error(Errc::invalid_parameter, "invalid parameter: unknown key '" + name + "'");
    if (!seen.insert(name).second) throw Error(Errc::invalid_parameter, "invalid parameter: repeated key '" + name + "'");
    try {
      key->set(config, value);
    } catch (const Error& e) {
      throw Error(Errc::invalid_parameter, std::string("invalid parameter: ") + e.what());
    }
  }
  config.validate();
  return config;
}

std::string format_config(const PipelineConfig& config) {
  std::ostringstream out;
  for (const auto& k : keys()) out << k.name << '=' << k.get(config) << '\n';
  return out.str();
}

}  // namespace sleepmon
