// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// Flat TOML-subset config: `[section]` headers, `key = value` lines, `#`
// comments. Values are integers, floats, booleans or double-quoted strings.
// Keys are unique across sections, so a key may also appear before the
// first header.

#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlsim/error.hpp"
#include "hlsim/sim/config.hpp"

namespace hlsim::cli {

using ConfigValue = std::variant<std::int64_t, double, bool, std::string>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string describe(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return "integer";
    case 1: return "float";
    case 2: return "boolean";
    default: return "string";
  }
}

}  // namespace detail

struct KeySpec {
  std::string section;
  std::string key;
  std::function<ConfigValue(const sim::SimConfig&)> get;
  std::function<void(sim::SimConfig&, const ConfigValue&)> set;  // throws ConfigError naming the key
};

namespace detail {

template <typename Field>
KeySpec count_key(std::string section, std::string key, Field field) {
  return {section, key,
          [field](const sim::SimConfig& c) { return ConfigValue(static_cast<std::int64_t>(field(const_cast<sim::SimConfig&>(c)))); },
          [field, key](sim::SimConfig& c, const ConfigValue& v) {
            const auto* i = std::get_if<std::int64_t>(&v);
            if (i == nullptr) throw ConfigError(key + ": expected an integer, got a " + describe(v));
            if (*i < 0) throw ConfigError(key + ": must be non-negative");
            field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(*i);
          }};
}

template <typename Field>
KeySpec real_key(std::string section, std::string key, Field field) {
  return {section, key, [field](const sim::SimConfig& c) { return ConfigValue(field(const_cast<sim::SimConfig&>(c))); },
          [field, key](sim::SimConfig& c, const ConfigValue& v) {
            if (const auto* d = std::get_if<double>(&v)) {
              field(c) = *d;
            } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
              field(c) = static_cast<double>(*i);
            } else {
              throw ConfigError(key + ": expected a number, got a " + describe(v));
            }
          }};
}

template <typename Field>
KeySpec bool_key(std::string section, std::string key, Field field) {
  return {section, key, [field](const sim::SimConfig& c) { return ConfigValue(field(const_cast<sim::SimConfig&>(c))); },
          [field, key](sim::SimConfig& c, const ConfigValue& v) {
            const auto* b = std::get_if<bool>(&v);
            if (b == nullptr) throw ConfigError(key + ": expected true or false, got a " + describe(v));
            field(c) = *b;
          }};
}

template <typename Field>
KeySpec string_key(std::string section, std::string key, Field field) {
  return {section, key, [field](const sim::SimConfig& c) { return ConfigValue(field(const_cast<sim::SimConfig&>(c))); },
          [field, key](sim::SimConfig& c, const ConfigValue& v) {
            const auto* s = std::get_if<std::string>(&v);
            if (s == nullptr) throw ConfigError(key + ": expected a quoted string, got a " + describe(v));
            field(c) = *s;
          }};
}

// The seed is a full 64-bit value; it is stored as its two's-complement
// image in the integer variant.
inline KeySpec seed_key(std::string section, std::string key, std::uint64_t sim::SimConfig::*member) {
  return {section, key,
          [member](const sim::SimConfig& c) { return ConfigValue(static_cast<std::int64_t>(c.*member)); },
          [member, key](sim::SimConfig& c, const ConfigValue& v) {
            const auto* i = std::get_if<std::int64_t>(&v);
            if (i == nullptr) throw ConfigError(key + ": expected an integer, got a " + describe(v));
            c.*member = static_cast<std::uint64_t>(*i);
          }};
}

}  // namespace detail

/// Every recognised key, in serialization order.
inline const std::vector<KeySpec>& config_keys() {
  using namespace detail;
  using C = sim::SimConfig;
  static const std::vector<KeySpec> keys = {
      count_key("experiment", "nodes", [](C& c) -> auto& { return c.nodes; }),
      real_key("experiment", "alpha", [](C& c) -> auto& { return c.alpha; }),
      count_key("experiment", "samples_per_node", [](C& c) -> auto& { return c.samples_per_node; }),
      real_key("experiment", "goal_acc", [](C& c) -> auto& { return c.agent.goal_acc; }),
      count_key("experiment", "max_steps", [](C& c) -> auto& { return c.agent.max_steps; }),
      count_key("experiment", "episodes", [](C& c) -> auto& { return c.agent.episodes; }),
      count_key("experiment", "starter_node", [](C& c) -> auto& { return c.starter_node; }),
      real_key("experiment", "beta", [](C& c) -> auto& { return c.beta; }),
      seed_key("experiment", "seed", &C::seed),
      seed_key("experiment", "distance_seed", &C::distance_seed),
      string_key("experiment", "distance_matrix", [](C& c) -> auto& { return c.distance_matrix; }),
      count_key("experiment", "experiments", [](C& c) -> auto& { return c.experiments; }),
      count_key("experiment", "last_episodes", [](C& c) -> auto& { return c.last_episodes; }),
      count_key("experiment", "jobs", [](C& c) -> auto& { return c.jobs; }),

      {"data", "dataset",
       [](const C& c) { return ConfigValue(std::string(c.data.source == sim::DatasetSource::kMnist ? "mnist" : "synthetic")); },
       [](C& c, const ConfigValue& v) {
         const auto* s = std::get_if<std::string>(&v);
         if (s != nullptr && *s == "mnist") {
           c.data.source = sim::DatasetSource::kMnist;
         } else if (s != nullptr && *s == "synthetic") {
           c.data.source = sim::DatasetSource::kSynthetic;
         } else {
           throw ConfigError("dataset: expected \"mnist\" or \"synthetic\"");
         }
       }},
      string_key("data", "train_images", [](C& c) -> auto& { return c.data.train_images; }),
      string_key("data", "train_labels", [](C& c) -> auto& { return c.data.train_labels; }),
      string_key("data", "val_images", [](C& c) -> auto& { return c.data.val_images; }),
      string_key("data", "val_labels", [](C& c) -> auto& { return c.data.val_labels; }),
      {"data", "classes", [](const C& c) { return ConfigValue(static_cast<std::int64_t>(c.data.classes)); },
       [](C& c, const ConfigValue& v) {
         const auto* i = std::get_if<std::int64_t>(&v);
         if (i == nullptr) throw ConfigError("classes: expected an integer, got a " + detail::describe(v));
         if (*i < 2 || *i > 256) throw ConfigError("classes: must lie in [2, 256]");
         c.data.classes = static_cast<int>(*i);
       }},
      count_key("data", "train_limit", [](C& c) -> auto& { return c.data.train_limit; }),
      count_key("data", "val_limit", [](C& c) -> auto& { return c.data.val_limit; }),
      bool_key("data", "disjoint", [](C& c) -> auto& { return c.data.disjoint; }),
      count_key("data", "synthetic_train_per_class", [](C& c) -> auto& { return c.data.synthetic_train_per_class; }),
      count_key("data", "synthetic_val_per_class", [](C& c) -> auto& { return c.data.synthetic_val_per_class; }),
      real_key("data", "synthetic_noise", [](C& c) -> auto& { return c.data.synthetic_noise; }),

      count_key("training", "local_epochs", [](C& c) -> auto& { return c.training.epochs; }),
      count_key("training", "local_batch_size", [](C& c) -> auto& { return c.training.batch_size; }),
      real_key("training", "learning_rate", [](C& c) -> auto& { return c.training.learning_rate; }),
      count_key("training", "standalone_patience", [](C& c) -> auto& { return c.training.standalone_patience; }),
      count_key("training", "standalone_max_epochs", [](C& c) -> auto& { return c.training.standalone_max_epochs; }),
      count_key("training", "centralized_max_epochs", [](C& c) -> auto& { return c.training.centralized_max_epochs; }),

      real_key("agent", "discount", [](C& c) -> auto& { return c.agent.discount; }),
      count_key("agent", "dqn_batch_size", [](C& c) -> auto& { return c.agent.dqn_batch; }),
      count_key("agent", "dqn_epochs", [](C& c) -> auto& { return c.agent.dqn_epochs; }),
      real_key("agent", "dqn_learning_rate", [](C& c) -> auto& { return c.agent.dqn_learning_rate; }),
      real_key("agent", "epsilon_start", [](C& c) -> auto& { return c.agent.epsilon_start; }),
      real_key("agent", "epsilon_decay", [](C& c) -> auto& { return c.agent.epsilon_decay; }),
      real_key("agent", "reward_base", [](C& c) -> auto& { return c.agent.reward_base; }),
      count_key("agent", "replay_capacity", [](C& c) -> auto& { return c.agent.replay_capacity; }),
      count_key("agent", "replay_min", [](C& c) -> auto& { return c.agent.replay_min; }),
      {"agent", "dqn_update",
       [](const C& c) {
         return ConfigValue(std::string(c.agent.cadence == policy::UpdateCadence::kPerStep ? "step" : "episode"));
       },
       [](C& c, const ConfigValue& v) {
         const auto* s = std::get_if<std::string>(&v);
         if (s != nullptr && *s == "step") {
           c.agent.cadence = policy::UpdateCadence::kPerStep;
         } else if (s != nullptr && *s == "episode") {
           c.agent.cadence = policy::UpdateCadence::kPerEpisode;
         } else {
           throw ConfigError("dqn_update: expected \"step\" or \"episode\"");
         }
       }},

      count_key("embed", "embed_nodes", [](C& c) -> auto& { return c.embed.nodes; }),
      count_key("embed", "embed_batch_size", [](C& c) -> auto& { return c.embed.batch_size; }),
      count_key("embed", "embed_epochs", [](C& c) -> auto& { return c.embed.epochs; }),
      count_key("embed", "embed_samples_per_node", [](C& c) -> auto& { return c.embed.samples_per_node; }),
  };
  return keys;
}

inline const KeySpec* find_key(std::string_view key) {
  for (const auto& k : config_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

/// Parses one literal. Integers are decimal; anything with '.', 'e' or 'E'
/// is a float.
inline ConfigValue parse_value(std::string_view text, std::size_t line) {
  auto fail = [line](const std::string& why) { return ConfigError("line " + std::to_string(line) + ": " + why); };
  if (text.empty()) throw fail("missing value");
  if (text.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < text.size() && text[i] != '"'; ++i) {
      if (text[i] == '\\') {
        if (++i == text.size()) break;
        if (text[i] != '"' && text[i] != '\\') throw fail("unsupported escape \\" + std::string(1, text[i]));
      }
      out += text[i];
    }
    if (i >= text.size()) throw fail("unterminated string");
    if (!detail::trim(text.substr(i + 1)).empty()) throw fail("unexpected text after string");
    return out;
  }
  if (text == "true") return true;
  if (text == "false") return false;
  const char* b = text.data();
  const char* e = b + text.size();
  if (text.find_first_of(".eE") == std::string_view::npos) {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(*b == '+' ? b + 1 : b, e, i);
    if (ec == std::errc() && p == e) return i;
    if (ec == std::errc::result_out_of_range && *b != '-') {
      std::uint64_t u = 0;  // large seeds
      auto [pu, ecu] = std::from_chars(*b == '+' ? b + 1 : b, e, u);
      if (ecu == std::errc() && pu == e) return static_cast<std::int64_t>(u);
    }
  } else {
    double d = 0.0;
    auto [p, ec] = std::from_chars(*b == '+' ? b + 1 : b, e, d);
    if (ec == std::errc() && p == e) return d;
  }
  throw fail("cannot parse value '" + std::string(text) + "'");
}

/// Parses config text on top of the defaults and validates the result.
inline sim::SimConfig parse_config_text(const std::string& text) {
  sim::SimConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  std::size_t line = 0;
  auto fail = [&line](const std::string& why) { return ConfigError("line " + std::to_string(line) + ": " + why); };
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (line == 1 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
    // Strip a comment unless the '#' sits inside a quoted string.
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && quoted) {
        ++i;
      } else if (s[i] == '"') {
        quoted = !quoted;
      } else if (s[i] == '#' && !quoted) {
        s = s.substr(0, i);
        break;
      }
    }
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw fail("malformed section header");
      section = std::string(detail::trim(s.substr(1, s.size() - 2)));
      bool known = false;
      for (const auto& k : config_keys()) known = known || k.section == section;
      if (!known) throw fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw fail("expected 'key = value'");
    const std::string key(detail::trim(s.substr(0, eq)));
    if (key.empty()) throw fail("missing key");
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) throw fail("unknown key '" + key + "'");
    if (!section.empty() && spec->section != section) {
      throw fail("key '" + key + "' belongs to [" + spec->section + "], not [" + section + "]");
    }
    if (!seen.insert(key).second) throw fail("duplicate key '" + key + "'");
    const auto value = parse_value(detail::trim(s.substr(eq + 1)), line);
    try {
      spec->set(cfg, value);
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

inline sim::SimConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline std::string format_value(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return std::to_string(std::get<std::int64_t>(v));
    case 1: return detail::format_double(std::get<double>(v));
    case 2: return std::get<bool>(v) ? "true" : "false";
    default: return detail::quote(std::get<std::string>(v));
  }
}

/// Every key, grouped by section; parse_config_text of the result yields an
/// equal config.
inline std::string serialize_config(const sim::SimConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    const auto v = k.get(cfg);
    const bool is_seed = k.key == "seed" || k.key == "distance_seed";
    out += k.key + " = " +
           (is_seed ? std::to_string(static_cast<std::uint64_t>(std::get<std::int64_t>(v))) : format_value(v)) + "\n";
  }
  return out;
}

/// The config as a JSON object of sections.
inline nlohmann::ordered_json config_json(const sim::SimConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& k : config_keys()) {
    const auto v = k.get(cfg);
    auto& slot = j[k.section][k.key];
    switch (v.index()) {
      case 0:
        if (k.key == "seed" || k.key == "distance_seed") {
          slot = static_cast<std::uint64_t>(std::get<std::int64_t>(v));
        } else {
          slot = std::get<std::int64_t>(v);
        }
        break;
      case 1: slot = std::get<double>(v); break;
      case 2: slot = std::get<bool>(v); break;
      default: slot = std::get<std::string>(v); break;
    }
  }
  return j;
}

}  // namespace hlsim::cli
