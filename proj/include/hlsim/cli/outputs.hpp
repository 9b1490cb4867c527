// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// Run manifest plus writers that schema-check every file they produce.

#pragma once

#include <charconv>
#include <chrono>
#include <cstddef>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlsim/cli/config.hpp"
#include "hlsim/sim/config.hpp"

namespace hlsim::cli {

using Json = nlohmann::ordered_json;

#ifndef HLSIM_VERSION
#define HLSIM_VERSION "0.0.0"
#endif

inline constexpr const char* kToolVersion = HLSIM_VERSION;

/// Schema violation in a file the tool just wrote.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunManifest {
  std::string command;
  sim::SimConfig config;
  std::filesystem::path out_dir;
  std::string version = kToolVersion;
  std::string timestamp;

  static std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
  }

  Json to_json() const {
    return Json{{"tool", "hlsim"},
                {"version", version},
                {"command", command},
                {"out_dir", out_dir.string()},
                {"config", config_json(config)},
                {"config_text", serialize_config(config)},
                {"timestamp", timestamp}};
  }
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw OutputError("cannot read back " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

enum class Col { kInt, kReal, kBool, kText };

/// Checks the exact header and that every row has one well-formed cell per
/// column.
inline void validate_csv_text(const std::string& text, const std::string& header, const std::vector<Col>& cols,
                              const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) throw OutputError(name + ": bad CSV header");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::vector<std::string_view> cells;
    std::string_view s = line;
    for (std::size_t start = 0;;) {
      const auto comma = s.find(',', start);
      cells.push_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != cols.size()) {
      throw OutputError(name + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(cols.size()));
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto cell = cells[c];
      bool ok = !cell.empty();
      if (ok && cols[c] == Col::kInt) {
        long long v = 0;
        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        ok = ec == std::errc() && p == cell.data() + cell.size();
      } else if (ok && cols[c] == Col::kReal) {
        double v = 0;
        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        ok = ec == std::errc() && p == cell.data() + cell.size();
      } else if (ok && cols[c] == Col::kBool) {
        ok = cell == "0" || cell == "1";
      }
      if (!ok) throw OutputError(name + ": row " + std::to_string(row) + " column " + std::to_string(c + 1) + " malformed");
    }
  }
}

/// Required top-level keys and their JSON types.
struct JsonField {
  std::string key;
  Json::value_t type;
};

inline bool type_matches(const Json& v, Json::value_t t) {
  switch (t) {
    case Json::value_t::number_float: return v.is_number();
    case Json::value_t::number_unsigned:
    case Json::value_t::number_integer: return v.is_number_integer();
    default: return v.type() == t;
  }
}

inline void validate_json_fields(const Json& j, const std::vector<JsonField>& fields, const std::string& name) {
  if (!j.is_object()) throw OutputError(name + ": top level is not an object");
  for (const auto& f : fields) {
    if (!j.contains(f.key)) throw OutputError(name + ": missing '" + f.key + "'");
    if (!type_matches(j[f.key], f.type)) throw OutputError(name + ": '" + f.key + "' has the wrong type");
  }
}

inline void validate_config_echo(const Json& j, const std::string& name) {
  if (!j.contains("config") || !j["config"].is_object()) throw OutputError(name + ": missing config echo");
  for (const auto& k : config_keys()) {
    if (!j["config"].contains(k.section) || !j["config"][k.section].contains(k.key)) {
      throw OutputError(name + ": config echo lacks " + k.key);
    }
  }
}

using VT = Json::value_t;

inline void validate_episodes_json(const Json& j, const std::string& name) {
  validate_config_echo(j, name);
  validate_json_fields(j, {{"episodes", VT::array}, {"rounds", VT::array}}, name);
  for (const auto& e : j["episodes"]) {
    validate_json_fields(e,
                         {{"episode", VT::number_unsigned},
                          {"epsilon", VT::number_float},
                          {"total_rounds", VT::number_unsigned},
                          {"total_comm_cost", VT::number_float},
                          {"episode_return", VT::number_float},
                          {"reached_goal", VT::boolean},
                          {"visits", VT::array}},
                         name + " episode");
    if (e["visits"].size() != e["total_rounds"].get<std::size_t>() + 1) {
      throw OutputError(name + ": visit list length disagrees with total_rounds");
    }
  }
  for (const auto& r : j["rounds"]) {
    validate_json_fields(r,
                         {{"episode", VT::number_unsigned},
                          {"step", VT::number_unsigned},
                          {"node", VT::number_unsigned},
                          {"next_node", VT::number_unsigned},
                          {"val_acc", VT::number_float},
                          {"reward", VT::number_float},
                          {"distance", VT::number_float}},
                         name + " round");
    const double acc = r["val_acc"].get<double>();
    if (!(acc >= 0.0 && acc <= 1.0)) throw OutputError(name + ": val_acc outside [0, 1]");
  }
}

inline void validate_curve_json(const Json& j, const std::string& name) {
  validate_config_echo(j, name);
  validate_json_fields(j,
                       {{"method", VT::string},
                        {"reached_goal", VT::boolean},
                        {"early_stopped", VT::boolean},
                        {"final_accuracy", VT::number_float},
                        {"epochs", VT::array}},
                       name);
}

inline void validate_summary_json(const Json& j, const std::string& name) {
  validate_config_echo(j, name);
  validate_json_fields(
      j, {{"methods", VT::array}, {"rounds_reduction", VT::number_float}, {"comm_cost_reduction", VT::number_float}},
      name);
  for (const auto& m : j["methods"]) {
    validate_json_fields(m, {{"method", VT::string}, {"best", VT::array}, {"rounds", VT::object}, {"comm_cost", VT::object}},
                         name + " method");
    for (const char* q : {"p25", "p50", "p75", "mean"}) {
      if (!m["rounds"].contains(q) || !m["comm_cost"].contains(q)) throw OutputError(name + ": missing percentile");
    }
  }
}

inline void validate_manifest_json(const Json& j, const std::string& name) {
  validate_config_echo(j, name);
  validate_json_fields(j,
                       {{"tool", VT::string},
                        {"version", VT::string},
                        {"command", VT::string},
                        {"out_dir", VT::string},
                        {"config_text", VT::string},
                        {"timestamp", VT::string}},
                       name);
  parse_config_text(j["config_text"].get<std::string>());
}

/// Writes a JSON document, reads it back and runs `check` on the parsed copy.
template <typename Check>
void write_json_checked(const std::filesystem::path& p, const Json& doc, Check check) {
  write_text(p, doc.dump(2) + "\n");
  Json back;
  try {
    back = Json::parse(read_text(p));
  } catch (const Json::parse_error& e) {
    throw OutputError(p.string() + ": not valid JSON: " + e.what());
  }
  check(back, p.filename().string());
}

inline void write_csv_checked(const std::filesystem::path& p, const std::string& text, const std::string& header,
                              const std::vector<Col>& cols) {
  write_text(p, text);
  validate_csv_text(read_text(p), header, cols, p.filename().string());
}

}  // namespace hlsim::cli
