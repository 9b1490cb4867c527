// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// JSON and CSV renderings of run results. Doubles are written in their
// shortest round-trip form so identical runs give identical bytes.

#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlsim/sim/compare.hpp"
#include "hlsim/sim/episode.hpp"
#include "hlsim/sim/runs.hpp"
#include "hlsim/state/system_state.hpp"

namespace hlsim::sim {

using Json = nlohmann::ordered_json;

inline std::string fmt(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

inline Json round_json(const RoundRecord& r, std::size_t episode) {
  return Json{{"episode", episode},       {"step", r.step},         {"node", r.node},
              {"next_node", r.next_node}, {"val_acc", r.val_acc},   {"val_loss", r.val_loss},
              {"reward", r.reward},       {"distance", r.distance}, {"greedy", r.greedy}};
}

inline Json episode_json(const EpisodeLog& e) {
  Json j{{"episode", e.episode},
         {"epsilon", e.epsilon},
         {"total_rounds", e.total_rounds},
         {"total_comm_cost", e.total_comm_cost},
         {"episode_return", e.episode_return},
         {"reached_goal", e.reached_goal},
         {"visits", e.visits}};
  j["dqn_loss"] = e.dqn_loss ? Json(*e.dqn_loss) : Json(nullptr);
  return j;
}

/// {config, episodes, rounds}; rounds carry their episode index.
inline Json episodes_document(const Json& config, std::span<const EpisodeLog> logs) {
  Json doc{{"config", config}, {"episodes", Json::array()}, {"rounds", Json::array()}};
  for (const auto& e : logs) {
    doc["episodes"].push_back(episode_json(e));
    for (const auto& r : e.rounds) doc["rounds"].push_back(round_json(r, e.episode));
  }
  return doc;
}

inline constexpr const char* kRoundsCsvHeader = "episode,step,node,next_node,val_acc,reward,distance";
inline constexpr const char* kEpisodesCsvHeader = "episode,epsilon,episode_return,total_rounds,total_comm_cost,reached_goal";
inline constexpr const char* kCurveCsvHeader = "method,epoch,train_loss,val_acc,val_loss";
inline constexpr const char* kBestCsvHeader = "method,experiment,episode,rounds,comm_cost,reached_goal";
inline constexpr const char* kEmbeddingCsvHeader = "node_id,main_class,x,y";

inline std::string rounds_csv(std::span<const EpisodeLog> logs) {
  std::string out = std::string(kRoundsCsvHeader) + "\n";
  for (const auto& e : logs) {
    for (const auto& r : e.rounds) {
      out += std::to_string(e.episode) + "," + std::to_string(r.step) + "," + std::to_string(r.node) + "," +
             std::to_string(r.next_node) + "," + fmt(r.val_acc) + "," + fmt(r.reward) + "," + fmt(r.distance) + "\n";
    }
  }
  return out;
}

inline std::string episodes_csv(std::span<const EpisodeLog> logs) {
  std::string out = std::string(kEpisodesCsvHeader) + "\n";
  for (const auto& e : logs) {
    out += std::to_string(e.episode) + "," + fmt(e.epsilon) + "," + fmt(e.episode_return) + "," +
           std::to_string(e.total_rounds) + "," + fmt(e.total_comm_cost) + "," + (e.reached_goal ? "1" : "0") + "\n";
  }
  return out;
}

inline Json curve_document(const Json& config, const TrainingCurve& c) {
  Json doc{{"config", config},
           {"method", c.method},
           {"training_samples", c.training_samples},
           {"reached_goal", c.reached_goal},
           {"early_stopped", c.early_stopped},
           {"final_accuracy", c.final_accuracy()},
           {"epochs", Json::array()}};
  for (const auto& e : c.epochs) {
    doc["epochs"].push_back(
        Json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_acc", e.val_acc}, {"val_loss", e.val_loss}});
  }
  return doc;
}

inline std::string curve_csv(const TrainingCurve& c) {
  std::string out = std::string(kCurveCsvHeader) + "\n";
  for (const auto& e : c.epochs) {
    out += c.method + "," + std::to_string(e.epoch) + "," + fmt(e.train_loss) + "," + fmt(e.val_acc) + "," +
           fmt(e.val_loss) + "\n";
  }
  return out;
}

inline Json quartiles_json(const Quartiles& q) {
  return Json{{"p25", q.p25}, {"p50", q.p50}, {"p75", q.p75}, {"mean", q.mean}};
}

inline Json method_json(const MethodSummary& m) {
  Json best = Json::array();
  for (std::size_t k = 0; k < m.best.size(); ++k) {
    const auto& b = m.best[k];
    best.push_back(Json{{"experiment", k},
                        {"episode", b.episode},
                        {"rounds", b.rounds},
                        {"comm_cost", b.comm_cost},
                        {"reached_goal", b.reached_goal}});
  }
  return Json{{"method", m.method},
              {"best", best},
              {"rounds", quartiles_json(m.rounds)},
              {"comm_cost", quartiles_json(m.comm_cost)}};
}

inline Json summary_document(const Json& config, const ComparisonSummary& s) {
  return Json{{"config", config},
              {"methods", Json::array({method_json(s.hl), method_json(s.random)})},
              {"rounds_reduction", s.rounds_reduction},
              {"comm_cost_reduction", s.comm_cost_reduction}};
}

inline std::string best_csv(const ComparisonSummary& s) {
  std::string out = std::string(kBestCsvHeader) + "\n";
  for (const auto* m : {&s.hl, &s.random}) {
    for (std::size_t k = 0; k < m->best.size(); ++k) {
      const auto& b = m->best[k];
      out += m->method + "," + std::to_string(k) + "," + std::to_string(b.episode) + "," + fmt(b.rounds) + "," +
             fmt(b.comm_cost) + "," + (b.reached_goal ? "1" : "0") + "\n";
    }
  }
  return out;
}

inline std::string embedding_csv(std::span<const state::EmbeddingRow> rows) {
  std::string out = std::string(kEmbeddingCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.node_id) + "," + std::to_string(r.main_class) + "," + fmt(r.x) + "," + fmt(r.y) + "\n";
  }
  return out;
}

}  // namespace hlsim::sim
