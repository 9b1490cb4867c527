// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/sim/episode.hpp"

namespace hlsim::sim {

/// Linear interpolation between closest ranks; q in [0, 1].
inline double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct BestEpisode {
  std::size_t episode = 0;
  double rounds = 0.0;
  double comm_cost = 0.0;
  bool reached_goal = false;
};

/// Fewest rounds among the last `last` episodes, ties broken by the lower
/// communication cost, then the earlier episode.
inline BestEpisode best_of_last(std::span<const EpisodeLog> logs, std::size_t last) {
  if (logs.empty()) throw std::invalid_argument("compare: experiment without episodes");
  if (last == 0) throw std::invalid_argument("compare: last must be positive");
  const std::size_t from = logs.size() > last ? logs.size() - last : 0;
  const EpisodeLog* best = nullptr;
  for (std::size_t i = from; i < logs.size(); ++i) {
    const auto& l = logs[i];
    if (best == nullptr || l.total_rounds < best->total_rounds ||
        (l.total_rounds == best->total_rounds && l.total_comm_cost < best->total_comm_cost)) {
      best = &l;
    }
  }
  return {best->episode, static_cast<double>(best->total_rounds), best->total_comm_cost, best->reached_goal};
}

struct Quartiles {
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double mean = 0.0;
};

inline Quartiles quartiles(const std::vector<double>& v) {
  Quartiles q;
  q.p25 = percentile(v, 0.25);
  q.p50 = percentile(v, 0.50);
  q.p75 = percentile(v, 0.75);
  double s = 0.0;
  for (double x : v) s += x;
  q.mean = s / static_cast<double>(v.size());
  return q;
}

struct MethodSummary {
  std::string method;
  std::vector<BestEpisode> best;  // one per experiment
  Quartiles rounds;
  Quartiles comm_cost;
};

struct ComparisonSummary {
  MethodSummary hl;
  MethodSummary random;
  double rounds_reduction = 0.0;     // (random - hl) / random on the medians
  double comm_cost_reduction = 0.0;
};

/// (random - hl) / random; zero when both are zero.
inline double relative_reduction(double random, double hl) {
  if (random == 0.0) return hl == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return (random - hl) / random;
}

inline MethodSummary summarize(const std::string& method, std::span<const std::vector<EpisodeLog>> experiments,
                               std::size_t last) {
  if (experiments.empty()) throw std::invalid_argument("compare: no " + method + " experiments");
  MethodSummary m;
  m.method = method;
  std::vector<double> rounds, cost;
  for (const auto& e : experiments) {
    m.best.push_back(best_of_last(e, last));
    rounds.push_back(m.best.back().rounds);
    cost.push_back(m.best.back().comm_cost);
  }
  m.rounds = quartiles(rounds);
  m.comm_cost = quartiles(cost);
  return m;
}

/// Each inner vector holds one experiment's episodes in order.
inline ComparisonSummary compare(std::span<const std::vector<EpisodeLog>> hl,
                                 std::span<const std::vector<EpisodeLog>> random, std::size_t last = 5) {
  ComparisonSummary s;
  s.hl = summarize("hl", hl, last);
  s.random = summarize("random", random, last);
  s.rounds_reduction = relative_reduction(s.random.rounds.p50, s.hl.rounds.p50);
  s.comm_cost_reduction = relative_reduction(s.random.comm_cost.p50, s.hl.comm_cost.p50);
  return s;
}

}  // namespace hlsim::sim
