// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// hlsim: train, apply and compare node-selection policies for decentralized
// learning, and run the baselines.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hlsim/cli/config.hpp"
#include "hlsim/cli/outputs.hpp"
#include "hlsim/error.hpp"
#include "hlsim/policy/checkpoint.hpp"
#include "hlsim/runtime.hpp"
#include "hlsim/sim/environment.hpp"
#include "hlsim/sim/experiments.hpp"
#include "hlsim/sim/export.hpp"
#include "hlsim/sim/runs.hpp"

namespace fs = std::filesystem;
using namespace hlsim;
using cli::Col;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string method;
  std::string checkpoint;
  std::optional<std::size_t> nodes;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> epochs;
  bool quiet = false;
};

const std::vector<Col> kRoundCols = {Col::kInt, Col::kInt, Col::kInt, Col::kInt, Col::kReal, Col::kReal, Col::kReal};
const std::vector<Col> kEpisodeCols = {Col::kInt, Col::kReal, Col::kReal, Col::kInt, Col::kReal, Col::kBool};
const std::vector<Col> kCurveCols = {Col::kText, Col::kInt, Col::kReal, Col::kReal, Col::kReal};
const std::vector<Col> kBestCols = {Col::kText, Col::kInt, Col::kInt, Col::kReal, Col::kReal, Col::kBool};
const std::vector<Col> kEmbedCols = {Col::kInt, Col::kInt, Col::kReal, Col::kReal};

sim::SimConfig load_config(const Options& o) {
  sim::SimConfig cfg = o.config_path.empty() ? cli::parse_config_text("") : cli::parse_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

cli::Json begin_run(const std::string& command, const sim::SimConfig& cfg, const Options& o) {
  fs::create_directories(o.out);
  cli::RunManifest m{command, cfg, fs::path(o.out), cli::kToolVersion, cli::RunManifest::now_utc()};
  cli::write_json_checked(fs::path(o.out) / "manifest.json", m.to_json(), cli::validate_manifest_json);
  return cli::config_json(cfg);
}

void progress(const Options& o, const std::string& msg) {
  if (!o.quiet) std::cerr << msg << std::endl;
}

void write_episode_outputs(const fs::path& dir, const std::string& stem, const cli::Json& config,
                           const std::vector<sim::EpisodeLog>& logs) {
  cli::write_json_checked(dir / (stem + ".json"), sim::episodes_document(config, logs), cli::validate_episodes_json);
  cli::write_csv_checked(dir / (stem + "_episodes.csv"), sim::episodes_csv(logs), sim::kEpisodesCsvHeader,
                         kEpisodeCols);
  cli::write_csv_checked(dir / (stem + "_rounds.csv"), sim::rounds_csv(logs), sim::kRoundsCsvHeader, kRoundCols);
}

std::string episode_line(const sim::EpisodeLog& e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "episode %zu: rounds=%zu cost=%.4f return=%.4f eps=%.4f goal=%s", e.episode,
                e.total_rounds, e.total_comm_cost, e.episode_return, e.epsilon, e.reached_goal ? "yes" : "no");
  return buf;
}

int cmd_train(const Options& o) {
  const auto cfg = load_config(o);
  const auto env = sim::build_environment(cfg);
  const auto config = begin_run("train", cfg, o);
  auto run = sim::train_policy(env, cfg, cfg.seed, [&](const sim::EpisodeLog& e) { progress(o, episode_line(e)); });
  const fs::path dir(o.out);
  policy::save_checkpoint(run.q, dir / "policy.ckpt");
  (void)policy::load_checkpoint(dir / "policy.ckpt");
  write_episode_outputs(dir, "train", config, run.logs);
  return kExitOk;
}

int cmd_apply(const Options& o) {
  if (o.checkpoint.empty()) throw ConfigError("apply: --checkpoint is required");
  const auto cfg = load_config(o);
  const auto q = policy::load_checkpoint(o.checkpoint);
  if (q.nodes() != cfg.nodes) {
    throw ConfigError("apply: checkpoint " + o.checkpoint + " was trained for " + std::to_string(q.nodes()) +
                      " nodes, config has " + std::to_string(cfg.nodes));
  }
  const auto env = sim::build_environment(cfg);
  const auto config = begin_run("apply", cfg, o);
  const auto log = sim::apply_policy(env, cfg, q, cfg.seed);
  progress(o, episode_line(log));
  write_episode_outputs(fs::path(o.out), "apply", config, {log});
  return kExitOk;
}

int cmd_baseline(const Options& o) {
  if (o.method != "random" && o.method != "standalone" && o.method != "centralized") {
    throw ConfigError("baseline: --method must be random, standalone or centralized (got '" + o.method + "')");
  }
  const auto cfg = load_config(o);
  const auto env = sim::build_environment(cfg);
  const auto config = begin_run("baseline " + o.method, cfg, o);
  const fs::path dir(o.out);
  if (o.method == "random") {
    sim::RunStreams streams(cfg.seed);
    const auto log = sim::run_baseline_random(env, cfg, streams, 0);
    progress(o, episode_line(log));
    write_episode_outputs(dir, "random", config, {log});
    return kExitOk;
  }
  const auto curve = o.method == "standalone" ? sim::run_standalone(env, cfg, cfg.seed)
                                              : sim::run_centralized(env, cfg, cfg.seed);
  progress(o, o.method + ": " + std::to_string(curve.epochs.size()) + " epochs, final accuracy " +
                  sim::fmt(curve.final_accuracy()));
  cli::write_json_checked(dir / (o.method + ".json"), sim::curve_document(config, curve), cli::validate_curve_json);
  cli::write_csv_checked(dir / (o.method + ".csv"), sim::curve_csv(curve), sim::kCurveCsvHeader, kCurveCols);
  return kExitOk;
}

int cmd_compare(const Options& o) {
  const auto cfg = load_config(o);
  const auto env = sim::build_environment(cfg);
  const auto config = begin_run("compare", cfg, o);
  const auto results =
      sim::run_experiments(env, cfg, [&](std::size_t k) { progress(o, "experiment " + std::to_string(k) + " done"); });
  const fs::path dir(o.out);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const fs::path sub = dir / ("experiment_" + std::to_string(k));
    fs::create_directories(sub);
    write_episode_outputs(sub, "hl", config, results[k].hl);
    write_episode_outputs(sub, "random", config, results[k].random);
  }
  const auto summary = sim::compare_experiments(results, cfg.last_episodes);
  cli::write_json_checked(dir / "summary.json", sim::summary_document(config, summary), cli::validate_summary_json);
  cli::write_csv_checked(dir / "best.csv", sim::best_csv(summary), sim::kBestCsvHeader, kBestCols);
  progress(o, "rounds reduction " + sim::fmt(summary.rounds_reduction) + ", comm cost reduction " +
                  sim::fmt(summary.comm_cost_reduction));
  return kExitOk;
}

int cmd_embed(const Options& o) {
  auto cfg = load_config(o);
  if (o.nodes) cfg.embed.nodes = *o.nodes;
  if (o.batch) cfg.embed.batch_size = *o.batch;
  if (o.epochs) cfg.embed.epochs = *o.epochs;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  auto [pool, val] = sim::load_datasets(cfg);
  const auto config = begin_run("embed", cfg, o);
  const auto rows = sim::run_embedding(pool, cfg);
  const auto dist = sim::cluster_distances(rows);
  const fs::path dir(o.out);
  cli::write_csv_checked(dir / "embedding.csv", sim::embedding_csv(rows), sim::kEmbeddingCsvHeader, kEmbedCols);
  cli::Json doc{{"config", config},
                {"nodes", rows.size()},
                {"mean_intra_class_distance", dist.intra},
                {"mean_inter_class_distance", dist.inter}};
  cli::write_json_checked(dir / "embedding.json", doc, [](const cli::Json& j, const std::string& name) {
    cli::validate_config_echo(j, name);
    cli::validate_json_fields(j,
                              {{"nodes", cli::VT::number_unsigned},
                               {"mean_intra_class_distance", cli::VT::number_float},
                               {"mean_inter_class_distance", cli::VT::number_float}},
                              name);
  });
  progress(o, "intra " + sim::fmt(dist.intra) + ", inter " + sim::fmt(dist.inter));
  return kExitOk;
}

int cmd_distances(const Options& o) {
  const auto cfg = load_config(o);
  const auto m = sim::distances_for(cfg);
  begin_run("distances", cfg, o);
  const fs::path p = fs::path(o.out) / "distances.csv";
  cli::write_text(p, topology::to_csv(m));
  (void)topology::load_csv(p, cfg.beta);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  CLI::App app{"Decentralized learning with a learned node-selection policy"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Config file (TOML subset)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the master seed");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_flag("--quiet", o.quiet, "No progress output");
  };

  auto* train = app.add_subcommand("train", "Train a policy; writes a checkpoint and episode logs");
  auto* apply = app.add_subcommand("apply", "Greedy rollout of a trained policy");
  auto* baseline = app.add_subcommand("baseline", "Run a baseline method");
  auto* compare = app.add_subcommand("compare", "Repeated paired experiments, learned vs random policy");
  auto* embed = app.add_subcommand("embed", "2-D embedding of independently trained node models");
  auto* distances = app.add_subcommand("distances", "Write the node distance matrix");
  for (auto* s : {train, apply, baseline, compare, embed, distances}) common(s);
  apply->add_option("--checkpoint", o.checkpoint, "Policy checkpoint")->required();
  baseline->add_option("--method", o.method, "random | standalone | centralized")->required();
  embed->add_option("--nodes", o.nodes, "Number of nodes");
  embed->add_option("--batch", o.batch, "Local batch size");
  embed->add_option("--epochs", o.epochs, "Local epochs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(o);
    if (*apply) return cmd_apply(o);
    if (*baseline) return cmd_baseline(o);
    if (*compare) return cmd_compare(o);
    if (*embed) return cmd_embed(o);
    if (*distances) return cmd_distances(o);
  } catch (const ConfigError& e) {
    std::cerr << "hlsim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "hlsim: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "hlsim: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
