// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// Policy checkpoint: a versioned text header followed by the flat Q-network
// weights as hex floats (bit-exact round trip).

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hlsim/error.hpp"
#include "hlsim/policy/agent.hpp"

namespace hlsim::policy {

inline constexpr const char* kCheckpointMagic = "hlsim-policy";
inline constexpr int kCheckpointVersion = 1;
/// State encoder the policy was trained against: PCA refit on the N slot
/// vectors every step, K = N.
inline constexpr const char* kPcaProtocol = "slot-refit-k-eq-n";

inline std::string serialize_checkpoint(const QNetwork& q) {
  std::ostringstream os;
  os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  os << "nodes " << q.spec.outputs << '\n';
  os << "input_dim " << q.spec.input_dim << '\n';
  os << "hidden " << q.spec.hidden1 << ' ' << q.spec.hidden2 << '\n';
  os << "pca_protocol " << kPcaProtocol << '\n';
  os << "params " << q.weights.size() << '\n';
  char buf[64];
  for (double v : q.weights.values) {
    std::snprintf(buf, sizeof buf, "%a\n", v);
    os << buf;
  }
  return os.str();
}

inline QNetwork parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  auto fail = [](const std::string& why) { return DataError(DataError::Kind::kBadShape, "checkpoint: " + why); };
  std::string magic, key;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) throw fail("not a policy checkpoint");
  if (version != kCheckpointVersion) throw fail("unsupported version " + std::to_string(version));
  QNetwork q;
  std::size_t params = 0;
  std::string protocol;
  if (!(in >> key >> q.spec.outputs) || key != "nodes") throw fail("missing nodes");
  if (!(in >> key >> q.spec.input_dim) || key != "input_dim") throw fail("missing input_dim");
  if (!(in >> key >> q.spec.hidden1 >> q.spec.hidden2) || key != "hidden") throw fail("missing hidden");
  if (!(in >> key >> protocol) || key != "pca_protocol") throw fail("missing pca_protocol");
  if (protocol != kPcaProtocol) throw fail("unknown state protocol '" + protocol + "'");
  if (!(in >> key >> params) || key != "params") throw fail("missing params");
  q.arch = q.spec.architecture();
  if (params != q.arch.param_count()) throw fail("parameter count does not match the declared architecture");
  q.weights = nn::zero_weights<double>(q.arch);
  std::string tok;
  for (std::size_t i = 0; i < params; ++i) {
    if (!(in >> tok)) throw fail("truncated after " + std::to_string(i) + " parameters");
    char* end = nullptr;
    q.weights.values[i] = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw fail("bad number '" + tok + "'");
  }
  if (in >> tok) throw fail("trailing data");
  q.adam = nn::AdamState<double>::fresh(q.weights.size());
  return q;
}

inline void save_checkpoint(const QNetwork& q, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(DataError::Kind::kIo, "cannot write " + path.string());
  out << serialize_checkpoint(q);
}

inline QNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace hlsim::policy
