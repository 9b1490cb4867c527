// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "hlsim/error.hpp"
#include "hlsim/topology/distance_matrix.hpp"

namespace hlsim {
namespace {

using topology::DistanceMatrix;

void expect_valid(const DistanceMatrix& m, std::size_t n, double beta) {
  ASSERT_EQ(m.size(), n);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(m(i, i), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_EQ(m(i, j), m(j, i));
      if (i != j) {
        EXPECT_GT(m(i, j), 0.0);
        EXPECT_LE(m(i, j), beta);
      }
    }
  }
}

TEST(DistanceMatrix, NominalTenNodes) {
  const auto m = topology::gen_distance_matrix(10, 0.1, 0);
  expect_valid(m, 10, 0.1);
  EXPECT_EQ(m(2, 7), m(7, 2));
  EXPECT_EQ(m, topology::gen_distance_matrix(10, 0.1, 0));
  EXPECT_NE(m, topology::gen_distance_matrix(10, 0.1, 1));
}

TEST(DistanceMatrix, SingleNode) {
  const auto m = topology::gen_distance_matrix(1, 0.1, 5);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m(0, 0), 0.0);
}

TEST(DistanceMatrix, InvariantsOverRandomTriples) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 40;
    const double beta = std::uniform_real_distribution<double>(1e-3, 10.0)(gen);
    const std::uint64_t seed = gen();
    expect_valid(topology::gen_distance_matrix(n, beta, seed), n, beta);
  }
}

TEST(DistanceMatrix, RejectsBadParametersAndEntries) {
  EXPECT_THROW(topology::gen_distance_matrix(0, 0.1, 0), std::invalid_argument);
  EXPECT_THROW(topology::gen_distance_matrix(3, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix(2, 0.1, {0.0, 0.05, 0.06, 0.0}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix(2, 0.1, {0.1, 0.05, 0.05, 0.0}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix(2, 0.1, {0.0, 0.2, 0.2, 0.0}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix(2, 0.1, {0.0, 0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(PathCost, ExamplesAndBruteForceOracle) {
  const auto m = topology::gen_distance_matrix(10, 0.1, 0);
  const std::vector<std::size_t> single{4}, stay{3, 3, 3}, path{0, 3, 7};
  EXPECT_EQ(topology::path_cost(m, single), 0.0);
  EXPECT_EQ(topology::path_cost(m, stay), 0.0);
  const auto e = m.entries();
  EXPECT_DOUBLE_EQ(topology::path_cost(m, path), e[0 * 10 + 3] + e[3 * 10 + 7]);
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> visits(1 + gen() % 30);
    for (auto& v : visits) v = gen() % 10;
    double brute = 0.0;
    for (std::size_t k = 1; k < visits.size(); ++k) brute += e[visits[k - 1] * 10 + visits[k]];
    EXPECT_NEAR(topology::path_cost(m, visits), brute, 1e-15);
  }
}

TEST(PathCost, AdditiveOverSharedEndpoint) {
  const auto m = topology::gen_distance_matrix(8, 0.1, 3);
  const std::vector<std::size_t> a{0, 5, 2}, b{2, 7, 1, 1}, ab{0, 5, 2, 7, 1, 1};
  EXPECT_NEAR(topology::path_cost(m, ab), topology::path_cost(m, a) + topology::path_cost(m, b), 1e-15);
}

TEST(PathCost, RejectsOutOfRangeId) {
  const auto m = topology::gen_distance_matrix(3, 0.1, 0);
  const std::vector<std::size_t> bad{0, 3};
  EXPECT_THROW(topology::path_cost(m, bad), std::out_of_range);
}

TEST(DistanceCsv, RoundTripsExactly) {
  const auto m = topology::gen_distance_matrix(6, 0.1, 9);
  const auto back = topology::from_csv(topology::to_csv(m), 0.1);
  EXPECT_TRUE(std::equal(m.entries().begin(), m.entries().end(), back.entries().begin()));
}

TEST(DistanceCsv, ImportIsValidated) {
  EXPECT_THROW(topology::from_csv("0,0.1\n0.2,0\n"), DataError);
  EXPECT_THROW(topology::from_csv("0,0.1,0.1\n0.1,0\n"), DataError);
  EXPECT_THROW(topology::from_csv("0,x\nx,0\n"), DataError);
  EXPECT_THROW(topology::from_csv("0,0.5\n0.5,0\n", 0.1), DataError);
  EXPECT_EQ(topology::from_csv("0,0.5\n0.5,0\n").size(), 2u);
}

}  // namespace
}  // namespace hlsim
