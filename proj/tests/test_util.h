//
// Copyright 2026 The privlens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Small helpers shared by the unit tests.

#ifndef PRIVLENS_TESTS_TEST_UTIL_H_
#define PRIVLENS_TESTS_TEST_UTIL_H_

#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "privlens/mechanism.h"
#include "privlens/prior.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"

#define PRIVLENS_CONCAT_INNER(a, b) a##b
#define PRIVLENS_CONCAT(a, b) PRIVLENS_CONCAT_INNER(a, b)

#define ASSERT_OK(expr)                                   \
  do {                                                    \
    const auto& privlens_status = (expr);                 \
    ASSERT_TRUE(privlens_status.ok()) << privlens_status; \
  } while (0)

#define ASSERT_OK_AND_ASSIGN(lhs, expr) \
  ASSERT_OK_AND_ASSIGN_IMPL(PRIVLENS_CONCAT(privlens_or_, __LINE__), lhs, expr)
#define ASSERT_OK_AND_ASSIGN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                              \
  ASSERT_TRUE(tmp.ok()) << tmp.status();          \
  lhs = std::move(tmp).value()

namespace privlens::testing {

inline UniversePtr MakeUniverse(const std::vector<std::vector<std::string>>& alphabets) {
  auto u = RecordUniverse::Create(alphabets);
  EXPECT_TRUE(u.ok()) << u.status();
  return std::make_shared<const RecordUniverse>(std::move(u).value());
}

// n individuals with alphabet {⊥, a}.
inline UniversePtr AddRemove(size_t n) {
  return MakeUniverse(std::vector<std::vector<std::string>>(n, {"⊥", "a"}));
}

inline Rational Q(const char* text) { return *ParseRational(text); }

// Random universe with n <= max_n individuals and alphabets of size <= max_m
// drawn from {⊥, a, b}; about half of them use the add/remove form {⊥, a}.
inline UniversePtr RandomUniverse(std::mt19937_64& rng, size_t max_n, size_t max_m) {
  const size_t n = std::uniform_int_distribution<size_t>(1, max_n)(rng);
  std::vector<std::vector<std::string>> alphabets;
  const std::vector<std::string> pool = {"⊥", "a", "b"};
  for (size_t i = 0; i < n; ++i) {
    const size_t m = std::uniform_int_distribution<size_t>(2, max_m)(rng);
    alphabets.emplace_back(pool.begin(), pool.begin() + m);
  }
  return MakeUniverse(alphabets);
}

// Integer weights in [min_weight, 6] normalized to a distribution; an
// all-zero draw becomes a point mass on the first entry.
inline std::vector<Rational> RandomExactLaw(size_t m, std::mt19937_64& rng,
                                            int min_weight = 0) {
  std::vector<Rational> w(m);
  for (auto& x : w) x = std::uniform_int_distribution<int>(min_weight, 6)(rng);
  Rational total = std::accumulate(w.begin(), w.end(), Rational(0));
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (auto& x : w) x /= total;
  return w;
}

// Random contiguous blocks with random exact tables.
inline JointPrior<Rational> RandomExactPrior(const UniversePtr& u, std::mt19937_64& rng) {
  std::vector<std::vector<size_t>> blocks;
  for (size_t i = 0; i < u->size(); ++i) {
    if (blocks.empty() || std::bernoulli_distribution(0.5)(rng)) blocks.push_back({});
    blocks.back().push_back(i);
  }
  std::vector<std::vector<Rational>> tables;
  for (const auto& b : blocks) {
    size_t size = 1;
    for (size_t j : b) size *= u->AlphabetSize(j);
    tables.push_back(RandomExactLaw(size, rng));
  }
  return *JointPrior<Rational>::Create(u, blocks, tables);
}

// Outcomes are labeled "0", "1", ...
inline Channel<Rational> RandomExactChannel(const HistogramIndexPtr& index, size_t outcomes,
                                            std::mt19937_64& rng, int min_weight = 0) {
  std::vector<std::string> labels;
  for (size_t r = 0; r < outcomes; ++r) labels.push_back(std::to_string(r));
  std::vector<std::vector<Rational>> rows;
  for (size_t h = 0; h < index->size(); ++h) {
    rows.push_back(RandomExactLaw(outcomes, rng, min_weight));
  }
  return *Channel<Rational>::Create(index, labels, rows);
}

}  // namespace privlens::testing

#endif  // PRIVLENS_TESTS_TEST_UTIL_H_
