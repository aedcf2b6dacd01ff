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

#include "privlens/mechanism.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracle.h"
#include "privlens/sampling.h"
#include "test_util.h"

namespace privlens {
namespace {

using testing::AddRemove;
using testing::MakeUniverse;
using testing::Q;

Channel<Rational> Geometric(size_t n, uint32_t m) {
  return *GeometricCountingChannel<Rational>(HistogramIndex::Create(AddRemove(n)), "a",
                                             Q("1/3"), m);
}

size_t HistogramWithCount(const HistogramIndex& index, uint32_t c) {
  return *index.Find(DatasetHistogram{{c}});
}

TEST(MechanismTest, GeometricRowsFoldTails) {
  Channel<Rational> c = Geometric(2, 2);
  const auto& index = c.index();
  EXPECT_EQ(c.row(HistogramWithCount(index, 0)),
            std::vector<Rational>({Q("3/4"), Q("1/6"), Q("1/12")}));
  EXPECT_EQ(c.row(HistogramWithCount(index, 1)),
            std::vector<Rational>({Q("1/4"), Q("1/2"), Q("1/4")}));
  EXPECT_EQ(c.row(HistogramWithCount(index, 2)),
            std::vector<Rational>({Q("1/12"), Q("1/6"), Q("3/4")}));
}

TEST(MechanismTest, GeometricErrors) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(2));
  EXPECT_FALSE(GeometricCountingChannel<Rational>(index, "a", Q("1/3"), 1).ok());
  EXPECT_FALSE(GeometricCountingChannel<Rational>(index, "z", Q("1/3"), 2).ok());
  EXPECT_FALSE(GeometricCountingChannel<Rational>(index, "a", Rational(1), 2).ok());
  EXPECT_FALSE(GeometricCountingChannel(index, "a", 0.0, 2).ok());
  EXPECT_FALSE(GeometricCountingChannel(index, "a", -1.0, 2).ok());
}

TEST(MechanismTest, DoubleGeometricMatchesExact) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(3));
  auto d = *GeometricCountingChannel(index, "a", std::log(3.0), 4);
  auto q = *GeometricCountingChannel<Rational>(index, "a", Q("1/3"), 4);
  for (size_t h = 0; h < index->size(); ++h) {
    for (size_t r = 0; r < 5; ++r) EXPECT_NEAR(d.at(h, r), ToDouble(q.at(h, r)), 1e-15);
  }
}

TEST(MechanismTest, RandomizedResponseKeepHalf) {
  auto c = *RandomizedResponseChannel<Rational>(HistogramIndex::Create(AddRemove(1)), Q("1/2"));
  for (size_t h = 0; h < 2; ++h) EXPECT_EQ(c.at(h, h), Q("3/4"));
  EXPECT_EQ(DpRatio(c).ratio, ExtendedRatio<Rational>::Finite(Rational(3)));
  EXPECT_NEAR(DpEpsilon(c), std::log(3.0), 1e-15);
}

TEST(MechanismTest, RandomizedResponseNearOneIsNearIdentity) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(2));
  auto c = *RandomizedResponseChannel<Rational>(index, Q("999999/1000000"));
  for (size_t h = 0; h < index->size(); ++h) {
    for (size_t r = 0; r < index->size(); ++r) {
      EXPECT_NEAR(ToDouble(c.at(h, r)), h == r ? 1.0 : 0.0, 1e-5);
    }
  }
}

TEST(MechanismTest, RandomizedResponseErrors) {
  auto mixed = HistogramIndex::Create(MakeUniverse({{"⊥", "a"}, {"⊥", "b"}}));
  EXPECT_FALSE(RandomizedResponseChannel<Rational>(mixed, Q("1/2")).ok());
  auto index = HistogramIndex::Create(AddRemove(1));
  EXPECT_FALSE(RandomizedResponseChannel<Rational>(index, Rational(1)).ok());
  EXPECT_FALSE(RandomizedResponseChannel<Rational>(index, Rational(0)).ok());
}

TEST(MechanismTest, MatrixChannelValidation) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(1));
  auto ok = MatrixChannel<Rational>(index, {"y", "n"}, {{"0", {1, 0}}, {"1", {0, 1}}});
  ASSERT_TRUE(ok.ok()) << ok.status();
  auto bad = MatrixChannel<Rational>(index, {"y", "n"}, {{"0", {Q("1/2"), Q("49/100")}}, {"1", {0, 1}}});
  ASSERT_FALSE(bad.ok());
  EXPECT_NE(bad.status().message().find("[0]"), std::string::npos) << bad.status();
  EXPECT_NE(bad.status().message().find("99/100"), std::string::npos) << bad.status();
  EXPECT_FALSE(MatrixChannel<Rational>(index, {"y", "n"}, {{"0", {1, 0}}}).ok());
  EXPECT_FALSE(MatrixChannel<Rational>(index, {"y", "n"},
                                       {{"0", {1, 0}}, {"1", {0, 1}}, {"2", {1, 0}}})
                   .ok());
  EXPECT_FALSE(MatrixChannel<double>(index, {"y", "n"}, {{"0", {0.99, 0}}, {"1", {0, 1}}}).ok());
  EXPECT_FALSE(MatrixChannel<double>(index, {"y", "n"}, {{"0", {1.5, -0.5}}, {"1", {0, 1}}}).ok());
}

TEST(MechanismTest, IdentityAndConstantRows) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(2));
  Channel<Rational> id = IdentityChannel<Rational>(index);
  for (size_t h = 0; h < index->size(); ++h) {
    for (size_t r = 0; r < index->size(); ++r) EXPECT_EQ(id.at(h, r), h == r ? 1 : 0);
  }
  Channel<Rational> k = ConstantChannel<Rational>(index, {Q("1/3"), Q("2/3")}, {"x", "y"});
  for (size_t h = 1; h < index->size(); ++h) EXPECT_EQ(k.row(h), k.row(0));
}

TEST(MechanismTest, RatioExamples) {
  Channel<Rational> geo = Geometric(2, 2);
  EXPECT_EQ(DpRatio(geo).ratio, ExtendedRatio<Rational>::Finite(Rational(3)));
  EXPECT_EQ(LipschitzRatio(geo, 2).ratio, ExtendedRatio<Rational>::Finite(Rational(9)));
  EXPECT_EQ(LipschitzRatio(geo, 1).ratio, ExtendedRatio<Rational>::Finite(Rational(3)));
  EXPECT_NEAR(GroupRatioBound(geo, 2).value, 9.0, 1e-12);
  EXPECT_NEAR(GroupRatioBound(geo, 1).value, 3.0, 1e-12);

  HistogramIndexPtr index = geo.index_ptr();
  Channel<Rational> k = ConstantChannel<Rational>(index, {Q("1/3"), Q("2/3")}, {"x", "y"});
  EXPECT_EQ(DpEpsilon(k), 0.0);
  for (uint32_t s = 1; s <= 2; ++s) {
    EXPECT_EQ(LipschitzRatio(k, s).ratio, ExtendedRatio<Rational>::Finite(Rational(1)));
    EXPECT_EQ(GroupRatioBound(k, s).value, 1.0);
  }
  Channel<Rational> id = IdentityChannel<Rational>(index);
  EXPECT_TRUE(DpRatio(id).ratio.infinite);
  EXPECT_TRUE(std::isinf(DpEpsilon(id)));
  EXPECT_TRUE(GroupRatioBound(id, 2).unbounded);
}

TEST(MechanismTest, WitnessPointsAtBoundaryRatio) {
  Channel<Rational> geo = Geometric(2, 2);
  RatioWitness<Rational> w = LipschitzRatio(geo, 2);
  ASSERT_TRUE(w.found);
  EXPECT_EQ(geo.at(w.numerator, w.outcome) / geo.at(w.denominator, w.outcome), 9);
}

// Random channels on random universes: the scans against a brute-force
// sequence-pair enumeration, and the monotonicity facts.
class MechanismPropertyTest : public ::testing::TestWithParam<uint64_t> {};

TEST_P(MechanismPropertyTest, RatiosMatchSequenceEnumeration) {
  std::mt19937_64 rng(GetParam());
  UniversePtr u = testing::RandomUniverse(rng, 3, 3);
  auto c = RandomChannel(HistogramIndex::Create(u), 2 + rng() % 3, rng);
  auto dp = oracle::DpRatio(c);
  EXPECT_EQ(DpRatio(c).ratio.infinite, dp.infinite);
  if (!dp.infinite) {
    EXPECT_NEAR(DpRatio(c).ratio.AsDouble(), std::max(1.0, dp.AsDouble()), 1e-9);
  }
  for (int k = 1; k <= static_cast<int>(u->size()); ++k) {
    auto lip = oracle::LipschitzRatio(c, k);
    auto mine = LipschitzRatio(c, k).ratio;
    EXPECT_EQ(mine.infinite, lip.infinite);
    if (!lip.infinite) {
      EXPECT_NEAR(mine.AsDouble(), lip.AsDouble(), 1e-9 * lip.AsDouble());
    }
  }
  for (size_t h = 0; h < c.num_rows(); ++h) {
    double sum = 0;
    for (double x : c.row(h)) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST_P(MechanismPropertyTest, LipschitzMonotoneAndGroupBounded) {
  std::mt19937_64 rng(GetParam() + 1000);
  const size_t n = 1 + rng() % 3;
  UniversePtr u = rng() % 2 ? AddRemove(n)
                            : MakeUniverse(std::vector<std::vector<std::string>>(n, {"⊥", "a", "b"}));
  const double eps = std::uniform_real_distribution<double>(0.1, 1.5)(rng);
  auto c = RandomDpChannel(HistogramIndex::Create(u), 2 + rng() % 3, eps, rng);
  EXPECT_LE(DpEpsilon(c), eps + 1e-9);
  EXPECT_NEAR(LipschitzRatio(c, 1).ratio.AsDouble(), std::exp(DpEpsilon(c)), 1e-9);
  double previous = 1;
  for (uint32_t s = 1; s <= 2 * n; ++s) {
    const double lip = LipschitzRatio(c, s).ratio.AsDouble();
    EXPECT_GE(lip, previous - 1e-12);
    EXPECT_LE(lip, GroupRatioBound(c, s).value * (1 + 1e-9));
    previous = lip;
  }
}

TEST_P(MechanismPropertyTest, ExactAndDoubleScansAgree) {
  std::mt19937_64 rng(GetParam() + 2000);
  UniversePtr u = testing::RandomUniverse(rng, 3, 3);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  // Rational rows with small denominators.
  std::vector<std::vector<Rational>> rows;
  for (size_t h = 0; h < index->size(); ++h) {
    std::vector<Rational> row(3);
    int left = 12;
    for (size_t r = 0; r + 1 < row.size(); ++r) {
      const int take = static_cast<int>(rng() % (left + 1));
      row[r] = Rational(take, 12);
      left -= take;
    }
    row.back() = Rational(left, 12);
    rows.push_back(row);
  }
  auto q = *Channel<Rational>::Create(index, {"0", "1", "2"}, rows);
  auto d = ToDoubleChannel(q);
  for (uint32_t k = 1; k <= u->size(); ++k) {
    auto exact = LipschitzRatio(q, k).ratio;
    auto approx = LipschitzRatio(d, k).ratio;
    EXPECT_EQ(exact.infinite, approx.infinite);
    if (!exact.infinite) {
      EXPECT_NEAR(exact.AsDouble(), approx.AsDouble(), 1e-12 * exact.AsDouble());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, MechanismPropertyTest, ::testing::Range<uint64_t>(0, 40));

}  // namespace
}  // namespace privlens
