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

#include "privlens/leakage.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "oracle.h"
#include "privlens/parallel.h"
#include "privlens/sampling.h"
#include "test_util.h"

namespace privlens {
namespace {

using testing::AddRemove;
using testing::Q;

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kKeepMi = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);

Channel<Rational> Keep34() {
  return *RandomizedResponseChannel<Rational>(HistogramIndex::Create(AddRemove(1)),
                                              Q("1/2"));
}

size_t OutcomeIndex(const Channel<Rational>& c, const std::string& label) {
  for (size_t r = 0; r < c.num_outcomes(); ++r) {
    if (c.outcomes()[r] == label) return r;
  }
  ADD_FAILURE() << "no outcome " << label;
  return 0;
}

TEST(LeakageTest, PosteriorConstantChannelIsProduct) {
  auto p = JointPrior<Rational>::Uniform(AddRemove(2));
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(2));
  auto c = ConstantChannel<Rational>(index, {Q("1/3"), Q("2/3")}, {"u", "v"});
  ASSERT_OK_AND_ASSIGN(auto space, SequenceSpace::Create(index));
  ASSERT_OK_AND_ASSIGN(auto t, PosteriorTable<Rational>::Create(space, p, c));
  for (uint64_t f = 0; f < space->size(); ++f) {
    EXPECT_EQ(t.Joint(c, f, 0), Q("1/12"));
    EXPECT_EQ(t.Joint(c, f, 1), Q("1/6"));
  }
  EXPECT_EQ(t.output_marginal(), std::vector<Rational>({Q("1/3"), Q("2/3")}));
}

TEST(LeakageTest, PosteriorPointMassPrior) {
  UniversePtr u = AddRemove(2);
  auto p = *JointPrior<Rational>::Independent(u, {{Rational(0), Rational(1)},
                                                  {Rational(1), Rational(0)}});
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto c = IdentityChannel<Rational>(index);
  ASSERT_OK_AND_ASSIGN(auto space, SequenceSpace::Create(index));
  ASSERT_OK_AND_ASSIGN(auto t, PosteriorTable<Rational>::Create(space, p, c));
  int support = 0;
  for (uint64_t f = 0; f < space->size(); ++f) {
    for (size_t r = 0; r < c.num_outcomes(); ++r) support += IsPositive(t.Joint(c, f, r));
  }
  EXPECT_EQ(support, 1);
}

TEST(LeakageTest, PosteriorKeepChannelOutputIsHalf) {
  auto c = Keep34();
  ASSERT_OK_AND_ASSIGN(auto a,
                       LeakageAnalyzer<Rational>::Create(
                           JointPrior<Rational>::Uniform(c.index().universe_ptr()), c));
  EXPECT_EQ(a.output_marginal()[OutcomeIndex(c, "a")], Q("1/2"));
}

TEST(LeakageTest, KeepChannelQuantities) {
  auto c = Keep34();
  auto p = JointPrior<Rational>::Uniform(c.index().universe_ptr());
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  ASSERT_OK_AND_ASSIGN(auto rep, a.Report({0}));
  EXPECT_EQ(rep.i_inf_ratio, ExtendedRatio<Rational>::Finite(Q("3/2")));
  EXPECT_NEAR(rep.i_inf, std::log(1.5), 1e-12);
  EXPECT_NEAR(rep.mi, kKeepMi, 1e-12);
  EXPECT_NEAR(rep.mi, 0.1308, 1e-4);
  EXPECT_NEAR(rep.max_rel_ent, kKeepMi, 1e-12);
  EXPECT_EQ(rep.inferential_ratio, ExtendedRatio<Rational>::Finite(Rational(3)));
  EXPECT_NEAR(rep.inferential_eps, std::log(3.0), 1e-12);
  EXPECT_FALSE(rep.inferential_vacuous);
  EXPECT_NEAR(rep.output_entropy, std::log(2.0), 1e-12);
  EXPECT_FALSE(rep.used_limit_records);
}

TEST(LeakageTest, IdentityChannelQuantities) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(1));
  auto c = IdentityChannel<Rational>(index);
  auto p = JointPrior<Rational>::Uniform(c.index().universe_ptr());
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  ASSERT_OK_AND_ASSIGN(auto rep, a.Report({0}));
  EXPECT_NEAR(rep.i_inf, std::log(2.0), 1e-12);
  EXPECT_NEAR(rep.mi, std::log(2.0), 1e-12);
  EXPECT_NEAR(rep.max_rel_ent, std::log(2.0), 1e-12);
  EXPECT_TRUE(rep.inferential_ratio.infinite);
  EXPECT_EQ(rep.inferential_eps, kInf);
}

TEST(LeakageTest, ConstantChannelLeaksNothing) {
  UniversePtr u = testing::MakeUniverse({{"⊥", "a", "b"}, {"⊥", "a"}});
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto c = ConstantChannel<Rational>(index, {Q("1/5"), Q("4/5")}, {"0", "1"});
  auto p = *JointPrior<Rational>::Create(
      u, {{0, 1}}, {{Q("1/6"), Q("1/12"), Q("1/4"), Q("1/8"), Q("1/8"), Q("1/4")}});
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  for (std::vector<size_t> target : {std::vector<size_t>{0}, {1}, {0, 1}}) {
    ASSERT_OK_AND_ASSIGN(auto rep, a.Report(target));
    EXPECT_EQ(rep.i_inf, 0);
    EXPECT_NEAR(rep.mi, 0, 1e-15);
    EXPECT_NEAR(rep.max_rel_ent, 0, 1e-15);
    if (target.size() == 1) {
      EXPECT_EQ(rep.inferential_eps, 0);
    }
  }
}

TEST(LeakageTest, FreeFunctionsMatchReport) {
  auto c = Keep34();
  auto p = JointPrior<Rational>::Uniform(c.index().universe_ptr());
  EXPECT_NEAR(*MaxMi(p, c, {0}), std::log(1.5), 1e-12);
  EXPECT_NEAR(*MutualInformation(p, c, {0}), kKeepMi, 1e-12);
  EXPECT_NEAR(*MaxRelEntropy(p, c, 0), kKeepMi, 1e-12);
  EXPECT_NEAR(*InferentialEps(p, c, 0), std::log(3.0), 1e-12);
}

TEST(LeakageTest, InferentialVacuousWithOneAdmissibleRecord) {
  UniversePtr u = AddRemove(2);
  auto p = *JointPrior<Rational>::Independent(u, {{Rational(0), Rational(1)},
                                                  {Q("1/2"), Q("1/2")}});
  auto c = IdentityChannel<Rational>(HistogramIndex::Create(u));
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  ASSERT_OK_AND_ASSIGN(auto rep, a.Report({0}));
  EXPECT_TRUE(rep.inferential_vacuous);
  EXPECT_EQ(rep.inferential_eps, 0);
  EXPECT_EQ(rep.i_inf, 0);
}

TEST(LeakageTest, ZeroMassOutcomesAndRecordsExcluded) {
  UniversePtr u = AddRemove(1);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  // Outcome "z" never fires; record ⊥ has no mass.
  auto c = *MatrixChannel<Rational>(index, {"0", "1", "z"},
                                    {{"0", {Q("1/2"), Q("1/2"), Rational(0)}},
                                     {"1", {Q("1/4"), Q("3/4"), Rational(0)}}});
  auto p = *JointPrior<Rational>::Independent(u, {{Rational(0), Rational(1)}});
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  ASSERT_OK_AND_ASSIGN(auto rep, a.Report({0}));
  EXPECT_EQ(rep.i_inf_ratio, ExtendedRatio<Rational>::Finite(Rational(1)));
  EXPECT_EQ(rep.i_inf_witness->value, "a");
}

TEST(LeakageTest, WitnessTieBreakSmallestRecordThenOutcome) {
  auto c = Keep34();
  ASSERT_OK_AND_ASSIGN(auto a,
                       LeakageAnalyzer<Rational>::Create(
                           JointPrior<Rational>::Uniform(c.index().universe_ptr()), c));
  ASSERT_OK_AND_ASSIGN(auto rep, a.Report({0}));
  // Both (⊥, ∅) and (a, a) attain 3/2; the smaller record index wins.
  ASSERT_TRUE(rep.i_inf_witness.has_value());
  EXPECT_EQ(rep.i_inf_witness->value, "⊥");
  EXPECT_EQ(rep.i_inf_witness->outcome, c.outcomes()[0]);
}

TEST(LeakageTest, PersonalizedConstantPasses) {
  UniversePtr u = AddRemove(3);
  auto c = ConstantChannel<Rational>(HistogramIndex::Create(u), {Rational(1)}, {"r"});
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(
                                   JointPrior<Rational>::Uniform(u), c));
  ASSERT_OK_AND_ASSIGN(Verdict v, PersonalizedCheck(a, {0.0, 0.0, 0.0}));
  EXPECT_TRUE(v.satisfied);
  EXPECT_EQ(v.status, VerdictStatus::kSatisfied);
}

TEST(LeakageTest, PersonalizedKeepChannelEqualityAndFailure) {
  auto c = Keep34();
  ASSERT_OK_AND_ASSIGN(auto a,
                       LeakageAnalyzer<Rational>::Create(
                           JointPrior<Rational>::Uniform(c.index().universe_ptr()), c));
  ASSERT_OK_AND_ASSIGN(Verdict pass, PersonalizedCheck(a, {std::log(1.5)}));
  EXPECT_TRUE(pass.satisfied);
  ASSERT_OK_AND_ASSIGN(Verdict fail, PersonalizedCheck(a, {0.1}));
  EXPECT_FALSE(fail.satisfied);
  EXPECT_EQ(fail.status, VerdictStatus::kViolated);
  EXPECT_NEAR(fail.measured, 1.5, 1e-12);
  ASSERT_FALSE(fail.witness.empty());
  EXPECT_EQ(fail.witness[0], std::make_pair(std::string("individual"), std::string("0")));
}

TEST(LeakageTest, PersonalizedReportsFirstFailingIndividual) {
  UniversePtr u = AddRemove(2);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto c = IdentityChannel<Rational>(index);
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(
                                   JointPrior<Rational>::Uniform(u), c));
  ASSERT_OK_AND_ASSIGN(Verdict v, PersonalizedCheck(a, {10.0, 0.1}));
  EXPECT_FALSE(v.satisfied);
  EXPECT_EQ(v.witness[0].second, "1");
}

TEST(LeakageTest, PersonalizedErrors) {
  auto c = Keep34();
  ASSERT_OK_AND_ASSIGN(auto a,
                       LeakageAnalyzer<Rational>::Create(
                           JointPrior<Rational>::Uniform(c.index().universe_ptr()), c));
  EXPECT_FALSE(PersonalizedCheck(a, {}).ok());
  EXPECT_FALSE(PersonalizedCheck(a, {0.1, 0.1}).ok());
  EXPECT_FALSE(PersonalizedCheck(a, {-1.0}).ok());
}

TEST(LeakageTest, ExpectedDistortionGeometric) {
  UniversePtr u = AddRemove(2);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto c = *GeometricCountingChannel<Rational>(index, "a", Q("1/3"), 2);
  std::vector<std::string> query;
  for (size_t h = 0; h < index->size(); ++h) {
    query.push_back(std::to_string(index->at(h).Total()));
  }
  ASSERT_OK_AND_ASSIGN(auto metric, DistortionMetric::AbsoluteDifference({"0", "1", "2"}));
  auto point = *JointPrior<Rational>::Independent(u, {{Rational(0), Rational(1)},
                                                      {Rational(1), Rational(0)}});
  EXPECT_NEAR(*ExpectedDistortion(point, c, query, metric), 0.5, 1e-15);
}

TEST(LeakageTest, ExpectedDistortionDegenerateChannels) {
  UniversePtr u = AddRemove(2);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  std::vector<std::string> query, labels = {"0", "1", "2"};
  std::vector<std::vector<Rational>> rows;
  for (size_t h = 0; h < index->size(); ++h) {
    const uint32_t count = index->at(h).Total();
    query.push_back(std::to_string(count));
    std::vector<Rational> row(3, Rational(0));
    row[count] = 1;
    rows.push_back(row);
  }
  auto exact = *Channel<Rational>::Create(index, labels, rows);
  ASSERT_OK_AND_ASSIGN(auto metric, DistortionMetric::AbsoluteDifference(labels));
  auto prior = JointPrior<Rational>::Uniform(u);
  EXPECT_EQ(*ExpectedDistortion(prior, exact, query, metric), 0);

  auto constant = ConstantChannel<Rational>(index, {Rational(1), Rational(0), Rational(0)},
                                            labels);
  // Counts 0, 1, 2 carry mass 1/4, 1/2, 1/4 under the uniform prior.
  EXPECT_NEAR(*ExpectedDistortion(prior, constant, query, metric), 0.5 + 0.5, 1e-15);
}

TEST(LeakageTest, DistortionMetricValidation) {
  EXPECT_FALSE(DistortionMetric::Create({"x", "y"}, {{0, 1}, {2, 0}}).ok());
  EXPECT_FALSE(DistortionMetric::Create({"x", "y"}, {{1, 1}, {1, 0}}).ok());
  EXPECT_FALSE(DistortionMetric::Create({"x", "y"}, {{0, -1}, {-1, 0}}).ok());
  EXPECT_FALSE(
      DistortionMetric::Create({"x", "y", "z"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}).ok());
  EXPECT_FALSE(DistortionMetric::Create({"x"}, {{0, 0}}).ok());
  EXPECT_FALSE(DistortionMetric::AbsoluteDifference({"1", "two"}).ok());
  EXPECT_TRUE(DistortionMetric::Create({"x", "y"}, {{0, 1}, {1, 0}}).ok());
}

TEST(LeakageTest, ExpectedDistortionErrors) {
  UniversePtr u = AddRemove(1);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto c = IdentityChannel<Rational>(index);
  auto p = JointPrior<Rational>::Uniform(u);
  ASSERT_OK_AND_ASSIGN(auto metric, DistortionMetric::AbsoluteDifference({"0", "1"}));
  EXPECT_FALSE(ExpectedDistortion(p, c, {"0"}, metric).ok());
  EXPECT_FALSE(ExpectedDistortion(p, c, {"0", "1"}, metric).ok());  // outcomes unlabeled
}

TEST(LeakageTest, PostprocessIdentityAndConstant) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(2));
  auto c = *GeometricCountingChannel<Rational>(index, "a", Q("1/3"), 2);
  ASSERT_OK_AND_ASSIGN(auto same, Postprocess(c, c.outcomes()));
  EXPECT_EQ(same.outcomes(), c.outcomes());
  for (size_t h = 0; h < index->size(); ++h) EXPECT_EQ(same.row(h), c.row(h));

  ASSERT_OK_AND_ASSIGN(auto flat, Postprocess(c, {"x", "x", "x"}));
  ASSERT_EQ(flat.num_outcomes(), 1u);
  auto p = JointPrior<Rational>::Uniform(c.index().universe_ptr());
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, flat));
  for (size_t i = 0; i < 2; ++i) {
    ASSERT_OK_AND_ASSIGN(auto rep, a.Report({i}));
    EXPECT_EQ(rep.i_inf, 0);
    EXPECT_EQ(rep.mi, 0);
    EXPECT_EQ(rep.inferential_eps, 0);
  }
  EXPECT_FALSE(Postprocess(c, {"x", "y"}).ok());
}

TEST(LeakageTest, MergingGeometricOutcomesLowersMi) {
  HistogramIndexPtr index = HistogramIndex::Create(AddRemove(2));
  auto c = *GeometricCountingChannel<Rational>(index, "a", Q("1/3"), 2);
  ASSERT_OK_AND_ASSIGN(auto merged, Postprocess(c, {"0", "12", "12"}));
  auto p = JointPrior<Rational>::Uniform(c.index().universe_ptr());
  for (size_t i = 0; i < 2; ++i) {
    const double before = *MutualInformation(p, c, {i});
    const double after = *MutualInformation(p, merged, {i});
    EXPECT_LT(after, before - 1e-6);
  }
}

TEST(LeakageTest, Errors) {
  auto c = Keep34();
  auto other = JointPrior<Rational>::Uniform(AddRemove(2));
  EXPECT_FALSE(LeakageAnalyzer<Rational>::Create(other, c).ok());
  auto p = JointPrior<Rational>::Uniform(c.index().universe_ptr());
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  EXPECT_FALSE(a.Report({1}).ok());
  EXPECT_FALSE(a.Report({}).ok());
  HistogramIndexPtr big = HistogramIndex::Create(AddRemove(6));
  EXPECT_EQ(LeakageAnalyzer<Rational>::Create(JointPrior<Rational>::Uniform(big->universe_ptr()),
                                              IdentityChannel<Rational>(big), 10)
                .status()
                .code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(LeakageTest, GroupTargetUsesJointPosterior) {
  UniversePtr u = AddRemove(2);
  auto c = IdentityChannel<Rational>(HistogramIndex::Create(u));
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(
                                   JointPrior<Rational>::Uniform(u), c));
  ASSERT_OK_AND_ASSIGN(auto rep, a.Report({0, 1}));
  // Output count 0 or 2 pins both records: posterior 1 vs prior 1/4.
  EXPECT_EQ(rep.i_inf_ratio, ExtendedRatio<Rational>::Finite(Rational(4)));
  // Count reveals 1.5 bits of the pair.
  EXPECT_NEAR(rep.mi, 1.5 * std::log(2.0), 1e-12);
}

using testing::RandomExactChannel;
using testing::RandomExactPrior;

class LeakageProperty : public ::testing::TestWithParam<int> {};

TEST_P(LeakageProperty, ExactQuantitiesMatchOracle) {
  std::mt19937_64 rng(1000 + GetParam());
  UniversePtr u = testing::RandomUniverse(rng, 3, 3);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto p = RandomExactPrior(u, rng);
  auto c = RandomExactChannel(index, std::uniform_int_distribution<size_t>(1, 4)(rng), rng);
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  const auto table = oracle::Build(oracle::FullTable(p), c);
  for (size_t i = 0; i < u->size(); ++i) {
    ASSERT_OK_AND_ASSIGN(auto rep, a.Report({i}));
    EXPECT_FALSE(rep.i_inf_ratio.infinite);
    EXPECT_EQ(rep.i_inf_ratio.value, oracle::MaxMiRatio(table, {i}));
    EXPECT_NEAR(rep.mi, oracle::MutualInformation(table, {i}), 1e-12);
    EXPECT_NEAR(rep.max_rel_ent, oracle::MaxRelEntropy(table, i), 1e-12);
    const auto inf = oracle::InferentialRatio(table, i);
    EXPECT_EQ(rep.inferential_ratio.infinite, inf.infinite);
    if (!inf.infinite) {
      EXPECT_EQ(rep.inferential_ratio.value, inf.value);
    }
    EXPECT_EQ(a.MaxMiRatioByMixture(i), rep.i_inf_ratio);
  }
  std::vector<size_t> all(u->size());
  std::iota(all.begin(), all.end(), 0);
  ASSERT_OK_AND_ASSIGN(auto group, a.Report(all));
  EXPECT_EQ(group.i_inf_ratio.value, oracle::MaxMiRatio(table, all));
  EXPECT_NEAR(group.mi, oracle::MutualInformation(table, all), 1e-12);
}

TEST_P(LeakageProperty, DoubleChainAndMixture) {
  std::mt19937_64 rng(2000 + GetParam());
  UniversePtr u = testing::RandomUniverse(rng, 4, 3);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto p = DrawPrior(u, FamilyParams{}, rng);
  auto c = RandomChannel(index, std::uniform_int_distribution<size_t>(2, 4)(rng), rng);
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<double>::Create(p, c));
  const auto table = oracle::Build(oracle::FullTable(p), c);
  for (size_t i = 0; i < u->size(); ++i) {
    ASSERT_OK_AND_ASSIGN(auto rep, a.Report({i}));
    EXPECT_NEAR(rep.i_inf_ratio.AsDouble(), oracle::MaxMiRatio(table, {i}),
                1e-9 * oracle::MaxMiRatio(table, {i}));
    EXPECT_NEAR(rep.mi, oracle::MutualInformation(table, {i}), 1e-9);
    EXPECT_NEAR(a.MaxMiRatioByMixture(i).Nats(), rep.i_inf, 1e-9);
    EXPECT_GE(rep.inferential_eps, rep.i_inf - 1e-9);
    EXPECT_GE(rep.i_inf, rep.max_rel_ent - 1e-9);
    EXPECT_GE(rep.max_rel_ent, rep.mi - 1e-9);
    EXPECT_GE(rep.mi, -1e-12);
    EXPECT_GE(rep.max_rel_ent, -1e-12);
  }
}

TEST_P(LeakageProperty, PostprocessNeverRaisesMi) {
  std::mt19937_64 rng(3000 + GetParam());
  UniversePtr u = testing::RandomUniverse(rng, 3, 3);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto p = DrawPrior(u, FamilyParams{}, rng);
  const size_t R = std::uniform_int_distribution<size_t>(2, 5)(rng);
  auto c = RandomChannel(index, R, rng);
  std::vector<std::string> g;
  for (size_t r = 0; r < R; ++r) {
    g.push_back(std::to_string(std::uniform_int_distribution<int>(0, 2)(rng)));
  }
  ASSERT_OK_AND_ASSIGN(auto merged, Postprocess(c, g));
  for (size_t i = 0; i < u->size(); ++i) {
    EXPECT_LE(*MutualInformation(p, merged, {i}), *MutualInformation(p, c, {i}) + 1e-12);
  }
}

TEST_P(LeakageProperty, IndependentPriorWithinDpEpsilon) {
  std::mt19937_64 rng(4000 + GetParam());
  const size_t n = std::uniform_int_distribution<size_t>(1, 4)(rng);
  UniversePtr u = AddRemove(n);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  FamilyParams f;
  f.k = 1;
  auto p = DrawPrior(u, f, rng);
  ASSERT_EQ(p.MaxBlockSize(), 1u);
  auto c = RandomChannel(index, 3, rng);
  const double dp = DpEpsilon(c);
  for (size_t i = 0; i < n; ++i) EXPECT_LE(*MaxMi(p, c, {i}), dp + 1e-9);
}

TEST_P(LeakageProperty, LimitRecordsMatchVanishingMass) {
  std::mt19937_64 rng(5000 + GetParam());
  const size_t n = std::uniform_int_distribution<size_t>(2, 3)(rng);
  UniversePtr u = AddRemove(n);
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto c = RandomExactChannel(index, 3, rng);
  // Individual 0 paired with individual 1 in one block; every record of the
  // pair is drawn at random, the rest frozen at random values.
  std::vector<uint32_t> frozen(n);
  for (auto& v : frozen) v = std::uniform_int_distribution<uint32_t>(0, 1)(rng);
  const uint32_t x = std::uniform_int_distribution<uint32_t>(0, 1)(rng);
  const uint32_t gx = std::uniform_int_distribution<uint32_t>(0, 1)(rng);
  const uint32_t gxp = std::uniform_int_distribution<uint32_t>(0, 1)(rng);
  ASSERT_OK_AND_ASSIGN(auto p, ExtremalPkPrior<Rational>(u, 0, x, 1 - x, {1}, {gx}, {gxp},
                                                         frozen, 2));
  ASSERT_FALSE(p.limits().empty());
  ASSERT_OK_AND_ASSIGN(auto a, LeakageAnalyzer<Rational>::Create(p, c));
  ASSERT_OK_AND_ASSIGN(auto rep, a.Report({0}));
  const Rational eta = Q("1/1000000000");
  const auto table = oracle::Build(oracle::EtaPerturbed(p, eta), c);
  const double limit = rep.i_inf_ratio.AsDouble();
  const double perturbed = ToDouble(oracle::MaxMiRatio(table, {0}));
  if (rep.i_inf_ratio.infinite) {
    // Only the limit record reaches some outcome: the ratio grows like 1/eta.
    EXPECT_GT(perturbed, 1e8);
  } else {
    EXPECT_NEAR(perturbed, limit, 1e-6 * std::max(1.0, limit));
  }
  EXPECT_EQ(a.MaxMiRatioByMixture(0), rep.i_inf_ratio);
}

INSTANTIATE_TEST_SUITE_P(Seeds, LeakageProperty, ::testing::Range(0, 40));

TEST(LeakageTest, ReportIndependentOfThreadCount) {
  std::mt19937_64 rng(77);
  UniversePtr u = testing::MakeUniverse(std::vector<std::vector<std::string>>(
      6, {"⊥", "a", "b"}));
  HistogramIndexPtr index = HistogramIndex::Create(u);
  auto p = DrawPrior(u, FamilyParams{}, rng);
  auto c = RandomChannel(index, 4, rng);
  auto run = [&](unsigned threads) {
    SetThreadCount(threads);
    auto a = *LeakageAnalyzer<double>::Create(p, c);
    std::vector<double> out;
    for (size_t i = 0; i < u->size(); ++i) {
      auto rep = *a.Report({i});
      out.insert(out.end(), {rep.i_inf, rep.mi, rep.max_rel_ent, rep.inferential_eps});
    }
    return out;
  };
  const auto one = run(1);
  const auto many = run(8);
  SetThreadCount(1);
  EXPECT_EQ(one, many);
}

}  // namespace
}  // namespace privlens
