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

// Exact Bayesian leakage of a (prior, channel) pair by enumeration of the
// sequence space.
//
// Every quantity is computed from one target table per index set I: the
// prior mass of each joint value x_I and the joint law of (X_I, Y). Values of
// x_I with zero prior mass that are reachable through declared limit records
// get a likelihood Pr[Y | X_I = x_I] from the limit law, so the posterior
// ratio at such values is the limit of the ratio as the vanishing mass goes
// to zero. Mutual information and relative entropy only see the base law.

#ifndef PRIVLENS_LEAKAGE_H_
#define PRIVLENS_LEAKAGE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "privlens/mechanism.h"
#include "privlens/parallel.h"
#include "privlens/prior.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"
#include "privlens/verdict.h"

namespace privlens {

namespace internal {

// Chunking depends only on the problem size, never on the thread count.
inline ChunkPlan SequenceChunks(uint64_t total) {
  constexpr uint64_t kMinChunk = 4096;
  constexpr uint64_t kMaxChunks = 64;
  uint64_t size = std::max(kMinChunk, (total + kMaxChunks - 1) / kMaxChunks);
  return ChunkPlan{static_cast<size_t>(total), static_cast<size_t>(size)};
}

inline absl::Status CheckSameUniverse(const RecordUniverse& a,
                                      const RecordUniverse& b) {
  if (!(a == b)) {
    return absl::InvalidArgumentError("prior and channel universes differ");
  }
  return absl::OkStatus();
}

}  // namespace internal

// Joint law of (X, Y) in factored form: Pr[X=s, Y=r] = weight(s) * row(h(s))[r].
template <Scalar T>
class PosteriorTable {
 public:
  static absl::StatusOr<PosteriorTable> Create(SequenceSpacePtr space,
                                               const JointPrior<T>& prior,
                                               const Channel<T>& channel) {
    PRIVLENS_RETURN_IF_ERROR(
        internal::CheckSameUniverse(prior.universe(), channel.universe()));
    PRIVLENS_RETURN_IF_ERROR(
        internal::CheckSameUniverse(prior.universe(), space->universe()));
    PosteriorTable t;
    t.space_ = std::move(space);
    t.weights_ = prior.SequenceWeights(*t.space_);
    const size_t R = channel.num_outcomes();
    const ChunkPlan plan = internal::SequenceChunks(t.space_->size());
    std::vector<std::vector<T>> partial(plan.count(), std::vector<T>(R, T(0)));
    ParallelForChunks(plan.count(), [&](size_t c) {
      for (uint64_t f = plan.begin(c); f < plan.end(c); ++f) {
        if (IsZero(t.weights_[f])) continue;
        const auto& row = channel.row(t.space_->HistogramId(f));
        for (size_t r = 0; r < R; ++r) partial[c][r] += t.weights_[f] * row[r];
      }
    });
    t.output_.assign(R, T(0));
    for (const auto& p : partial) {
      for (size_t r = 0; r < R; ++r) t.output_[r] += p[r];
    }
    return t;
  }

  const SequenceSpace& space() const { return *space_; }
  const std::vector<T>& weights() const { return weights_; }
  const std::vector<T>& output_marginal() const { return output_; }

  T Joint(const Channel<T>& channel, uint64_t f, size_t r) const {
    return weights_[f] * channel.at(space_->HistogramId(f), r);
  }

 private:
  SequenceSpacePtr space_;
  std::vector<T> weights_;
  std::vector<T> output_;
};

// Per-target tables for an index set I.
template <Scalar T>
struct TargetTable {
  IndexSetCoder coder;
  std::vector<T> mass;                 // Pr[X_I = x]
  std::vector<std::vector<T>> joint;   // Pr[X_I = x, Y = r]
  // Pr[Y | X_I = x] for every admissible x (positive mass or limit law).
  std::vector<std::optional<std::vector<T>>> likelihood;
  std::vector<bool> via_limit;
};

struct ValueOutcome {
  std::string value;
  std::string outcome;
};

template <Scalar T>
struct LeakageReport {
  std::vector<size_t> target;
  ExtendedRatio<T> i_inf_ratio;
  double i_inf = 0;  // nats
  std::optional<ValueOutcome> i_inf_witness;
  double mi = 0;
  double max_rel_ent = 0;
  std::optional<std::string> max_rel_witness;  // outcome
  ExtendedRatio<T> inferential_ratio;
  double inferential_eps = 0;  // nats, possibly +inf
  bool inferential_vacuous = false;
  std::optional<std::pair<std::string, std::string>> inferential_records;
  std::optional<std::string> inferential_outcome;
  double output_entropy = 0;
  bool used_limit_records = false;
};

template <Scalar T>
class LeakageAnalyzer {
 public:
  static absl::StatusOr<LeakageAnalyzer> Create(
      JointPrior<T> prior, Channel<T> channel,
      uint64_t budget = kDefaultEnumerationBudget) {
    PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space,
                              SequenceSpace::Create(channel.index_ptr(), budget));
    return Create(std::move(space), std::move(prior), std::move(channel));
  }

  static absl::StatusOr<LeakageAnalyzer> Create(SequenceSpacePtr space,
                                                JointPrior<T> prior,
                                                Channel<T> channel) {
    PRIVLENS_ASSIGN_OR_RETURN(PosteriorTable<T> table,
                              PosteriorTable<T>::Create(space, prior, channel));
    return LeakageAnalyzer(std::move(prior), std::move(channel),
                           std::move(table));
  }

  const JointPrior<T>& prior() const { return prior_; }
  const Channel<T>& channel() const { return channel_; }
  const PosteriorTable<T>& posterior() const { return table_; }
  const std::vector<T>& output_marginal() const {
    return table_.output_marginal();
  }

  absl::StatusOr<TargetTable<T>> Target(std::vector<size_t> members) const {
    const RecordUniverse& u = prior_.universe();
    if (members.empty()) return absl::InvalidArgumentError("empty target set");
    std::sort(members.begin(), members.end());
    for (size_t j = 0; j < members.size(); ++j) {
      if (members[j] >= u.size() || (j > 0 && members[j] == members[j - 1])) {
        return absl::InvalidArgumentError(
            absl::StrCat("invalid target index ", members[j]));
      }
    }
    const SequenceSpace& space = table_.space();
    const size_t R = channel_.num_outcomes();
    TargetTable<T> t{IndexSetCoder(u, members), {}, {}, {}, {}};
    const uint64_t X = t.coder.size();
    t.mass.assign(X, T(0));
    t.joint.assign(X, std::vector<T>(R, T(0)));
    Accumulate(table_.weights(), t.coder, &t.mass, &t.joint);
    t.likelihood.assign(X, std::nullopt);
    t.via_limit.assign(X, false);
    for (uint64_t x = 0; x < X; ++x) {
      if (!IsPositive(t.mass[x])) continue;
      std::vector<T> lik(R);
      for (size_t r = 0; r < R; ++r) lik[r] = t.joint[x][r] / t.mass[x];
      t.likelihood[x] = std::move(lik);
    }
    if (!prior_.limits().empty()) AddLimitLikelihoods(space, &t);
    return t;
  }

  absl::StatusOr<LeakageReport<T>> Report(std::vector<size_t> members) const {
    PRIVLENS_ASSIGN_OR_RETURN(TargetTable<T> t, Target(members));
    const RecordUniverse& u = prior_.universe();
    const std::vector<T>& py = table_.output_marginal();
    const size_t R = channel_.num_outcomes();
    LeakageReport<T> rep;
    rep.target = t.coder.members();

    // Max-mutual information over admissible values and positive outcomes.
    bool found = false;
    for (uint64_t x = 0; x < t.coder.size(); ++x) {
      if (!t.likelihood[x]) continue;
      for (size_t r = 0; r < R; ++r) {
        // A limit record alone reaching r has ratio 1/eta -> inf in the limit.
        ExtendedRatio<T> ratio;
        if (IsPositive(py[r])) {
          ratio = ExtendedRatio<T>::Finite((*t.likelihood[x])[r] / py[r]);
        } else if (t.via_limit[x] && IsPositive((*t.likelihood[x])[r])) {
          ratio = ExtendedRatio<T>::Infinity();
        } else {
          continue;
        }
        if (!found || ratio > rep.i_inf_ratio) {
          found = true;
          rep.i_inf_ratio = ratio;
          rep.i_inf_witness = ValueOutcome{t.coder.Label(u, x), channel_.outcomes()[r]};
          rep.used_limit_records = t.via_limit[x];
        }
      }
    }
    if (!found) rep.i_inf_ratio = ExtendedRatio<T>::Finite(T(1));
    rep.i_inf = rep.i_inf_ratio.Nats();

    // Mutual information and relative entropy from the base law.
    double mi = 0;
    std::optional<double> best_rel;
    for (size_t r = 0; r < R; ++r) {
      const double pr = ToDouble(py[r]);
      if (pr <= 0) continue;
      double rel = 0;
      for (uint64_t x = 0; x < t.coder.size(); ++x) {
        const double j = ToDouble(t.joint[x][r]);
        if (j <= 0) continue;
        const double m = ToDouble(t.mass[x]);
        mi += j * std::log(j / (m * pr));
        const double post = j / pr;
        rel += post * std::log(post / m);
      }
      if (!best_rel || rel > *best_rel) {
        best_rel = rel;
        rep.max_rel_witness = channel_.outcomes()[r];
      }
    }
    rep.mi = mi;
    rep.max_rel_ent = best_rel.value_or(0.0);

    // Class-conditional likelihood ratio.
    std::vector<uint64_t> admissible;
    for (uint64_t x = 0; x < t.coder.size(); ++x) {
      if (t.likelihood[x]) admissible.push_back(x);
    }
    rep.inferential_vacuous = admissible.size() < 2;
    bool inf_found = false;
    if (!rep.inferential_vacuous) {
      for (uint64_t a : admissible) {
        for (uint64_t b : admissible) {
          if (a == b) continue;
          for (size_t r = 0; r < R; ++r) {
            ExtendedRatio<T> ratio;
            if (!MakeRatio((*t.likelihood[a])[r], (*t.likelihood[b])[r], &ratio)) {
              continue;
            }
            if (!inf_found || ratio > rep.inferential_ratio) {
              inf_found = true;
              rep.inferential_ratio = ratio;
              rep.inferential_records = {t.coder.Label(u, a), t.coder.Label(u, b)};
              rep.inferential_outcome = channel_.outcomes()[r];
            }
          }
        }
      }
    }
    if (!inf_found) rep.inferential_ratio = ExtendedRatio<T>::Finite(T(1));
    rep.inferential_eps = rep.inferential_ratio.Nats();

    double hy = 0;
    for (const T& p : py) {
      const double x = ToDouble(p);
      if (x > 0) hy -= x * std::log(x);
    }
    rep.output_entropy = hy;
    return rep;
  }

  // Max-mutual information of a single individual computed through the
  // mixture of class-conditional likelihoods over the complement, without
  // the target table. Used to cross-check the posterior route.
  ExtendedRatio<T> MaxMiRatioByMixture(size_t i) const {
    const RecordUniverse& u = prior_.universe();
    const SequenceSpace& space = table_.space();
    const size_t R = channel_.num_outcomes();
    const size_t b = prior_.BlockOf(i);
    std::vector<size_t> partners = prior_.Partners(i);
    IndexSetCoder partner_coder(u, partners);
    std::vector<T> marginal = prior_.Marginal(i);
    std::vector<std::optional<std::vector<T>>> lik(u.AlphabetSize(i));
    for (uint32_t x = 0; x < u.AlphabetSize(i); ++x) {
      std::optional<std::vector<T>> cond = prior_.PartnerConditional(i, x);
      if (!cond) continue;
      std::vector<T> l(R, T(0));
      for (uint64_t f = 0; f < space.size(); ++f) {
        if (space.Entry(f, i) != x) continue;
        T w = (*cond)[partner_coder.Encode(space, f)];
        for (size_t ob = 0; ob < prior_.num_blocks() && IsPositive(w); ++ob) {
          if (ob == b) continue;
          w *= prior_.table(ob)[prior_.BlockCode(
              ob, [&](size_t j) { return space.Entry(f, j); })];
        }
        if (IsZero(w)) continue;
        const auto& row = channel_.row(space.HistogramId(f));
        for (size_t r = 0; r < R; ++r) l[r] += w * row[r];
      }
      lik[x] = std::move(l);
    }
    std::vector<T> denom(R, T(0));
    for (uint32_t x = 0; x < lik.size(); ++x) {
      if (!lik[x] || !IsPositive(marginal[x])) continue;
      for (size_t r = 0; r < R; ++r) denom[r] += marginal[x] * (*lik[x])[r];
    }
    bool found = false;
    ExtendedRatio<T> best = ExtendedRatio<T>::Finite(T(1));
    for (uint32_t x = 0; x < lik.size(); ++x) {
      if (!lik[x]) continue;
      for (size_t r = 0; r < R; ++r) {
        ExtendedRatio<T> ratio;
        if (IsPositive(denom[r])) {
          ratio = ExtendedRatio<T>::Finite((*lik[x])[r] / denom[r]);
        } else if (!IsPositive(marginal[x]) && IsPositive((*lik[x])[r])) {
          ratio = ExtendedRatio<T>::Infinity();
        } else {
          continue;
        }
        if (!found || ratio > best) {
          found = true;
          best = ratio;
        }
      }
    }
    return best;
  }

 private:
  LeakageAnalyzer(JointPrior<T> prior, Channel<T> channel,
                  PosteriorTable<T> table)
      : prior_(std::move(prior)),
        channel_(std::move(channel)),
        table_(std::move(table)) {}

  void Accumulate(const std::vector<T>& weights, const IndexSetCoder& coder,
                  std::vector<T>* mass,
                  std::vector<std::vector<T>>* joint) const {
    const SequenceSpace& space = table_.space();
    const size_t R = channel_.num_outcomes();
    const uint64_t X = coder.size();
    const ChunkPlan plan = internal::SequenceChunks(space.size());
    std::vector<std::vector<T>> pm(plan.count(), std::vector<T>(X, T(0)));
    std::vector<std::vector<T>> pj(plan.count(), std::vector<T>(X * R, T(0)));
    ParallelForChunks(plan.count(), [&](size_t c) {
      for (uint64_t f = plan.begin(c); f < plan.end(c); ++f) {
        if (IsZero(weights[f])) continue;
        const uint64_t x = coder.Encode(space, f);
        pm[c][x] += weights[f];
        const auto& row = channel_.row(space.HistogramId(f));
        for (size_t r = 0; r < R; ++r) pj[c][x * R + r] += weights[f] * row[r];
      }
    });
    for (size_t c = 0; c < plan.count(); ++c) {
      for (uint64_t x = 0; x < X; ++x) {
        (*mass)[x] += pm[c][x];
        for (size_t r = 0; r < R; ++r) (*joint)[x][r] += pj[c][x * R + r];
      }
    }
  }

  // Block-level law for a zero-mass target value: -1 keeps the base table,
  // otherwise the index of the limit record used; nullopt when the value is
  // unreachable even in the limit.
  std::optional<std::vector<int>> LimitSignature(const TargetTable<T>& t,
                                                 uint64_t x) const {
    const RecordUniverse& u = prior_.universe();
    const auto& members = t.coder.members();
    std::vector<int> sig(prior_.num_blocks(), -1);
    for (size_t b = 0; b < prior_.num_blocks(); ++b) {
      std::vector<std::pair<size_t, uint32_t>> fixed;  // (position, value)
      const auto& block = prior_.block(b);
      for (size_t pos = 0; pos < block.size(); ++pos) {
        auto it = std::find(members.begin(), members.end(), block[pos]);
        if (it != members.end()) {
          fixed.emplace_back(pos, t.coder.Digit(x, it - members.begin()));
        }
      }
      if (fixed.empty()) continue;
      auto mass_under = [&](const std::vector<T>& table) {
        T m(0);
        for (uint64_t code = 0; code < table.size(); ++code) {
          bool match = true;
          for (auto [pos, v] : fixed) {
            if (prior_.BlockDigit(b, code, pos) != v) {
              match = false;
              break;
            }
          }
          if (match) m += table[code];
        }
        return m;
      };
      if (IsPositive(mass_under(prior_.table(b)))) continue;
      bool resolved = false;
      for (size_t l = 0; l < prior_.limits().size() && !resolved; ++l) {
        const LimitRecord<T>& lim = prior_.limits()[l];
        if (prior_.BlockOf(lim.individual) != b) continue;
        auto it = std::find(members.begin(), members.end(), lim.individual);
        if (it == members.end()) continue;
        if (t.coder.Digit(x, it - members.begin()) != lim.record) continue;
        if (IsPositive(mass_under(prior_.LimitBlockTable(lim)))) {
          sig[b] = static_cast<int>(l);
          resolved = true;
        }
      }
      if (!resolved) return std::nullopt;
      (void)u;
    }
    return sig;
  }

  void AddLimitLikelihoods(const SequenceSpace& space, TargetTable<T>* t) const {
    const size_t R = channel_.num_outcomes();
    std::map<std::vector<int>, std::vector<uint64_t>> groups;
    for (uint64_t x = 0; x < t->coder.size(); ++x) {
      if (IsPositive(t->mass[x])) continue;
      if (auto sig = LimitSignature(*t, x)) groups[*sig].push_back(x);
    }
    for (const auto& [sig, values] : groups) {
      std::vector<std::vector<T>> tables(prior_.num_blocks());
      std::vector<const std::vector<T>*> overrides(prior_.num_blocks(), nullptr);
      for (size_t b = 0; b < sig.size(); ++b) {
        if (sig[b] < 0) continue;
        tables[b] = prior_.LimitBlockTable(prior_.limits()[sig[b]]);
        overrides[b] = &tables[b];
      }
      std::vector<T> weights = prior_.SequenceWeights(space, overrides);
      std::vector<T> mass(t->coder.size(), T(0));
      std::vector<std::vector<T>> joint(t->coder.size(),
                                        std::vector<T>(R, T(0)));
      Accumulate(weights, t->coder, &mass, &joint);
      for (uint64_t x : values) {
        if (!IsPositive(mass[x])) continue;
        std::vector<T> lik(R);
        for (size_t r = 0; r < R; ++r) lik[r] = joint[x][r] / mass[x];
        t->likelihood[x] = std::move(lik);
        t->via_limit[x] = true;
      }
    }
  }

  JointPrior<T> prior_;
  Channel<T> channel_;
  PosteriorTable<T> table_;
};

// Free-function forms. Each builds an analyzer, so callers issuing many
// queries on one pair should hold a LeakageAnalyzer instead.
template <Scalar T>
absl::StatusOr<double> MaxMi(const JointPrior<T>& p, const Channel<T>& c,
                             std::vector<size_t> members) {
  PRIVLENS_ASSIGN_OR_RETURN(auto a, LeakageAnalyzer<T>::Create(p, c));
  PRIVLENS_ASSIGN_OR_RETURN(auto rep, a.Report(std::move(members)));
  return rep.i_inf;
}

template <Scalar T>
absl::StatusOr<double> MutualInformation(const JointPrior<T>& p,
                                         const Channel<T>& c,
                                         std::vector<size_t> members) {
  PRIVLENS_ASSIGN_OR_RETURN(auto a, LeakageAnalyzer<T>::Create(p, c));
  PRIVLENS_ASSIGN_OR_RETURN(auto rep, a.Report(std::move(members)));
  return rep.mi;
}

template <Scalar T>
absl::StatusOr<double> MaxRelEntropy(const JointPrior<T>& p,
                                     const Channel<T>& c, size_t i) {
  PRIVLENS_ASSIGN_OR_RETURN(auto a, LeakageAnalyzer<T>::Create(p, c));
  PRIVLENS_ASSIGN_OR_RETURN(auto rep, a.Report({i}));
  return rep.max_rel_ent;
}

template <Scalar T>
absl::StatusOr<double> InferentialEps(const JointPrior<T>& p,
                                      const Channel<T>& c, size_t i) {
  PRIVLENS_ASSIGN_OR_RETURN(auto a, LeakageAnalyzer<T>::Create(p, c));
  PRIVLENS_ASSIGN_OR_RETURN(auto rep, a.Report({i}));
  return rep.inferential_eps;
}

// Passes iff max_mi of every individual is within its budget on the ratio
// scale. The witness is the first failing individual, or the one with the
// least slack when all pass.
template <Scalar T>
absl::StatusOr<Verdict> PersonalizedCheck(const LeakageAnalyzer<T>& a,
                                          const std::vector<double>& eps) {
  const size_t n = a.prior().universe().size();
  if (eps.size() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "epsilon vector has length ", eps.size(), ", expected ", n));
  }
  std::optional<size_t> failing;
  size_t tightest = 0;
  double tightest_gap = std::numeric_limits<double>::infinity();
  std::vector<LeakageReport<T>> reports;
  for (size_t i = 0; i < n; ++i) {
    if (!(eps[i] >= 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon[", i, "] must be nonnegative"));
    }
    PRIVLENS_ASSIGN_OR_RETURN(LeakageReport<T> rep, a.Report({i}));
    const double measured = rep.i_inf_ratio.AsDouble();
    const double bound = std::exp(eps[i]);
    if (!failing && !WithinBound(measured, bound)) failing = i;
    if (bound - measured < tightest_gap) {
      tightest_gap = bound - measured;
      tightest = i;
    }
    reports.push_back(std::move(rep));
  }
  const size_t w = failing.value_or(tightest);
  Verdict v = MakeVerdict("personalized", std::exp(eps[w]),
                          reports[w].i_inf_ratio.AsDouble());
  v.satisfied = !failing.has_value();
  v.status = v.satisfied ? VerdictStatus::kSatisfied : VerdictStatus::kViolated;
  v.AddWitness("individual", absl::StrCat(w));
  if (reports[w].i_inf_witness) {
    v.AddWitness("record", reports[w].i_inf_witness->value);
    v.AddWitness("outcome", reports[w].i_inf_witness->outcome);
  }
  return v;
}

// Finite metric over labels, validated on construction.
class DistortionMetric {
 public:
  static absl::StatusOr<DistortionMetric> Create(
      std::vector<std::string> labels, std::vector<std::vector<double>> d) {
    const size_t m = labels.size();
    if (d.size() != m) {
      return absl::InvalidArgumentError("metric table must be square");
    }
    for (size_t a = 0; a < m; ++a) {
      if (d[a].size() != m) {
        return absl::InvalidArgumentError("metric table must be square");
      }
      if (d[a][a] != 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("metric: d(", labels[a], ",", labels[a], ") != 0"));
      }
      for (size_t b = 0; b < m; ++b) {
        if (d[a][b] < 0 || std::abs(d[a][b] - d[b][a]) > kTolerance) {
          return absl::InvalidArgumentError(absl::StrCat(
              "metric: d(", labels[a], ",", labels[b],
              ") is negative or asymmetric"));
        }
        for (size_t c = 0; c < m; ++c) {
          if (d[a][c] > d[a][b] + d[b][c] + kTolerance) {
            return absl::InvalidArgumentError(absl::StrCat(
                "metric: triangle inequality fails at (", labels[a], ",",
                labels[b], ",", labels[c], ")"));
          }
        }
      }
    }
    DistortionMetric metric;
    metric.labels_ = std::move(labels);
    metric.d_ = std::move(d);
    return metric;
  }

  // |u - v| over labels that parse as numbers.
  static absl::StatusOr<DistortionMetric> AbsoluteDifference(
      std::vector<std::string> labels) {
    std::vector<double> values;
    for (const auto& l : labels) {
      double v;
      if (!absl::SimpleAtod(l, &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("label '", l, "' is not numeric"));
      }
      values.push_back(v);
    }
    std::vector<std::vector<double>> d(values.size(),
                                       std::vector<double>(values.size()));
    for (size_t a = 0; a < values.size(); ++a) {
      for (size_t b = 0; b < values.size(); ++b) {
        d[a][b] = std::abs(values[a] - values[b]);
      }
    }
    return Create(std::move(labels), std::move(d));
  }

  std::optional<size_t> Find(absl::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return it - labels_.begin();
  }
  double at(size_t a, size_t b) const { return d_[a][b]; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> d_;
};

// Sum over histograms h of F_o(h) * sum_r row(h)[r] * d(f(h), r), where the
// query labels f are indexed by histogram id.
template <Scalar T>
absl::StatusOr<double> ExpectedDistortion(const JointPrior<T>& occurrence,
                                          const Channel<T>& c,
                                          const std::vector<std::string>& query,
                                          const DistortionMetric& metric) {
  PRIVLENS_RETURN_IF_ERROR(
      internal::CheckSameUniverse(occurrence.universe(), c.universe()));
  if (query.size() != c.index().size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "query defines ", query.size(), " values, universe has ",
        c.index().size(), " histograms"));
  }
  std::vector<size_t> out_ids;
  for (const auto& o : c.outcomes()) {
    auto id = metric.Find(o);
    if (!id) {
      return absl::InvalidArgumentError(
          absl::StrCat("outcome '", o, "' missing from metric"));
    }
    out_ids.push_back(*id);
  }
  double total = 0;
  for (size_t h = 0; h < c.index().size(); ++h) {
    auto q = metric.Find(query[h]);
    if (!q) {
      return absl::InvalidArgumentError(
          absl::StrCat("query value '", query[h], "' missing from metric"));
    }
    const double fo = ToDouble(occurrence.DatasetProb(c.index().at(h)));
    if (fo == 0) continue;
    double inner = 0;
    for (size_t r = 0; r < c.num_outcomes(); ++r) {
      inner += ToDouble(c.at(h, r)) * metric.at(*q, out_ids[r]);
    }
    total += fo * inner;
  }
  return total;
}

// Relabels outcomes through g (one label per outcome) and sums rows over
// preimages; new outcomes appear in first-occurrence order.
template <Scalar T>
absl::StatusOr<Channel<T>> Postprocess(const Channel<T>& c,
                                       const std::vector<std::string>& g) {
  if (g.size() != c.num_outcomes()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "outcome map has ", g.size(), " entries, channel has ",
        c.num_outcomes(), " outcomes"));
  }
  std::vector<std::string> labels;
  std::vector<size_t> target(g.size());
  for (size_t r = 0; r < g.size(); ++r) {
    auto it = std::find(labels.begin(), labels.end(), g[r]);
    if (it == labels.end()) {
      target[r] = labels.size();
      labels.push_back(g[r]);
    } else {
      target[r] = it - labels.begin();
    }
  }
  std::vector<std::vector<T>> rows;
  for (size_t h = 0; h < c.num_rows(); ++h) {
    std::vector<T> row(labels.size(), T(0));
    for (size_t r = 0; r < c.num_outcomes(); ++r) row[target[r]] += c.at(h, r);
    rows.push_back(std::move(row));
  }
  return Channel<T>::Create(c.index_ptr(), std::move(labels), std::move(rows));
}

}  // namespace privlens

#endif  // PRIVLENS_LEAKAGE_H_
