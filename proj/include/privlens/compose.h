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

// Composition: several mechanisms on one dataset (product channels), and
// one mechanism per epoch on per-epoch datasets of the same individuals.

#ifndef PRIVLENS_COMPOSE_H_
#define PRIVLENS_COMPOSE_H_

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "privlens/audit.h"
#include "privlens/leakage.h"
#include "privlens/mechanism.h"
#include "privlens/parallel.h"
#include "privlens/prior.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"
#include "privlens/verdict.h"

namespace privlens {

namespace internal {

// Lexicographic product of per-component outcome rows; the last component
// moves fastest.
template <Scalar T>
std::vector<T> ProductRow(const std::vector<const std::vector<T>*>& rows) {
  std::vector<T> out = {T(1)};
  for (const auto* row : rows) {
    std::vector<T> next;
    next.reserve(out.size() * row->size());
    for (const T& a : out) {
      for (const T& b : *row) next.push_back(a * b);
    }
    out = std::move(next);
  }
  return out;
}

inline std::vector<std::string> ProductLabels(
    const std::vector<const std::vector<std::string>*>& labels) {
  std::vector<std::string> out = {""};
  bool first = true;
  for (const auto* component : labels) {
    std::vector<std::string> next;
    for (const std::string& a : out) {
      for (const std::string& b : *component) {
        next.push_back(first ? b : absl::StrCat(a, ";", b));
      }
    }
    out = std::move(next);
    first = false;
  }
  return out;
}

}  // namespace internal

// Joint output of independent mechanisms run on the same dataset. Outcome
// labels are "r1;r2;...".
template <Scalar T>
absl::StatusOr<Channel<T>> ProductChannel(const std::vector<Channel<T>>& channels) {
  if (channels.empty()) {
    return absl::InvalidArgumentError("product needs at least one channel");
  }
  for (size_t j = 1; j < channels.size(); ++j) {
    if (!channels[j].SameUniverse(channels[0])) {
      return absl::InvalidArgumentError(
          absl::StrCat("channel ", j, " is defined on a different universe"));
    }
  }
  std::vector<const std::vector<std::string>*> labels;
  for (const auto& c : channels) labels.push_back(&c.outcomes());
  std::vector<std::vector<T>> rows;
  for (size_t h = 0; h < channels[0].num_rows(); ++h) {
    std::vector<const std::vector<T>*> parts;
    for (const auto& c : channels) parts.push_back(&c.row(h));
    rows.push_back(internal::ProductRow(parts));
  }
  return Channel<T>::Create(channels[0].index_ptr(), internal::ProductLabels(labels),
                            std::move(rows));
}

// Each component must pass certify_pk at its own epsilon and the prior must
// have blocks of size <= k; measured is the largest exp(max_mi) of any
// individual under the product channel, bound exp(sum eps).
template <Scalar T>
absl::StatusOr<Verdict> CertifyBasicComposition(
    const JointPrior<T>& prior, const std::vector<Channel<T>>& channels,
    const std::vector<Epsilon>& eps, size_t k,
    uint64_t budget = kDefaultEnumerationBudget) {
  if (channels.size() != eps.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        channels.size(), " channels but ", eps.size(), " epsilons"));
  }
  if (channels.empty()) {
    return absl::InvalidArgumentError("composition needs at least one channel");
  }
  std::vector<std::string> failures;
  for (size_t j = 0; j < channels.size(); ++j) {
    PRIVLENS_ASSIGN_OR_RETURN(Verdict v, CertifyPk(channels[j], k, eps[j], budget));
    if (!v.satisfied) {
      failures.push_back(absl::StrCat("channel ", j, " violates its certify_pk: ",
                                      v.measured, " > ", v.bound));
    }
  }
  FamilyParams family;
  family.k = k;
  PRIVLENS_RETURN_IF_ERROR(family.Validate(prior.universe().size()));
  if (!CheckMembership(prior, family).in_pk) {
    failures.push_back(absl::StrCat("prior has a block larger than k=", k));
  }
  if (!failures.empty()) {
    Verdict v = PreconditionFailed("basic_composition", failures[0]);
    for (size_t j = 1; j < failures.size(); ++j) v.AddNote(failures[j]);
    return v;
  }
  double total_nats = 0;
  for (const Epsilon& e : eps) total_nats += e.nats;
  PRIVLENS_ASSIGN_OR_RETURN(Channel<T> product, ProductChannel(channels));
  PRIVLENS_ASSIGN_OR_RETURN(auto analyzer,
                            LeakageAnalyzer<T>::Create(prior, product, budget));
  std::optional<std::pair<size_t, LeakageReport<T>>> worst;
  for (size_t i = 0; i < prior.universe().size(); ++i) {
    PRIVLENS_ASSIGN_OR_RETURN(auto rep, analyzer.Report({i}));
    if (!worst || rep.i_inf_ratio > worst->second.i_inf_ratio) {
      worst.emplace(i, std::move(rep));
    }
  }
  // With every budget given as an exact ratio the bound is their product.
  std::optional<Rational> exact_bound = Rational(1);
  for (const Epsilon& e : eps) {
    auto r = e.exact_ratio ? ParseRational(*e.exact_ratio)
                           : absl::StatusOr<Rational>(absl::UnknownError(""));
    if (!r.ok()) {
      exact_bound.reset();
      break;
    }
    *exact_bound *= *r;
  }
  const double bound = exact_bound ? ToDouble(*exact_bound) : std::exp(total_nats);
  Verdict v = MakeVerdict("basic_composition", bound,
                          worst->second.i_inf_ratio.AsDouble());
  if (exact_bound) v.bound_exact = ScalarToString(*exact_bound);
  if constexpr (kIsExact<T>) v.measured_exact = worst->second.i_inf_ratio.ExactString();
  v.AddWitness("individual", absl::StrCat(worst->first));
  if (worst->second.i_inf_witness) {
    v.AddWitness("record", worst->second.i_inf_witness->value);
    v.AddWitness("outcome", worst->second.i_inf_witness->outcome);
  }
  return v;
}

// One (prior, channel) pair per epoch over the same individuals.
template <Scalar T>
struct EpochModel {
  std::vector<std::pair<JointPrior<T>, Channel<T>>> epochs;
  // The epoch pairs (X^t, Y^t) are mutually independent.
  bool independent = false;

  absl::Status Validate() const {
    if (epochs.empty()) return absl::InvalidArgumentError("no epochs");
    const size_t n = epochs[0].first.universe().size();
    for (size_t t = 0; t < epochs.size(); ++t) {
      const auto& [p, c] = epochs[t];
      if (p.universe().size() != n) {
        return absl::InvalidArgumentError(absl::StrCat(
            "epoch ", t, " has ", p.universe().size(), " individuals, epoch 0 has ", n));
      }
      if (!(p.universe() == c.universe())) {
        return absl::InvalidArgumentError(
            absl::StrCat("epoch ", t, ": prior and channel universes differ"));
      }
    }
    return absl::OkStatus();
  }
};

namespace internal {

// Universe of all epochs side by side; individual t*n + i is X_i^t and each
// non-bottom symbol is tagged with its epoch so per-epoch histograms can be
// read back from the pooled one.
template <Scalar T>
absl::StatusOr<UniversePtr> StackedUniverse(const EpochModel<T>& m) {
  std::vector<std::vector<std::string>> alphabets;
  for (size_t t = 0; t < m.epochs.size(); ++t) {
    const RecordUniverse& u = m.epochs[t].first.universe();
    for (size_t i = 0; i < u.size(); ++i) {
      std::vector<std::string> names;
      for (uint32_t x = 0; x < u.AlphabetSize(i); ++x) {
        names.push_back(u.Symbol(i, x) == kBottom
                            ? std::string(kBottomToken)
                            : absl::StrCat("e", t, ".", u.SymbolName(i, x)));
      }
      alphabets.push_back(std::move(names));
    }
  }
  PRIVLENS_ASSIGN_OR_RETURN(RecordUniverse u, RecordUniverse::Create(alphabets));
  return std::make_shared<const RecordUniverse>(std::move(u));
}

// Channel of the stacked universe that applies epoch t's mechanism to the
// epoch-t part of the dataset, outcomes in lexicographic product order.
template <Scalar T>
absl::StatusOr<Channel<T>> StackedChannel(const EpochModel<T>& m,
                                          HistogramIndexPtr index) {
  const RecordUniverse& su = index->universe();
  std::vector<const std::vector<std::string>*> labels;
  for (const auto& e : m.epochs) labels.push_back(&e.second.outcomes());
  std::vector<std::vector<T>> rows;
  for (size_t h = 0; h < index->size(); ++h) {
    const DatasetHistogram& stacked = index->at(h);
    std::vector<const std::vector<T>*> parts;
    for (size_t t = 0; t < m.epochs.size(); ++t) {
      const Channel<T>& c = m.epochs[t].second;
      const RecordUniverse& u = c.universe();
      const std::string prefix = absl::StrCat("e", t, ".");
      DatasetHistogram local{std::vector<uint32_t>(u.PooledAlphabet().size(), 0)};
      for (size_t v = 0; v < stacked.counts.size(); ++v) {
        const std::string& name = su.PooledAlphabet()[v];
        if (name.rfind(prefix, 0) != 0) continue;
        auto id = u.PooledIndex(name.substr(prefix.size()));
        if (!id) return absl::InternalError("stacked symbol without origin");
        local.counts[*id] = stacked.counts[v];
      }
      auto local_id = c.index().Find(local);
      if (!local_id) return absl::InternalError("stacked histogram without origin");
      parts.push_back(&c.row(*local_id));
    }
    rows.push_back(ProductRow(parts));
  }
  return Channel<T>::Create(std::move(index), ProductLabels(labels), std::move(rows));
}

}  // namespace internal

template <Scalar T>
struct EpochLeakage {
  std::vector<double> per_epoch_nats;
  std::vector<ExtendedRatio<T>> per_epoch_ratio;
  double total_nats = 0;
  ExtendedRatio<T> total_ratio = ExtendedRatio<T>::Finite(T(1));
  // I_inf of the epoch tuple computed on the joint model, when it fits.
  std::optional<double> direct_nats;
  std::optional<ExtendedRatio<T>> direct_ratio;
  std::vector<std::string> notes;
};

// Leakage of individual i across independent epochs: the per-epoch values
// and their sum, cross-checked against the joint of all epochs.
template <Scalar T>
absl::StatusOr<EpochLeakage<T>> EpochLeakageOf(const EpochModel<T>& m, size_t i,
                                               uint64_t budget = kDefaultEnumerationBudget) {
  PRIVLENS_RETURN_IF_ERROR(m.Validate());
  if (!m.independent) {
    return absl::InvalidArgumentError(
        "epoch leakage needs mutually independent epochs; dependence across "
        "epochs is not supported");
  }
  const size_t n = m.epochs[0].first.universe().size();
  if (i >= n) return absl::InvalidArgumentError("individual out of range");
  const size_t E = m.epochs.size();
  std::vector<absl::StatusOr<LeakageReport<T>>> reports(
      E, absl::UnknownError("not computed"));
  ParallelForChunks(E, [&](size_t t) {
    auto a = LeakageAnalyzer<T>::Create(m.epochs[t].first, m.epochs[t].second, budget);
    if (!a.ok()) {
      reports[t] = a.status();
      return;
    }
    reports[t] = a->Report({i});
  });
  EpochLeakage<T> out;
  for (size_t t = 0; t < E; ++t) {
    PRIVLENS_RETURN_IF_ERROR(reports[t].status());
    out.per_epoch_nats.push_back(reports[t]->i_inf);
    out.per_epoch_ratio.push_back(reports[t]->i_inf_ratio);
    out.total_nats += reports[t]->i_inf;
    const auto& r = reports[t]->i_inf_ratio;
    if (r.infinite || out.total_ratio.infinite) {
      out.total_ratio = ExtendedRatio<T>::Infinity();
    } else {
      out.total_ratio.value *= r.value;
    }
  }
  // Direct recomputation on the stacked model.
  uint64_t count = 1;
  bool fits = true;
  for (const auto& e : m.epochs) {
    const uint64_t c = e.first.universe().SequenceCount();
    if (c > budget / count) {
      fits = false;
      break;
    }
    count *= c;
  }
  if (!fits) {
    out.notes.push_back("joint recomputation skipped: over budget");
    return out;
  }
  PRIVLENS_ASSIGN_OR_RETURN(UniversePtr su, internal::StackedUniverse(m));
  std::vector<std::vector<size_t>> blocks;
  std::vector<std::vector<T>> tables;
  std::vector<LimitRecord<T>> limits;
  for (size_t t = 0; t < E; ++t) {
    const JointPrior<T>& p = m.epochs[t].first;
    for (size_t b = 0; b < p.num_blocks(); ++b) {
      std::vector<size_t> block;
      for (size_t j : p.block(b)) block.push_back(t * n + j);
      blocks.push_back(std::move(block));
      tables.push_back(p.table(b));
    }
    for (const auto& lim : p.limits()) {
      limits.push_back({t * n + lim.individual, lim.record, lim.conditional});
    }
  }
  PRIVLENS_ASSIGN_OR_RETURN(
      JointPrior<T> joint,
      JointPrior<T>::Create(su, std::move(blocks), std::move(tables), std::move(limits)));
  auto index = HistogramIndex::Create(su);
  PRIVLENS_ASSIGN_OR_RETURN(Channel<T> stacked, internal::StackedChannel(m, index));
  PRIVLENS_ASSIGN_OR_RETURN(auto analyzer,
                            LeakageAnalyzer<T>::Create(joint, stacked, budget));
  std::vector<size_t> target;
  for (size_t t = 0; t < E; ++t) target.push_back(t * n + i);
  PRIVLENS_ASSIGN_OR_RETURN(auto rep, analyzer.Report(target));
  out.direct_nats = rep.i_inf;
  out.direct_ratio = rep.i_inf_ratio;
  return out;
}

template <Scalar T>
struct EqualEpochResult {
  double nats = 0;
  ExtendedRatio<T> ratio;
  double direct_nats = 0;
  ExtendedRatio<T> direct_ratio;
};

namespace internal {

template <Scalar T>
bool SamePrior(const JointPrior<T>& a, const JointPrior<T>& b) {
  if (!(a.universe() == b.universe()) || a.num_blocks() != b.num_blocks()) return false;
  for (size_t j = 0; j < a.num_blocks(); ++j) {
    if (a.block(j) != b.block(j) || a.table(j) != b.table(j)) return false;
  }
  return a.limits().empty() && b.limits().empty();
}

}  // namespace internal

// Every epoch observes the same record variable, so the leakage of the
// replicated tuple equals the leakage of one copy to all outputs together.
template <Scalar T>
absl::StatusOr<EqualEpochResult<T>> EqualEpochReduction(
    const EpochModel<T>& m, size_t i, uint64_t budget = kDefaultEnumerationBudget) {
  PRIVLENS_RETURN_IF_ERROR(m.Validate());
  const JointPrior<T>& p = m.epochs[0].first;
  for (size_t t = 1; t < m.epochs.size(); ++t) {
    if (!internal::SamePrior(p, m.epochs[t].first)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "epoch ", t, " prior is not a replica of epoch 0 (tables differ or "
          "limit records present)"));
    }
  }
  if (!p.limits().empty()) {
    return absl::InvalidArgumentError("replicated priors cannot carry limit records");
  }
  const size_t n = p.universe().size();
  if (i >= n) return absl::InvalidArgumentError("individual out of range");
  std::vector<Channel<T>> channels;
  for (const auto& e : m.epochs) channels.push_back(e.second);
  PRIVLENS_ASSIGN_OR_RETURN(Channel<T> product, ProductChannel(channels));
  PRIVLENS_ASSIGN_OR_RETURN(auto collapsed, LeakageAnalyzer<T>::Create(p, product, budget));
  PRIVLENS_ASSIGN_OR_RETURN(auto rep, collapsed.Report({i}));
  EqualEpochResult<T> out;
  out.nats = rep.i_inf;
  out.ratio = rep.i_inf_ratio;

  // Direct: stacked universe whose blocks tie the copies together.
  const size_t E = m.epochs.size();
  PRIVLENS_ASSIGN_OR_RETURN(UniversePtr su, internal::StackedUniverse(m));
  PRIVLENS_RETURN_IF_ERROR(CheckEnumerationBudget(*su, budget));
  std::vector<std::vector<size_t>> blocks;
  std::vector<std::vector<T>> tables;
  for (size_t b = 0; b < p.num_blocks(); ++b) {
    const auto& members = p.block(b);
    std::vector<size_t> block;
    for (size_t t = 0; t < E; ++t) {
      for (size_t j : members) block.push_back(t * n + j);
    }
    // Block order above is already sorted: epoch-major, members ascending.
    IndexSetCoder local(p.universe(), members);
    IndexSetCoder stacked(*su, block);
    std::vector<T> table(stacked.size(), T(0));
    for (uint64_t code = 0; code < local.size(); ++code) {
      RecordSequence s{std::vector<uint32_t>(su->size(), 0)};
      for (size_t t = 0; t < E; ++t) {
        for (size_t j = 0; j < members.size(); ++j) {
          s.entries[t * n + members[j]] = local.Digit(code, j);
        }
      }
      table[stacked.EncodeSequence(s)] = p.table(b)[code];
    }
    blocks.push_back(std::move(block));
    tables.push_back(std::move(table));
  }
  PRIVLENS_ASSIGN_OR_RETURN(JointPrior<T> joint,
                            JointPrior<T>::Create(su, std::move(blocks), std::move(tables)));
  auto index = HistogramIndex::Create(su);
  PRIVLENS_ASSIGN_OR_RETURN(Channel<T> stacked, internal::StackedChannel(m, index));
  PRIVLENS_ASSIGN_OR_RETURN(auto direct, LeakageAnalyzer<T>::Create(joint, stacked, budget));
  std::vector<size_t> target;
  for (size_t t = 0; t < E; ++t) target.push_back(t * n + i);
  PRIVLENS_ASSIGN_OR_RETURN(auto drep, direct.Report(target));
  out.direct_nats = drep.i_inf;
  out.direct_ratio = drep.i_inf_ratio;
  if (std::abs(out.direct_nats - out.nats) > kTolerance &&
      !(std::isinf(out.direct_nats) && std::isinf(out.nats))) {
    return absl::InternalError(absl::StrCat(
        "equal-epoch reduction mismatch: collapsed ", out.nats, " vs direct ",
        out.direct_nats));
  }
  return out;
}

}  // namespace privlens

#endif  // PRIVLENS_COMPOSE_H_
