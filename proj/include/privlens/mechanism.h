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

// Channels: one output distribution per achievable dataset histogram.
// Keying rows by histogram makes every channel dataset invariant.

#ifndef PRIVLENS_MECHANISM_H_
#define PRIVLENS_MECHANISM_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "privlens/parallel.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"

namespace privlens {

template <Scalar T>
class Channel {
 public:
  // rows[h] is the output law at histogram id h of `index`.
  static absl::StatusOr<Channel> Create(HistogramIndexPtr index,
                                        std::vector<std::string> outcomes,
                                        std::vector<std::vector<T>> rows) {
    if (outcomes.empty()) {
      return absl::InvalidArgumentError("channel needs at least one outcome");
    }
    if (rows.size() != index->size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "channel has ", rows.size(), " rows, universe has ", index->size(),
          " achievable histograms"));
    }
    for (size_t h = 0; h < rows.size(); ++h) {
      const std::string key = index->at(h).Key();
      if (rows[h].size() != outcomes.size()) {
        return absl::InvalidArgumentError(
            absl::StrCat("row for histogram [", key, "] has ", rows[h].size(),
                         " entries, expected ", outcomes.size()));
      }
      T sum(0);
      for (const T& x : rows[h]) {
        if (x < T(0)) {
          return absl::InvalidArgumentError(
              absl::StrCat("row for histogram [", key, "] has a negative entry"));
        }
        sum += x;
      }
      if (std::abs(ToDouble(sum) - 1.0) > kTolerance) {
        return absl::InvalidArgumentError(
            absl::StrCat("row for histogram [", key, "] sums to ",
                         ScalarToString(sum), ", expected 1"));
      }
    }
    Channel c;
    c.index_ = std::move(index);
    c.outcomes_ = std::move(outcomes);
    c.rows_ = std::move(rows);
    return c;
  }

  const HistogramIndex& index() const { return *index_; }
  const HistogramIndexPtr& index_ptr() const { return index_; }
  const RecordUniverse& universe() const { return index_->universe(); }
  size_t num_outcomes() const { return outcomes_.size(); }
  size_t num_rows() const { return rows_.size(); }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::vector<T>& row(size_t h) const { return rows_[h]; }
  const T& at(size_t h, size_t r) const { return rows_[h][r]; }

  bool SameUniverse(const Channel& other) const {
    return universe() == other.universe();
  }

 private:
  Channel() = default;

  HistogramIndexPtr index_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<T>> rows_;
};

// Rows keyed by the canonical histogram encoding (Key()).
template <Scalar T>
absl::StatusOr<Channel<T>> MatrixChannel(
    HistogramIndexPtr index, std::vector<std::string> outcomes,
    const std::map<std::string, std::vector<T>>& rows) {
  std::vector<std::vector<T>> ordered(index->size());
  for (size_t h = 0; h < index->size(); ++h) {
    const std::string key = index->at(h).Key();
    auto it = rows.find(key);
    if (it == rows.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing row for histogram [", key, "]"));
    }
    ordered[h] = it->second;
  }
  for (const auto& [key, row] : rows) {
    bool known = false;
    for (size_t h = 0; h < index->size() && !known; ++h) {
      known = index->at(h).Key() == key;
    }
    if (!known) {
      return absl::InvalidArgumentError(
          absl::StrCat("row key [", key, "] is not an achievable histogram"));
    }
  }
  return Channel<T>::Create(std::move(index), std::move(outcomes),
                            std::move(ordered));
}

template <Scalar T>
Channel<T> ConstantChannel(HistogramIndexPtr index, std::vector<T> row,
                           std::vector<std::string> outcomes) {
  std::vector<std::vector<T>> rows(index->size(), row);
  return *Channel<T>::Create(std::move(index), std::move(outcomes),
                             std::move(rows));
}

// One outcome per histogram, labelled by the histogram multiset.
template <Scalar T>
Channel<T> IdentityChannel(HistogramIndexPtr index) {
  std::vector<std::string> outcomes;
  std::vector<std::vector<T>> rows(index->size(),
                                   std::vector<T>(index->size(), T(0)));
  for (size_t h = 0; h < index->size(); ++h) {
    outcomes.push_back(index->universe().HistogramLabel(index->at(h)));
    rows[h][h] = T(1);
  }
  return *Channel<T>::Create(std::move(index), std::move(outcomes),
                             std::move(rows));
}

template <Scalar T>
T IntegerPower(const T& base, uint32_t exponent) {
  T out(1);
  for (uint32_t e = 0; e < exponent; ++e) out *= base;
  return out;
}

// Two-sided geometric noise with ratio alpha around the count of `target`,
// with the tails folded onto outcomes 0 and m.
template <Scalar T>
absl::StatusOr<Channel<T>> GeometricCountingChannel(HistogramIndexPtr index,
                                                    absl::string_view target,
                                                    const T& alpha,
                                                    uint32_t m) {
  const RecordUniverse& u = index->universe();
  std::optional<int32_t> v = u.PooledIndex(target);
  if (!v) {
    return absl::InvalidArgumentError(
        absl::StrCat("target record '", target, "' is not in the universe"));
  }
  if (!(alpha > T(0) && alpha < T(1))) {
    return absl::InvalidArgumentError(
        "geometric ratio must lie in (0,1), i.e. epsilon > 0");
  }
  uint32_t max_count = 0;
  for (const auto& h : index->histograms()) {
    max_count = std::max(max_count, h.counts[*v]);
  }
  if (m < max_count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "outcome range {0..", m, "} is smaller than the maximal count ",
        max_count));
  }
  std::vector<std::string> outcomes;
  for (uint32_t j = 0; j <= m; ++j) outcomes.push_back(absl::StrCat(j));
  const T one(1);
  const T interior = (one - alpha) / (one + alpha);
  std::vector<std::vector<T>> rows;
  for (const auto& h : index->histograms()) {
    const uint32_t c = h.counts[*v];
    std::vector<T> row(m + 1, T(0));
    if (m == 0) {
      row[0] = one;
    } else {
      for (uint32_t j = 1; j < m; ++j) {
        row[j] = interior * IntegerPower(alpha, j > c ? j - c : c - j);
      }
      row[0] = IntegerPower(alpha, c) / (one + alpha);
      row[m] = IntegerPower(alpha, m - c) / (one + alpha);
    }
    rows.push_back(std::move(row));
  }
  return Channel<T>::Create(std::move(index), std::move(outcomes),
                            std::move(rows));
}

inline absl::StatusOr<Channel<double>> GeometricCountingChannel(
    HistogramIndexPtr index, absl::string_view target, double epsilon,
    uint32_t m) {
  if (!(epsilon > 0) || std::isinf(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  return GeometricCountingChannel<double>(std::move(index), target,
                                          std::exp(-epsilon), m);
}

// Every record is kept with probability `keep` and otherwise resampled
// uniformly from its alphabet; the output is the histogram of the perturbed
// sequence.
template <Scalar T>
absl::StatusOr<Channel<T>> RandomizedResponseChannel(HistogramIndexPtr index,
                                                     const T& keep) {
  const RecordUniverse& u = index->universe();
  if (!u.Homogeneous()) {
    return absl::InvalidArgumentError(
        "randomized response needs identical alphabets for all individuals");
  }
  if (!(keep > T(0) && keep < T(1))) {
    return absl::InvalidArgumentError("keep probability must lie in (0,1)");
  }
  const size_t pooled = u.PooledAlphabet().size();
  std::vector<std::string> outcomes;
  for (const auto& h : index->histograms()) outcomes.push_back(u.HistogramLabel(h));
  std::vector<std::vector<T>> rows;
  for (const auto& h : index->histograms()) {
    RecordSequence s = SequencesOfDataset(u, h).front();
    std::map<std::vector<uint32_t>, T> law = {
        {std::vector<uint32_t>(pooled, 0), T(1)}};
    for (size_t i = 0; i < u.size(); ++i) {
      const T size(static_cast<int>(u.AlphabetSize(i)));
      const std::string& input = u.SymbolName(i, s.entries[i]);
      std::map<std::vector<uint32_t>, T> next;
      for (const auto& [counts, mass] : law) {
        for (uint32_t o = 0; o < u.AlphabetSize(i); ++o) {
          T k = (T(1) - keep) / size;
          if (u.SymbolName(i, o) == input) k += keep;
          std::vector<uint32_t> grown = counts;
          if (int32_t sym = u.Symbol(i, o); sym != kBottom) ++grown[sym];
          auto [it, inserted] = next.try_emplace(std::move(grown), T(0));
          it->second += mass * k;
        }
      }
      law = std::move(next);
    }
    std::vector<T> row(index->size(), T(0));
    for (const auto& [counts, mass] : law) {
      row[*index->Find(DatasetHistogram{counts})] = mass;
    }
    rows.push_back(std::move(row));
  }
  return Channel<T>::Create(std::move(index), std::move(outcomes),
                            std::move(rows));
}

// Maximal row ratio with its arg-max (numerator histogram, denominator
// histogram, outcome).
template <Scalar T>
struct RatioWitness {
  ExtendedRatio<T> ratio;
  bool found = false;
  size_t numerator = 0;
  size_t denominator = 0;
  size_t outcome = 0;

  double Nats() const { return found ? ratio.Nats() : 0.0; }
};

// Scans ordered histogram pairs with min_d <= distance <= max_d. The scan is
// partitioned by outcome; ties keep the smallest outcome, then the smallest
// numerator and denominator ids.
template <Scalar T>
RatioWitness<T> MaxRowRatio(const Channel<T>& c, uint32_t min_d,
                            uint32_t max_d) {
  const HistogramIndex& index = c.index();
  std::vector<RatioWitness<T>> per_outcome(c.num_outcomes());
  ParallelForChunks(c.num_outcomes(), [&](size_t r) {
    RatioWitness<T>& best = per_outcome[r];
    for (size_t a = 0; a < index.size(); ++a) {
      for (size_t b = 0; b < index.size(); ++b) {
        uint32_t d = index.DistanceBetween(a, b);
        if (d < min_d || d > max_d) continue;
        ExtendedRatio<T> ratio;
        if (!MakeRatio(c.at(a, r), c.at(b, r), &ratio)) continue;
        if (!best.found || ratio > best.ratio) {
          best = {std::move(ratio), true, a, b, r};
        }
      }
    }
  });
  RatioWitness<T> best;
  for (auto& w : per_outcome) {
    if (w.found && (!best.found || w.ratio > best.ratio)) best = std::move(w);
  }
  return best;
}

// exp of the least epsilon satisfying the neighbor ratio condition; the
// ratio is 1 when no distance-1 pair exists.
template <Scalar T>
RatioWitness<T> DpRatio(const Channel<T>& c) {
  RatioWitness<T> w = MaxRowRatio(c, 1, 1);
  if (!w.found || w.ratio < ExtendedRatio<T>::Finite(T(1))) {
    w.ratio = ExtendedRatio<T>::Finite(T(1));
  }
  return w;
}

template <Scalar T>
double DpEpsilon(const Channel<T>& c) {
  return DpRatio(c).ratio.Nats();
}

template <Scalar T>
RatioWitness<T> LipschitzRatio(const Channel<T>& c, uint32_t k) {
  RatioWitness<T> w = MaxRowRatio(c, 0, k);
  if (!w.found) w.ratio = ExtendedRatio<T>::Finite(T(1));
  return w;
}

struct GroupBound {
  double value = 1;
  bool unbounded = false;
};

template <Scalar T>
GroupBound GroupRatioBound(const Channel<T>& c, uint32_t s) {
  double eps = DpEpsilon(c);
  if (std::isinf(eps)) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {std::exp(s * eps), false};
}

}  // namespace privlens

#endif  // PRIVLENS_MECHANISM_H_
