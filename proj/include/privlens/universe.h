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

// Record universes, record sequences, dataset histograms and the l1 metric.
//
// A universe is an ordered list of per-individual alphabets. The reserved
// token "⊥" (also accepted as "BOT") marks an absent record and is never part
// of the pooled alphabet, so a histogram counts only present records.

#ifndef PRIVLENS_UNIVERSE_H_
#define PRIVLENS_UNIVERSE_H_

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "privlens/scalar.h"

namespace privlens {

inline constexpr absl::string_view kBottomToken = "⊥";
inline constexpr int32_t kBottom = -1;
inline constexpr uint64_t kDefaultEnumerationBudget = 10'000'000;

inline bool IsBottomToken(absl::string_view s) {
  return s == kBottomToken || s == "BOT";
}

// Entry i is a local index into alphabet i.
struct RecordSequence {
  std::vector<uint32_t> entries;
  auto operator<=>(const RecordSequence&) const = default;
};

// Counts indexed by the pooled alphabet.
struct DatasetHistogram {
  std::vector<uint32_t> counts;
  auto operator<=>(const DatasetHistogram&) const = default;

  uint32_t Total() const {
    return std::accumulate(counts.begin(), counts.end(), 0u);
  }
  // Canonical encoding: counts in pooled order, comma separated.
  std::string Key() const { return absl::StrJoin(counts, ","); }
};

class RecordUniverse {
 public:
  static absl::StatusOr<RecordUniverse> Create(
      const std::vector<std::vector<std::string>>& alphabets) {
    if (alphabets.empty()) {
      return absl::InvalidArgumentError("universe needs at least one alphabet");
    }
    RecordUniverse u;
    absl::flat_hash_map<std::string, int32_t> pooled_ids;
    for (size_t i = 0; i < alphabets.size(); ++i) {
      if (alphabets[i].empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("alphabet ", i, " is empty"));
      }
      std::vector<std::string> names;
      std::vector<int32_t> symbols;
      std::set<std::string> seen;
      for (const std::string& raw : alphabets[i]) {
        std::string name = IsBottomToken(raw) ? std::string(kBottomToken) : raw;
        if (!seen.insert(name).second) {
          return absl::InvalidArgumentError(
              absl::StrCat("duplicate symbol '", name, "' in alphabet ", i));
        }
        if (name == kBottomToken) {
          symbols.push_back(kBottom);
        } else {
          auto [it, inserted] = pooled_ids.try_emplace(
              name, static_cast<int32_t>(u.pooled_.size()));
          if (inserted) u.pooled_.push_back(name);
          symbols.push_back(it->second);
        }
        names.push_back(std::move(name));
      }
      u.names_.push_back(std::move(names));
      u.symbols_.push_back(std::move(symbols));
    }
    return u;
  }

  size_t size() const { return names_.size(); }
  size_t AlphabetSize(size_t i) const { return names_[i].size(); }
  const std::vector<std::string>& Alphabet(size_t i) const {
    return names_[i];
  }
  const std::vector<std::string>& PooledAlphabet() const { return pooled_; }

  // Pooled id of local symbol `local` of alphabet i, or kBottom.
  int32_t Symbol(size_t i, uint32_t local) const { return symbols_[i][local]; }
  const std::string& SymbolName(size_t i, uint32_t local) const {
    return names_[i][local];
  }

  std::optional<uint32_t> LocalIndex(size_t i, absl::string_view name) const {
    std::string canonical =
        IsBottomToken(name) ? std::string(kBottomToken) : std::string(name);
    const auto& names = names_[i];
    auto it = std::find(names.begin(), names.end(), canonical);
    if (it == names.end()) return std::nullopt;
    return static_cast<uint32_t>(it - names.begin());
  }

  std::optional<int32_t> PooledIndex(absl::string_view name) const {
    auto it = std::find(pooled_.begin(), pooled_.end(), name);
    if (it == pooled_.end()) return std::nullopt;
    return static_cast<int32_t>(it - pooled_.begin());
  }

  bool HasBottom(size_t i) const {
    return std::find(symbols_[i].begin(), symbols_[i].end(), kBottom) !=
           symbols_[i].end();
  }

  // True when every alphabet holds the same symbol set.
  bool Homogeneous() const {
    std::set<std::string> first(names_[0].begin(), names_[0].end());
    for (const auto& names : names_) {
      if (std::set<std::string>(names.begin(), names.end()) != first) {
        return false;
      }
    }
    return true;
  }

  // Product of alphabet sizes, saturating at UINT64_MAX.
  uint64_t SequenceCount() const {
    uint64_t count = 1;
    for (const auto& names : names_) {
      if (count > UINT64_MAX / names.size()) return UINT64_MAX;
      count *= names.size();
    }
    return count;
  }

  absl::Status ValidateSequence(const RecordSequence& s) const {
    if (s.entries.size() != size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "sequence has ", s.entries.size(), " entries, universe has ",
          size()));
    }
    for (size_t i = 0; i < size(); ++i) {
      if (s.entries[i] >= names_[i].size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "entry ", i, " (", s.entries[i], ") outside alphabet ", i));
      }
    }
    return absl::OkStatus();
  }

  DatasetHistogram HistogramOf(const RecordSequence& s) const {
    DatasetHistogram h{std::vector<uint32_t>(pooled_.size(), 0)};
    for (size_t i = 0; i < size(); ++i) {
      int32_t symbol = symbols_[i][s.entries[i]];
      if (symbol != kBottom) ++h.counts[symbol];
    }
    return h;
  }

  std::string SequenceLabel(const RecordSequence& s) const {
    std::vector<std::string> parts;
    for (size_t i = 0; i < size(); ++i) parts.push_back(names_[i][s.entries[i]]);
    return absl::StrCat("(", absl::StrJoin(parts, ","), ")");
  }

  // Multiset rendering of a histogram, e.g. "a,a,b"; the empty dataset is
  // rendered as "∅".
  std::string HistogramLabel(const DatasetHistogram& h) const {
    std::vector<std::string> parts;
    for (size_t v = 0; v < h.counts.size(); ++v) {
      for (uint32_t c = 0; c < h.counts[v]; ++c) parts.push_back(pooled_[v]);
    }
    if (parts.empty()) return "∅";
    return absl::StrJoin(parts, ",");
  }

  bool operator==(const RecordUniverse& other) const {
    return names_ == other.names_;
  }

 private:
  RecordUniverse() = default;

  std::vector<std::vector<std::string>> names_;
  std::vector<std::vector<int32_t>> symbols_;
  std::vector<std::string> pooled_;
};

using UniversePtr = std::shared_ptr<const RecordUniverse>;

inline absl::StatusOr<DatasetHistogram> ToHistogram(const RecordUniverse& u,
                                                    const RecordSequence& s) {
  PRIVLENS_RETURN_IF_ERROR(u.ValidateSequence(s));
  return u.HistogramOf(s);
}

inline absl::StatusOr<uint64_t> Distance(const DatasetHistogram& h1,
                                         const DatasetHistogram& h2) {
  if (h1.counts.size() != h2.counts.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "incompatible universes: histograms index ", h1.counts.size(), " and ",
        h2.counts.size(), " pooled symbols"));
  }
  uint64_t d = 0;
  for (size_t v = 0; v < h1.counts.size(); ++v) {
    d += h1.counts[v] > h2.counts[v] ? h1.counts[v] - h2.counts[v]
                                     : h2.counts[v] - h1.counts[v];
  }
  return d;
}

// Lexicographic odometer over alphabet indices; the last coordinate moves
// fastest.
class SequenceOdometer {
 public:
  explicit SequenceOdometer(const RecordUniverse& u)
      : radix_(u.size()), current_{std::vector<uint32_t>(u.size(), 0)} {
    for (size_t i = 0; i < u.size(); ++i) {
      radix_[i] = static_cast<uint32_t>(u.AlphabetSize(i));
    }
  }

  const RecordSequence& current() const { return current_; }
  bool done() const { return done_; }

  void Next() {
    for (size_t i = radix_.size(); i-- > 0;) {
      if (++current_.entries[i] < radix_[i]) return;
      current_.entries[i] = 0;
    }
    done_ = true;
  }

 private:
  std::vector<uint32_t> radix_;
  RecordSequence current_;
  bool done_ = false;
};

inline absl::Status CheckEnumerationBudget(const RecordUniverse& u,
                                           uint64_t budget) {
  uint64_t count = u.SequenceCount();
  if (count > budget) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "enumeration budget exceeded: product cardinality ",
        count == UINT64_MAX ? std::string(">= 2^64") : absl::StrCat(count),
        " > budget ", budget));
  }
  return absl::OkStatus();
}

// All sequences in lexicographic order of alphabet indices.
inline absl::StatusOr<std::vector<RecordSequence>> EnumerateSequences(
    const RecordUniverse& u, uint64_t budget = kDefaultEnumerationBudget) {
  PRIVLENS_RETURN_IF_ERROR(CheckEnumerationBudget(u, budget));
  std::vector<RecordSequence> out;
  out.reserve(u.SequenceCount());
  for (SequenceOdometer it(u); !it.done(); it.Next()) {
    out.push_back(it.current());
  }
  return out;
}

// D^h: every sequence whose histogram equals h, in lexicographic order.
// Built by a depth-first search over individuals that prunes on remaining
// counts, so it never walks the full product.
inline std::vector<RecordSequence> SequencesOfDataset(
    const RecordUniverse& u, const DatasetHistogram& h) {
  std::vector<RecordSequence> out;
  if (h.counts.size() != u.PooledAlphabet().size() || h.Total() > u.size()) {
    return out;
  }
  std::vector<uint32_t> remaining = h.counts;
  RecordSequence s{std::vector<uint32_t>(u.size(), 0)};
  auto recurse = [&](auto&& self, size_t i, uint32_t left) -> void {
    if (left > u.size() - i) return;
    if (i == u.size()) {
      if (left == 0) out.push_back(s);
      return;
    }
    for (uint32_t local = 0; local < u.AlphabetSize(i); ++local) {
      int32_t symbol = u.Symbol(i, local);
      s.entries[i] = local;
      if (symbol == kBottom) {
        self(self, i + 1, left);
      } else if (remaining[symbol] > 0) {
        --remaining[symbol];
        self(self, i + 1, left - 1);
        ++remaining[symbol];
      }
    }
  };
  recurse(recurse, 0, h.Total());
  return out;
}

// The achievable histograms of a universe in lexicographic order of their
// count vectors, plus O(1) lookup and the pairwise distance table.
class HistogramIndex {
 public:
  static std::shared_ptr<const HistogramIndex> Create(UniversePtr universe) {
    auto index = std::shared_ptr<HistogramIndex>(new HistogramIndex());
    index->universe_ = std::move(universe);
    const RecordUniverse& u = *index->universe_;
    std::set<std::vector<uint32_t>> frontier = {
        std::vector<uint32_t>(u.PooledAlphabet().size(), 0)};
    for (size_t i = 0; i < u.size(); ++i) {
      std::set<std::vector<uint32_t>> next;
      for (const auto& counts : frontier) {
        for (uint32_t local = 0; local < u.AlphabetSize(i); ++local) {
          std::vector<uint32_t> grown = counts;
          if (int32_t symbol = u.Symbol(i, local); symbol != kBottom) {
            ++grown[symbol];
          }
          next.insert(std::move(grown));
        }
      }
      frontier = std::move(next);
    }
    for (const auto& counts : frontier) {
      index->lookup_.emplace(counts, index->histograms_.size());
      index->histograms_.push_back(DatasetHistogram{counts});
    }
    const size_t size = index->histograms_.size();
    index->distances_.assign(size * size, 0);
    for (size_t a = 0; a < size; ++a) {
      for (size_t b = 0; b < size; ++b) {
        index->distances_[a * size + b] = static_cast<uint32_t>(
            *Distance(index->histograms_[a], index->histograms_[b]));
      }
    }
    return index;
  }

  const RecordUniverse& universe() const { return *universe_; }
  const UniversePtr& universe_ptr() const { return universe_; }
  size_t size() const { return histograms_.size(); }
  const DatasetHistogram& at(size_t id) const { return histograms_[id]; }
  const std::vector<DatasetHistogram>& histograms() const {
    return histograms_;
  }

  std::optional<size_t> Find(const DatasetHistogram& h) const {
    auto it = lookup_.find(h.counts);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  uint32_t DistanceBetween(size_t a, size_t b) const {
    return distances_[a * histograms_.size() + b];
  }

 private:
  HistogramIndex() = default;

  UniversePtr universe_;
  std::vector<DatasetHistogram> histograms_;
  std::map<std::vector<uint32_t>, size_t> lookup_;
  std::vector<uint32_t> distances_;
};

using HistogramIndexPtr = std::shared_ptr<const HistogramIndex>;

// Flat enumeration of the sequence product with a precomputed histogram id
// per sequence. Flat index f encodes entries in mixed radix with the last
// individual least significant, matching SequenceOdometer order.
class SequenceSpace {
 public:
  static absl::StatusOr<std::shared_ptr<const SequenceSpace>> Create(
      HistogramIndexPtr index, uint64_t budget = kDefaultEnumerationBudget) {
    const RecordUniverse& u = index->universe();
    PRIVLENS_RETURN_IF_ERROR(CheckEnumerationBudget(u, budget));
    auto space = std::shared_ptr<SequenceSpace>(new SequenceSpace());
    space->index_ = std::move(index);
    const size_t n = u.size();
    space->radix_.resize(n);
    space->stride_.resize(n);
    uint64_t stride = 1;
    for (size_t i = n; i-- > 0;) {
      space->radix_[i] = static_cast<uint32_t>(u.AlphabetSize(i));
      space->stride_[i] = stride;
      stride *= u.AlphabetSize(i);
    }
    space->size_ = stride;
    space->hist_of_.resize(stride);
    uint64_t f = 0;
    for (SequenceOdometer it(u); !it.done(); it.Next(), ++f) {
      space->hist_of_[f] = static_cast<uint32_t>(
          *space->index_->Find(u.HistogramOf(it.current())));
    }
    return std::shared_ptr<const SequenceSpace>(std::move(space));
  }

  const HistogramIndex& index() const { return *index_; }
  const HistogramIndexPtr& index_ptr() const { return index_; }
  const RecordUniverse& universe() const { return index_->universe(); }
  uint64_t size() const { return size_; }
  uint32_t HistogramId(uint64_t f) const { return hist_of_[f]; }

  uint32_t Entry(uint64_t f, size_t i) const {
    return static_cast<uint32_t>((f / stride_[i]) % radix_[i]);
  }
  uint64_t Stride(size_t i) const { return stride_[i]; }

  RecordSequence At(uint64_t f) const {
    RecordSequence s{std::vector<uint32_t>(radix_.size())};
    for (size_t i = 0; i < radix_.size(); ++i) s.entries[i] = Entry(f, i);
    return s;
  }

  uint64_t FlatIndex(const RecordSequence& s) const {
    uint64_t f = 0;
    for (size_t i = 0; i < radix_.size(); ++i) f += s.entries[i] * stride_[i];
    return f;
  }

 private:
  SequenceSpace() = default;

  HistogramIndexPtr index_;
  std::vector<uint32_t> radix_;
  std::vector<uint64_t> stride_;
  uint64_t size_ = 0;
  std::vector<uint32_t> hist_of_;
};

using SequenceSpacePtr = std::shared_ptr<const SequenceSpace>;

// Mixed-radix coder for the joint value of an ordered index set, last member
// least significant.
class IndexSetCoder {
 public:
  IndexSetCoder(const RecordUniverse& u, std::vector<size_t> members)
      : members_(std::move(members)) {
    radix_.resize(members_.size());
    stride_.resize(members_.size());
    uint64_t stride = 1;
    for (size_t j = members_.size(); j-- > 0;) {
      radix_[j] = static_cast<uint32_t>(u.AlphabetSize(members_[j]));
      stride_[j] = stride;
      stride *= radix_[j];
    }
    size_ = stride;
  }

  const std::vector<size_t>& members() const { return members_; }
  uint64_t size() const { return size_; }

  uint64_t Encode(const SequenceSpace& space, uint64_t f) const {
    uint64_t code = 0;
    for (size_t j = 0; j < members_.size(); ++j) {
      code += space.Entry(f, members_[j]) * stride_[j];
    }
    return code;
  }
  uint64_t EncodeSequence(const RecordSequence& s) const {
    uint64_t code = 0;
    for (size_t j = 0; j < members_.size(); ++j) {
      code += s.entries[members_[j]] * stride_[j];
    }
    return code;
  }
  uint32_t Digit(uint64_t code, size_t j) const {
    return static_cast<uint32_t>((code / stride_[j]) % radix_[j]);
  }

  std::string Label(const RecordUniverse& u, uint64_t code) const {
    std::vector<std::string> parts;
    for (size_t j = 0; j < members_.size(); ++j) {
      parts.push_back(u.SymbolName(members_[j], Digit(code, j)));
    }
    if (parts.size() == 1) return parts[0];
    return absl::StrCat("(", absl::StrJoin(parts, ","), ")");
  }

 private:
  std::vector<size_t> members_;
  std::vector<uint32_t> radix_;
  std::vector<uint64_t> stride_;
  uint64_t size_ = 1;
};

}  // namespace privlens

#endif  // PRIVLENS_UNIVERSE_H_
