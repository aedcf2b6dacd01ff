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

// Joint priors over record sequences.
//
// A prior is a partition of the individuals into blocks with one probability
// table per block; blocks are mutually independent. Tables are flat and
// row-major over the block's alphabets in universe order (the member with the
// largest index moves fastest).
//
// A prior may also declare limit records: a record x of individual i with zero
// prior mass together with the conditional law of i's block partners given
// X_i = x. This is the point-mass limit of moving a vanishing amount of mass
// onto x, and is what makes the extremal constructions expressible. Leakage
// maxima range over limit records as well (see leakage.h); entropy,
// dataset_prob and the output law ignore them.

#ifndef PRIVLENS_PRIOR_H_
#define PRIVLENS_PRIOR_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"

namespace privlens {

template <Scalar T>
struct LimitRecord {
  size_t individual = 0;
  uint32_t record = 0;
  // Law of the block partners (block members other than `individual`, in
  // universe order) given X_individual = record.
  std::vector<T> conditional;
};

template <Scalar T>
class JointPrior {
 public:
  static absl::StatusOr<JointPrior> Create(
      UniversePtr universe, std::vector<std::vector<size_t>> blocks,
      std::vector<std::vector<T>> tables,
      std::vector<LimitRecord<T>> limits = {}) {
    const RecordUniverse& u = *universe;
    const size_t n = u.size();
    if (blocks.size() != tables.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          blocks.size(), " blocks but ", tables.size(), " tables"));
    }
    JointPrior p;
    p.universe_ = std::move(universe);
    p.block_of_.assign(n, SIZE_MAX);
    p.position_.assign(n, 0);
    for (size_t b = 0; b < blocks.size(); ++b) {
      std::vector<size_t> block = blocks[b];
      std::sort(block.begin(), block.end());
      if (block.empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("block ", b, " is empty"));
      }
      for (size_t j = 0; j < block.size(); ++j) {
        size_t i = block[j];
        if (i >= n) {
          return absl::InvalidArgumentError(
              absl::StrCat("block ", b, " names individual ", i,
                           " outside [0,", n, ")"));
        }
        if (p.block_of_[i] != SIZE_MAX) {
          return absl::InvalidArgumentError(absl::StrCat(
              "individual ", i, " appears in more than one block"));
        }
        p.block_of_[i] = b;
        p.position_[i] = j;
      }
      uint64_t cells = 1;
      for (size_t i : block) cells *= u.AlphabetSize(i);
      if (tables[b].size() != cells) {
        return absl::InvalidArgumentError(
            absl::StrCat("table ", b, " has ", tables[b].size(),
                         " entries, block needs ", cells));
      }
      PRIVLENS_RETURN_IF_ERROR(
          CheckDistribution(tables[b], absl::StrCat("table ", b)));
      p.blocks_.push_back(std::move(block));
    }
    for (size_t i = 0; i < n; ++i) {
      if (p.block_of_[i] == SIZE_MAX) {
        return absl::InvalidArgumentError(
            absl::StrCat("individual ", i, " is not covered by any block"));
      }
    }
    p.tables_ = std::move(tables);
    p.ComputeStrides();
    for (size_t r = 0; r < limits.size(); ++r) {
      PRIVLENS_RETURN_IF_ERROR(p.AddLimit(std::move(limits[r]), r));
    }
    return p;
  }

  // Product of independent per-individual marginals.
  static absl::StatusOr<JointPrior> Independent(
      UniversePtr universe, std::vector<std::vector<T>> marginals) {
    std::vector<std::vector<size_t>> blocks;
    for (size_t i = 0; i < universe->size(); ++i) blocks.push_back({i});
    return Create(std::move(universe), std::move(blocks),
                  std::move(marginals));
  }

  static JointPrior Uniform(UniversePtr universe) {
    std::vector<std::vector<T>> marginals;
    for (size_t i = 0; i < universe->size(); ++i) {
      size_t m = universe->AlphabetSize(i);
      marginals.push_back(std::vector<T>(m, T(1) / T(static_cast<int>(m))));
    }
    return *Independent(std::move(universe), std::move(marginals));
  }

  const RecordUniverse& universe() const { return *universe_; }
  const UniversePtr& universe_ptr() const { return universe_; }
  size_t num_blocks() const { return blocks_.size(); }
  const std::vector<size_t>& block(size_t b) const { return blocks_[b]; }
  const std::vector<T>& table(size_t b) const { return tables_[b]; }
  size_t BlockOf(size_t i) const { return block_of_[i]; }
  const std::vector<LimitRecord<T>>& limits() const { return limits_; }

  size_t MaxBlockSize() const {
    size_t m = 0;
    for (const auto& b : blocks_) m = std::max(m, b.size());
    return m;
  }

  // Partners of i: the other members of i's block, in universe order.
  std::vector<size_t> Partners(size_t i) const {
    std::vector<size_t> out;
    for (size_t j : blocks_[block_of_[i]]) {
      if (j != i) out.push_back(j);
    }
    return out;
  }

  // Index into table(b) of the block values selected by `entry(j)`.
  template <typename EntryFn>
  uint64_t BlockCode(size_t b, EntryFn&& entry) const {
    uint64_t code = 0;
    const auto& members = blocks_[b];
    for (size_t j = 0; j < members.size(); ++j) {
      code += entry(members[j]) * strides_[b][j];
    }
    return code;
  }
  uint32_t BlockDigit(size_t b, uint64_t code, size_t j) const {
    return static_cast<uint32_t>(
        (code / strides_[b][j]) % universe_->AlphabetSize(blocks_[b][j]));
  }

  absl::StatusOr<T> JointProb(const RecordSequence& s) const {
    PRIVLENS_RETURN_IF_ERROR(universe_->ValidateSequence(s));
    return JointProbUnchecked(s);
  }

  T JointProbUnchecked(const RecordSequence& s) const {
    T prob(1);
    for (size_t b = 0; b < blocks_.size(); ++b) {
      prob *= tables_[b][BlockCode(b, [&](size_t i) { return s.entries[i]; })];
      if (IsZero(prob)) break;
    }
    return prob;
  }

  T DatasetProb(const DatasetHistogram& h) const {
    T total(0);
    for (const RecordSequence& s : SequencesOfDataset(*universe_, h)) {
      total += JointProbUnchecked(s);
    }
    return total;
  }

  std::vector<T> Marginal(size_t i) const {
    const size_t b = block_of_[i];
    std::vector<T> out(universe_->AlphabetSize(i), T(0));
    for (uint64_t code = 0; code < tables_[b].size(); ++code) {
      out[BlockDigit(b, code, position_[i])] += tables_[b][code];
    }
    return out;
  }

  const LimitRecord<T>* FindLimit(size_t i, uint32_t record) const {
    for (const auto& lim : limits_) {
      if (lim.individual == i && lim.record == record) return &lim;
    }
    return nullptr;
  }

  // The block table of the limit law: X_i fixed at the limit record and the
  // partners distributed by the declared conditional.
  std::vector<T> LimitBlockTable(const LimitRecord<T>& lim) const {
    const size_t b = block_of_[lim.individual];
    std::vector<T> out(tables_[b].size(), T(0));
    const size_t pos = position_[lim.individual];
    for (uint64_t code = 0; code < out.size(); ++code) {
      if (BlockDigit(b, code, pos) != lim.record) continue;
      out[code] = lim.conditional[PartnerCode(b, pos, code)];
    }
    return out;
  }

  // Conditional law of the partners of i given X_i = x, or nullopt when x has
  // zero prior mass and no declared limit law.
  std::optional<std::vector<T>> PartnerConditional(size_t i,
                                                   uint32_t x) const {
    const size_t b = block_of_[i];
    const size_t pos = position_[i];
    std::vector<T> marginal = Marginal(i);
    if (IsPositive(marginal[x])) {
      std::vector<T> out(PartnerCells(i), T(0));
      for (uint64_t code = 0; code < tables_[b].size(); ++code) {
        if (BlockDigit(b, code, pos) != x) continue;
        out[PartnerCode(b, pos, code)] += tables_[b][code] / marginal[x];
      }
      return out;
    }
    if (const LimitRecord<T>* lim = FindLimit(i, x)) return lim->conditional;
    return std::nullopt;
  }

  uint64_t PartnerCells(size_t i) const {
    uint64_t cells = 1;
    for (size_t j : Partners(i)) cells *= universe_->AlphabetSize(j);
    return cells;
  }

  // Probabilities of every sequence of `space`; `overrides[b]`, when non-null,
  // replaces table b.
  std::vector<T> SequenceWeights(
      const SequenceSpace& space,
      const std::vector<const std::vector<T>*>& overrides = {}) const {
    std::vector<T> out(space.size(), T(1));
    for (size_t b = 0; b < blocks_.size(); ++b) {
      const std::vector<T>& tab =
          (b < overrides.size() && overrides[b]) ? *overrides[b] : tables_[b];
      for (uint64_t f = 0; f < space.size(); ++f) {
        if (IsZero(out[f])) continue;
        out[f] *= tab[BlockCode(b, [&](size_t i) { return space.Entry(f, i); })];
      }
    }
    return out;
  }

  bool operator==(const JointPrior& other) const {
    return *universe_ == *other.universe_ && blocks_ == other.blocks_ &&
           tables_ == other.tables_ && LimitsEqual(other);
  }

 private:
  JointPrior() = default;

  static absl::Status CheckDistribution(const std::vector<T>& table,
                                        absl::string_view what) {
    T sum(0);
    for (size_t c = 0; c < table.size(); ++c) {
      if (table[c] < T(0)) {
        return absl::InvalidArgumentError(
            absl::StrCat(what, " has negative entry at cell ", c));
      }
      sum += table[c];
    }
    if (std::abs(ToDouble(sum) - 1.0) > kTolerance) {
      return absl::InvalidArgumentError(absl::StrCat(
          what, " sums to ", ScalarToString(sum), ", expected 1"));
    }
    return absl::OkStatus();
  }

  void ComputeStrides() {
    strides_.clear();
    for (const auto& block : blocks_) {
      std::vector<uint64_t> s(block.size());
      uint64_t stride = 1;
      for (size_t j = block.size(); j-- > 0;) {
        s[j] = stride;
        stride *= universe_->AlphabetSize(block[j]);
      }
      strides_.push_back(std::move(s));
    }
  }

  // Row-major index over the partners of position `pos` in block b.
  uint64_t PartnerCode(size_t b, size_t pos, uint64_t code) const {
    uint64_t out = 0;
    uint64_t stride = 1;
    const auto& members = blocks_[b];
    for (size_t j = members.size(); j-- > 0;) {
      if (j == pos) continue;
      out += BlockDigit(b, code, j) * stride;
      stride *= universe_->AlphabetSize(members[j]);
    }
    return out;
  }

  absl::Status AddLimit(LimitRecord<T> lim, size_t r) {
    const std::string what = absl::StrCat("limit record ", r);
    if (lim.individual >= universe_->size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, ": individual out of range"));
    }
    if (lim.record >= universe_->AlphabetSize(lim.individual)) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, ": record outside alphabet"));
    }
    if (IsPositive(Marginal(lim.individual)[lim.record])) {
      return absl::InvalidArgumentError(absl::StrCat(
          what, ": record already has positive prior mass"));
    }
    if (lim.conditional.size() != PartnerCells(lim.individual)) {
      return absl::InvalidArgumentError(absl::StrCat(
          what, ": conditional has ", lim.conditional.size(),
          " entries, partners need ", PartnerCells(lim.individual)));
    }
    PRIVLENS_RETURN_IF_ERROR(CheckDistribution(lim.conditional, what));
    const size_t b = block_of_[lim.individual];
    for (const auto& other : limits_) {
      if (block_of_[other.individual] != b) continue;
      if (other.individual != lim.individual) {
        return absl::InvalidArgumentError(absl::StrCat(
            what, ": block already carries limit records of individual ",
            other.individual));
      }
      if (other.record == lim.record) {
        return absl::InvalidArgumentError(
            absl::StrCat(what, ": duplicate limit record"));
      }
    }
    limits_.push_back(std::move(lim));
    return absl::OkStatus();
  }

  bool LimitsEqual(const JointPrior& other) const {
    if (limits_.size() != other.limits_.size()) return false;
    for (size_t r = 0; r < limits_.size(); ++r) {
      if (limits_[r].individual != other.limits_[r].individual ||
          limits_[r].record != other.limits_[r].record ||
          limits_[r].conditional != other.limits_[r].conditional) {
        return false;
      }
    }
    return true;
  }

  UniversePtr universe_;
  std::vector<std::vector<size_t>> blocks_;
  std::vector<std::vector<T>> tables_;
  std::vector<std::vector<uint64_t>> strides_;
  std::vector<size_t> block_of_;
  std::vector<size_t> position_;
  std::vector<LimitRecord<T>> limits_;
};

struct Entropy {
  double nats = 0;
  double bits = 0;
};

template <Scalar T>
double TableEntropyNats(const std::vector<T>& table) {
  double h = 0;
  for (const T& p : table) {
    double x = ToDouble(p);
    if (x > 0) h -= x * std::log(x);
  }
  return h;
}

// Sum of block entropies, which equals the joint entropy since blocks are
// independent.
template <Scalar T>
Entropy PriorEntropy(const JointPrior<T>& p) {
  Entropy e;
  for (size_t b = 0; b < p.num_blocks(); ++b) e.nats += TableEntropyNats(p.table(b));
  e.bits = e.nats / std::log(2.0);
  return e;
}

template <Scalar T>
struct SigmaResult {
  T value = T(0);
  // No individual had two admissible records; value is 0 by convention.
  bool no_pairs = false;
  // Minimizing individual and record pair, when a pair exists.
  std::optional<size_t> individual;
  uint32_t record_a = 0;
  uint32_t record_b = 0;
};

// Records of i that carry a conditional law: positive prior mass, or a
// declared limit record.
template <Scalar T>
std::vector<uint32_t> AdmissibleRecords(const JointPrior<T>& p, size_t i) {
  std::vector<T> marginal = p.Marginal(i);
  std::vector<uint32_t> out;
  for (uint32_t x = 0; x < marginal.size(); ++x) {
    if (IsPositive(marginal[x]) || p.FindLimit(i, x) != nullptr) out.push_back(x);
  }
  return out;
}

// Dependence coefficient: one minus the smallest overlap of the conditional
// complements of any individual across two of its admissible records. Only
// the block partners matter, because the rest of the complement is
// independent of X_i and contributes a factor 1 to the overlap.
template <Scalar T>
SigmaResult<T> Sigma(const JointPrior<T>& p) {
  SigmaResult<T> result;
  std::optional<T> min_overlap;
  for (size_t i = 0; i < p.universe().size(); ++i) {
    std::vector<uint32_t> admissible = AdmissibleRecords(p, i);
    std::vector<std::vector<T>> conditionals;
    for (uint32_t x : admissible) conditionals.push_back(*p.PartnerConditional(i, x));
    for (size_t a = 0; a < admissible.size(); ++a) {
      for (size_t b = a + 1; b < admissible.size(); ++b) {
        T overlap(0);
        for (size_t c = 0; c < conditionals[a].size(); ++c) {
          overlap += std::min(conditionals[a][c], conditionals[b][c]);
        }
        if (!min_overlap || overlap < *min_overlap) {
          min_overlap = overlap;
          result.individual = i;
          result.record_a = admissible[a];
          result.record_b = admissible[b];
        }
      }
    }
  }
  if (!min_overlap) {
    result.no_pairs = true;
    result.value = T(0);
  } else {
    result.value = T(1) - *min_overlap;
  }
  return result;
}

// Adversary family knobs; an absent knob leaves the family unconstrained.
struct FamilyParams {
  std::optional<size_t> k;
  // exp(delta) in [0,1]; 0 encodes delta = -inf.
  std::optional<double> exp_delta;
  std::optional<size_t> ell;
  std::optional<double> tau;
  // Band individuals must also be independent singleton blocks (the product
  // form used by the averaging sufficient condition).
  bool band_independent = false;

  absl::Status Validate(size_t n) const {
    if (k && (*k < 1 || *k > n)) {
      return absl::InvalidArgumentError(
          absl::StrCat("k=", *k, " outside [1,", n, "]"));
    }
    if (exp_delta && !(*exp_delta >= 0 && *exp_delta <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("exp(delta)=", *exp_delta, " outside [0,1]"));
    }
    if (ell && *ell > n) {
      return absl::InvalidArgumentError(
          absl::StrCat("ell=", *ell, " outside [0,", n, "]"));
    }
    if (tau && !(*tau >= 0)) {
      return absl::InvalidArgumentError(absl::StrCat("tau=", *tau, " < 0"));
    }
    if (ell.has_value() != tau.has_value()) {
      return absl::InvalidArgumentError("ell and tau must be given together");
    }
    return absl::OkStatus();
  }
};

template <Scalar T>
struct MembershipVerdict {
  bool in_pk = true;
  bool in_pdelta = true;
  bool in_band = true;
  bool member = true;
  std::optional<size_t> witness_block;  // a block larger than k
  SigmaResult<T> sigma;
  std::vector<size_t> band_individuals;  // individuals inside the band
  std::vector<std::string> notes;
};

// Marginal band exp(-tau) <= Pr[X_i = x] * |X_i| <= exp(tau) for every x.
template <Scalar T>
bool InBand(const JointPrior<T>& p, size_t i, double tau) {
  const double size = static_cast<double>(p.universe().AlphabetSize(i));
  const double lo = std::exp(-tau), hi = std::exp(tau);
  for (const T& m : p.Marginal(i)) {
    double scaled = ToDouble(m) * size;
    if (scaled < lo - kTolerance || scaled > hi + kTolerance) return false;
  }
  return true;
}

template <Scalar T>
MembershipVerdict<T> CheckMembership(const JointPrior<T>& p,
                                     const FamilyParams& f) {
  MembershipVerdict<T> v;
  if (f.k) {
    for (size_t b = 0; b < p.num_blocks(); ++b) {
      if (p.block(b).size() > *f.k) {
        v.in_pk = false;
        v.witness_block = b;
        break;
      }
    }
  }
  v.sigma = Sigma(p);
  if (v.sigma.no_pairs) v.notes.push_back("sigma: no admissible pairs");
  if (f.exp_delta) {
    v.in_pdelta = ToDouble(v.sigma.value) <= *f.exp_delta + kTolerance;
  }
  if (f.ell) {
    // The band is a per-individual condition, so the largest witness set is
    // simply every individual inside the band.
    for (size_t i = 0; i < p.universe().size(); ++i) {
      if (f.band_independent && p.block(p.BlockOf(i)).size() != 1) continue;
      if (InBand(p, i, *f.tau)) v.band_individuals.push_back(i);
    }
    v.in_band = v.band_individuals.size() >= *f.ell;
  }
  v.member = v.in_pk && v.in_pdelta && v.in_band;
  return v;
}

// Factorizes a full joint table (flat over the sequence space) along a
// declared partition, failing when the product of block marginals differs
// from the table by more than 1e-9 in any cell.
template <Scalar T>
absl::StatusOr<JointPrior<T>> FactorizeWithPartition(
    const SequenceSpace& space, std::vector<std::vector<size_t>> blocks,
    const std::vector<T>& full) {
  if (full.size() != space.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "full table has ", full.size(), " cells, universe has ", space.size()));
  }
  const RecordUniverse& u = space.universe();
  std::vector<std::vector<T>> tables;
  for (auto& block : blocks) {
    std::sort(block.begin(), block.end());
    for (size_t i : block) {
      if (i >= u.size()) {
        return absl::InvalidArgumentError(
            absl::StrCat("block names individual ", i, " outside universe"));
      }
    }
    IndexSetCoder coder(u, block);
    std::vector<T> table(coder.size(), T(0));
    for (uint64_t f = 0; f < space.size(); ++f) {
      table[coder.Encode(space, f)] += full[f];
    }
    tables.push_back(std::move(table));
  }
  PRIVLENS_ASSIGN_OR_RETURN(
      JointPrior<T> prior,
      JointPrior<T>::Create(space.index().universe_ptr(), blocks, tables));
  std::vector<T> product = prior.SequenceWeights(space);
  for (uint64_t f = 0; f < space.size(); ++f) {
    if (std::abs(ToDouble(product[f]) - ToDouble(full[f])) > kTolerance) {
      return absl::InvalidArgumentError(absl::StrCat(
          "declared partition does not factor the table at ",
          u.SequenceLabel(space.At(f)), ": product ",
          ScalarToString(product[f]), " vs table ", ScalarToString(full[f])));
    }
  }
  return prior;
}

namespace internal {

inline absl::Status CheckRecord(const RecordUniverse& u, size_t i,
                                uint32_t record, absl::string_view what) {
  if (i >= u.size() || record >= u.AlphabetSize(i)) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, ": record ", record, " invalid for individual ", i));
  }
  return absl::OkStatus();
}

// Point mass of every individual outside `skip` at frozen[j].
template <Scalar T>
absl::Status FreezeOthers(const RecordUniverse& u,
                          const std::vector<uint32_t>& frozen,
                          const std::vector<bool>& skip,
                          std::vector<std::vector<size_t>>* blocks,
                          std::vector<std::vector<T>>* tables) {
  if (frozen.size() != u.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "frozen values have length ", frozen.size(), ", expected ", u.size()));
  }
  for (size_t j = 0; j < u.size(); ++j) {
    if (skip[j]) continue;
    PRIVLENS_RETURN_IF_ERROR(CheckRecord(u, j, frozen[j], "frozen value"));
    std::vector<T> table(u.AlphabetSize(j), T(0));
    table[frozen[j]] = T(1);
    blocks->push_back({j});
    tables->push_back(std::move(table));
  }
  return absl::OkStatus();
}

// Row-major code over `members` (sorted) for the given value per member.
inline uint64_t CodeOf(const RecordUniverse& u,
                       const std::vector<size_t>& members,
                       const std::vector<uint32_t>& values) {
  uint64_t code = 0;
  for (size_t j = 0; j < members.size(); ++j) {
    code = code * u.AlphabetSize(members[j]) + values[j];
  }
  return code;
}

}  // namespace internal

// The point-mass construction behind the distance-k characterization:
// X_i sits at x_i_prime, the partners are deterministic given X_i (values
// `given_x` for the limit record x_i, `given_x_prime` for x_i_prime), and
// everyone else is frozen. Partner value vectors follow the order of
// `partners` as given.
template <Scalar T>
absl::StatusOr<JointPrior<T>> ExtremalPkPrior(
    UniversePtr universe, size_t i, uint32_t x_i, uint32_t x_i_prime,
    std::vector<size_t> partners, std::vector<uint32_t> given_x,
    std::vector<uint32_t> given_x_prime, const std::vector<uint32_t>& frozen,
    size_t k) {
  const RecordUniverse& u = *universe;
  PRIVLENS_RETURN_IF_ERROR(internal::CheckRecord(u, i, x_i, "x_i"));
  PRIVLENS_RETURN_IF_ERROR(internal::CheckRecord(u, i, x_i_prime, "x_i'"));
  if (x_i == x_i_prime) {
    return absl::InvalidArgumentError("x_i and x_i' must differ");
  }
  if (partners.size() != given_x.size() ||
      partners.size() != given_x_prime.size()) {
    return absl::InvalidArgumentError(
        "partner value lists must match the partner block");
  }
  if (partners.size() + 1 > k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "block of size ", partners.size() + 1, " exceeds k=", k));
  }
  std::vector<bool> used(u.size(), false);
  used[i] = true;
  for (size_t j = 0; j < partners.size(); ++j) {
    if (partners[j] >= u.size() || used[partners[j]]) {
      return absl::InvalidArgumentError(absl::StrCat(
          "partner ", partners[j], " overlaps the block or is out of range"));
    }
    used[partners[j]] = true;
    PRIVLENS_RETURN_IF_ERROR(
        internal::CheckRecord(u, partners[j], given_x[j], "partner value"));
    PRIVLENS_RETURN_IF_ERROR(internal::CheckRecord(
        u, partners[j], given_x_prime[j], "partner value"));
  }
  // Sort partners while carrying their values along.
  std::vector<size_t> order(partners.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return partners[a] < partners[b]; });
  std::vector<size_t> sorted_partners;
  std::vector<uint32_t> vx, vx_prime;
  for (size_t j : order) {
    sorted_partners.push_back(partners[j]);
    vx.push_back(given_x[j]);
    vx_prime.push_back(given_x_prime[j]);
  }
  std::vector<size_t> block = sorted_partners;
  block.push_back(i);
  std::sort(block.begin(), block.end());
  std::vector<uint32_t> base_values;
  for (size_t m : block) {
    if (m == i) {
      base_values.push_back(x_i_prime);
    } else {
      size_t j = std::find(sorted_partners.begin(), sorted_partners.end(), m) -
                 sorted_partners.begin();
      base_values.push_back(vx_prime[j]);
    }
  }
  uint64_t cells = 1;
  for (size_t m : block) cells *= u.AlphabetSize(m);
  std::vector<T> base(cells, T(0));
  base[internal::CodeOf(u, block, base_values)] = T(1);
  uint64_t partner_cells = 1;
  for (size_t m : sorted_partners) partner_cells *= u.AlphabetSize(m);
  std::vector<T> conditional(partner_cells, T(0));
  conditional[internal::CodeOf(u, sorted_partners, vx)] = T(1);

  std::vector<std::vector<size_t>> blocks = {block};
  std::vector<std::vector<T>> tables = {std::move(base)};
  PRIVLENS_RETURN_IF_ERROR(
      internal::FreezeOthers<T>(u, frozen, used, &blocks, &tables));
  return JointPrior<T>::Create(
      std::move(universe), std::move(blocks), std::move(tables),
      {LimitRecord<T>{i, x_i, std::move(conditional)}});
}

// The mediant construction for the dependence-constrained family, on the
// partner block `partners` (everyone else frozen). X_i sits at x_i_prime;
// given either record the partners take the shared complement with weight
// 1 - exp(delta), and otherwise the private complement (`prime` under
// x_i_prime, `double_prime` under the limit record x_i). The overlap of the
// two conditionals is therefore at least 1 - exp(delta), which keeps the
// construction inside the family for the target individual.
template <Scalar T>
absl::StatusOr<JointPrior<T>> ExtremalPdeltaPrior(
    UniversePtr universe, size_t i, uint32_t x_i, uint32_t x_i_prime,
    std::vector<size_t> partners, const std::vector<uint32_t>& shared,
    const std::vector<uint32_t>& prime,
    const std::vector<uint32_t>& double_prime,
    const std::vector<uint32_t>& frozen, const T& exp_delta) {
  const RecordUniverse& u = *universe;
  PRIVLENS_RETURN_IF_ERROR(internal::CheckRecord(u, i, x_i, "x_i"));
  PRIVLENS_RETURN_IF_ERROR(internal::CheckRecord(u, i, x_i_prime, "x_i'"));
  if (x_i == x_i_prime) {
    return absl::InvalidArgumentError("x_i and x_i' must differ");
  }
  if (exp_delta < T(0) || exp_delta > T(1)) {
    return absl::InvalidArgumentError("exp(delta) outside [0,1]");
  }
  std::sort(partners.begin(), partners.end());
  std::vector<bool> used(u.size(), false);
  used[i] = true;
  for (size_t j : partners) {
    if (j >= u.size() || used[j]) {
      return absl::InvalidArgumentError(
          absl::StrCat("partner ", j, " overlaps the block or is out of range"));
    }
    used[j] = true;
  }
  for (const auto* values : {&shared, &prime, &double_prime}) {
    if (values->size() != partners.size()) {
      return absl::InvalidArgumentError(
          "complement value lists must match the partner block");
    }
    for (size_t j = 0; j < partners.size(); ++j) {
      PRIVLENS_RETURN_IF_ERROR(internal::CheckRecord(
          u, partners[j], (*values)[j], "complement value"));
    }
  }
  std::vector<size_t> block = partners;
  block.push_back(i);
  std::sort(block.begin(), block.end());
  const size_t pos =
      std::find(block.begin(), block.end(), i) - block.begin();
  auto with_i = [&](const std::vector<uint32_t>& values, uint32_t xi) {
    std::vector<uint32_t> out(values);
    out.insert(out.begin() + pos, xi);
    return out;
  };
  uint64_t cells = 1;
  for (size_t m : block) cells *= u.AlphabetSize(m);
  const T w_shared = T(1) - exp_delta;
  std::vector<T> base(cells, T(0));
  base[internal::CodeOf(u, block, with_i(shared, x_i_prime))] += w_shared;
  base[internal::CodeOf(u, block, with_i(prime, x_i_prime))] += exp_delta;
  uint64_t partner_cells = 1;
  for (size_t m : partners) partner_cells *= u.AlphabetSize(m);
  std::vector<T> conditional(partner_cells, T(0));
  conditional[internal::CodeOf(u, partners, shared)] += w_shared;
  conditional[internal::CodeOf(u, partners, double_prime)] += exp_delta;

  std::vector<std::vector<size_t>> blocks = {block};
  std::vector<std::vector<T>> tables = {std::move(base)};
  PRIVLENS_RETURN_IF_ERROR(
      internal::FreezeOthers<T>(u, frozen, used, &blocks, &tables));
  return JointPrior<T>::Create(
      std::move(universe), std::move(blocks), std::move(tables),
      {LimitRecord<T>{i, x_i, std::move(conditional)}});
}

// Whole-complement form: the partner block is every other individual.
template <Scalar T>
absl::StatusOr<JointPrior<T>> ExtremalPdeltaPrior(
    UniversePtr universe, size_t i, uint32_t x_i, uint32_t x_i_prime,
    const RecordSequence& shared, const RecordSequence& prime,
    const RecordSequence& double_prime, const T& exp_delta) {
  const size_t n = universe->size();
  std::vector<size_t> partners;
  std::vector<uint32_t> s, p1, p2;
  for (size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    partners.push_back(j);
    s.push_back(shared.entries.at(j));
    p1.push_back(prime.entries.at(j));
    p2.push_back(double_prime.entries.at(j));
  }
  return ExtremalPdeltaPrior<T>(std::move(universe), i, x_i, x_i_prime,
                                std::move(partners), s, p1, p2,
                                std::vector<uint32_t>(n, 0), exp_delta);
}

}  // namespace privlens

#endif  // PRIVLENS_PRIOR_H_
