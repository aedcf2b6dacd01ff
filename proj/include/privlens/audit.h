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

// Certification of information privacy claims for a channel against
// adversary families, by closed-form ratio conditions and by worst-case
// prior search.
//
// Two kinds of sequence-pair sup underlie the exact oracles. For a single
// individual and blocks of size at most k, the sup of the posterior-to-prior
// ratio is the largest row ratio over sequence pairs (s, s') that differ in a
// set D with 1 <= |D| <= k. For a group I it is the largest ratio over pairs
// with D meeting I and |D \ I| <= |D n I| (k - 1). Both are attained in the
// point-mass limit by priors built from limit records.

#ifndef PRIVLENS_AUDIT_H_
#define PRIVLENS_AUDIT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "privlens/leakage.h"
#include "privlens/mechanism.h"
#include "privlens/parallel.h"
#include "privlens/prior.h"
#include "privlens/sampling.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"
#include "privlens/verdict.h"

namespace privlens {

// Every individual has at most one non-bottom record, so a record change
// is always an addition or a removal.
inline bool IsAddRemoveUniverse(const RecordUniverse& u) {
  for (size_t i = 0; i < u.size(); ++i) {
    size_t present = 0;
    for (uint32_t x = 0; x < u.AlphabetSize(i); ++x) {
      if (u.Symbol(i, x) != kBottom) ++present;
    }
    if (present > 1) return false;
  }
  return true;
}

template <Scalar T>
struct SequencePairWitness {
  ExtendedRatio<T> ratio = ExtendedRatio<T>::Finite(T(1));
  bool found = false;
  uint64_t numerator = 0;    // flat sequence index
  uint64_t denominator = 0;  // flat sequence index
  size_t outcome = 0;
};

namespace internal {

inline std::vector<size_t> DifferingSet(const SequenceSpace& space, uint64_t f,
                                        uint64_t g) {
  std::vector<size_t> d;
  for (size_t i = 0; i < space.universe().size(); ++i) {
    if (space.Entry(f, i) != space.Entry(g, i)) d.push_back(i);
  }
  return d;
}

inline bool Contains(const std::vector<size_t>& sorted, size_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace internal

// Largest row ratio over ordered sequence pairs accepted by `pred(D)`, D the
// sorted set of differing individuals (never empty). Ties keep the first
// histogram pair in index order, then the smallest outcome; the witness
// sequences are the first pair found for that histogram pair.
template <Scalar T, typename Pred>
absl::StatusOr<SequencePairWitness<T>> MaxSequencePairRatio(
    const Channel<T>& c, const SequenceSpace& space, Pred&& pred,
    uint64_t budget = kDefaultEnumerationBudget) {
  const uint64_t S = space.size();
  if (S > 0 && S > budget / S) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "sequence pair search needs ", S, "^2 pairs, budget is ", budget));
  }
  const size_t H = c.index().size();
  constexpr uint64_t kNone = std::numeric_limits<uint64_t>::max();
  std::vector<uint64_t> first(H * H, kNone);
  for (uint64_t f = 0; f < S; ++f) {
    for (uint64_t g = 0; g < S; ++g) {
      if (f == g) continue;
      const size_t cell = space.HistogramId(f) * H + space.HistogramId(g);
      if (first[cell] != kNone) continue;
      if (pred(internal::DifferingSet(space, f, g))) first[cell] = f * S + g;
    }
  }
  SequencePairWitness<T> best;
  for (size_t a = 0; a < H; ++a) {
    for (size_t b = 0; b < H; ++b) {
      const uint64_t pair = first[a * H + b];
      if (pair == kNone) continue;
      for (size_t r = 0; r < c.num_outcomes(); ++r) {
        ExtendedRatio<T> ratio;
        if (!MakeRatio(c.at(a, r), c.at(b, r), &ratio)) continue;
        if (!best.found || ratio > best.ratio) {
          best.ratio = ratio;
          best.found = true;
          best.numerator = pair / S;
          best.denominator = pair % S;
          best.outcome = r;
        }
      }
    }
  }
  return best;
}

// Exact sup of exp(I_inf(X_i;Y)) over priors with blocks of size <= k, over
// all individuals (i = -1) or for one individual.
template <Scalar T>
absl::StatusOr<SequencePairWitness<T>> RecordLevelSup(
    const Channel<T>& c, const SequenceSpace& space, size_t k,
    std::optional<size_t> individual = std::nullopt,
    uint64_t budget = kDefaultEnumerationBudget) {
  return MaxSequencePairRatio(
      c, space,
      [&](const std::vector<size_t>& d) {
        if (d.size() > k) return false;
        return !individual || internal::Contains(d, *individual);
      },
      budget);
}

template <Scalar T>
absl::StatusOr<SequencePairWitness<T>> GroupLevelSup(
    const Channel<T>& c, const SequenceSpace& space, size_t k,
    std::vector<size_t> group, uint64_t budget = kDefaultEnumerationBudget) {
  std::sort(group.begin(), group.end());
  return MaxSequencePairRatio(
      c, space,
      [&](const std::vector<size_t>& d) {
        size_t inside = 0;
        for (size_t j : d) inside += internal::Contains(group, j);
        return inside > 0 && d.size() - inside <= inside * (k - 1);
      },
      budget);
}

// Point-mass prior realizing a group pair (s, s'): X sits at s', and every
// member of D n I carries a limit record s_d whose block drags along up to
// k-1 of the changed outsiders. With a single-member group this is the
// distance-k construction.
template <Scalar T>
absl::StatusOr<JointPrior<T>> GroupLimitPrior(UniversePtr universe,
                                              std::vector<size_t> group,
                                              const RecordSequence& s,
                                              const RecordSequence& s_prime,
                                              size_t k) {
  const RecordUniverse& u = *universe;
  PRIVLENS_RETURN_IF_ERROR(u.ValidateSequence(s));
  PRIVLENS_RETURN_IF_ERROR(u.ValidateSequence(s_prime));
  std::sort(group.begin(), group.end());
  std::vector<size_t> inside, outside;
  for (size_t j = 0; j < u.size(); ++j) {
    if (s.entries[j] == s_prime.entries[j]) continue;
    (internal::Contains(group, j) ? inside : outside).push_back(j);
  }
  if (inside.empty()) {
    return absl::InvalidArgumentError("pair does not change the group");
  }
  if (k < 1 || outside.size() > inside.size() * (k - 1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "pair changes ", outside.size(), " outsiders, more than ",
        inside.size(), " blocks of size ", k, " can hold"));
  }
  std::vector<std::vector<size_t>> blocks;
  std::vector<std::vector<T>> tables;
  std::vector<LimitRecord<T>> limits;
  std::vector<bool> used(u.size(), false);
  size_t next = 0;
  for (size_t d : inside) {
    std::vector<size_t> partners;
    while (next < outside.size() && partners.size() + 1 < k) {
      partners.push_back(outside[next++]);
    }
    std::vector<size_t> block = partners;
    block.push_back(d);
    std::sort(block.begin(), block.end());
    std::vector<uint32_t> base_values, cond_values;
    for (size_t m : block) {
      used[m] = true;
      base_values.push_back(s_prime.entries[m]);
    }
    for (size_t m : partners) cond_values.push_back(s.entries[m]);
    uint64_t cells = 1, partner_cells = 1;
    for (size_t m : block) cells *= u.AlphabetSize(m);
    for (size_t m : partners) partner_cells *= u.AlphabetSize(m);
    std::vector<T> table(cells, T(0));
    table[internal::CodeOf(u, block, base_values)] = T(1);
    std::vector<T> cond(partner_cells, T(0));
    cond[internal::CodeOf(u, partners, cond_values)] = T(1);
    blocks.push_back(std::move(block));
    tables.push_back(std::move(table));
    limits.push_back({d, s.entries[d], std::move(cond)});
  }
  PRIVLENS_RETURN_IF_ERROR(
      internal::FreezeOthers<T>(u, s_prime.entries, used, &blocks, &tables));
  return JointPrior<T>::Create(std::move(universe), std::move(blocks),
                               std::move(tables), std::move(limits));
}

namespace internal {

template <Scalar T>
void FillExact(Verdict* v, const std::optional<std::string>& bound,
               const ExtendedRatio<T>& measured) {
  v->bound_exact = bound;
  if constexpr (kIsExact<T>) v->measured_exact = measured.ExactString();
}

template <Scalar T>
void AddPairWitness(Verdict* v, const Channel<T>& c, const SequenceSpace& space,
                    const SequencePairWitness<T>& w) {
  if (!w.found) return;
  const RecordUniverse& u = space.universe();
  v->AddWitness("sequence", u.SequenceLabel(space.At(w.numerator)));
  v->AddWitness("sequence_prime", u.SequenceLabel(space.At(w.denominator)));
  v->AddWitness("outcome", c.outcomes()[w.outcome]);
}

inline double Power(double ratio_base_nats, double times) {
  return std::exp(times * ratio_base_nats);
}

}  // namespace internal

// Distance-k characterization: satisfied iff lipschitz_ratio(c,k) <= e^eps.
// The exact record-level sup is reported next to it; they differ only when
// record changes are not additions or removals.
template <Scalar T>
absl::StatusOr<Verdict> CertifyPk(const Channel<T>& c, size_t k,
                                  const Epsilon& eps,
                                  uint64_t budget = kDefaultEnumerationBudget) {
  const size_t n = c.universe().size();
  if (k < 1 || k > n) {
    return absl::InvalidArgumentError(absl::StrCat("k=", k, " outside [1,", n, "]"));
  }
  RatioWitness<T> lip = LipschitzRatio(c, static_cast<uint32_t>(k));
  Verdict v = MakeVerdict("certify_pk", eps.Ratio(), lip.ratio.AsDouble());
  internal::FillExact(&v, eps.exact_ratio, lip.ratio);
  if (lip.found) {
    const RecordUniverse& u = c.universe();
    v.AddWitness("histogram", u.HistogramLabel(c.index().at(lip.numerator)));
    v.AddWitness("histogram_prime", u.HistogramLabel(c.index().at(lip.denominator)));
    v.AddWitness("outcome", c.outcomes()[lip.outcome]);
  }
  v.AddWitness("k", absl::StrCat(k));
  auto space = SequenceSpace::Create(c.index_ptr(), budget);
  if (space.ok()) {
    auto sup = RecordLevelSup(c, **space, k, std::nullopt, budget);
    if (sup.ok()) {
      v.extras.emplace_back("record_level_sup", sup->ratio.AsDouble());
      if (sup->ratio.AsDouble() > lip.ratio.AsDouble() + kTolerance) {
        v.AddNote("value-change gap: record-level sup exceeds lipschitz_ratio");
      } else if (sup->ratio.AsDouble() < lip.ratio.AsDouble() - kTolerance) {
        v.AddNote("lipschitz arg-max pair is not reachable by k record changes");
      }
    }
  }
  return v;
}

// Builds the point-mass prior at the record-level arg-max and checks that its
// exp(max_mi) equals lipschitz_ratio(c,k).
template <Scalar T>
absl::StatusOr<Verdict> TightnessPk(const Channel<T>& c, size_t k,
                                    uint64_t budget = kDefaultEnumerationBudget) {
  const RecordUniverse& u = c.universe();
  const size_t n = u.size();
  if (k < 1 || k > n) {
    return absl::InvalidArgumentError(absl::StrCat("k=", k, " outside [1,", n, "]"));
  }
  RatioWitness<T> lip = LipschitzRatio(c, static_cast<uint32_t>(k));
  PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space,
                            SequenceSpace::Create(c.index_ptr(), budget));
  PRIVLENS_ASSIGN_OR_RETURN(auto sup,
                            RecordLevelSup(c, *space, k, std::nullopt, budget));
  Verdict v;
  v.claim = "tightness_pk";
  v.bound = lip.ratio.AsDouble();
  if constexpr (kIsExact<T>) v.bound_exact = lip.ratio.ExactString();
  if (!sup.found) {
    // No individual can change: every prior is deterministic per record.
    v.measured = 1;
    v.AddNote("no individual has two records");
  } else {
    RecordSequence s = space->At(sup.numerator);
    RecordSequence sp = space->At(sup.denominator);
    std::vector<size_t> d = internal::DifferingSet(*space, sup.numerator,
                                                   sup.denominator);
    const size_t i = d.front();
    std::vector<size_t> partners(d.begin() + 1, d.end());
    std::vector<uint32_t> given_x, given_x_prime;
    for (size_t j : partners) {
      given_x.push_back(s.entries[j]);
      given_x_prime.push_back(sp.entries[j]);
    }
    PRIVLENS_ASSIGN_OR_RETURN(
        JointPrior<T> prior,
        ExtremalPkPrior<T>(c.index().universe_ptr(), i, s.entries[i],
                           sp.entries[i], partners, given_x, given_x_prime,
                           sp.entries, k));
    PRIVLENS_ASSIGN_OR_RETURN(auto analyzer,
                              LeakageAnalyzer<T>::Create(space, prior, c));
    PRIVLENS_ASSIGN_OR_RETURN(auto rep, analyzer.Report({i}));
    v.measured = rep.i_inf_ratio.AsDouble();
    if constexpr (kIsExact<T>) v.measured_exact = rep.i_inf_ratio.ExactString();
    v.AddWitness("individual", absl::StrCat(i));
    v.AddWitness("record", u.SymbolName(i, s.entries[i]));
    v.AddWitness("record_prime", u.SymbolName(i, sp.entries[i]));
    internal::AddPairWitness(&v, c, *space, sup);
  }
  const bool both_inf = std::isinf(v.measured) && std::isinf(v.bound);
  v.satisfied = both_inf || std::abs(v.measured - v.bound) <= kTolerance;
  v.status = v.satisfied ? VerdictStatus::kSatisfied : VerdictStatus::kViolated;
  if (!v.satisfied && v.measured > v.bound) {
    v.AddNote("value-change gap: record-level sup exceeds lipschitz_ratio");
  }
  return v;
}

// Deterministic mediant search over the proof constructions compatible with
// a family. Candidates: X_i at x', limit record x; partners P (|P| <= k-1)
// take the shared complement with weight w = 1 - exp(delta) and a private
// one otherwise; band individuals (when the family has ell) are
// independent uniform; the rest are frozen. Only membership-checked
// candidates count.
template <Scalar T>
struct ExtremalResult {
  ExtendedRatio<T> ratio = ExtendedRatio<T>::Finite(T(1));
  std::optional<JointPrior<T>> witness;
  std::optional<size_t> individual;
  bool incomplete = false;
  bool heuristic = false;
  uint64_t candidates = 0;
};

namespace internal {

inline std::vector<std::vector<size_t>> SubsetsUpTo(
    const std::vector<size_t>& pool, size_t max_size) {
  std::vector<std::vector<size_t>> out = {{}};
  for (size_t x : pool) {
    const size_t current = out.size();
    for (size_t j = 0; j < current; ++j) {
      if (out[j].size() < max_size) {
        std::vector<size_t> grown = out[j];
        grown.push_back(x);
        out.push_back(std::move(grown));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() < b.size();
  });
  return out;
}

inline std::vector<std::vector<size_t>> SubsetsOfSize(
    const std::vector<size_t>& pool, size_t size) {
  std::vector<std::vector<size_t>> out;
  for (auto& s : SubsetsUpTo(pool, size)) {
    if (s.size() == size) out.push_back(std::move(s));
  }
  return out;
}

// Mixed-radix walk over the joint values of `members`.
inline uint64_t ValueCount(const RecordUniverse& u,
                           const std::vector<size_t>& members) {
  uint64_t count = 1;
  for (size_t m : members) count *= u.AlphabetSize(m);
  return count;
}

inline void Assign(const RecordUniverse& u, const std::vector<size_t>& members,
                   uint64_t code, RecordSequence* s) {
  for (size_t j = members.size(); j-- > 0;) {
    const uint64_t m = u.AlphabetSize(members[j]);
    s->entries[members[j]] = static_cast<uint32_t>(code % m);
    code /= m;
  }
}

inline std::vector<uint32_t> ValuesOf(const RecordUniverse& u,
                                      const std::vector<size_t>& members,
                                      uint64_t code) {
  std::vector<uint32_t> out(members.size());
  for (size_t j = members.size(); j-- > 0;) {
    const uint64_t m = u.AlphabetSize(members[j]);
    out[j] = static_cast<uint32_t>(code % m);
    code /= m;
  }
  return out;
}

// Replaces the frozen singleton blocks of `band` with uniform marginals.
template <Scalar T>
absl::StatusOr<JointPrior<T>> WithUniformBand(const JointPrior<T>& p,
                                              const std::vector<size_t>& band) {
  const RecordUniverse& u = p.universe();
  std::vector<std::vector<size_t>> blocks;
  std::vector<std::vector<T>> tables;
  for (size_t b = 0; b < p.num_blocks(); ++b) {
    blocks.push_back(p.block(b));
    if (p.block(b).size() == 1 && Contains(band, p.block(b)[0])) {
      const size_t m = u.AlphabetSize(p.block(b)[0]);
      tables.push_back(std::vector<T>(m, T(1) / T(static_cast<int>(m))));
    } else {
      tables.push_back(p.table(b));
    }
  }
  return JointPrior<T>::Create(p.universe_ptr(), std::move(blocks),
                               std::move(tables), p.limits());
}

}  // namespace internal

template <Scalar T>
absl::StatusOr<ExtremalResult<T>> ExtremalSearch(
    const Channel<T>& c, const SequenceSpace& space, const FamilyParams& family,
    size_t i, uint64_t budget = kDefaultEnumerationBudget) {
  const RecordUniverse& u = c.universe();
  const size_t n = u.size();
  PRIVLENS_RETURN_IF_ERROR(family.Validate(n));
  if (i >= n) return absl::InvalidArgumentError("individual out of range");
  ExtremalResult<T> result;
  const size_t k = family.k.value_or(n);
  const T e_delta = family.exp_delta ? T(*family.exp_delta) : T(1);
  const T w = T(1) - e_delta;  // shared-complement weight
  const bool shared_only = !IsPositive(e_delta);
  const bool private_only = IsZero(w);
  const size_t R = c.num_outcomes();

  std::vector<std::vector<size_t>> band_sets = {{}};
  if (family.ell && *family.ell > 0) {
    result.heuristic = true;
    std::vector<size_t> pool;
    for (size_t j = 0; j < n; ++j) {
      if (j != i) pool.push_back(j);
    }
    if (*family.ell > pool.size()) return result;  // X_i itself must be in band
    band_sets = internal::SubsetsOfSize(pool, *family.ell);
  }

  bool found = false;
  for (const auto& band : band_sets) {
    std::vector<size_t> free;
    for (size_t j = 0; j < n; ++j) {
      if (j != i && !internal::Contains(band, j)) free.push_back(j);
    }
    const uint64_t band_values = internal::ValueCount(u, band);
    // Mean row over the uniform band for the sequence template `s`.
    auto mean_row = [&](RecordSequence s) {
      std::vector<T> out(R, T(0));
      for (uint64_t bcode = 0; bcode < band_values; ++bcode) {
        internal::Assign(u, band, bcode, &s);
        const auto& row = c.row(space.HistogramId(space.FlatIndex(s)));
        for (size_t r = 0; r < R; ++r) out[r] += row[r];
      }
      if (band_values > 1) {
        for (T& x : out) x /= T(static_cast<int>(band_values));
      }
      return out;
    };
    const size_t max_partners = shared_only ? 0 : std::min(k - 1, free.size());
    for (const auto& partners : internal::SubsetsUpTo(free, max_partners)) {
      std::vector<size_t> frozen_set;
      for (size_t j : free) {
        if (!internal::Contains(partners, j)) frozen_set.push_back(j);
      }
      const uint64_t PV = internal::ValueCount(u, partners);
      const uint64_t OV = internal::ValueCount(u, frozen_set);
      for (uint32_t x = 0; x < u.AlphabetSize(i); ++x) {
        for (uint32_t xp = 0; xp < u.AlphabetSize(i); ++xp) {
          if (x == xp) continue;
          for (uint64_t o = 0; o < OV; ++o) {
            RecordSequence base{std::vector<uint32_t>(n, 0)};
            internal::Assign(u, frozen_set, o, &base);
            std::vector<std::vector<T>> num(PV), den(PV);
            for (uint64_t pv = 0; pv < PV; ++pv) {
              RecordSequence s = base;
              internal::Assign(u, partners, pv, &s);
              s.entries[i] = x;
              num[pv] = mean_row(s);
              s.entries[i] = xp;
              den[pv] = mean_row(s);
            }
            const uint64_t shared_count = private_only ? 1 : PV;
            const uint64_t private_count = shared_only ? 1 : PV;
            const uint64_t batch = shared_count * private_count * private_count;
            if (result.candidates + batch > budget) {
              result.incomplete = true;
              return result;
            }
            result.candidates += batch;
            for (uint64_t sc = 0; sc < shared_count; ++sc) {
              for (uint64_t p1 = 0; p1 < private_count; ++p1) {
                for (uint64_t p2 = 0; p2 < private_count; ++p2) {
                  const uint64_t s_code = private_only ? p1 : sc;
                  const uint64_t p1_code = shared_only ? sc : p1;
                  const uint64_t p2_code = shared_only ? sc : p2;
                  ExtendedRatio<T> best_r;
                  bool any = false;
                  for (size_t r = 0; r < R; ++r) {
                    T nr = w * num[s_code][r] + e_delta * num[p2_code][r];
                    T dr = w * den[s_code][r] + e_delta * den[p1_code][r];
                    ExtendedRatio<T> ratio;
                    if (!MakeRatio(nr, dr, &ratio)) continue;
                    if (!any || ratio > best_r) {
                      best_r = ratio;
                      any = true;
                    }
                  }
                  if (!any || (found && !(best_r > result.ratio))) continue;
                  std::vector<uint32_t> frozen = base.entries;
                  auto prior = ExtremalPdeltaPrior<T>(
                      c.index().universe_ptr(), i, x, xp, partners,
                      internal::ValuesOf(u, partners, s_code),
                      internal::ValuesOf(u, partners, p1_code),
                      internal::ValuesOf(u, partners, p2_code), frozen, e_delta);
                  if (!prior.ok()) return prior.status();
                  if (!band.empty()) {
                    PRIVLENS_ASSIGN_OR_RETURN(*prior,
                                              internal::WithUniformBand(*prior, band));
                  }
                  if (!CheckMembership(*prior, family).member) continue;
                  found = true;
                  result.ratio = best_r;
                  result.witness = std::move(*prior);
                  result.individual = i;
                }
              }
            }
          }
        }
      }
    }
  }
  if (found && result.ratio < ExtendedRatio<T>::Finite(T(1))) {
    result.ratio = ExtendedRatio<T>::Finite(T(1));
  }
  return result;
}

enum class SupStrategy { kExtremal, kSampled, kBoth };

inline absl::StatusOr<SupStrategy> ParseSupStrategy(absl::string_view s) {
  if (s == "extremal") return SupStrategy::kExtremal;
  if (s == "sampled") return SupStrategy::kSampled;
  if (s == "both") return SupStrategy::kBoth;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown strategy '", s, "' (extremal|sampled|both)"));
}

template <Scalar T>
struct SupResult {
  double ratio = 1;  // ratio scale
  std::optional<std::string> ratio_exact;
  std::string source = "none";  // "extremal" | "sampled" | "none"
  std::optional<JointPrior<T>> extremal_witness;
  std::optional<JointPrior<double>> sampled_witness;
  std::optional<size_t> sample_index;
  double extremal_ratio = 1;
  double sampled_ratio = 1;
  size_t accepted_samples = 0;
  bool family_too_tight = false;
  bool incomplete = false;
  bool heuristic = false;
  // True when the extremal value is the exact sup over the family.
  bool exact = false;
  std::vector<std::string> notes;
};

// Lower bound on the sup of exp(max_mi(., c, {i})) over family members.
template <Scalar T>
absl::StatusOr<SupResult<T>> WorstcaseSup(
    const Channel<T>& c, const FamilyParams& family, size_t i,
    SupStrategy strategy, const SamplerOptions& sampling,
    uint64_t budget = kDefaultEnumerationBudget) {
  const RecordUniverse& u = c.universe();
  PRIVLENS_RETURN_IF_ERROR(family.Validate(u.size()));
  if (i >= u.size()) return absl::InvalidArgumentError("individual out of range");
  PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space,
                            SequenceSpace::Create(c.index_ptr(), budget));
  SupResult<T> out;
  const size_t k = family.k.value_or(u.size());
  if (strategy != SupStrategy::kSampled) {
    const bool plain_pk = (!family.exp_delta || *family.exp_delta >= 1) &&
                          !(family.ell && *family.ell > 0);
    if (plain_pk) {
      PRIVLENS_ASSIGN_OR_RETURN(auto sup, RecordLevelSup(c, *space, k, i, budget));
      out.extremal_ratio = sup.ratio.AsDouble();
      out.exact = true;
      if (sup.found) {
        RecordSequence s = space->At(sup.numerator);
        RecordSequence sp = space->At(sup.denominator);
        PRIVLENS_ASSIGN_OR_RETURN(
            JointPrior<T> prior,
            GroupLimitPrior<T>(c.index().universe_ptr(), {i}, s, sp, k));
        out.extremal_witness = std::move(prior);
        if constexpr (kIsExact<T>) out.ratio_exact = sup.ratio.ExactString();
      }
    } else {
      PRIVLENS_ASSIGN_OR_RETURN(auto ext, ExtremalSearch(c, *space, family, i, budget));
      out.extremal_ratio = ext.ratio.AsDouble();
      out.incomplete = ext.incomplete;
      out.heuristic = ext.heuristic;
      if (ext.witness) {
        out.extremal_witness = std::move(ext.witness);
        if constexpr (kIsExact<T>) out.ratio_exact = ext.ratio.ExactString();
      }
      if (ext.incomplete) out.notes.push_back("incomplete search");
      if (ext.heuristic) {
        out.notes.push_back("band constructions use uniform band individuals (heuristic)");
      }
    }
    out.ratio = out.extremal_ratio;
    out.source = out.extremal_witness ? "extremal" : "none";
  }
  if (strategy != SupStrategy::kExtremal) {
    PriorSample sample = SampleMembers(c.index().universe_ptr(), family, sampling);
    out.accepted_samples = sample.accepted;
    if (sample.accepted == 0) {
      out.family_too_tight = true;
      out.notes.push_back("family-too-tight");
    } else {
      Channel<double> cd = ToDoubleChannel(c);
      std::vector<double> ratios(sampling.samples, 0.0);
      std::vector<absl::Status> errors(sampling.samples);
      ParallelForChunks(sampling.samples, [&](size_t j) {
        if (!sample.slots[j]) return;
        auto a = LeakageAnalyzer<double>::Create(space, *sample.slots[j], cd);
        if (!a.ok()) {
          errors[j] = a.status();
          return;
        }
        auto rep = a->Report({i});
        if (!rep.ok()) {
          errors[j] = rep.status();
          return;
        }
        ratios[j] = rep->i_inf_ratio.AsDouble();
      });
      for (const auto& e : errors) PRIVLENS_RETURN_IF_ERROR(e);
      std::optional<size_t> best;
      for (size_t j = 0; j < sampling.samples; ++j) {
        if (sample.slots[j] && (!best || ratios[j] > ratios[*best])) best = j;
      }
      out.sampled_ratio = ratios[*best];
      out.sample_index = best;
      out.sampled_witness = *sample.slots[*best];
      if (out.source == "none" || out.sampled_ratio > out.ratio) {
        out.ratio = out.sampled_ratio;
        out.source = "sampled";
        out.ratio_exact.reset();
      }
    }
  }
  return out;
}

// Over every individual; the first individual attaining the max wins.
template <Scalar T>
absl::StatusOr<std::pair<size_t, SupResult<T>>> WorstcaseSupAll(
    const Channel<T>& c, const FamilyParams& family, SupStrategy strategy,
    const SamplerOptions& sampling, uint64_t budget = kDefaultEnumerationBudget) {
  std::optional<std::pair<size_t, SupResult<T>>> best;
  for (size_t i = 0; i < c.universe().size(); ++i) {
    PRIVLENS_ASSIGN_OR_RETURN(auto r,
                              WorstcaseSup(c, family, i, strategy, sampling, budget));
    if (!best || r.ratio > best->second.ratio) best.emplace(i, std::move(r));
  }
  return std::move(*best);
}

// Closed-form interpolation of the dependence-constrained bound on the ratio
// scale: exp(eps/k)(1 - exp(delta)) + exp(eps) exp(delta).
inline double PdeltaBound(double eps, size_t k, double exp_delta) {
  return std::exp(eps / static_cast<double>(k)) * (1 - exp_delta) +
         std::exp(eps) * exp_delta;
}

template <Scalar T>
absl::StatusOr<Verdict> BoundPdelta(const Channel<T>& c, size_t k,
                                    const Epsilon& eps, double exp_delta,
                                    const SamplerOptions& sampling,
                                    uint64_t budget = kDefaultEnumerationBudget) {
  const size_t n = c.universe().size();
  FamilyParams family;
  family.k = k;
  family.exp_delta = exp_delta;
  PRIVLENS_RETURN_IF_ERROR(family.Validate(n));
  const double dp = DpEpsilon(c);
  const double per = eps.nats / static_cast<double>(k);
  if (!(dp <= per + kTolerance)) {
    Verdict v = PreconditionFailed(
        "bound_pdelta", absl::StrCat("channel is ", FormatExtended(dp),
                                     "-DP, needs ", per, " (eps/k)"));
    v.bound = PdeltaBound(eps.nats, k, exp_delta);
    return v;
  }
  const double bound = PdeltaBound(eps.nats, k, exp_delta);
  PRIVLENS_ASSIGN_OR_RETURN(auto best, WorstcaseSupAll(c, family, SupStrategy::kBoth,
                                                       sampling, budget));
  Verdict v = MakeVerdict("bound_pdelta", bound, best.second.ratio);
  v.AddWitness("individual", absl::StrCat(best.first));
  v.AddWitness("source", best.second.source);
  if (best.second.sample_index && best.second.source == "sampled") {
    v.AddWitness("sample", absl::StrCat(*best.second.sample_index));
  }
  v.measured_exact = best.second.ratio_exact;
  v.extras.emplace_back("extremal", best.second.extremal_ratio);
  v.extras.emplace_back("sampled", best.second.sampled_ratio);
  v.extras.emplace_back("bound_nats_literal", std::log(bound));
  for (const auto& note : best.second.notes) v.AddNote(note);
  return v;
}

// Mediant condition for the dependence-constrained family. Given x_i, x_i'
// and a shared complement s, the private complements are free, so the
// numerator takes its largest private row and the denominator its smallest.
// The shared weight ranges over [1 - exp(delta), 1]; the mediant is monotone
// in the weight, so both endpoints are evaluated.
template <Scalar T>
absl::StatusOr<Verdict> NecessaryPdelta(const Channel<T>& c, double exp_delta,
                                        const Epsilon& eps,
                                        uint64_t budget = kDefaultEnumerationBudget) {
  if (!(exp_delta >= 0 && exp_delta <= 1)) {
    return absl::InvalidArgumentError("exp(delta) outside [0,1]");
  }
  const RecordUniverse& u = c.universe();
  const size_t n = u.size();
  PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space,
                            SequenceSpace::Create(c.index_ptr(), budget));
  const size_t R = c.num_outcomes();
  const T ed(exp_delta);
  std::vector<T> weights = {T(1) - ed};
  if (!(weights[0] == T(1))) weights.push_back(T(1));

  struct Best {
    ExtendedRatio<T> ratio = ExtendedRatio<T>::Finite(T(1));
    bool found = false;
    size_t i = 0;
    uint32_t x = 0, xp = 0;
    uint64_t shared = 0, num_private = 0, den_private = 0;
    size_t outcome = 0;
    double weight = 1;
  };
  std::vector<Best> per_individual(n);
  ParallelForChunks(n, [&](size_t i) {
    Best& best = per_individual[i];
    std::vector<size_t> rest;
    for (size_t j = 0; j < n; ++j) {
      if (j != i) rest.push_back(j);
    }
    const uint64_t CV = internal::ValueCount(u, rest);
    auto flat = [&](uint32_t xi, uint64_t comp) {
      RecordSequence s{std::vector<uint32_t>(n, 0)};
      internal::Assign(u, rest, comp, &s);
      s.entries[i] = xi;
      return space->FlatIndex(s);
    };
    for (uint32_t x = 0; x < u.AlphabetSize(i); ++x) {
      for (uint32_t xp = 0; xp < u.AlphabetSize(i); ++xp) {
        if (x == xp) continue;
        // Extremes of the private rows, per outcome.
        std::vector<T> hi(R), lo(R);
        std::vector<uint64_t> hi_at(R, 0), lo_at(R, 0);
        for (uint64_t comp = 0; comp < CV; ++comp) {
          const auto& rx = c.row(space->HistogramId(flat(x, comp)));
          const auto& rxp = c.row(space->HistogramId(flat(xp, comp)));
          for (size_t r = 0; r < R; ++r) {
            if (comp == 0 || rx[r] > hi[r]) {
              hi[r] = rx[r];
              hi_at[r] = comp;
            }
            if (comp == 0 || rxp[r] < lo[r]) {
              lo[r] = rxp[r];
              lo_at[r] = comp;
            }
          }
        }
        for (uint64_t s = 0; s < CV; ++s) {
          const auto& rx = c.row(space->HistogramId(flat(x, s)));
          const auto& rxp = c.row(space->HistogramId(flat(xp, s)));
          for (const T& wt : weights) {
            for (size_t r = 0; r < R; ++r) {
              T nr = wt * rx[r] + (T(1) - wt) * hi[r];
              T dr = wt * rxp[r] + (T(1) - wt) * lo[r];
              ExtendedRatio<T> ratio;
              if (!MakeRatio(nr, dr, &ratio)) continue;
              if (!best.found || ratio > best.ratio) {
                best = {ratio, true, i, x, xp, s, hi_at[r], lo_at[r], r, ToDouble(wt)};
              }
            }
          }
        }
      }
    }
  });
  Best best;
  for (auto& b : per_individual) {
    if (b.found && (!best.found || b.ratio > best.ratio)) best = b;
  }
  if (best.found && best.ratio < ExtendedRatio<T>::Finite(T(1))) {
    best.ratio = ExtendedRatio<T>::Finite(T(1));
  }
  Verdict v = MakeVerdict("necessary_pdelta", eps.Ratio(), best.ratio.AsDouble());
  internal::FillExact(&v, eps.exact_ratio, best.ratio);
  if (best.found) {
    std::vector<size_t> rest;
    for (size_t j = 0; j < n; ++j) {
      if (j != best.i) rest.push_back(j);
    }
    auto label = [&](uint64_t code) {
      std::vector<std::string> parts;
      auto values = internal::ValuesOf(u, rest, code);
      for (size_t j = 0; j < rest.size(); ++j) {
        parts.push_back(u.SymbolName(rest[j], values[j]));
      }
      return absl::StrCat("(", absl::StrJoin(parts, ","), ")");
    };
    v.AddWitness("individual", absl::StrCat(best.i));
    v.AddWitness("record", u.SymbolName(best.i, best.x));
    v.AddWitness("record_prime", u.SymbolName(best.i, best.xp));
    v.AddWitness("shared_complement", label(best.shared));
    v.AddWitness("numerator_private", label(best.num_private));
    v.AddWitness("denominator_private", label(best.den_private));
    v.AddWitness("outcome", c.outcomes()[best.outcome]);
    v.extras.emplace_back("shared_weight", best.weight);
  }
  return v;
}

namespace internal {

// Tilted corners of the band for one alphabet: weight exp(+-tau) on one
// symbol, exp(-+tau) on the rest, normalized. Two corners for binary
// alphabets.
template <Scalar T>
std::vector<std::vector<T>> BandCorners(size_t m, double tau) {
  std::vector<std::vector<T>> out;
  const double hi = std::exp(tau), lo = std::exp(-tau);
  for (int sign = 0; sign < 2; ++sign) {
    for (size_t x = 0; x < m; ++x) {
      if (m == 2 && x == 1) break;
      std::vector<double> w(m, sign == 0 ? lo : hi);
      w[x] = sign == 0 ? hi : lo;
      double total = 0;
      for (double v : w) total += v;
      std::vector<T> corner;
      for (double v : w) corner.push_back(T(v / total));
      out.push_back(std::move(corner));
    }
  }
  return out;
}

}  // namespace internal

// Averaging sufficient condition for priors whose n-k-1 averaged
// individuals I' are independent with the given marginals.
template <Scalar T>
absl::StatusOr<Verdict> SufficientNk(const Channel<T>& c, size_t k,
                                     const std::vector<std::vector<T>>& marginals,
                                     const Epsilon& eps, double tau,
                                     uint64_t budget = kDefaultEnumerationBudget) {
  const RecordUniverse& u = c.universe();
  const size_t n = u.size();
  if (k < 1 || k + 1 > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("k=", k, " outside [1,", n - 1, "] (|I'| = n-k-1 >= 0)"));
  }
  if (!(tau >= 0)) return absl::InvalidArgumentError("tau must be >= 0");
  if (marginals.size() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", n, " marginals, got ", marginals.size()));
  }
  const size_t averaged = n - k - 1;
  if (averaged > 0) {
    const double lo = std::exp(-tau), hi = std::exp(tau);
    for (size_t j = 0; j < n; ++j) {
      if (marginals[j].size() != u.AlphabetSize(j)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "marginal ", j, " has ", marginals[j].size(), " entries, alphabet has ",
            u.AlphabetSize(j)));
      }
      T sum(0);
      for (const T& m : marginals[j]) sum += m;
      if (std::abs(ToDouble(sum) - 1) > kTolerance) {
        return absl::InvalidArgumentError(
            absl::StrCat("marginal ", j, " sums to ", ToDouble(sum)));
      }
      for (size_t x = 0; x < marginals[j].size(); ++x) {
        const double scaled = ToDouble(marginals[j][x]) * u.AlphabetSize(j);
        if (scaled < lo - kTolerance || scaled > hi + kTolerance) {
          return absl::InvalidArgumentError(absl::StrCat(
              "marginal ", j, " violates the tau band at record ",
              u.SymbolName(j, x)));
        }
      }
    }
  }
  PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space,
                            SequenceSpace::Create(c.index_ptr(), budget));
  const size_t R = c.num_outcomes();

  struct Best {
    ExtendedRatio<T> ratio = ExtendedRatio<T>::Finite(T(1));
    bool found = false;
    size_t i = 0;
    std::vector<size_t> averaged_set;
    size_t outcome = 0;
    bool corner = false;
  };

  // Worst ratio for one (i, I') under the given marginal assignment.
  auto evaluate = [&](size_t i, const std::vector<size_t>& avg,
                      const std::vector<const std::vector<T>*>& law, Best* best,
                      bool corner) {
    std::vector<size_t> outer;  // i and J
    for (size_t j = 0; j < n; ++j) {
      if (!internal::Contains(avg, j)) outer.push_back(j);
    }
    const uint64_t OV = internal::ValueCount(u, outer);
    const uint64_t AV = internal::ValueCount(u, avg);
    std::vector<T> hi(R, T(0)), lo(R, T(0));
    bool first = true;
    for (uint64_t o = 0; o < OV; ++o) {
      RecordSequence s{std::vector<uint32_t>(n, 0)};
      internal::Assign(u, outer, o, &s);
      std::vector<T> mix(R, T(0));
      for (uint64_t a = 0; a < AV; ++a) {
        internal::Assign(u, avg, a, &s);
        T weight(1);
        for (size_t j = 0; j < avg.size(); ++j) {
          weight *= (*law[j])[s.entries[avg[j]]];
        }
        if (IsZero(weight)) continue;
        const auto& row = c.row(space->HistogramId(space->FlatIndex(s)));
        for (size_t r = 0; r < R; ++r) mix[r] += weight * row[r];
      }
      for (size_t r = 0; r < R; ++r) {
        if (first || mix[r] > hi[r]) hi[r] = mix[r];
        if (first || mix[r] < lo[r]) lo[r] = mix[r];
      }
      first = false;
    }
    (void)i;
    for (size_t r = 0; r < R; ++r) {
      ExtendedRatio<T> ratio;
      if (!MakeRatio(hi[r], lo[r], &ratio)) continue;
      if (!best->found || ratio > best->ratio) {
        *best = {ratio, true, i, avg, r, corner};
      }
    }
  };

  Best best;
  bool corners_used = false;
  for (size_t i = 0; i < n; ++i) {
    std::vector<size_t> pool;
    for (size_t j = 0; j < n; ++j) {
      if (j != i) pool.push_back(j);
    }
    for (const auto& avg : internal::SubsetsOfSize(pool, averaged)) {
      std::vector<const std::vector<T>*> law;
      for (size_t j : avg) law.push_back(&marginals[j]);
      evaluate(i, avg, law, &best, false);
      if (tau > 0 && !avg.empty()) {
        std::vector<std::vector<std::vector<T>>> corners;
        uint64_t combos = 1;
        for (size_t j : avg) {
          corners.push_back(internal::BandCorners<T>(u.AlphabetSize(j), tau));
          combos *= corners.back().size();
        }
        if (combos > budget) continue;
        corners_used = true;
        for (uint64_t code = 0; code < combos; ++code) {
          uint64_t rest = code;
          std::vector<const std::vector<T>*> corner_law(avg.size());
          for (size_t j = avg.size(); j-- > 0;) {
            corner_law[j] = &corners[j][rest % corners[j].size()];
            rest /= corners[j].size();
          }
          evaluate(i, avg, corner_law, &best, true);
        }
      }
    }
  }
  // Measured is the ratio condition of the mixture; no pair at all means
  // the channel cannot distinguish anything.
  Verdict v = MakeVerdict("sufficient_nk", eps.Ratio(), best.ratio.AsDouble());
  internal::FillExact(&v, eps.exact_ratio, best.ratio);
  if (best.found) {
    v.AddWitness("individual", absl::StrCat(best.i));
    v.AddWitness("averaged", absl::StrCat("{", absl::StrJoin(best.averaged_set, ","), "}"));
    v.AddWitness("outcome", c.outcomes()[best.outcome]);
    if (best.corner) v.AddWitness("marginals", "band corner");
  }
  if (corners_used) v.AddNote("tau > 0: band corners evaluated (heuristic)");
  if (!v.satisfied) {
    v.status = VerdictStatus::kInconclusive;
    v.AddNote("sufficient condition failed; no conclusion about the family");
  }
  return v;
}

// Group information privacy on P_k. The measured value is the exact group
// sup; both links of the bound chain are asserted.
template <Scalar T>
absl::StatusOr<Verdict> GroupCertify(const Channel<T>& c, size_t k,
                                     const Epsilon& eps, std::vector<size_t> group,
                                     uint64_t budget = kDefaultEnumerationBudget) {
  const RecordUniverse& u = c.universe();
  if (group.empty()) return absl::InvalidArgumentError("group must be non-empty");
  std::sort(group.begin(), group.end());
  for (size_t j = 0; j < group.size(); ++j) {
    if (group[j] >= u.size() || (j > 0 && group[j] == group[j - 1])) {
      return absl::InvalidArgumentError(absl::StrCat("invalid group member ", group[j]));
    }
  }
  PRIVLENS_ASSIGN_OR_RETURN(Verdict pre, CertifyPk(c, k, eps, budget));
  if (!pre.satisfied) {
    Verdict v = PreconditionFailed(
        "group_certify", absl::StrCat("certify_pk(k=", k, ") is violated: measured ",
                                      pre.measured, " > ", pre.bound));
    return v;
  }
  const double m = static_cast<double>(group.size());
  const double blocks_term =
      std::ceil((m - 1) / static_cast<double>(k)) + 1;
  const double intermediate = std::exp(blocks_term * eps.nats);
  const double final_bound = std::exp(m * eps.nats);
  PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space,
                            SequenceSpace::Create(c.index_ptr(), budget));
  PRIVLENS_ASSIGN_OR_RETURN(auto sup, GroupLevelSup(c, *space, k, group, budget));
  Verdict v = MakeVerdict("group_certify", intermediate, sup.ratio.AsDouble());
  if constexpr (kIsExact<T>) v.measured_exact = sup.ratio.ExactString();
  v.extras.emplace_back("intermediate_bound", intermediate);
  v.extras.emplace_back("final_bound", final_bound);
  const bool chain = intermediate <= final_bound * (1 + kTolerance);
  v.satisfied = v.satisfied && chain;
  v.status = v.satisfied ? VerdictStatus::kSatisfied : VerdictStatus::kViolated;
  v.AddWitness("group", absl::StrCat("{", absl::StrJoin(group, ","), "}"));
  internal::AddPairWitness(&v, c, *space, sup);
  if (sup.found) {
    // Cross-check the sup against the limit prior that realizes it.
    PRIVLENS_ASSIGN_OR_RETURN(
        JointPrior<T> prior,
        GroupLimitPrior<T>(c.index().universe_ptr(), group,
                           space->At(sup.numerator), space->At(sup.denominator), k));
    PRIVLENS_ASSIGN_OR_RETURN(auto analyzer, LeakageAnalyzer<T>::Create(space, prior, c));
    PRIVLENS_ASSIGN_OR_RETURN(auto rep, analyzer.Report(group));
    v.extras.emplace_back("witness_prior_ratio", rep.i_inf_ratio.AsDouble());
  }
  return v;
}

enum class MediantDirection { kIncreasing, kDecreasing };

inline const char* MediantDirectionName(MediantDirection d) {
  return d == MediantDirection::kIncreasing ? "increasing" : "decreasing";
}

// Direction of g(t) = (a0 + t a1) / (b0 + t b1) on t >= 0: the sign of
// a1 b0 - a0 b1. Equality counts as decreasing.
template <Scalar T>
absl::StatusOr<MediantDirection> MediantMonotone(const T& a0, const T& a1,
                                                 const T& b0, const T& b1) {
  if (!IsPositive(b0) || !IsPositive(b1)) {
    return absl::InvalidArgumentError("denominators must be positive");
  }
  if (a0 < T(0) || a1 < T(0)) {
    return absl::InvalidArgumentError("numerators must be nonnegative");
  }
  return a1 * b0 - a0 * b1 > T(0) ? MediantDirection::kIncreasing
                                  : MediantDirection::kDecreasing;
}

}  // namespace privlens

#endif  // PRIVLENS_AUDIT_H_
