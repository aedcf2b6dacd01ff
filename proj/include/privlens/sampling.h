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

// Seeded random priors and channels for the sampling oracles and the
// property tests. Sample j depends only on (seed, j), never on the thread
// count or on how many other samples were drawn.

#ifndef PRIVLENS_SAMPLING_H_
#define PRIVLENS_SAMPLING_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privlens/mechanism.h"
#include "privlens/parallel.h"
#include "privlens/prior.h"
#include "privlens/universe.h"

namespace privlens {

// Independent engine for stream `stream` of a seeded experiment.
inline std::mt19937_64 StreamEngine(uint64_t seed, uint64_t stream,
                                    uint64_t attempt = 0) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(stream >> 32),
                    static_cast<uint32_t>(attempt)};
  return std::mt19937_64(seq);
}

inline std::vector<double> SampleDirichlet(size_t m, double alpha,
                                           std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> out(m);
  double total = 0;
  for (double& x : out) {
    x = gamma(rng);
    total += x;
  }
  if (!(total > 0)) {
    std::fill(out.begin(), out.end(), 0.0);
    out[std::uniform_int_distribution<size_t>(0, m - 1)(rng)] = 1.0;
    return out;
  }
  for (double& x : out) x /= total;
  return out;
}

// Marginal with every scaled mass Pr[x]*m inside [exp(-tau), exp(tau)].
inline std::vector<double> SampleBandMarginal(size_t m, double tau,
                                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(std::exp(-tau / 2), std::exp(tau / 2));
  std::vector<double> out(m);
  double total = 0;
  for (double& x : out) {
    x = w(rng);
    total += x;
  }
  for (double& x : out) x /= total;
  return out;
}

struct SamplerOptions {
  size_t samples = 1000;
  uint64_t seed = 0;
  size_t attempts_per_sample = 64;
};

namespace internal {

inline double DrawConcentration(std::mt19937_64& rng) {
  static constexpr double kChoices[] = {0.15, 0.5, 1.0, 4.0};
  return kChoices[std::uniform_int_distribution<int>(0, 3)(rng)];
}

// Weight of the joint Dirichlet component: zero a third of the time so that
// factorized (sigma = 0) blocks appear, small values often.
inline double DrawCoupling(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0) return 0.0;
  const double x = u(rng);
  return kind == 1 ? x * x * x : x;
}

}  // namespace internal

// One candidate prior (not yet checked against the family). Blocks have
// size at most k; ell individuals get band marginals, as singletons when the
// family demands the product form (and half of the time otherwise).
inline JointPrior<double> DrawPrior(const UniversePtr& universe,
                                    const FamilyParams& family,
                                    std::mt19937_64& rng) {
  const RecordUniverse& u = *universe;
  const size_t n = u.size();
  const size_t kmax = family.k.value_or(n);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<size_t>> blocks;
  std::vector<std::vector<double>> tables;
  size_t start = 0;
  if (family.ell && *family.ell > 0) {
    const bool singletons =
        family.band_independent || std::bernoulli_distribution(0.5)(rng);
    if (singletons) {
      for (; start < *family.ell; ++start) {
        const size_t i = order[start];
        blocks.push_back({i});
        tables.push_back(SampleBandMarginal(u.AlphabetSize(i), *family.tau, rng));
      }
    }
  }
  while (start < n) {
    const size_t left = n - start;
    const size_t size = std::uniform_int_distribution<size_t>(
        1, std::min(kmax, left))(rng);
    std::vector<size_t> block(order.begin() + start, order.begin() + start + size);
    std::sort(block.begin(), block.end());
    start += size;
    uint64_t cells = 1;
    for (size_t i : block) cells *= u.AlphabetSize(i);
    std::vector<std::vector<double>> marginals;
    for (size_t i : block) {
      marginals.push_back(
          SampleDirichlet(u.AlphabetSize(i), internal::DrawConcentration(rng), rng));
    }
    const double lambda = block.size() > 1 ? internal::DrawCoupling(rng) : 0.0;
    std::vector<double> joint;
    if (lambda > 0) joint = SampleDirichlet(cells, internal::DrawConcentration(rng), rng);
    std::vector<double> table(cells);
    for (uint64_t code = 0; code < cells; ++code) {
      double product = 1;
      uint64_t rest = code;
      for (size_t j = block.size(); j-- > 0;) {
        const uint64_t m = u.AlphabetSize(block[j]);
        product *= marginals[j][rest % m];
        rest /= m;
      }
      table[code] = (1 - lambda) * product + (lambda > 0 ? lambda * joint[code] : 0.0);
    }
    blocks.push_back(std::move(block));
    tables.push_back(std::move(table));
  }
  return *JointPrior<double>::Create(universe, std::move(blocks),
                                     std::move(tables));
}

// Member priors by rejection: slot j holds the first accepted draw among its
// attempts, or nothing.
struct PriorSample {
  std::vector<std::optional<JointPrior<double>>> slots;
  size_t accepted = 0;
  uint64_t attempts = 0;
};

inline PriorSample SampleMembers(const UniversePtr& universe,
                                 const FamilyParams& family,
                                 const SamplerOptions& options) {
  PriorSample out;
  out.slots.resize(options.samples);
  std::vector<uint64_t> tries(options.samples, 0);
  ParallelForChunks(options.samples, [&](size_t j) {
    for (size_t a = 0; a < options.attempts_per_sample; ++a) {
      std::mt19937_64 rng = StreamEngine(options.seed, j, a);
      JointPrior<double> p = DrawPrior(universe, family, rng);
      ++tries[j];
      if (CheckMembership(p, family).member) {
        out.slots[j] = std::move(p);
        return;
      }
    }
  });
  for (size_t j = 0; j < options.samples; ++j) {
    out.attempts += tries[j];
    if (out.slots[j]) ++out.accepted;
  }
  return out;
}

// Random row-stochastic channel with `outcomes` outcomes. Rows are Dirichlet
// draws of random concentration, so some are close to point masses.
inline Channel<double> RandomChannel(HistogramIndexPtr index, size_t outcomes,
                                     std::mt19937_64& rng) {
  std::vector<std::string> labels;
  for (size_t r = 0; r < outcomes; ++r) labels.push_back(std::to_string(r));
  std::vector<std::vector<double>> rows;
  for (size_t h = 0; h < index->size(); ++h) {
    rows.push_back(SampleDirichlet(outcomes, internal::DrawConcentration(rng), rng));
  }
  return *Channel<double>::Create(std::move(index), std::move(labels),
                                  std::move(rows));
}

// Random channel whose distance-1 ratio is at most exp(eps): every row is a
// mixture (1-t)*base + t*noise with a common full-support base, then checked.
inline Channel<double> RandomDpChannel(HistogramIndexPtr index, size_t outcomes,
                                       double eps, std::mt19937_64& rng) {
  std::vector<std::string> labels;
  for (size_t r = 0; r < outcomes; ++r) labels.push_back(std::to_string(r));
  std::vector<double> base = SampleDirichlet(outcomes, 4.0, rng);
  std::vector<std::vector<double>> noise;
  for (size_t h = 0; h < index->size(); ++h) {
    noise.push_back(SampleDirichlet(outcomes, internal::DrawConcentration(rng), rng));
  }
  // Mixing weight t keeps each entry within [ (1-t) b, (1-t) b + t ], and
  // ratios of such entries within ((1-t) b + t) / ((1-t) b).
  double bmin = *std::min_element(base.begin(), base.end());
  bmin = std::max(bmin, 1e-6);
  // So t / (1 - t) <= (exp(eps) - 1) * min_r b_r suffices.
  const double g = (std::exp(eps) - 1) * bmin;
  double t = g / (1 + g);
  t *= std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  std::vector<std::vector<double>> rows;
  for (size_t h = 0; h < index->size(); ++h) {
    std::vector<double> row(outcomes);
    for (size_t r = 0; r < outcomes; ++r) row[r] = (1 - t) * base[r] + t * noise[h][r];
    rows.push_back(std::move(row));
  }
  return *Channel<double>::Create(std::move(index), std::move(labels),
                                  std::move(rows));
}

template <Scalar T>
Channel<double> ToDoubleChannel(const Channel<T>& c) {
  if constexpr (std::is_same_v<T, double>) {
    return c;
  } else {
    std::vector<std::vector<double>> rows;
    for (size_t h = 0; h < c.num_rows(); ++h) {
      std::vector<double> row;
      for (const T& x : c.row(h)) row.push_back(ToDouble(x));
      rows.push_back(std::move(row));
    }
    return *Channel<double>::Create(c.index_ptr(), c.outcomes(), std::move(rows));
  }
}

template <Scalar T>
JointPrior<double> ToDoublePrior(const JointPrior<T>& p) {
  if constexpr (std::is_same_v<T, double>) {
    return p;
  } else {
    std::vector<std::vector<size_t>> blocks;
    std::vector<std::vector<double>> tables;
    for (size_t b = 0; b < p.num_blocks(); ++b) {
      blocks.push_back(p.block(b));
      std::vector<double> t;
      for (const T& x : p.table(b)) t.push_back(ToDouble(x));
      tables.push_back(std::move(t));
    }
    std::vector<LimitRecord<double>> limits;
    for (const auto& lim : p.limits()) {
      std::vector<double> cond;
      for (const T& x : lim.conditional) cond.push_back(ToDouble(x));
      limits.push_back({lim.individual, lim.record, std::move(cond)});
    }
    return *JointPrior<double>::Create(p.universe_ptr(), std::move(blocks),
                                       std::move(tables), std::move(limits));
  }
}

}  // namespace privlens

#endif  // PRIVLENS_SAMPLING_H_
