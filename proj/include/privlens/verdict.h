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

#ifndef PRIVLENS_VERDICT_H_
#define PRIVLENS_VERDICT_H_

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "privlens/scalar.h"

namespace privlens {

enum class VerdictStatus {
  kSatisfied,
  kViolated,
  // The check could not decide (sufficient condition failed, search cut
  // short, or no admissible sample).
  kInconclusive,
  kPreconditionFailed,
};

inline const char* VerdictStatusName(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kSatisfied:
      return "satisfied";
    case VerdictStatus::kViolated:
      return "violated";
    case VerdictStatus::kInconclusive:
      return "inconclusive";
    case VerdictStatus::kPreconditionFailed:
      return "precondition-failed";
  }
  return "unknown";
}

// Outcome of one claim. Bound and measured live on the ratio scale.
struct Verdict {
  std::string claim;
  double bound = 1;
  double measured = 1;
  std::optional<std::string> bound_exact;
  std::optional<std::string> measured_exact;
  bool satisfied = false;
  VerdictStatus status = VerdictStatus::kViolated;
  std::vector<std::pair<std::string, std::string>> witness;
  std::vector<std::string> notes;
  // Further named ratio-scale quantities, e.g. an intermediate bound.
  std::vector<std::pair<std::string, double>> extras;

  void AddNote(std::string note) { notes.push_back(std::move(note)); }
  void AddWitness(std::string key, std::string value) {
    witness.emplace_back(std::move(key), std::move(value));
  }
};

// A privacy parameter in nats, with exp(nats) as an exact rational string
// when the scenario supplied it as ln(p/q).
struct Epsilon {
  double nats = 0;
  std::optional<std::string> exact_ratio;

  double Ratio() const { return std::exp(nats); }
};

inline bool WithinBound(double measured, double bound) {
  if (std::isinf(bound)) return true;
  return measured <= bound + kTolerance;
}

inline Verdict MakeVerdict(std::string claim, double bound, double measured) {
  Verdict v;
  v.claim = std::move(claim);
  v.bound = bound;
  v.measured = measured;
  v.satisfied = WithinBound(measured, bound);
  v.status = v.satisfied ? VerdictStatus::kSatisfied : VerdictStatus::kViolated;
  return v;
}

inline Verdict PreconditionFailed(std::string claim, std::string why) {
  Verdict v;
  v.claim = std::move(claim);
  v.satisfied = false;
  v.status = VerdictStatus::kPreconditionFailed;
  v.notes.push_back(std::move(why));
  return v;
}

}  // namespace privlens

#endif  // PRIVLENS_VERDICT_H_
