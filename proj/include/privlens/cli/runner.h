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

// Executes a parsed scenario and renders the report. The JSON report is a
// pure function of the scenario and the seed, samples and budget; thread
// count and timing never enter it.

#ifndef PRIVLENS_CLI_RUNNER_H_
#define PRIVLENS_CLI_RUNNER_H_

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
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "privlens/audit.h"
#include "privlens/cli/scenario.h"
#include "privlens/compose.h"
#include "privlens/leakage.h"
#include "privlens/mechanism.h"
#include "privlens/prior.h"
#include "privlens/sampling.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"
#include "privlens/verdict.h"

namespace privlens::cli {

inline constexpr char kToolVersion[] = "0.1.0";

enum ExitCode : int {
  kExitPass = 0,
  kExitViolated = 1,
  kExitInconclusive = 2,
  kExitBudget = 3,
  kExitInput = 4,
};

struct RunOptions {
  std::string command;  // leakage | certify | bound | compose | sweep | validate
  std::optional<uint64_t> seed;
  std::optional<uint64_t> samples;
  std::optional<uint64_t> budget;
};

struct RunResult {
  Json report;
  int exit_code = kExitPass;
};

// JSON rendering helpers -----------------------------------------------------

inline Json Real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline Json RatioScale(double ratio, const std::optional<std::string>& exact = std::nullopt) {
  Json j;
  j["ratio"] = Real(ratio);
  j["nats"] = Real(ratio > 0 ? std::log(ratio) : -std::numeric_limits<double>::infinity());
  if (exact) j["exact"] = *exact;
  return j;
}

inline Json VerdictJson(const Verdict& v) {
  Json j;
  j["claim"] = v.claim;
  j["status"] = VerdictStatusName(v.status);
  j["satisfied"] = v.satisfied;
  j["bound"] = RatioScale(v.bound, v.bound_exact);
  j["measured"] = RatioScale(v.measured, v.measured_exact);
  Json w = Json::object();
  for (const auto& [key, value] : v.witness) w[key] = value;
  j["witness"] = std::move(w);
  Json extras = Json::object();
  for (const auto& [key, value] : v.extras) extras[key] = RatioScale(value);
  if (!extras.empty()) j["extras"] = std::move(extras);
  j["notes"] = v.notes;
  return j;
}

template <Scalar T>
std::optional<std::string> ExactOf(const ExtendedRatio<T>& r) {
  if constexpr (kIsExact<T>) {
    return r.ExactString();
  } else {
    return std::nullopt;
  }
}

// Both scales read off the ratio itself, so exact values print exactly.
template <Scalar T>
Json ExtendedJson(const ExtendedRatio<T>& r) {
  Json j;
  j["nats"] = Real(r.Nats());
  j["ratio"] = Real(r.AsDouble());
  if (auto exact = ExactOf(r)) j["exact_ratio"] = *exact;
  return j;
}

template <Scalar T>
Json LeakageJson(const LeakageReport<T>& rep) {
  Json j;
  j["target"] = rep.target;
  j["i_inf"] = ExtendedJson(rep.i_inf_ratio);
  if (rep.i_inf_witness) {
    j["i_inf_witness"] = {{"record", rep.i_inf_witness->value},
                          {"outcome", rep.i_inf_witness->outcome}};
  }
  j["mi"] = Real(rep.mi);
  j["max_rel_entropy"] = Real(rep.max_rel_ent);
  if (rep.max_rel_witness) j["max_rel_entropy_outcome"] = *rep.max_rel_witness;
  Json inf = ExtendedJson(rep.inferential_ratio);
  inf["vacuous"] = rep.inferential_vacuous;
  if (rep.inferential_records) {
    inf["records"] = {rep.inferential_records->first, rep.inferential_records->second};
  }
  if (rep.inferential_outcome) inf["outcome"] = *rep.inferential_outcome;
  j["inferential_eps"] = std::move(inf);
  j["output_entropy"] = Real(rep.output_entropy);
  j["used_limit_records"] = rep.used_limit_records;
  return j;
}

// Model construction --------------------------------------------------------

template <Scalar T>
T FromRational(const Rational& r) {
  if constexpr (kIsExact<T>) {
    return r;
  } else {
    return ToDouble(r);
  }
}

template <Scalar T>
std::vector<T> FromRationals(const std::vector<Rational>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(FromRational<T>(r));
  return out;
}

inline absl::Status Prefixed(const absl::Status& s, absl::string_view path) {
  if (s.ok()) return s;
  return absl::Status(s.code(), absl::StrCat(path, ": ", s.message()));
}

template <Scalar T>
class Model {
 public:
  static absl::StatusOr<Model> Build(const Scenario& s, uint64_t budget) {
    Model m;
    m.scenario_ = &s;
    m.budget_ = budget;
    PRIVLENS_ASSIGN_OR_RETURN(RecordUniverse u, RecordUniverse::Create(s.universe));
    m.universe_ = std::make_shared<const RecordUniverse>(std::move(u));
    m.index_ = HistogramIndex::Create(m.universe_);
    return m;
  }

  const UniversePtr& universe() const { return universe_; }
  const HistogramIndexPtr& index() const { return index_; }

  absl::StatusOr<SequenceSpacePtr> Space() {
    if (!space_) {
      PRIVLENS_ASSIGN_OR_RETURN(space_, SequenceSpace::Create(index_, budget_));
    }
    return space_;
  }

  absl::StatusOr<JointPrior<T>> Prior(const std::string& name) {
    if (auto it = priors_.find(name); it != priors_.end()) return it->second;
    const std::string path = absl::StrCat("/priors/", name);
    auto built = BuildPrior(scenario_->priors.at(name));
    if (!built.ok()) return Prefixed(built.status(), path);
    priors_.emplace(name, *built);
    return *built;
  }

  absl::StatusOr<Channel<T>> ChannelNamed(const std::string& name) {
    if (auto it = channels_.find(name); it != channels_.end()) return it->second;
    const std::string path = absl::StrCat("/channels/", name);
    auto built = BuildChannel(scenario_->channels.at(name));
    if (!built.ok()) return Prefixed(built.status(), path);
    channels_.emplace(name, *built);
    return *built;
  }

 private:
  absl::StatusOr<JointPrior<T>> BuildPrior(const PriorSpec& p) {
    const RecordUniverse& u = *universe_;
    if (p.kind == "uniform") return JointPrior<T>::Uniform(universe_);
    if (p.kind == "independent") {
      if (p.marginals.size() != u.size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "expected ", u.size(), " marginals, got ", p.marginals.size()));
      }
      std::vector<std::vector<T>> marginals;
      for (const auto& m : p.marginals) marginals.push_back(FromRationals<T>(m));
      return JointPrior<T>::Independent(universe_, std::move(marginals));
    }
    if (p.kind == "blocks") {
      std::vector<std::vector<T>> tables;
      for (const auto& t : p.tables) tables.push_back(FromRationals<T>(t));
      std::vector<LimitRecord<T>> limits;
      for (const auto& lim : p.limits) {
        if (lim.individual >= u.size()) {
          return absl::InvalidArgumentError(
              absl::StrCat("limit individual ", lim.individual, " out of range"));
        }
        auto record = u.LocalIndex(lim.individual, lim.record);
        if (!record) {
          return absl::InvalidArgumentError(absl::StrCat(
              "limit record '", lim.record, "' not in alphabet ", lim.individual));
        }
        limits.push_back({lim.individual, *record, FromRationals<T>(lim.conditional)});
      }
      return JointPrior<T>::Create(universe_, p.blocks, std::move(tables), std::move(limits));
    }
    // full
    PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space, Space());
    return FactorizeWithPartition<T>(*space, p.blocks, FromRationals<T>(p.full_table));
  }

  absl::StatusOr<Channel<T>> BuildChannel(const ChannelSpec& c) {
    if (c.kind == "matrix") {
      std::map<std::string, std::vector<T>> rows;
      for (const auto& [key, row] : c.rows) rows.emplace(key, FromRationals<T>(row));
      return MatrixChannel<T>(index_, c.outcomes, rows);
    }
    if (c.kind == "constant") {
      std::vector<std::vector<T>> rows(index_->size(), FromRationals<T>(c.row));
      return Channel<T>::Create(index_, c.outcomes, std::move(rows));
    }
    if (c.kind == "identity") return IdentityChannel<T>(index_);
    if (c.kind == "geometric") {
      if (c.alpha) return GeometricCountingChannel<T>(index_, c.target, FromRational<T>(*c.alpha), c.m);
      if constexpr (kIsExact<T>) {
        return absl::InvalidArgumentError(
            "geometric epsilon is not of the form ln(p/q); exact arithmetic impossible");
      } else {
        return GeometricCountingChannel(index_, c.target, *c.epsilon_nats, c.m);
      }
    }
    if (c.kind == "randomized_response") {
      return RandomizedResponseChannel<T>(index_, FromRational<T>(c.keep));
    }
    if (c.kind == "product") {
      std::vector<Channel<T>> parts;
      for (const auto& name : c.of) {
        PRIVLENS_ASSIGN_OR_RETURN(Channel<T> part, ChannelNamed(name));
        parts.push_back(std::move(part));
      }
      return ProductChannel(parts);
    }
    // postprocess
    PRIVLENS_ASSIGN_OR_RETURN(Channel<T> inner, ChannelNamed(c.of[0]));
    return Postprocess(inner, c.map);
  }

  const Scenario* scenario_ = nullptr;
  uint64_t budget_ = kDefaultEnumerationBudget;
  UniversePtr universe_;
  HistogramIndexPtr index_;
  SequenceSpacePtr space_;
  std::map<std::string, JointPrior<T>> priors_;
  std::map<std::string, Channel<T>> channels_;
};

// Exact arithmetic is possible unless a geometric channel was given an
// epsilon that is not a log of a rational.
inline bool ExactPossible(const Scenario& s) {
  for (const auto& [name, c] : s.channels) {
    if (c.kind == "geometric" && !c.alpha) return false;
  }
  return true;
}

inline Epsilon ToEpsilon(const EpsilonSpec& e) {
  Epsilon out;
  out.nats = e.nats;
  if (e.ratio) out.exact_ratio = RationalText(*e.ratio);
  return out;
}

inline FamilyParams ToFamily(const FamilySpec& f) {
  FamilyParams p;
  p.k = f.k;
  if (f.exp_delta) p.exp_delta = f.exp_delta->value;
  p.ell = f.ell;
  p.tau = f.tau;
  p.band_independent = f.band_independent;
  return p;
}

// Status bookkeeping across the verdicts of one run.
class Tally {
 public:
  void Add(VerdictStatus s) {
    switch (s) {
      case VerdictStatus::kSatisfied:
        break;
      case VerdictStatus::kViolated:
        violated_ = true;
        break;
      case VerdictStatus::kInconclusive:
      case VerdictStatus::kPreconditionFailed:
        inconclusive_ = true;
        break;
    }
  }
  int ExitCode() const {
    if (violated_) return kExitViolated;
    if (inconclusive_) return kExitInconclusive;
    return kExitPass;
  }

 private:
  bool violated_ = false;
  bool inconclusive_ = false;
};

template <Scalar T>
class TaskRunner {
 public:
  TaskRunner(const Scenario& s, Model<T>& model, const SamplerOptions& sampling,
             uint64_t budget)
      : s_(s), model_(model), sampling_(sampling), budget_(budget) {}

  // Appends results to `out` as they complete, so a failure leaves the
  // partial report behind.
  absl::Status Run(Json& out, Tally& tally) {
    const TaskSpec& t = s_.task;
    if (t.kind == "leakage") return Leakage(out, tally);
    if (t.kind == "certify") return Certify(out, tally);
    if (t.kind == "bound" || t.kind == "sweep") return Sweep(out, tally);
    return Compose(out, tally);
  }

 private:
  absl::Status Leakage(Json& out, Tally& tally) {
    const TaskSpec& t = s_.task;
    PRIVLENS_ASSIGN_OR_RETURN(JointPrior<T> prior, model_.Prior(t.prior));
    PRIVLENS_ASSIGN_OR_RETURN(Channel<T> channel, model_.ChannelNamed(t.channel));
    PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space, model_.Space());
    Json info;
    Entropy h = PriorEntropy(prior);
    info["entropy"] = {{"nats", Real(h.nats)}, {"bits", Real(h.bits)}};
    SigmaResult<T> sigma = Sigma(prior);
    info["sigma"] = Real(ToDouble(sigma.value));
    if constexpr (kIsExact<T>) info["sigma_exact"] = ScalarToString(sigma.value);
    info["max_block_size"] = prior.MaxBlockSize();
    info["limit_records"] = prior.limits().size();
    out["prior"] = std::move(info);
    out["dp_epsilon"] = Real(DpEpsilon(channel));
    PRIVLENS_ASSIGN_OR_RETURN(auto analyzer, LeakageAnalyzer<T>::Create(space, prior, channel));
    std::vector<std::vector<size_t>> targets = t.targets;
    if (targets.empty()) {
      for (size_t i = 0; i < prior.universe().size(); ++i) targets.push_back({i});
    }
    out["leakage"] = Json::array();
    for (size_t a = 0; a < targets.size(); ++a) {
      for (size_t i : targets[a]) {
        if (i >= prior.universe().size()) {
          return absl::InvalidArgumentError(
              absl::StrCat("/task/targets/", a, ": individual ", i, " out of range"));
        }
      }
      PRIVLENS_ASSIGN_OR_RETURN(auto rep, analyzer.Report(targets[a]));
      out["leakage"].push_back(LeakageJson(rep));
    }
    tally.Add(VerdictStatus::kSatisfied);
    return absl::OkStatus();
  }

  absl::StatusOr<Verdict> Claim(const ClaimSpec& c, const Channel<T>& channel) {
    const size_t n = channel.universe().size();
    const Epsilon eps = c.epsilon ? ToEpsilon(*c.epsilon) : Epsilon{};
    if (c.claim == "certify_pk") return CertifyPk(channel, *c.k, eps, budget_);
    if (c.claim == "tightness_pk") return TightnessPk(channel, *c.k, budget_);
    if (c.claim == "bound_pdelta") {
      return BoundPdelta(channel, *c.k, eps, c.exp_delta->value, sampling_, budget_);
    }
    if (c.claim == "necessary_pdelta") {
      return NecessaryPdelta(channel, c.exp_delta->value, eps, budget_);
    }
    if (c.claim == "sufficient_nk") {
      std::vector<std::vector<T>> marginals;
      if (c.marginals) {
        for (const auto& m : *c.marginals) marginals.push_back(FromRationals<T>(m));
      } else {
        for (size_t i = 0; i < n; ++i) {
          const size_t m = channel.universe().AlphabetSize(i);
          marginals.push_back(std::vector<T>(m, T(1) / T(static_cast<int>(m))));
        }
      }
      return SufficientNk(channel, *c.k, marginals, eps, c.tau.value_or(0.0), budget_);
    }
    if (c.claim == "group_certify") return GroupCertify(channel, *c.k, eps, c.group, budget_);
    if (c.claim == "membership") {
      PRIVLENS_ASSIGN_OR_RETURN(JointPrior<T> prior, model_.Prior(c.prior));
      return Membership(prior, c);
    }
    if (c.claim == "personalized") {
      PRIVLENS_ASSIGN_OR_RETURN(JointPrior<T> prior, model_.Prior(c.prior));
      PRIVLENS_ASSIGN_OR_RETURN(SequenceSpacePtr space, model_.Space());
      PRIVLENS_ASSIGN_OR_RETURN(auto analyzer, LeakageAnalyzer<T>::Create(space, prior, channel));
      std::vector<double> budgets;
      for (const auto& e : c.epsilons) budgets.push_back(e.nats);
      return PersonalizedCheck(analyzer, budgets);
    }
    return WorstCase(c, channel);
  }

  FamilyParams ClaimFamily(const ClaimSpec& c) const {
    FamilyParams f = ToFamily(s_.family);
    if (c.k) f.k = c.k;
    if (c.exp_delta) f.exp_delta = c.exp_delta->value;
    if (c.tau) f.tau = c.tau;
    return f;
  }

  absl::StatusOr<Verdict> Membership(const JointPrior<T>& prior, const ClaimSpec& c) {
    FamilyParams f = ClaimFamily(c);
    PRIVLENS_RETURN_IF_ERROR(f.Validate(prior.universe().size()));
    MembershipVerdict<T> m = CheckMembership(prior, f);
    Verdict v = MakeVerdict("membership", f.exp_delta.value_or(1.0), ToDouble(m.sigma.value));
    v.satisfied = m.member;
    v.status = m.member ? VerdictStatus::kSatisfied : VerdictStatus::kViolated;
    v.AddWitness("prior", c.prior);
    v.AddWitness("in_pk", m.in_pk ? "true" : "false");
    v.AddWitness("in_pdelta", m.in_pdelta ? "true" : "false");
    v.AddWitness("in_band", m.in_band ? "true" : "false");
    if (m.witness_block) {
      v.AddWitness("oversized_block",
                   absl::StrCat("{", absl::StrJoin(prior.block(*m.witness_block), ","), "}"));
    }
    if (m.sigma.individual) {
      const RecordUniverse& u = prior.universe();
      v.AddWitness("sigma_individual", absl::StrCat(*m.sigma.individual));
      v.AddWitness("sigma_records",
                   absl::StrCat(u.SymbolName(*m.sigma.individual, m.sigma.record_a), ",",
                                u.SymbolName(*m.sigma.individual, m.sigma.record_b)));
    }
    if (f.ell) {
      v.AddWitness("band_individuals",
                   absl::StrCat("{", absl::StrJoin(m.band_individuals, ","), "}"));
    }
    for (const auto& note : m.notes) v.AddNote(note);
    return v;
  }

  absl::StatusOr<Verdict> WorstCase(const ClaimSpec& c, const Channel<T>& channel) {
    FamilyParams f = ClaimFamily(c);
    PRIVLENS_ASSIGN_OR_RETURN(SupStrategy strategy, ParseSupStrategy(c.strategy));
    std::optional<std::pair<size_t, SupResult<T>>> best;
    if (c.individual) {
      PRIVLENS_ASSIGN_OR_RETURN(
          auto r, WorstcaseSup(channel, f, *c.individual, strategy, sampling_, budget_));
      best.emplace(*c.individual, std::move(r));
    } else {
      PRIVLENS_ASSIGN_OR_RETURN(auto r,
                                WorstcaseSupAll(channel, f, strategy, sampling_, budget_));
      best.emplace(std::move(r));
    }
    const SupResult<T>& r = best->second;
    const double bound = c.epsilon ? std::exp(c.epsilon->nats)
                                   : std::numeric_limits<double>::infinity();
    Verdict v = MakeVerdict("worstcase_sup", bound, r.ratio);
    if (c.epsilon && c.epsilon->ratio) v.bound_exact = RationalText(*c.epsilon->ratio);
    v.measured_exact = r.ratio_exact;
    v.AddWitness("individual", absl::StrCat(best->first));
    v.AddWitness("source", r.source);
    if (r.sample_index && r.source == "sampled") {
      v.AddWitness("sample", absl::StrCat(*r.sample_index));
    }
    v.extras.emplace_back("extremal", r.extremal_ratio);
    v.extras.emplace_back("sampled", r.sampled_ratio);
    v.AddNote(absl::StrCat("accepted samples: ", r.accepted_samples));
    if (r.exact) v.AddNote("extremal value is the exact supremum");
    for (const auto& note : r.notes) v.AddNote(note);
    if (v.satisfied && (r.incomplete || (r.family_too_tight && r.source == "none"))) {
      v.status = VerdictStatus::kInconclusive;
    }
    return v;
  }

  absl::Status Certify(Json& out, Tally& tally) {
    PRIVLENS_ASSIGN_OR_RETURN(Channel<T> channel, model_.ChannelNamed(s_.task.channel));
    out["verdicts"] = Json::array();
    for (size_t a = 0; a < s_.task.claims.size(); ++a) {
      auto v = Claim(s_.task.claims[a], channel);
      if (!v.ok()) return Prefixed(v.status(), absl::StrCat("/task/claims/", a));
      tally.Add(v->status);
      out["verdicts"].push_back(VerdictJson(*v));
    }
    return absl::OkStatus();
  }

  // bound: one bound_pdelta verdict per exp(delta); sweep: closed-form rows,
  // optionally with the worst case found by search.
  absl::Status Sweep(Json& out, Tally& tally) {
    const TaskSpec& t = s_.task;
    const Epsilon eps = ToEpsilon(*t.epsilon);
    std::optional<Channel<T>> channel;
    if (!t.channel.empty()) {
      PRIVLENS_ASSIGN_OR_RETURN(Channel<T> c, model_.ChannelNamed(t.channel));
      channel = std::move(c);
    }
    const char* key = t.kind == "bound" ? "verdicts" : "rows";
    out[key] = Json::array();
    for (const UnitSpec& d : t.exp_deltas) {
      const double bound = PdeltaBound(eps.nats, *t.k, d.value);
      if (t.kind == "bound") {
        PRIVLENS_ASSIGN_OR_RETURN(
            Verdict v, BoundPdelta(*channel, *t.k, eps, d.value, sampling_, budget_));
        Json j = VerdictJson(v);
        j["exp_delta"] = WriteUnit(d);
        tally.Add(v.status);
        out[key].push_back(std::move(j));
        continue;
      }
      Json row;
      row["exp_delta"] = WriteUnit(d);
      row["bound"] = RatioScale(bound);
      if (t.measure) {
        FamilyParams f;
        f.k = *t.k;
        f.exp_delta = d.value;
        PRIVLENS_ASSIGN_OR_RETURN(
            auto best, WorstcaseSupAll(*channel, f, SupStrategy::kBoth, sampling_, budget_));
        row["measured"] = RatioScale(best.second.ratio, best.second.ratio_exact);
        row["individual"] = best.first;
        row["source"] = best.second.source;
        row["within_bound"] = WithinBound(best.second.ratio, bound);
        tally.Add(WithinBound(best.second.ratio, bound) ? VerdictStatus::kSatisfied
                                                        : VerdictStatus::kViolated);
      }
      out[key].push_back(std::move(row));
    }
    return absl::OkStatus();
  }

  absl::Status Compose(Json& out, Tally& tally) {
    const TaskSpec& t = s_.task;
    if (t.mode == "basic") {
      PRIVLENS_ASSIGN_OR_RETURN(JointPrior<T> prior, model_.Prior(t.prior));
      std::vector<Channel<T>> channels;
      std::vector<Epsilon> eps;
      for (size_t j = 0; j < t.channels.size(); ++j) {
        PRIVLENS_ASSIGN_OR_RETURN(Channel<T> c, model_.ChannelNamed(t.channels[j]));
        channels.push_back(std::move(c));
        eps.push_back(ToEpsilon(t.epsilons[j]));
      }
      PRIVLENS_ASSIGN_OR_RETURN(Verdict v,
                                CertifyBasicComposition(prior, channels, eps, *t.k, budget_));
      tally.Add(v.status);
      out["verdicts"] = Json::array({VerdictJson(v)});
      return absl::OkStatus();
    }
    EpochModel<T> m;
    m.independent = t.independent;
    for (const auto& e : t.epochs) {
      PRIVLENS_ASSIGN_OR_RETURN(JointPrior<T> p, model_.Prior(e.prior));
      PRIVLENS_ASSIGN_OR_RETURN(Channel<T> c, model_.ChannelNamed(e.channel));
      m.epochs.emplace_back(std::move(p), std::move(c));
    }
    std::vector<size_t> individuals;
    if (t.individual) {
      individuals.push_back(*t.individual);
    } else {
      for (size_t i = 0; i < model_.universe()->size(); ++i) individuals.push_back(i);
    }
    out["epochs"] = Json::array();
    for (size_t i : individuals) {
      Json entry;
      entry["individual"] = i;
      if (t.equal) {
        PRIVLENS_ASSIGN_OR_RETURN(auto r, EqualEpochReduction(m, i, budget_));
        entry["reduced"] = ExtendedJson(r.ratio);
        entry["direct"] = ExtendedJson(r.direct_ratio);
        tally.Add(VerdictStatus::kSatisfied);
      } else {
        PRIVLENS_ASSIGN_OR_RETURN(auto r, EpochLeakageOf(m, i, budget_));
        entry["per_epoch"] = Json::array();
        for (size_t e = 0; e < r.per_epoch_nats.size(); ++e) {
          entry["per_epoch"].push_back(ExtendedJson(r.per_epoch_ratio[e]));
        }
        entry["total"] = ExtendedJson(r.total_ratio);
        if (r.direct_nats) {
          entry["direct"] = ExtendedJson(*r.direct_ratio);
          const bool both_inf = std::isinf(*r.direct_nats) && std::isinf(r.total_nats);
          const bool additive =
              both_inf || std::abs(*r.direct_nats - r.total_nats) <= kTolerance;
          entry["additive"] = additive;
          tally.Add(additive ? VerdictStatus::kSatisfied : VerdictStatus::kViolated);
        } else {
          tally.Add(VerdictStatus::kInconclusive);
        }
        entry["notes"] = r.notes;
      }
      out["epochs"].push_back(std::move(entry));
    }
    return absl::OkStatus();
  }

  const Scenario& s_;
  Model<T>& model_;
  SamplerOptions sampling_;
  uint64_t budget_;
};

inline int ExitCodeForStatus(const absl::Status& s) {
  return absl::IsResourceExhausted(s) ? kExitBudget : kExitInput;
}

inline Json ReportHeader(const Scenario& s, const RunOptions& opts, uint64_t seed,
                         uint64_t samples, uint64_t budget) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "privlens";
  j["version"] = kToolVersion;
  j["command"] = opts.command;
  if (!s.name.empty()) j["scenario"] = s.name;
  j["seed"] = seed;
  j["samples"] = samples;
  j["budget"] = budget;
  return j;
}

inline RunResult Run(const Scenario& s, const RunOptions& opts) {
  const uint64_t seed = opts.seed.value_or(s.seed);
  const uint64_t samples = opts.samples.value_or(s.samples);
  const uint64_t budget = opts.budget.value_or(s.budget);
  RunResult result;
  result.report = ReportHeader(s, opts, seed, samples, budget);
  Json& rep = result.report;
  auto fail = [&](const absl::Status& st) {
    rep["error"] = {{"code", absl::StatusCodeToString(st.code())},
                    {"message", std::string(st.message())}};
    result.exit_code = ExitCodeForStatus(st);
    rep["exit_code"] = result.exit_code;
    return result;
  };
  if (opts.command != "validate" && opts.command != s.task.kind) {
    return fail(absl::InvalidArgumentError(absl::StrCat(
        "/task/kind: scenario task is '", s.task.kind, "' but the command is '",
        opts.command, "'")));
  }
  const bool exact = s.arithmetic == Arithmetic::kExact ||
                     (s.arithmetic == Arithmetic::kAuto && ExactPossible(s));
  if (s.arithmetic == Arithmetic::kExact && !ExactPossible(s)) {
    return fail(absl::InvalidArgumentError(
        "/arithmetic: exact arithmetic requested but a geometric epsilon is not ln(p/q)"));
  }
  rep["arithmetic"] = exact ? "exact" : "double";
  rep["family"] = internal::WriteFamily(s.family);
  SamplerOptions sampling;
  sampling.samples = samples;
  sampling.seed = seed;

  // Validation builds every named object without running the task.
  auto execute = [&]<typename T>() -> absl::Status {
    PRIVLENS_ASSIGN_OR_RETURN(Model<T> model, Model<T>::Build(s, budget));
    if (opts.command == "validate") {
      for (const auto& [name, p] : s.priors) PRIVLENS_RETURN_IF_ERROR(model.Prior(name).status());
      for (const auto& [name, c] : s.channels) {
        PRIVLENS_RETURN_IF_ERROR(model.ChannelNamed(name).status());
      }
      rep["valid"] = true;
      rep["canonical"] = SerializeScenario(s);
      return absl::OkStatus();
    }
    Tally tally;
    Json results = Json::object();
    TaskRunner<T> runner(s, model, sampling, budget);
    absl::Status st = runner.Run(results, tally);
    rep["results"] = std::move(results);
    if (!st.ok()) return st;
    result.exit_code = tally.ExitCode();
    return absl::OkStatus();
  };
  absl::Status st = exact ? execute.template operator()<Rational>()
                          : execute.template operator()<double>();
  if (!st.ok()) return fail(st);
  rep["exit_code"] = result.exit_code;
  return result;
}

// Human-readable rendering ----------------------------------------------------

namespace internal {

inline std::string Cell(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return absl::StrFormat("%.9g", j.get<double>());
  return j.dump();
}

inline std::string ScaleCell(const Json& j) {
  std::string out = absl::StrCat(Cell(j["ratio"]), " (", Cell(j["nats"]), " nats)");
  if (j.contains("exact")) absl::StrAppend(&out, " = ", j["exact"].get<std::string>());
  if (j.contains("exact_ratio")) absl::StrAppend(&out, " = ", j["exact_ratio"].get<std::string>());
  return out;
}

}  // namespace internal

inline std::string RenderTable(const Json& rep) {
  std::string out;
  absl::StrAppend(&out, "privlens ", rep["version"].get<std::string>(), "  command=",
                  rep["command"].get<std::string>(), "  seed=", rep["seed"].dump(),
                  "  samples=", rep["samples"].dump(), "  budget=", rep["budget"].dump());
  if (rep.contains("arithmetic")) {
    absl::StrAppend(&out, "  arithmetic=", rep["arithmetic"].get<std::string>());
  }
  absl::StrAppend(&out, "\n");
  if (rep.contains("error")) {
    absl::StrAppend(&out, "error: ", rep["error"]["message"].get<std::string>(), "\n");
  }
  if (rep.contains("valid")) absl::StrAppend(&out, "scenario is valid\n");
  if (rep.contains("results")) {
    const Json& r = rep["results"];
    if (r.contains("leakage")) {
      absl::StrAppend(&out, absl::StrFormat("%-10s %-34s %-12s %-12s %-12s\n", "target",
                                            "i_inf ratio (nats)", "mi", "max_rel_ent",
                                            "inferential"));
      for (const Json& l : r["leakage"]) {
        absl::StrAppend(&out, absl::StrFormat("%-10s %-34s %-12s %-12s %-12s\n", l["target"].dump(),
                                              internal::ScaleCell(l["i_inf"]),
                                              internal::Cell(l["mi"]),
                                              internal::Cell(l["max_rel_entropy"]),
                                              internal::Cell(l["inferential_eps"]["nats"])));
      }
    }
    if (r.contains("verdicts")) {
      for (const Json& v : r["verdicts"]) {
        absl::StrAppend(&out, absl::StrFormat("%-18s %-20s measured %s  bound %s\n",
                                              v["claim"].get<std::string>(),
                                              v["status"].get<std::string>(),
                                              internal::ScaleCell(v["measured"]),
                                              internal::ScaleCell(v["bound"])));
        for (const auto& [key, value] : v["witness"].items()) {
          absl::StrAppend(&out, "    ", key, " = ", internal::Cell(value), "\n");
        }
        for (const Json& note : v["notes"]) {
          absl::StrAppend(&out, "    note: ", note.get<std::string>(), "\n");
        }
      }
    }
    if (r.contains("rows")) {
      for (const Json& row : r["rows"]) {
        absl::StrAppend(&out, "exp(delta)=", internal::Cell(row["exp_delta"]), "  bound ",
                        internal::ScaleCell(row["bound"]));
        if (row.contains("measured")) {
          absl::StrAppend(&out, "  measured ", internal::ScaleCell(row["measured"]));
        }
        absl::StrAppend(&out, "\n");
      }
    }
    if (r.contains("epochs")) {
      for (const Json& e : r["epochs"]) {
        absl::StrAppend(&out, "individual ", e["individual"].dump(), ":");
        if (e.contains("total")) absl::StrAppend(&out, "  total ", internal::ScaleCell(e["total"]));
        if (e.contains("reduced")) {
          absl::StrAppend(&out, "  reduced ", internal::ScaleCell(e["reduced"]));
        }
        if (e.contains("direct")) absl::StrAppend(&out, "  direct ", internal::ScaleCell(e["direct"]));
        absl::StrAppend(&out, "\n");
      }
    }
  }
  absl::StrAppend(&out, "exit code ", rep["exit_code"].dump(), "\n");
  return out;
}

}  // namespace privlens::cli

#endif  // PRIVLENS_CLI_RUNNER_H_
