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

// Scenario documents: a JSON description of a universe, named priors and
// channels, family knobs and one task. Parsing validates the schema and
// every reference; errors carry the JSON pointer of the offending value.
// Probabilities are kept as exact rationals, whether given as "p/q"
// strings, decimal strings or JSON numbers (read through their decimal
// text).

#ifndef PRIVLENS_CLI_SCENARIO_H_
#define PRIVLENS_CLI_SCENARIO_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "privlens/scalar.h"
#include "privlens/universe.h"

namespace privlens::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// A privacy parameter. `ratio` is exp(nats) when the text had the form
// "c*ln(p/q)" with integer c, which keeps certificates exact.
struct EpsilonSpec {
  double nats = 0;
  std::optional<Rational> ratio;
  bool operator==(const EpsilonSpec&) const = default;
};

// A real in [0,1] that may only be known approximately (exp of a nats
// value).
struct UnitSpec {
  std::optional<Rational> exact;
  double value = 0;
  bool operator==(const UnitSpec&) const = default;
};

struct LimitSpec {
  size_t individual = 0;
  std::string record;
  std::vector<Rational> conditional;
  bool operator==(const LimitSpec&) const = default;
};

struct PriorSpec {
  std::string kind;  // uniform | independent | blocks | full
  std::vector<std::vector<Rational>> marginals;
  std::vector<std::vector<size_t>> blocks;
  std::vector<std::vector<Rational>> tables;
  std::vector<Rational> full_table;
  std::vector<LimitSpec> limits;
  bool operator==(const PriorSpec&) const = default;
};

struct ChannelSpec {
  // matrix | constant | identity | geometric | randomized_response |
  // product | postprocess
  std::string kind;
  std::vector<std::string> outcomes;
  std::map<std::string, std::vector<Rational>> rows;  // matrix, by histogram key
  std::vector<Rational> row;                          // constant
  std::string target;                                 // geometric
  std::optional<Rational> alpha;                      // geometric, exact
  std::optional<double> epsilon_nats;                 // geometric, inexact
  uint32_t m = 0;                                     // geometric
  Rational keep;                                      // randomized response
  std::vector<std::string> of;                        // product, postprocess
  std::vector<std::string> map;                       // postprocess
  bool operator==(const ChannelSpec&) const = default;
};

struct FamilySpec {
  std::optional<size_t> k;
  std::optional<UnitSpec> exp_delta;
  std::optional<size_t> ell;
  std::optional<double> tau;
  bool band_independent = false;
  bool operator==(const FamilySpec&) const = default;
};

struct ClaimSpec {
  // certify_pk | tightness_pk | bound_pdelta | necessary_pdelta |
  // sufficient_nk | group_certify | worstcase_sup | membership | personalized
  std::string claim;
  std::optional<size_t> k;
  std::optional<EpsilonSpec> epsilon;
  std::optional<UnitSpec> exp_delta;
  std::optional<double> tau;
  std::vector<size_t> group;
  std::optional<std::vector<std::vector<Rational>>> marginals;  // absent: uniform
  std::optional<size_t> individual;
  std::string strategy = "both";
  std::string prior;
  std::vector<EpsilonSpec> epsilons;
  bool operator==(const ClaimSpec&) const = default;
};

struct EpochSpec {
  std::string prior;
  std::string channel;
  bool operator==(const EpochSpec&) const = default;
};

struct TaskSpec {
  std::string kind;  // leakage | certify | bound | compose | sweep
  std::string prior;
  std::string channel;
  std::vector<std::vector<size_t>> targets;  // leakage; empty: every individual
  std::vector<ClaimSpec> claims;             // certify
  // bound, sweep
  std::optional<size_t> k;
  std::optional<EpsilonSpec> epsilon;
  std::vector<UnitSpec> exp_deltas;
  bool measure = false;  // sweep: also run the worst-case search
  // compose
  std::string mode;  // basic | general
  std::vector<std::string> channels;
  std::vector<EpsilonSpec> epsilons;
  std::vector<EpochSpec> epochs;
  bool independent = false;
  bool equal = false;
  std::optional<size_t> individual;
  bool operator==(const TaskSpec&) const = default;
};

enum class Arithmetic { kAuto, kExact, kDouble };

struct Scenario {
  std::string name;
  std::vector<std::vector<std::string>> universe;
  std::map<std::string, PriorSpec> priors;
  std::map<std::string, ChannelSpec> channels;
  FamilySpec family;
  TaskSpec task;
  Arithmetic arithmetic = Arithmetic::kAuto;
  uint64_t seed = 0;
  uint64_t samples = 1000;
  uint64_t budget = kDefaultEnumerationBudget;
  bool operator==(const Scenario&) const = default;
};

// Numbers and epsilons -------------------------------------------------------

inline std::string RationalText(const Rational& r) { return r.str(); }

namespace internal {

inline absl::Status At(const std::string& path, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(path.empty() ? "/" : path, ": ", message));
}

inline std::string Child(const std::string& path, absl::string_view key) {
  std::string escaped;
  for (char ch : key) {
    if (ch == '~') {
      escaped += "~0";
    } else if (ch == '/') {
      escaped += "~1";
    } else {
      escaped += ch;
    }
  }
  return absl::StrCat(path, "/", escaped);
}

inline std::string Child(const std::string& path, size_t index) {
  return absl::StrCat(path, "/", index);
}

// Decimal text of a JSON number as written by the serializer, which is the
// shortest representation that reads back to the same double.
inline std::string NumberText(const Json& j) { return j.dump(); }

}  // namespace internal

inline absl::StatusOr<Rational> ReadRational(const Json& j, const std::string& path) {
  std::string text;
  if (j.is_string()) {
    text = j.get<std::string>();
  } else if (j.is_number()) {
    text = internal::NumberText(j);
  } else {
    return internal::At(path, "expected a number or a rational string");
  }
  auto r = ParseRational(text);
  if (!r.ok()) return internal::At(path, r.status().message());
  return *r;
}

inline absl::StatusOr<Rational> ReadProbability(const Json& j, const std::string& path) {
  PRIVLENS_ASSIGN_OR_RETURN(Rational r, ReadRational(j, path));
  if (r < 0 || r > 1) return internal::At(path, "probability outside [0,1]");
  return r;
}

// "inf", a number of nats, "c*ln(p/q)", "ln(p/q)" or a decimal string.
inline absl::StatusOr<EpsilonSpec> ParseEpsilonText(absl::string_view raw) {
  std::string text(absl::StripAsciiWhitespace(raw));
  text.erase(std::remove(text.begin(), text.end(), ' '), text.end());
  EpsilonSpec e;
  if (text == "inf") {
    e.nats = std::numeric_limits<double>::infinity();
    return e;
  }
  if (text == "-inf") {
    e.nats = -std::numeric_limits<double>::infinity();
    e.ratio = Rational(0);
    return e;
  }
  const size_t ln = text.find("ln(");
  if (ln != std::string::npos) {
    if (text.back() != ')') {
      return absl::InvalidArgumentError(absl::StrCat("malformed epsilon '", raw, "'"));
    }
    int64_t coefficient = 1;
    if (ln > 0) {
      std::string head = text.substr(0, ln);
      if (head.back() == '*') head.pop_back();
      if (head == "-") {
        coefficient = -1;
      } else if (!absl::SimpleAtoi(head, &coefficient)) {
        return absl::InvalidArgumentError(
            absl::StrCat("epsilon coefficient must be an integer in '", raw, "'"));
      }
    }
    auto inner = ParseRational(text.substr(ln + 3, text.size() - ln - 4));
    if (!inner.ok() || *inner <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("ln argument must be a positive rational in '", raw, "'"));
    }
    Rational ratio = 1;
    const Rational base = coefficient >= 0 ? *inner : Rational(1 / *inner);
    for (int64_t c = 0; c < std::abs(coefficient); ++c) ratio *= base;
    e.ratio = ratio;
    e.nats = static_cast<double>(coefficient) * std::log(ToDouble(*inner));
    return e;
  }
  double value;
  if (!absl::SimpleAtod(text, &value)) {
    return absl::InvalidArgumentError(absl::StrCat("malformed epsilon '", raw, "'"));
  }
  e.nats = value;
  return e;
}

inline absl::StatusOr<EpsilonSpec> ReadEpsilon(const Json& j, const std::string& path) {
  absl::StatusOr<EpsilonSpec> e;
  if (j.is_number()) {
    e = ParseEpsilonText(internal::NumberText(j));
  } else if (j.is_string()) {
    e = ParseEpsilonText(j.get<std::string>());
  } else {
    return internal::At(path, "expected epsilon as a number or string");
  }
  if (!e.ok()) return internal::At(path, e.status().message());
  return *e;
}

inline Json WriteEpsilon(const EpsilonSpec& e) {
  if (std::isinf(e.nats)) return e.nats > 0 ? "inf" : "-inf";
  if (e.ratio) return absl::StrCat("ln(", RationalText(*e.ratio), ")");
  return e.nats;
}

// Privacy parameter must be a nonnegative finite epsilon.
inline absl::StatusOr<EpsilonSpec> ReadPrivacyEpsilon(const Json& j, const std::string& path) {
  PRIVLENS_ASSIGN_OR_RETURN(EpsilonSpec e, ReadEpsilon(j, path));
  if (!(e.nats >= 0) || std::isinf(e.nats)) {
    return internal::At(path, "epsilon must be finite and nonnegative");
  }
  return e;
}

// exp(delta) from either "exp_delta" (a rational in [0,1]) or "delta" (an
// epsilon-like value <= 0, "-inf" allowed).
inline absl::StatusOr<std::optional<UnitSpec>> ReadExpDelta(const Json& obj,
                                                            const std::string& path) {
  const bool has_exp = obj.contains("exp_delta");
  const bool has_delta = obj.contains("delta");
  if (has_exp && has_delta) return internal::At(path, "give exp_delta or delta, not both");
  if (has_exp) {
    PRIVLENS_ASSIGN_OR_RETURN(Rational r,
                              ReadProbability(obj["exp_delta"], internal::Child(path, "exp_delta")));
    return UnitSpec{r, ToDouble(r)};
  }
  if (has_delta) {
    const std::string p = internal::Child(path, "delta");
    PRIVLENS_ASSIGN_OR_RETURN(EpsilonSpec d, ReadEpsilon(obj["delta"], p));
    if (!(d.nats <= 0)) return internal::At(p, "delta must be <= 0");
    return UnitSpec{d.ratio, d.ratio ? ToDouble(*d.ratio) : std::exp(d.nats)};
  }
  return std::optional<UnitSpec>();
}

inline Json WriteUnit(const UnitSpec& u) {
  if (u.exact) return RationalText(*u.exact);
  return u.value;
}

inline absl::StatusOr<UnitSpec> ReadUnit(const Json& j, const std::string& path) {
  PRIVLENS_ASSIGN_OR_RETURN(Rational r, ReadProbability(j, path));
  return UnitSpec{r, ToDouble(r)};
}

// Schema reader ---------------------------------------------------------------

namespace internal {

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  absl::Status ExpectObject() const {
    if (!j_.is_object()) return At(path_, "expected an object");
    return absl::OkStatus();
  }

  // Rejects unknown keys so typos surface as errors.
  absl::Status OnlyKeys(const std::set<std::string>& allowed) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!allowed.count(it.key())) return At(Child(path_, it.key()), "unknown field");
    }
    return absl::OkStatus();
  }

  bool Has(const std::string& key) const { return j_.contains(key); }
  const Json& operator[](const std::string& key) const { return j_[key]; }
  std::string PathOf(const std::string& key) const { return Child(path_, key); }
  const std::string& path() const { return path_; }
  const Json& json() const { return j_; }

  absl::StatusOr<const Json*> Require(const std::string& key) const {
    if (!j_.contains(key)) return At(path_, absl::StrCat("missing field '", key, "'"));
    return &j_[key];
  }

  absl::StatusOr<std::string> String(const std::string& key) const {
    PRIVLENS_ASSIGN_OR_RETURN(const Json* v, Require(key));
    if (!v->is_string()) return At(PathOf(key), "expected a string");
    return v->get<std::string>();
  }

  absl::StatusOr<std::string> StringOr(const std::string& key, std::string fallback) const {
    if (!Has(key)) return fallback;
    return String(key);
  }

  absl::StatusOr<uint64_t> Unsigned(const std::string& key) const {
    PRIVLENS_ASSIGN_OR_RETURN(const Json* v, Require(key));
    return ReadUnsigned(*v, PathOf(key));
  }

  absl::StatusOr<std::optional<uint64_t>> OptionalUnsigned(const std::string& key) const {
    if (!Has(key)) return std::optional<uint64_t>();
    PRIVLENS_ASSIGN_OR_RETURN(uint64_t v, Unsigned(key));
    return std::optional<uint64_t>(v);
  }

  absl::StatusOr<bool> BoolOr(const std::string& key, bool fallback) const {
    if (!Has(key)) return fallback;
    if (!j_[key].is_boolean()) return At(PathOf(key), "expected a boolean");
    return j_[key].get<bool>();
  }

  absl::StatusOr<std::optional<double>> OptionalReal(const std::string& key) const {
    if (!Has(key)) return std::optional<double>();
    const Json& v = j_[key];
    if (v.is_number()) return std::optional<double>(v.get<double>());
    if (v.is_string()) {
      double d;
      if (absl::SimpleAtod(v.get<std::string>(), &d)) return std::optional<double>(d);
    }
    return At(PathOf(key), "expected a real number");
  }

  static absl::StatusOr<uint64_t> ReadUnsigned(const Json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
      return At(path, "expected a nonnegative integer");
    }
    return v.get<uint64_t>();
  }

 private:
  const Json& j_;
  std::string path_;
};

inline absl::StatusOr<std::vector<Rational>> ReadProbabilityList(const Json& j,
                                                                 const std::string& path) {
  if (!j.is_array()) return At(path, "expected an array of probabilities");
  std::vector<Rational> out;
  for (size_t a = 0; a < j.size(); ++a) {
    PRIVLENS_ASSIGN_OR_RETURN(Rational r, ReadProbability(j[a], Child(path, a)));
    out.push_back(std::move(r));
  }
  return out;
}

inline absl::StatusOr<std::vector<std::vector<Rational>>> ReadProbabilityTable(
    const Json& j, const std::string& path) {
  if (!j.is_array()) return At(path, "expected an array of arrays");
  std::vector<std::vector<Rational>> out;
  for (size_t a = 0; a < j.size(); ++a) {
    PRIVLENS_ASSIGN_OR_RETURN(auto row, ReadProbabilityList(j[a], Child(path, a)));
    out.push_back(std::move(row));
  }
  return out;
}

inline absl::StatusOr<std::vector<size_t>> ReadIndexList(const Json& j, const std::string& path) {
  if (!j.is_array()) return At(path, "expected an array of indices");
  std::vector<size_t> out;
  for (size_t a = 0; a < j.size(); ++a) {
    PRIVLENS_ASSIGN_OR_RETURN(uint64_t v, ObjectReader::ReadUnsigned(j[a], Child(path, a)));
    out.push_back(v);
  }
  return out;
}

inline absl::StatusOr<std::vector<std::string>> ReadStringList(const Json& j,
                                                               const std::string& path) {
  if (!j.is_array()) return At(path, "expected an array of strings");
  std::vector<std::string> out;
  for (size_t a = 0; a < j.size(); ++a) {
    if (!j[a].is_string()) return At(Child(path, a), "expected a string");
    out.push_back(j[a].get<std::string>());
  }
  return out;
}

inline absl::StatusOr<std::vector<EpsilonSpec>> ReadEpsilonList(const Json& j,
                                                                const std::string& path) {
  if (!j.is_array()) return At(path, "expected an array of epsilons");
  std::vector<EpsilonSpec> out;
  for (size_t a = 0; a < j.size(); ++a) {
    PRIVLENS_ASSIGN_OR_RETURN(EpsilonSpec e, ReadPrivacyEpsilon(j[a], Child(path, a)));
    out.push_back(e);
  }
  return out;
}

inline Json WriteRationals(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(RationalText(r));
  return out;
}

inline absl::StatusOr<PriorSpec> ReadPrior(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  PRIVLENS_RETURN_IF_ERROR(r.ExpectObject());
  PriorSpec p;
  PRIVLENS_ASSIGN_OR_RETURN(p.kind, r.String("kind"));
  if (p.kind == "uniform") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind"}));
  } else if (p.kind == "independent") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "marginals"}));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* m, r.Require("marginals"));
    PRIVLENS_ASSIGN_OR_RETURN(p.marginals, ReadProbabilityTable(*m, r.PathOf("marginals")));
  } else if (p.kind == "blocks" || p.kind == "full") {
    PRIVLENS_RETURN_IF_ERROR(p.kind == "blocks"
                                 ? r.OnlyKeys({"kind", "blocks", "tables", "limits"})
                                 : r.OnlyKeys({"kind", "blocks", "table"}));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* blocks, r.Require("blocks"));
    if (!blocks->is_array()) return At(r.PathOf("blocks"), "expected an array of blocks");
    for (size_t b = 0; b < blocks->size(); ++b) {
      PRIVLENS_ASSIGN_OR_RETURN(auto block,
                                ReadIndexList((*blocks)[b], Child(r.PathOf("blocks"), b)));
      p.blocks.push_back(std::move(block));
    }
    if (p.kind == "blocks") {
      PRIVLENS_ASSIGN_OR_RETURN(const Json* tables, r.Require("tables"));
      PRIVLENS_ASSIGN_OR_RETURN(p.tables, ReadProbabilityTable(*tables, r.PathOf("tables")));
      if (r.Has("limits")) {
        const Json& limits = r["limits"];
        if (!limits.is_array()) return At(r.PathOf("limits"), "expected an array");
        for (size_t a = 0; a < limits.size(); ++a) {
          ObjectReader lr(limits[a], Child(r.PathOf("limits"), a));
          PRIVLENS_RETURN_IF_ERROR(lr.ExpectObject());
          PRIVLENS_RETURN_IF_ERROR(lr.OnlyKeys({"individual", "record", "conditional"}));
          LimitSpec lim;
          PRIVLENS_ASSIGN_OR_RETURN(lim.individual, lr.Unsigned("individual"));
          PRIVLENS_ASSIGN_OR_RETURN(lim.record, lr.String("record"));
          PRIVLENS_ASSIGN_OR_RETURN(const Json* cond, lr.Require("conditional"));
          PRIVLENS_ASSIGN_OR_RETURN(lim.conditional,
                                    ReadProbabilityList(*cond, lr.PathOf("conditional")));
          p.limits.push_back(std::move(lim));
        }
      }
    } else {
      PRIVLENS_ASSIGN_OR_RETURN(const Json* table, r.Require("table"));
      PRIVLENS_ASSIGN_OR_RETURN(p.full_table, ReadProbabilityList(*table, r.PathOf("table")));
    }
  } else {
    return At(r.PathOf("kind"),
              absl::StrCat("unknown prior kind '", p.kind, "' (uniform|independent|blocks|full)"));
  }
  return p;
}

inline Json WritePrior(const PriorSpec& p) {
  Json j;
  j["kind"] = p.kind;
  if (p.kind == "independent") {
    j["marginals"] = Json::array();
    for (const auto& m : p.marginals) j["marginals"].push_back(WriteRationals(m));
  }
  if (p.kind == "blocks" || p.kind == "full") j["blocks"] = p.blocks;
  if (p.kind == "blocks") {
    j["tables"] = Json::array();
    for (const auto& t : p.tables) j["tables"].push_back(WriteRationals(t));
    if (!p.limits.empty()) {
      j["limits"] = Json::array();
      for (const auto& lim : p.limits) {
        Json l;
        l["individual"] = lim.individual;
        l["record"] = lim.record;
        l["conditional"] = WriteRationals(lim.conditional);
        j["limits"].push_back(std::move(l));
      }
    }
  }
  if (p.kind == "full") j["table"] = WriteRationals(p.full_table);
  return j;
}

inline absl::StatusOr<ChannelSpec> ReadChannel(const Json& j, const std::string& path) {
  // Channels name their constructor under "type"; "kind" is accepted too,
  // matching the other sections.
  Json normalized = j;
  std::string selector = "kind";
  if (j.is_object() && j.contains("type")) {
    if (j.contains("kind")) return At(path, "give only one of 'type' or 'kind'");
    normalized["kind"] = j["type"];
    normalized.erase("type");
    selector = "type";
  }
  ObjectReader r(normalized, path);
  PRIVLENS_RETURN_IF_ERROR(r.ExpectObject());
  ChannelSpec c;
  if (!r.Has("kind")) return At(path, "missing field 'type'");
  if (!r["kind"].is_string()) return At(Child(path, selector), "expected a string");
  c.kind = r["kind"].get<std::string>();
  if (c.kind == "geometric_counting") c.kind = "geometric";
  if (c.kind == "matrix") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "outcomes", "rows"}));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* outcomes, r.Require("outcomes"));
    PRIVLENS_ASSIGN_OR_RETURN(c.outcomes, ReadStringList(*outcomes, r.PathOf("outcomes")));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* rows, r.Require("rows"));
    if (!rows->is_object()) {
      return At(r.PathOf("rows"), "expected an object keyed by histogram counts, e.g. \"1,0\"");
    }
    for (auto it = rows->begin(); it != rows->end(); ++it) {
      PRIVLENS_ASSIGN_OR_RETURN(auto row,
                                ReadProbabilityList(it.value(), Child(r.PathOf("rows"), it.key())));
      c.rows.emplace(it.key(), std::move(row));
    }
  } else if (c.kind == "constant") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "outcomes", "row"}));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* outcomes, r.Require("outcomes"));
    PRIVLENS_ASSIGN_OR_RETURN(c.outcomes, ReadStringList(*outcomes, r.PathOf("outcomes")));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* row, r.Require("row"));
    PRIVLENS_ASSIGN_OR_RETURN(c.row, ReadProbabilityList(*row, r.PathOf("row")));
  } else if (c.kind == "identity") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind"}));
  } else if (c.kind == "geometric") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "target", "epsilon", "alpha", "m"}));
    PRIVLENS_ASSIGN_OR_RETURN(c.target, r.String("target"));
    PRIVLENS_ASSIGN_OR_RETURN(uint64_t m, r.Unsigned("m"));
    c.m = static_cast<uint32_t>(m);
    if (r.Has("alpha") == r.Has("epsilon")) {
      return At(path, "geometric channel needs exactly one of 'alpha' or 'epsilon'");
    }
    if (r.Has("alpha")) {
      PRIVLENS_ASSIGN_OR_RETURN(Rational a, ReadProbability(r["alpha"], r.PathOf("alpha")));
      c.alpha = a;
    } else {
      PRIVLENS_ASSIGN_OR_RETURN(EpsilonSpec e, ReadPrivacyEpsilon(r["epsilon"], r.PathOf("epsilon")));
      if (e.ratio) {
        c.alpha = Rational(1) / *e.ratio;
      } else {
        c.epsilon_nats = e.nats;
      }
    }
  } else if (c.kind == "randomized_response") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "keep"}));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* keep, r.Require("keep"));
    PRIVLENS_ASSIGN_OR_RETURN(c.keep, ReadProbability(*keep, r.PathOf("keep")));
  } else if (c.kind == "product") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "of"}));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* of, r.Require("of"));
    PRIVLENS_ASSIGN_OR_RETURN(c.of, ReadStringList(*of, r.PathOf("of")));
    if (c.of.empty()) return At(r.PathOf("of"), "product needs at least one channel");
  } else if (c.kind == "postprocess") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "of", "map"}));
    PRIVLENS_ASSIGN_OR_RETURN(std::string of, r.String("of"));
    c.of = {of};
    PRIVLENS_ASSIGN_OR_RETURN(const Json* map, r.Require("map"));
    PRIVLENS_ASSIGN_OR_RETURN(c.map, ReadStringList(*map, r.PathOf("map")));
  } else {
    return At(Child(path, selector), absl::StrCat("unknown channel type '", c.kind, "'"));
  }
  return c;
}

inline Json WriteChannel(const ChannelSpec& c) {
  Json j;
  j["type"] = c.kind == "geometric" ? "geometric_counting" : c.kind;
  if (c.kind == "matrix" || c.kind == "constant") j["outcomes"] = c.outcomes;
  if (c.kind == "matrix") {
    j["rows"] = Json::object();
    for (const auto& [key, row] : c.rows) j["rows"][key] = WriteRationals(row);
  }
  if (c.kind == "constant") j["row"] = WriteRationals(c.row);
  if (c.kind == "geometric") {
    j["target"] = c.target;
    if (c.alpha) {
      j["alpha"] = RationalText(*c.alpha);
    } else {
      j["epsilon"] = *c.epsilon_nats;
    }
    j["m"] = c.m;
  }
  if (c.kind == "randomized_response") j["keep"] = RationalText(c.keep);
  if (c.kind == "product") j["of"] = c.of;
  if (c.kind == "postprocess") {
    j["of"] = c.of[0];
    j["map"] = c.map;
  }
  return j;
}

inline absl::StatusOr<FamilySpec> ReadFamily(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  PRIVLENS_RETURN_IF_ERROR(r.ExpectObject());
  PRIVLENS_RETURN_IF_ERROR(
      r.OnlyKeys({"k", "exp_delta", "delta", "ell", "tau", "band_independent"}));
  FamilySpec f;
  PRIVLENS_ASSIGN_OR_RETURN(auto k, r.OptionalUnsigned("k"));
  if (k) f.k = *k;
  PRIVLENS_ASSIGN_OR_RETURN(f.exp_delta, ReadExpDelta(j, path));
  PRIVLENS_ASSIGN_OR_RETURN(auto ell, r.OptionalUnsigned("ell"));
  if (ell) f.ell = *ell;
  PRIVLENS_ASSIGN_OR_RETURN(f.tau, r.OptionalReal("tau"));
  PRIVLENS_ASSIGN_OR_RETURN(f.band_independent, r.BoolOr("band_independent", false));
  return f;
}

inline Json WriteFamily(const FamilySpec& f) {
  Json j = Json::object();
  if (f.k) j["k"] = *f.k;
  if (f.exp_delta) j["exp_delta"] = WriteUnit(*f.exp_delta);
  if (f.ell) j["ell"] = *f.ell;
  if (f.tau) j["tau"] = *f.tau;
  if (f.band_independent) j["band_independent"] = true;
  return j;
}

inline const std::set<std::string>& KnownClaims() {
  static const std::set<std::string> claims = {
      "certify_pk",    "tightness_pk",  "bound_pdelta", "necessary_pdelta",
      "sufficient_nk", "group_certify", "worstcase_sup", "membership",
      "personalized"};
  return claims;
}

inline absl::StatusOr<ClaimSpec> ReadClaim(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  PRIVLENS_RETURN_IF_ERROR(r.ExpectObject());
  PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"claim", "k", "epsilon", "exp_delta", "delta", "tau",
                                       "group", "marginals", "individual", "strategy", "prior",
                                       "epsilons"}));
  ClaimSpec c;
  PRIVLENS_ASSIGN_OR_RETURN(c.claim, r.String("claim"));
  if (!KnownClaims().count(c.claim)) {
    return At(r.PathOf("claim"), absl::StrCat("unknown claim '", c.claim, "'"));
  }
  PRIVLENS_ASSIGN_OR_RETURN(auto k, r.OptionalUnsigned("k"));
  if (k) c.k = *k;
  if (r.Has("epsilon")) {
    PRIVLENS_ASSIGN_OR_RETURN(EpsilonSpec e, ReadPrivacyEpsilon(r["epsilon"], r.PathOf("epsilon")));
    c.epsilon = e;
  }
  PRIVLENS_ASSIGN_OR_RETURN(c.exp_delta, ReadExpDelta(j, path));
  PRIVLENS_ASSIGN_OR_RETURN(c.tau, r.OptionalReal("tau"));
  if (r.Has("group")) {
    PRIVLENS_ASSIGN_OR_RETURN(c.group, ReadIndexList(r["group"], r.PathOf("group")));
  }
  if (r.Has("marginals")) {
    PRIVLENS_ASSIGN_OR_RETURN(auto m, ReadProbabilityTable(r["marginals"], r.PathOf("marginals")));
    c.marginals = std::move(m);
  }
  PRIVLENS_ASSIGN_OR_RETURN(auto ind, r.OptionalUnsigned("individual"));
  if (ind) c.individual = *ind;
  PRIVLENS_ASSIGN_OR_RETURN(c.strategy, r.StringOr("strategy", "both"));
  if (c.strategy != "extremal" && c.strategy != "sampled" && c.strategy != "both") {
    return At(r.PathOf("strategy"), "strategy must be extremal, sampled or both");
  }
  PRIVLENS_ASSIGN_OR_RETURN(c.prior, r.StringOr("prior", ""));
  if (r.Has("epsilons")) {
    PRIVLENS_ASSIGN_OR_RETURN(c.epsilons, ReadEpsilonList(r["epsilons"], r.PathOf("epsilons")));
  }
  // Required parameters per claim.
  auto need = [&](bool present, absl::string_view field) -> absl::Status {
    if (!present) {
      return At(path, absl::StrCat("claim '", c.claim, "' needs '", field, "'"));
    }
    return absl::OkStatus();
  };
  const std::string& n = c.claim;
  if (n == "certify_pk" || n == "tightness_pk" || n == "bound_pdelta" ||
      n == "sufficient_nk" || n == "group_certify") {
    PRIVLENS_RETURN_IF_ERROR(need(c.k.has_value(), "k"));
  }
  if (n == "certify_pk" || n == "bound_pdelta" || n == "necessary_pdelta" ||
      n == "sufficient_nk" || n == "group_certify") {
    PRIVLENS_RETURN_IF_ERROR(need(c.epsilon.has_value(), "epsilon"));
  }
  if (n == "bound_pdelta" || n == "necessary_pdelta") {
    PRIVLENS_RETURN_IF_ERROR(need(c.exp_delta.has_value(), "exp_delta"));
  }
  if (n == "group_certify") PRIVLENS_RETURN_IF_ERROR(need(!c.group.empty(), "group"));
  if (n == "membership" || n == "personalized") {
    PRIVLENS_RETURN_IF_ERROR(need(!c.prior.empty(), "prior"));
  }
  if (n == "personalized") PRIVLENS_RETURN_IF_ERROR(need(!c.epsilons.empty(), "epsilons"));
  return c;
}

inline Json WriteClaim(const ClaimSpec& c) {
  Json j;
  j["claim"] = c.claim;
  if (c.k) j["k"] = *c.k;
  if (c.epsilon) j["epsilon"] = WriteEpsilon(*c.epsilon);
  if (c.exp_delta) j["exp_delta"] = WriteUnit(*c.exp_delta);
  if (c.tau) j["tau"] = *c.tau;
  if (!c.group.empty()) j["group"] = c.group;
  if (c.marginals) {
    j["marginals"] = Json::array();
    for (const auto& m : *c.marginals) j["marginals"].push_back(WriteRationals(m));
  }
  if (c.individual) j["individual"] = *c.individual;
  if (c.strategy != "both") j["strategy"] = c.strategy;
  if (!c.prior.empty()) j["prior"] = c.prior;
  if (!c.epsilons.empty()) {
    j["epsilons"] = Json::array();
    for (const auto& e : c.epsilons) j["epsilons"].push_back(WriteEpsilon(e));
  }
  return j;
}

inline absl::StatusOr<TaskSpec> ReadTask(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  PRIVLENS_RETURN_IF_ERROR(r.ExpectObject());
  TaskSpec t;
  PRIVLENS_ASSIGN_OR_RETURN(t.kind, r.String("kind"));
  if (t.kind == "leakage") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "prior", "channel", "targets"}));
    PRIVLENS_ASSIGN_OR_RETURN(t.prior, r.String("prior"));
    PRIVLENS_ASSIGN_OR_RETURN(t.channel, r.String("channel"));
    if (r.Has("targets")) {
      const Json& targets = r["targets"];
      if (!targets.is_array()) return At(r.PathOf("targets"), "expected an array of index sets");
      for (size_t a = 0; a < targets.size(); ++a) {
        PRIVLENS_ASSIGN_OR_RETURN(auto set,
                                  ReadIndexList(targets[a], Child(r.PathOf("targets"), a)));
        if (set.empty()) return At(Child(r.PathOf("targets"), a), "empty target set");
        t.targets.push_back(std::move(set));
      }
    }
  } else if (t.kind == "certify") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "channel", "claims"}));
    PRIVLENS_ASSIGN_OR_RETURN(t.channel, r.String("channel"));
    PRIVLENS_ASSIGN_OR_RETURN(const Json* claims, r.Require("claims"));
    if (!claims->is_array() || claims->empty()) {
      return At(r.PathOf("claims"), "expected a non-empty array of claims");
    }
    for (size_t a = 0; a < claims->size(); ++a) {
      PRIVLENS_ASSIGN_OR_RETURN(ClaimSpec c, ReadClaim((*claims)[a], Child(r.PathOf("claims"), a)));
      t.claims.push_back(std::move(c));
    }
  } else if (t.kind == "bound" || t.kind == "sweep") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "channel", "k", "epsilon", "exp_deltas", "measure"}));
    if (t.kind == "bound" || r.Has("channel")) {
      PRIVLENS_ASSIGN_OR_RETURN(t.channel, r.String("channel"));
    }
    PRIVLENS_ASSIGN_OR_RETURN(uint64_t k, r.Unsigned("k"));
    if (k < 1) return At(r.PathOf("k"), "k must be >= 1");
    t.k = k;
    PRIVLENS_ASSIGN_OR_RETURN(const Json* eps, r.Require("epsilon"));
    PRIVLENS_ASSIGN_OR_RETURN(EpsilonSpec e, ReadPrivacyEpsilon(*eps, r.PathOf("epsilon")));
    t.epsilon = e;
    PRIVLENS_ASSIGN_OR_RETURN(const Json* deltas, r.Require("exp_deltas"));
    if (!deltas->is_array() || deltas->empty()) {
      return At(r.PathOf("exp_deltas"), "expected a non-empty array");
    }
    for (size_t a = 0; a < deltas->size(); ++a) {
      PRIVLENS_ASSIGN_OR_RETURN(UnitSpec u, ReadUnit((*deltas)[a], Child(r.PathOf("exp_deltas"), a)));
      t.exp_deltas.push_back(u);
    }
    PRIVLENS_ASSIGN_OR_RETURN(t.measure, r.BoolOr("measure", t.kind == "bound"));
    if (t.measure && t.channel.empty()) {
      return At(path, "measuring a sweep needs a channel");
    }
  } else if (t.kind == "compose") {
    PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"kind", "mode", "prior", "channels", "epsilons", "k",
                                         "epochs", "independent", "equal", "individual"}));
    PRIVLENS_ASSIGN_OR_RETURN(t.mode, r.String("mode"));
    if (t.mode == "basic") {
      PRIVLENS_ASSIGN_OR_RETURN(t.prior, r.String("prior"));
      PRIVLENS_ASSIGN_OR_RETURN(const Json* channels, r.Require("channels"));
      PRIVLENS_ASSIGN_OR_RETURN(t.channels, ReadStringList(*channels, r.PathOf("channels")));
      PRIVLENS_ASSIGN_OR_RETURN(const Json* eps, r.Require("epsilons"));
      PRIVLENS_ASSIGN_OR_RETURN(t.epsilons, ReadEpsilonList(*eps, r.PathOf("epsilons")));
      if (t.epsilons.size() != t.channels.size()) {
        return At(r.PathOf("epsilons"), "needs one epsilon per channel");
      }
      PRIVLENS_ASSIGN_OR_RETURN(uint64_t k, r.Unsigned("k"));
      t.k = k;
    } else if (t.mode == "general") {
      PRIVLENS_ASSIGN_OR_RETURN(const Json* epochs, r.Require("epochs"));
      if (!epochs->is_array() || epochs->empty()) {
        return At(r.PathOf("epochs"), "expected a non-empty array of epochs");
      }
      for (size_t a = 0; a < epochs->size(); ++a) {
        ObjectReader er((*epochs)[a], Child(r.PathOf("epochs"), a));
        PRIVLENS_RETURN_IF_ERROR(er.ExpectObject());
        PRIVLENS_RETURN_IF_ERROR(er.OnlyKeys({"prior", "channel"}));
        EpochSpec e;
        PRIVLENS_ASSIGN_OR_RETURN(e.prior, er.String("prior"));
        PRIVLENS_ASSIGN_OR_RETURN(e.channel, er.String("channel"));
        t.epochs.push_back(std::move(e));
      }
      PRIVLENS_ASSIGN_OR_RETURN(t.independent, r.BoolOr("independent", false));
      PRIVLENS_ASSIGN_OR_RETURN(t.equal, r.BoolOr("equal", false));
      PRIVLENS_ASSIGN_OR_RETURN(auto ind, r.OptionalUnsigned("individual"));
      if (ind) t.individual = *ind;
    } else {
      return At(r.PathOf("mode"), "mode must be basic or general");
    }
  } else {
    return At(r.PathOf("kind"),
              absl::StrCat("unknown task kind '", t.kind,
                           "' (leakage|certify|bound|compose|sweep)"));
  }
  return t;
}

inline Json WriteTask(const TaskSpec& t) {
  Json j;
  j["kind"] = t.kind;
  if (t.kind == "leakage") {
    j["prior"] = t.prior;
    j["channel"] = t.channel;
    if (!t.targets.empty()) j["targets"] = t.targets;
  } else if (t.kind == "certify") {
    j["channel"] = t.channel;
    j["claims"] = Json::array();
    for (const auto& c : t.claims) j["claims"].push_back(WriteClaim(c));
  } else if (t.kind == "bound" || t.kind == "sweep") {
    if (!t.channel.empty()) j["channel"] = t.channel;
    j["k"] = *t.k;
    j["epsilon"] = WriteEpsilon(*t.epsilon);
    j["exp_deltas"] = Json::array();
    for (const auto& u : t.exp_deltas) j["exp_deltas"].push_back(WriteUnit(u));
    j["measure"] = t.measure;
  } else if (t.kind == "compose") {
    j["mode"] = t.mode;
    if (t.mode == "basic") {
      j["prior"] = t.prior;
      j["channels"] = t.channels;
      j["epsilons"] = Json::array();
      for (const auto& e : t.epsilons) j["epsilons"].push_back(WriteEpsilon(e));
      j["k"] = *t.k;
    } else {
      j["epochs"] = Json::array();
      for (const auto& e : t.epochs) {
        Json ej;
        ej["prior"] = e.prior;
        ej["channel"] = e.channel;
        j["epochs"].push_back(std::move(ej));
      }
      j["independent"] = t.independent;
      j["equal"] = t.equal;
      if (t.individual) j["individual"] = *t.individual;
    }
  }
  return j;
}

// Every name a task or channel mentions, checked against the scenario.
inline absl::Status CheckReferences(const Scenario& s) {
  auto prior = [&](const std::string& name, const std::string& path) -> absl::Status {
    if (!s.priors.count(name)) return At(path, absl::StrCat("unknown prior '", name, "'"));
    return absl::OkStatus();
  };
  auto channel = [&](const std::string& name, const std::string& path) -> absl::Status {
    if (!s.channels.count(name)) return At(path, absl::StrCat("unknown channel '", name, "'"));
    return absl::OkStatus();
  };
  for (const auto& [name, c] : s.channels) {
    for (size_t a = 0; a < c.of.size(); ++a) {
      PRIVLENS_RETURN_IF_ERROR(channel(c.of[a], absl::StrCat("/channels/", name, "/of")));
    }
  }
  // Composite channels must not refer back to themselves.
  std::map<std::string, int> state;  // 1 visiting, 2 done
  auto visit = [&](auto&& self, const std::string& name) -> absl::Status {
    if (state[name] == 2) return absl::OkStatus();
    if (state[name] == 1) {
      return At(absl::StrCat("/channels/", name), "channel definitions form a cycle");
    }
    state[name] = 1;
    for (const auto& child : s.channels.at(name).of) PRIVLENS_RETURN_IF_ERROR(self(self, child));
    state[name] = 2;
    return absl::OkStatus();
  };
  for (const auto& [name, c] : s.channels) PRIVLENS_RETURN_IF_ERROR(visit(visit, name));

  const TaskSpec& t = s.task;
  if (!t.prior.empty()) PRIVLENS_RETURN_IF_ERROR(prior(t.prior, "/task/prior"));
  if (!t.channel.empty()) PRIVLENS_RETURN_IF_ERROR(channel(t.channel, "/task/channel"));
  for (size_t a = 0; a < t.channels.size(); ++a) {
    PRIVLENS_RETURN_IF_ERROR(channel(t.channels[a], Child("/task/channels", a)));
  }
  for (size_t a = 0; a < t.epochs.size(); ++a) {
    const std::string p = Child("/task/epochs", a);
    PRIVLENS_RETURN_IF_ERROR(prior(t.epochs[a].prior, Child(p, "prior")));
    PRIVLENS_RETURN_IF_ERROR(channel(t.epochs[a].channel, Child(p, "channel")));
  }
  for (size_t a = 0; a < t.claims.size(); ++a) {
    if (!t.claims[a].prior.empty()) {
      PRIVLENS_RETURN_IF_ERROR(prior(t.claims[a].prior, Child(Child("/task/claims", a), "prior")));
    }
  }
  return absl::OkStatus();
}

}  // namespace internal

inline absl::StatusOr<Scenario> ParseScenarioJson(const Json& j) {
  internal::ObjectReader r(j, "");
  PRIVLENS_RETURN_IF_ERROR(r.ExpectObject());
  PRIVLENS_RETURN_IF_ERROR(r.OnlyKeys({"schema_version", "name", "arithmetic", "universe",
                                       "priors", "channels", "family", "task", "seed",
                                       "samples", "budget"}));
  Scenario s;
  if (r.Has("schema_version")) {
    PRIVLENS_ASSIGN_OR_RETURN(uint64_t v, r.Unsigned("schema_version"));
    if (v != kSchemaVersion) {
      return internal::At(r.PathOf("schema_version"),
                          absl::StrCat("unsupported schema version ", v));
    }
  }
  PRIVLENS_ASSIGN_OR_RETURN(s.name, r.StringOr("name", ""));
  PRIVLENS_ASSIGN_OR_RETURN(std::string arithmetic, r.StringOr("arithmetic", "auto"));
  if (arithmetic == "auto") {
    s.arithmetic = Arithmetic::kAuto;
  } else if (arithmetic == "exact") {
    s.arithmetic = Arithmetic::kExact;
  } else if (arithmetic == "double") {
    s.arithmetic = Arithmetic::kDouble;
  } else {
    return internal::At(r.PathOf("arithmetic"), "expected auto, exact or double");
  }
  PRIVLENS_ASSIGN_OR_RETURN(const Json* universe, r.Require("universe"));
  if (!universe->is_array() || universe->empty()) {
    return internal::At(r.PathOf("universe"), "expected a non-empty array of alphabets");
  }
  for (size_t i = 0; i < universe->size(); ++i) {
    PRIVLENS_ASSIGN_OR_RETURN(
        auto alphabet, internal::ReadStringList((*universe)[i], internal::Child(r.PathOf("universe"), i)));
    s.universe.push_back(std::move(alphabet));
  }
  if (auto u = RecordUniverse::Create(s.universe); !u.ok()) {
    return internal::At(r.PathOf("universe"), u.status().message());
  }
  if (r.Has("priors")) {
    const Json& priors = r["priors"];
    if (!priors.is_object()) return internal::At(r.PathOf("priors"), "expected an object");
    for (auto it = priors.begin(); it != priors.end(); ++it) {
      PRIVLENS_ASSIGN_OR_RETURN(
          PriorSpec p, internal::ReadPrior(it.value(), internal::Child(r.PathOf("priors"), it.key())));
      s.priors.emplace(it.key(), std::move(p));
    }
  }
  if (r.Has("channels")) {
    const Json& channels = r["channels"];
    if (!channels.is_object()) return internal::At(r.PathOf("channels"), "expected an object");
    for (auto it = channels.begin(); it != channels.end(); ++it) {
      PRIVLENS_ASSIGN_OR_RETURN(
          ChannelSpec c,
          internal::ReadChannel(it.value(), internal::Child(r.PathOf("channels"), it.key())));
      s.channels.emplace(it.key(), std::move(c));
    }
  }
  if (r.Has("family")) {
    PRIVLENS_ASSIGN_OR_RETURN(s.family, internal::ReadFamily(r["family"], r.PathOf("family")));
  }
  PRIVLENS_ASSIGN_OR_RETURN(const Json* task, r.Require("task"));
  PRIVLENS_ASSIGN_OR_RETURN(s.task, internal::ReadTask(*task, r.PathOf("task")));
  PRIVLENS_ASSIGN_OR_RETURN(auto seed, r.OptionalUnsigned("seed"));
  if (seed) s.seed = *seed;
  PRIVLENS_ASSIGN_OR_RETURN(auto samples, r.OptionalUnsigned("samples"));
  if (samples) {
    if (*samples == 0) return internal::At(r.PathOf("samples"), "samples must be positive");
    s.samples = *samples;
  }
  PRIVLENS_ASSIGN_OR_RETURN(auto budget, r.OptionalUnsigned("budget"));
  if (budget) {
    if (*budget == 0) return internal::At(r.PathOf("budget"), "budget must be positive");
    s.budget = *budget;
  }
  PRIVLENS_RETURN_IF_ERROR(internal::CheckReferences(s));
  return s;
}

inline absl::StatusOr<Scenario> ParseScenario(absl::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("/: document is not valid JSON");
  return ParseScenarioJson(j);
}

inline Json SerializeScenario(const Scenario& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  if (!s.name.empty()) j["name"] = s.name;
  j["arithmetic"] = s.arithmetic == Arithmetic::kAuto    ? "auto"
                    : s.arithmetic == Arithmetic::kExact ? "exact"
                                                         : "double";
  j["universe"] = s.universe;
  j["priors"] = Json::object();
  for (const auto& [name, p] : s.priors) j["priors"][name] = internal::WritePrior(p);
  j["channels"] = Json::object();
  for (const auto& [name, c] : s.channels) j["channels"][name] = internal::WriteChannel(c);
  j["family"] = internal::WriteFamily(s.family);
  j["task"] = internal::WriteTask(s.task);
  j["seed"] = s.seed;
  j["samples"] = s.samples;
  j["budget"] = s.budget;
  return j;
}

}  // namespace privlens::cli

#endif  // PRIVLENS_CLI_SCENARIO_H_
