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

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "privlens/cli/runner.h"
#include "privlens/cli/scenario.h"

namespace privlens::cli {
namespace {

std::string ReadFile(const std::string& name) {
  std::ifstream in(std::string(PRIVLENS_SCENARIO_DIR) + "/" + name);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Scenario Load(const std::string& name) {
  auto s = ParseScenario(ReadFile(name));
  EXPECT_TRUE(s.ok()) << name << ": " << s.status();
  return s.ok() ? *s : Scenario{};
}

RunResult RunText(const std::string& text, const std::string& command) {
  auto s = ParseScenario(text);
  if (!s.ok()) {
    RunResult r;
    r.exit_code = kExitInput;
    r.report["error"] = {{"message", std::string(s.status().message())}};
    return r;
  }
  RunOptions opts;
  opts.command = command;
  return Run(*s, opts);
}

std::string ErrorOf(const std::string& text) {
  auto s = ParseScenario(text);
  return s.ok() ? "" : std::string(s.status().message());
}

constexpr char kMatrixTemplate[] = R"json({
  "universe": [["⊥", "a", "b"]],
  "priors": {"u": {"kind": "uniform"}},
  "channels": {"c": {"type": "matrix", "outcomes": ["y", "n"],
    "rows": {"0,0": ["1/2", "1/2"], "1,0": ROW, "0,1": ["1/4", "3/4"]}}},
  "task": {"kind": "leakage", "prior": "u", "channel": "c"}
})json";

std::string MatrixWithRow(const std::string& row) {
  std::string text = kMatrixTemplate;
  text.replace(text.find("ROW"), 3, row);
  return text;
}

TEST(ScenarioTest, RoundTripIsIdentity) {
  for (const char* name : {"keep34_leakage.json", "geometric_certify.json", "pdelta_sweep.json",
                           "compose_basic.json", "compose_epochs.json"}) {
    Scenario s = Load(name);
    auto again = ParseScenarioJson(SerializeScenario(s));
    ASSERT_TRUE(again.ok()) << name << ": " << again.status();
    EXPECT_EQ(*again, s) << name;
    EXPECT_EQ(SerializeScenario(*again).dump(), SerializeScenario(s).dump()) << name;
  }
}

TEST(ScenarioTest, RoundTripKeepsMatrixRowsAndLimits) {
  const std::string text = R"json({
    "name": "mixed",
    "arithmetic": "exact",
    "universe": [["⊥", "a"], ["⊥", "a"]],
    "priors": {
      "ind": {"kind": "independent", "marginals": [["1/3", "2/3"], [0.25, 0.75]]},
      "blk": {"kind": "blocks", "blocks": [[0, 1]], "tables": [["1/2", "0", "0", "1/2"]],
              "limits": [{"individual": 0, "record": "a", "conditional": ["1", "0"]}]}
    },
    "channels": {
      "m": {"type": "matrix", "outcomes": ["y", "n"],
            "rows": {"0": ["1", "0"], "1": ["1/2", "1/2"], "2": ["0", "1"]}},
      "k": {"kind": "constant", "outcomes": ["z"], "row": ["1"]},
      "p": {"type": "product", "of": ["m", "k"]}
    },
    "family": {"k": 2, "exp_delta": "1/2", "tau": 0.5},
    "task": {"kind": "leakage", "prior": "blk", "channel": "p", "targets": [[0], [0, 1]]},
    "seed": 9, "samples": 17, "budget": 12345
  })json";
  auto s = ParseScenario(text);
  ASSERT_TRUE(s.ok()) << s.status();
  auto again = ParseScenarioJson(SerializeScenario(*s));
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(*again, *s);
  EXPECT_EQ(s->priors.at("ind").marginals[1][0], Rational(1, 4));
  EXPECT_EQ(s->arithmetic, Arithmetic::kExact);
  EXPECT_EQ(s->seed, 9u);
}

TEST(ScenarioTest, FractionsStayExact) {
  Scenario s = Load("keep34_leakage.json");
  EXPECT_EQ(s.channels.at("rr").keep, Rational(1, 2));
  RunOptions opts{"leakage", std::nullopt, std::nullopt, std::nullopt};
  RunResult r = cli::Run(s, opts);
  EXPECT_EQ(r.report["arithmetic"], "exact");

  auto parsed = ParseScenario(MatrixWithRow(R"(["3/4", "1/4"])"));
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(parsed->channels.at("c").rows.at("1,0")[0], Rational(3, 4));
}

TEST(ScenarioTest, RowSumErrorNamesHistogram) {
  RunResult r = RunText(MatrixWithRow("[0.98, 0]"), "leakage");
  EXPECT_EQ(r.exit_code, kExitInput);
  EXPECT_EQ(r.report["error"]["message"],
            "/channels/c: row for histogram [1,0] sums to 49/50, expected 1");
}

TEST(ScenarioTest, ErrorsCarryJsonPointers) {
  std::string text = MatrixWithRow(R"(["1/2", "1/2"])");
  EXPECT_EQ(ErrorOf("not json"), "/: document is not valid JSON");

  std::string unknown = text;
  unknown.replace(unknown.find("\"rows\""), 6, "\"rowz\"");
  EXPECT_EQ(ErrorOf(unknown), "/channels/c/rowz: unknown field");

  std::string top = text;
  top.insert(1, "\"colour\": 1,");
  EXPECT_EQ(ErrorOf(top), "/colour: unknown field");

  std::string bad_prior = text;
  bad_prior.replace(bad_prior.find("\"prior\": \"u\""), 12, "\"prior\": \"w\"");
  EXPECT_EQ(ErrorOf(bad_prior), "/task/prior: unknown prior 'w'");

  std::string bad_kind = text;
  bad_kind.replace(bad_kind.find("\"leakage\""), 9, "\"leak\"");
  EXPECT_NE(ErrorOf(bad_kind).find("/task/kind: unknown task kind 'leak'"), std::string::npos);

  EXPECT_NE(ErrorOf(MatrixWithRow(R"(["2", "-1"])")).find("/channels/c/rows/1,0"),
            std::string::npos);
}

TEST(ScenarioTest, ChannelSelectorAliases) {
  const std::string base = R"json({
    "universe": [["⊥", "a"]],
    "channels": {"c": SELECTOR},
    "task": {"kind": "certify", "channel": "c", "claims": [{"claim": "tightness_pk", "k": 1}]}
  })json";
  auto with = [&](const std::string& selector) {
    std::string t = base;
    t.replace(t.find("SELECTOR"), 8, selector);
    return t;
  };
  auto by_type = ParseScenario(with(R"({"type": "randomized_response", "keep": "1/2"})"));
  auto by_kind = ParseScenario(with(R"({"kind": "randomized_response", "keep": "1/2"})"));
  ASSERT_TRUE(by_type.ok()) << by_type.status();
  ASSERT_TRUE(by_kind.ok()) << by_kind.status();
  EXPECT_EQ(*by_type, *by_kind);

  auto geo = ParseScenario(with(R"({"type": "geometric", "target": "a", "alpha": "1/3", "m": 1})"));
  auto geo_long =
      ParseScenario(with(R"({"type": "geometric_counting", "target": "a", "alpha": "1/3", "m": 1})"));
  ASSERT_TRUE(geo.ok() && geo_long.ok());
  EXPECT_EQ(*geo, *geo_long);

  EXPECT_EQ(ErrorOf(with(R"({"type": "identity", "kind": "identity"})")),
            "/channels/c: give only one of 'type' or 'kind'");
  EXPECT_EQ(ErrorOf(with(R"({"keep": "1/2"})")), "/channels/c: missing field 'type'");
}

TEST(ScenarioTest, EpsilonForms) {
  const std::string base = R"json({
    "universe": [["⊥", "a"]],
    "channels": {"c": {"type": "randomized_response", "keep": "1/2"}},
    "task": {"kind": "certify", "channel": "c",
             "claims": [{"claim": "certify_pk", "k": 1, "epsilon": EPS}]}
  })json";
  auto eps = [&](const std::string& e) {
    std::string t = base;
    t.replace(t.find("EPS"), 3, e);
    auto s = ParseScenario(t);
    EXPECT_TRUE(s.ok()) << e << ": " << s.status();
    return s.ok() ? *s->task.claims[0].epsilon : EpsilonSpec{};
  };
  EpsilonSpec ln3 = eps(R"x("ln(3)")x");
  EXPECT_NEAR(ln3.nats, std::log(3.0), 1e-15);
  ASSERT_TRUE(ln3.ratio.has_value());
  EXPECT_EQ(*ln3.ratio, Rational(3));
  EpsilonSpec two = eps(R"x("2*ln(3/2)")x");
  ASSERT_TRUE(two.ratio.has_value());
  EXPECT_EQ(*two.ratio, Rational(9, 4));
  EpsilonSpec plain = eps("0.5");
  EXPECT_DOUBLE_EQ(plain.nats, 0.5);
  EXPECT_FALSE(plain.ratio.has_value());
}

TEST(RunTest, KeepThreeQuartersLeakage) {
  RunOptions opts{"leakage", std::nullopt, std::nullopt, std::nullopt};
  RunResult r = cli::Run(Load("keep34_leakage.json"), opts);
  ASSERT_EQ(r.exit_code, kExitPass) << r.report.dump(2);
  const Json& l = r.report["results"]["leakage"][0];
  EXPECT_NEAR(l["i_inf"]["nats"].get<double>(), std::log(1.5), 1e-12);
  EXPECT_EQ(l["i_inf"]["exact_ratio"], "3/2");
  EXPECT_EQ(l["inferential_eps"]["exact_ratio"], "3");
  EXPECT_NEAR(r.report["results"]["dp_epsilon"].get<double>(), std::log(3.0), 1e-12);
  EXPECT_EQ(r.report["exit_code"], 0);
}

TEST(RunTest, GeometricCertifyViolatesAtKTwo) {
  RunOptions opts{"certify", std::nullopt, std::nullopt, std::nullopt};
  RunResult r = cli::Run(Load("geometric_certify.json"), opts);
  EXPECT_EQ(r.exit_code, kExitViolated);
  const Json& v = r.report["results"]["verdicts"];
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0]["status"], "satisfied");
  EXPECT_EQ(v[1]["status"], "violated");
  EXPECT_EQ(v[1]["measured"]["exact"], "9");
  EXPECT_EQ(v[2]["claim"], "tightness_pk");
  EXPECT_TRUE(v[2]["satisfied"].get<bool>());
}

TEST(RunTest, SweepInterpolatesBetweenEndpoints) {
  RunOptions opts{"sweep", std::nullopt, std::nullopt, std::nullopt};
  RunResult r = cli::Run(Load("pdelta_sweep.json"), opts);
  ASSERT_EQ(r.exit_code, kExitPass) << r.report.dump(2);
  const Json& rows = r.report["results"]["rows"];
  ASSERT_EQ(rows.size(), 5u);
  const double expected[] = {3, 4.5, 6, 7.5, 9};
  for (size_t a = 0; a < 5; ++a) {
    EXPECT_NEAR(rows[a]["bound"]["ratio"].get<double>(), expected[a], 1e-9) << a;
    EXPECT_TRUE(rows[a]["within_bound"].get<bool>()) << a;
    EXPECT_LE(rows[a]["measured"]["ratio"].get<double>(),
              rows[a]["bound"]["ratio"].get<double>() * (1 + 1e-12));
  }
}

TEST(RunTest, ComposeScenarios) {
  RunOptions opts{"compose", std::nullopt, std::nullopt, std::nullopt};
  RunResult basic = cli::Run(Load("compose_basic.json"), opts);
  EXPECT_EQ(basic.exit_code, kExitPass) << basic.report.dump(2);
  EXPECT_EQ(basic.report["results"]["verdicts"][0]["bound"]["exact"], "9");
  RunResult epochs = cli::Run(Load("compose_epochs.json"), opts);
  EXPECT_EQ(epochs.exit_code, kExitPass) << epochs.report.dump(2);
  const Json& e = epochs.report["results"]["epochs"][0];
  EXPECT_EQ(e["total"]["exact_ratio"], "9/4");
  EXPECT_EQ(e["direct"]["exact_ratio"], "9/4");
}

TEST(RunTest, PreconditionFailureIsInconclusive) {
  const std::string text = R"json({
    "universe": [["⊥", "x"], ["⊥", "x"]],
    "channels": {"geo": {"type": "geometric_counting", "target": "x", "epsilon": "ln(3)", "m": 2}},
    "task": {"kind": "certify", "channel": "geo",
             "claims": [{"claim": "bound_pdelta", "k": 2, "epsilon": "ln(3)", "exp_delta": "1/2"}]}
  })json";
  RunResult r = RunText(text, "certify");
  EXPECT_EQ(r.exit_code, kExitInconclusive) << r.report.dump(2);
  EXPECT_EQ(r.report["results"]["verdicts"][0]["status"], "precondition-failed");
}

TEST(RunTest, BudgetExhaustionKeepsPartialReport) {
  RunOptions opts{"leakage", std::nullopt, std::nullopt, uint64_t{1}};
  RunResult r = cli::Run(Load("keep34_leakage.json"), opts);
  EXPECT_EQ(r.exit_code, kExitBudget);
  EXPECT_EQ(r.report["error"]["code"], "RESOURCE_EXHAUSTED");
  EXPECT_TRUE(r.report.contains("results"));
  EXPECT_EQ(r.report["budget"], 1);
}

TEST(RunTest, CommandMustMatchTask) {
  RunOptions opts{"certify", std::nullopt, std::nullopt, std::nullopt};
  RunResult r = cli::Run(Load("keep34_leakage.json"), opts);
  EXPECT_EQ(r.exit_code, kExitInput);
  EXPECT_NE(r.report["error"]["message"].get<std::string>().find("/task/kind"), std::string::npos);
}

TEST(RunTest, ValidateBuildsEverythingWithoutRunning) {
  RunOptions opts{"validate", std::nullopt, std::nullopt, std::nullopt};
  RunResult ok = cli::Run(Load("geometric_certify.json"), opts);
  EXPECT_EQ(ok.exit_code, kExitPass);
  EXPECT_TRUE(ok.report["valid"].get<bool>());
  EXPECT_FALSE(ok.report.contains("results"));
  auto canonical = ParseScenarioJson(ok.report["canonical"]);
  ASSERT_TRUE(canonical.ok()) << canonical.status();
  EXPECT_EQ(*canonical, Load("geometric_certify.json"));

  RunResult bad = RunText(MatrixWithRow("[0.98, 0]"), "validate");
  EXPECT_EQ(bad.exit_code, kExitInput);
}

TEST(RunTest, OverridesAppearInHeader) {
  RunOptions opts{"sweep", uint64_t{42}, uint64_t{10}, std::nullopt};
  RunResult r = cli::Run(Load("pdelta_sweep.json"), opts);
  EXPECT_EQ(r.report["seed"], 42);
  EXPECT_EQ(r.report["samples"], 10);
  RunResult again = cli::Run(Load("pdelta_sweep.json"), opts);
  EXPECT_EQ(r.report.dump(), again.report.dump());
}

TEST(RenderTableTest, MentionsEveryResultKind) {
  for (const auto& [file, command] :
       std::vector<std::pair<std::string, std::string>>{{"keep34_leakage.json", "leakage"},
                                                        {"geometric_certify.json", "certify"},
                                                        {"pdelta_sweep.json", "sweep"},
                                                        {"compose_epochs.json", "compose"}}) {
    RunOptions opts{command, std::nullopt, std::nullopt, std::nullopt};
    RunResult r = cli::Run(Load(file), opts);
    const std::string table = RenderTable(r.report);
    EXPECT_NE(table.find("command=" + command), std::string::npos) << file;
    EXPECT_NE(table.find("exit code " + std::to_string(r.exit_code)), std::string::npos) << file;
  }
  RunOptions opts{"certify", std::nullopt, std::nullopt, std::nullopt};
  const std::string t = RenderTable(cli::Run(Load("geometric_certify.json"), opts).report);
  EXPECT_NE(t.find("violated"), std::string::npos);
}

}  // namespace
}  // namespace privlens::cli
