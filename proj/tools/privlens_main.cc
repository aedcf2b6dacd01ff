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

// Command-line front end: privlens <command> <scenario.json> [flags].

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "privlens/cli/runner.h"
#include "privlens/cli/scenario.h"
#include "privlens/parallel.h"

namespace {

using privlens::cli::Json;

struct Flags {
  std::string scenario;
  std::optional<uint64_t> seed;
  std::optional<uint64_t> budget;
  std::optional<uint64_t> samples;
  std::optional<unsigned> threads;
  std::string format = "json";
  std::string output;
};

unsigned ResolveThreads(const std::optional<unsigned>& flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("PRIVLENS_THREADS")) {
    unsigned n = 0;
    if (absl::SimpleAtoi(env, &n) && n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

int Emit(const Json& report, const Flags& flags) {
  std::string text = flags.format == "table" ? privlens::cli::RenderTable(report)
                                             : report.dump(2) + "\n";
  if (flags.output.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(flags.output);
  out << text;
  if (!out) {
    std::cerr << "privlens: cannot write " << flags.output << "\n";
    return 1;
  }
  return 0;
}

int Execute(const std::string& command, const Flags& flags) {
  const auto start = std::chrono::steady_clock::now();
  privlens::SetThreadCount(ResolveThreads(flags.threads));

  privlens::cli::RunOptions opts;
  opts.command = command;
  opts.seed = flags.seed;
  opts.samples = flags.samples;
  opts.budget = flags.budget;

  Json report;
  int code = privlens::cli::kExitInput;
  std::ifstream in(flags.scenario);
  if (!in) {
    report = {{"schema_version", privlens::cli::kSchemaVersion},
              {"tool", "privlens"},
              {"version", privlens::cli::kToolVersion},
              {"command", command},
              {"error", {{"code", "INVALID_ARGUMENT"},
                         {"message", "cannot read scenario file " + flags.scenario}}},
              {"exit_code", code}};
  } else {
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto scenario = privlens::cli::ParseScenario(buffer.str());
    if (!scenario.ok()) {
      report = {{"schema_version", privlens::cli::kSchemaVersion},
                {"tool", "privlens"},
                {"version", privlens::cli::kToolVersion},
                {"command", command},
                {"error", {{"code", absl::StatusCodeToString(scenario.status().code())},
                           {"message", std::string(scenario.status().message())}}},
                {"exit_code", code}};
    } else {
      privlens::cli::RunResult result = privlens::cli::Run(*scenario, opts);
      report = std::move(result.report);
      code = result.exit_code;
    }
  }
  if (Emit(report, flags) != 0) code = privlens::cli::kExitInput;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "privlens: " << command << " finished in " << seconds << " s with "
            << privlens::ThreadCount() << " thread(s), exit " << code << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy leakage analysis and claim auditing over finite record universes"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  for (const char* name : {"leakage", "certify", "bound", "compose", "sweep", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("scenario", flags.scenario, "Scenario JSON file")->required();
    sub->add_option("--seed", flags.seed, "Override the scenario RNG seed");
    sub->add_option("--budget", flags.budget, "Override the enumeration budget");
    sub->add_option("--samples", flags.samples, "Override the number of sampled priors");
    sub->add_option("--threads", flags.threads,
                    "Worker threads (default: PRIVLENS_THREADS or hardware concurrency)");
    sub->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--output", flags.output, "Write the report to this file");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : privlens::cli::kExitInput;
  }
  return Execute(chosen, flags);
}
