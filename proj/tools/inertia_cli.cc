// Copyright 2026 The Inertia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end:
//   inertia_cli gen-data   --config C [--seed S] [--workers W] [--out DIR]
//   inertia_cli train      --config C --model torque|attention
//   inertia_cli identify   --config C [--method all|sensor,pe,t-model,t-a-model]
//                          [--window 64] [--repeats 1000]
//   inertia_cli eval       --config C
//   inertia_cli continuous --config C [--workers W]

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "inertia/pipeline.h"

int main(int argc, char** argv) {
  CLI::App app{"Payload inertial-parameter identification pipeline"};
  app.require_subcommand(1);

  inertia::CommandOptions options;
  std::uint64_t seed = 0;
  std::size_t window = 0, repeats = 0;
  std::string out;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", options.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--seed", seed, "override the master seed");
    cmd->add_option("--out", out, "output directory (default: config output_dir)");
  };
  auto* gen = app.add_subcommand("gen-data", "simulate training and test datasets");
  add_common(gen);
  gen->add_option("--workers", options.workers, "parallel sample generation")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "train the torque or attention model");
  add_common(train);
  train->add_option("--model", options.train_target, "torque | attention")
      ->check(CLI::IsMember({"torque", "attention"}));

  auto* identify = app.add_subcommand("identify", "repeated windowed identification");
  add_common(identify);
  identify->add_option("--method", options.method, "all or comma list of sensor,pe,t-model,t-a-model");
  identify->add_option("--window", window, "samples per identification window")->check(CLI::PositiveNumber);
  identify->add_option("--repeats", repeats, "windows per test object")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "torque error and attention weight tables");
  add_common(eval);

  auto* continuous = app.add_subcommand("continuous", "switching-force trajectory experiment");
  add_common(continuous);
  continuous->add_option("--workers", options.workers, "parallel sample generation")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(inertia::ExitCode::kUsage);
  }

  CLI::App* cmd = app.get_subcommands().front();
  if (cmd->count("--seed")) options.seed = seed;
  if (!out.empty()) options.out = out;
  if (cmd == identify) {
    if (identify->count("--window")) options.window = window;
    if (identify->count("--repeats")) options.repeats = repeats;
  }
  return static_cast<int>(inertia::RunCommand(cmd->get_name(), options, std::cout, std::cerr));
}
