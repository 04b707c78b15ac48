// Copyright 2026 The qbclab Authors
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

#include <CLI11.hpp>
#include <iostream>

#include "qbc/cli.hpp"
#include "qbc/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-party quantum bit-commitment simulator and attack toolkit"};
  app.set_version_flag("--version", std::string(qbc::kToolVersion));
  app.require_subcommand(1);

  // run ------------------------------------------------------------------
  qbc::cli::RunConfig run;
  std::string mode = "honest";
  std::uint64_t seed_value = 0;
  auto* cmd_run = app.add_subcommand("run", "execute a protocol and write a report");
  cmd_run->add_option("--script", run.script_path, "path to a .qbc protocol script");
  cmd_run->add_option("--builtin", run.builtin, "built-in protocol: vaa or epr")
      ->default_val("vaa");
  cmd_run->add_option("--n", run.rounds, "rounds for the built-in protocol")->default_val(20);
  cmd_run->add_option("--mode", mode, "honest | cheat:alice | cheat:bob")->default_val("honest");
  auto* seed_opt =
      cmd_run->add_option("--seed", seed_value, "replay seed (default: drawn and recorded)");
  cmd_run->add_option("--commit", run.commit, "commitment bit")->default_val(0);
  cmd_run->add_flag("--flip-reveal", run.flip_reveal, "reveal the flipped bit");
  cmd_run->add_option("--trials", run.trials, "independent repetitions")->default_val(1);
  cmd_run->add_option("--jobs", run.jobs, "worker threads for --trials")->default_val(1);
  cmd_run->add_option("--out", run.output_path,
                      "report path (default: stdout; relative paths resolve "
                      "against QBC_OUTPUT_DIR)");
  cmd_run->add_option("--format", run.format, "json | text")->default_val("json");

  // attack ---------------------------------------------------------------
  qbc::cli::AttackConfig attack;
  auto* cmd_attack = app.add_subcommand("attack", "synthesize the cheat unitary for two states");
  cmd_attack->add_option("--psi0", attack.psi0_path, "amplitude file of the 0-commitment")
      ->required();
  cmd_attack->add_option("--psi1", attack.psi1_path, "amplitude file of the 1-commitment")
      ->required();
  cmd_attack->add_option("--dimA", attack.dim_a, "dimension of the A factor")->required();
  cmd_attack->add_option("--dimB", attack.dim_b, "dimension of the B factor")->required();
  cmd_attack->add_option("--out", attack.output_path, "report path (default: stdout)");
  cmd_attack->add_option("--format", attack.format, "json | text")->default_val("json");

  // abl-table --------------------------------------------------------------
  qbc::cli::AblConfig abl;
  auto* cmd_abl = app.add_subcommand("abl-table", "print the pre/post-selection outcome table");
  cmd_abl->add_option("--post", abl.post, "restrict to one post-selection: r1..r4");
  cmd_abl->add_option("--obs", abl.obs, "restrict to one observable: sx, sy or sz");
  cmd_abl->add_option("--pre", abl.pre_path, "custom two-qubit pre-state file");
  cmd_abl->add_option("--format", abl.format, "text | json")->default_val("text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : qbc::cli::kExitUsage;
  }

  if (cmd_run->parsed()) {
    if (seed_opt->count() > 0) run.seed = seed_value;
    try {
      run.mode = qbc::proto::mode_from_string(mode);
    } catch (const qbc::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return qbc::cli::kExitUsage;
    }
    return qbc::cli::cmd_run(run, std::cout, std::cerr);
  }
  if (cmd_attack->parsed()) {
    return qbc::cli::cmd_attack(attack, std::cout, std::cerr);
  }
  return qbc::cli::cmd_abl_table(abl, std::cout, std::cerr);
}
