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
//
// The command implementations behind the qbc binary. Exit codes: 0 success,
// 1 protocol verdict reject, 2 usage/parse error.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qbc/proto/execute.hpp"

namespace qbc::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitReject = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string script_path;       // path to a .qbc file, or
  std::string builtin = "vaa";   // a built-in name ("vaa", "epr")
  int rounds = 20;               // built-in rounds
  proto::Mode mode = proto::Mode::Honest;
  std::optional<std::uint64_t> seed;  // absent: drawn once and recorded
  int commit = 0;
  bool flip_reveal = false;
  int trials = 1;
  int jobs = 1;
  std::string output_path;       // empty writes to stdout
  std::string format = "json";   // "json" | "text"
  bool with_timestamp = true;
};

struct AttackConfig {
  std::string psi0_path;
  std::string psi1_path;
  linalg::Index dim_a = 0;
  linalg::Index dim_b = 0;
  std::string output_path;
  std::string format = "json";
};

struct AblConfig {
  std::string post;   // "" for the full table, or "r1".."r4"
  std::string obs;    // "" or "sx"/"sy"/"sz"
  std::string pre_path;  // optional custom pre-state file
  std::string format = "text";
};

/// Runs a protocol (possibly many trials) and writes the report.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Loads two amplitude files and reports concealment, the synthesized cheat
/// unitary and its fidelity.
int cmd_attack(const AttackConfig& config, std::ostream& out, std::ostream& err);

/// Prints the pre/post-selection outcome table with per-cell probabilities
/// and a PASS/FAIL column against the known outcomes.
int cmd_abl_table(const AblConfig& config, std::ostream& out, std::ostream& err);

/// The deterministic report body for a run configuration with a concrete
/// seed (no timestamp). cmd_run wraps this; the replay test bites on it.
std::string run_report_body(const RunConfig& config, std::uint64_t seed);

/// Reads a state file: one "re im" amplitude pair per line, '#' comments.
linalg::Vector read_state_file(const std::string& path);

/// Resolves the effective output path against QBC_OUTPUT_DIR.
std::string resolve_output_path(const std::string& path);

}  // namespace qbc::cli
