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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbc/proto/script.hpp"
#include "qbc/rng.hpp"

namespace qbc::proto {

enum class Mode { Honest, CheatAlice, CheatBob };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct ExecOptions {
  std::uint64_t seed = 0;
  Mode mode = Mode::Honest;
  int commit_bit = 0;
  /// Reveal 1 - commit_bit instead of commit_bit. Implied by CheatAlice.
  bool flip_reveal = false;
};

/// One classical broadcast.
struct Message {
  int step_index = -1;
  Party party = Party::Alice;
  std::string kind;  // "outcome" | "commit-indices" | "reveal"
  std::string id;    // outcome: the announced record id
  std::string value;
  std::vector<int> indices;                        // commit-indices payload
  std::vector<std::pair<int, std::string>> pairs;  // reveal proof payload
};

/// Complete, replayable execution record: same script + same options
/// reproduce it bit for bit.
struct Transcript {
  std::uint64_t seed = 0;
  Mode mode = Mode::Honest;
  int commit_bit = 0;
  bool flip_reveal = false;
  std::map<std::string, engine::MeasurementRecord> records;
  std::map<std::string, int> choices;
  std::vector<Message> messages;
  std::vector<engine::Register> final_registers;
  std::optional<bool> verdict;
};

/// Runs a script. Cheating modes first purify the script for the cheating
/// party (unless it is already purified for them); honest Choose/Measure
/// steps sample from per-party streams derived from the seed.
Transcript execute(const ProtocolScript& script, const ExecOptions& opts);

}  // namespace qbc::proto
