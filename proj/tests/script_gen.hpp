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
// Random protocol scripts for the audit and undetectability properties.

#pragma once

#include "oracles.hpp"
#include "qbc/proto/script.hpp"

namespace qbc::testing {

using proto::Action;
using proto::ChooseStep;
using proto::ConditionalStep;
using proto::MeasureStep;
using proto::PrepareStep;
using proto::ProtocolScript;
using proto::SendStep;
using engine::Party;

// A random two-party script on a two-qubit channel: Alice prepares a random
// entangled pair and sends half to Bob; Bob defers a random spin choice,
// optionally acts on the particle conditioned on his own record, optionally
// returns it; Alice may measure her half. Total purified dimension <= 64.
inline ProtocolScript random_audit_script(RandomStream& rng) {
  ProtocolScript s = ProtocolScript::with_builtins();
  s.subsystems.push_back({"a0", 2, Party::Alice});
  s.subsystems.push_back({"c0", 2, Party::Alice});
  s.states["init"] = random_state(rng, 4);

  s.steps.emplace_back(PrepareStep{Party::Alice, "init", {"a0", "c0"}, -1});
  s.steps.emplace_back(SendStep{"c0", Party::Alice, Party::Bob});

  static const std::array<const char*, 3> all_axes{"sx", "sy", "sz"};
  std::size_t branch_count = 2 + rng.below(2);
  std::size_t skip = rng.below(3);
  ChooseStep choose;
  choose.party = Party::Bob;
  choose.choice_id = "w0";
  double total = 0.0;
  std::vector<double> raw;
  for (std::size_t k = 0, used = 0; k < 3 && used < branch_count; ++k) {
    if (branch_count == 2 && k == skip) continue;
    Action branch;
    branch.kind = Action::Kind::Measure;
    branch.op = all_axes[k];
    branch.targets = {"c0"};
    branch.record_id = "m0";
    choose.branches.push_back(std::move(branch));
    raw.push_back(0.2 + rng.uniform());
    total += raw.back();
    ++used;
  }
  for (double w : raw) choose.weights.push_back(w / total);
  // Exact unit sum for the last weight.
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < choose.weights.size(); ++k) sum += choose.weights[k];
  choose.weights.back() = 1.0 - sum;
  s.steps.emplace_back(std::move(choose));

  if (rng.below(2) == 0) {
    ConditionalStep cond;
    cond.party = Party::Bob;
    cond.controls = {"m0"};
    cond.cases.emplace_back(std::vector<linalg::Index>{0},
                            Action{Action::Kind::Apply, "H", {"c0"}, ""});
    cond.cases.emplace_back(std::vector<linalg::Index>{1},
                            Action{Action::Kind::Apply, rng.below(2) ? "X" : "Z", {"c0"}, ""});
    s.steps.emplace_back(std::move(cond));
  }
  if (rng.below(2) == 0) {
    s.steps.emplace_back(SendStep{"c0", Party::Bob, Party::Alice});
  }
  if (rng.below(2) == 0) {
    MeasureStep am;
    am.party = Party::Alice;
    am.action = {Action::Kind::Measure, all_axes[rng.below(3)], {"a0"}, "am0"};
    s.steps.emplace_back(std::move(am));
  }
  return s;
}

}  // namespace qbc::testing
