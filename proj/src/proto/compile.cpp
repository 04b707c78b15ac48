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

#include "qbc/proto/compile.hpp"

#include <set>

#include "qbc/linalg.hpp"

namespace qbc::proto {

namespace {

// Concrete unitary for an action, extended with an identity on the shared
// pointer when one exists but the action does not measure.
Matrix action_unitary(const ProtocolScript& script, const Action& action, Index pointer_dim) {
  if (action.kind == Action::Kind::Measure) {
    return engine::measurement_unitary(script.observable(action.op));
  }
  const Matrix& u = script.unitary(action.op);
  if (pointer_dim > 0) {
    return linalg::tensor_product(u, Matrix::Identity(pointer_dim, pointer_dim));
  }
  return u;
}

}  // namespace

PurifyResult purify(const ProtocolScript& script, Party party) {
  PurifyResult result;
  result.script = script;
  result.script.steps.clear();
  result.script.purified_for = party;

  // Record ids the party produced through a shared choice pointer whose
  // outcome labels differ across branches; announcing those forces the die.
  std::set<std::string> label_ambiguous_records;

  for (std::size_t idx = 0; idx < script.steps.size(); ++idx) {
    const Step& step = script.steps[idx];

    if (const auto* measure = std::get_if<MeasureStep>(&step); measure && measure->party == party) {
      PurifiedMeasureStep out;
      out.party = party;
      out.obs = measure->action.op;
      out.targets = measure->action.targets;
      out.pointer = measure->action.record_id;
      out.outcome_labels = script.observable(out.obs).outcomes();
      result.script.steps.emplace_back(std::move(out));
      continue;
    }

    if (const auto* choose = std::get_if<ChooseStep>(&step); choose && choose->party == party) {
      PurifiedChoiceStep out;
      out.party = party;
      out.die = choose->choice_id;
      out.weights = choose->weights;

      Index pointer_dim = 0;
      for (const Action& branch : choose->branches) {
        if (branch.kind == Action::Kind::Measure) {
          pointer_dim = script.observable(branch.op).outcome_count();
          out.pointer_record = branch.record_id;
        }
      }
      std::vector<std::string> targets = choose->branches.front().targets;
      if (pointer_dim > 0) {
        out.pointer = SubsystemDecl{out.pointer_record, pointer_dim, party};
        targets.push_back(out.pointer_record);
      }
      for (const Action& branch : choose->branches) {
        out.branches.push_back({action_unitary(script, branch, pointer_dim), targets});
        out.branch_names.push_back(branch.op);
        if (branch.kind == Action::Kind::Measure) {
          out.branch_outcome_labels.push_back(script.observable(branch.op).outcomes());
        } else {
          out.branch_outcome_labels.push_back({});
        }
      }
      // Do all measuring branches agree on the outcome labels?
      bool uniform = true;
      const std::vector<std::string>* reference = nullptr;
      for (const auto& labels : out.branch_outcome_labels) {
        if (labels.empty()) {
          uniform = false;
          continue;
        }
        if (!reference) {
          reference = &labels;
        } else if (labels != *reference) {
          uniform = false;
        }
      }
      if (pointer_dim > 0 && !uniform) label_ambiguous_records.insert(out.pointer_record);
      result.script.steps.emplace_back(std::move(out));
      continue;
    }

    if (const auto* cond = std::get_if<ConditionalStep>(&step); cond && cond->party == party) {
      PurifiedConditionalStep out;
      out.party = party;
      out.controls = cond->controls;

      Index pointer_dim = 0;
      for (const auto& [key, action] : cond->cases) {
        if (action.kind == Action::Kind::Measure) {
          pointer_dim = script.observable(action.op).outcome_count();
          out.pointer_record = action.record_id;
        }
      }
      out.targets = cond->cases.front().second.targets;
      if (pointer_dim > 0) {
        out.pointer = SubsystemDecl{out.pointer_record, pointer_dim, party};
        out.targets.push_back(out.pointer_record);
      }
      bool uniform = true;
      const std::vector<std::string>* reference = nullptr;
      for (const auto& [key, action] : cond->cases) {
        out.cases.emplace_back(key, action_unitary(script, action, pointer_dim));
        out.case_names.push_back(action.op);
        if (action.kind == Action::Kind::Measure) {
          out.case_outcome_labels.push_back(script.observable(action.op).outcomes());
          if (!reference) {
            reference = &out.case_outcome_labels.back();
          } else if (out.case_outcome_labels.back() != *reference) {
            uniform = false;
          }
        } else {
          out.case_outcome_labels.push_back({});
          uniform = false;
        }
      }
      if (pointer_dim > 0 && !uniform) label_ambiguous_records.insert(out.pointer_record);
      result.script.steps.emplace_back(std::move(out));
      continue;
    }

    if (const auto* announce = std::get_if<AnnounceStep>(&step);
        announce && announce->party == party && announce->payload == "outcome") {
      if (!announce->args.empty() && label_ambiguous_records.count(announce->args.front())) {
        result.notes.push_back(
            {idx, "announcing '" + announce->args.front() +
                      "' discloses the branch; the die collapses at the announce point"});
      }
      result.script.steps.push_back(step);
      continue;
    }

    result.script.steps.push_back(step);
  }
  return result;
}

}  // namespace qbc::proto
