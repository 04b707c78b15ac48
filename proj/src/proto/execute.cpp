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

#include "qbc/proto/execute.hpp"

#include <algorithm>
#include <set>

#include "qbc/abl.hpp"
#include "qbc/proto/compile.hpp"

namespace qbc::proto {

using engine::MeasurementRecord;
using engine::Register;
using engine::Subsystem;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Honest: return "honest";
    case Mode::CheatAlice: return "cheat:alice";
    case Mode::CheatBob: return "cheat:bob";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "honest") return Mode::Honest;
  if (s == "cheat:alice") return Mode::CheatAlice;
  if (s == "cheat:bob") return Mode::CheatBob;
  throw LookupError("unknown mode '" + s + "' (expected honest, cheat:alice or cheat:bob)");
}

namespace {

// ---------------------------------------------------------------------------
// Register forest: registers merge lazily when an operation couples them, so
// independent protocol rounds never blow up the joint dimension.
// ---------------------------------------------------------------------------

class Forest {
 public:
  bool contains(const std::string& label) const { return where_.count(label) > 0; }

  void add(Register reg) {
    std::size_t slot = components_.size();
    for (const auto& sub : reg.subsystems()) {
      if (contains(sub.label)) throw LookupError("subsystem '" + sub.label + "' already exists");
      where_[sub.label] = slot;
    }
    components_.emplace_back(std::move(reg));
  }

  std::size_t component_of(const std::string& label) const {
    auto it = where_.find(label);
    if (it == where_.end()) throw LookupError("subsystem '" + label + "' has not been prepared");
    return it->second;
  }

  /// Merges the components holding the labels; returns the merged slot.
  std::size_t ensure_merged(const std::vector<std::string>& labels) {
    if (labels.empty()) throw ShapeError("no labels to merge");
    std::vector<std::size_t> slots;
    for (const auto& label : labels) {
      std::size_t s = component_of(label);
      if (std::find(slots.begin(), slots.end(), s) == slots.end()) slots.push_back(s);
    }
    std::sort(slots.begin(), slots.end());
    std::size_t target = slots.front();
    for (std::size_t i = 1; i < slots.size(); ++i) {
      Register merged = engine::tensor(*components_[target], *components_[slots[i]]);
      components_[slots[i]].reset();
      components_[target] = std::move(merged);
      for (const auto& sub : components_[target]->subsystems()) where_[sub.label] = target;
    }
    return target;
  }

  Register& at(std::size_t slot) { return *components_[slot]; }

  void replace(std::size_t slot, Register reg) {
    components_[slot] = std::move(reg);
    for (const auto& sub : components_[slot]->subsystems()) where_[sub.label] = slot;
  }

  std::vector<Register> harvest() const {
    std::vector<Register> out;
    for (const auto& c : components_) {
      if (c.has_value()) out.push_back(*c);
    }
    return out;
  }

 private:
  std::vector<std::optional<Register>> components_;
  std::map<std::string, std::size_t> where_;
};

// Ancilla bookkeeping: which die/pointer carries which deferred value.
struct AncillaInfo {
  enum class Type { Die, Pointer } type = Type::Pointer;
  Party party = Party::Bob;
  std::vector<std::string> branch_names;  // die: op of each branch

  std::string obs_name;                    // standalone pointer
  std::vector<std::string> fixed_labels;   // standalone pointer outcomes
  std::string choice_id;                   // pointer owned by a choose
  std::vector<std::vector<std::string>> per_branch_labels;
  std::vector<std::string> controls;       // pointer owned by a conditional
  std::vector<std::vector<Index>> case_keys;
  std::vector<std::vector<std::string>> case_labels;
  std::vector<std::string> case_names;
};

int round_of(const std::string& id) {
  // VAA record ids are m<i>, r<i>, w<i>.
  return std::stoi(id.substr(1));
}

// ---------------------------------------------------------------------------
// Executor
// ---------------------------------------------------------------------------

class Executor {
 public:
  Executor(const ProtocolScript& script, const ExecOptions& opts)
      : script_(script),
        opts_(opts),
        alice_rng_(RandomStream::derive(opts.seed, "alice")),
        bob_rng_(RandomStream::derive(opts.seed, "bob")) {
    transcript_.seed = opts.seed;
    transcript_.mode = opts.mode;
    transcript_.commit_bit = opts.commit_bit;
    transcript_.flip_reveal = opts.flip_reveal || opts.mode == Mode::CheatAlice;
    for (const auto& step : script.steps) {
      if (const auto* choose = std::get_if<ChooseStep>(&step)) {
        std::vector<std::string> names;
        for (const auto& b : choose->branches) names.push_back(b.op);
        choice_names_[choose->choice_id] = std::move(names);
      } else if (const auto* pc = std::get_if<PurifiedChoiceStep>(&step)) {
        choice_names_[pc->die] = pc->branch_names;
      }
    }
  }

  Transcript run() {
    for (step_ = 0; step_ < script_.steps.size(); ++step_) {
      try {
        std::visit([this](const auto& s) { this->on(s); }, script_.steps[step_]);
      } catch (const ExecutionError&) {
        throw;
      } catch (const Error& e) {
        throw ExecutionError(static_cast<int>(step_), e.what());
      }
    }
    transcript_.final_registers = forest_.harvest();
    return std::move(transcript_);
  }

 private:
  RandomStream& stream(Party p) { return p == Party::Alice ? alice_rng_ : bob_rng_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ExecutionError(static_cast<int>(step_), what);
  }

  void check_holds(Party party, const Register& reg, const std::vector<std::string>& labels) {
    for (const auto& label : labels) {
      if (reg.subsystem(label).owner != party) {
        fail("party " + engine::to_string(party) + " does not hold '" + label + "'");
      }
    }
  }

  // ------------------------------------------------------------------
  // Honest steps
  // ------------------------------------------------------------------

  void on(const PrepareStep& s) {
    if (s.commit_condition >= 0 && s.commit_condition != opts_.commit_bit) return;
    std::vector<Subsystem> subs;
    std::vector<Index> dims;
    for (const auto& label : s.targets) {
      const SubsystemDecl& decl = script_.subsystem(label);
      if (decl.owner != s.party) fail("prepare on a subsystem " + label + " not owned by the party");
      subs.push_back({decl.label, decl.dim, decl.owner});
      dims.push_back(decl.dim);
    }
    linalg::StateVector state(dims, script_.state(s.state));
    forest_.add(Register(std::move(state), std::move(subs)));
  }

  void on(const SendStep& s) {
    std::size_t slot = forest_.component_of(s.subsystem);
    Register& reg = forest_.at(slot);
    if (reg.subsystem(s.subsystem).owner != s.from) {
      fail("'" + s.subsystem + "' is not held by " + engine::to_string(s.from));
    }
    forest_.replace(slot, reg.with_owner(s.subsystem, s.to));
  }

  void run_action(Party party, const Action& action) {
    std::size_t slot = forest_.ensure_merged(action.targets);
    Register& reg = forest_.at(slot);
    check_holds(party, reg, action.targets);
    if (action.kind == Action::Kind::Apply) {
      forest_.replace(slot, engine::apply_unitary(reg, script_.unitary(action.op), action.targets));
    } else {
      auto [collapsed, rec] =
          engine::measure_projective(reg, script_.observable(action.op), action.targets,
                                     stream(party));
      forest_.replace(slot, std::move(collapsed));
      transcript_.records[action.record_id] = rec;
    }
  }

  void on(const ApplyStep& s) {
    if (s.commit_condition >= 0 && s.commit_condition != opts_.commit_bit) return;
    run_action(s.party, s.action);
  }

  void on(const MeasureStep& s) { run_action(s.party, s.action); }

  void on(const ChooseStep& s) {
    std::size_t k = stream(s.party).sample(s.weights);
    transcript_.choices[s.choice_id] = static_cast<int>(k);
    run_action(s.party, s.branches[k]);
  }

  void on(const ConditionalStep& s) {
    std::vector<Index> values;
    for (const auto& control : s.controls) values.push_back(control_value(control));
    for (const auto& [key, action] : s.cases) {
      if (key == values) {
        run_action(s.party, action);
        return;
      }
    }
    fail("no case matches the recorded control values");
  }

  Index control_value(const std::string& id) {
    if (auto it = transcript_.choices.find(id); it != transcript_.choices.end()) {
      return it->second;
    }
    if (auto it = transcript_.records.find(id); it != transcript_.records.end()) {
      return it->second.outcome_index;
    }
    fail("control '" + id + "' has no recorded value");
  }

  // ------------------------------------------------------------------
  // Purified steps
  // ------------------------------------------------------------------

  void on(const PurifiedMeasureStep& s) {
    std::size_t slot = forest_.ensure_merged(s.targets);
    Register& reg = forest_.at(slot);
    check_holds(s.party, reg, s.targets);
    forest_.replace(slot, engine::purify_measurement(reg, script_.observable(s.obs), s.targets,
                                                     s.pointer, s.party));
    AncillaInfo info;
    info.type = AncillaInfo::Type::Pointer;
    info.party = s.party;
    info.obs_name = s.obs;
    info.fixed_labels = s.outcome_labels;
    ledger_[s.pointer] = std::move(info);
  }

  void on(const PurifiedChoiceStep& s) {
    std::vector<std::string> channel_targets = s.branches.front().targets;
    if (s.pointer) channel_targets.pop_back();  // pointer appended below
    if (channel_targets.empty()) fail("choice has no channel targets");
    std::size_t slot = forest_.ensure_merged(channel_targets);
    Register& reg = forest_.at(slot);
    check_holds(s.party, reg, channel_targets);
    Register staged = reg;
    if (s.pointer) {
      Vector p0 = Vector::Zero(s.pointer->dim);
      p0(0) = 1.0;
      staged = engine::append_subsystem(staged, {s.pointer->label, s.pointer->dim, s.party}, p0);
    }
    staged = engine::purify_choice(staged, s.branches, s.weights, s.die, s.party);
    forest_.replace(slot, std::move(staged));

    AncillaInfo die;
    die.type = AncillaInfo::Type::Die;
    die.party = s.party;
    die.branch_names = s.branch_names;
    ledger_[s.die] = std::move(die);
    if (s.pointer) {
      AncillaInfo ptr;
      ptr.type = AncillaInfo::Type::Pointer;
      ptr.party = s.party;
      ptr.choice_id = s.die;
      ptr.per_branch_labels = s.branch_outcome_labels;
      ledger_[s.pointer->label] = std::move(ptr);
    }
  }

  void on(const PurifiedConditionalStep& s) {
    std::vector<std::string> channel_targets = s.targets;
    if (s.pointer) channel_targets.pop_back();
    std::vector<std::string> all = s.controls;
    all.insert(all.end(), channel_targets.begin(), channel_targets.end());
    std::size_t slot = forest_.ensure_merged(all);
    Register& reg = forest_.at(slot);
    check_holds(s.party, reg, channel_targets);
    Register staged = reg;
    if (s.pointer) {
      Vector p0 = Vector::Zero(s.pointer->dim);
      p0(0) = 1.0;
      staged = engine::append_subsystem(staged, {s.pointer->label, s.pointer->dim, s.party}, p0);
    }
    std::map<std::vector<Index>, Matrix> table;
    for (const auto& [key, mat] : s.cases) table[key] = mat;
    staged = engine::purify_conditional(staged, s.controls, table, s.targets);
    forest_.replace(slot, std::move(staged));
    if (s.pointer) {
      AncillaInfo ptr;
      ptr.type = AncillaInfo::Type::Pointer;
      ptr.party = s.party;
      ptr.controls = s.controls;
      for (const auto& [key, mat] : s.cases) ptr.case_keys.push_back(key);
      ptr.case_labels = s.case_outcome_labels;
      ptr.case_names = s.case_names;
      ledger_[s.pointer->label] = std::move(ptr);
    }
  }

  // ------------------------------------------------------------------
  // Deferred readout: measuring an ancilla the moment its classical value
  // is first needed.
  // ------------------------------------------------------------------

  int ensure_choice(const std::string& id) {
    if (auto it = transcript_.choices.find(id); it != transcript_.choices.end()) return it->second;
    auto ledger_it = ledger_.find(id);
    if (ledger_it == ledger_.end() || ledger_it->second.type != AncillaInfo::Type::Die) {
      fail("choice '" + id + "' has no recorded value and no die ancilla");
    }
    const AncillaInfo& info = ledger_it->second;
    std::size_t slot = forest_.component_of(id);
    Register& reg = forest_.at(slot);
    Index dim = reg.subsystem(id).dim;
    auto [collapsed, rec] = engine::measure_projective(
        reg, engine::computational_basis(id, dim, info.branch_names), {id}, stream(info.party));
    forest_.replace(slot, std::move(collapsed));
    transcript_.choices[id] = static_cast<int>(rec.outcome_index);
    return static_cast<int>(rec.outcome_index);
  }

  const MeasurementRecord& ensure_record(const std::string& id) {
    if (auto it = transcript_.records.find(id); it != transcript_.records.end()) return it->second;
    auto ledger_it = ledger_.find(id);
    if (ledger_it == ledger_.end()) fail("record '" + id + "' was never produced");
    const AncillaInfo& info = ledger_it->second;
    if (info.type != AncillaInfo::Type::Pointer) fail("'" + id + "' is not a measurement record");

    std::vector<std::string> labels = info.fixed_labels;
    std::string obs_name = info.obs_name;
    if (labels.empty() && !info.choice_id.empty()) {
      // Pointer shared by the branches of a choice.
      bool uniform = true;
      const std::vector<std::string>* reference = nullptr;
      for (const auto& branch_labels : info.per_branch_labels) {
        if (branch_labels.empty()) {
          uniform = false;
        } else if (!reference) {
          reference = &branch_labels;
        } else if (branch_labels != *reference) {
          uniform = false;
        }
      }
      if (uniform && reference) {
        labels = *reference;
        obs_name = "deferred";
      } else {
        int k = ensure_choice(info.choice_id);
        labels = info.per_branch_labels[static_cast<std::size_t>(k)];
        obs_name = choice_names_.at(info.choice_id)[static_cast<std::size_t>(k)];
        if (labels.empty()) {
          fail("the taken branch of '" + info.choice_id + "' produced no record '" + id + "'");
        }
      }
    } else if (labels.empty() && !info.controls.empty()) {
      // Pointer shared by the cases of a conditional.
      std::vector<Index> values;
      for (const auto& control : info.controls) {
        if (ledger_.count(control) && ledger_.at(control).type == AncillaInfo::Type::Die) {
          values.push_back(ensure_choice(control));
        } else if (ledger_.count(control)) {
          values.push_back(ensure_record(control).outcome_index);
        } else {
          values.push_back(control_value(control));
        }
      }
      bool found = false;
      for (std::size_t k = 0; k < info.case_keys.size(); ++k) {
        if (info.case_keys[k] == values) {
          labels = info.case_labels[k];
          obs_name = info.case_names[k];
          found = true;
          break;
        }
      }
      if (!found || labels.empty()) {
        fail("the selected case produced no record '" + id + "'");
      }
    }
    if (labels.empty()) fail("cannot resolve outcome labels for '" + id + "'");

    std::size_t slot = forest_.component_of(id);
    Register& reg = forest_.at(slot);
    auto [collapsed, rec] = engine::measure_projective(
        reg, engine::computational_basis(id, reg.subsystem(id).dim, labels), {id},
        stream(info.party));
    forest_.replace(slot, std::move(collapsed));
    rec.observable = obs_name;
    rec.subsystem = id;
    auto [stored, inserted] = transcript_.records.emplace(id, std::move(rec));
    (void)inserted;
    return stored->second;
  }

  // ------------------------------------------------------------------
  // Classical steps
  // ------------------------------------------------------------------

  void on(const AnnounceStep& s) {
    Message msg;
    msg.step_index = static_cast<int>(step_);
    msg.party = s.party;
    if (s.payload == "outcome") {
      const std::string& id = s.args.front();
      msg.kind = "outcome";
      msg.id = id;
      if (transcript_.choices.count(id) ||
          (ledger_.count(id) && ledger_.at(id).type == AncillaInfo::Type::Die)) {
        int k = ensure_choice(id);
        msg.value = choice_names_.at(id)[static_cast<std::size_t>(k)];
      } else {
        msg.value = ensure_record(id).outcome;
      }
    } else if (s.payload == "vaa-commit") {
      msg = vaa_commit_message();
      msg.step_index = static_cast<int>(step_);
      msg.party = s.party;
    } else {
      fail("unknown announce payload '" + s.payload + "'");
    }
    transcript_.messages.push_back(std::move(msg));
  }

  void on(const RevealStep& s) {
    int announced = transcript_.flip_reveal ? 1 - opts_.commit_bit : opts_.commit_bit;
    Message msg;
    msg.step_index = static_cast<int>(step_);
    msg.party = Party::Alice;
    msg.kind = "reveal";
    msg.value = std::to_string(announced);
    if (s.proof == "vaa-proof") {
      msg.pairs = vaa_proof_pairs(announced);
    } else if (!s.proof.empty()) {
      fail("unknown proof payload '" + s.proof + "'");
    }
    transcript_.messages.push_back(std::move(msg));
  }

  void on(const VerifyStep& s) {
    bool ok = false;
    if (s.predicate == "vaa-accept") {
      ok = vaa_accept();
    } else if (s.predicate == "outcome-equals") {
      if (s.args.size() != 2) fail("outcome-equals needs a record id and a label");
      ok = ensure_record(s.args[0]).outcome == s.args[1];
    } else {
      fail("unknown verify predicate '" + s.predicate + "'");
    }
    transcript_.verdict = transcript_.verdict.value_or(true) && ok;
  }

  // ------------------------------------------------------------------
  // VAA commitment logic. Round i uses ids m<i> (spin record), w<i>
  // (choice), r<i> (R record).
  // ------------------------------------------------------------------

  std::vector<int> vaa_up_rounds() const {
    std::vector<int> up;
    for (const auto& msg : transcript_.messages) {
      if (msg.kind == "outcome" && !msg.id.empty() && msg.id[0] == 'm' && msg.value == "up") {
        up.push_back(round_of(msg.id));
      }
    }
    std::sort(up.begin(), up.end());
    return up;
  }

  Message vaa_commit_message() {
    Message msg;
    msg.kind = "commit-indices";
    std::vector<int> member;
    for (int i : vaa_up_rounds()) {
      const MeasurementRecord& r = ensure_record("r" + std::to_string(i));
      bool in_s1 = (r.outcome == "r1");
      // Bit 0 announces the complement of S1; bit 1 announces S1.
      if ((opts_.commit_bit == 0 && !in_s1) || (opts_.commit_bit == 1 && in_s1)) {
        member.push_back(i);
      }
    }
    msg.indices = std::move(member);
    return msg;
  }

  const Message* find_message(const std::string& kind) const {
    for (const auto& msg : transcript_.messages) {
      if (msg.kind == kind) return &msg;
    }
    return nullptr;
  }

  // The sigma label Alice can infer for an up-announced round from her R
  // outcome: the unique axis whose table row shows "up". Row r1 supports
  // all axes: no inference is possible and she must guess.
  std::string infer_sigma(const std::string& r_outcome, RandomStream& rng) const {
    static const std::array<std::string, 3> axes{"sx", "sy", "sz"};
    if (r_outcome == "r1") {
      return axes[rng.below(3)];
    }
    int row = r_outcome[1] - '1';
    const abl::VaaTable& table = abl::vaa_reference_table();
    for (int axis = 0; axis < 3; ++axis) {
      if (table[static_cast<std::size_t>(row)][static_cast<std::size_t>(axis)] == "up") {
        return axes[static_cast<std::size_t>(axis)];
      }
    }
    throw DomainError("no axis is consistent with '" + r_outcome + "'");
  }

  std::vector<std::pair<int, std::string>> vaa_proof_pairs(int announced_bit) {
    const Message* commit = find_message("commit-indices");
    if (!commit) fail("reveal before the commitment announcement");
    std::vector<int> up = vaa_up_rounds();
    std::vector<int> proof_set;
    if (announced_bit == 0) {
      proof_set = commit->indices;
    } else {
      std::set<int> announced(commit->indices.begin(), commit->indices.end());
      for (int i : up) {
        if (!announced.count(i)) proof_set.push_back(i);
      }
    }
    std::vector<std::pair<int, std::string>> pairs;
    for (int i : proof_set) {
      const MeasurementRecord& r = ensure_record("r" + std::to_string(i));
      pairs.emplace_back(i, infer_sigma(r.outcome, stream(Party::Alice)));
    }
    return pairs;
  }

  bool vaa_accept() {
    const Message* commit = find_message("commit-indices");
    const Message* reveal = find_message("reveal");
    if (!commit || !reveal) fail("verification before commit/reveal");
    std::vector<int> up = vaa_up_rounds();
    std::set<int> up_set(up.begin(), up.end());
    for (int i : commit->indices) {
      if (!up_set.count(i)) return false;  // announced an index Bob never confirmed
    }
    int announced_bit = std::stoi(reveal->value);
    std::vector<int> expected;
    if (announced_bit == 0) {
      expected = commit->indices;
    } else {
      std::set<int> announced(commit->indices.begin(), commit->indices.end());
      for (int i : up) {
        if (!announced.count(i)) expected.push_back(i);
      }
    }
    if (reveal->pairs.size() != expected.size()) return false;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (reveal->pairs[k].first != expected[k]) return false;
      int choice = ensure_choice("w" + std::to_string(expected[k]));
      const std::string& actual =
          choice_names_.at("w" + std::to_string(expected[k]))[static_cast<std::size_t>(choice)];
      if (reveal->pairs[k].second != actual) return false;
    }
    return true;
  }

  const ProtocolScript& script_;
  ExecOptions opts_;
  RandomStream alice_rng_;
  RandomStream bob_rng_;
  Forest forest_;
  Transcript transcript_;
  std::map<std::string, AncillaInfo> ledger_;
  std::map<std::string, std::vector<std::string>> choice_names_;
  std::size_t step_ = 0;
};

}  // namespace

Transcript execute(const ProtocolScript& script, const ExecOptions& opts) {
  ExecOptions effective = opts;
  if (opts.mode == Mode::CheatAlice) effective.flip_reveal = true;

  if (opts.mode == Mode::Honest || script.purified_for.has_value()) {
    return Executor(script, effective).run();
  }
  Party cheater = (opts.mode == Mode::CheatAlice) ? Party::Alice : Party::Bob;
  ProtocolScript purified = purify(script, cheater).script;
  return Executor(purified, effective).run();
}

}  // namespace qbc::proto
