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

#include "qbc/proto/vaa.hpp"

#include <algorithm>
#include <cmath>

#include "qbc/abl.hpp"
#include "qbc/proto/compile.hpp"

namespace qbc::proto {

using engine::Party;
using engine::Register;
using engine::Subsystem;
using linalg::Complex;
using linalg::DensityOperator;
using linalg::Index;
using linalg::Matrix;
using linalg::StateVector;
using linalg::Vector;

// ---------------------------------------------------------------------------
// Built-in scripts
// ---------------------------------------------------------------------------

ProtocolScript vaa_script(int rounds) {
  if (rounds < 1) throw DomainError("the protocol needs at least one round");
  ProtocolScript script = ProtocolScript::with_builtins();
  script.builtin = "vaa";
  script.rounds = rounds;

  for (int i = 1; i <= rounds; ++i) {
    std::string a = "a" + std::to_string(i);
    std::string c = "c" + std::to_string(i);
    script.subsystems.push_back({a, 2, Party::Alice});
    script.subsystems.push_back({c, 2, Party::Alice});
  }
  for (int i = 1; i <= rounds; ++i) {
    std::string a = "a" + std::to_string(i);
    std::string c = "c" + std::to_string(i);
    std::string m = "m" + std::to_string(i);
    std::string w = "w" + std::to_string(i);
    std::string r = "r" + std::to_string(i);

    script.steps.emplace_back(PrepareStep{Party::Alice, "bell", {a, c}, -1});
    script.steps.emplace_back(SendStep{c, Party::Alice, Party::Bob});
    ChooseStep choose;
    choose.party = Party::Bob;
    choose.choice_id = w;
    for (const char* obs : {"sx", "sy", "sz"}) {
      Action branch;
      branch.kind = Action::Kind::Measure;
      branch.op = obs;
      branch.targets = {c};
      branch.record_id = m;
      choose.branches.push_back(std::move(branch));
    }
    choose.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    script.steps.emplace_back(std::move(choose));
    script.steps.emplace_back(SendStep{c, Party::Bob, Party::Alice});
    MeasureStep measure_r;
    measure_r.party = Party::Alice;
    measure_r.action = {Action::Kind::Measure, "R", {a, c}, r};
    script.steps.emplace_back(std::move(measure_r));
  }
  for (int i = 1; i <= rounds; ++i) {
    script.steps.emplace_back(AnnounceStep{Party::Bob, "outcome", {"m" + std::to_string(i)}});
  }
  script.steps.emplace_back(AnnounceStep{Party::Alice, "vaa-commit", {}});
  script.steps.emplace_back(RevealStep{"vaa-proof"});
  script.steps.emplace_back(VerifyStep{Party::Bob, "vaa-accept", {}});
  return script;
}

std::string vaa_source(int rounds) { return to_source(vaa_script(rounds)); }

ProtocolScript epr_script() {
  ProtocolScript script = ProtocolScript::with_builtins();
  script.builtin = "epr";
  script.rounds = 1;
  script.subsystems.push_back({"a1", 2, Party::Alice});
  script.subsystems.push_back({"c1", 2, Party::Alice});
  script.steps.emplace_back(PrepareStep{Party::Alice, "bell", {"a1", "c1"}, -1});
  script.steps.emplace_back(SendStep{"c1", Party::Alice, Party::Bob});
  // The commitment only acts on Alice's ancilla: Bob's marginal cannot
  // depend on the bit.
  ApplyStep mark;
  mark.party = Party::Alice;
  mark.action = {Action::Kind::Apply, "X", {"a1"}, ""};
  mark.commit_condition = 1;
  script.steps.emplace_back(std::move(mark));
  script.steps.emplace_back(RevealStep{""});
  return script;
}

ProtocolScript builtin_script(const std::string& name, int rounds) {
  if (name == "vaa") return vaa_script(rounds);
  if (name == "epr") return epr_script();
  throw LookupError("unknown built-in protocol '" + name + "' (available: vaa, epr)");
}

// ---------------------------------------------------------------------------
// Fully purified quantum-phase run
// ---------------------------------------------------------------------------

std::vector<Register> run_purified(const ProtocolScript& script, int commit_bit) {
  ProtocolScript doubly = purify(purify(script, Party::Bob).script, Party::Alice).script;

  // A miniature unitary-only executor: no randomness, no classical phase.
  std::vector<std::optional<Register>> comps;
  std::map<std::string, std::size_t> where;

  auto merged = [&](const std::vector<std::string>& labels) {
    std::vector<std::size_t> slots;
    for (const auto& l : labels) {
      auto it = where.find(l);
      if (it == where.end()) throw LookupError("subsystem '" + l + "' has not been prepared");
      if (std::find(slots.begin(), slots.end(), it->second) == slots.end()) {
        slots.push_back(it->second);
      }
    }
    std::sort(slots.begin(), slots.end());
    std::size_t target = slots.front();
    for (std::size_t i = 1; i < slots.size(); ++i) {
      Register joined = engine::tensor(*comps[target], *comps[slots[i]]);
      comps[slots[i]].reset();
      comps[target] = std::move(joined);
      for (const auto& sub : comps[target]->subsystems()) where[sub.label] = target;
    }
    return target;
  };
  auto replace = [&](std::size_t slot, Register reg) {
    comps[slot] = std::move(reg);
    for (const auto& sub : comps[slot]->subsystems()) where[sub.label] = slot;
  };

  for (const Step& step : doubly.steps) {
    if (const auto* prep = std::get_if<PrepareStep>(&step)) {
      if (prep->commit_condition >= 0 && prep->commit_condition != commit_bit) continue;
      std::vector<Subsystem> subs;
      std::vector<Index> dims;
      for (const auto& label : prep->targets) {
        const SubsystemDecl& decl = doubly.subsystem(label);
        subs.push_back({decl.label, decl.dim, decl.owner});
        dims.push_back(decl.dim);
      }
      std::size_t slot = comps.size();
      comps.emplace_back(Register(StateVector(dims, doubly.state(prep->state)), subs));
      for (const auto& sub : comps.back()->subsystems()) where[sub.label] = slot;
    } else if (const auto* send = std::get_if<SendStep>(&step)) {
      std::size_t slot = where.at(send->subsystem);
      replace(slot, comps[slot]->with_owner(send->subsystem, send->to));
    } else if (const auto* apply = std::get_if<ApplyStep>(&step)) {
      if (apply->commit_condition >= 0 && apply->commit_condition != commit_bit) continue;
      std::size_t slot = merged(apply->action.targets);
      replace(slot, engine::apply_unitary(*comps[slot], doubly.unitary(apply->action.op),
                                          apply->action.targets));
    } else if (const auto* pm = std::get_if<PurifiedMeasureStep>(&step)) {
      std::size_t slot = merged(pm->targets);
      replace(slot, engine::purify_measurement(*comps[slot], doubly.observable(pm->obs),
                                               pm->targets, pm->pointer, pm->party));
    } else if (const auto* pc = std::get_if<PurifiedChoiceStep>(&step)) {
      std::vector<std::string> channel = pc->branches.front().targets;
      if (pc->pointer) channel.pop_back();
      std::size_t slot = merged(channel);
      Register staged = *comps[slot];
      if (pc->pointer) {
        Vector p0 = Vector::Zero(pc->pointer->dim);
        p0(0) = 1.0;
        staged = engine::append_subsystem(staged, {pc->pointer->label, pc->pointer->dim, pc->party},
                                          p0);
      }
      replace(slot, engine::purify_choice(staged, pc->branches, pc->weights, pc->die, pc->party));
    } else if (const auto* pcond = std::get_if<PurifiedConditionalStep>(&step)) {
      std::vector<std::string> channel = pcond->targets;
      if (pcond->pointer) channel.pop_back();
      std::vector<std::string> all = pcond->controls;
      all.insert(all.end(), channel.begin(), channel.end());
      std::size_t slot = merged(all);
      Register staged = *comps[slot];
      if (pcond->pointer) {
        Vector p0 = Vector::Zero(pcond->pointer->dim);
        p0(0) = 1.0;
        staged = engine::append_subsystem(
            staged, {pcond->pointer->label, pcond->pointer->dim, pcond->party}, p0);
      }
      std::map<std::vector<Index>, Matrix> table;
      for (const auto& [key, mat] : pcond->cases) table[key] = mat;
      replace(slot, engine::purify_conditional(staged, pcond->controls, table, pcond->targets));
    } else if (std::holds_alternative<AnnounceStep>(step) ||
               std::holds_alternative<RevealStep>(step) ||
               std::holds_alternative<VerifyStep>(step)) {
      continue;  // classical phase: not part of the quantum-state analysis
    } else {
      throw DomainError("script still contains an unpurified probabilistic step");
    }
  }

  std::vector<Register> out;
  for (auto& c : comps) {
    if (c.has_value()) out.push_back(std::move(*c));
  }
  return out;
}

std::vector<std::string> bob_ancilla_labels(const ProtocolScript& script) {
  ProtocolScript doubly = script;
  if (!script.purified_for.has_value()) {
    doubly = purify(purify(script, Party::Bob).script, Party::Alice).script;
  }
  std::vector<std::string> labels;
  for (const Step& step : doubly.steps) {
    if (const auto* pm = std::get_if<PurifiedMeasureStep>(&step)) {
      if (pm->party == Party::Bob) labels.push_back(pm->pointer);
    } else if (const auto* pc = std::get_if<PurifiedChoiceStep>(&step)) {
      if (pc->party == Party::Bob) {
        labels.push_back(pc->die);
        if (pc->pointer) labels.push_back(pc->pointer->label);
      }
    } else if (const auto* pcond = std::get_if<PurifiedConditionalStep>(&step)) {
      if (pcond->party == Party::Bob && pcond->pointer) labels.push_back(pcond->pointer->label);
    }
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Commitment states
// ---------------------------------------------------------------------------

namespace {

// Reorders a register so Alice's factors come first and returns the
// bipartite view.
struct Bipartition {
  StateVector state;
  Index dim_a = 1;
  Index dim_b = 1;
};

Bipartition alice_first(const Register& reg) {
  std::vector<std::string> order;
  Bipartition out{reg.state(), 1, 1};
  for (const auto& sub : reg.subsystems()) {
    if (sub.owner == Party::Alice) {
      order.push_back(sub.label);
      out.dim_a *= sub.dim;
    }
  }
  for (const auto& sub : reg.subsystems()) {
    if (sub.owner == Party::Bob) {
      order.push_back(sub.label);
      out.dim_b *= sub.dim;
    } else if (sub.owner == Party::Channel) {
      throw DomainError("subsystem '" + sub.label + "' is still in the channel at commit time");
    }
  }
  Register permuted = engine::permute_subsystems(reg, order);
  out.state = permuted.state();
  return out;
}

Matrix dephased_diagonal(const Matrix& m) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) out(i, i) = m(i, i);
  return out;
}

CommitmentStates vaa_commitment_states(Mode mode) {
  // One round carries the whole analysis: the n-particle operators are
  // tensor powers of the per-particle ones.
  Register reg = Register::ground({{"a", 2, Party::Alice}, {"c", 2, Party::Alice}});
  const double s = 1.0 / std::sqrt(2.0);
  Vector bell = Vector::Zero(4);
  bell(0) = s;
  bell(3) = s;
  reg = Register(StateVector({2, 2}, bell), reg.subsystems());

  // Bob holds the channel particle while he defers his measurement.
  reg = reg.with_owner("c", Party::Bob);
  Vector p0 = Vector::Zero(2);
  p0(0) = 1.0;
  reg = engine::append_subsystem(reg, {"p", 2, Party::Bob}, p0);
  std::vector<engine::ChoiceBranch> branches;
  for (const auto& obs : {engine::sigma_x(), engine::sigma_y(), engine::sigma_z()}) {
    branches.push_back({engine::measurement_unitary(obs), {"c", "p"}});
  }
  reg = engine::purify_choice(reg, branches, {1.0 / 3, 1.0 / 3, 1.0 / 3}, "d", Party::Bob);
  reg = reg.with_owner("c", Party::Alice);  // returned to Alice

  // Alice's R measurement, held at the quantum level so the commitment
  // branches stay pure.
  reg = engine::purify_measurement(reg, abl::VaaFixture::standard().r_observable(),
                                   std::vector<std::string>{"a", "c"}, "ra", Party::Alice);

  // Post-select Bob's "up" announcement.
  auto [up_reg, up_rec] =
      engine::project_outcome(reg, engine::computational_basis("pbasis", 2, {"up", "down"}), "p", 0);

  // Split on Alice's R record: r1 for the 1-commitment, the rest for 0.
  engine::ObservableSpec split("rsplit", Matrix::Identity(4, 4), {"r1", "rest", "rest", "rest"});
  auto [reg1, rec1] = engine::project_outcome(up_reg, split, "ra", 0);
  auto [reg0, rec0] = engine::project_outcome(up_reg, split, "ra", 1);

  Bipartition b0 = alice_first(reg0);
  Bipartition b1 = alice_first(reg1);

  Matrix die0 = engine::reduced_state(reg0, {"d"}).matrix();
  Matrix die1 = engine::reduced_state(reg1, {"d"}).matrix();
  if (mode != Mode::CheatBob) {
    // An honest chooser's record is classical: the die decoheres in its
    // basis and the proper mixture is what Bob actually holds.
    die0 = dephased_diagonal(die0);
    die1 = dephased_diagonal(die1);
  }
  DensityOperator w0(die0), w1(die1);
  double distance = linalg::trace_distance(w0, w1);
  return CommitmentStates{b0.state, b1.state, b0.dim_a, b0.dim_b,
                          std::move(w0), std::move(w1), distance};
}

}  // namespace

CommitmentStates commitment_states(const ProtocolScript& script, Mode mode) {
  bool has_reveal = false;
  for (const auto& step : script.steps) {
    if (std::holds_alternative<RevealStep>(step)) has_reveal = true;
  }
  if (!has_reveal) throw DomainError("commitment analysis requires a reveal step");

  if (script.builtin == "vaa") return vaa_commitment_states(mode);

  // Plain scripts: the whole commit phase must stay quantum.
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    if (std::holds_alternative<AnnounceStep>(script.steps[i])) {
      throw DomainError(
          "plain-script commitment analysis cannot post-select announcements; "
          "only the vaa built-in carries that structure");
    }
    if (std::holds_alternative<RevealStep>(script.steps[i])) break;
  }

  auto states_for = [&](int bit) {
    std::vector<Register> comps = run_purified(script, bit);
    if (comps.empty()) throw DomainError("the script prepares no quantum state");
    Register total = comps.front();
    for (std::size_t i = 1; i < comps.size(); ++i) total = engine::tensor(total, comps[i]);
    return alice_first(total);
  };
  Bipartition b0 = states_for(0);
  Bipartition b1 = states_for(1);
  if (b0.dim_a != b1.dim_a || b0.dim_b != b1.dim_b) {
    throw DomainError("the two commitment branches produce different register shapes");
  }

  auto bob_marginal = [&](const StateVector& psi) {
    Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
    return DensityOperator(linalg::partial_trace(rho, {b0.dim_a, b0.dim_b}, {1}));
  };
  DensityOperator w0 = bob_marginal(b0.state);
  DensityOperator w1 = bob_marginal(b1.state);
  double distance = linalg::trace_distance(w0, w1);
  return CommitmentStates{b0.state, b1.state, b0.dim_a, b0.dim_b,
                          std::move(w0), std::move(w1), distance};
}

// ---------------------------------------------------------------------------
// No-signalling audit
// ---------------------------------------------------------------------------

DensityOperator alice_marginal_after_measuring(const Register& reg,
                                               const std::vector<std::string>& bob_ancillas,
                                               std::optional<std::size_t> drop_branch) {
  std::vector<std::string> present;
  for (const auto& label : bob_ancillas) {
    if (reg.has(label)) present.push_back(label);
  }
  if (present.empty()) return engine::reduced_state(reg, Party::Alice);

  struct Branch {
    Register reg;
    double probability;
  };
  std::vector<Branch> branches{{reg, 1.0}};
  for (const auto& label : present) {
    std::vector<Branch> next;
    for (const auto& branch : branches) {
      Index dim = branch.reg.subsystem(label).dim;
      engine::ObservableSpec basis = engine::computational_basis(label + "-basis", dim);
      auto probs = engine::outcome_probabilities(branch.reg, basis, {label});
      for (Index k = 0; k < dim; ++k) {
        if (probs[static_cast<std::size_t>(k)] <= 1e-14) continue;
        auto [collapsed, rec] = engine::project_outcome(branch.reg, basis, {label}, k);
        next.push_back({std::move(collapsed), branch.probability * rec.probability});
      }
    }
    branches = std::move(next);
  }

  Index dim_a = engine::reduced_state(reg, Party::Alice).dim();
  Matrix average = Matrix::Zero(dim_a, dim_a);
  double total = 0.0;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    if (drop_branch && *drop_branch == k) continue;
    average += branches[k].probability *
               engine::reduced_state(branches[k].reg, Party::Alice).matrix();
    total += branches[k].probability;
  }
  if (total <= 0.0) throw DomainError("every branch was dropped from the average");
  return DensityOperator(average / total);
}

namespace {

// True when no step is gated on the commitment bit, so both commitment
// branches would run identically.
bool commit_free(const ProtocolScript& script) {
  for (const auto& step : script.steps) {
    if (const auto* prep = std::get_if<PrepareStep>(&step); prep && prep->commit_condition >= 0) {
      return false;
    }
    if (const auto* apply = std::get_if<ApplyStep>(&step); apply && apply->commit_condition >= 0) {
      return false;
    }
  }
  return true;
}

}  // namespace

NoSignallingReport audit_no_signalling(const ProtocolScript& script) {
  ProtocolScript doubly = script;
  if (!script.purified_for.has_value()) {
    doubly = purify(purify(script, Party::Bob).script, Party::Alice).script;
  }
  std::vector<std::string> ancillas = bob_ancilla_labels(doubly);

  NoSignallingReport report;
  for (int bit : {0, 1}) {
    std::vector<Register> comps = run_purified(script, bit);
    for (const Register& comp : comps) {
      bool has_alice = false, has_bob_ancilla = false;
      for (const auto& sub : comp.subsystems()) {
        if (sub.owner == Party::Alice) has_alice = true;
      }
      for (const auto& label : ancillas) {
        if (comp.has(label)) has_bob_ancilla = true;
      }
      if (!has_alice || !has_bob_ancilla) continue;

      DensityOperator unmeasured = engine::reduced_state(comp, Party::Alice);
      DensityOperator averaged = alice_marginal_after_measuring(comp, ancillas);
      report.per_component.push_back(linalg::trace_distance(unmeasured, averaged));
      report.max_distance = std::max(report.max_distance, report.per_component.back());
    }
    if (commit_free(script)) break;
  }
  report.ok = report.max_distance <= 1e-10;
  return report;
}

}  // namespace qbc::proto
