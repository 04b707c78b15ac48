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
// The protocol abstract syntax: declarations plus an ordered step list.
// Scripts are produced by the parser (parser.hpp), by the built-in protocol
// factories (vaa.hpp), or programmatically, and consumed by the purification
// compiler (compile.hpp) and the executor (execute.hpp).

#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qbc/engine.hpp"

namespace qbc::proto {

using engine::Index;
using engine::Matrix;
using engine::Party;
using engine::Vector;

struct SubsystemDecl {
  std::string label;
  Index dim = 0;
  Party owner = Party::Channel;
};

/// The honest payload of a step: either a unitary application or a
/// projective measurement recorded under an id.
struct Action {
  enum class Kind { Apply, Measure };
  Kind kind = Kind::Apply;
  std::string op;  // unitary name (Apply) or observable name (Measure)
  std::vector<std::string> targets;
  std::string record_id;  // Measure only
};

// ---------------------------------------------------------------------------
// Honest steps
// ---------------------------------------------------------------------------

/// `commit_condition`: -1 executes always; 0/1 executes only when the
/// configured commitment bit matches (this is how a script encodes two
/// commitment branches).
struct PrepareStep {
  Party party;
  std::string state;
  std::vector<std::string> targets;
  int commit_condition = -1;
};

struct SendStep {
  std::string subsystem;
  Party from;
  Party to;
};

struct ApplyStep {
  Party party;
  Action action;
  int commit_condition = -1;
};

struct MeasureStep {
  Party party;
  Action action;
};

/// A random choice among alternative actions. All branches share one target
/// signature; measure branches share one record id.
struct ChooseStep {
  Party party;
  std::string choice_id;
  std::vector<Action> branches;
  std::vector<double> weights;
};

/// An action selected by the party's own earlier records (choice ids map to
/// branch indices, record ids to outcome indices). The case list must cover
/// the whole control space.
struct ConditionalStep {
  Party party;
  std::vector<std::string> controls;
  std::vector<std::pair<std::vector<Index>, Action>> cases;
};

/// Classical broadcast. payload "outcome" announces the outcome of the
/// record in args[0]; any other payload names a builtin computed from the
/// transcript (e.g. the commitment subsequence announcement).
struct AnnounceStep {
  Party party;
  std::string payload;
  std::vector<std::string> args;
};

/// Alice announces the configured commitment bit, plus an optional proof
/// payload computed by a named builtin.
struct RevealStep {
  std::string proof;
};

/// Evaluates a named predicate over the transcript; sets the verdict.
struct VerifyStep {
  Party party;
  std::string predicate;
  std::vector<std::string> args;
};

// ---------------------------------------------------------------------------
// Purified steps (emitted by the compiler)
// ---------------------------------------------------------------------------

struct PurifiedMeasureStep {
  Party party;
  std::string obs;
  std::vector<std::string> targets;
  std::string pointer;  // = the record id
  std::vector<std::string> outcome_labels;
};

struct PurifiedChoiceStep {
  Party party;
  std::string die;  // = the choice id
  std::vector<engine::ChoiceBranch> branches;
  std::vector<double> weights;
  std::vector<std::string> branch_names;  // op of each branch
  /// Fresh shared pointer appended before the controlled unitary, when any
  /// branch measures.
  std::optional<SubsystemDecl> pointer;
  std::string pointer_record;  // record id of the measure branches
  /// Outcome labels of the pointer per branch (empty for apply branches).
  std::vector<std::vector<std::string>> branch_outcome_labels;
};

struct PurifiedConditionalStep {
  Party party;
  std::vector<std::string> controls;
  std::vector<std::pair<std::vector<Index>, Matrix>> cases;
  std::vector<std::string> targets;
  std::optional<SubsystemDecl> pointer;
  std::string pointer_record;
  std::vector<std::string> case_names;  // op per case, aligned with `cases`
  /// Outcome labels of the pointer per case (empty for apply cases).
  std::vector<std::vector<std::string>> case_outcome_labels;
};

using Step = std::variant<PrepareStep, SendStep, ApplyStep, MeasureStep, ChooseStep,
                          ConditionalStep, AnnounceStep, RevealStep, VerifyStep,
                          PurifiedMeasureStep, PurifiedChoiceStep, PurifiedConditionalStep>;

// ---------------------------------------------------------------------------
// ProtocolScript
// ---------------------------------------------------------------------------

class ProtocolScript {
 public:
  std::vector<SubsystemDecl> subsystems;
  std::map<std::string, Vector> states;         // named state literals
  std::map<std::string, Matrix> unitaries;      // named operator literals
  std::map<std::string, engine::ObservableSpec> observables;
  std::vector<Step> steps;

  /// Non-empty for the built-in protocols ("vaa", "epr"); enables the
  /// protocol-specific commitment analysis.
  std::string builtin;
  /// Round count of the built-in protocol (0 for plain scripts).
  int rounds = 0;
  /// Party the script has been purified for (by the compiler), if any.
  std::optional<Party> purified_for;

  bool has_subsystem(const std::string& label) const;
  const SubsystemDecl& subsystem(const std::string& label) const;
  const engine::ObservableSpec& observable(const std::string& name) const;
  const Matrix& unitary(const std::string& name) const;
  const Vector& state(const std::string& name) const;

  /// Seeds the standard declarations every script starts from: states zero,
  /// one, plus, minus, bell; unitaries I2, X, Y, Z, H; observables sx, sy,
  /// sz and the two-qubit R observable.
  static ProtocolScript with_builtins();
};

/// Renders a script back to its textual form (the format parsed by
/// parser.hpp). Round-trips through parse().
std::string to_source(const ProtocolScript& script);

}  // namespace qbc::proto
