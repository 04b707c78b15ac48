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

#include <optional>
#include <string>
#include <map>
#include <utility>
#include <vector>

#include "qbc/linalg.hpp"
#include "qbc/rng.hpp"

namespace qbc::engine {

using linalg::Complex;
using linalg::DensityOperator;
using linalg::Index;
using linalg::Matrix;
using linalg::StateVector;
using linalg::Vector;

enum class Party { Alice, Bob, Channel };

std::string to_string(Party p);
Party party_from_string(const std::string& s);

/// One tensor factor of a register. Ownership is metadata: the physics never
/// reads it except reduced_state and the no-signalling audit.
struct Subsystem {
  std::string label;
  Index dim = 0;
  Party owner = Party::Channel;
};

/// An observable given by a complete orthonormal eigenbasis plus an outcome
/// label per basis column. Repeated labels define a degenerate outcome whose
/// projector spans the matching columns.
class ObservableSpec {
 public:
  ObservableSpec(std::string label, Matrix eigenbasis, std::vector<std::string> column_labels);

  const std::string& label() const { return label_; }
  Index dim() const { return eigenbasis_.rows(); }
  const Matrix& eigenbasis() const { return eigenbasis_; }
  const std::vector<std::string>& column_labels() const { return column_labels_; }

  /// Distinct outcome labels in first-appearance order.
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  Index outcome_count() const { return static_cast<Index>(outcomes_.size()); }
  Index outcome_of_column(Index col) const { return column_outcome_[static_cast<std::size_t>(col)]; }
  Index outcome_index(const std::string& outcome) const;

  /// Rank >= 1 projector onto the eigenspace of one outcome.
  Matrix projector(Index outcome) const;

 private:
  std::string label_;
  Matrix eigenbasis_;
  std::vector<std::string> column_labels_;
  std::vector<std::string> outcomes_;
  std::vector<Index> column_outcome_;
};

/// Spin observables on a qubit, outcomes "up"/"down".
/// Eigenstate conventions: |up_x> = (|up> + |down>)/sqrt2,
/// |up_y> = (|up> + i|down>)/sqrt2.
ObservableSpec sigma_x();
ObservableSpec sigma_y();
ObservableSpec sigma_z();

/// Identity-eigenbasis observable; outcome labels default to "0", "1", ...
/// This is how die and pointer ancillas get read out.
ObservableSpec computational_basis(const std::string& label, Index dim,
                                   std::vector<std::string> outcome_labels = {});

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix hadamard();

struct MeasurementRecord {
  std::string subsystem;
  std::string observable;
  std::string outcome;
  Index outcome_index = 0;
  double probability = 0.0;  // exact pre-collapse Born probability
};

/// A pure quantum state over labeled, owned subsystems. Immutable: every
/// operation returns a new register.
class Register {
 public:
  Register(StateVector state, std::vector<Subsystem> subsystems);

  /// All subsystems start in |0> of their dimension.
  static Register ground(std::vector<Subsystem> subsystems);

  const StateVector& state() const { return state_; }
  const std::vector<Subsystem>& subsystems() const { return subs_; }
  Index dim() const { return state_.dim(); }

  bool has(const std::string& label) const;
  Index position(const std::string& label) const;  // throws LookupError
  const Subsystem& subsystem(const std::string& label) const;

  Register with_owner(const std::string& label, Party owner) const;

 private:
  StateVector state_;
  std::vector<Subsystem> subs_;
};

/// Tensor product of two registers (labels must not collide).
Register tensor(const Register& a, const Register& b);

/// Appends one subsystem at the right end in the given (normalized) state.
Register append_subsystem(const Register& reg, const Subsystem& sub, const Vector& initial);

/// Reorders the tensor factors to the given label order (a permutation of
/// all labels), permuting amplitudes accordingly.
Register permute_subsystems(const Register& reg, const std::vector<std::string>& order);

/// Applies u to the listed target subsystems (in listed order, the first
/// label being the slowest-varying factor of u), identity elsewhere.
Register apply_unitary(const Register& reg, const Matrix& u, const std::vector<std::string>& targets);

/// Analytic Born probabilities of each outcome of obs on the target
/// subsystems (joint observables measure several labels at once; the first
/// listed label is the slowest-varying factor of the eigenbasis).
std::vector<double> outcome_probabilities(const Register& reg, const ObservableSpec& obs,
                                          const std::vector<std::string>& targets);
std::vector<double> outcome_probabilities(const Register& reg, const ObservableSpec& obs,
                                          const std::string& target);

/// Samples an outcome by the Born rule, collapses and renormalizes.
std::pair<Register, MeasurementRecord> measure_projective(const Register& reg,
                                                          const ObservableSpec& obs,
                                                          const std::vector<std::string>& targets,
                                                          RandomStream& rng);
std::pair<Register, MeasurementRecord> measure_projective(const Register& reg,
                                                          const ObservableSpec& obs,
                                                          const std::string& target,
                                                          RandomStream& rng);

/// Deterministic collapse onto a chosen outcome branch; returns the collapsed
/// register and the branch probability. Throws DomainError on a
/// zero-probability branch.
std::pair<Register, MeasurementRecord> project_outcome(const Register& reg,
                                                       const ObservableSpec& obs,
                                                       const std::vector<std::string>& targets,
                                                       Index outcome);
std::pair<Register, MeasurementRecord> project_outcome(const Register& reg,
                                                       const ObservableSpec& obs,
                                                       const std::string& target, Index outcome);

/// Holds a measurement at the quantum level: appends a pointer ancilla of
/// dimension obs.outcome_count() (owned by the measuring party, initialized
/// to its first basis state) and entangles it with the outcome eigenspaces
/// of obs on the targets.
Register purify_measurement(const Register& reg, const ObservableSpec& obs,
                            const std::vector<std::string>& targets,
                            const std::string& pointer_label, Party owner);
Register purify_measurement(const Register& reg, const ObservableSpec& obs,
                            const std::string& target, const std::string& pointer_label,
                            Party owner);

/// The unitary implementing a measurement at the quantum level on
/// (target (x) pointer): sum_j |v_j><v_j| (x) Shift^{outcome(j)}.
Matrix measurement_unitary(const ObservableSpec& obs);

struct ChoiceBranch {
  Matrix unitary;
  std::vector<std::string> targets;
};

/// Holds a random choice at the quantum level: appends a die ancilla in
/// sum_k sqrt(w_k)|d_k> (owned by the choosing party) and applies the
/// controlled branch unitary. All branches must share one target signature.
Register purify_choice(const Register& reg, const std::vector<ChoiceBranch>& branches,
                       const std::vector<double>& weights, const std::string& die_label,
                       Party owner);

/// Applies the block-diagonal conditional unitary: for every basis string of
/// the control subsystems, the matching case unitary acts on targets. The
/// case table must cover every control basis string (no implicit identity).
Register purify_conditional(const Register& reg, const std::vector<std::string>& control_labels,
                            const std::map<std::vector<Index>, Matrix>& case_table,
                            const std::vector<std::string>& targets);

/// Partial trace onto the subsystems owned by the party.
DensityOperator reduced_state(const Register& reg, Party owner);

/// Partial trace onto an explicit label set (kept in register order).
DensityOperator reduced_state(const Register& reg, const std::vector<std::string>& labels);

}  // namespace qbc::engine
