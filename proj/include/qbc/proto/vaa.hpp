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
// Built-in protocols and the commitment-phase analyses: the bit-commitment
// scheme built on the pre/post-selection fixture, the plain EPR-pair scheme,
// the commitment-state extractor and the no-signalling audit.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbc/linalg.hpp"
#include "qbc/proto/execute.hpp"
#include "qbc/proto/script.hpp"

namespace qbc::proto {

/// The n-round bit-commitment protocol of the pre/post-selection fixture:
/// per round, a Bell pair; Bob measures a random spin axis on the channel
/// particle and returns it; Alice measures R. Bob then announces his "up"
/// rounds, Alice announces the commitment subsequence, reveals, and Bob
/// verifies her announced axes against his own choices.
ProtocolScript vaa_script(int rounds);

/// Text form of vaa_script(rounds); parse() round-trips it.
std::string vaa_source(int rounds);

/// A minimal concealing protocol: the commitment only touches Alice's half
/// of shared EPR pairs, so the two commitments are indistinguishable to Bob
/// and the cheat unitary exists.
ProtocolScript epr_script();

/// Dispatch by name: "vaa" (uses rounds) or "epr".
ProtocolScript builtin_script(const std::string& name, int rounds);

// ---------------------------------------------------------------------------
// Commitment analysis
// ---------------------------------------------------------------------------

struct CommitmentStates {
  /// Global pure commitment states, Alice-held factors first.
  linalg::StateVector psi0;
  linalg::StateVector psi1;
  linalg::Index dim_a;
  linalg::Index dim_b;
  /// What the B side holds for either commitment. For the VAA protocol this
  /// is the per-particle operator on Bob's die ancilla (the announced
  /// pointer factors out); honest mode reports the die decohered in its
  /// basis, which is the proper mixture an honest chooser ends up with.
  linalg::DensityOperator w_b0;
  linalg::DensityOperator w_b1;
  double distance;  // trace_distance(w_b0, w_b1)
};

/// Runs the pre-reveal protocol for both commitment values and returns the
/// global states plus the B-side operators. The VAA built-in is analyzed per
/// particle with the announcement post-selected on "up"; plain scripts are
/// executed fully purified (they must not announce before the reveal step).
CommitmentStates commitment_states(const ProtocolScript& script, Mode mode);

// ---------------------------------------------------------------------------
// No-signalling audit
// ---------------------------------------------------------------------------

struct NoSignallingReport {
  double max_distance = 0.0;
  std::vector<double> per_component;
  bool ok = false;  // max_distance <= 1e-10
};

/// Compares, on every entangled component of the fully purified run, Alice's
/// reduced operator (i) with Bob's ancillas unmeasured and (ii) averaged
/// over Bob measuring all his ancillas in their die/pointer bases.
NoSignallingReport audit_no_signalling(const ProtocolScript& script);

/// Executes only the quantum steps of a script with BOTH parties purified
/// (announce/reveal/verify are skipped); returns the surviving components.
std::vector<engine::Register> run_purified(const ProtocolScript& script, int commit_bit);

/// Bob's ancilla labels (die and pointer ids) of a doubly purified script.
std::vector<std::string> bob_ancilla_labels(const ProtocolScript& script);

/// Alice's reduced operator after averaging over Bob measuring the listed
/// ancillas in their computational (die/pointer) bases. `drop_branch` skips
/// the k-th nonzero outcome branch and renormalizes — the negative control
/// showing the audit notices a broken average.
linalg::DensityOperator alice_marginal_after_measuring(
    const engine::Register& reg, const std::vector<std::string>& bob_ancillas,
    std::optional<std::size_t> drop_branch = std::nullopt);

}  // namespace qbc::proto
