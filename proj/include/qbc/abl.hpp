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
// Probabilities for an intermediate measurement conditioned on pre- and
// post-selected states, and the Vaidman-Aharonov-Albert fixture in which
// the outcomes of three mutually noncommuting spin measurements can all be
// inferred with certainty.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "qbc/engine.hpp"
#include "qbc/linalg.hpp"

namespace qbc::abl {

using engine::ObservableSpec;
using linalg::Index;
using linalg::Matrix;
using linalg::StateVector;
using linalg::Vector;

/// Pre- and post-selected boundary states plus the projectors of the
/// intermediate measurement. Projectors must be Hermitian, idempotent and
/// sum to the identity.
class PrePostContext {
 public:
  PrePostContext(StateVector pre, StateVector post,
                 std::vector<std::pair<std::string, Matrix>> projectors);

  /// Context for an intermediate measurement of obs acting on one factor
  /// of the boundary states (identity on the rest). `factor` indexes the
  /// tensor position of the measured subsystem in pre/post.
  static PrePostContext on_factor(StateVector pre, StateVector post, const ObservableSpec& obs,
                                  std::size_t factor);

  const StateVector& pre() const { return pre_; }
  const StateVector& post() const { return post_; }
  const std::vector<std::pair<std::string, Matrix>>& projectors() const { return projectors_; }

  PrePostContext swapped() const;  // pre and post interchanged

 private:
  StateVector pre_;
  StateVector post_;
  std::vector<std::pair<std::string, Matrix>> projectors_;
};

/// prob(outcome) = |<pre|P|post>|^2 / sum_i |<pre|P_i|post>|^2.
/// Throws DomainError when the post-selection is unreachable (the
/// denominator vanishes).
double abl_probability(const PrePostContext& ctx, const std::string& outcome);

/// All outcome probabilities, in projector order; they sum to one.
std::vector<std::pair<std::string, double>> abl_distribution(const PrePostContext& ctx);

/// Swapping pre and post must leave every outcome probability unchanged.
bool abl_time_symmetry_check(const PrePostContext& ctx, double tol = 1e-12);

// ---------------------------------------------------------------------------
// The Vaidman-Aharonov-Albert fixture
// ---------------------------------------------------------------------------

/// Bell pair, the four R eigenstates on the (ancilla, channel) pair, and the
/// three spin observables. Orthonormality of the R states and the equality
/// bell = (r1 + r2 + r3 + r4)/2 are verified numerically at construction.
class VaaFixture {
 public:
  static const VaaFixture& standard();

  const StateVector& bell() const { return bell_; }
  const StateVector& r_state(int k) const { return r_states_.at(static_cast<std::size_t>(k)); }
  const std::array<StateVector, 4>& r_states() const { return r_states_; }
  const ObservableSpec& spin(int axis) const;  // 0:x 1:y 2:z

  /// The R observable: eigenbasis {r1..r4}, outcomes "r1".."r4".
  ObservableSpec r_observable() const;

  /// Context with pre = bell, post = r_{k}, intermediate spin measurement on
  /// the channel factor.
  PrePostContext context(int post_index, int axis) const;

 private:
  VaaFixture();
  StateVector bell_;
  std::array<StateVector, 4> r_states_;
  std::array<ObservableSpec, 3> spins_;
};

/// Outcome table: rows r1..r4, columns sigma_x, sigma_y, sigma_z.
using VaaTable = std::array<std::array<std::string, 3>, 4>;

/// Computes every cell through the ABL rule; a cell must carry a unit
/// probability outcome (within 1e-10) or the fixture is inconsistent
/// (DomainError).
VaaTable vaa_table();

/// The known table for this fixture, against which vaa_table is checked.
const VaaTable& vaa_reference_table();

struct RewriteCheck {
  bool ok = true;
  std::string failing_identity;  // empty when ok
};

/// Verifies the Bell state rewrites: the x-basis form, the anticorrelated
/// y-basis form, and the R-eigenstate half-sum. `flip_y_sign` is a self-test
/// hook that deliberately breaks the y identity.
RewriteCheck bell_rewrite_check(bool flip_y_sign = false);

}  // namespace qbc::abl
