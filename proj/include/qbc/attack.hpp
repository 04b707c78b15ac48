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
// Given the two global commitment states, decide whether the protocol
// conceals the bit from the holder of the B factor and, when it does,
// construct the unitary on the A factor that maps one commitment onto the
// other: concealing implies not binding.

#pragma once

#include "qbc/linalg.hpp"

namespace qbc::attack {

using linalg::Index;
using linalg::Matrix;
using linalg::StateVector;
using linalg::Vector;

/// Concealment threshold below which the exact synthesis path applies.
inline constexpr double kConcealmentThreshold = 1e-8;

struct CheatReport {
  /// Trace distance of the B-side reduced operators of the two commitments.
  double concealment = 0.0;
  /// Unitary on the A factor, phase-normalized so <1|(U(x)I)|0> is real
  /// and nonnegative.
  Matrix cheat_unitary;
  /// |<1|(U(x)I)|0>|.
  double cheat_fidelity = 0.0;
  /// Number of Schmidt blocks of multiplicity > 1 encountered.
  int degenerate_blocks = 0;
};

struct BindingCheck {
  bool success = false;
  /// One minus the phase-invariant overlap |<1|(U(x)I)|0>|.
  double residual = 1.0;
};

/// Applies u to the A factor of a bipartite dimA x dimB vector.
Vector apply_on_a(const Vector& psi, const Matrix& u, Index dim_a, Index dim_b);

/// Trace distance between the B-side marginals of the two pure states.
double concealment(const StateVector& psi0, const StateVector& psi1, Index dim_a, Index dim_b);

/// Exact-case construction from the biorthogonal decomposition: requires
/// concealment(psi0, psi1) <= threshold and builds U mapping the A-side
/// Schmidt basis of psi0 onto that of psi1. Degenerate blocks are aligned
/// through the unitary polar factor of the B-side overlap matrix, and U is
/// completed deterministically on any orthogonal complement. Throws
/// DomainError (pointing at optimal_cheat_unitary) above the threshold.
CheatReport synthesize_cheat_unitary(const StateVector& psi0, const StateVector& psi1,
                                     Index dim_a, Index dim_b,
                                     double threshold = kConcealmentThreshold);

/// Nonideal case: maximizes |<1|(U(x)I)|0>| over all unitaries on the A
/// factor via the singular value decomposition of the A-side overlap matrix
/// contracted through the B factor. The optimum equals the sum of its
/// singular values.
CheatReport optimal_cheat_unitary(const StateVector& psi0, const StateVector& psi1, Index dim_a,
                                  Index dim_b);

/// Recomputes (U(x)I)|0> and compares it with |1> up to global phase.
BindingCheck verify_binding_failure(const CheatReport& report, const StateVector& psi0,
                                    const StateVector& psi1);

/// Canonical unitary aligning the eigenbases of two Hermitian operators,
/// eigenvalues matched in sorted order. Blocks that are degenerate in either
/// spectrum are merged and aligned through polar decomposition, which makes
/// the result a stable function of the operator pair. Used to exhibit that
/// equal operator pairs yield identical constructions.
Matrix unitary_from_spectral_pair(const Matrix& w0, const Matrix& w1,
                                  double degeneracy_tol = linalg::kDegeneracyTol);

/// Unitary polar factor of m (via SVD).
Matrix polar_unitary_factor(const Matrix& m);

}  // namespace qbc::attack
