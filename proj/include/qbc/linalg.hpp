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

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "qbc/errors.hpp"

namespace qbc::linalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Tolerances used across the library. State normalization, hermiticity
/// and trace checks use kNormTol; Schmidt/spectral degeneracy grouping
/// uses kDegeneracyTol; reconstruction checks use kReconstructTol.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kDegeneracyTol = 1e-8;
inline constexpr double kReconstructTol = 1e-10;

/// Hard cap on the total dimension any tensor product may reach.
inline constexpr Index kMaxTotalDimension = Index(1) << 20;

// ---------------------------------------------------------------------------
// Predicates. Structural properties are checked, never assumed.
// ---------------------------------------------------------------------------

bool is_finite(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = kNormTol);
bool is_unitary(const Matrix& m, double tol = kUnitaryTol);
/// Hermitian within tol and all eigenvalues >= -tol.
bool is_positive_semidefinite(const Matrix& m, double tol = kNormTol);

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Normalized amplitude vector over an ordered tensor factorization.
/// Subsystem 0 is the leftmost (slowest-varying) factor: the amplitude of
/// basis point (i_0, ..., i_{m-1}) sits at index
/// ((i_0 * d_1 + i_1) * d_2 + ...) + i_{m-1}.
class StateVector {
 public:
  StateVector(std::vector<Index> dims, Vector amplitudes);

  /// Single-factor computational basis state |k> of dimension dim.
  static StateVector basis(Index dim, Index k);

  const std::vector<Index>& dims() const { return dims_; }
  Index dim() const { return amps_.size(); }
  std::size_t factor_count() const { return dims_.size(); }
  const Vector& amplitudes() const { return amps_; }

  Complex amplitude(Index i) const { return amps_(i); }

  /// Reinterprets the same amplitudes over a different factorization
  /// (product of dims must match).
  StateVector reshaped(std::vector<Index> dims) const;

 private:
  std::vector<Index> dims_;
  Vector amps_;
};

// ---------------------------------------------------------------------------
// DensityOperator
// ---------------------------------------------------------------------------

/// Unit-trace positive semidefinite operator. Hermiticity, positivity and
/// trace are validated on construction.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix m);

  static DensityOperator pure(const StateVector& psi);
  static DensityOperator pure(const Vector& amplitudes);
  static DensityOperator maximally_mixed(Index dim);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

// ---------------------------------------------------------------------------
// SchmidtDecomposition
// ---------------------------------------------------------------------------

/// psi = sum_i coefficients[i] * basis_a.col(i) (x) basis_b.col(i), with the
/// coefficients sorted nonincreasing and both bases orthonormal.
struct SchmidtDecomposition {
  Eigen::VectorXd coefficients;  // the sqrt(c_i), nonincreasing
  Matrix basis_a;                // dimA x r, orthonormal columns
  Matrix basis_b;                // dimB x r, orthonormal columns

  /// Half-open [first, last) ranges of coefficients equal within the
  /// degeneracy tolerance.
  std::vector<std::pair<Index, Index>> degenerate_blocks;

  Index rank() const { return coefficients.size(); }

  /// Rebuilds the state vector on dimA*dimB from the decomposition.
  Vector reconstruct() const;
};

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

/// Eigensystem of a Hermitian operator, eigenvalues sorted nonincreasing,
/// degenerate eigenspaces reported as grouped blocks.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;  // columns, orthonormal
  std::vector<std::pair<Index, Index>> degenerate_blocks;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Kronecker product with the left operand as the slower-varying index.
Matrix tensor_product(const Matrix& a, const Matrix& b);

/// Tensor product of states; dims lists are concatenated.
StateVector tensor_product(const StateVector& a, const StateVector& b);

/// Partial trace of rho (factorized per dims) onto the subsystems listed in
/// keep, which must be a nonempty strictly increasing index subset. The kept
/// factors stay in their original relative order.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<Index>& dims,
                              const std::vector<Index>& keep);

/// Raw-matrix variant used internally; same contract.
Matrix partial_trace(const Matrix& rho, const std::vector<Index>& dims,
                     const std::vector<Index>& keep);

/// Biorthogonal decomposition of psi across the dimA x dimB split
/// (the first factor is the slower-varying one). Coefficients below
/// rank_cutoff are dropped from the decomposition.
SchmidtDecomposition schmidt_decompose(const StateVector& psi, Index dim_a, Index dim_b,
                                       double rank_cutoff = 1e-14);

/// Half the trace norm of rho - sigma; in [0, 1].
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);
double trace_distance(const Matrix& rho, const Matrix& sigma);

/// Eigen-decomposition of a Hermitian operator with degeneracy grouping.
/// Throws DomainError if the input is not Hermitian within tolerance.
Spectrum spectral_decompose(const Matrix& m, double degeneracy_tol = kDegeneracyTol);
Spectrum spectral_decompose(const DensityOperator& rho, double degeneracy_tol = kDegeneracyTol);

// ---------------------------------------------------------------------------
// Phase-invariant comparison. Global phase is unobservable; state equality
// throughout the library means |<a|b>| close to 1.
// ---------------------------------------------------------------------------

/// |<a|b>|, clamped to [0, 1].
double overlap_magnitude(const Vector& a, const Vector& b);

/// min over phases of || e^{i t} a - b || = sqrt(2 - 2|<a|b>|).
double phase_invariant_distance(const Vector& a, const Vector& b);

bool approx_equal_up_to_phase(const Vector& a, const Vector& b, double tol = kReconstructTol);

/// Groups a nonincreasing value sequence into blocks equal within tol.
std::vector<std::pair<Index, Index>> group_degenerate(const Eigen::VectorXd& sorted_desc,
                                                      double tol);

}  // namespace qbc::linalg
