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

#include "qbc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbc::linalg {

namespace {

Index checked_product(const std::vector<Index>& dims) {
  Index total = 1;
  for (Index d : dims) {
    if (d <= 0) throw ShapeError("subsystem dimension must be positive");
    if (total > kMaxTotalDimension / d) {
      throw CapacityError("total dimension exceeds the configured maximum (2^20)");
    }
    total *= d;
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

bool is_finite(const Matrix& m) { return m.allFinite(); }

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Matrix d = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

bool is_positive_semidefinite(const Matrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

StateVector::StateVector(std::vector<Index> dims, Vector amplitudes)
    : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
  Index total = checked_product(dims_);
  if (total != amps_.size()) {
    throw ShapeError("amplitude vector length " + std::to_string(amps_.size()) +
                     " does not match the product of subsystem dimensions " +
                     std::to_string(total));
  }
  if (!amps_.allFinite()) throw DomainError("state amplitudes must be finite");
  double norm2 = amps_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-9) {
    throw DomainError("state vector is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }
  // Take out the residual rounding so downstream probability sums stay
  // within the 1e-12 contracts.
  amps_ /= std::sqrt(norm2);
}

StateVector StateVector::basis(Index dim, Index k) {
  if (k < 0 || k >= dim) throw ShapeError("basis index out of range");
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return StateVector({dim}, std::move(v));
}

StateVector StateVector::reshaped(std::vector<Index> dims) const {
  return StateVector(std::move(dims), amps_);
}

// ---------------------------------------------------------------------------
// DensityOperator
// ---------------------------------------------------------------------------

DensityOperator::DensityOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw ShapeError("density operator must be square");
  if (!m_.allFinite()) throw DomainError("density operator entries must be finite");
  if (!is_hermitian(m_, 1e-10)) throw DomainError("density operator is not Hermitian");
  double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw DomainError("density operator trace is " + std::to_string(tr) + ", expected 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m_ + m_.adjoint()),
                                               Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-9) {
    throw DomainError("density operator has a negative eigenvalue");
  }
}

DensityOperator DensityOperator::pure(const StateVector& psi) { return pure(psi.amplitudes()); }

DensityOperator DensityOperator::pure(const Vector& amplitudes) {
  return DensityOperator(amplitudes * amplitudes.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
  if (dim <= 0) throw ShapeError("dimension must be positive");
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  if (!a.allFinite() || !b.allFinite()) throw DomainError("tensor operands must be finite");
  if (a.rows() > 0 && b.rows() > 0 &&
      (a.rows() * b.rows() > kMaxTotalDimension || a.cols() * b.cols() > kMaxTotalDimension)) {
    throw CapacityError("tensor product exceeds the configured maximum dimension");
  }
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  if (a.dim() > kMaxTotalDimension / b.dim()) {
    throw CapacityError("tensor product exceeds the configured maximum dimension");
  }
  Vector out(a.dim() * b.dim());
  for (Index i = 0; i < a.dim(); ++i) {
    out.segment(i * b.dim(), b.dim()) = a.amplitude(i) * b.amplitudes();
  }
  std::vector<Index> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return StateVector(std::move(dims), std::move(out));
}

Matrix partial_trace(const Matrix& rho, const std::vector<Index>& dims,
                     const std::vector<Index>& keep) {
  Index total = 1;
  for (Index d : dims) total *= d;
  if (rho.rows() != total || rho.cols() != total) {
    throw ShapeError("operator dimension does not match the product of dims");
  }
  if (keep.empty()) throw ShapeError("keep set must be nonempty");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= static_cast<Index>(dims.size())) {
      throw ShapeError("keep index out of range");
    }
    if (k > 0 && keep[k] <= keep[k - 1]) {
      throw ShapeError("keep indices must be strictly increasing");
    }
  }

  const std::size_t m = dims.size();
  std::vector<bool> kept(m, false);
  for (Index k : keep) kept[static_cast<std::size_t>(k)] = true;

  // Row-major strides of the full factorization.
  std::vector<Index> stride(m, 1);
  for (std::size_t i = m; i-- > 1;) stride[i - 1] = stride[i] * dims[i];

  Index keep_dim = 1, trace_dim = 1;
  std::vector<Index> keep_dims, trace_dims, keep_stride, trace_stride;
  for (std::size_t i = 0; i < m; ++i) {
    if (kept[i]) {
      keep_dims.push_back(dims[i]);
      keep_stride.push_back(stride[i]);
      keep_dim *= dims[i];
    } else {
      trace_dims.push_back(dims[i]);
      trace_stride.push_back(stride[i]);
      trace_dim *= dims[i];
    }
  }

  // Flattened offsets of every kept / traced multi-index.
  auto offsets = [](const std::vector<Index>& sub_dims, const std::vector<Index>& sub_stride,
                    Index count) {
    std::vector<Index> out(static_cast<std::size_t>(count), 0);
    for (Index flat = 0; flat < count; ++flat) {
      Index rem = flat, off = 0;
      for (std::size_t i = sub_dims.size(); i-- > 0;) {
        off += (rem % sub_dims[i]) * sub_stride[i];
        rem /= sub_dims[i];
      }
      out[static_cast<std::size_t>(flat)] = off;
    }
    return out;
  };
  std::vector<Index> keep_off = offsets(keep_dims, keep_stride, keep_dim);
  std::vector<Index> trace_off = offsets(trace_dims, trace_stride, trace_dim);

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  for (Index i = 0; i < keep_dim; ++i) {
    for (Index j = 0; j < keep_dim; ++j) {
      Complex acc = 0.0;
      for (Index t = 0; t < trace_dim; ++t) {
        acc += rho(keep_off[i] + trace_off[t], keep_off[j] + trace_off[t]);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<Index>& dims,
                              const std::vector<Index>& keep) {
  return DensityOperator(partial_trace(rho.matrix(), dims, keep));
}

SchmidtDecomposition schmidt_decompose(const StateVector& psi, Index dim_a, Index dim_b,
                                       double rank_cutoff) {
  if (dim_a * dim_b != psi.dim()) {
    throw ShapeError("dimA * dimB does not match the state dimension");
  }
  // Coefficient matrix T with psi = sum_ij T(i,j) |i>_A |j>_B.
  Matrix t(dim_a, dim_b);
  for (Index i = 0; i < dim_a; ++i) {
    for (Index j = 0; j < dim_b; ++j) t(i, j) = psi.amplitude(i * dim_b + j);
  }
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);

  Index rank = 0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > rank_cutoff) ++rank;
  }
  if (rank == 0) throw DomainError("state has vanishing Schmidt rank");

  SchmidtDecomposition out;
  out.coefficients = svd.singularValues().head(rank);
  out.basis_a = svd.matrixU().leftCols(rank);
  out.basis_b = svd.matrixV().conjugate().leftCols(rank);
  out.degenerate_blocks = group_degenerate(out.coefficients, kDegeneracyTol);
  return out;
}

Vector SchmidtDecomposition::reconstruct() const {
  Index dim_a = basis_a.rows(), dim_b = basis_b.rows();
  Vector out = Vector::Zero(dim_a * dim_b);
  for (Index k = 0; k < rank(); ++k) {
    for (Index i = 0; i < dim_a; ++i) {
      out.segment(i * dim_b, dim_b) += coefficients(k) * basis_a(i, k) * basis_b.col(k);
    }
  }
  return out;
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw ShapeError("trace distance requires equal dimensions");
  }
  Matrix diff = rho - sigma;
  if (!is_hermitian(diff, 1e-9)) throw DomainError("trace distance of non-Hermitian difference");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()),
                                               Eigen::EigenvaluesOnly);
  double d = 0.5 * solver.eigenvalues().cwiseAbs().sum();
  return std::clamp(d, 0.0, 1.0);
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  return trace_distance(rho.matrix(), sigma.matrix());
}

Spectrum spectral_decompose(const Matrix& m, double degeneracy_tol) {
  if (m.rows() != m.cols()) throw ShapeError("spectral decomposition requires a square matrix");
  if (!is_hermitian(m, 1e-9)) throw DomainError("spectral decomposition requires a Hermitian input");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()));

  // Eigen sorts ascending; flip to nonincreasing.
  Index n = m.rows();
  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  out.degenerate_blocks = group_degenerate(out.eigenvalues, degeneracy_tol);
  return out;
}

Spectrum spectral_decompose(const DensityOperator& rho, double degeneracy_tol) {
  return spectral_decompose(rho.matrix(), degeneracy_tol);
}

// ---------------------------------------------------------------------------
// Phase-invariant comparison
// ---------------------------------------------------------------------------

double overlap_magnitude(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeError("overlap of different dimensions");
  return std::clamp(std::abs(a.dot(b)), 0.0, 1.0);
}

double phase_invariant_distance(const Vector& a, const Vector& b) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap_magnitude(a, b)));
}

bool approx_equal_up_to_phase(const Vector& a, const Vector& b, double tol) {
  return overlap_magnitude(a, b) >= 1.0 - tol;
}

std::vector<std::pair<Index, Index>> group_degenerate(const Eigen::VectorXd& sorted_desc,
                                                      double tol) {
  std::vector<std::pair<Index, Index>> blocks;
  Index n = sorted_desc.size();
  Index start = 0;
  for (Index k = 1; k <= n; ++k) {
    if (k == n || sorted_desc(k - 1) - sorted_desc(k) > tol) {
      blocks.emplace_back(start, k);
      start = k;
    }
  }
  return blocks;
}

}  // namespace qbc::linalg
