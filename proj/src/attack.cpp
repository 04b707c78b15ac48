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

#include "qbc/attack.hpp"

#include <cmath>
#include <complex>

namespace qbc::attack {

using linalg::Complex;

namespace {

// Coefficient matrix T with psi = sum_ij T(i,j) |i>_A |j>_B.
Matrix coefficient_matrix(const Vector& psi, Index dim_a, Index dim_b) {
  Matrix t(dim_a, dim_b);
  for (Index i = 0; i < dim_a; ++i) {
    for (Index j = 0; j < dim_b; ++j) t(i, j) = psi(i * dim_b + j);
  }
  return t;
}

void check_shapes(const StateVector& psi0, const StateVector& psi1, Index dim_a, Index dim_b) {
  if (dim_a <= 0 || dim_b <= 0) throw ShapeError("factor dimensions must be positive");
  if (psi0.dim() != dim_a * dim_b || psi1.dim() != dim_a * dim_b) {
    throw ShapeError("states do not live on dimA * dimB");
  }
}

Complex bilinear_overlap(const StateVector& psi1, const Matrix& u, const StateVector& psi0,
                         Index dim_a, Index dim_b) {
  return psi1.amplitudes().dot(apply_on_a(psi0.amplitudes(), u, dim_a, dim_b));
}

// Deterministic completion: extends the orthonormal columns of `given` to a
// full basis by Gram-Schmidt over the standard basis.
Matrix complete_basis(const Matrix& given) {
  Index n = given.rows();
  Matrix full(n, n);
  Index filled = given.cols();
  full.leftCols(filled) = given;
  for (Index e = 0; e < n && filled < n; ++e) {
    Vector v = Vector::Zero(n);
    v(e) = 1.0;
    for (Index k = 0; k < filled; ++k) v -= full.col(k).dot(v) * full.col(k);
    double nrm = v.norm();
    if (nrm > 1e-7) {
      full.col(filled++) = v / nrm;
    }
  }
  if (filled != n) throw DomainError("failed to complete an orthonormal basis");
  return full.rightCols(n - given.cols());
}

}  // namespace

Vector apply_on_a(const Vector& psi, const Matrix& u, Index dim_a, Index dim_b) {
  if (psi.size() != dim_a * dim_b) throw ShapeError("state does not live on dimA * dimB");
  if (u.rows() != dim_a || u.cols() != dim_a) throw ShapeError("operator must act on the A factor");
  Matrix t = u * coefficient_matrix(psi, dim_a, dim_b);
  Vector out(dim_a * dim_b);
  for (Index i = 0; i < dim_a; ++i) out.segment(i * dim_b, dim_b) = t.row(i).transpose();
  return out;
}

double concealment(const StateVector& psi0, const StateVector& psi1, Index dim_a, Index dim_b) {
  check_shapes(psi0, psi1, dim_a, dim_b);
  Matrix t0 = coefficient_matrix(psi0.amplitudes(), dim_a, dim_b);
  Matrix t1 = coefficient_matrix(psi1.amplitudes(), dim_a, dim_b);
  // W_B[j,j'] = sum_i T(i,j) conj(T(i,j')).
  Matrix w0 = t0.transpose() * t0.conjugate();
  Matrix w1 = t1.transpose() * t1.conjugate();
  return linalg::trace_distance(w0, w1);
}

Matrix polar_unitary_factor(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CheatReport synthesize_cheat_unitary(const StateVector& psi0, const StateVector& psi1,
                                     Index dim_a, Index dim_b, double threshold) {
  check_shapes(psi0, psi1, dim_a, dim_b);
  CheatReport report;
  report.concealment = concealment(psi0, psi1, dim_a, dim_b);
  if (report.concealment > threshold) {
    throw DomainError("commitments are distinguishable (concealment " +
                      std::to_string(report.concealment) +
                      " above threshold); use optimal_cheat_unitary for the nonideal case");
  }

  linalg::SchmidtDecomposition sd0 = linalg::schmidt_decompose(psi0, dim_a, dim_b);
  linalg::SchmidtDecomposition sd1 = linalg::schmidt_decompose(psi1, dim_a, dim_b);
  Index rank = std::min(sd0.rank(), sd1.rank());

  // Blocks follow psi0's spectrum; a concealing pair has the same spectrum.
  Matrix u = Matrix::Zero(dim_a, dim_a);
  Matrix a_source(dim_a, rank);   // {|a_k>}
  Matrix a_target(dim_a, rank);   // {|a''_k>}
  Index col = 0;
  for (auto [first, last] : linalg::group_degenerate(sd0.coefficients, linalg::kDegeneracyTol)) {
    if (first >= rank) break;
    last = std::min(last, rank);
    Index width = last - first;
    if (width > 1) ++report.degenerate_blocks;

    Matrix b0 = sd0.basis_b.middleCols(first, width);
    Matrix b1 = sd1.basis_b.middleCols(first, width);
    Matrix a1 = sd1.basis_a.middleCols(first, width);

    // |1> restricted to the block equals sum_l |a''_l>|b_l> with
    // A'' = A' W*, W the unitary polar factor of B'^dagger B.
    Matrix w = polar_unitary_factor(b1.adjoint() * b0);
    a_source.middleCols(col, width) = sd0.basis_a.middleCols(first, width);
    a_target.middleCols(col, width) = a1 * w.conjugate();
    col += width;
  }
  a_source.conservativeResize(dim_a, col);
  a_target.conservativeResize(dim_a, col);
  u = a_target * a_source.adjoint();

  // The action off the support of |0> is unconstrained; complete
  // deterministically.
  if (col < dim_a) {
    Matrix rest_source = complete_basis(a_source);
    Matrix rest_target = complete_basis(a_target);
    u += rest_target * rest_source.adjoint();
  }

  Complex z = bilinear_overlap(psi1, u, psi0, dim_a, dim_b);
  if (std::abs(z) > 1e-12) u *= std::conj(z) / std::abs(z);
  report.cheat_unitary = u;
  report.cheat_fidelity = std::abs(z);
  return report;
}

CheatReport optimal_cheat_unitary(const StateVector& psi0, const StateVector& psi1, Index dim_a,
                                  Index dim_b) {
  check_shapes(psi0, psi1, dim_a, dim_b);
  CheatReport report;
  report.concealment = concealment(psi0, psi1, dim_a, dim_b);

  // <1|(U(x)I)|0> = Tr(M U) with M = T0 T1^dagger; the maximum over
  // unitaries is the sum of the singular values of M, attained at the
  // adjoint of M's polar factor.
  Matrix t0 = coefficient_matrix(psi0.amplitudes(), dim_a, dim_b);
  Matrix t1 = coefficient_matrix(psi1.amplitudes(), dim_a, dim_b);
  Matrix m = t0 * t1.adjoint();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = svd.matrixV() * svd.matrixU().adjoint();

  Complex z = bilinear_overlap(psi1, u, psi0, dim_a, dim_b);
  if (std::abs(z) > 1e-12) u *= std::conj(z) / std::abs(z);
  report.cheat_unitary = u;
  report.cheat_fidelity = std::abs(z);

  linalg::SchmidtDecomposition sd0 = linalg::schmidt_decompose(psi0, dim_a, dim_b);
  for (auto [first, last] : sd0.degenerate_blocks) {
    if (last - first > 1) ++report.degenerate_blocks;
  }
  return report;
}

BindingCheck verify_binding_failure(const CheatReport& report, const StateVector& psi0,
                                    const StateVector& psi1) {
  if (report.cheat_unitary.size() == 0) throw ShapeError("report carries no unitary");
  Index dim_a = report.cheat_unitary.rows();
  if (psi0.dim() % dim_a != 0) throw ShapeError("unitary does not divide the state dimension");
  Index dim_b = psi0.dim() / dim_a;
  Vector moved = apply_on_a(psi0.amplitudes(), report.cheat_unitary, dim_a, dim_b);
  double overlap = linalg::overlap_magnitude(moved, psi1.amplitudes());
  BindingCheck check;
  check.residual = 1.0 - overlap;
  check.success = check.residual <= 1e-8;
  return check;
}

Matrix unitary_from_spectral_pair(const Matrix& w0, const Matrix& w1, double degeneracy_tol) {
  if (w0.rows() != w1.rows() || w0.cols() != w1.cols()) {
    throw ShapeError("spectral pair dimensions differ");
  }
  linalg::Spectrum s0 = linalg::spectral_decompose(w0, degeneracy_tol);
  linalg::Spectrum s1 = linalg::spectral_decompose(w1, degeneracy_tol);
  Index n = w0.rows();

  // Merge until every cut is a spectral gap in both operators; inside a
  // merged block the polar alignment cancels the eigenbasis arbitrariness.
  Matrix u = Matrix::Zero(n, n);
  Index start = 0;
  for (Index k = 1; k <= n; ++k) {
    bool cut = (k == n) || (s0.eigenvalues(k - 1) - s0.eigenvalues(k) > degeneracy_tol &&
                            s1.eigenvalues(k - 1) - s1.eigenvalues(k) > degeneracy_tol);
    if (!cut) continue;
    Index width = k - start;
    Matrix v0 = s0.eigenvectors.middleCols(start, width);
    Matrix v1 = s1.eigenvectors.middleCols(start, width);
    u += v1 * polar_unitary_factor(v1.adjoint() * v0) * v0.adjoint();
    start = k;
  }
  return u;
}

}  // namespace qbc::attack
