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

#include "qbc/abl.hpp"

#include <cmath>

namespace qbc::abl {

using linalg::Complex;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

Vector basis2(int k) {
  Vector v = Vector::Zero(2);
  v(k) = 1.0;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// PrePostContext
// ---------------------------------------------------------------------------

PrePostContext::PrePostContext(StateVector pre, StateVector post,
                               std::vector<std::pair<std::string, Matrix>> projectors)
    : pre_(std::move(pre)), post_(std::move(post)), projectors_(std::move(projectors)) {
  if (pre_.dim() != post_.dim()) throw ShapeError("pre and post dimensions differ");
  if (projectors_.empty()) throw ShapeError("at least one projector required");
  Matrix sum = Matrix::Zero(pre_.dim(), pre_.dim());
  for (const auto& [label, p] : projectors_) {
    if (p.rows() != pre_.dim() || p.cols() != pre_.dim()) {
      throw ShapeError("projector '" + label + "' dimension mismatch");
    }
    if (!linalg::is_hermitian(p, 1e-12)) {
      throw DomainError("projector '" + label + "' is not Hermitian");
    }
    if ((p * p - p).cwiseAbs().maxCoeff() > 1e-12) {
      throw DomainError("projector '" + label + "' is not idempotent");
    }
    sum += p;
  }
  if ((sum - Matrix::Identity(pre_.dim(), pre_.dim())).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("projectors do not sum to the identity");
  }
}

PrePostContext PrePostContext::on_factor(StateVector pre, StateVector post,
                                         const ObservableSpec& obs, std::size_t factor) {
  const auto& dims = pre.dims();
  if (factor >= dims.size()) throw ShapeError("factor index out of range");
  if (dims[factor] != obs.dim()) throw ShapeError("observable does not fit the chosen factor");

  std::vector<std::pair<std::string, Matrix>> projectors;
  for (Index k = 0; k < obs.outcome_count(); ++k) {
    Matrix p = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      Matrix factor_op = (i == factor) ? obs.projector(k)
                                       : Matrix(Matrix::Identity(dims[i], dims[i]));
      p = linalg::tensor_product(p, factor_op);
    }
    projectors.emplace_back(obs.outcomes()[static_cast<std::size_t>(k)], p);
  }
  return PrePostContext(std::move(pre), std::move(post), std::move(projectors));
}

PrePostContext PrePostContext::swapped() const { return PrePostContext(post_, pre_, projectors_); }

// ---------------------------------------------------------------------------
// The ABL rule
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, double>> abl_distribution(const PrePostContext& ctx) {
  std::vector<std::pair<std::string, double>> weights;
  double total = 0.0;
  for (const auto& [label, p] : ctx.projectors()) {
    Complex amp = ctx.pre().amplitudes().dot(p * ctx.post().amplitudes());
    double w = std::norm(amp);
    weights.emplace_back(label, w);
    total += w;
  }
  if (total <= 1e-28) {
    throw DomainError("post-selection has zero probability under every outcome");
  }
  for (auto& [label, w] : weights) w /= total;
  return weights;
}

double abl_probability(const PrePostContext& ctx, const std::string& outcome) {
  for (const auto& [label, p] : abl_distribution(ctx)) {
    if (label == outcome) return p;
  }
  throw LookupError("no outcome labeled '" + outcome + "'");
}

bool abl_time_symmetry_check(const PrePostContext& ctx, double tol) {
  auto forward = abl_distribution(ctx);
  auto backward = abl_distribution(ctx.swapped());
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (std::abs(forward[i].second - backward[i].second) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// VaaFixture
// ---------------------------------------------------------------------------

namespace {

StateVector make_r_state(int k) {
  // Amplitude layout |a c>: index 2a + c.
  Vector v = Vector::Zero(4);
  Complex up_down = std::polar(0.5, M_PI / 4.0);    // e^{+i pi/4}/2
  Complex down_up = std::polar(0.5, -M_PI / 4.0);   // e^{-i pi/4}/2
  switch (k) {
    case 0:
      v(0) = kInvSqrt2;
      v(1) = up_down;
      v(2) = down_up;
      break;
    case 1:
      v(0) = kInvSqrt2;
      v(1) = -up_down;
      v(2) = -down_up;
      break;
    case 2:
      v(3) = kInvSqrt2;
      v(1) = std::conj(up_down);
      v(2) = std::conj(down_up);
      break;
    case 3:
      v(3) = kInvSqrt2;
      v(1) = -std::conj(up_down);
      v(2) = -std::conj(down_up);
      break;
    default:
      throw LookupError("R eigenstate index out of range");
  }
  return StateVector({2, 2}, v);
}

}  // namespace

VaaFixture::VaaFixture()
    : bell_({2, 2},
            [] {
              Vector v = Vector::Zero(4);
              v(0) = kInvSqrt2;
              v(3) = kInvSqrt2;
              return v;
            }()),
      r_states_{make_r_state(0), make_r_state(1), make_r_state(2), make_r_state(3)},
      spins_{engine::sigma_x(), engine::sigma_y(), engine::sigma_z()} {
  // The phases are stated, not assumed: verify orthonormality and the
  // half-sum identity numerically.
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Complex ip = r_states_[static_cast<std::size_t>(i)].amplitudes().dot(
          r_states_[static_cast<std::size_t>(j)].amplitudes());
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(ip - want) > 1e-12) {
        throw DomainError("R eigenstates failed the orthonormality check");
      }
    }
  }
  Vector half_sum = Vector::Zero(4);
  for (const auto& r : r_states_) half_sum += 0.5 * r.amplitudes();
  if ((half_sum - bell_.amplitudes()).norm() > 1e-12) {
    throw DomainError("R eigenstates do not sum to twice the Bell state");
  }
}

const VaaFixture& VaaFixture::standard() {
  static VaaFixture fixture;
  return fixture;
}

const ObservableSpec& VaaFixture::spin(int axis) const {
  if (axis < 0 || axis > 2) throw LookupError("spin axis out of range");
  return spins_[static_cast<std::size_t>(axis)];
}

ObservableSpec VaaFixture::r_observable() const {
  Matrix basis(4, 4);
  for (int k = 0; k < 4; ++k) basis.col(k) = r_states_[static_cast<std::size_t>(k)].amplitudes();
  return ObservableSpec("R", basis, {"r1", "r2", "r3", "r4"});
}

PrePostContext VaaFixture::context(int post_index, int axis) const {
  return PrePostContext::on_factor(bell_, r_state(post_index), spin(axis), 1);
}

// ---------------------------------------------------------------------------
// Table and rewrites
// ---------------------------------------------------------------------------

VaaTable vaa_table() {
  const VaaFixture& fx = VaaFixture::standard();
  VaaTable table;
  for (int row = 0; row < 4; ++row) {
    for (int axis = 0; axis < 3; ++axis) {
      auto dist = abl_distribution(fx.context(row, axis));
      std::string certain;
      for (const auto& [label, p] : dist) {
        if (p >= 1.0 - 1e-10) certain = label;
      }
      if (certain.empty()) {
        throw DomainError("fixture inconsistency: cell (r" + std::to_string(row + 1) +
                          ", axis " + std::to_string(axis) + ") is not deterministic");
      }
      table[static_cast<std::size_t>(row)][static_cast<std::size_t>(axis)] = certain;
    }
  }
  return table;
}

const VaaTable& vaa_reference_table() {
  static const VaaTable table{{
      {{"up", "up", "up"}},
      {{"down", "down", "up"}},
      {{"up", "down", "down"}},
      {{"down", "up", "down"}},
  }};
  return table;
}

RewriteCheck bell_rewrite_check(bool flip_y_sign) {
  const VaaFixture& fx = VaaFixture::standard();
  const Vector& bell = fx.bell().amplitudes();
  RewriteCheck out;

  auto pair_state = [](const Vector& a, const Vector& c) {
    Vector v(4);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) v(2 * i + j) = a(i) * c(j);
    }
    return v;
  };

  // x basis: (|ux>|ux> + |dx>|dx>)/sqrt2.
  {
    const Matrix& bx = fx.spin(0).eigenbasis();
    Vector form = kInvSqrt2 * (pair_state(bx.col(0), bx.col(0)) + pair_state(bx.col(1), bx.col(1)));
    if ((form - bell).norm() > 1e-12) {
      return {false, "x-basis"};
    }
  }
  // y basis: anticorrelated pairing (|uy>|dy> + |dy>|uy>)/sqrt2.
  {
    const Matrix& by = fx.spin(1).eigenbasis();
    double sign = flip_y_sign ? -1.0 : 1.0;
    Vector form =
        kInvSqrt2 * (pair_state(by.col(0), by.col(1)) + sign * pair_state(by.col(1), by.col(0)));
    if ((form - bell).norm() > 1e-12) {
      return {false, "y-basis"};
    }
  }
  // R eigenstates: bell = (r1 + r2 + r3 + r4)/2.
  {
    Vector form = Vector::Zero(4);
    for (int k = 0; k < 4; ++k) form += 0.5 * fx.r_state(k).amplitudes();
    if ((form - bell).norm() > 1e-12) {
      return {false, "r-sum"};
    }
  }
  return out;
}

}  // namespace qbc::abl
