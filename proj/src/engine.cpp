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

#include "qbc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qbc::engine {

namespace {

constexpr Complex kI(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Row-major strides for a dims list.
std::vector<Index> strides_of(const std::vector<Index>& dims) {
  std::vector<Index> stride(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) stride[i - 1] = stride[i] * dims[i];
  return stride;
}

// Flattened offsets of every multi-index over (sub_dims, sub_stride).
std::vector<Index> enumerate_offsets(const std::vector<Index>& sub_dims,
                                     const std::vector<Index>& sub_stride) {
  Index count = 1;
  for (Index d : sub_dims) count *= d;
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
}

}  // namespace

std::string to_string(Party p) {
  switch (p) {
    case Party::Alice: return "alice";
    case Party::Bob: return "bob";
    case Party::Channel: return "channel";
  }
  return "?";
}

Party party_from_string(const std::string& s) {
  if (s == "alice") return Party::Alice;
  if (s == "bob") return Party::Bob;
  if (s == "channel") return Party::Channel;
  throw LookupError("unknown party '" + s + "'");
}

// ---------------------------------------------------------------------------
// ObservableSpec
// ---------------------------------------------------------------------------

ObservableSpec::ObservableSpec(std::string label, Matrix eigenbasis,
                               std::vector<std::string> column_labels)
    : label_(std::move(label)),
      eigenbasis_(std::move(eigenbasis)),
      column_labels_(std::move(column_labels)) {
  if (eigenbasis_.rows() != eigenbasis_.cols()) {
    throw ShapeError("observable eigenbasis must be a complete (square) basis");
  }
  if (!linalg::is_unitary(eigenbasis_, 1e-12)) {
    throw DomainError("observable eigenbasis columns are not orthonormal");
  }
  if (static_cast<Index>(column_labels_.size()) != eigenbasis_.cols()) {
    throw ShapeError("one outcome label per eigenbasis column required");
  }
  for (const auto& l : column_labels_) {
    if (std::find(outcomes_.begin(), outcomes_.end(), l) == outcomes_.end()) {
      outcomes_.push_back(l);
    }
  }
  for (const auto& l : column_labels_) {
    column_outcome_.push_back(outcome_index(l));
  }
}

Index ObservableSpec::outcome_index(const std::string& outcome) const {
  for (std::size_t k = 0; k < outcomes_.size(); ++k) {
    if (outcomes_[k] == outcome) return static_cast<Index>(k);
  }
  throw LookupError("observable '" + label_ + "' has no outcome '" + outcome + "'");
}

Matrix ObservableSpec::projector(Index outcome) const {
  if (outcome < 0 || outcome >= outcome_count()) throw LookupError("outcome index out of range");
  Matrix p = Matrix::Zero(dim(), dim());
  for (Index j = 0; j < eigenbasis_.cols(); ++j) {
    if (outcome_of_column(j) == outcome) {
      p += eigenbasis_.col(j) * eigenbasis_.col(j).adjoint();
    }
  }
  return p;
}

ObservableSpec sigma_x() {
  Matrix b(2, 2);
  b << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return ObservableSpec("sx", b, {"up", "down"});
}

ObservableSpec sigma_y() {
  Matrix b(2, 2);
  b << kInvSqrt2, kInvSqrt2, kI * kInvSqrt2, -kI * kInvSqrt2;
  return ObservableSpec("sy", b, {"up", "down"});
}

ObservableSpec sigma_z() {
  return ObservableSpec("sz", Matrix::Identity(2, 2), {"up", "down"});
}

ObservableSpec computational_basis(const std::string& label, Index dim,
                                   std::vector<std::string> outcome_labels) {
  if (outcome_labels.empty()) {
    for (Index k = 0; k < dim; ++k) outcome_labels.push_back(std::to_string(k));
  }
  return ObservableSpec(label, Matrix::Identity(dim, dim), std::move(outcome_labels));
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix hadamard() {
  Matrix m(2, 2);
  m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return m;
}

// ---------------------------------------------------------------------------
// Register
// ---------------------------------------------------------------------------

Register::Register(StateVector state, std::vector<Subsystem> subsystems)
    : state_(std::move(state)), subs_(std::move(subsystems)) {
  if (subs_.size() != state_.factor_count()) {
    throw ShapeError("subsystem count does not match the state factorization");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    if (subs_[i].dim != state_.dims()[i]) {
      throw ShapeError("subsystem '" + subs_[i].label + "' dimension mismatch");
    }
    if (!seen.insert(subs_[i].label).second) {
      throw LookupError("duplicate subsystem label '" + subs_[i].label + "'");
    }
  }
}

Register Register::ground(std::vector<Subsystem> subsystems) {
  std::vector<Index> dims;
  Index total = 1;
  for (const auto& s : subsystems) {
    dims.push_back(s.dim);
    total *= s.dim;
  }
  Vector v = Vector::Zero(total);
  v(0) = 1.0;
  return Register(StateVector(dims, std::move(v)), std::move(subsystems));
}

bool Register::has(const std::string& label) const {
  for (const auto& s : subs_) {
    if (s.label == label) return true;
  }
  return false;
}

Index Register::position(const std::string& label) const {
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    if (subs_[i].label == label) return static_cast<Index>(i);
  }
  throw LookupError("no subsystem labeled '" + label + "'");
}

const Subsystem& Register::subsystem(const std::string& label) const {
  return subs_[static_cast<std::size_t>(position(label))];
}

Register Register::with_owner(const std::string& label, Party owner) const {
  std::vector<Subsystem> subs = subs_;
  subs[static_cast<std::size_t>(position(label))].owner = owner;
  return Register(state_, std::move(subs));
}

Register tensor(const Register& a, const Register& b) {
  for (const auto& s : b.subsystems()) {
    if (a.has(s.label)) throw LookupError("label collision on tensor: '" + s.label + "'");
  }
  std::vector<Subsystem> subs = a.subsystems();
  subs.insert(subs.end(), b.subsystems().begin(), b.subsystems().end());
  return Register(linalg::tensor_product(a.state(), b.state()), std::move(subs));
}

Register append_subsystem(const Register& reg, const Subsystem& sub, const Vector& initial) {
  if (reg.has(sub.label)) throw LookupError("label collision: '" + sub.label + "'");
  if (initial.size() != sub.dim) throw ShapeError("initial state dimension mismatch");
  return tensor(reg, Register(StateVector({sub.dim}, initial), {sub}));
}

Register permute_subsystems(const Register& reg, const std::vector<std::string>& order) {
  if (order.size() != reg.subsystems().size()) {
    throw ShapeError("permutation must list every subsystem exactly once");
  }
  std::vector<Index> src_pos;
  std::vector<Subsystem> new_subs;
  std::vector<Index> new_dims;
  for (const auto& label : order) {
    Index p = reg.position(label);
    src_pos.push_back(p);
    new_subs.push_back(reg.subsystems()[static_cast<std::size_t>(p)]);
    new_dims.push_back(new_subs.back().dim);
  }
  std::set<Index> unique(src_pos.begin(), src_pos.end());
  if (unique.size() != src_pos.size()) throw LookupError("permutation repeats a label");

  const auto& dims = reg.state().dims();
  auto old_stride = strides_of(dims);
  auto new_stride = strides_of(new_dims);

  Vector out(reg.dim());
  for (Index flat = 0; flat < reg.dim(); ++flat) {
    // flat indexes the new order; map each digit back to its source stride.
    Index r = flat, src = 0;
    for (std::size_t i = 0; i < new_dims.size(); ++i) {
      Index digit = r / new_stride[i];
      r %= new_stride[i];
      src += digit * old_stride[static_cast<std::size_t>(src_pos[i])];
    }
    out(flat) = reg.state().amplitude(src);
  }
  return Register(StateVector(new_dims, std::move(out)), std::move(new_subs));
}

// ---------------------------------------------------------------------------
// Local operator application
// ---------------------------------------------------------------------------

namespace {

struct TargetLayout {
  std::vector<Index> target_off;  // offsets of the target multi-index, listed order
  std::vector<Index> rest_off;    // offsets of every non-target configuration
  Index target_dim = 1;
};

TargetLayout layout_for(const Register& reg, const std::vector<std::string>& targets) {
  const auto& dims = reg.state().dims();
  auto stride = strides_of(dims);

  std::vector<bool> is_target(dims.size(), false);
  std::vector<Index> tdims, tstride;
  for (const auto& label : targets) {
    Index p = reg.position(label);
    if (is_target[static_cast<std::size_t>(p)]) {
      throw LookupError("repeated target label '" + label + "'");
    }
    is_target[static_cast<std::size_t>(p)] = true;
    tdims.push_back(dims[static_cast<std::size_t>(p)]);
    tstride.push_back(stride[static_cast<std::size_t>(p)]);
  }
  std::vector<Index> rdims, rstride;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!is_target[i]) {
      rdims.push_back(dims[i]);
      rstride.push_back(stride[i]);
    }
  }
  TargetLayout out;
  out.target_off = enumerate_offsets(tdims, tstride);
  out.rest_off = enumerate_offsets(rdims, rstride);
  for (Index d : tdims) out.target_dim *= d;
  return out;
}

}  // namespace

Register apply_unitary(const Register& reg, const Matrix& u, const std::vector<std::string>& targets) {
  if (targets.empty()) throw ShapeError("apply_unitary requires at least one target");
  TargetLayout lay = layout_for(reg, targets);
  if (u.rows() != lay.target_dim || u.cols() != lay.target_dim) {
    throw ShapeError("operator dimension does not match the product of target dimensions");
  }
  if (!linalg::is_unitary(u, linalg::kUnitaryTol)) {
    throw DomainError("operator is not unitary within tolerance");
  }

  Vector amps = reg.state().amplitudes();
  Vector scratch(lay.target_dim);
  for (std::size_t r = 0; r < lay.rest_off.size(); ++r) {
    Index base = lay.rest_off[r];
    for (Index t = 0; t < lay.target_dim; ++t) {
      scratch(t) = amps(base + lay.target_off[static_cast<std::size_t>(t)]);
    }
    Vector mixed = u * scratch;
    for (Index t = 0; t < lay.target_dim; ++t) {
      amps(base + lay.target_off[static_cast<std::size_t>(t)]) = mixed(t);
    }
  }
  return Register(StateVector(reg.state().dims(), std::move(amps)), reg.subsystems());
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

namespace {

// Amplitudes rotated into the observable eigenbasis on the target, plus the
// layout needed to address the target digit.
struct MeasurementContext {
  Vector rotated;
  TargetLayout lay;
  std::vector<double> outcome_probs;
};

MeasurementContext measurement_context(const Register& reg, const ObservableSpec& obs,
                                       const std::vector<std::string>& targets) {
  Index tdim = 1;
  for (const auto& label : targets) tdim *= reg.subsystem(label).dim;
  if (tdim != obs.dim()) {
    throw ShapeError("observable dimension does not match the measured subsystems");
  }
  MeasurementContext ctx{Vector(), layout_for(reg, targets), {}};

  Register rotated = apply_unitary(reg, obs.eigenbasis().adjoint(), targets);
  ctx.rotated = rotated.state().amplitudes();

  ctx.outcome_probs.assign(static_cast<std::size_t>(obs.outcome_count()), 0.0);
  for (std::size_t r = 0; r < ctx.lay.rest_off.size(); ++r) {
    for (Index j = 0; j < obs.dim(); ++j) {
      double p = std::norm(ctx.rotated(ctx.lay.rest_off[r] + ctx.lay.target_off[static_cast<std::size_t>(j)]));
      ctx.outcome_probs[static_cast<std::size_t>(obs.outcome_of_column(j))] += p;
    }
  }
  return ctx;
}

std::string joined_labels(const std::vector<std::string>& targets) {
  std::string out;
  for (const auto& t : targets) {
    if (!out.empty()) out += "+";
    out += t;
  }
  return out;
}

std::pair<Register, MeasurementRecord> collapse(const Register& reg, const ObservableSpec& obs,
                                                const std::vector<std::string>& targets,
                                                Index outcome, MeasurementContext& ctx) {
  double p = ctx.outcome_probs[static_cast<std::size_t>(outcome)];
  if (p <= 1e-15) throw DomainError("selected outcome branch has zero probability");

  Vector amps = std::move(ctx.rotated);
  for (std::size_t r = 0; r < ctx.lay.rest_off.size(); ++r) {
    for (Index j = 0; j < obs.dim(); ++j) {
      if (obs.outcome_of_column(j) != outcome) {
        amps(ctx.lay.rest_off[r] + ctx.lay.target_off[static_cast<std::size_t>(j)]) = 0.0;
      }
    }
  }
  amps /= std::sqrt(p);

  Register collapsed(StateVector(reg.state().dims(), std::move(amps)), reg.subsystems());
  collapsed = apply_unitary(collapsed, obs.eigenbasis(), targets);
  MeasurementRecord rec{joined_labels(targets), obs.label(),
                        obs.outcomes()[static_cast<std::size_t>(outcome)], outcome, p};
  return {std::move(collapsed), std::move(rec)};
}

}  // namespace

std::vector<double> outcome_probabilities(const Register& reg, const ObservableSpec& obs,
                                          const std::vector<std::string>& targets) {
  return measurement_context(reg, obs, targets).outcome_probs;
}

std::vector<double> outcome_probabilities(const Register& reg, const ObservableSpec& obs,
                                          const std::string& target) {
  return outcome_probabilities(reg, obs, std::vector<std::string>{target});
}

std::pair<Register, MeasurementRecord> measure_projective(const Register& reg,
                                                          const ObservableSpec& obs,
                                                          const std::vector<std::string>& targets,
                                                          RandomStream& rng) {
  MeasurementContext ctx = measurement_context(reg, obs, targets);
  Index outcome = static_cast<Index>(rng.sample(ctx.outcome_probs));
  return collapse(reg, obs, targets, outcome, ctx);
}

std::pair<Register, MeasurementRecord> measure_projective(const Register& reg,
                                                          const ObservableSpec& obs,
                                                          const std::string& target,
                                                          RandomStream& rng) {
  return measure_projective(reg, obs, std::vector<std::string>{target}, rng);
}

std::pair<Register, MeasurementRecord> project_outcome(const Register& reg,
                                                       const ObservableSpec& obs,
                                                       const std::vector<std::string>& targets,
                                                       Index outcome) {
  if (outcome < 0 || outcome >= obs.outcome_count()) throw LookupError("outcome index out of range");
  MeasurementContext ctx = measurement_context(reg, obs, targets);
  return collapse(reg, obs, targets, outcome, ctx);
}

std::pair<Register, MeasurementRecord> project_outcome(const Register& reg,
                                                       const ObservableSpec& obs,
                                                       const std::string& target, Index outcome) {
  return project_outcome(reg, obs, std::vector<std::string>{target}, outcome);
}

// ---------------------------------------------------------------------------
// Purification constructions
// ---------------------------------------------------------------------------

Matrix measurement_unitary(const ObservableSpec& obs) {
  Index d = obs.dim();
  Index m = obs.outcome_count();
  // Shift |p> -> |p+1 mod m> on the pointer.
  Matrix shift = Matrix::Zero(m, m);
  for (Index p = 0; p < m; ++p) shift((p + 1) % m, p) = 1.0;

  Matrix u = Matrix::Zero(d * m, d * m);
  for (Index j = 0; j < d; ++j) {
    Matrix proj = obs.eigenbasis().col(j) * obs.eigenbasis().col(j).adjoint();
    Matrix power = Matrix::Identity(m, m);
    for (Index k = 0; k < obs.outcome_of_column(j); ++k) power = shift * power;
    u += linalg::tensor_product(proj, power);
  }
  return u;
}

Register purify_measurement(const Register& reg, const ObservableSpec& obs,
                            const std::vector<std::string>& targets,
                            const std::string& pointer_label, Party owner) {
  Index tdim = 1;
  for (const auto& label : targets) tdim *= reg.subsystem(label).dim;
  if (tdim != obs.dim()) {
    throw ShapeError("observable dimension does not match the measured subsystems");
  }
  Index m = obs.outcome_count();
  Vector p0 = Vector::Zero(m);
  p0(0) = 1.0;
  Register extended = append_subsystem(reg, Subsystem{pointer_label, m, owner}, p0);
  std::vector<std::string> all = targets;
  all.push_back(pointer_label);
  return apply_unitary(extended, measurement_unitary(obs), all);
}

Register purify_measurement(const Register& reg, const ObservableSpec& obs,
                            const std::string& target, const std::string& pointer_label,
                            Party owner) {
  return purify_measurement(reg, obs, std::vector<std::string>{target}, pointer_label, owner);
}

Register purify_choice(const Register& reg, const std::vector<ChoiceBranch>& branches,
                       const std::vector<double>& weights, const std::string& die_label,
                       Party owner) {
  if (branches.empty()) throw DomainError("purify_choice requires at least one branch");
  if (weights.size() != branches.size()) {
    throw ShapeError("one weight per branch required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("branch weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > linalg::kNormTol) {
    throw DomainError("branch weights must sum to 1");
  }
  const auto& targets = branches.front().targets;
  Index tdim = 1;
  for (const auto& label : targets) tdim *= reg.subsystem(label).dim;
  for (const auto& b : branches) {
    if (b.targets != targets) {
      throw DomainError("all choice branches must share one target signature");
    }
    if (b.unitary.rows() != tdim || b.unitary.cols() != tdim) {
      throw ShapeError("branch unitary dimension mismatch");
    }
  }

  Index k = static_cast<Index>(branches.size());
  Vector die(k);
  for (Index i = 0; i < k; ++i) die(i) = std::sqrt(weights[static_cast<std::size_t>(i)]);
  Register extended = append_subsystem(reg, Subsystem{die_label, k, owner}, die);

  // Controlled-branch unitary with the die as the slowest factor.
  Matrix v = Matrix::Zero(k * tdim, k * tdim);
  for (Index i = 0; i < k; ++i) {
    v.block(i * tdim, i * tdim, tdim, tdim) = branches[static_cast<std::size_t>(i)].unitary;
  }
  std::vector<std::string> all_targets{die_label};
  all_targets.insert(all_targets.end(), targets.begin(), targets.end());
  return apply_unitary(extended, v, all_targets);
}

Register purify_conditional(const Register& reg, const std::vector<std::string>& control_labels,
                            const std::map<std::vector<Index>, Matrix>& case_table,
                            const std::vector<std::string>& targets) {
  if (control_labels.empty()) throw ShapeError("purify_conditional requires control subsystems");
  std::vector<Index> cdims;
  Index cdim = 1;
  for (const auto& label : control_labels) {
    cdims.push_back(reg.subsystem(label).dim);
    cdim *= cdims.back();
  }
  Index tdim = 1;
  for (const auto& label : targets) tdim *= reg.subsystem(label).dim;

  // Every control basis string needs an explicit case.
  if (static_cast<Index>(case_table.size()) != cdim) {
    throw DomainError("case table must cover every control basis string (" +
                      std::to_string(case_table.size()) + " of " + std::to_string(cdim) +
                      " given)");
  }

  Matrix u = Matrix::Zero(cdim * tdim, cdim * tdim);
  for (const auto& [key, mat] : case_table) {
    if (key.size() != cdims.size()) throw ShapeError("case key arity mismatch");
    Index flat = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] < 0 || key[i] >= cdims[i]) throw ShapeError("case key digit out of range");
      flat = flat * cdims[i] + key[i];
    }
    if (mat.rows() != tdim || mat.cols() != tdim) throw ShapeError("case unitary dimension mismatch");
    u.block(flat * tdim, flat * tdim, tdim, tdim) = mat;
  }

  std::vector<std::string> all_targets = control_labels;
  all_targets.insert(all_targets.end(), targets.begin(), targets.end());
  return apply_unitary(reg, u, all_targets);
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

DensityOperator reduced_state(const Register& reg, Party owner) {
  std::vector<Index> keep;
  for (std::size_t i = 0; i < reg.subsystems().size(); ++i) {
    if (reg.subsystems()[i].owner == owner) keep.push_back(static_cast<Index>(i));
  }
  if (keep.empty()) throw DomainError("party owns no subsystem of this register");
  Matrix rho = reg.state().amplitudes() * reg.state().amplitudes().adjoint();
  return DensityOperator(linalg::partial_trace(rho, reg.state().dims(), keep));
}

DensityOperator reduced_state(const Register& reg, const std::vector<std::string>& labels) {
  std::vector<Index> keep;
  for (const auto& label : labels) keep.push_back(reg.position(label));
  std::sort(keep.begin(), keep.end());
  Matrix rho = reg.state().amplitudes() * reg.state().amplitudes().adjoint();
  return DensityOperator(linalg::partial_trace(rho, reg.state().dims(), keep));
}

}  // namespace qbc::engine
