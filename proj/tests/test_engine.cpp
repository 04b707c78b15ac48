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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qbc/engine.hpp"

using namespace qbc;
using namespace qbc::engine;
using qbc::testing::random_state;
using qbc::testing::random_unitary;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

Register bell_register() {
  Vector v = Vector::Zero(4);
  v(0) = kInvSqrt2;
  v(3) = kInvSqrt2;
  return Register(StateVector({2, 2}, v),
                  {{"a", 2, Party::Alice}, {"c", 2, Party::Bob}});
}

Register single_qubit(const Vector& amps, Party owner = Party::Bob) {
  return Register(StateVector({2}, amps), {{"c", 2, owner}});
}

// Eigenvectors of sigma_x / sigma_y in the conventions of the library.
Vector xvec(int k) {
  Vector v(2);
  v << kInvSqrt2, (k == 0 ? 1.0 : -1.0) * kInvSqrt2;
  return v;
}

Vector yvec(int k) {
  Vector v(2);
  v << kInvSqrt2, (k == 0 ? kI : -kI) * kInvSqrt2;
  return v;
}

}  // namespace

TEST_CASE("apply identity leaves the state unchanged") {
  Register reg = bell_register();
  Register out = apply_unitary(reg, Matrix::Identity(2, 2), {"c"});
  CHECK((out.state().amplitudes() - reg.state().amplitudes()).norm() < 1e-15);
}

TEST_CASE("apply pauli-x flips a basis state") {
  Register reg = single_qubit((Vector(2) << 1, 0).finished());
  Register out = apply_unitary(reg, pauli_x(), {"c"});
  CHECK(std::abs(out.state().amplitude(1) - Complex(1.0)) < 1e-15);
}

TEST_CASE("apply_unitary validates inputs") {
  Register reg = bell_register();
  Matrix not_unitary = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(apply_unitary(reg, not_unitary, {"c"}), DomainError);
  CHECK_THROWS_AS(apply_unitary(reg, pauli_x(), {"nope"}), LookupError);
  CHECK_THROWS_AS(apply_unitary(reg, pauli_x(), {"a", "c"}), ShapeError);
}

TEST_CASE("apply_unitary respects the listed target order") {
  // SWAP-like check: build CNOT with control listed first, target second,
  // then exchange the listed order and verify the action moves with it.
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  Register reg = Register::ground({{"p", 2, Party::Alice}, {"q", 2, Party::Alice}});
  reg = apply_unitary(reg, pauli_x(), {"p"});  // |10>
  Register a = apply_unitary(reg, cnot, {"p", "q"});
  CHECK(std::abs(a.state().amplitude(3) - Complex(1.0)) < 1e-14);  // |11>
  Register b = apply_unitary(reg, cnot, {"q", "p"});
  CHECK(std::abs(b.state().amplitude(2) - Complex(1.0)) < 1e-14);  // control q=0: unchanged
}

TEST_CASE("measuring sigma_z on |up> is deterministic") {
  Register reg = single_qubit((Vector(2) << 1, 0).finished());
  RandomStream rng(1);
  auto [out, rec] = measure_projective(reg, sigma_z(), "c", rng);
  CHECK(rec.outcome == "up");
  CHECK(rec.probability == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("measuring sigma_x on |up> is uniform") {
  Register reg = single_qubit((Vector(2) << 1, 0).finished());
  auto probs = outcome_probabilities(reg, sigma_x(), "c");
  CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("collapse renormalizes and rotates back") {
  RandomStream rng(42);
  Register reg = single_qubit(random_state(rng, 2));
  auto [collapsed, rec] = project_outcome(reg, sigma_x(), "c", 0);
  CHECK(collapsed.state().amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(linalg::overlap_magnitude(collapsed.state().amplitudes(), xvec(0)) >
        1.0 - 1e-13);
}

TEST_CASE("pointer copy on an eigenstate is exact") {
  Register reg = single_qubit(xvec(0));
  Register out = purify_measurement(reg, sigma_x(), "c", "p", Party::Bob);
  // |x1>|p1> with p1 the first pointer basis state.
  Vector expect = linalg::tensor_product(StateVector({2}, xvec(0)),
                                         StateVector::basis(2, 0))
                      .amplitudes();
  CHECK((out.state().amplitudes() - expect).norm() < 1e-14);
  CHECK(out.subsystem("p").owner == Party::Bob);
}

TEST_CASE("pointer entangles with superposed eigenstates") {
  Complex alpha(0.6, 0.0), beta(0.0, 0.8);
  Vector psi = alpha * xvec(0) + beta * xvec(1);
  Register out = purify_measurement(single_qubit(psi), sigma_x(), "c", "p", Party::Bob);
  Vector expect = Vector::Zero(4);
  for (int i = 0; i < 2; ++i) {
    expect(2 * i + 0) += alpha * xvec(0)(i);
    expect(2 * i + 1) += beta * xvec(1)(i);
  }
  CHECK((out.state().amplitudes() - expect).norm() < 1e-12);
}

TEST_CASE("tracing the pointer equals the averaged collapse") {
  RandomStream rng(7);
  for (int it = 0; it < 10; ++it) {
    Register reg = single_qubit(random_state(rng, 2));
    Register purified = purify_measurement(reg, sigma_y(), "c", "p", Party::Bob);
    Matrix traced = reduced_state(purified, {"c"}).matrix();

    Matrix averaged = Matrix::Zero(2, 2);
    for (Index k = 0; k < 2; ++k) {
      auto [branch, rec] = project_outcome(reg, sigma_y(), "c", k);
      averaged += rec.probability *
                  (branch.state().amplitudes() * branch.state().amplitudes().adjoint());
    }
    CHECK((traced - averaged).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("purification soundness: pointer statistics equal direct measurement") {
  RandomStream rng(19);
  for (int it = 0; it < 10; ++it) {
    Register reg = single_qubit(random_state(rng, 2));
    auto direct = outcome_probabilities(reg, sigma_x(), "c");
    Register purified = purify_measurement(reg, sigma_x(), "c", "p", Party::Bob);
    auto pointer = outcome_probabilities(purified, computational_basis("pbasis", 2), "p");
    CHECK(std::abs(direct[0] - pointer[0]) < 1e-12);
    CHECK(std::abs(direct[1] - pointer[1]) < 1e-12);
  }
}

TEST_CASE("single-branch choice reduces to apply_unitary") {
  RandomStream rng(3);
  Vector psi = random_state(rng, 2);
  Matrix u = random_unitary(rng, 2);
  Register reg = single_qubit(psi);
  Register chosen = purify_choice(reg, {{u, {"c"}}}, {1.0}, "d", Party::Bob);
  Register applied = apply_unitary(reg, u, {"c"});
  REQUIRE(chosen.dim() == 2);  // die has dimension 1
  CHECK((chosen.state().amplitudes() - applied.state().amplitudes()).norm() < 1e-13);
}

TEST_CASE("two-branch choice builds the die superposition") {
  // |psi>|p0> with equal-weight deferred X-or-Y measurement.
  RandomStream rng(5);
  Vector psi = random_state(rng, 2);
  Register reg = single_qubit(psi);
  reg = append_subsystem(reg, {"p", 2, Party::Bob}, (Vector(2) << 1, 0).finished());

  std::vector<ChoiceBranch> branches{{measurement_unitary(sigma_x()), {"c", "p"}},
                                     {measurement_unitary(sigma_y()), {"c", "p"}}};
  Register out = purify_choice(reg, branches, {0.5, 0.5}, "d", Party::Bob);

  // Expected amplitudes, die appended last: [c, p, d].
  Vector expect = Vector::Zero(8);
  for (int w = 0; w < 2; ++w) {
    for (int k = 0; k < 2; ++k) {
      Vector vk = (w == 0) ? xvec(k) : yvec(k);
      Complex amp = vk.dot(psi) * kInvSqrt2;
      for (int i = 0; i < 2; ++i) expect(4 * i + 2 * k + w) += amp * vk(i);
    }
  }
  CHECK((out.state().amplitudes() - expect).norm() < 1e-12);
}

TEST_CASE("die-then-pointer statistics equal the honest choice statistics") {
  RandomStream rng(9);
  Vector psi = random_state(rng, 2);
  Register reg = single_qubit(psi);
  reg = append_subsystem(reg, {"p", 2, Party::Bob}, (Vector(2) << 1, 0).finished());
  Register out = purify_choice(reg,
                               {{measurement_unitary(sigma_x()), {"c", "p"}},
                                {measurement_unitary(sigma_y()), {"c", "p"}}},
                               {0.5, 0.5}, "d", Party::Bob);

  ObservableSpec die_basis = computational_basis("die", 2, {"X", "Y"});
  ObservableSpec pointer_basis = computational_basis("ptr", 2);
  for (Index w = 0; w < 2; ++w) {
    auto [after_die, die_rec] = project_outcome(out, die_basis, "d", w);
    CHECK(die_rec.probability == doctest::Approx(0.5).epsilon(1e-12));
    auto pointer_probs = outcome_probabilities(after_die, pointer_basis, "p");
    for (Index k = 0; k < 2; ++k) {
      Vector vk = (w == 0) ? xvec(static_cast<int>(k)) : yvec(static_cast<int>(k));
      double honest = std::norm(vk.dot(psi));
      CHECK(std::abs(pointer_probs[static_cast<std::size_t>(k)] - honest) < 1e-12);
    }
  }
}

TEST_CASE("deferred-choice soundness for unitary branches") {
  RandomStream rng(31);
  Vector psi = random_state(rng, 2);
  Matrix u0 = random_unitary(rng, 2), u1 = random_unitary(rng, 2);
  std::vector<double> weights{0.3, 0.7};
  Register reg = single_qubit(psi, Party::Alice);
  Register out = purify_choice(reg, {{u0, {"c"}}, {u1, {"c"}}}, weights, "d", Party::Bob);

  // Tracing the die equals the weighted mixture of honest branch outputs.
  Matrix traced = reduced_state(out, {"c"}).matrix();
  Matrix mixture = weights[0] * (u0 * psi) * (u0 * psi).adjoint() +
                   weights[1] * (u1 * psi) * (u1 * psi).adjoint();
  CHECK((traced - mixture).cwiseAbs().maxCoeff() < 1e-13);

  // Measuring the die instead collapses onto each honest branch.
  ObservableSpec die_basis = computational_basis("die", 2);
  for (Index k = 0; k < 2; ++k) {
    auto [branch, rec] = project_outcome(out, die_basis, "d", k);
    CHECK(rec.probability == doctest::Approx(weights[static_cast<std::size_t>(k)]).epsilon(1e-12));
    Matrix cond = reduced_state(branch, {"c"}).matrix();
    Vector honest = (k == 0 ? u0 : u1) * psi;
    CHECK((cond - honest * honest.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("purify_choice validates weights") {
  Register reg = single_qubit((Vector(2) << 1, 0).finished());
  CHECK_THROWS_AS(purify_choice(reg, {{pauli_x(), {"c"}}, {pauli_z(), {"c"}}}, {0.5, 0.6},
                                "d", Party::Bob),
                  DomainError);
}

TEST_CASE("conditional with identity cases is the identity") {
  Register reg = bell_register();
  reg = append_subsystem(reg, {"d", 2, Party::Bob}, (Vector(2) << kInvSqrt2, kInvSqrt2).finished());
  std::map<std::vector<Index>, Matrix> cases;
  cases[{0}] = Matrix::Identity(2, 2);
  cases[{1}] = Matrix::Identity(2, 2);
  Register out = purify_conditional(reg, {"d"}, cases, {"c"});
  CHECK((out.state().amplitudes() - reg.state().amplitudes()).norm() < 1e-14);
}

TEST_CASE("conditional rejects an incomplete case table") {
  Register reg = bell_register();
  reg = append_subsystem(reg, {"d", 2, Party::Bob}, (Vector(2) << 1, 0).finished());
  std::map<std::vector<Index>, Matrix> cases;
  cases[{0}] = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(purify_conditional(reg, {"d"}, cases, {"c"}), DomainError);
}

TEST_CASE("four-case conditional acts sector by sector") {
  // Controls: die (X/Y) and pointer (outcome 1/2); target: second channel
  // particle phi with its fresh pointer q0.
  RandomStream rng(11);
  Vector phi = random_state(rng, 2);
  Matrix u1 = random_unitary(rng, 2), u2 = random_unitary(rng, 2);

  auto build = [&](Index die, Index ptr) {
    Register reg = Register::ground({{"d", 2, Party::Bob}, {"p", 2, Party::Bob}});
    Matrix setup = Matrix::Identity(4, 4);
    Register staged = reg;
    if (die == 1) staged = apply_unitary(staged, pauli_x(), {"d"});
    if (ptr == 1) staged = apply_unitary(staged, pauli_x(), {"p"});
    (void)setup;
    staged = append_subsystem(staged, {"c2", 2, Party::Bob}, phi);
    staged = append_subsystem(staged, {"q", 2, Party::Bob}, (Vector(2) << 1, 0).finished());
    return staged;
  };

  std::map<std::vector<Index>, Matrix> cases;
  cases[{0, 0}] = measurement_unitary(sigma_x());
  cases[{0, 1}] = measurement_unitary(sigma_y());
  cases[{1, 0}] = linalg::tensor_product(u1, Matrix::Identity(2, 2));
  cases[{1, 1}] = linalg::tensor_product(u2, Matrix::Identity(2, 2));

  // Sector (dX, p1): the X measurement unitary must hit (c2, q).
  Register in = build(0, 0);
  Register out = purify_conditional(in, {"d", "p"}, cases, {"c2", "q"});
  Vector pair = Vector::Zero(4);
  for (int i = 0; i < 2; ++i) pair(2 * i) = phi(i);
  Vector expect_pair = measurement_unitary(sigma_x()) * pair;
  Vector expect = Vector::Zero(16);
  // layout [d, p, c2, q] with d=0, p=0.
  expect.segment(0, 4) = expect_pair;
  CHECK((out.state().amplitudes() - expect).norm() < 1e-12);

  // Sector (dY, p1): u1 acts on c2 alone, q untouched.
  Register in2 = build(1, 0);
  Register out2 = purify_conditional(in2, {"d", "p"}, cases, {"c2", "q"});
  Vector expect2 = Vector::Zero(16);
  Vector rotated = u1 * phi;
  for (int i = 0; i < 2; ++i) expect2(8 + 2 * i) = rotated(i);
  CHECK((out2.state().amplitudes() - expect2).norm() < 1e-12);
}

TEST_CASE("conditional is linear over control superpositions") {
  RandomStream rng(13);
  Vector phi = random_state(rng, 2);
  Matrix u0 = random_unitary(rng, 2), u1 = random_unitary(rng, 2);

  Register reg = Register::ground({{"d", 2, Party::Bob}});
  reg = apply_unitary(reg, hadamard(), {"d"});
  reg = append_subsystem(reg, {"c", 2, Party::Bob}, phi);

  std::map<std::vector<Index>, Matrix> cases;
  cases[{0}] = u0;
  cases[{1}] = u1;
  Register out = purify_conditional(reg, {"d"}, cases, {"c"});

  Vector expect = Vector::Zero(4);
  Vector b0 = u0 * phi, b1 = u1 * phi;
  for (int i = 0; i < 2; ++i) {
    expect(i) = kInvSqrt2 * b0(i);
    expect(2 + i) = kInvSqrt2 * b1(i);
  }
  CHECK((out.state().amplitudes() - expect).norm() < 1e-12);
}

TEST_CASE("reduced state of the Bell pair") {
  Register reg = bell_register();
  Matrix bob = reduced_state(reg, Party::Bob).matrix();
  CHECK((bob - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(reduced_state(reg, Party::Channel), DomainError);
}

TEST_CASE("reduced state of a product register is the exact factor") {
  RandomStream rng(15);
  Vector a = random_state(rng, 2), b = random_state(rng, 3);
  Register reg = tensor(Register(StateVector({2}, a), {{"a", 2, Party::Alice}}),
                        Register(StateVector({3}, b), {{"b", 3, Party::Bob}}));
  CHECK((reduced_state(reg, Party::Bob).matrix() - b * b.adjoint()).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("the other party cannot tell a deferred choice from an honest one") {
  // Alice's view of the channel particle: honest choose-and-measure versus
  // the deferred version must give the same reduced operator.
  RandomStream rng(21);
  for (int it = 0; it < 10; ++it) {
    Vector psi = random_state(rng, 2);
    Register reg = single_qubit(psi, Party::Alice);
    reg = append_subsystem(reg, {"p", 2, Party::Bob}, (Vector(2) << 1, 0).finished());
    Register purified = purify_choice(reg,
                                      {{measurement_unitary(sigma_x()), {"c", "p"}},
                                       {measurement_unitary(sigma_y()), {"c", "p"}}},
                                      {0.5, 0.5}, "d", Party::Bob);
    Matrix deferred = reduced_state(purified, {"c"}).matrix();

    Matrix honest = Matrix::Zero(2, 2);
    for (int w = 0; w < 2; ++w) {
      ObservableSpec obs = (w == 0) ? sigma_x() : sigma_y();
      for (Index k = 0; k < 2; ++k) {
        auto [branch, rec] = project_outcome(single_qubit(psi, Party::Alice), obs, "c", k);
        honest += 0.5 * rec.probability *
                  (branch.state().amplitudes() * branch.state().amplitudes().adjoint());
      }
    }
    CHECK((deferred - honest).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("measurements of different parties commute") {
  RandomStream rng(25);
  for (int it = 0; it < 10; ++it) {
    Vector psi = random_state(rng, 4);
    Register reg(StateVector({2, 2}, psi), {{"a", 2, Party::Alice}, {"c", 2, Party::Bob}});
    ObservableSpec oa = sigma_x(), ob = sigma_y();

    for (Index i = 0; i < 2; ++i) {
      for (Index j = 0; j < 2; ++j) {
        auto [after_a, rec_a] = project_outcome(reg, oa, "a", i);
        auto [after_ab, rec_ab] = project_outcome(after_a, ob, "c", j);
        double p_ab = rec_a.probability * rec_ab.probability;

        auto [after_b, rec_b] = project_outcome(reg, ob, "c", j);
        auto [after_ba, rec_ba] = project_outcome(after_b, oa, "a", i);
        double p_ba = rec_b.probability * rec_ba.probability;

        CHECK(std::abs(p_ab - p_ba) < 1e-12);
      }
    }
  }
}

TEST_CASE("operations preserve the norm") {
  RandomStream rng(33);
  Register reg(StateVector({2, 2}, random_state(rng, 4)),
               {{"a", 2, Party::Alice}, {"c", 2, Party::Bob}});
  Register r1 = apply_unitary(reg, random_unitary(rng, 2), {"c"});
  CHECK(r1.state().amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-13));
  Register r2 = purify_measurement(r1, sigma_y(), "c", "p", Party::Bob);
  CHECK(r2.state().amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-13));
  Register r3 = purify_choice(r2, {{pauli_x(), {"c"}}, {pauli_z(), {"c"}}}, {0.25, 0.75},
                              "d", Party::Bob);
  CHECK(r3.state().amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("pointer label collisions are rejected") {
  Register reg = bell_register();
  CHECK_THROWS_AS(purify_measurement(reg, sigma_x(), "c", "a", Party::Bob), LookupError);
}

TEST_CASE("permute_subsystems reorders amplitudes consistently") {
  RandomStream rng(37);
  Vector psi = random_state(rng, 8);
  Register reg(StateVector({2, 2, 2}, psi),
               {{"x", 2, Party::Alice}, {"y", 2, Party::Bob}, {"z", 2, Party::Bob}});
  Register out = permute_subsystems(reg, {"z", "x", "y"});
  for (Index x = 0; x < 2; ++x) {
    for (Index y = 0; y < 2; ++y) {
      for (Index z = 0; z < 2; ++z) {
        Complex orig = psi(4 * x + 2 * y + z);
        Complex moved = out.state().amplitude(4 * z + 2 * x + y);
        CHECK(std::abs(orig - moved) < 1e-15);
      }
    }
  }
}

TEST_CASE("three purified spin measurements on a Bell pair") {
  // Bob defers a uniformly random sigma_x / sigma_y / sigma_z measurement of
  // his half of a Bell pair: one shared pointer, one three-sided die.
  Register reg = bell_register();
  reg = append_subsystem(reg, {"p", 2, Party::Bob}, (Vector(2) << 1, 0).finished());
  std::vector<ChoiceBranch> branches{{measurement_unitary(sigma_x()), {"c", "p"}},
                                     {measurement_unitary(sigma_y()), {"c", "p"}},
                                     {measurement_unitary(sigma_z()), {"c", "p"}}};
  double w = 1.0 / 3.0;
  Register out = purify_choice(reg, branches, {w, w, w}, "d", Party::Bob);

  // Expected state, layout [a, c, p, d]: for each spin direction the Bell
  // pair decomposes into perfectly (anti)correlated eigenstate pairs.
  Vector expect = Vector::Zero(24);
  auto add_term = [&](const Vector& av, const Vector& cv, int ptr, int die, double weight) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        expect(12 * i + 6 * j + 3 * ptr + die) += weight * av(i) * cv(j);
      }
    }
  };
  double amp = kInvSqrt2 / std::sqrt(3.0);
  // sigma_x branch: (|ux>|ux>|p_up> + |dx>|dx>|p_down>)/sqrt2
  add_term(xvec(0), xvec(0), 0, 0, amp);
  add_term(xvec(1), xvec(1), 1, 0, amp);
  // sigma_y branch: (|uy>|dy>|p_down> + |dy>|uy>|p_up>)/sqrt2
  add_term(yvec(0), yvec(1), 1, 1, amp);
  add_term(yvec(1), yvec(0), 0, 1, amp);
  // sigma_z branch
  add_term((Vector(2) << 1, 0).finished(), (Vector(2) << 1, 0).finished(), 0, 2, amp);
  add_term((Vector(2) << 0, 1).finished(), (Vector(2) << 0, 1).finished(), 1, 2, amp);

  CHECK((out.state().amplitudes() - expect).norm() < 1e-12);
}
