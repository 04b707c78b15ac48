# Copyright 2026 The qbclab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import qbclab


BELL = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
BELL_SWAPPED = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)


def test_version():
    assert qbclab.__version__


def test_tensor_and_partial_trace():
    up = np.array([[1, 0], [0, 0]], dtype=complex)
    joint = qbclab.tensor_product(up, np.eye(2, dtype=complex) / 2)
    assert joint.shape == (4, 4)
    back = qbclab.partial_trace(joint, [2, 2], [0])
    assert np.allclose(back, up, atol=1e-14)


def test_schmidt_round_trip():
    rng = np.random.default_rng(7)
    psi = rng.normal(size=12) + 1j * rng.normal(size=12)
    psi /= np.linalg.norm(psi)
    sd = qbclab.schmidt_decompose(psi, 3, 4)
    assert np.allclose(sd.reconstruct(), psi, atol=1e-10)
    assert abs(np.sum(sd.coefficients**2) - 1.0) < 1e-12


def test_trace_distance_of_commitment_operators():
    w0 = np.eye(3, dtype=complex) / 3
    u = np.ones(3, dtype=complex) / math.sqrt(3)
    w1 = np.outer(u, u.conj())
    assert abs(qbclab.trace_distance(w0, w1) - 2 / 3) < 1e-12


def test_cheat_unitary_between_bell_states():
    report = qbclab.synthesize_cheat_unitary(BELL, BELL_SWAPPED, 2, 2)
    assert report.cheat_fidelity >= 1 - 1e-8
    check = qbclab.verify_binding_failure(report, BELL, BELL_SWAPPED, 2, 2)
    assert check.success


def test_distinguishable_pair_raises():
    psi0 = np.array([1, 0, 0, 0], dtype=complex)
    psi1 = np.array([0, 1, 0, 0], dtype=complex)
    with pytest.raises(qbclab.QbcError):
        qbclab.synthesize_cheat_unitary(psi0, psi1, 2, 2)
    report = qbclab.optimal_cheat_unitary(psi0, psi1, 2, 2)
    assert report.cheat_fidelity < 1e-10


def test_register_measurement():
    reg = qbclab.Register(BELL, [("a", 2, "alice"), ("c", 2, "bob")])
    probs = reg.outcome_probabilities(qbclab.sigma_z(), ["c"])
    assert np.allclose(probs, [0.5, 0.5], atol=1e-12)
    rho = reg.reduced_state_of("bob")
    assert np.allclose(rho, np.eye(2) / 2, atol=1e-12)


def test_vaa_table():
    table = qbclab.vaa_table()
    assert table == [
        ["up", "up", "up"],
        ["down", "down", "up"],
        ["up", "down", "down"],
        ["down", "up", "down"],
    ]
    ok, failing = qbclab.bell_rewrite_check()
    assert ok and failing == ""


def test_abl_probability():
    r1 = qbclab.builtin_script("vaa", 1)  # fixture states live in the library
    del r1
    # pre = post = |up>: a sigma_z measurement in between is certain.
    up = np.array([1, 0], dtype=complex)
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    pre = np.kron(up, plus)
    post = np.kron(up, plus)
    p = qbclab.abl_probability(pre, post, qbclab.sigma_z(), 0, "up")
    assert abs(p - 1.0) < 1e-12


def test_execute_and_replay():
    script = qbclab.builtin_script("vaa", 10)
    a = qbclab.execute(script, seed=42, mode="honest", commit=0)
    b = qbclab.execute(script, seed=42, mode="honest", commit=0)
    assert a == b
    transcript = json.loads(a)
    assert transcript["verdict"] == "accept"
    assert len(transcript["messages"]) == 10 + 2  # outcomes + commit + reveal


def test_parse_round_trip():
    source = qbclab.vaa_source(2)
    script = qbclab.parse(source)
    a = qbclab.execute(script, seed=5)
    b = qbclab.execute(qbclab.builtin_script("vaa", 2), seed=5)
    assert a == b


def test_commitment_states_and_audit():
    script = qbclab.builtin_script("vaa", 1)
    cheating = qbclab.commitment_states(script, "cheat:bob")
    assert abs(cheating["distance"] - 2 / 3) < 1e-10
    assert np.allclose(cheating["w_b0"], np.eye(3) / 3, atol=1e-10)
    honest = qbclab.commitment_states(script, "honest")
    assert honest["distance"] <= 1e-10

    audit = qbclab.audit_no_signalling(script)
    assert audit["ok"]

    epr = qbclab.builtin_script("epr", 1)
    cs = qbclab.commitment_states(epr, "honest")
    report = qbclab.synthesize_cheat_unitary(cs["psi0"], cs["psi1"], cs["dim_a"], cs["dim_b"])
    assert report.cheat_fidelity >= 1 - 1e-8
