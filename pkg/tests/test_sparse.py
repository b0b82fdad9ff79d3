import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacetime_qlbm import sparse as sp
from spacetime_qlbm.realizability import CBS_PSI1
from spacetime_qlbm.validation import random_circuit, random_sparse_state

R2 = 1 / math.sqrt(2)


def test_init_basis():
    assert dict(sp.init_basis(4, "1010").amplitudes) == {0b1010: 1.0}
    s = sp.init_basis(20, 0)
    assert len(s) == 1 and s[0] == 1.0
    with pytest.raises(sp.RegisterError):
        sp.init_basis(4, "10100")


def test_label_order_is_big_endian():
    # qubit 0 is the leftmost character
    assert sp.get_bit(sp.parse_label("1000", 4), 0, 4) == 1
    assert sp.format_label(0b0110, 4) == "0110"


def test_superpose():
    s = sp.superpose([(1, "0000"), (1, "1111")])
    assert s["0000"] == pytest.approx(R2) and s["1111"] == pytest.approx(R2)
    psi = sp.superpose([(1, t) for t in CBS_PSI1])
    assert all(abs(psi[t] - 0.5) < 1e-15 for t in CBS_PSI1)
    assert dict(sp.superpose([(2, "01"), (0, "10")]).amplitudes) == {0b01: 1.0}
    with pytest.raises(ValueError):
        sp.superpose([(0, "01")])


def test_cnot():
    out = sp.apply_gate(sp.init_basis(2, "10"), sp.CNOT(0, 1))
    assert dict(out.amplitudes) == {0b11: 1.0}


def test_permute_swaps_pairs():
    n = 20
    pairs = {0: 12, 1: 17, 2: 6, 3: 11}
    sources = {}
    for a, b in pairs.items():
        sources[a], sources[b] = b, a
    label = "11010000000000000000"
    out = sp.apply_gate(sp.init_basis(n, label), sp.PERMUTE(sources))
    expected = list(label)
    for a, b in pairs.items():
        expected[a], expected[b] = expected[b], expected[a]
    assert sp.format_label(next(iter(out.amplitudes)), n) == "".join(expected)


def test_mcrot():
    out = sp.apply_gate(sp.init_basis(4, "1110"), sp.MCROT((0, 1, 2), 3, R2, R2))
    assert out["1110"] == pytest.approx(R2) and out["1111"] == pytest.approx(R2)
    # controls not all set: untouched
    out = sp.apply_gate(sp.init_basis(4, "1010"), sp.MCROT((0, 1, 2), 3, R2, R2))
    assert dict(out.amplitudes) == {0b1010: 1.0}
    with pytest.raises(ValueError):
        sp.MCROT((0,), 1, 0.8, 0.7)


def test_inner_product():
    a = sp.superpose([(1, "00"), (1, "01")])
    b = sp.superpose([(1j, "01")])
    assert sp.inner_product(a, b) == pytest.approx(1j * R2)
    assert sp.inner_product(a, a) == pytest.approx(1.0)


def test_dense_ordering():
    assert np.array_equal(sp.to_dense(sp.init_basis(2, "01")), [0, 1, 0, 0])


def test_empty_circuit_is_identity():
    op = sp.circuit_to_operator(sp.Circuit(3, []))
    assert np.array_equal(op, np.eye(8))
    assert sp.unitarity_check(op).max_deviation == 0


def test_operator_cap():
    with pytest.raises(sp.RegisterTooLargeError):
        sp.circuit_to_operator(sp.Circuit(13, []))


def test_layers_must_be_disjoint():
    with pytest.raises(ValueError, match="overlap"):
        sp.Circuit(3, [sp.SWAP(0, 1), sp.SWAP(1, 2)], [0, 0])
    c = sp.Circuit(4, [sp.SWAP(0, 1), sp.SWAP(2, 3)], [0, 0])
    assert c.depth() == 1


def test_budget():
    n = 6
    circuit = sp.Circuit(n, [sp.MCROT((), q, R2, R2) for q in range(n)])
    with pytest.raises(MemoryError):
        sp.apply_circuit(sp.init_basis(n, 0), circuit, max_entries=16)
    assert len(sp.apply_circuit(sp.init_basis(n, 0), circuit, max_entries=64)) == 64


def test_marginal():
    s = sp.superpose([(1, "000"), (1, "110")])
    assert s.marginal([0]) == pytest.approx({"0": 0.5, "1": 0.5})
    assert s.marginal([2]) == pytest.approx({"0": 1.0})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 30))
def test_sparse_matches_dense(seed, n, length):
    rng = np.random.default_rng(seed)
    circuit = random_circuit(rng, n, length)
    state = random_sparse_state(rng, n)
    sparse_vec = sp.to_dense(sp.apply_circuit(state, circuit))
    dense_vec = sp.apply_circuit_dense(sp.to_dense(state), circuit)
    assert np.max(np.abs(sparse_vec - dense_vec)) < 1e-10
    assert sp.apply_circuit(state, circuit).norm() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_random_circuits_unitary(seed, n):
    circuit = random_circuit(np.random.default_rng(seed), n, 20)
    assert sp.unitarity_check(sp.circuit_to_operator(circuit)).passed
