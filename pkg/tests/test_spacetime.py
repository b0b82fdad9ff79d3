import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacetime_qlbm import sparse as sp
from spacetime_qlbm.lattice import build_descriptor, stream_classical
from spacetime_qlbm.simulator import Window, embed_window
from spacetime_qlbm.spacetime import (CollisionParams, UnsupportedLatticeError, collision_count_formula,
                                      collision_local_circuit, collision_total_circuit, depth_bound,
                                      enumerate_vicinity, qubit_count_formula, schedule, streaming_step,
                                      swap_count_formula, von_neumann_size)

R2 = 1 / math.sqrt(2)


def brute_offsets(nt):
    return {(x, y) for x in range(-nt, nt + 1) for y in range(-nt, nt + 1) if abs(x) + abs(y) <= nt}


@pytest.mark.parametrize("nt, qubits", [(0, 4), (1, 20), (2, 52), (3, 100)])
def test_vicinity_size(nt, qubits):
    layout = enumerate_vicinity("D2Q4", nt)
    assert layout.num_qubits == qubits == qubit_count_formula("D2Q4", nt)
    assert set(layout.offsets) == brute_offsets(nt)
    assert layout.focal_qubits == (0, 1, 2, 3)


def test_layout_is_bijection():
    layout = enumerate_vicinity("D2Q5", 3)
    qubits = [layout.qubit(o, j) for o in layout.offsets for j in range(5)]
    assert sorted(qubits) == list(range(layout.num_qubits))
    assert all(layout.site(layout.qubit(o, j)) == (o, j) for o in layout.offsets for j in range(5))


def test_regions_are_prefixes():
    layout = enumerate_vicinity("D2Q4", 4)
    for r in range(5):
        assert set(layout.region(r)) == brute_offsets(r)


def test_other_lattices():
    assert enumerate_vicinity("D1Q2", 3).num_qubits == 14
    assert enumerate_vicinity("D1Q3", 2).num_qubits == 15
    assert qubit_count_formula("D2Q5", 1) == 25
    assert von_neumann_size(1, 4) == 9


def test_count_examples():
    assert qubit_count_formula("D2Q4", 2) == 52
    assert swap_count_formula("D2Q4", 1, 1) == 4
    assert all(collision_count_formula("D2Q4", nt, nt) == 1 for nt in range(1, 7))
    with pytest.raises(ValueError):
        swap_count_formula("D2Q4", 2, 3)


@pytest.mark.parametrize("nt, t, c", [(1, 1, 1), (2, 1, 5), (3, 1, 13)])
def test_collision_counts(nt, t, c):
    layout = enumerate_vicinity("D2Q4", nt)
    circuit = collision_total_circuit(layout, CollisionParams(R2, R2), t)
    assert len(circuit) == 7 * c and circuit.count("MCROT") == c


@pytest.mark.parametrize("lattice", ["D2Q4", "D2Q5", "D1Q2", "D1Q3"])
def test_swap_counts_all_lattices(lattice):
    for nt in range(1, 5):
        layout = enumerate_vicinity(lattice, nt)
        for t in range(1, nt + 1):
            assert streaming_step(layout, t)[0].count("SWAP") == swap_count_formula(lattice, nt, t)


def test_collision_operator():
    a, b = 0.6, 0.8j
    op = sp.circuit_to_operator(collision_local_circuit(CollisionParams(a, b)))
    e = np.eye(16)
    assert np.allclose(op @ e[0b1010], a * e[0b1010] + b * e[0b0101])
    assert np.allclose(op @ e[0b0101], -np.conj(b) * e[0b1010] + np.conj(a) * e[0b0101])
    for k in set(range(16)) - {0b1010, 0b0101}:
        assert np.array_equal(op[:, k], e[k])
    assert sp.unitarity_check(op).passed


def test_collision_examples():
    swap = collision_local_circuit(CollisionParams(0, 1))
    assert dict(sp.apply_circuit(sp.init_basis(4, "1010"), swap).amplitudes) == {0b0101: 1}
    assert dict(sp.apply_circuit(sp.init_basis(4, "1111"), swap).amplitudes) == {0b1111: 1}
    mix = collision_local_circuit(CollisionParams(R2, R2))
    out = sp.apply_circuit(sp.init_basis(4, "0101"), mix)
    assert out["1010"] == pytest.approx(-R2) and out["0101"] == pytest.approx(R2)


def test_single_step_swap_pairs():
    layout = enumerate_vicinity("D2Q4", 1)
    circuit, _ = streaming_step(layout, 1)
    d = build_descriptor("D2Q4")
    expected = {frozenset((layout.qubit((0, 0), j), layout.qubit(tuple(-c for c in d.velocities[j]), j)))
                for j in range(4)}
    assert {frozenset(g.qubits) for g in circuit.gates} == expected
    assert circuit.depth() == 1


def test_schedule_empty_for_zero_extent():
    assert schedule(enumerate_vicinity("D2Q4", 0), CollisionParams()) == []


def test_depth_examples():
    layout = enumerate_vicinity("D2Q4", 4)
    assert streaming_step(layout, 1)[0].depth() <= 6 == depth_bound(4, 1)
    assert streaming_step(layout, 4)[0].depth() == 1


def test_unsupported():
    with pytest.raises(ValueError):
        enumerate_vicinity("D2Q4", -1)
    assert issubclass(UnsupportedLatticeError, ValueError)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["D1Q2", "D1Q3", "D2Q4", "D2Q5"]), st.integers(1, 3))
def test_streaming_matches_classical(seed, lattice, nt):
    # after the swap network, every retained qubit holds the classically streamed bit
    rng = np.random.default_rng(seed)
    layout = enumerate_vicinity(lattice, nt)
    window = Window.random(lattice, nt, rng)
    field, center = embed_window(window)
    for t in range(1, nt + 1):
        circuit, sources = streaming_step(layout, t)
        key = sp.parse_label("".join(str(window.bit(*layout.site(q))) for q in range(layout.num_qubits)),
                             layout.num_qubits)
        out = next(iter(sp.apply_circuit(sp.SparseState(layout.num_qubits, {key: 1.0}), circuit).amplitudes))
        streamed = stream_classical(field)
        ext = field.extents
        for o in layout.region(nt - t):
            for j in range(layout.descriptor.m):
                site = tuple((c + x) % e for c, x, e in zip(center, o, ext))
                assert sp.get_bit(out, layout.qubit(o, j), layout.num_qubits) == streamed.occ[site + (j,)]
        assert sp.circuit_permutation(circuit) == sources
