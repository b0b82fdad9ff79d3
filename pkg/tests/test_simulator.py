import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacetime_qlbm.lattice import OccupancyField, build_descriptor, evolve_classical
from spacetime_qlbm.simulator import (BeyondVicinityError, BudgetError, FocalDistribution, RunConfig, Window,
                                      classical_ensemble_oracle, classical_focal_evolution, compare,
                                      decode_window, encode_window, full_grid_run, run, sample_focal)
from spacetime_qlbm.spacetime import enumerate_vicinity

R2 = 1 / math.sqrt(2)


def focal(lattice, nt, pattern):
    return Window.from_patterns(lattice, nt, {(0,) * build_descriptor(lattice).dimension: pattern})


def test_encode_focal_only():
    state = encode_window(enumerate_vicinity("D2Q4", 0), focal("D2Q4", 0, "0110"))
    assert dict(state.amplitudes) == {0b0110: 1.0}
    layout = enumerate_vicinity("D2Q4", 1)
    (key,) = encode_window(layout, focal("D2Q4", 1, "1010")).amplitudes
    assert format(key, "020b") == "10100000000000000000"
    assert dict(encode_window(layout, Window("D2Q4", 1)).amplitudes) == {0: 1.0}
    assert decode_window(layout, key) == focal("D2Q4", 1, "1010")


def test_window_beyond_vicinity_rejected():
    with pytest.raises(BeyondVicinityError):
        Window("D2Q4", 1, frozenset({((2, 0), 0)}))
    with pytest.raises(BeyondVicinityError):
        RunConfig("D2Q4", 1, initial=Window("D2Q4", 2, frozenset({((2, 0), 0)})))


def test_small_window_is_padded():
    res = run(RunConfig("D2Q4", 2, initial=focal("D2Q4", 0, "1111")))
    assert res.layout.num_qubits == 52


def test_head_on_collision_leaves_focal_empty():
    res = run(RunConfig("D2Q4", 1, 0, 1, focal("D2Q4", 1, "1010")))
    assert res.focal.probs == {"0000": 1.0}
    assert len(res.state) == 1


def test_identity_collision_stays_basis():
    rng = np.random.default_rng(0)
    for _ in range(10):
        res = run(RunConfig("D2Q4", 2, 1, 0, Window.random("D2Q4", 2, rng)))
        assert res.peak_entries == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_d1q2_matches_streaming(seed, nt):
    win = Window.random("D1Q2", nt, np.random.default_rng(seed))
    cfg = RunConfig("D1Q2", nt, R2, R2, win)
    res = run(cfg)
    assert res.focal.probs == {classical_focal_evolution(win, nt, "identity"): 1.0}
    assert compare(cfg).tv_distance == 0


@pytest.mark.parametrize("order", ["collide-stream", "stream-collide"])
@pytest.mark.parametrize("lattice", ["D2Q4", "D2Q5"])
def test_deterministic_runs_match_classical(order, lattice):
    rng = np.random.default_rng(hash((order, lattice)) % 2**32)
    for nt in (1, 2, 3):
        for _ in range(15):
            win = Window.random(lattice, nt, rng)
            res = run(RunConfig(lattice, nt, 0, 1, win, order))
            assert res.focal.probs == {classical_focal_evolution(win, nt, "swap-class", order): 1.0}


def test_ensemble_oracle_branches():
    win = focal("D2Q4", 1, "1010")
    cfg = RunConfig("D2Q4", 1, R2, R2, win, "stream-collide")
    # stream first: the pair leaves, nothing collides
    assert classical_ensemble_oracle(cfg).distribution.probs == {"0000": 1.0}
    arriving = Window("D2Q4", 1, frozenset({((-1, 0), 0), ((1, 0), 2)}))
    cfg = RunConfig("D2Q4", 1, R2, R2, arriving, "stream-collide")
    oracle = classical_ensemble_oracle(cfg)
    assert oracle.distribution.probs == pytest.approx({"1010": 0.5, "0101": 0.5})
    assert run(cfg).focal.probs == pytest.approx({"1010": 0.5, "0101": 0.5})
    det = classical_ensemble_oracle(RunConfig("D2Q4", 1, 0, 1, arriving, "stream-collide"))
    assert det.distribution.probs == {"0101": 1.0}


def test_interference_flagged():
    horizontal = Window("D2Q4", 1, frozenset({((-1, 0), 0), ((1, 0), 2)}))
    vertical = Window("D2Q4", 1, frozenset({((0, -1), 1), ((0, 1), 3)}))
    cfg = RunConfig("D2Q4", 1, R2, R2, [(1, horizontal), (1, vertical)], "stream-collide")
    res = run(cfg)
    # (|1010> + |0101>)/sqrt2 rotates onto |0101>: the branches interfere
    assert res.focal.probs == pytest.approx({"0101": 1.0})
    report = compare(cfg)
    assert report.interfering and report.mode == "expected-mismatch"
    assert report.tv_distance == pytest.approx(0.5)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_superposed_non_interfering_agrees(seed):
    win = Window.random("D2Q4", 2, np.random.default_rng(seed), density=0.3)
    report = compare(RunConfig("D2Q4", 2, R2, R2, win))
    if not report.interfering:
        assert report.passed


def test_budget_error():
    rng = np.random.default_rng(3)
    win = Window.random("D2Q4", 3, rng, density=0.5)
    with pytest.raises(BudgetError):
        run(RunConfig("D2Q4", 3, R2, R2, Window("D2Q4", 3, win.occupied | {((0, 0), 0), ((0, 0), 2)}),
                      max_entries=1))


def test_full_grid_figure_settings():
    d = build_descriptor("D1Q2")
    for before, after in ((("00", "11", "10", "10"), ["11", "00", "10", "10"]),
                          (("01", "01", "00", "11"), ["11", "00", "01", "01"])):
        init = OccupancyField.from_site_patterns(d, (4,), before)
        fields = full_grid_run(RunConfig("D1Q2", 8, initial=init, mode="full-grid")).fields
        assert fields[1].site_patterns() == after
        assert fields[-1] == init
        # a single mover needs exactly 4 steps around the ring
        assert fields[4] == init


def test_full_grid_d2q4_matches_classical():
    rng = np.random.default_rng(5)
    d = build_descriptor("D2Q4")
    for order in ("collide-stream", "stream-collide"):
        init = OccupancyField.random(d, (2, 2), rng)
        res = full_grid_run(RunConfig("D2Q4", 4, 0, 1, init, order, mode="full-grid"))
        assert list(res.fields) == evolve_classical(init, 4, "swap-class", order)


def test_full_grid_budget():
    with pytest.raises(BudgetError):
        RunConfig("D2Q4", 1, initial=OccupancyField.zeros(build_descriptor("D2Q4"), (3, 3)), mode="full-grid")


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig("D2Q4", 1, 0.8, 0.7)
    with pytest.raises(ValueError):
        RunConfig("D2Q4", 1, order="sideways")


def test_sampling_is_seeded():
    dist = FocalDistribution({"1010": 0.5, "0101": 0.5})
    a = sample_focal(dist, 1000, seed=4)
    assert a == sample_focal(dist, 1000, seed=4)
    assert sum(a.values()) == 1000
