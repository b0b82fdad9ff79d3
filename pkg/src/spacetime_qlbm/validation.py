"""Acceptance checks, shared by ``validate`` on the command line and the test suite.

Each check returns a :class:`CheckResult`; nothing here raises on a
failed property, exceptions inside a check count as a failure.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import realizability as rz
from . import sparse as sp
from .lattice import (OccupancyField, build_descriptor, equivalence_classes, mass_momentum, parse_pattern,
                      stream_classical)
from .simulator import (RunConfig, Window, classical_ensemble_oracle, classical_focal_evolution, decode_window,
                        embed_window, encode_window, full_grid_run, run)
from .spacetime import (CollisionParams, collision_count_formula, collision_local_circuit,
                        collision_total_circuit, depth_bound, enumerate_vicinity, qubit_count_formula,
                        streaming_step, swap_count_formula)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    values: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _random_params(rng: np.random.Generator) -> CollisionParams:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z /= np.linalg.norm(z)
    return CollisionParams(complex(z[0]), complex(z[1]))


# 1 ---------------------------------------------------------------------------

def check_cbs_nogo(**_) -> CheckResult:
    start = time.perf_counter()
    spec = rz.cbs_nogo_instance()
    report = rz.gram_check(spec)
    elapsed = time.perf_counter() - start
    inner_in, inner_out = report.gram_in[0, 1], report.gram_out[0, 1]
    ok = (abs(inner_in - 0) <= 1e-12 and abs(inner_out - 0.5) <= 1e-12
          and not report.realizable and elapsed < 1.0)
    return CheckResult("cbs streaming no-go", ok,
                       f"<psi1|psi2> = {inner_in.real:.12g}, <psi1'|psi2'> = {inner_out.real:.12g}, "
                       f"{elapsed * 1e3:.1f} ms",
                       {"in": inner_in, "out": inner_out, "seconds": elapsed})


# 2 ---------------------------------------------------------------------------

def check_amplitude_nogo(samples: int = 100, seed: int = 2, **_) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        p = rz.AmplitudeNogoParams.random(rng)
        report = rz.gram_check(rz.amplitude_nogo_instance(p))
        measured = abs(report.gram_in[0, 1] - report.gram_out[0, 1])
        worst = max(worst, abs(measured - abs(p.gamma1) * abs(p.beta2)))
        if report.realizable:
            worst = math.inf
    trivial = rz.gram_check(rz.amplitude_nogo_instance(rz.AmplitudeNogoParams.from_gamma_beta(0.0, 0.6)))
    ok = worst <= 1e-12 and trivial.realizable
    return CheckResult("amplitude collision no-go", ok,
                       f"max | violation - |g1 b2| | = {worst:.2e} over {samples} sets; "
                       f"gamma1=0 realizable: {trivial.realizable}", {"worst": worst})


# 3 ---------------------------------------------------------------------------

def check_qubit_count(nt_max: int = 8, **_) -> CheckResult:
    bad = [nt for nt in range(nt_max + 1)
           if enumerate_vicinity("D2Q4", nt).num_qubits != 8 * nt * nt + 8 * nt + 4
           or qubit_count_formula("D2Q4", nt) != 8 * nt * nt + 8 * nt + 4]
    single = enumerate_vicinity("D2Q4", 1).num_qubits
    return CheckResult("qubit count 8Nt^2+8Nt+4", not bad and single == 20,
                       f"N_t=0..{nt_max} agree; N_t=1 -> {single} qubits" if not bad else f"mismatch at {bad}",
                       {"n1": single})


# 4 ---------------------------------------------------------------------------

def check_collision_unitarity(samples: int = 50, seed: int = 4, inject_fault: bool = False, **_) -> CheckResult:
    rng = np.random.default_rng(seed)
    d = build_descriptor("D2Q4")
    classes = equivalence_classes(d)
    worst, identity_ok, conserve_ok = 0.0, True, True
    for k in range(samples):
        params = _random_params(rng)
        if inject_fault and k == 0:
            params = CollisionParams(0.8, 0.7)
        op = sp.circuit_to_operator(collision_local_circuit(params))
        worst = max(worst, sp.unitarity_check(op).max_deviation)
        for col in range(16):
            pattern = format(col, "04b")
            support = [format(r, "04b") for r in np.flatnonzero(np.abs(op[:, col]) > 1e-12)]
            if pattern not in ("1010", "0101") and not (len(support) == 1 and abs(op[col, col] - 1) < 1e-12):
                identity_ok = False
            if {mass_momentum(s, d) for s in support} != {mass_momentum(pattern, d)}:
                conserve_ok = False
            if any(parse_pattern(s) not in classes.class_of(pattern) for s in support):
                conserve_ok = False
    ok = worst <= 1e-12 and identity_ok and conserve_ok
    return CheckResult("collision unitarity", ok,
                       f"max |U^H U - I| = {worst:.1e} over {samples} draws; identity on 14 others: "
                       f"{identity_ok}; mass/momentum kept: {conserve_ok}", {"worst": worst})


# 5 ---------------------------------------------------------------------------

def check_step_counts(nt_max: int = 6, **_) -> CheckResult:
    params = CollisionParams(0.6, 0.8)
    bad = []
    for nt in range(1, nt_max + 1):
        layout = enumerate_vicinity("D2Q4", nt)
        for t in range(1, nt + 1):
            r = nt - t
            c = len(collision_total_circuit(layout, params, t)) // 7
            swaps = streaming_step(layout, t)[0].count("SWAP")
            if (c != 2 * r * r + 2 * r + 1 or c != collision_count_formula("D2Q4", nt, t)
                    or swaps != 8 * r * r + 8 * r + 4 or swaps != swap_count_formula("D2Q4", nt, t)):
                bad.append((nt, t, c, swaps))
    return CheckResult("collision/swap counts per step", not bad,
                       f"all 1<=t<=N_t<={nt_max} match" if not bad else f"mismatches {bad[:3]}")


# 6 ---------------------------------------------------------------------------

def check_streaming_oracle(windows: int = 1000, nt_max: int = 4, seed: int = 6, **_) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures = 0
    cases = 0
    for nt in range(1, nt_max + 1):
        layout = enumerate_vicinity("D2Q4", nt)
        for t in range(1, nt + 1):
            circuit, _ = streaming_step(layout, t)
            retained = [(o, j) for o in layout.region(nt - t) for j in range(4)]
            for _ in range(windows):
                win = Window.random("D2Q4", nt, rng)
                out = sp.apply_circuit(encode_window(layout, win), circuit)
                got = decode_window(layout, next(iter(out.amplitudes)))
                grid, center = embed_window(win)
                streamed = stream_classical(grid)
                cases += 1
                for o, j in retained:
                    site = tuple(c + x for c, x in zip(center, o))
                    if got.bit(o, j) != int(streamed.occ[site + (j,)]):
                        failures += 1
                        break
    return CheckResult("streaming permutation vs classical streaming", failures == 0,
                       f"{cases - failures}/{cases} windows bit-exact (N_t<={nt_max}, all t)",
                       {"failures": failures})


# 7 ---------------------------------------------------------------------------

def check_deterministic_run(windows: int = 1000, nts=(1, 2, 3), seed: int = 7, **_) -> CheckResult:
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    failures, multi = 0, 0
    for nt in nts:
        for _ in range(windows):
            win = Window.random("D2Q4", nt, rng)
            result = run(RunConfig("D2Q4", nt, 0.0, 1.0, win))
            if len(result.state) != 1:
                multi += 1
            (pattern,) = result.focal.support()
            if pattern != classical_focal_evolution(win, nt, "swap-class", "collide-stream"):
                failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and multi == 0 and elapsed < 60
    return CheckResult("deterministic end-to-end run", ok,
                       f"{windows * len(nts) - failures}/{windows * len(nts)} focal patterns match, "
                       f"{multi} multi-entry states", {"seconds": elapsed, "failures": failures})


# 8 ---------------------------------------------------------------------------

def check_superposed_ensemble(windows: int = 200, nts=(1, 2), max_events: int = 8, seed: int = 8,
                              **_) -> CheckResult:
    rng = np.random.default_rng(seed)
    a = 1 / math.sqrt(2)
    worst, used, skipped_interf, branching_seen = 0.0, 0, 0, 0
    for nt in nts:
        accepted = 0
        while accepted < windows:
            win = Window.random("D2Q4", nt, rng, density=0.4)
            cfg = RunConfig("D2Q4", nt, a, a, win)
            oracle = classical_ensemble_oracle(cfg)
            if oracle.max_branch_events > max_events:
                continue
            quantum = run(cfg)
            if quantum.interference_events:
                skipped_interf += 1
                continue
            accepted += 1
            branching_seen += oracle.max_branch_events > 0
            worst = max(worst, quantum.focal.tv_distance(oracle.distribution))
        used += accepted
    ok = worst <= 1e-9 and branching_seen > 0
    return CheckResult("superposed collision vs classical ensemble", ok,
                       f"max TV = {worst:.1e} over {used} windows ({branching_seen} branching, "
                       f"{skipped_interf} interfering skipped)", {"worst": worst})


# 9 ---------------------------------------------------------------------------

SETTING_1 = (("00", "11", "10", "10"), ("11", "00", "10", "10"))
SETTING_2 = (("01", "01", "00", "11"), ("11", "00", "01", "01"))


def check_full_grid_figures(**_) -> CheckResult:
    d = build_descriptor("D1Q2")
    ok, notes = True, []
    for name, (before, after) in (("setting 1", SETTING_1), ("setting 2", SETTING_2)):
        init = OccupancyField.from_site_patterns(d, (4,), before)
        one = full_grid_run(RunConfig("D1Q2", 1, initial=init, mode="full-grid")).fields
        eight = full_grid_run(RunConfig("D1Q2", 8, initial=init, mode="full-grid")).fields
        further = full_grid_run(RunConfig("D1Q2", 8, initial=one[1], mode="full-grid")).fields
        good = (one is not None and one[1].site_patterns() == list(after)
                and eight[-1] == init and further[-1] == one[1])
        ok &= good
        notes.append(f"{name}: {'->'.join([''.join(before), ''.join(one[1].site_patterns())])}")
    return CheckResult("full-grid D1Q2 figures", ok, "; ".join(notes))


# 10 --------------------------------------------------------------------------

def check_depth_bound(nt_max: int = 8, **_) -> CheckResult:
    worst = None
    for nt in range(1, nt_max + 1):
        layout = enumerate_vicinity("D2Q4", nt)
        for t in range(1, nt + 1):
            depth = streaming_step(layout, t)[0].depth()
            if depth > depth_bound(nt, t) or depth < 1:
                worst = (nt, t, depth)
    return CheckResult("streaming depth bound", worst is None,
                       f"depth <= 2*ceil(log2(max(2, N_t-t+2))) for 1<=t<=N_t<={nt_max}"
                       if worst is None else f"violated at {worst}")


# 11 --------------------------------------------------------------------------

def random_circuit(rng: np.random.Generator, n: int, length: int) -> sp.Circuit:
    gates = []
    for _ in range(length):
        kind = rng.choice(["X", "SWAP", "CNOT", "PERMUTE", "MCROT"]) if n > 1 else rng.choice(["X", "MCROT"])
        if kind == "X":
            gates.append(sp.X(int(rng.integers(n))))
        elif kind == "SWAP":
            a, b = rng.choice(n, 2, replace=False)
            gates.append(sp.SWAP(int(a), int(b)))
        elif kind == "CNOT":
            a, b = rng.choice(n, 2, replace=False)
            gates.append(sp.CNOT(int(a), int(b)))
        elif kind == "PERMUTE":
            k = int(rng.integers(2, n + 1))
            qs = [int(q) for q in rng.choice(n, k, replace=False)]
            gates.append(sp.PERMUTE(dict(zip(qs, [int(q) for q in rng.permutation(qs)]))))
        else:
            k = int(rng.integers(0, min(n, 4)))
            qs = [int(q) for q in rng.choice(n, k + 1, replace=False)]
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            z /= np.linalg.norm(z)
            gates.append(sp.MCROT(qs[:-1], qs[-1], complex(z[0]), complex(z[1])))
    return sp.Circuit(n, gates)


def random_sparse_state(rng: np.random.Generator, n: int, terms: int = 4) -> sp.SparseState:
    keys = rng.choice(1 << n, size=min(terms, 1 << n), replace=False)
    weights = rng.normal(size=len(keys)) + 1j * rng.normal(size=len(keys))
    return sp.superpose(zip(weights, [int(k) for k in keys]), num_qubits=n)


def check_engine_crossvalidation(circuits: int = 500, max_qubits: int = 12, seed: int = 11, **_) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, norm_drift = 0.0, 0.0
    for _ in range(circuits):
        n = int(rng.integers(1, max_qubits + 1))
        circ = random_circuit(rng, n, int(rng.integers(1, 40)))
        start = random_sparse_state(rng, n)
        sparse_out = sp.to_dense(sp.apply_circuit(start, circ))
        vec = sp.to_dense(start)
        dense_out = sp.circuit_to_operator(circ) @ vec if n <= 8 else sp.apply_circuit_dense(vec, circ)
        worst = max(worst, float(np.abs(sparse_out - dense_out).max()))
        norm_drift = max(norm_drift, abs(np.linalg.norm(sparse_out) - 1))
    ok = worst <= 1e-10 and norm_drift <= 1e-10
    return CheckResult("sparse vs dense engine", ok,
                       f"max amplitude difference {worst:.1e}, norm drift {norm_drift:.1e} "
                       f"over {circuits} circuits", {"worst": worst})


CHECKS: list[tuple[str, Callable[..., CheckResult]]] = [
    ("1", check_cbs_nogo),
    ("2", check_amplitude_nogo),
    ("3", check_qubit_count),
    ("4", check_collision_unitarity),
    ("5", check_step_counts),
    ("6", check_streaming_oracle),
    ("7", check_deterministic_run),
    ("8", check_superposed_ensemble),
    ("9", check_full_grid_figures),
    ("10", check_depth_bound),
    ("11", check_engine_crossvalidation),
]

QUICK = {"6": {"windows": 100}, "7": {"windows": 100}, "8": {"windows": 30}, "11": {"circuits": 100}}


def run_checks(quick: bool = False, inject_fault: bool = False) -> list[CheckResult]:
    results = []
    for key, fn in CHECKS:
        kwargs = dict(QUICK.get(key, {})) if quick else {}
        start = time.perf_counter()
        try:
            res = fn(inject_fault=inject_fault, **kwargs)
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(fn.__name__, False, f"{type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - start
        res.name = f"{key}. {res.name}"
        results.append(res)
    return results
