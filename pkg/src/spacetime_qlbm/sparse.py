"""Sparse statevector engine for permutation-dominant circuits.

Basis labels are Python ints read big-endian: qubit 0 is the leftmost
character of the ket and the most significant bit, so ``|1010>`` on four
qubits is the integer 10 and dense index 10. Ints keep labels exact for
registers of any width.

The gate set is deliberately small: X, SWAP, CNOT, PERMUTE (arbitrary
qubit relabelling) and MCROT (multi-controlled 2x2 rotation
``[[a, -conj(b)], [b, conj(a)]]`` on the target). Everything except MCROT
maps basis states to basis states, so the number of stored amplitudes only
grows at rotations.

A second, dense implementation (``apply_gate_dense``) works on numpy
tensors and shares no code with the sparse path; it exists to cross-check
the sparse one on small registers.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE = 1e-14
DENSE_CAP = 16
OPERATOR_CAP = 12


class RegisterError(ValueError):
    """Width mismatch or qubit index out of range."""


class RegisterTooLargeError(ValueError):
    pass


def parse_label(label: str | int, num_qubits: int) -> int:
    if isinstance(label, str):
        s = label.strip().strip("|>⟩")
        if len(s) != num_qubits or set(s) - {"0", "1"}:
            raise RegisterError(f"label {label!r} does not have width {num_qubits}")
        return int(s, 2)
    if not 0 <= label < (1 << num_qubits):
        raise RegisterError(f"label {label} out of range for {num_qubits} qubits")
    return int(label)


def format_label(key: int, num_qubits: int) -> str:
    return format(key, f"0{num_qubits}b") if num_qubits else ""


def _mask(q: int, n: int) -> int:
    return 1 << (n - 1 - q)


def get_bit(key: int, q: int, n: int) -> int:
    return (key >> (n - 1 - q)) & 1


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class SparseState:
    num_qubits: int
    amplitudes: Mapping[int, complex]

    def __post_init__(self):
        if self.num_qubits < 1:
            raise RegisterError("need at least one qubit")
        object.__setattr__(self, "amplitudes", MappingProxyType(dict(self.amplitudes)))

    def __len__(self):
        return len(self.amplitudes)

    def __getitem__(self, label: str | int) -> complex:
        return self.amplitudes.get(parse_label(label, self.num_qubits), 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def probabilities(self) -> dict[int, float]:
        return {k: abs(a) ** 2 for k, a in self.amplitudes.items()}

    def marginal(self, qubits: Sequence[int]) -> dict[str, float]:
        """Exact outcome distribution of measuring ``qubits`` (in that order)."""
        out: dict[str, float] = {}
        n = self.num_qubits
        for key, amp in self.amplitudes.items():
            bits = "".join(str(get_bit(key, q, n)) for q in qubits)
            out[bits] = out.get(bits, 0.0) + abs(amp) ** 2
        return out

    def ket(self, digits: int = 6) -> str:
        terms = []
        for key in sorted(self.amplitudes):
            a = self.amplitudes[key]
            terms.append(f"({a.real:.{digits}g}{a.imag:+.{digits}g}j)|{format_label(key, self.num_qubits)}⟩")
        return " + ".join(terms) if terms else "0"

    def allclose(self, other: "SparseState", atol: float = 1e-10) -> bool:
        if self.num_qubits != other.num_qubits:
            return False
        keys = set(self.amplitudes) | set(other.amplitudes)
        return all(abs(self.amplitudes.get(k, 0j) - other.amplitudes.get(k, 0j)) <= atol for k in keys)


def init_basis(num_qubits: int, label: str | int) -> SparseState:
    return SparseState(num_qubits, {parse_label(label, num_qubits): 1.0 + 0j})


def superpose(terms: Iterable[tuple[complex, str | int]], num_qubits: int | None = None) -> SparseState:
    """Normalized superposition of distinct basis labels.

    Zero-weight terms are dropped. String labels fix the width; pass
    ``num_qubits`` when using integer labels.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("empty superposition")
    if num_qubits is None:
        widths = {len(lab) for _, lab in terms if isinstance(lab, str)}
        if len(widths) != 1:
            raise RegisterError("cannot infer a single register width from labels")
        num_qubits = widths.pop()
    amps: dict[int, complex] = {}
    for w, lab in terms:
        key = parse_label(lab, num_qubits)
        if key in amps:
            raise ValueError(f"duplicate label {lab!r}")
        amps[key] = complex(w)
    norm = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    if norm == 0:
        raise ValueError("all weights are zero")
    return SparseState(num_qubits, {k: a / norm for k, a in amps.items() if a != 0})


def from_dense(vector: np.ndarray, num_qubits: int | None = None) -> SparseState:
    vector = np.asarray(vector, dtype=complex).reshape(-1)
    n = num_qubits or int(round(math.log2(vector.size)))
    if vector.size != 1 << n:
        raise RegisterError("vector length is not 2**num_qubits")
    return SparseState(n, {int(i): complex(vector[i]) for i in np.flatnonzero(np.abs(vector) >= PRUNE)})


def inner_product(a: SparseState, b: SparseState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.num_qubits != b.num_qubits:
        raise RegisterError(f"register sizes differ: {a.num_qubits} vs {b.num_qubits}")
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for key in small.amplitudes:
        if key in large.amplitudes:
            total += a.amplitudes[key].conjugate() * b.amplitudes[key]
    return total


# ---------------------------------------------------------------------------
# gates and circuits


GATE_KINDS = ("X", "SWAP", "CNOT", "PERMUTE", "MCROT")


@dataclass(frozen=True)
class Gate:
    """One gate.

    ``qubits`` holds the operands: ``(q,)`` for X, ``(a, b)`` for SWAP,
    ``(control, target)`` for CNOT, ``(*controls, target)`` for MCROT.
    For PERMUTE, qubit ``qubits[i]`` receives the old value of
    ``sources[i]``; ``sources`` must be a rearrangement of ``qubits``.
    """

    kind: str
    qubits: tuple[int, ...]
    sources: tuple[int, ...] = ()
    alpha: complex = 1.0
    beta: complex = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise RegisterError(f"{self.kind}: repeated operand in {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise RegisterError(f"{self.kind}: negative qubit index")
        arity = {"X": 1, "SWAP": 2, "CNOT": 2}
        if self.kind in arity and len(self.qubits) != arity[self.kind]:
            raise RegisterError(f"{self.kind} takes {arity[self.kind]} operands")
        if self.kind == "PERMUTE" and sorted(self.sources) != sorted(self.qubits):
            raise RegisterError("PERMUTE sources must rearrange its qubits")
        if self.kind == "MCROT":
            if not self.qubits:
                raise RegisterError("MCROT needs a target")
            if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1) > 1e-12:
                raise ValueError(f"MCROT coefficients not normalized: |a|^2+|b|^2 = "
                                 f"{abs(self.alpha) ** 2 + abs(self.beta) ** 2!r}")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1] if self.kind in ("CNOT", "MCROT") else ()

    @property
    def target(self) -> int:
        return self.qubits[-1]

    def __repr__(self):
        if self.kind == "MCROT":
            return f"MCROT({list(self.controls)}->{self.target}, a={self.alpha:.4g}, b={self.beta:.4g})"
        if self.kind == "PERMUTE":
            return f"PERMUTE({dict(zip(self.qubits, self.sources))})"
        return f"{self.kind}{self.qubits}"


def X(q: int) -> Gate:
    return Gate("X", (q,))


def SWAP(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def PERMUTE(sources: Mapping[int, int]) -> Gate:
    """``sources[dest] = src``: qubit dest takes the old value of qubit src."""
    moved = {d: s for d, s in sources.items() if d != s}
    dests = tuple(sorted(moved))
    return Gate("PERMUTE", dests, tuple(moved[d] for d in dests))


def MCROT(controls: Sequence[int], target: int, alpha: complex, beta: complex) -> Gate:
    return Gate("MCROT", tuple(controls) + (target,), alpha=complex(alpha), beta=complex(beta))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    layers: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q >= self.num_qubits for q in g.qubits):
                raise RegisterError(f"{g!r} does not fit a {self.num_qubits}-qubit register")
        if self.layers is not None:
            object.__setattr__(self, "layers", tuple(self.layers))
            if len(self.layers) != len(self.gates):
                raise ValueError("one layer annotation per gate required")
            used: dict[int, set[int]] = {}
            for g, layer in zip(self.gates, self.layers):
                busy = used.setdefault(layer, set())
                if busy & set(g.qubits):
                    raise ValueError(f"layer {layer}: gates overlap on qubits {busy & set(g.qubits)}")
                busy.update(g.qubits)

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise RegisterError("cannot concatenate circuits on different registers")
        layers = None
        if self.layers is not None and other.layers is not None:
            offset = max(self.layers, default=-1) + 1
            layers = self.layers + tuple(layer + offset for layer in other.layers)
        return Circuit(self.num_qubits, self.gates + other.gates, layers)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def depth(self) -> int:
        """Number of layers; ASAP-scheduled when no annotation exists."""
        if self.layers is not None:
            return len(set(self.layers))
        level: dict[int, int] = {}
        depth = 0
        for g in self.gates:
            d = 1 + max((level.get(q, 0) for q in g.qubits), default=0)
            for q in g.qubits:
                level[q] = d
            depth = max(depth, d)
        return depth


# ---------------------------------------------------------------------------
# sparse application


def _permute_key(key: int, dests: Sequence[int], srcs: Sequence[int], n: int) -> int:
    out = key
    for d, s in zip(dests, srcs):
        bit = (key >> (n - 1 - s)) & 1
        md = _mask(d, n)
        out = (out | md) if bit else (out & ~md)
    return out


def _map_keys(state: SparseState, fn) -> SparseState:
    return SparseState(state.num_qubits, {fn(k): a for k, a in state.amplitudes.items()})


def apply_gate(state: SparseState, gate: Gate) -> SparseState:
    n = state.num_qubits
    if any(q >= n for q in gate.qubits):
        raise RegisterError(f"{gate!r} does not fit a {n}-qubit register")
    kind = gate.kind
    if kind == "X":
        m = _mask(gate.qubits[0], n)
        return _map_keys(state, lambda k: k ^ m)
    if kind == "CNOT":
        mc, mt = _mask(gate.qubits[0], n), _mask(gate.qubits[1], n)
        return _map_keys(state, lambda k: k ^ mt if k & mc else k)
    if kind == "SWAP":
        ma, mb = _mask(gate.qubits[0], n), _mask(gate.qubits[1], n)
        both = ma | mb

        def swap(k):
            return k ^ both if bool(k & ma) != bool(k & mb) else k
        return _map_keys(state, swap)
    if kind == "PERMUTE":
        return _map_keys(state, lambda k: _permute_key(k, gate.qubits, gate.sources, n))
    return _apply_mcrot(state, gate)


def _apply_mcrot(state: SparseState, gate: Gate) -> SparseState:
    n = state.num_qubits
    cmask = 0
    for q in gate.controls:
        cmask |= _mask(q, n)
    mt = _mask(gate.target, n)
    a, b = gate.alpha, gate.beta
    out: dict[int, complex] = {}
    done = set()
    for key, amp in state.amplitudes.items():
        if key & cmask != cmask:
            out[key] = out.get(key, 0j) + amp
            continue
        k0 = key & ~mt
        if k0 in done:
            continue
        done.add(k0)
        k1 = k0 | mt
        a0 = state.amplitudes.get(k0, 0j)
        a1 = state.amplitudes.get(k1, 0j)
        out[k0] = a * a0 - b.conjugate() * a1
        out[k1] = b * a0 + a.conjugate() * a1
    return SparseState(n, {k: v for k, v in out.items() if abs(v) >= PRUNE})


def rotation_overlaps(state: SparseState, gate: Gate) -> int:
    """How many rotation pairs of ``gate`` have both members populated.

    Permutations never merge basis states, so this is exactly where
    amplitudes from different branches can interfere.
    """
    if gate.kind != "MCROT":
        return 0
    n = state.num_qubits
    cmask = 0
    for q in gate.controls:
        cmask |= _mask(q, n)
    mt = _mask(gate.target, n)
    return sum(1 for k in state.amplitudes
               if k & cmask == cmask and not k & mt and (k | mt) in state.amplitudes)


def apply_circuit(state: SparseState, circuit: Circuit, max_entries: int | None = None) -> SparseState:
    if circuit.num_qubits != state.num_qubits:
        raise RegisterError(f"circuit has {circuit.num_qubits} qubits, state has {state.num_qubits}")
    for g in circuit.gates:
        state = apply_gate(state, g)
        if max_entries is not None and len(state) > max_entries:
            raise MemoryError(f"sparse state grew to {len(state)} entries (cap {max_entries})")
    return state


def circuit_permutation(circuit: Circuit) -> dict[int, int]:
    """Qubit relabelling realized by a circuit of SWAP/PERMUTE gates.

    Returns ``sources`` with ``sources[q]`` = original qubit whose value
    ends up on ``q``; untouched qubits are omitted.
    """
    holder = {}  # position -> original qubit currently there

    def at(q):
        return holder.get(q, q)
    for g in circuit.gates:
        if g.kind == "SWAP":
            a, b = g.qubits
            holder[a], holder[b] = at(b), at(a)
        elif g.kind == "PERMUTE":
            current = {s: at(s) for s in g.sources}
            for d, s in zip(g.qubits, g.sources):
                holder[d] = current[s]
        else:
            raise ValueError(f"{g.kind} is not a qubit permutation")
    return {q: s for q, s in holder.items() if q != s}


# ---------------------------------------------------------------------------
# dense path


def _check_dense(n: int, cap: int):
    if n > cap:
        raise RegisterTooLargeError(f"{n} qubits exceeds the dense cap of {cap}")


def to_dense(state: SparseState) -> np.ndarray:
    _check_dense(state.num_qubits, DENSE_CAP)
    vec = np.zeros(1 << state.num_qubits, dtype=complex)
    for k, a in state.amplitudes.items():
        vec[k] = a
    return vec


def _index(n: int, extra: int, fixed: Mapping[int, int]) -> tuple:
    idx = [slice(None)] * (n + extra)
    for q, v in fixed.items():
        idx[q] = v
    return tuple(idx)


def apply_gate_dense(tensor: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply ``gate`` to a tensor of shape ``(2,)*n + batch``; axis q is qubit q."""
    extra = tensor.ndim - n
    out = tensor.copy()
    kind = gate.kind
    if kind == "X":
        (q,) = gate.qubits
        out[_index(n, extra, {q: 0})] = tensor[_index(n, extra, {q: 1})]
        out[_index(n, extra, {q: 1})] = tensor[_index(n, extra, {q: 0})]
    elif kind == "SWAP":
        out = np.swapaxes(tensor, *gate.qubits).copy()
    elif kind == "CNOT":
        c, t = gate.qubits
        out[_index(n, extra, {c: 1, t: 0})] = tensor[_index(n, extra, {c: 1, t: 1})]
        out[_index(n, extra, {c: 1, t: 1})] = tensor[_index(n, extra, {c: 1, t: 0})]
    elif kind == "PERMUTE":
        axes = list(range(tensor.ndim))
        for d, s in zip(gate.qubits, gate.sources):
            axes[d] = s
        out = np.transpose(tensor, axes).copy()
    else:
        ctrl = {q: 1 for q in gate.controls}
        i0 = _index(n, extra, {**ctrl, gate.target: 0})
        i1 = _index(n, extra, {**ctrl, gate.target: 1})
        a, b = gate.alpha, gate.beta
        out[i0] = a * tensor[i0] - np.conj(b) * tensor[i1]
        out[i1] = b * tensor[i0] + np.conj(a) * tensor[i1]
    return out


def apply_circuit_dense(vector: np.ndarray, circuit: Circuit) -> np.ndarray:
    n = circuit.num_qubits
    _check_dense(n, DENSE_CAP)
    t = np.asarray(vector, dtype=complex).reshape((2,) * n)
    for g in circuit.gates:
        t = apply_gate_dense(t, g, n)
    return t.reshape(-1)


def circuit_to_operator(circuit: Circuit) -> np.ndarray:
    """Dense matrix of a circuit; column i is the image of basis state i."""
    n = circuit.num_qubits
    _check_dense(n, OPERATOR_CAP)
    dim = 1 << n
    t = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in circuit.gates:
        t = apply_gate_dense(t, g, n)
    return t.reshape(dim, dim)


@dataclass(frozen=True)
class UnitarityReport:
    max_deviation: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", self.max_deviation <= self.tol)


def unitarity_check(op: np.ndarray, tol: float = 1e-12) -> UnitarityReport:
    """max |(U^dagger U - I)_ij| against ``tol``."""
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] & (op.shape[0] - 1):
        raise ValueError(f"operator of shape {op.shape} is not square with power-of-two size")
    dev = np.abs(op.conj().T @ op - np.eye(op.shape[0]))
    return UnitarityReport(float(dev.max()), tol)


def phase(theta: float) -> complex:
    return cmath.exp(1j * theta)
