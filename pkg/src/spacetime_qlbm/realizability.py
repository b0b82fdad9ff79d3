"""Can a unitary carry these inputs to these outputs?

A set of required transitions ``in_i -> out_i`` is realizable by some
unitary exactly when every pairwise inner product is preserved,
``<in_i|in_j> == <out_i|out_j>``. ``gram_check`` tests that,
``synthesize_unitary`` builds a witness when it holds, and the two
``*_nogo_instance`` builders encode the velocity-register obstructions for
the amplitude encoding (collision) and the basis-state encoding
(streaming).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .lattice import OccupancyField, build_descriptor, stream_classical
from .sparse import (OPERATOR_CAP, RegisterError, RegisterTooLargeError, SparseState,
                     format_label, inner_product, superpose, to_dense)

GRAM_TOL = 1e-10


class NotRealizableError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionSpec:
    num_qubits: int
    pairs: tuple[tuple[SparseState, SparseState], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        for a, b in self.pairs:
            if a.num_qubits != self.num_qubits or b.num_qubits != self.num_qubits:
                raise RegisterError("all states must share the register size")
            for s in (a, b):
                if abs(s.norm() - 1) > 1e-10:
                    raise ValueError(f"state is not unit norm (norm {s.norm()!r})")

    @property
    def inputs(self) -> list[SparseState]:
        return [a for a, _ in self.pairs]

    @property
    def outputs(self) -> list[SparseState]:
        return [b for _, b in self.pairs]


@dataclass(frozen=True)
class Violation:
    i: int
    j: int
    inner_in: complex
    inner_out: complex
    magnitude: float


@dataclass(frozen=True)
class GramReport:
    realizable: bool
    gram_in: np.ndarray
    gram_out: np.ndarray
    violations: tuple[Violation, ...]
    tol: float

    @property
    def max_violation(self) -> float:
        return max((v.magnitude for v in self.violations), default=0.0)


def gram_matrix(states: list[SparseState]) -> np.ndarray:
    k = len(states)
    g = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(i, k):
            g[i, j] = inner_product(states[i], states[j])
            g[j, i] = g[i, j].conjugate()
    return g


def gram_check(spec: TransitionSpec, tol: float = GRAM_TOL) -> GramReport:
    if not spec.pairs:
        raise ValueError("need at least one transition")
    gin, gout = gram_matrix(spec.inputs), gram_matrix(spec.outputs)
    violations = []
    k = len(spec.pairs)
    for i in range(k):
        for j in range(i, k):
            diff = abs(gin[i, j] - gout[i, j])
            if diff > tol:
                violations.append(Violation(i, j, complex(gin[i, j]), complex(gout[i, j]), float(diff)))
    return GramReport(not violations, gin, gout, tuple(violations), tol)


def _complement(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal columns spanning the orthogonal complement of ``basis``."""
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, basis.shape[1]:]


def synthesize_unitary(spec: TransitionSpec, tol: float = GRAM_TOL) -> np.ndarray:
    """A unitary U with U in_i = out_i for every pair.

    Both input and output families are orthonormalized through the shared
    Gram matrix, and the two orthonormal sets are completed to bases in
    whatever way the SVD gives; U is one of many valid choices.
    """
    if spec.num_qubits > OPERATOR_CAP:
        raise RegisterTooLargeError(f"{spec.num_qubits} qubits exceeds the synthesis cap of {OPERATOR_CAP}")
    report = gram_check(spec, tol)
    if not report.realizable:
        v = report.violations[0]
        raise NotRealizableError(
            f"inner products not preserved: <in_{v.i}|in_{v.j}> = {v.inner_in:.6g} "
            f"but <out_{v.i}|out_{v.j}> = {v.inner_out:.6g}")
    dim = 1 << spec.num_qubits
    xin = np.column_stack([to_dense(s) for s in spec.inputs])
    xout = np.column_stack([to_dense(s) for s in spec.outputs])
    g = (report.gram_in + report.gram_out) / 2
    lam, w = np.linalg.eigh(g)
    keep = lam > 1e-9
    scale = 1 / np.sqrt(lam[keep])
    # a second symmetric orthonormalization mops up rounding in both sets alike
    u_in, u_out = _align(xin @ w[:, keep] * scale, xout @ w[:, keep] * scale)
    full_in = np.hstack([u_in, _complement(u_in, dim)])
    full_out = np.hstack([u_out, _complement(u_out, dim)])
    return full_out @ full_in.conj().T


def _align(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polar-orthonormalize ``a`` and apply the same correction to ``b``."""
    if a.shape[1] == 0:
        return a, b
    # a = Q S with S Hermitian positive; S is the same for b since a^H a = b^H b
    s = a.conj().T @ a
    lam, v = np.linalg.eigh(s)
    inv_sqrt = v @ np.diag(1 / np.sqrt(lam)) @ v.conj().T
    return a @ inv_sqrt, b @ inv_sqrt


# ---------------------------------------------------------------------------
# no-go instances


@dataclass(frozen=True)
class AmplitudeNogoParams:
    """Coefficients of the collision-under-amplitude-encoding argument.

    ``alpha0, alpha1`` weight the incoming pair v0, v1; ``beta2, beta3``
    weight the equivalent pair v2, v3; ``gamma0, gamma1`` split the collided
    state between keeping and switching; ``theta`` is the phase a lone v2
    may pick up.
    """

    alpha0: complex = 1 / math.sqrt(2)
    alpha1: complex = 1 / math.sqrt(2)
    beta2: complex = 1 / math.sqrt(2)
    beta3: complex = 1 / math.sqrt(2)
    gamma0: complex = 0.0
    gamma1: complex = 1.0
    theta: float = 0.0

    def __post_init__(self):
        for a, b, what in ((self.alpha0, self.alpha1, "alpha"), (self.beta2, self.beta3, "beta"),
                           (self.gamma0, self.gamma1, "gamma")):
            total = abs(a) ** 2 + abs(b) ** 2
            if abs(total - 1) > 1e-12:
                raise ValueError(f"{what} pair not normalized: |.|^2 sum = {total!r}")

    @classmethod
    def from_gamma_beta(cls, gamma1: complex, beta2: complex, theta: float = 0.0) -> "AmplitudeNogoParams":
        """Fill in gamma0 and beta3 as the nonnegative reals completing each pair."""
        g0 = 1 - abs(gamma1) ** 2
        b3 = 1 - abs(beta2) ** 2
        if g0 < -1e-12 or b3 < -1e-12:
            raise ValueError("|gamma1| and |beta2| must not exceed 1")
        return cls(beta2=complex(beta2), beta3=math.sqrt(max(b3, 0.0)),
                   gamma0=math.sqrt(max(g0, 0.0)), gamma1=complex(gamma1), theta=theta)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "AmplitudeNogoParams":
        def pair():
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            z /= np.linalg.norm(z)
            return complex(z[0]), complex(z[1])
        a0, a1 = pair()
        b2, b3 = pair()
        g0, g1 = pair()
        return cls(a0, a1, b2, b3, g0, g1, float(rng.uniform(0, 2 * math.pi)))


def _state_from(amps: dict[str, complex]) -> SparseState:
    n = len(next(iter(amps)))
    return SparseState(n, {int(k, 2): complex(v) for k, v in amps.items() if v != 0})


def amplitude_nogo_instance(params: AmplitudeNogoParams) -> TransitionSpec:
    """Two required collision transitions on a 2-qubit velocity register.

    |v_i> is basis state i (v0=00, v1=01, v2=10, v3=11). The position
    factor |x> is left out: it multiplies every inner product by <x|x> = 1.
    """
    p = params
    in1 = _state_from({"00": p.alpha0, "01": p.alpha1})
    out1 = _state_from({"00": p.gamma0 * p.alpha0, "01": p.gamma0 * p.alpha1,
                        "10": p.gamma1 * p.beta2, "11": p.gamma1 * p.beta3})
    in2 = _state_from({"10": 1.0})
    out2 = _state_from({"10": cmath.exp(1j * p.theta)})
    return TransitionSpec(2, ((in1, out1), (in2, out2)))


# D1Q2 on four periodic sites; each term is |x>|q0 q1> with q0 = +1, q1 = -1
CBS_PSI1 = ("0000", "0111", "1010", "1110")
CBS_PSI2 = ("0001", "0101", "1000", "1111")
CBS_PSI1_STREAMED = ("0011", "0100", "1010", "1110")
CBS_PSI2_STREAMED = ("0011", "0100", "1001", "1101")


def _field_of(terms: tuple[str, ...]) -> OccupancyField:
    d = build_descriptor("D1Q2")
    patterns = dict((int(t[:2], 2), t[2:]) for t in terms)
    return OccupancyField.from_site_patterns(d, (4,), [patterns[x] for x in range(4)])


def _terms_of(field: OccupancyField) -> tuple[str, ...]:
    return tuple(format_label(x, 2) + p for x, p in enumerate(field.site_patterns()))


def cbs_nogo_instance() -> TransitionSpec:
    """Streaming transitions for two four-site D1Q2 configurations.

    Register: 2 position qubits then velocity qubits q0 (moving +1) and
    q1 (moving -1). Each state is the uniform superposition over sites of
    |x>|pattern at x>. The streamed states are checked against classical
    streaming before being returned.
    """
    for before, after in ((CBS_PSI1, CBS_PSI1_STREAMED), (CBS_PSI2, CBS_PSI2_STREAMED)):
        streamed = _terms_of(stream_classical(_field_of(before)))
        if streamed != after:
            raise AssertionError(f"classical streaming gives {streamed}, table says {after}")

    def state(terms):
        return superpose([(1, t) for t in terms])
    return TransitionSpec(4, ((state(CBS_PSI1), state(CBS_PSI1_STREAMED)),
                              (state(CBS_PSI2), state(CBS_PSI2_STREAMED))))


def cbs_forced_operator() -> np.ndarray:
    """16x16 matrix forced by per-term streaming of the two CBS examples.

    At site 0 the patterns 00 (first setting) and 01 (second setting) both
    stream into 11, so basis states |0000> and |0001> must both go to
    |0011>; the other fourteen basis states are held fixed. The operator is
    the least-squares solution of those sixteen column constraints.
    """
    dim = 16
    targets = np.eye(dim, dtype=complex)
    targets[:, 0b0000] = 0
    targets[0b0011, 0b0000] = 1
    targets[:, 0b0001] = 0
    targets[0b0011, 0b0001] = 1
    inputs = np.eye(dim, dtype=complex)
    # solve op @ inputs = targets  <=>  inputs^T op^T = targets^T
    op_t, *_ = np.linalg.lstsq(inputs.T, targets.T, rcond=None)
    return op_t.T
