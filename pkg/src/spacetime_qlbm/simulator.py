"""End-to-end window simulation and its classical cross-checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

from .lattice import (LatticeDescriptor, OccupancyField, as_descriptor, collision_lookup,
                      evolve_classical, format_pattern, stream_classical)
from .sparse import (PERMUTE, Circuit, SparseState, apply_circuit, apply_gate, get_bit,
                     rotation_overlaps)
from .spacetime import (CollisionParams, Offset, StepCircuits, VicinityLayout, collision_local_gates,
                        enumerate_vicinity, manhattan, schedule)

ORDERS = ("collide-stream", "stream-collide")
DEFAULT_MAX_ENTRIES = 1 << 22
FULL_GRID_MAX_QUBITS = 24
TV_TOL = 1e-9


class MissingBitError(ValueError):
    pass


class BeyondVicinityError(ValueError):
    pass


class BudgetError(RuntimeError):
    """Sparse entry cap, branch cap or grid size exceeded."""


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class Window:
    """Initial occupancy of a space-time window: the set of occupied (offset, j)."""

    lattice: str
    extent: int
    occupied: frozenset[tuple[Offset, int]] = frozenset()

    def __post_init__(self):
        d = as_descriptor(self.lattice)
        object.__setattr__(self, "lattice", d.name)
        occ = frozenset((tuple(int(c) for c in o), int(j)) for o, j in self.occupied)
        for o, j in occ:
            if len(o) != d.dimension or not 0 <= j < d.m:
                raise ValueError(f"bad entry {(o, j)} for {d.name}")
            if manhattan(o) > self.extent:
                raise BeyondVicinityError(f"offset {o} lies outside the extent-{self.extent} vicinity")
        object.__setattr__(self, "occupied", occ)

    @property
    def descriptor(self) -> LatticeDescriptor:
        return as_descriptor(self.lattice)

    def bit(self, offset: Offset, j: int) -> int:
        return int((tuple(offset), j) in self.occupied)

    def pattern(self, offset: Offset) -> str:
        return "".join(str(self.bit(offset, j)) for j in range(self.descriptor.m))

    def resized(self, extent: int) -> "Window":
        return Window(self.lattice, extent, self.occupied)

    @classmethod
    def from_bits(cls, layout: VicinityLayout, bits: Mapping[tuple[Offset, int], int]) -> "Window":
        missing = [key for key in layout.index if key not in bits]
        if missing:
            raise MissingBitError(f"{len(missing)} window bits missing, e.g. {missing[0]}")
        return cls(layout.descriptor.name, layout.extent, frozenset(k for k, v in bits.items() if v))

    @classmethod
    def from_patterns(cls, lattice: str, extent: int, patterns: Mapping[Offset, str]) -> "Window":
        occ = {(tuple(o), j) for o, p in patterns.items() for j, c in enumerate(p) if c == "1"}
        return cls(lattice, extent, frozenset(occ))

    @classmethod
    def random(cls, lattice: str, extent: int, rng: np.random.Generator, density: float = 0.5) -> "Window":
        layout = enumerate_vicinity(lattice, extent)
        keys = list(layout.index)
        hits = rng.random(len(keys)) < density
        return cls(layout.descriptor.name, extent, frozenset(k for k, h in zip(keys, hits) if h))


def encode_window(layout: VicinityLayout, window: Window) -> SparseState:
    if window.lattice != layout.descriptor.name:
        raise ValueError(f"window is {window.lattice}, layout is {layout.descriptor.name}")
    if window.extent != layout.extent:
        window = window.resized(layout.extent)
    n = layout.num_qubits
    key = 0
    for o, j in window.occupied:
        key |= 1 << (n - 1 - layout.qubit(o, j))
    return SparseState(n, {key: 1.0 + 0j})


def decode_window(layout: VicinityLayout, key: int) -> Window:
    n = layout.num_qubits
    occ = frozenset(layout.site(q) for q in range(n) if get_bit(key, q, n))
    return Window(layout.descriptor.name, layout.extent, occ)


def embed_window(window: Window) -> tuple[OccupancyField, tuple[int, ...]]:
    """Place a window on a periodic grid just large enough for its light cone.

    Returns the field and the grid coordinates of the focal site.
    """
    d = window.descriptor
    size = 2 * window.extent + 1
    extents = (size,) * d.dimension
    center = (window.extent,) * d.dimension
    occ = np.zeros(extents + (d.m,), dtype=bool)
    for o, j in window.occupied:
        occ[tuple(c + x for c, x in zip(center, o)) + (j,)] = True
    return OccupancyField(d, extents, occ), center


# ---------------------------------------------------------------------------
# configuration and results


Initial = Union[Window, OccupancyField, Sequence[tuple[complex, Window]]]


@dataclass(frozen=True)
class RunConfig:
    """One simulation.

    ``initial`` is a Window, a weighted ensemble ``[(weight, Window), ...]``
    prepared as a superposition, or (``mode="full-grid"``) an
    OccupancyField. In full-grid mode ``nt`` is the number of steps.
    """

    lattice: str = "D2Q4"
    nt: int = 1
    alpha: complex = 1.0
    beta: complex = 0.0
    initial: Initial | None = None
    order: str = "collide-stream"
    mode: str = "window"
    max_entries: int = DEFAULT_MAX_ENTRIES

    def __post_init__(self):
        object.__setattr__(self, "lattice", as_descriptor(self.lattice).name)
        CollisionParams(self.alpha, self.beta)
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        if self.nt < 0:
            raise ValueError("nt must be nonnegative")
        if self.mode == "window":
            for _, w in self.ensemble:
                if w.lattice != self.lattice:
                    raise ValueError(f"window lattice {w.lattice} does not match {self.lattice}")
                w.resized(self.nt)  # rejects data beyond the vicinity
        elif self.mode == "full-grid":
            if not isinstance(self.initial, OccupancyField):
                raise ValueError("full-grid mode needs an OccupancyField")
            f = self.initial
            if f.descriptor.name != self.lattice:
                raise ValueError(f"grid lattice {f.descriptor.name} does not match {self.lattice}")
            if f.num_sites * f.descriptor.m > FULL_GRID_MAX_QUBITS:
                raise BudgetError(f"full grid needs {f.num_sites * f.descriptor.m} qubits "
                                  f"(limit {FULL_GRID_MAX_QUBITS})")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def params(self) -> CollisionParams:
        return CollisionParams(self.alpha, self.beta)

    @property
    def ensemble(self) -> list[tuple[complex, Window]]:
        if self.initial is None:
            return [(1.0, Window(self.lattice, self.nt))]
        if isinstance(self.initial, Window):
            return [(1.0, self.initial)]
        if isinstance(self.initial, OccupancyField):
            return []
        return [(complex(w), win) for w, win in self.initial]


@dataclass(frozen=True)
class FocalDistribution:
    probs: dict[str, float]

    def total(self) -> float:
        return sum(self.probs.values())

    def support(self) -> list[str]:
        return sorted(p for p, v in self.probs.items() if v > 0)

    def tv_distance(self, other: "FocalDistribution") -> float:
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self.probs.get(k, 0.0) - other.probs.get(k, 0.0)) for k in keys)


def sample_focal(dist: FocalDistribution, shots: int, seed: int = 0) -> dict[str, int]:
    """Seeded measurement counts, for demonstration output only; checks use the exact marginal."""
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    patterns = sorted(dist.probs)
    p = np.array([dist.probs[k] for k in patterns])
    counts = np.random.default_rng(seed).multinomial(shots, p / p.sum())
    return {k: int(c) for k, c in zip(patterns, counts) if c}


@dataclass(frozen=True)
class RunResult:
    state: SparseState
    focal: FocalDistribution
    layout: VicinityLayout
    peak_entries: int
    interference_events: int
    steps: tuple[StepCircuits, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class ComparisonReport:
    tv_distance: float
    deltas: dict[str, float]
    interfering: bool
    tol: float = TV_TOL

    @property
    def passed(self) -> bool:
        return self.tv_distance <= self.tol

    @property
    def mode(self) -> str:
        return "expected-mismatch" if self.interfering else "agreement"


# ---------------------------------------------------------------------------
# quantum run


@lru_cache(maxsize=64)
def _cached_schedule(lattice: str, nt: int, alpha: complex, beta: complex, order: str):
    layout = enumerate_vicinity(lattice, nt)
    return layout, tuple(schedule(layout, CollisionParams(alpha, beta), order))


def prepare_state(layout: VicinityLayout, ensemble: Sequence[tuple[complex, Window]]) -> SparseState:
    amps: dict[int, complex] = {}
    for w, win in ensemble:
        (key,) = encode_window(layout, win).amplitudes
        amps[key] = amps.get(key, 0j) + w
    norm = np.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    if norm == 0:
        raise ValueError("initial ensemble has zero norm")
    return SparseState(layout.num_qubits, {k: a / norm for k, a in amps.items() if a != 0})


def run(config: RunConfig) -> RunResult:
    """Simulate N_t steps of the space-time circuits and read the focal pattern.

    Each step applies the collision circuit then the streaming circuit, or
    the reverse when ``order="stream-collide"``.
    """
    if config.mode != "window":
        raise ValueError("run() handles window mode; use full_grid_run() for full grids")
    layout, steps = _cached_schedule(config.lattice, config.nt, config.alpha, config.beta, config.order)
    state = prepare_state(layout, config.ensemble)
    peak, overlaps = len(state), 0
    for step in steps:
        parts = (step.collision, step.streaming)
        if config.order == "stream-collide":
            parts = parts[::-1]
        for circuit in parts:
            for g in circuit.gates:
                if g.kind == "MCROT":
                    overlaps += rotation_overlaps(state, g)
                state = apply_gate(state, g)
                if len(state) > config.max_entries:
                    raise BudgetError(f"sparse state reached {len(state)} entries "
                                      f"(cap {config.max_entries})")
            peak = max(peak, len(state))
    focal = FocalDistribution(state.marginal(layout.focal_qubits))
    return RunResult(state, focal, layout, peak, overlaps, steps)


# ---------------------------------------------------------------------------
# classical oracles


def collision_rule(params: CollisionParams) -> str:
    if abs(params.beta) < 1e-15:
        return "identity"
    if abs(params.alpha) < 1e-15:
        return "swap-class"
    raise ValueError("collision is not deterministic for these parameters")


def classical_focal_evolution(window: Window, steps: int, rule: str = "swap-class",
                              order: str = "collide-stream") -> str:
    """Focal pattern after evolving the embedded window on a classical grid."""
    field_, center = embed_window(window.resized(max(window.extent, steps)))
    final = evolve_classical(field_, steps, rule, order)[-1]
    return format_pattern(final.pattern_at(center))


@dataclass(frozen=True)
class EnsembleResult:
    distribution: FocalDistribution
    branches: int
    max_branch_events: int


def classical_ensemble_oracle(config: RunConfig, max_branches: int = 1 << 20) -> EnsembleResult:
    """Brute-force enumeration of classical collision trajectories.

    Wherever the schedule collides a site holding one member of a
    two-element class, the trajectory forks: keep with weight |alpha|^2,
    swap with weight |beta|^2. Zero-weight forks are dropped. Identical
    grids are merged, which is a classical sum of probabilities.
    """
    nt = config.nt
    d = as_descriptor(config.lattice)
    params = config.params
    keep, swap = abs(params.alpha) ** 2, abs(params.beta) ** 2
    lookup = collision_lookup(d, "swap-class")
    weights_bits = 1 << np.arange(d.m - 1, -1, -1)

    ensemble = config.ensemble
    total = sum(abs(w) ** 2 for w, _ in ensemble)
    live: dict[bytes, tuple[float, np.ndarray, int]] = {}
    center = None
    for w, win in ensemble:
        f, center = embed_window(win.resized(nt))
        _merge(live, f.occ, abs(w) ** 2 / total, 0)
    extents = (2 * nt + 1,) * d.dimension
    norms = np.zeros(extents, dtype=int)
    for idx in np.ndindex(*extents):
        norms[idx] = manhattan(tuple(i - c for i, c in zip(idx, center)))

    def stream(occ):
        return stream_classical(OccupancyField(d, extents, occ)).occ

    def collide(occ, radius, prob, events, out):
        codes = occ.astype(np.int64) @ weights_bits
        partner = lookup[codes]
        forks = np.argwhere((partner != codes) & (norms <= radius))
        choices = []
        for _ in forks:
            opts = []
            if keep > 0:
                opts.append((False, keep))
            if swap > 0:
                opts.append((True, swap))
            choices.append(opts)
        branching = sum(len(c) == 2 for c in choices)
        for combo in itertools.product(*choices):
            new = occ.copy()
            p = prob
            for site, (do_swap, w) in zip(forks, combo):
                p *= w
                if do_swap:
                    code = partner[tuple(site)]
                    new[tuple(site)] = [bool((code >> (d.m - 1 - j)) & 1) for j in range(d.m)]
            _merge(out, new, p, events + branching)
            if len(out) > max_branches:
                raise BudgetError(f"more than {max_branches} classical branches")

    for t in range(1, nt + 1):
        nxt: dict[bytes, tuple[float, np.ndarray, int]] = {}
        for prob, occ, events in live.values():
            if config.order == "collide-stream":
                stage: dict = {}
                collide(occ, nt - t + 1, prob, events, stage)
                for p2, o2, e2 in stage.values():
                    _merge(nxt, stream(o2), p2, e2)
            else:
                collide(stream(occ), nt - t, prob, events, nxt)
        live = nxt

    dist: dict[str, float] = {}
    for prob, occ, _ in live.values():
        pat = format_pattern(occ[center].astype(int))
        dist[pat] = dist.get(pat, 0.0) + prob
    events = max((e for _, _, e in live.values()), default=0)
    return EnsembleResult(FocalDistribution(dist), len(live), events)


def _merge(store, occ, prob, events):
    key = occ.tobytes()
    if key in store:
        p, o, e = store[key]
        store[key] = (p + prob, o, max(e, events))
    else:
        store[key] = (prob, occ, events)


def compare(config: RunConfig, tol: float = TV_TOL) -> ComparisonReport:
    """Quantum focal distribution against the classical trajectory ensemble.

    Agreement is only expected when no rotation ever acted on a pair whose
    two members were both populated; otherwise the report is flagged as
    an expected mismatch.
    """
    quantum = run(config)
    classical = classical_ensemble_oracle(config).distribution
    keys = sorted(set(quantum.focal.probs) | set(classical.probs))
    deltas = {k: quantum.focal.probs.get(k, 0.0) - classical.probs.get(k, 0.0) for k in keys}
    return ComparisonReport(quantum.focal.tv_distance(classical), deltas,
                            quantum.interference_events > 0, tol)


# ---------------------------------------------------------------------------
# full grid


def full_grid_circuits(field_: OccupancyField, params: CollisionParams) -> tuple[Circuit, Circuit]:
    """Collision at every site and the global streaming permutation.

    Qubit ``site * m + j`` holds bit (site, j), matching ``OccupancyField.bits``.
    """
    d = field_.descriptor
    m, n = d.m, field_.num_sites * d.m
    gates, layers = [], []
    if d.dimension == 2:
        for s in range(field_.num_sites):
            local = collision_local_gates(params, [s * m + j for j in d.moving])
            gates.extend(local)
            layers.extend(range(len(local)))
    collision = Circuit(n, gates, layers)

    def site_index(coords):
        idx, stride = 0, 1
        for c, extent in zip(coords, field_.extents):
            idx += (c % extent) * stride
            stride *= extent
        return idx

    sources = {}
    for s in range(field_.num_sites):
        x = field_.site_coords(s)
        for j in d.moving:
            src = site_index([a - b for a, b in zip(x, d.velocities[j])])
            sources[s * m + j] = src * m + j
    return collision, Circuit(n, [PERMUTE(sources)], (0,))


@dataclass(frozen=True)
class FullGridResult:
    states: tuple[SparseState, ...]
    fields: tuple[OccupancyField, ...] | None

    @property
    def final(self) -> SparseState:
        return self.states[-1]


def encode_field(field_: OccupancyField) -> SparseState:
    bits = field_.bits
    return SparseState(len(bits), {int("".join(map(str, bits)), 2): 1.0 + 0j})


def full_grid_run(config: RunConfig) -> FullGridResult:
    """Whole periodic grid as one register, ``config.nt`` steps.

    ``fields`` decodes every step when the state stays a single basis
    state (deterministic collision); otherwise it is None.
    """
    if config.mode != "full-grid":
        raise ValueError("full_grid_run() needs mode='full-grid'")
    field_ = config.initial
    collision, streaming = full_grid_circuits(field_, config.params)
    parts = (collision, streaming) if config.order == "collide-stream" else (streaming, collision)
    state = encode_field(field_)
    states = [state]
    for _ in range(config.nt):
        for circuit in parts:
            state = apply_circuit(state, circuit, config.max_entries)
        states.append(state)
    fields = None
    if all(len(s) == 1 for s in states):
        fields = tuple(_decode_field(field_, next(iter(s.amplitudes))) for s in states)
    return FullGridResult(tuple(states), fields)


def _decode_field(like: OccupancyField, key: int) -> OccupancyField:
    n = like.num_sites * like.descriptor.m
    return OccupancyField.from_bits(like.descriptor, like.extents, [get_bit(key, q, n) for q in range(n)])
