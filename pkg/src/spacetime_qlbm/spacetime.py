"""Space-time encoding of a lattice-gas window around one focal site.

A window of extent N_t holds one qubit per (offset, direction) for every
lattice offset within Manhattan distance N_t of the focal site, which is
everything that can reach the focal site in N_t streaming steps. Offsets
are enumerated by (norm, coordinates), so the origin comes first, focal
qubits are 0..m-1, and the region still relevant after step t (norm at
most N_t - t) is a prefix of the qubit index space.

Step t works on that shrinking region only:

* collision applies the local four-qubit rotation to every offset with
  norm <= N_t - t (``collision_total_circuit``);
* streaming cyclically shifts, for each moving direction, each line
  segment that feeds the retained region. A shift of length L is two
  layers of disjoint swaps (reverse all, then reverse all but the first),
  L - 1 swaps in total, so every retained moving qubit costs exactly one
  swap and the layered depth never exceeds 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Sequence

from .lattice import LatticeDescriptor, as_descriptor
from .sparse import CNOT, MCROT, SWAP, Circuit, Gate, RegisterError

Offset = tuple[int, ...]


class UnsupportedLatticeError(ValueError):
    pass


def manhattan(offset: Sequence[int]) -> int:
    return sum(abs(c) for c in offset)


def von_neumann_size(dimension: int, radius: int) -> int:
    """Number of integer points with Manhattan norm <= radius."""
    if radius < 0:
        return 0
    if dimension == 1:
        return 2 * radius + 1
    if dimension == 2:
        return 2 * radius * radius + 2 * radius + 1
    raise UnsupportedLatticeError(f"no closed form for dimension {dimension}")


def _check_von_neumann(d: LatticeDescriptor):
    # the supported lattices only move along axes; anything diagonal is Moore-type
    if any(manhattan(e) > 1 for e in d.velocities) or d.dimension > 2:
        raise UnsupportedLatticeError(f"{d.name} does not use a von Neumann neighborhood")


@dataclass(frozen=True)
class VicinityLayout:
    descriptor: LatticeDescriptor
    extent: int
    offsets: tuple[Offset, ...]

    @cached_property
    def index(self) -> dict[tuple[Offset, int], int]:
        m = self.descriptor.m
        return {(o, j): k * m + j for k, o in enumerate(self.offsets) for j in range(m)}

    @cached_property
    def offset_position(self) -> dict[Offset, int]:
        return {o: k for k, o in enumerate(self.offsets)}

    @property
    def num_qubits(self) -> int:
        return len(self.offsets) * self.descriptor.m

    @property
    def focal_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.descriptor.m))

    def qubit(self, offset: Offset, j: int) -> int:
        return self.offset_position[tuple(offset)] * self.descriptor.m + j

    def site(self, qubit: int) -> tuple[Offset, int]:
        m = self.descriptor.m
        return self.offsets[qubit // m], qubit % m

    def region(self, radius: int) -> tuple[Offset, ...]:
        """Offsets with norm <= radius (a prefix of ``offsets``)."""
        if radius < 0:
            return ()
        count = von_neumann_size(self.descriptor.dimension, min(radius, self.extent))
        return self.offsets[:count]

    def contains(self, offset: Offset) -> bool:
        return tuple(offset) in self.offset_position


def enumerate_vicinity(lattice: str | LatticeDescriptor, extent: int) -> VicinityLayout:
    d = as_descriptor(lattice)
    _check_von_neumann(d)
    if extent < 0:
        raise ValueError("extent must be nonnegative")
    points = [p for p in product(range(-extent, extent + 1), repeat=d.dimension) if manhattan(p) <= extent]
    points.sort(key=lambda p: (manhattan(p), p))
    return VicinityLayout(d, extent, tuple(points))


# ---------------------------------------------------------------------------
# closed-form counts


def _check_t(nt: int, t: int):
    if not 1 <= t <= nt:
        raise ValueError(f"time step t={t} outside 1..{nt}")


def qubit_count_formula(lattice: str | LatticeDescriptor, nt: int) -> int:
    d = as_descriptor(lattice)
    if d.name == "D2Q4":
        return 8 * nt * nt + 8 * nt + 4
    return d.m * von_neumann_size(d.dimension, nt)


def swap_count_formula(lattice: str | LatticeDescriptor, nt: int, t: int) -> int:
    d = as_descriptor(lattice)
    _check_t(nt, t)
    r = nt - t
    if d.name == "D2Q4":
        return 8 * r * r + 8 * r + 4
    return len(d.moving) * von_neumann_size(d.dimension, r)


def collision_count_formula(lattice: str | LatticeDescriptor, nt: int, t: int) -> int:
    d = as_descriptor(lattice)
    _check_t(nt, t)
    r = nt - t
    if d.name == "D2Q4":
        return 2 * r * r + 2 * r + 1
    return von_neumann_size(d.dimension, r) if d.dimension == 2 else 0


def depth_bound(nt: int, t: int) -> int:
    """Logarithmic ceiling the layered streaming depth must respect."""
    return 2 * math.ceil(math.log2(max(2, nt - t + 2)))


# ---------------------------------------------------------------------------
# collision


@dataclass(frozen=True)
class CollisionParams:
    alpha: complex = 1.0
    beta: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(total - 1) > 1e-12:
            raise ValueError(f"collision parameters not normalized: |alpha|^2 + |beta|^2 = {total!r}")

    @property
    def deterministic(self) -> bool:
        return abs(self.alpha) < 1e-15 or abs(self.beta) < 1e-15


def collision_local_gates(params: CollisionParams, quad: Sequence[int]) -> list[Gate]:
    """Rotate |1010> <-> |0101> on ``quad`` and leave the other 14 states alone.

    Three CNOTs send 1010 -> 1110 and 0101 -> 1111, a rotation on the last
    qubit controlled by the first three mixes the pair, and the CNOTs are
    undone.
    """
    if len(quad) != 4 or len(set(quad)) != 4:
        raise RegisterError(f"collision needs four distinct qubits, got {tuple(quad)}")
    q0, q1, q2, q3 = quad
    conj = [CNOT(q0, q1), CNOT(q3, q0), CNOT(q3, q2)]
    return conj + [MCROT((q0, q1, q2), q3, params.alpha, params.beta)] + conj[::-1]


def collision_local_circuit(params: CollisionParams, quad: Sequence[int] = (0, 1, 2, 3),
                            num_qubits: int | None = None) -> Circuit:
    gates = collision_local_gates(params, quad)
    return Circuit(num_qubits or max(quad) + 1, gates, tuple(range(len(gates))))


def collision_total_circuit(layout: VicinityLayout, params: CollisionParams, t: int,
                            radius: int | None = None) -> Circuit:
    """Local collisions on every offset with norm <= N_t - t.

    ``radius`` overrides the region; the collide-before-stream schedule
    needs N_t - t + 1.
    """
    _check_t(layout.extent, t)
    r = layout.extent - t if radius is None else radius
    d = layout.descriptor
    gates, layers = [], []
    if d.dimension == 2:
        # D2Q4 and D2Q5 share the moving quad; the rest bit of D2Q5 just rides along
        for o in layout.region(r):
            local = collision_local_gates(params, [layout.qubit(o, j) for j in d.moving])
            gates.extend(local)
            layers.extend(range(len(local)))
    return Circuit(layout.num_qubits, gates, layers)


# ---------------------------------------------------------------------------
# streaming


def _segments(layout: VicinityLayout, radius: int) -> list[list[int]]:
    """Qubit chains [source, retained..., most downstream] per direction-line."""
    d = layout.descriptor
    region = set(layout.region(radius))
    chains = []
    for j in d.moving:
        e = d.velocities[j]
        for o in layout.region(radius):
            upstream = tuple(a - b for a, b in zip(o, e))
            if upstream in region:
                continue
            chain = [upstream, o]
            while (nxt := tuple(a + b for a, b in zip(chain[-1], e))) in region:
                chain.append(nxt)
            chains.append([layout.qubit(p, j) for p in chain])
    return chains


def streaming_step(layout: VicinityLayout, t: int) -> tuple[Circuit, dict[int, int]]:
    """Layered swap network for step t and the qubit permutation it realizes.

    The permutation is returned as ``sources[q]`` = qubit whose value lands
    on q. For every retained (offset o, direction j) the source is
    (o - e_j, j); the displaced value of the most downstream qubit wraps to
    the chain's source end.
    """
    _check_t(layout.extent, t)
    gates, layers, sources = [], [], {}
    for chain in _segments(layout, layout.extent - t):
        length = len(chain)
        for i in range(length // 2):
            gates.append(SWAP(chain[i], chain[length - 1 - i]))
            layers.append(0)
        for i in range((length - 1) // 2):
            gates.append(SWAP(chain[1 + i], chain[length - 1 - i]))
            layers.append(1)
        for k in range(length):
            sources[chain[k]] = chain[k - 1]
    return Circuit(layout.num_qubits, gates, layers), sources


def swap_depth(layout: VicinityLayout, t: int) -> int:
    return streaming_step(layout, t)[0].depth()


@dataclass(frozen=True)
class StepCircuits:
    t: int
    collision: Circuit
    streaming: Circuit
    permutation: dict[int, int]
    c_applied: int
    swaps_applied: int
    order: str


def step_circuits(layout: VicinityLayout, params: CollisionParams, t: int,
                  order: str = "collide-stream") -> StepCircuits:
    """Circuits for time step t.

    ``stream-collide`` collides the region N_t - t after streaming into it,
    which is the count c(t). ``collide-stream`` must collide one shell
    further out (N_t - t + 1) because those sites stream into the retained
    region in the same step.
    """
    if order == "stream-collide":
        radius = layout.extent - t
    elif order == "collide-stream":
        radius = layout.extent - t + 1
    else:
        raise ValueError(f"unknown step order {order!r}")
    collision = collision_total_circuit(layout, params, t, radius=radius)
    streaming, perm = streaming_step(layout, t)
    local = len(collision_local_gates(params, (0, 1, 2, 3)))
    return StepCircuits(t, collision, streaming, perm, len(collision) // local,
                        streaming.count("SWAP"), order)


def schedule(layout: VicinityLayout, params: CollisionParams, order: str = "collide-stream") -> list[StepCircuits]:
    return [step_circuits(layout, params, t, order) for t in range(1, layout.extent + 1)]
