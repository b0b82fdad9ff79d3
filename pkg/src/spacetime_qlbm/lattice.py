"""Classical lattice-gas reference: descriptors, occupancy fields, streaming, collision.

Everything quantum in this package is checked against these functions.

Conventions
-----------
* A local velocity pattern is a tuple of m bits ``(q0, q1, ..., q_{m-1})``;
  ``"1010"`` means q0 = 1, q1 = 0, q2 = 1, q3 = 0 (leftmost is q0).
* D2Q4 directions: q0 = (+1, 0), q1 = (0, +1), q2 = (-1, 0), q3 = (0, -1).
  D2Q5 appends the rest velocity (0, 0) as q4, D1Q3 appends (0,) as q2.
* Sites are linearized row-major with axis 0 fastest, and the bit of
  (site, direction j) lives at flat index ``site * m + j``.
* Boundaries are periodic.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

Pattern = tuple[int, ...]
Vector = tuple[int, ...]


class UnknownLatticeError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeDescriptor:
    name: str
    dimension: int
    velocities: tuple[Vector, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if len(set(self.velocities)) != len(self.velocities):
            raise ValueError(f"{self.name}: duplicate velocities")
        zero = (0,) * self.dimension
        for e in self.velocities:
            if len(e) != self.dimension or any(c not in (-1, 0, 1) for c in e):
                raise ValueError(f"{self.name}: bad velocity {e}")
            if e != zero and tuple(-c for c in e) not in self.velocities:
                raise ValueError(f"{self.name}: velocity {e} has no opposite")
        if sum(e == zero for e in self.velocities) > 1:
            raise ValueError(f"{self.name}: more than one rest velocity")

    @property
    def m(self) -> int:
        return len(self.velocities)

    @property
    def rest_index(self) -> int | None:
        zero = (0,) * self.dimension
        return self.velocities.index(zero) if zero in self.velocities else None

    @property
    def moving(self) -> tuple[int, ...]:
        """Indices of the nonzero velocities."""
        return tuple(j for j in range(self.m) if j != self.rest_index)


_VELOCITIES = {
    "D1Q2": (1, ((1,), (-1,))),
    "D1Q3": (1, ((1,), (-1,), (0,))),
    "D2Q4": (2, ((1, 0), (0, 1), (-1, 0), (0, -1))),
    "D2Q5": (2, ((1, 0), (0, 1), (-1, 0), (0, -1), (0, 0))),
}

SUPPORTED_LATTICES = tuple(_VELOCITIES)


def build_descriptor(name: str) -> LatticeDescriptor:
    key = name.upper()
    if key not in _VELOCITIES:
        raise UnknownLatticeError(
            f"unsupported lattice {name!r}; choose one of {', '.join(SUPPORTED_LATTICES)}"
        )
    dim, vel = _VELOCITIES[key]
    return LatticeDescriptor(key, dim, vel)


def as_descriptor(lattice: str | LatticeDescriptor) -> LatticeDescriptor:
    return lattice if isinstance(lattice, LatticeDescriptor) else build_descriptor(lattice)


# ---------------------------------------------------------------------------
# local patterns


def parse_pattern(pattern: str | Sequence[int], m: int | None = None) -> Pattern:
    if isinstance(pattern, str):
        bits = tuple(int(c) for c in pattern.strip())
    else:
        bits = tuple(int(b) for b in pattern)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"pattern {pattern!r} is not binary")
    if m is not None and len(bits) != m:
        raise ValueError(f"pattern {pattern!r} has {len(bits)} bits, expected {m}")
    return bits


def format_pattern(pattern: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in pattern)


def pattern_to_int(pattern: Sequence[int]) -> int:
    value = 0
    for b in pattern:
        value = (value << 1) | int(b)
    return value


def int_to_pattern(value: int, m: int) -> Pattern:
    return tuple((value >> (m - 1 - j)) & 1 for j in range(m))


@dataclass(frozen=True)
class MassMomentum:
    mass: int
    momentum: Vector


def mass_momentum(pattern: str | Sequence[int], descriptor: LatticeDescriptor) -> MassMomentum:
    bits = parse_pattern(pattern, descriptor.m)
    momentum = [0] * descriptor.dimension
    for b, e in zip(bits, descriptor.velocities):
        if b:
            for axis, c in enumerate(e):
                momentum[axis] += c
    return MassMomentum(sum(bits), tuple(momentum))


@dataclass(frozen=True)
class EquivalenceClassTable:
    descriptor: LatticeDescriptor
    classes: dict[MassMomentum, tuple[Pattern, ...]]

    def class_of(self, pattern: str | Sequence[int]) -> tuple[Pattern, ...]:
        return self.classes[mass_momentum(pattern, self.descriptor)]

    def non_singleton(self) -> list[tuple[Pattern, ...]]:
        return [members for members in self.classes.values() if len(members) > 1]

    def partner(self, pattern: str | Sequence[int]) -> Pattern:
        """The other member of a two-element class, or the pattern itself."""
        bits = parse_pattern(pattern, self.descriptor.m)
        members = self.class_of(bits)
        if len(members) == 2:
            return members[0] if members[1] == bits else members[1]
        return bits


def equivalence_classes(descriptor: LatticeDescriptor) -> EquivalenceClassTable:
    classes: dict[MassMomentum, list[Pattern]] = {}
    for bits in product((0, 1), repeat=descriptor.m):
        classes.setdefault(mass_momentum(bits, descriptor), []).append(bits)
    return EquivalenceClassTable(descriptor, {k: tuple(v) for k, v in classes.items()})


def collision_lookup(descriptor: LatticeDescriptor, rule: str) -> np.ndarray:
    """Table mapping pattern integer -> collided pattern integer."""
    size = 1 << descriptor.m
    if rule == "identity":
        return np.arange(size)
    if rule != "swap-class":
        raise ValueError(f"unknown collision rule {rule!r}")
    if any(len(c) > 2 for c in equivalence_classes(descriptor).non_singleton()):
        # never happens for the supported von Neumann lattices
        raise ValueError(f"{descriptor.name} has classes with more than two members")
    table = equivalence_classes(descriptor)
    return np.array([pattern_to_int(table.partner(int_to_pattern(v, descriptor.m)))
                     for v in range(size)])


# ---------------------------------------------------------------------------
# occupancy fields


@dataclass(frozen=True, eq=False)
class OccupancyField:
    """Boolean occupancy per (site, direction) on a periodic grid.

    ``occ`` has shape ``(*extents, m)`` and is indexed by site coordinates
    then direction.
    """

    descriptor: LatticeDescriptor
    extents: tuple[int, ...]
    occ: np.ndarray

    def __post_init__(self):
        if len(self.extents) != self.descriptor.dimension or min(self.extents) < 1:
            raise ValueError(f"bad extents {self.extents} for {self.descriptor.name}")
        occ = np.asarray(self.occ, dtype=bool)
        if occ.shape != tuple(self.extents) + (self.descriptor.m,):
            raise ValueError(f"occupancy shape {occ.shape} does not match extents")
        occ = occ.copy()
        occ.flags.writeable = False
        object.__setattr__(self, "occ", occ)

    @classmethod
    def zeros(cls, descriptor: LatticeDescriptor, extents: Sequence[int]) -> "OccupancyField":
        extents = tuple(int(x) for x in extents)
        return cls(descriptor, extents, np.zeros(extents + (descriptor.m,), dtype=bool))

    @classmethod
    def from_bits(cls, descriptor: LatticeDescriptor, extents: Sequence[int],
                  bits: Sequence[int]) -> "OccupancyField":
        extents = tuple(int(x) for x in extents)
        flat = np.asarray(bits, dtype=bool)
        if flat.size != int(np.prod(extents)) * descriptor.m:
            raise ValueError(f"expected {int(np.prod(extents)) * descriptor.m} bits, got {flat.size}")
        # flat order is (x_{n-1}, ..., x_0, j) in C order
        occ = flat.reshape(tuple(reversed(extents)) + (descriptor.m,))
        axes = tuple(reversed(range(len(extents)))) + (len(extents),)
        return cls(descriptor, extents, occ.transpose(axes))

    @classmethod
    def from_site_patterns(cls, descriptor: LatticeDescriptor, extents: Sequence[int],
                           patterns: Iterable[str | Sequence[int]]) -> "OccupancyField":
        """Build from per-site patterns listed in linear site order."""
        bits = []
        for p in patterns:
            bits.extend(parse_pattern(p, descriptor.m))
        return cls.from_bits(descriptor, extents, bits)

    @classmethod
    def random(cls, descriptor: LatticeDescriptor, extents: Sequence[int],
               rng: np.random.Generator, density: float = 0.5) -> "OccupancyField":
        extents = tuple(int(x) for x in extents)
        return cls(descriptor, extents, rng.random(extents + (descriptor.m,)) < density)

    @property
    def num_sites(self) -> int:
        return int(np.prod(self.extents))

    @property
    def bits(self) -> np.ndarray:
        n = len(self.extents)
        axes = tuple(reversed(range(n))) + (n,)
        return self.occ.transpose(axes).reshape(-1).astype(np.uint8)

    def site_coords(self, site: int) -> tuple[int, ...]:
        coords = []
        for extent in self.extents:
            coords.append(site % extent)
            site //= extent
        return tuple(coords)

    def pattern_at(self, coords: Sequence[int]) -> Pattern:
        return tuple(int(b) for b in self.occ[tuple(coords)])

    def site_patterns(self) -> list[str]:
        m = self.descriptor.m
        b = self.bits
        return [format_pattern(b[s * m:(s + 1) * m]) for s in range(self.num_sites)]

    def mass(self) -> int:
        return int(self.occ.sum())

    def momentum(self) -> Vector:
        vel = np.array(self.descriptor.velocities, dtype=int)
        counts = self.occ.reshape(-1, self.descriptor.m).sum(axis=0)
        return tuple(int(x) for x in counts @ vel)

    def __eq__(self, other):
        if not isinstance(other, OccupancyField):
            return NotImplemented
        return (self.descriptor == other.descriptor and self.extents == other.extents
                and np.array_equal(self.occ, other.occ))

    def __repr__(self):
        return (f"OccupancyField({self.descriptor.name}, extents={self.extents}, "
                f"sites={self.site_patterns()})")


def stream_classical(field: OccupancyField, reverse: bool = False) -> OccupancyField:
    """Move every particle one site along its velocity (periodic).

    Output bit (x, j) is input bit (x - e_j, j). ``reverse=True`` streams
    with negated velocities, which inverts the step.
    """
    sign = -1 if reverse else 1
    n = field.descriptor.dimension
    out = np.empty_like(field.occ)
    for j, e in enumerate(field.descriptor.velocities):
        out[..., j] = np.roll(field.occ[..., j], shift=tuple(sign * c for c in e), axis=tuple(range(n)))
    return OccupancyField(field.descriptor, field.extents, out)


def collide_classical(field: OccupancyField, rule: str = "swap-class") -> OccupancyField:
    """Apply a deterministic collision rule at every site.

    ``identity`` leaves the field alone; ``swap-class`` maps each pattern to
    the other member of its two-element equivalence class.
    """
    d = field.descriptor
    lookup = collision_lookup(d, rule)
    weights = 1 << np.arange(d.m - 1, -1, -1)
    codes = field.occ.astype(np.int64) @ weights
    new = lookup[codes]
    out = ((new[..., None] >> np.arange(d.m - 1, -1, -1)) & 1).astype(bool)
    return OccupancyField(d, field.extents, out)


def evolve_classical(field: OccupancyField, steps: int, rule: str = "swap-class",
                     order: str = "collide-stream") -> list[OccupancyField]:
    """Trace of ``steps`` time steps, initial field included."""
    trace = [field]
    for _ in range(steps):
        if order == "collide-stream":
            field = stream_classical(collide_classical(field, rule))
        elif order == "stream-collide":
            field = collide_classical(stream_classical(field), rule)
        else:
            raise ValueError(f"unknown step order {order!r}")
        trace.append(field)
    return trace
