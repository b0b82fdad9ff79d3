"""Window files, canonical JSON and CSV helpers.

Window file (``.win``), one directive or entry per line, ``#`` comments::

    lattice D2Q4
    extent 1          # window around a focal site ...
    0 0 0             # ... then one line per occupied (offset..., direction)
    0 0 2

or, for full-grid runs::

    lattice D1Q2
    grid 4            # grid extents, axis 0 first
    1 0               # site coordinates..., direction
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

from .lattice import OccupancyField, as_descriptor, build_descriptor
from .simulator import Window

SCHEMA_VERSION = 1


class WindowFormatError(ValueError):
    pass


def parse_window(text: str) -> Window | OccupancyField:
    lattice = extent = grid = None
    entries: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "lattice":
                lattice = build_descriptor(rest[0])
            elif head == "extent":
                (extent,) = (int(x) for x in rest)
            elif head == "grid":
                grid = tuple(int(x) for x in rest)
                if not grid or min(grid) < 1:
                    raise ValueError("grid extents must be positive")
            else:
                entries.append(tuple(int(x) for x in line.split()))
        except (ValueError, IndexError) as exc:
            raise WindowFormatError(f"line {lineno}: {raw.strip()!r}: {exc}") from None
    if lattice is None:
        raise WindowFormatError("missing 'lattice' header")
    if (extent is None) == (grid is None):
        raise WindowFormatError("need exactly one of 'extent' or 'grid'")
    width = lattice.dimension + 1
    for e in entries:
        if len(e) != width:
            raise WindowFormatError(f"entry {e} should have {width} integers")
        if not 0 <= e[-1] < lattice.m:
            raise WindowFormatError(f"direction {e[-1]} out of range for {lattice.name}")
    if grid is not None:
        if len(grid) != lattice.dimension:
            raise WindowFormatError(f"grid needs {lattice.dimension} extents")
        occ = np.zeros(grid + (lattice.m,), dtype=bool)
        for e in entries:
            if any(not 0 <= c < g for c, g in zip(e[:-1], grid)):
                raise WindowFormatError(f"site {e[:-1]} outside grid {grid}")
            occ[e] = True
        return OccupancyField(lattice, grid, occ)
    try:
        return Window(lattice.name, extent, frozenset((e[:-1], e[-1]) for e in entries))
    except ValueError as exc:
        raise WindowFormatError(str(exc)) from None


def serialize_window(obj: Window | OccupancyField) -> str:
    if isinstance(obj, Window):
        lines = [f"lattice {obj.lattice}", f"extent {obj.extent}"]
        entries = sorted(tuple(o) + (j,) for o, j in obj.occupied)
    else:
        lines = [f"lattice {obj.descriptor.name}", "grid " + " ".join(map(str, obj.extents))]
        entries = sorted(tuple(int(i) for i in idx) for idx in np.argwhere(obj.occ))
    lines += [" ".join(map(str, e)) for e in entries]
    return "\n".join(lines) + "\n"


def read_window(path) -> Window | OccupancyField:
    with open(path, encoding="utf-8") as fh:
        return parse_window(fh.read())


# ---------------------------------------------------------------------------
# canonical JSON: sorted keys, floats at 17 significant digits


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize {x!r}")
    s = f"{x + 0.0:.17g}"  # folds -0.0 into 0.0
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) or v is None for v in obj):
            return "[" + ", ".join(_encode(v, indent, level) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def write_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def describe_descriptor(lattice) -> dict:
    d = as_descriptor(lattice)
    return {"name": d.name, "dimension": d.dimension, "velocities": [list(v) for v in d.velocities]}
