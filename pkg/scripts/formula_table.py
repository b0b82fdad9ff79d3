#!/usr/bin/env python3
"""Count table (qubits, collisions, swaps, depth) for every lattice, as CSV."""
import argparse
import sys

from spacetime_qlbm.cli import FORMULA_COLUMNS, formula_rows
from spacetime_qlbm.io import write_csv
from spacetime_qlbm.lattice import SUPPORTED_LATTICES


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nt-max", type=int, default=6)
    ap.add_argument("--lattices", nargs="+", default=list(SUPPORTED_LATTICES))
    args = ap.parse_args()
    all_ok = True
    for name in args.lattices:
        rows, ok = formula_rows(name, args.nt_max)
        all_ok &= ok
        for row in rows:
            row["lattice"] = name
        sys.stdout.write(write_csv(rows, ("lattice",) + FORMULA_COLUMNS) if name == args.lattices[0]
                         else write_csv(rows, ("lattice",) + FORMULA_COLUMNS).split("\n", 1)[1])
    if not all_ok:
        sys.exit("formula and enumeration disagree")


if __name__ == "__main__":
    main()
