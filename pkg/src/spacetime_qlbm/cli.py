"""Command-line entry point.

    spacetime-qlbm nogo {cbs,amplitude} [--gamma1 G] [--beta2 B] [--theta T]
    spacetime-qlbm formulas [--nt-max K] [--lattice L]
    spacetime-qlbm simulate --lattice L --nt N --alpha A --beta B [--init F.win] [--verify]
    spacetime-qlbm fullgrid --lattice L --sites 4 --steps S [--init F.win] [--verify]
    spacetime-qlbm validate [--quick] [--inject-fault]

Exit codes: 0 success (or the expected verdict), 1 validation failure,
2 usage, 3 I/O, 4 parse, 5 resource budget.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import io as fio
from .lattice import OccupancyField, UnknownLatticeError, as_descriptor, evolve_classical
from .realizability import (AmplitudeNogoParams, amplitude_nogo_instance, cbs_nogo_instance, gram_check)
from .simulator import (BeyondVicinityError, BudgetError, RunConfig, Window, collision_rule, compare,
                        full_grid_run, run, sample_focal)
from .spacetime import (collision_count_formula, collision_total_circuit, depth_bound, enumerate_vicinity,
                        qubit_count_formula, streaming_step, swap_count_formula)
from .sparse import format_label

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_PARSE, EXIT_BUDGET = range(6)
NORM_SLACK = 1e-6


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _gram_json(report) -> dict:
    return {
        "realizable": report.realizable,
        "tolerance": report.tol,
        "gram_in": [[fio.complex_pair(z) for z in row] for row in report.gram_in],
        "gram_out": [[fio.complex_pair(z) for z in row] for row in report.gram_out],
        "violations": [
            {"i": v.i, "j": v.j, "in": v.inner_in.real, "in_imag": v.inner_in.imag,
             "out": v.inner_out.real, "out_imag": v.inner_out.imag, "magnitude": v.magnitude}
            for v in report.violations
        ],
    }


def _parse_complex(text: str, name: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"--{name}: cannot parse {text!r} as a complex number") from None


def _collision_pair(args) -> tuple[complex, complex]:
    a, b = _parse_complex(args.alpha, "alpha"), _parse_complex(args.beta, "beta")
    total = abs(a) ** 2 + abs(b) ** 2
    if abs(total - 1) > NORM_SLACK:
        raise UsageError(f"|alpha|^2 + |beta|^2 = {total:.6g}, must be 1")
    scale = 1 / math.sqrt(total)
    return a * scale, b * scale


# ---------------------------------------------------------------------------


def cmd_nogo(args) -> int:
    if args.encoding == "cbs":
        report = gram_check(cbs_nogo_instance())
        expected_realizable = False
        params = {}
    else:
        if abs(args.gamma1) > 1 + 1e-12 or abs(args.beta2) > 1 + 1e-12:
            raise UsageError("|gamma1| and |beta2| must not exceed 1")
        try:
            p = AmplitudeNogoParams.from_gamma_beta(args.gamma1, args.beta2, args.theta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        report = gram_check(amplitude_nogo_instance(p))
        expected_realizable = abs(p.gamma1 * p.beta2) <= report.tol
        params = {name: fio.complex_pair(getattr(p, name))
                  for name in ("alpha0", "alpha1", "beta2", "beta3", "gamma0", "gamma1")}
        params["theta"] = p.theta
    reproduced = report.realizable == expected_realizable
    payload = {"schema": fio.SCHEMA_VERSION, "command": "nogo", "encoding": args.encoding,
               "params": params, "expected_realizable": expected_realizable,
               "reproduced": reproduced, **_gram_json(report)}
    if args.format == "human":
        lines = [f"encoding: {args.encoding}", f"realizable: {report.realizable}"]
        for v in report.violations:
            lines.append(f"  pair ({v.i},{v.j}): <in|in> = {v.inner_in:.12g}, <out|out> = {v.inner_out:.12g}, "
                         f"|diff| = {v.magnitude:.12g}")
        lines.append("verdict reproduced" if reproduced else "verdict NOT reproduced")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(fio.dumps(payload), args.out)
    return EXIT_OK if reproduced else EXIT_FAIL


FORMULA_COLUMNS = ("N_t", "t", "n_v", "n_v_enum", "c", "c_enum", "n_swap", "n_swap_enum",
                   "measured_depth", "depth_bound")


def formula_rows(lattice: str, nt_max: int) -> tuple[list[dict], bool]:
    from .spacetime import CollisionParams
    params = CollisionParams(1.0, 0.0)
    rows, ok = [], True
    for nt in range(nt_max + 1):
        layout = enumerate_vicinity(lattice, nt)
        n_v = qubit_count_formula(lattice, nt)
        ok &= n_v == layout.num_qubits
        if nt == 0:
            rows.append({"N_t": 0, "t": "", "n_v": n_v, "n_v_enum": layout.num_qubits})
        for t in range(1, nt + 1):
            circuit, _ = streaming_step(layout, t)
            c_enum = len(collision_total_circuit(layout, params, t)) // 7
            row = {"N_t": nt, "t": t, "n_v": n_v, "n_v_enum": layout.num_qubits,
                   "c": collision_count_formula(lattice, nt, t), "c_enum": c_enum,
                   "n_swap": swap_count_formula(lattice, nt, t), "n_swap_enum": circuit.count("SWAP"),
                   "measured_depth": circuit.depth(), "depth_bound": depth_bound(nt, t)}
            ok &= (row["c"] == row["c_enum"] and row["n_swap"] == row["n_swap_enum"]
                   and row["measured_depth"] <= row["depth_bound"])
            rows.append(row)
    return rows, ok


def cmd_formulas(args) -> int:
    if not 0 <= args.nt_max <= 64:
        raise UsageError("--nt-max must be in 0..64")
    rows, ok = formula_rows(as_descriptor(args.lattice).name, args.nt_max)
    if args.format == "json":
        _emit(fio.dumps({"schema": fio.SCHEMA_VERSION, "command": "formulas", "lattice": args.lattice.upper(),
                         "consistent": ok, "rows": rows}), args.out)
    else:
        _emit(fio.write_csv(rows, FORMULA_COLUMNS), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _config_echo(cfg: RunConfig, init: str | None) -> dict:
    return {"lattice": cfg.lattice, "nt": cfg.nt, "alpha": fio.complex_pair(cfg.alpha),
            "beta": fio.complex_pair(cfg.beta), "order": cfg.order, "mode": cfg.mode,
            "init": init, "max_entries": cfg.max_entries}


def cmd_simulate(args) -> int:
    alpha, beta = _collision_pair(args)
    lattice = as_descriptor(args.lattice).name
    if args.init:
        window = fio.read_window(args.init)
        if not isinstance(window, Window):
            raise fio.WindowFormatError("simulate needs a window file with an 'extent' header")
        if window.lattice != lattice:
            raise UsageError(f"window file is {window.lattice}, --lattice is {lattice}")
        window = window.resized(args.nt)
    else:
        window = Window(lattice, args.nt)
    cfg = RunConfig(lattice, args.nt, alpha, beta, window, args.order, max_entries=args.max_entries)
    result = run(cfg)
    payload = {"schema": fio.SCHEMA_VERSION, "command": "simulate", "config": _config_echo(cfg, args.init),
               "window": fio.serialize_window(window),
               "focal_distribution": dict(sorted(result.focal.probs.items())),
               "peak_entries": result.peak_entries, "final_entries": len(result.state),
               "interference_events": result.interference_events,
               "num_qubits": result.layout.num_qubits}
    if args.shots:
        payload["samples"] = {"shots": args.shots, "seed": args.seed,
                              "counts": sample_focal(result.focal, args.shots, args.seed)}
    code = EXIT_OK
    if args.verify:
        report = compare(cfg)
        payload["comparison"] = {"tv_distance": report.tv_distance, "tolerance": report.tol,
                                 "passed": report.passed, "mode": report.mode, "deltas": report.deltas}
        if not report.passed and not report.interfering:
            code = EXIT_FAIL
    if args.format == "human":
        lines = [f"{lattice}, N_t={args.nt}, {result.layout.num_qubits} qubits, order {args.order}",
                 "focal distribution |q0 q1 ...>:"]
        lines += [f"  |{p}>  {v:.12g}" for p, v in sorted(result.focal.probs.items())]
        if len(result.state) <= 8:
            lines.append("final state: " + result.state.ket())
        if "samples" in payload:
            lines.append(f"{args.shots} shots (seed {args.seed}): " + ", ".join(
                f"{k}:{v}" for k, v in payload["samples"]["counts"].items()))
        if "comparison" in payload:
            c = payload["comparison"]
            lines.append(f"classical ensemble TV distance {c['tv_distance']:.3g} ({c['mode']})")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(fio.dumps(payload), args.out)
    return code


def _parse_sites(text: str) -> tuple[int, ...]:
    try:
        sites = tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--sites: cannot parse {text!r}") from None
    if not sites or min(sites) < 1:
        raise UsageError("--sites must be positive")
    return sites


def cmd_fullgrid(args) -> int:
    alpha, beta = _collision_pair(args)
    d = as_descriptor(args.lattice)
    if args.init:
        init = fio.read_window(args.init)
        if not isinstance(init, OccupancyField):
            raise fio.WindowFormatError("fullgrid needs a window file with a 'grid' header")
        if init.descriptor != d:
            raise UsageError(f"grid file is {init.descriptor.name}, --lattice is {d.name}")
        if args.sites and _parse_sites(args.sites) != init.extents:
            raise UsageError(f"--sites {args.sites} disagrees with grid {init.extents} in file")
    else:
        if not args.sites:
            raise UsageError("give --sites or --init")
        sites = _parse_sites(args.sites)
        if len(sites) != d.dimension:
            raise UsageError(f"{d.name} needs {d.dimension} grid extents")
        init = OccupancyField.zeros(d, sites)
    cfg = RunConfig(d.name, args.steps, alpha, beta, init, args.order, mode="full-grid",
                    max_entries=args.max_entries)
    result = full_grid_run(cfg)
    n = init.num_sites * d.m
    payload = {"schema": fio.SCHEMA_VERSION, "command": "fullgrid", "config": _config_echo(cfg, args.init),
               "extents": list(init.extents), "num_qubits": n,
               "final_entries": len(result.final)}
    if result.fields is not None:
        payload["trace"] = [f.site_patterns() for f in result.fields]
    else:
        payload["final_distribution"] = {format_label(k, n): p
                                         for k, p in sorted(result.final.probabilities().items())}
    code = EXIT_OK
    if args.verify:
        try:
            rule = collision_rule(cfg.params)
        except ValueError as exc:
            raise UsageError(f"--verify needs a deterministic collision: {exc}") from None
        expected = evolve_classical(init, args.steps, rule, args.order)
        match = result.fields is not None and list(result.fields) == expected
        payload["verification"] = {"classical_rule": rule, "matches": match}
        code = EXIT_OK if match else EXIT_FAIL
    if args.format == "human":
        lines = [f"{d.name} grid {init.extents}, {n} qubits, {args.steps} steps"]
        if result.fields is not None:
            lines += [f"  t={k}: " + " ".join(f.site_patterns()) for k, f in enumerate(result.fields)]
        else:
            lines.append("final state: " + result.final.ket())
        if args.verify:
            lines.append(f"matches classical evolution: {payload['verification']['matches']}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(fio.dumps(payload), args.out)
    return code


def cmd_validate(args) -> int:
    from .validation import run_checks
    results = run_checks(quick=args.quick, inject_fault=args.inject_fault)
    for r in results:
        print(r.line(), flush=True)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spacetime-qlbm", description="Quantum lattice-gas encodings: no-go checks and "
                                                   "space-time encoded simulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("json", "human")):
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--out", help="write output here instead of stdout")

    s = sub.add_parser("nogo", help="reproduce a unitarity obstruction")
    s.add_argument("encoding", choices=["cbs", "amplitude"])
    s.add_argument("--gamma1", type=float, default=1.0)
    s.add_argument("--beta2", type=float, default=1 / math.sqrt(2))
    s.add_argument("--theta", type=float, default=0.0)
    common(s)
    s.set_defaults(func=cmd_nogo)

    s = sub.add_parser("formulas", help="qubit, collision and swap counts vs enumeration")
    s.add_argument("--nt-max", type=int, default=8)
    s.add_argument("--lattice", default="D2Q4")
    common(s, formats=("csv", "json"))
    s.set_defaults(func=cmd_formulas)

    for name, func in (("simulate", cmd_simulate), ("fullgrid", cmd_fullgrid)):
        s = sub.add_parser(name, help="space-time window run" if name == "simulate" else "whole-grid run")
        s.add_argument("--lattice", default="D2Q4")
        s.add_argument("--alpha", default="1")
        s.add_argument("--beta", default="0")
        s.add_argument("--init", help="window file (.win)")
        s.add_argument("--order", choices=["collide-stream", "stream-collide"], default="collide-stream")
        s.add_argument("--verify", action="store_true", help="compare against the classical oracle")
        s.add_argument("--max-entries", type=int, default=1 << 22)
        if name == "simulate":
            s.add_argument("--nt", type=int, default=1)
            s.add_argument("--shots", type=int, default=0, help="also draw seeded measurement samples")
            s.add_argument("--seed", type=int, default=0)
        else:
            s.add_argument("--sites", help="grid extents, e.g. 4 or 2x2")
            s.add_argument("--steps", type=int, default=1)
        common(s)
        s.set_defaults(func=func)

    s = sub.add_parser("validate", help="run the acceptance checks")
    s.add_argument("--quick", action="store_true", help="smaller random samples")
    s.add_argument("--inject-fault", action="store_true", help="perturb a parameter to exercise the harness")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (fio.WindowFormatError, BeyondVicinityError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BudgetError, MemoryError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UnknownLatticeError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
