#!/usr/bin/env python3
"""Print both unitarity obstructions and a small sweep of the amplitude one."""
import argparse
import math

import numpy as np

from spacetime_qlbm import sparse as sp
from spacetime_qlbm.realizability import (AmplitudeNogoParams, amplitude_nogo_instance, cbs_forced_operator,
                                          cbs_nogo_instance, gram_check)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    report = gram_check(cbs_nogo_instance())
    print("basis-state encoding, streaming:")
    print(f"  <psi1|psi2>   = {report.gram_in[0, 1].real:.12g}")
    print(f"  <psi1'|psi2'> = {report.gram_out[0, 1].real:.12g}")
    dev = sp.unitarity_check(cbs_forced_operator()).max_deviation
    print(f"  least-squares operator forced by the transitions: max|U^H U - I| = {dev:.3g}")

    print("amplitude encoding, collision (violation should equal |gamma1 beta2|):")
    print(f"  {'gamma1':>10} {'beta2':>10} {'theta':>8} {'violation':>12} {'|g1 b2|':>12}")
    rng = np.random.default_rng(args.seed)
    cases = [AmplitudeNogoParams.from_gamma_beta(g, 1 / math.sqrt(2)) for g in (0.0, 0.5, 1.0)]
    cases += [AmplitudeNogoParams.random(rng) for _ in range(args.samples)]
    for p in cases:
        r = gram_check(amplitude_nogo_instance(p))
        print(f"  {abs(p.gamma1):10.6f} {abs(p.beta2):10.6f} {p.theta:8.4f} {r.max_violation:12.3e} "
              f"{abs(p.gamma1 * p.beta2):12.3e}")


if __name__ == "__main__":
    main()
