#!/usr/bin/env python3
"""Semi-inner-product axiom residuals over an exponent grid.

Samples random (f, g, h, a, b) per (p, q) cell and prints the worst residual
relative to the sample's scale.  All residuals should sit at rounding level
for p = 2 and below 1e-9 elsewhere.
"""

import argparse
import sys

from bjlab import SpaceSpec, bochner_norm, sip_axiom_report
from bjlab.harness import trial_rng
from bjlab.preserver import random_element


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--d", type=int, default=2)
    args = ap.parse_args()

    print(f"{'p':>4} {'q':>4} {'max_residual':>14} {'norm_compat_rel':>16}")
    worst_overall = 0.0
    for k, p in enumerate((1.5, 2.0, 3.0, 4.0)):
        for j, q in enumerate((1.5, 2.0, 3.0)):
            spec = SpaceSpec(p, q, args.n, args.d, (1.0,) * args.n)
            rng = trial_rng(args.seed, k * 10 + j)
            worst = 0.0
            worst_norm = 0.0
            for _ in range(args.samples):
                f = random_element(spec, rng, min_norm=0.0)
                g = random_element(spec, rng, min_norm=0.0)
                h = random_element(spec, rng, min_norm=0.0)
                a, b = rng.standard_normal(2) * 1.5
                rep = sip_axiom_report(f, g, h, a, b, spec)
                worst = max(worst, rep.max_relative())
                nf2 = bochner_norm(f, spec) ** 2
                if nf2 > 0.0:
                    worst_norm = max(worst_norm, rep.norm_compatibility / nf2)
            worst_overall = max(worst_overall, worst)
            print(f"{p:4.1f} {q:4.1f} {worst:14.3e} {worst_norm:16.3e}")
    print(f"overall max residual: {worst_overall:.3e}")
    return 0 if worst_overall <= 1e-9 else 2


if __name__ == "__main__":
    sys.exit(main())
