"""Sod and the double-rarefaction tube in a thin 3-D channel, against the
exact Riemann solution.  Takes a few minutes.

    python3 demos/shock_tubes.py [--csv DIR]
"""

import argparse
from pathlib import Path

import numpy as np

from vcfv.verify import shock_tube_study

parser = argparse.ArgumentParser()
parser.add_argument("--csv", type=Path, help="write centreline profiles here")
args = parser.parse_args()

for case, flux in (("sod", "roe"), ("test2", "kfvs")):
    for recon in ("frink", "upwind"):
        r = shock_tube_study(case, recon, True, flux)
        print(
            f"{case:5s} {recon:6s} limited + {flux:4s}: L1(rho) {r.l1_density:.5f}  overshoot {r.overshoot:.1e}  "
            f"min rho {r.min_density:.3e}  min p {r.min_pressure:.3e}  steps {r.steps}"
        )
        if args.csv:
            args.csv.mkdir(parents=True, exist_ok=True)
            np.savetxt(
                args.csv / f"{case}_{recon}.csv",
                np.column_stack([r.s, r.density, r.exact_density]),
                delimiter=",",
                header="x,density,exact_density",
                comments="",
            )
