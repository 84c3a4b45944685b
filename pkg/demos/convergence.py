"""Observed order of accuracy for smooth periodic advection.

    python3 demos/convergence.py
"""

from vcfv.verify import convergence_study

for recon in ("first_order", "frink", "upwind"):
    res = convergence_study(levels=(16, 32, 64), recon=recon)
    print(f"{recon}: orders {', '.join(f'{o:.3f}' for o in res.orders)}")
    print(res.csv())
