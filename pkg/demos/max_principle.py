"""A square pulse advected on a perturbed periodic mesh with forward Euler.

Limited reconstructions keep every cell inside the local bounds of its
neighbours; the unlimited Frink reconstruction over- and undershoots.

    python3 demos/max_principle.py
"""

import numpy as np

from vcfv.mesh import generate_box, make_periodic
from vcfv.physics import ScalarModel
from vcfv.recon import ReconConfig
from vcfv.solver import Discretization, FieldSet, SchemeConfig, TimeControls, integrate

mesh = make_periodic(generate_box(2, (1.0, 1.0), (32, 32), split="random", perturb=0.2, seed=5), (0, 1))
x = mesh.centroids
u0 = ((np.abs(x[:, 0] - 0.5) < 0.25) & (np.abs(x[:, 1] - 0.5) < 0.25)).astype(float)
model = ScalarModel("advection", (1.0, 0.5))
controls = TimeControls(cfl=0.4, t_end=1e9, integrator="forward_euler", max_steps=500)

print(f"{'reconstruction':22s} {'violations':>10s} {'min':>10s} {'max':>10s}")
for recon, limited in (("first_order", False), ("upwind", True), ("frink", True), ("upwind", False), ("frink", False)):
    scheme = SchemeConfig(model, ReconConfig(recon, limited, 2), "upwind", "inverse_distance")
    fields, report = integrate(Discretization(mesh, scheme), FieldSet(u0.copy()), controls, check_max_principle=True)
    label = recon + (" (limited)" if limited else "")
    u = fields.cell_values
    print(f"{label:22s} {len(report.max_principle_violations):10d} {u.min():10.4f} {u.max():10.4f}")
