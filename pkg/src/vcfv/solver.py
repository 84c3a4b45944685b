"""Semi-discrete vertex-centroid scheme, boundary states, time stepping, monitors.

The residual of cell ``i`` is ``R_i = -sum_j H(U+_ij, U-_ij, n_ij)`` over all its
faces; the update is ``U_i += dt / |C_i| * R_i``.  Scalar fields are 1-D arrays
over cells, Euler fields are ``(n_cells, d + 2)`` conserved arrays.  Vertex
values and reconstruction work on primitive variables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, PositivityError, StepError
from .flux import euler_numerical_flux, scalar_numerical_flux
from .interp import StencilSet
from .physics import GasModel, ScalarModel, cons_to_prim, max_wave_speed, prim_to_cons, scalar_wave_speed
from .recon import FaceInput, ReconConfig, reconstruct, reconstruct_one_sided

log = logging.getLogger(__name__)

BC_KINDS = ("slip_wall", "supersonic_inflow", "transmissive_outflow", "dirichlet_scalar", "periodic")
INTEGRATORS = ("forward_euler", "ssprk3")


@dataclass
class BoundaryCondition:
    tag: str
    kind: str
    # primitive state (Euler inflow) or scalar value (Dirichlet)
    data: object = None

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ConfigError(f"unknown boundary kind {self.kind!r} for tag {self.tag!r}; valid: {', '.join(BC_KINDS)}")
        if self.kind in ("supersonic_inflow", "dirichlet_scalar") and self.data is None:
            raise ConfigError(f"boundary {self.tag!r} of kind {self.kind} needs a state")


@dataclass
class TimeControls:
    cfl: float = 0.4
    t_end: float = 0.0
    fixed_dt: float | None = None
    integrator: str = "ssprk3"
    max_steps: int = 10**9

    def __post_init__(self):
        if not self.cfl > 0:
            raise ConfigError(f"cfl must be positive, got {self.cfl}")
        if self.fixed_dt is not None and not self.fixed_dt > 0:
            raise ConfigError(f"fixed_dt must be positive, got {self.fixed_dt}")
        if self.integrator not in INTEGRATORS:
            raise ConfigError(f"unknown integrator {self.integrator!r}; valid: {', '.join(INTEGRATORS)}")
        if self.t_end < 0:
            raise ConfigError("t_end must be non-negative")


@dataclass
class FieldSet:
    cell_values: np.ndarray
    vertex_values: np.ndarray | None = None
    time: float = 0.0
    step: int = 0


@dataclass
class SchemeConfig:
    """Everything that defines the spatial operator."""

    model: object = field(default_factory=ScalarModel)
    recon: ReconConfig = field(default_factory=ReconConfig)
    flux: str = "upwind"
    interpolation: str = "consistent_shepard"
    boundary: dict = field(default_factory=dict)

    @property
    def is_euler(self):
        return isinstance(self.model, GasModel)


@dataclass
class MonitorReport:
    max_principle_violations: list = field(default_factory=list)
    total_conserved_drift: np.ndarray | None = None
    min_density: float = np.inf
    min_pressure: float = np.inf
    steps: int = 0
    final_time: float = 0.0

    def summary(self):
        drift = None if self.total_conserved_drift is None else [float(x) for x in np.atleast_1d(self.total_conserved_drift)]
        return {
            "final_time": float(self.final_time),
            "steps": int(self.steps),
            "min_density": None if not np.isfinite(self.min_density) else float(self.min_density),
            "min_pressure": None if not np.isfinite(self.min_pressure) else float(self.min_pressure),
            "max_principle_violations": len(self.max_principle_violations),
            "conservation_drift": drift,
        }


# -- spatial operator -------------------------------------------------------------


def _face_mean(V, face_vertices):
    """Mean of vertex values over each face (explicit sum beats ``mean``)."""
    k = face_vertices.shape[1]
    acc = V[face_vertices[:, 0]].copy()
    for c in range(1, k):
        acc += V[face_vertices[:, c]]
    acc *= 1.0 / k
    return acc


class Discretization:
    """Face data, stencils and boundary bookkeeping for one mesh and scheme."""

    def __init__(self, mesh, scheme: SchemeConfig, stencils: StencilSet | None = None):
        self.mesh = mesh
        self.scheme = scheme
        if scheme.recon.dim != mesh.dim:
            scheme = replace(scheme, recon=replace(scheme.recon, dim=mesh.dim))
            self.scheme = scheme
        self.stencils = stencils if stencils is not None else StencilSet(mesh, scheme.interpolation)

        self.interior = mesh.interior_faces
        self.boundary = mesh.boundary_faces
        self.unit_normals = mesh.face_normals / mesh.face_areas[:, None]
        diam = mesh.cell_diameters
        fi = self.interior
        self.h_face = 0.5 * (diam[mesh.face_left[fi]] + diam[mesh.face_right[fi]])
        # gather indices used on every residual evaluation
        fb = self.boundary
        self._L_int, self._R_int = mesh.face_left[fi], mesh.face_right[fi]
        self._L_bnd = mesh.face_left[fb]
        self._opp_l_int, self._opp_r_int = mesh.face_opp_left[fi], mesh.face_opp_right[fi]
        self._opp_l_bnd = mesh.face_opp_left[fb]
        self._fv_int, self._fv_bnd = mesh.face_vertices[fi], mesh.face_vertices[fb]

        # boundary faces grouped by condition
        self.bc_groups = []
        for tag, faces in mesh.boundary_tags.items():
            if len(faces) == 0:
                continue
            bc = scheme.boundary.get(tag)
            if bc is None:
                raise ConfigError(f"no boundary condition for tag {tag!r} ({len(faces)} faces)")
            if bc.kind == "periodic":
                raise ConfigError(f"tag {tag!r} is marked periodic but still has unpaired boundary faces")
            if scheme.is_euler and bc.kind == "dirichlet_scalar":
                raise ConfigError(f"dirichlet_scalar on tag {tag!r} needs a scalar model")
            if not scheme.is_euler and bc.kind in ("slip_wall", "supersonic_inflow"):
                raise ConfigError(f"{bc.kind} on tag {tag!r} needs the Euler model")
            pos = np.searchsorted(self.boundary, faces)
            self.bc_groups.append((bc, pos))

    # state helpers
    @property
    def n_components(self):
        return self.mesh.dim + 2 if self.scheme.is_euler else 1

    def primitive(self, U):
        if self.scheme.is_euler:
            return cons_to_prim(U, self.scheme.model)
        return np.asarray(U, dtype=float)

    def conserved(self, P):
        return prim_to_cons(P, self.scheme.model) if self.scheme.is_euler else np.asarray(P, dtype=float)

    def vertex_values(self, P):
        return self.stencils.matrix @ P

    def totals(self, U):
        """Sum over cells of ``|C_i| U_i`` per component."""
        return np.tensordot(self.mesh.volumes, U, axes=1)

    def ghost_states(self, P_plus, P_inner):
        """Exterior states for the boundary faces given their interior states."""
        ghost = np.array(P_plus, dtype=float, copy=True)
        for bc, pos in self.bc_groups:
            if bc.kind == "transmissive_outflow":
                continue
            if bc.kind == "slip_wall":
                n = self.unit_normals[self.boundary[pos]]
                u = ghost[pos, 1:-1]
                un = np.einsum("ij,ij->i", u, n)
                ghost[pos, 1:-1] = u - 2.0 * un[:, None] * n
            else:
                ghost[pos] = np.asarray(bc.data, dtype=float)
        return ghost

    def face_states(self, P, V=None):
        """Reconstructed (left, right) states for interior and boundary faces.

        Returns ``(UL_int, UR_int, UL_bnd, UR_bnd)``.
        """
        if V is None:
            V = self.vertex_values(P)
        inp = FaceInput(
            U_i=P[self._L_int],
            U_j=P[self._R_int],
            V_ij=V[self._opp_l_int],
            V_ji=V[self._opp_r_int],
            W_ij=_face_mean(V, self._fv_int),
            h_face=self.h_face,
        )
        st = reconstruct(inp, self.scheme.recon)
        U_b = P[self._L_bnd]
        UL_b = reconstruct_one_sided(U_b, V[self._opp_l_bnd], _face_mean(V, self._fv_bnd), self.scheme.recon)
        UR_b = self.ghost_states(UL_b, U_b)
        return st.U_plus, st.U_minus, UL_b, UR_b

    def _flux(self, a, b, n, faces):
        s = self.scheme
        if not s.is_euler:
            return scalar_numerical_flux(s.flux, a, b, n, s.model).flux
        for state, side in ((a, "left"), (b, "right")):
            bad = ~((state[:, 0] > 0) & (state[:, -1] > 0))
            if np.any(bad):
                k = int(np.flatnonzero(bad)[0])
                raise PositivityError(
                    f"reconstructed {side} state of face {int(faces[k])} is not physical: {state[k]}",
                    face=int(faces[k]),
                    cell=int(self.mesh.face_left[faces[k]]),
                    state=state[k],
                )
        return euler_numerical_flux(s.flux, a, b, n, s.model).flux

    def residual(self, U, return_boundary=False):
        """``R_i = -sum_j H`` and, optionally, the total flux leaving through the boundary."""
        m = self.mesh
        P = self.primitive(U)
        V = self.vertex_values(P)
        UL, UR, UL_b, UR_b = self.face_states(P, V)
        fi, fb = self.interior, self.boundary
        H_int = self._flux(UL, UR, m.face_normals[fi], fi)
        H_bnd = self._flux(UL_b, UR_b, m.face_normals[fb], fb) if len(fb) else np.zeros((0,) + np.shape(U)[1:])
        left = np.concatenate([m.face_left[fi], m.face_left[fb]])
        H_left = np.concatenate([H_int, H_bnd])
        R = _gather(m.n_cells, m.face_right[fi], H_int) - _gather(m.n_cells, left, H_left)
        if return_boundary:
            return R, H_bnd.sum(axis=0) if len(fb) else np.zeros(np.shape(U)[1:])
        return R

    def time_step(self, U, controls: TimeControls):
        if controls.fixed_dt is not None:
            return float(controls.fixed_dt)
        m = self.mesh
        P = self.primitive(U)
        fi, fb = self.interior, self.boundary
        L, R = m.face_left, m.face_right
        nu = self.unit_normals
        if self.scheme.is_euler:
            gas = self.scheme.model
            lam_i = np.maximum(max_wave_speed(P[L[fi]], nu[fi], gas), max_wave_speed(P[R[fi]], nu[fi], gas))
            ghost = self.ghost_states(P[L[fb]], P[L[fb]])
            lam_b = np.maximum(max_wave_speed(P[L[fb]], nu[fb], gas), max_wave_speed(ghost, nu[fb], gas))
        else:
            model = self.scheme.model
            lam_i = np.maximum(
                scalar_wave_speed(P[L[fi]], nu[fi], model), scalar_wave_speed(P[R[fi]], nu[fi], model)
            )
            lam_b = scalar_wave_speed(P[L[fb]], nu[fb], model)
            for bc, pos in self.bc_groups:
                if bc.kind == "dirichlet_scalar":
                    lam_b[pos] = np.maximum(
                        lam_b[pos], scalar_wave_speed(np.full(len(pos), float(bc.data)), nu[fb[pos]], model)
                    )
        a_i = lam_i * m.face_areas[fi]
        a_b = lam_b * m.face_areas[fb]
        rate = (
            np.bincount(L[fi], a_i, m.n_cells)
            + np.bincount(R[fi], a_i, m.n_cells)
            + np.bincount(L[fb], a_b, m.n_cells)
        )
        if not np.all(np.isfinite(rate)):
            raise StepError("non-finite wave speed", step=-1, time=float("nan"))
        if np.all(rate == 0):
            return np.inf
        with np.errstate(divide="ignore"):
            return float(controls.cfl * np.min(m.volumes / rate))


def _gather(n, idx, values):
    """Per-cell sums of face values in a fixed order (bit-reproducible)."""
    if values.ndim == 1:
        return np.bincount(idx, weights=values, minlength=n)
    return np.stack([np.bincount(idx, weights=values[:, k], minlength=n) for k in range(values.shape[1])], axis=1)


# -- public functional API ------------------------------------------------------------


def assemble_residual(mesh, stencils, fields: FieldSet, scheme: SchemeConfig):
    """Per-cell residuals; builds a throw-away :class:`Discretization`."""
    disc = Discretization(mesh, scheme, stencils)
    R = disc.residual(fields.cell_values)
    fields.vertex_values = disc.vertex_values(disc.primitive(fields.cell_values))
    return R


def apply_boundary_state(face_normal, interior_state, bc: BoundaryCondition):
    """Ghost state for one boundary face (primitive for Euler)."""
    state = np.array(interior_state, dtype=float, copy=True)
    if bc.kind == "transmissive_outflow":
        return state
    if bc.kind == "slip_wall":
        n = np.asarray(face_normal, dtype=float)
        n = n / np.linalg.norm(n)
        u = state[1:-1]
        state[1:-1] = u - 2.0 * (u @ n) * n
        return state
    if bc.kind in ("supersonic_inflow", "dirichlet_scalar"):
        return np.array(bc.data, dtype=float)
    raise ConfigError(f"boundary kind {bc.kind!r} has no ghost state")


def compute_time_step(disc: Discretization, fields: FieldSet, controls: TimeControls):
    return disc.time_step(fields.cell_values, controls)


def _euler_update(disc, U, dt, step, time):
    try:
        R, B = disc.residual(U, return_boundary=True)
        Unew = U + dt * (R / disc.mesh.volumes[:, None] if U.ndim == 2 else R / disc.mesh.volumes)
        if disc.scheme.is_euler:
            disc.primitive(Unew)
    except PositivityError as exc:
        raise StepError(f"step {step} at t={time:.6g} failed: {exc}", step=step, time=time, cause=exc) from exc
    return Unew, B


def step_forward_euler(disc: Discretization, fields: FieldSet, dt: float):
    """One forward-Euler step; returns (new fields, time-integrated boundary outflow)."""
    U = np.asarray(fields.cell_values, dtype=float)
    Unew, B = _euler_update(disc, U, dt, fields.step, fields.time)
    return FieldSet(Unew, None, fields.time + dt, fields.step + 1), dt * B


def step_ssprk3(disc: Discretization, fields: FieldSet, dt: float):
    """Three-stage SSP Runge-Kutta (Shu-Osher form); vertex values redone each stage."""
    U = np.asarray(fields.cell_values, dtype=float)
    s, t = fields.step, fields.time
    U1, B0 = _euler_update(disc, U, dt, s, t)
    E1, B1 = _euler_update(disc, U1, dt, s, t)
    U2 = 0.75 * U + 0.25 * E1
    E2, B2 = _euler_update(disc, U2, dt, s, t)
    U3 = U / 3.0 + 2.0 / 3.0 * E2
    if disc.scheme.is_euler:
        try:
            disc.primitive(U3)
        except PositivityError as exc:
            raise StepError(f"step {s} at t={t:.6g} failed: {exc}", step=s, time=t, cause=exc) from exc
    boundary = dt * (B0 / 6.0 + B1 / 6.0 + 2.0 * B2 / 3.0)
    return FieldSet(U3, None, t + dt, s + 1), boundary


# -- monitors ---------------------------------------------------------------------------


def local_bounds(disc: Discretization, U, V=None):
    """Per-cell min/max over ``U_i``, face neighbours (or ghosts) and the cell's vertices."""
    m = disc.mesh
    U = np.asarray(U, dtype=float)
    if V is None:
        V = disc.vertex_values(U)
    vals = V[m.cells]
    lo = np.minimum(U, vals.min(axis=1))
    hi = np.maximum(U, vals.max(axis=1))
    fi, fb = disc.interior, disc.boundary
    L, R = m.face_left, m.face_right
    for a, b in ((L[fi], R[fi]), (R[fi], L[fi])):
        np.minimum.at(lo, a, U[b])
        np.maximum.at(hi, a, U[b])
    if len(fb):
        ghost = disc.ghost_states(U[L[fb]], U[L[fb]])
        np.minimum.at(lo, L[fb], ghost)
        np.maximum.at(hi, L[fb], ghost)
    return lo, hi


def monitor_max_principle(disc: Discretization, before: FieldSet, after: FieldSet, slack=1e-12):
    """Cells whose new value leaves the local bound; list of (step, cell, value, bound)."""
    if disc.scheme.is_euler:
        raise ValueError("the maximum-principle monitor applies to scalar models")
    U0 = np.asarray(before.cell_values, dtype=float)
    U1 = np.asarray(after.cell_values, dtype=float)
    lo, hi = local_bounds(disc, U0, before.vertex_values)
    tol = slack * max(float(U0.max() - U0.min()), np.finfo(float).tiny)
    out = []
    for c in np.flatnonzero(U1 < lo - tol):
        out.append((after.step, int(c), float(U1[c]), float(lo[c])))
    for c in np.flatnonzero(U1 > hi + tol):
        out.append((after.step, int(c), float(U1[c]), float(hi[c])))
    return out


def conservation_scale(disc: Discretization, U):
    """Per-component size ``sum |C| |U|`` used to make drifts relative.

    Components that vanish everywhere (momentum of a fluid at rest) fall back
    to the volume times the largest state entry.
    """
    U = np.abs(np.asarray(U, dtype=float))
    scale = disc.totals(U)
    floor = disc.mesh.volumes.sum() * max(float(U.max()), np.finfo(float).tiny)
    return np.where(scale > 0, scale, floor)


def monitor_conservation(disc: Discretization, initial_total, current_U, boundary_outflow=0.0, scale=None):
    """Drift of ``sum |C| U`` after crediting the flux that left the domain.

    Relative to ``scale`` (default: ``|initial_total|``, floored at the
    smallest normal number).
    """
    initial_total = np.asarray(initial_total, dtype=float)
    now = disc.totals(np.asarray(current_U, dtype=float))
    if scale is None:
        scale = np.maximum(np.abs(initial_total), np.finfo(float).tiny)
    return np.abs(now + np.asarray(boundary_outflow) - initial_total) / scale


# -- driver --------------------------------------------------------------------------------


def integrate(disc, fields, controls, on_snapshot=None, snapshot_every=0, check_max_principle=False, report=None):
    """Advance ``fields`` to ``controls.t_end`` (or ``max_steps``); returns (fields, report)."""
    report = report or MonitorReport()
    step_fn = step_ssprk3 if controls.integrator == "ssprk3" else step_forward_euler
    total0 = disc.totals(np.asarray(fields.cell_values, dtype=float))
    scale = conservation_scale(disc, fields.cell_values)
    outflow = np.zeros_like(total0)
    _track_positivity(disc, fields.cell_values, report)
    if on_snapshot is not None:
        on_snapshot(fields)
    n = 0
    while n < controls.max_steps and fields.time < controls.t_end * (1 - 1e-14):
        dt = disc.time_step(fields.cell_values, controls)
        if controls.fixed_dt is None:
            dt = min(dt, controls.t_end - fields.time)
        if check_max_principle:
            fields.vertex_values = disc.vertex_values(disc.primitive(fields.cell_values))
        new, out = step_fn(disc, fields, dt)
        if check_max_principle:
            report.max_principle_violations.extend(monitor_max_principle(disc, fields, new))
        outflow = outflow + out
        if controls.fixed_dt is None and controls.t_end - new.time <= 1e-14 * controls.t_end:
            # the last step lands exactly on t_end
            new.time = controls.t_end
        fields = new
        n += 1
        _track_positivity(disc, fields.cell_values, report)
        if on_snapshot is not None and snapshot_every and fields.step % snapshot_every == 0:
            on_snapshot(fields)
    report.steps = fields.step
    report.final_time = fields.time
    report.total_conserved_drift = monitor_conservation(disc, total0, fields.cell_values, outflow, scale)
    # final state, unless the loop just wrote it (or no step was taken)
    if on_snapshot is not None and n and not (snapshot_every and fields.step % snapshot_every == 0):
        on_snapshot(fields)
    return fields, report


def _track_positivity(disc, U, report):
    if disc.scheme.is_euler:
        P = disc.primitive(U)
        report.min_density = min(report.min_density, float(P[:, 0].min()))
        report.min_pressure = min(report.min_pressure, float(P[:, -1].min()))


def run(cfg, on_snapshot=None):
    """Build a case from a run configuration and integrate it.

    ``cfg`` must provide ``build()`` returning (discretization, initial fields,
    time controls) plus ``output.snapshot_every`` and ``monitor_max_principle``
    (see :class:`vcfv.config.RunConfig`).
    """
    disc, fields, controls = cfg.build()
    check = bool(getattr(cfg, "monitor_max_principle", False)) and not disc.scheme.is_euler
    every = getattr(getattr(cfg, "output", None), "snapshot_every", 0) or 0
    fields, report = integrate(disc, fields, controls, on_snapshot, every, check)
    return fields, report, disc
