"""Independent oracles and study drivers.

* :func:`exact_riemann` - exact solution of the 1-D Euler Riemann problem
  (pressure-function Newton iteration, vacuum included).
* :func:`scalar_exact` - exact solutions of the scalar models.
* :func:`convergence_study` - observed order of accuracy on periodic boxes.
* :func:`quadratic_bound_audit` - face-value error against the quadratic
  truncation bounds on random simplices.
* :func:`taylor_radius_check` - log-log fit of blast radius against time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .physics import GasModel, ScalarModel

# -- exact Riemann solver -------------------------------------------------------


@dataclass
class RiemannSolution:
    left: tuple
    right: tuple
    gamma: float
    p_star: float
    u_star: float
    rho_star_left: float
    rho_star_right: float
    left_wave: str  # "shock" | "rarefaction" | "vacuum"
    right_wave: str
    iterations: int = 0

    @property
    def vacuum(self):
        return self.left_wave == "vacuum"

    def sample(self, xi):
        """Primitive state ``(rho, u, p)`` at similarity coordinate(s) ``xi = x / t``.

        Returns an array of shape ``xi.shape + (3,)``.
        """
        xi = np.asarray(xi, dtype=float)
        out = np.empty(xi.shape + (3,))
        flat = out.reshape(-1, 3)
        for k, s in enumerate(xi.ravel()):
            flat[k] = self._sample_one(float(s))
        return out

    __call__ = sample

    # wave speeds, useful for plots and tests
    def wave_speeds(self):
        g = self.gamma
        rl, ul, pl = self.left
        rr, ur, pr = self.right
        al, ar = math.sqrt(g * pl / rl), math.sqrt(g * pr / rr)
        out = {}
        if self.left_wave == "shock":
            out["left_shock"] = ul - al * math.sqrt((g + 1) / (2 * g) * self.p_star / pl + (g - 1) / (2 * g))
        else:
            a_star = al * (self.p_star / pl) ** ((g - 1) / (2 * g)) if not self.vacuum else 0.0
            out["left_head"] = ul - al
            out["left_tail"] = self.u_star - a_star if not self.vacuum else ul + 2 * al / (g - 1)
        out["contact"] = self.u_star
        if self.right_wave == "shock":
            out["right_shock"] = ur + ar * math.sqrt((g + 1) / (2 * g) * self.p_star / pr + (g - 1) / (2 * g))
        else:
            a_star = ar * (self.p_star / pr) ** ((g - 1) / (2 * g)) if not self.vacuum else 0.0
            out["right_tail"] = self.u_star + a_star if not self.vacuum else ur - 2 * ar / (g - 1)
            out["right_head"] = ur + ar
        return out

    def _sample_one(self, s):
        g = self.gamma
        rl, ul, pl = self.left
        rr, ur, pr = self.right
        al, ar = math.sqrt(g * pl / rl), math.sqrt(g * pr / rr)
        if self.vacuum:
            return self._sample_vacuum(s, al, ar)
        ps, us = self.p_star, self.u_star
        if s <= us:
            if self.left_wave == "shock":
                sl = ul - al * math.sqrt((g + 1) / (2 * g) * ps / pl + (g - 1) / (2 * g))
                return (rl, ul, pl) if s <= sl else (self.rho_star_left, us, ps)
            head = ul - al
            tail = us - al * (ps / pl) ** ((g - 1) / (2 * g))
            if s <= head:
                return (rl, ul, pl)
            if s >= tail:
                return (self.rho_star_left, us, ps)
            return _fan(rl, ul, pl, al, g, s, +1)
        if self.right_wave == "shock":
            sr = ur + ar * math.sqrt((g + 1) / (2 * g) * ps / pr + (g - 1) / (2 * g))
            return (rr, ur, pr) if s >= sr else (self.rho_star_right, us, ps)
        head = ur + ar
        tail = us + ar * (ps / pr) ** ((g - 1) / (2 * g))
        if s >= head:
            return (rr, ur, pr)
        if s <= tail:
            return (self.rho_star_right, us, ps)
        return _fan(rr, ur, pr, ar, g, s, -1)

    def _sample_vacuum(self, s, al, ar):
        g = self.gamma
        rl, ul, pl = self.left
        rr, ur, pr = self.right
        left_tail = ul + 2 * al / (g - 1)
        right_tail = ur - 2 * ar / (g - 1)
        if s <= ul - al:
            return (rl, ul, pl)
        if s < left_tail:
            return _fan(rl, ul, pl, al, g, s, +1)
        if s <= right_tail:
            return (0.0, 0.5 * (left_tail + right_tail), 0.0)
        if s < ur + ar:
            return _fan(rr, ur, pr, ar, g, s, -1)
        return (rr, ur, pr)


def _fan(rho, u, p, a, g, s, side):
    """State inside a left (side=+1) or right (side=-1) rarefaction fan."""
    c = 2.0 / (g + 1) + side * (g - 1) / ((g + 1) * a) * (u - s)
    rho_f = rho * c ** (2.0 / (g - 1))
    u_f = 2.0 / (g + 1) * (side * a + (g - 1) / 2 * u + s)
    p_f = p * c ** (2.0 * g / (g - 1))
    return (rho_f, u_f, p_f)


def _pressure_function(p, rho, pk, a, g):
    """``f_K(p)`` and its derivative for one side."""
    if p > pk:
        A = 2.0 / ((g + 1) * rho)
        B = (g - 1) / (g + 1) * pk
        q = math.sqrt(A / (p + B))
        return (p - pk) * q, q * (1.0 - 0.5 * (p - pk) / (p + B))
    r = p / pk
    f = 2 * a / (g - 1) * (r ** ((g - 1) / (2 * g)) - 1.0)
    df = 1.0 / (rho * a) * r ** (-(g + 1) / (2 * g))
    return f, df


def exact_riemann(left, right, gas=GasModel(), tol=1e-13, max_iter=100):
    """Exact solution for primitive states ``left``/``right`` = ``(rho, u, p)``.

    Newton iteration on ``f_L(p) + f_R(p) + u_R - u_L = 0`` from the
    two-rarefaction guess, stopping when the relative change drops below
    ``tol``.  Data that generate vacuum return a solution with
    ``left_wave == right_wave == "vacuum"`` and ``p_star = 0``.
    """
    g = gas.gamma
    rl, ul, pl = (float(v) for v in left)
    rr, ur, pr = (float(v) for v in right)
    if min(rl, pl, rr, pr) <= 0:
        raise ValueError("Riemann states need positive density and pressure")
    al, ar = math.sqrt(g * pl / rl), math.sqrt(g * pr / rr)
    du = ur - ul
    if 2 * (al + ar) / (g - 1) <= du:
        return RiemannSolution((rl, ul, pl), (rr, ur, pr), g, 0.0, 0.5 * (ul + ur), 0.0, 0.0, "vacuum", "vacuum")

    z = (g - 1) / (2 * g)
    p = ((al + ar - 0.5 * (g - 1) * du) / (al / pl**z + ar / pr**z)) ** (1 / z)
    p = max(p, 1e-14 * min(pl, pr))
    for it in range(1, max_iter + 1):
        fl, dfl = _pressure_function(p, rl, pl, al, g)
        fr, dfr = _pressure_function(p, rr, pr, ar, g)
        new = p - (fl + fr + du) / (dfl + dfr)
        if new <= 0:
            new = 0.5 * p
        change = 2 * abs(new - p) / (new + p)
        p = new
        if change < tol:
            break
    else:
        raise RuntimeError("Riemann pressure iteration did not converge")
    fl, _ = _pressure_function(p, rl, pl, al, g)
    fr, _ = _pressure_function(p, rr, pr, ar, g)
    u = 0.5 * (ul + ur) + 0.5 * (fr - fl)

    def star_density(rho, pk):
        if p > pk:
            ratio = p / pk
            k = (g - 1) / (g + 1)
            return rho * (ratio + k) / (k * ratio + 1)
        return rho * (p / pk) ** (1 / g)

    return RiemannSolution(
        (rl, ul, pl),
        (rr, ur, pr),
        g,
        p,
        u,
        star_density(rl, pl),
        star_density(rr, pr),
        "shock" if p > pl else "rarefaction",
        "shock" if p > pr else "rarefaction",
        it,
    )


# -- scalar oracles -----------------------------------------------------------------


def scalar_exact(model: ScalarModel, ic, t, period=None):
    """Exact solution ``x -> u(x, t)`` for initial profile ``ic(x)``.

    ``x`` has shape ``(..., d)``.  Advection translates the profile (wrapped
    into ``period`` when given).  Burgers is solved by characteristic tracing
    and refuses times at or past the first characteristic crossing.
    """
    t = float(t)
    if model.kind == "advection":
        v = np.asarray(model.velocity, dtype=float)

        def u(x):
            y = np.asarray(x, dtype=float) - t * v
            if period is not None:
                y = np.mod(y, np.asarray(period, dtype=float))
            return ic(y)

        return u

    d = np.asarray(model.direction, dtype=float)
    d_hat = d / np.linalg.norm(d)
    speed = np.linalg.norm(d)

    def u(x):
        x = np.asarray(x, dtype=float)
        # solve u = ic(x - t u d) by fixed point / Newton along the direction
        val = ic(x)
        for _ in range(200):
            y = x - t * val[..., None] * d
            h = 1e-7
            slope = (ic(y + h * d_hat) - ic(y - h * d_hat)) / (2 * h)
            if np.any(1.0 + t * speed * slope <= 0):
                raise ValueError(f"Burgers solution has a shock before t={t}")
            new = val - (val - ic(y)) / (1.0 + t * speed * slope)
            if np.max(np.abs(new - val)) < 1e-14 * max(1.0, float(np.max(np.abs(new)))):
                val = new
                break
            val = new
        return val

    return u


def burgers_breaking_time(dic_min, model: ScalarModel):
    """First shock time ``-1 / (|d| min du0/ds)`` for the slope along ``d``."""
    speed = float(np.linalg.norm(model.direction))
    return math.inf if dic_min >= 0 else -1.0 / (speed * dic_min)


# -- convergence studies ----------------------------------------------------------


@dataclass
class ConvergenceResult:
    label: str
    n: list
    h: list
    l1: list
    linf: list
    orders: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.h) < 2:
            return
        self.orders = [
            math.log(self.l1[k] / self.l1[k + 1]) / math.log(self.h[k] / self.h[k + 1]) for k in range(len(self.h) - 1)
        ]

    @property
    def order(self):
        """Order observed between the two finest levels."""
        return self.orders[-1]

    def csv(self):
        rows = ["level,h,L1,Linf,order"]
        for k, (h, e1, ei) in enumerate(zip(self.h, self.l1, self.linf)):
            order = "" if k == 0 else f"{self.orders[k - 1]:.6f}"
            rows.append(f"{self.n[k]},{h:.6g},{e1:.6e},{ei:.6e},{order}")
        return "\n".join(rows) + "\n"


def smooth_profile(x):
    return np.sin(2 * np.pi * x[..., 0]) * np.sin(2 * np.pi * x[..., 1])


def convergence_study(
    levels=(16, 32, 64),
    recon="upwind",
    limited=False,
    interpolation="consistent_shepard",
    velocity=(1.0, 0.5),
    t_end=0.25,
    cfl=0.4,
    split="alternate",
    profile=smooth_profile,
    integrator="ssprk3",
):
    """Periodic 2-D advection on unit boxes of ``n x n`` squares.

    Cells start from centroid values of ``profile`` and are compared against
    the exact centroid values at ``t_end``; the L1 norm is volume weighted.
    """
    from .mesh import generate_box, make_periodic
    from .recon import ReconConfig
    from .solver import Discretization, FieldSet, SchemeConfig, TimeControls, integrate

    model = ScalarModel("advection", tuple(velocity))
    exact = scalar_exact(model, profile, t_end, period=(1.0, 1.0))
    hs, l1, linf = [], [], []
    for n in levels:
        mesh = make_periodic(generate_box(2, (1.0, 1.0), (n, n), split=split, seed=n), (0, 1))
        scheme = SchemeConfig(model, ReconConfig(recon, limited, 2), "upwind", interpolation)
        disc = Discretization(mesh, scheme)
        fields = FieldSet(profile(mesh.centroids))
        fields, _ = integrate(disc, fields, TimeControls(cfl=cfl, t_end=t_end, integrator=integrator))
        err = np.abs(fields.cell_values - exact(mesh.centroids))
        l1.append(float(mesh.volumes @ err))
        linf.append(float(err.max()))
        hs.append(1.0 / n)
    label = recon + (" (limited)" if limited else "")
    return ConvergenceResult(label, list(levels), hs, l1, linf)


# -- truncation-bound audit --------------------------------------------------------

BOUND_CONSTANTS = {
    (2, "frink"): 11.0 / 24.0,
    (2, "upwind"): 3.0 / 8.0,
    (3, "frink"): 11.0 / 36.0,
    (3, "upwind"): 2.0 / 9.0,
}


@dataclass
class BoundAudit:
    dim: int
    trials: int
    seed: int
    max_ratio: dict

    def passed(self, slack=1e-9):
        return all(r <= 1.0 + slack for r in self.max_ratio.values())

    def __str__(self):
        lines = [f"dim={self.dim} trials={self.trials} seed={self.seed}"]
        for s, r in self.max_ratio.items():
            lines.append(f"  {s:7s} max ratio {r:.6f} (constant {BOUND_CONSTANTS[(self.dim, s)]:.6f})")
        return "\n".join(lines)


def _random_simplices(rng, d, count, min_quality=1e-3):
    """Random simplices with ``|C| >= min_quality * h^d`` (degenerate ones redrawn)."""
    out = np.empty((0, d + 1, d))
    while len(out) < count:
        pts = rng.normal(size=(2 * count, d + 1, d))
        edges = pts[:, 1:] - pts[:, :1]
        vol = np.abs(np.linalg.det(edges))
        c = pts.mean(axis=1, keepdims=True)
        h = np.linalg.norm(pts - c, axis=2).max(axis=1)
        out = np.concatenate([out, pts[vol >= min_quality * h**d]])
    return out[:count]


def face_errors(simplices, H, g, c0, scheme):
    """Reconstruction error ``U+ - U_e`` on every face of every simplex.

    ``U(x) = c0 + g.x + x.H.x / 2``; the cell value is ``U`` at the centroid,
    vertex values are exact.  Returns an array ``(trials, d + 1)``; entry ``k``
    is the face opposite vertex ``k``.
    """
    d = simplices.shape[2]

    def U(x):
        return c0[:, None] + np.einsum("tkd,td->tk", x, g) + 0.5 * np.einsum("tkd,tde,tke->tk", x, H, x)

    vert = U(simplices)
    cent = simplices.mean(axis=1, keepdims=True)
    U0 = U(cent)[:, 0]
    faces_mid = (simplices.sum(axis=1, keepdims=True) - simplices) / d
    exact = U(faces_mid)
    W = (vert.sum(axis=1, keepdims=True) - vert) / d
    if scheme == "frink":
        rec = U0[:, None] + (1.0 / (d + 1)) * (W - vert)
    else:
        rec = U0[:, None] + (1.0 / d) * (U0[:, None] - vert)
    return rec - exact


def quadratic_bound_audit(dim, trials=10_000, seed=0, schemes=("frink", "upwind")):
    """Worst ``|U+ - U_e| / (C K h^2)`` over random simplices and quadratics."""
    rng = np.random.default_rng(seed)
    simp = _random_simplices(rng, dim, trials)
    A = rng.normal(size=(trials, dim, dim))
    H = 0.5 * (A + np.swapaxes(A, 1, 2))
    g = rng.normal(size=(trials, dim))
    c0 = rng.normal(size=trials)
    K = np.abs(np.linalg.eigvalsh(H)).max(axis=1)
    h = np.linalg.norm(simp - simp.mean(axis=1, keepdims=True), axis=2).max(axis=1)
    worst = {}
    for s in schemes:
        err = np.abs(face_errors(simp, H, g, c0, s)).max(axis=1)
        worst[s] = float(np.max(err / (BOUND_CONSTANTS[(dim, s)] * K * h * h)))
    return BoundAudit(dim, trials, seed, worst)


# -- blast radius ---------------------------------------------------------------------


@dataclass
class TaylorFit:
    valid: bool
    slope: float = float("nan")
    intercept: float = float("nan")
    residual: float = float("nan")
    times: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    message: str = ""

    def within(self, lo=0.35, hi=0.45):
        return self.valid and lo <= self.slope <= hi


def shock_radius(r, p):
    """Radius of the steepest pressure drop along a radial profile."""
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    order = np.argsort(r)
    r, p = r[order], p[order]
    dp = np.diff(p) / np.diff(r)
    k = int(np.argmax(np.abs(dp)))
    return 0.5 * (r[k] + r[k + 1]), float(abs(dp[k]))


def front_radius(r, p, bins=None, level=0.5):
    """Outermost radius where the binned mean pressure crosses
    ``p_far + level * (p_peak - p_far)``, interpolated between bin centres.

    Meant for scattered ``(r, p)`` pairs such as every cell of a 3-D run; the
    bin averages give a front position finer than one cell.  Returns
    ``(R, jump)`` with ``jump = p_peak - p_far`` (zero when there is no front).
    """
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    bins = bins or max(8, int(round(2 * len(r) ** (1 / 3))))
    edges = np.linspace(0.0, r.max(), bins + 1)
    idx = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, bins - 1)
    count = np.bincount(idx, minlength=bins)
    keep = count > 0
    mean = np.bincount(idx, p, minlength=bins)[keep] / count[keep]
    centre = (0.5 * (edges[:-1] + edges[1:]))[keep]
    far = mean[-1]
    k_peak = int(np.argmax(mean))
    jump = mean[k_peak] - far
    if jump <= 0 or k_peak == len(mean) - 1:
        return 0.0, 0.0
    target = far + level * jump
    k = k_peak + int(np.nonzero(mean[k_peak:] < target)[0][0])
    r0, r1, p0, p1 = centre[k - 1], centre[k], mean[k - 1], mean[k]
    return float(r0 + (p0 - target) / (p0 - p1) * (r1 - r0)), float(jump)


def taylor_radius_check(snapshots, min_snapshots=4, radii=None, locate=shock_radius):
    """Fit ``log R = slope log t + c``.

    ``snapshots`` is a sequence of ``(t, r, p)`` radial profiles and ``locate``
    turns one profile into ``(R, strength)``.  Alternatively pass ``radii``
    (with ``snapshots`` a sequence of times) to fit given radii.
    """
    if radii is None:
        times, radii = [], []
        for t, r, p in snapshots:
            if len(r) < 3:
                continue
            R, grad = locate(r, p)
            if grad > 0 and R > 0 and t > 0:
                times.append(float(t))
                radii.append(float(R))
    else:
        times = [float(t) for t in snapshots]
        radii = [float(R) for R in radii]
    if len(times) < min_snapshots:
        return TaylorFit(False, times=times, radii=radii, message=f"only {len(times)} usable snapshots")
    x, y = np.log(times), np.log(radii)
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return TaylorFit(True, float(slope), float(intercept), residual, times, radii)


# -- shock tubes -------------------------------------------------------------------------


@dataclass
class ShockTubeResult:
    case: str
    label: str
    l1_density: float
    overshoot: float
    min_density: float
    min_pressure: float
    steps: int
    time: float
    s: np.ndarray = field(repr=False, default=None)
    density: np.ndarray = field(repr=False, default=None)
    exact_density: np.ndarray = field(repr=False, default=None)


def shock_tube_study(
    case="sod",
    recon="upwind",
    limited=True,
    flux="roe",
    cells=(100, 4, 4),
    extents=(1.0, 0.1, 0.1),
    t_end=None,
    cfl=0.4,
    interpolation="consistent_shepard",
    samples=500,
    x0=0.5,
    gas=GasModel(),
):
    """Shock tube along x in a box channel: slip side walls, transmissive ends.

    The density profile on the channel axis (containing-cell sampling) is
    compared with the exact solution: ``l1_density`` integrates the absolute
    error over the length, ``overshoot`` is how far the numerical density
    leaves the exact solution's range.  ``min_density`` / ``min_pressure`` are
    taken over every step.
    """
    from .config import SHOCK_TUBES, shock_tube_state
    from .io import CellLocator, probe_points
    from .mesh import generate_box
    from .recon import ReconConfig
    from .solver import BoundaryCondition, Discretization, FieldSet, SchemeConfig, TimeControls, integrate

    left, right = SHOCK_TUBES[case]
    if t_end is None:
        t_end = {"sod": 0.2, "test2": 0.15}[case]
    d = len(cells)
    mesh = generate_box(d, extents, cells, split="kuhn" if d == 3 else "right")
    bcs = {t: BoundaryCondition(t, "slip_wall") for t in mesh.tag_names}
    bcs["xmin"] = BoundaryCondition("xmin", "transmissive_outflow")
    bcs["xmax"] = BoundaryCondition("xmax", "transmissive_outflow")
    scheme = SchemeConfig(gas, ReconConfig(recon, limited, d), flux, interpolation, bcs)
    disc = Discretization(mesh, scheme)
    fields = FieldSet(shock_tube_state(mesh, left, right, x0, 0, gas))
    fields, report = integrate(disc, fields, TimeControls(cfl=cfl, t_end=t_end, integrator="ssprk3"))

    centre = np.array(extents, dtype=float) / 2
    centre[0] = 0.0
    direction = np.zeros(d)
    direction[0] = 1.0
    s, pts = probe_points(mesh, centre, direction, samples)
    cells_on_line, _ = CellLocator(mesh).locate(pts)
    rho = disc.primitive(fields.cell_values)[cells_on_line, 0]
    sol = exact_riemann(left, right, gas)
    exact = sol.sample((pts[:, 0] - x0) / t_end)[:, 0]
    fine = sol.sample((np.linspace(0.0, extents[0], 20001) - x0) / t_end)[:, 0]
    ds = extents[0] / samples
    l1 = float(np.sum(np.abs(rho - exact)) * ds)
    over = float(max(rho.max() - fine.max(), fine.min() - rho.min(), 0.0))
    label = f"{recon}{' limited' if limited else ''} + {flux}"
    return ShockTubeResult(
        case, label, l1, over, report.min_density, report.min_pressure, report.steps, fields.time, s, rho, exact
    )


@dataclass
class BlastResult:
    fit: TaylorFit
    n_cells: int
    steps: int
    profiles: list = field(repr=False, default_factory=list)


def blast_study(
    cells=26, t_end=7e-4, snapshots=8, cfl=0.4, recon="upwind", flux="kfvs", first=0.3, samples=400, fixed_dt=None
):
    """Point blast in an 81 m cube of air and the fitted radius-time slope.

    The cube is split into ``cells**3`` hexes (6 tets each) centred on the
    hot core.  The time step follows the CFL number unless ``fixed_dt`` is
    given (then each snapshot time is reached to within one step).
    Snapshots are taken at ``snapshots`` equally spaced times in
    ``[first * t_end, t_end]``; the default end time keeps the front well
    inside the cube.  The front is located from all cells with
    :func:`front_radius`; ``profiles`` also holds the pressure along the
    diagonal ray for plotting.
    """
    from .config import BLAST, blast_state
    from .io import CellLocator, probe_points
    from .mesh import generate_box
    from .recon import ReconConfig
    from .solver import BoundaryCondition, Discretization, FieldSet, SchemeConfig, TimeControls, integrate

    side = BLAST["side"]
    gas = GasModel()
    mesh = generate_box(3, (side,) * 3, (cells,) * 3, split="kuhn", origin=(-side / 2,) * 3)
    bcs = {t: BoundaryCondition(t, "transmissive_outflow") for t in mesh.tag_names}
    disc = Discretization(mesh, SchemeConfig(gas, ReconConfig(recon, True, 3), flux, "consistent_shepard", bcs))
    fields = FieldSet(blast_state(mesh, gas, center=np.zeros(3)))
    s, pts = probe_points(mesh, np.zeros(3), np.array([1.0, 1.0, 1.0]), samples, radial=True)
    on_line, _ = CellLocator(mesh).locate(pts)
    radius = np.linalg.norm(mesh.centroids, axis=1)
    clouds, profiles = [], []
    for t in np.linspace(first * t_end, t_end, snapshots):
        fields, _ = integrate(disc, fields, TimeControls(cfl=cfl, t_end=float(t), fixed_dt=fixed_dt, integrator="ssprk3"))
        p = disc.primitive(fields.cell_values)[:, -1]
        clouds.append((float(fields.time), radius, p))
        profiles.append((float(fields.time), s, p[on_line]))
    return BlastResult(taylor_radius_check(clouds, locate=front_radius), mesh.n_cells, fields.step, profiles)
