"""Run configuration: an INI file with sections ``model``, ``mesh``, ``scheme``,
``boundary``, ``initial``, ``time`` and ``output``.

A minimal shock-tube case::

    [model]
    kind = euler

    [mesh]
    box = 1.0, 0.1, 0.1
    cells = 100, 4, 4

    [scheme]
    reconstruction = upwind
    limited = yes
    flux = roe

    [boundary]
    xmin = transmissive_outflow
    xmax = transmissive_outflow
    default = slip_wall

    [initial]
    preset = sod

    [time]
    t_end = 0.2

Boundary values take the form ``kind`` or ``kind: v1, v2, ...`` (primitive
state for ``supersonic_inflow``, a number for ``dirichlet_scalar``).  Errors
carry the line of the offending entry.
"""

from __future__ import annotations

import ast
import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .interp import SCHEMES as INTERP_SCHEMES
from .physics import GasModel, ScalarModel, prim_to_cons
from .recon import RECON_SCHEMES, ReconConfig
from .solver import (
    BC_KINDS,
    INTEGRATORS,
    BoundaryCondition,
    Discretization,
    FieldSet,
    SchemeConfig,
    TimeControls,
)

EULER_FLUXES = ("roe", "kfvs")
SCALAR_FLUXES = {"advection": ("upwind",), "burgers": ("godunov",)}
PRESETS = ("sod", "test2", "blast", "advected_profile", "piecewise", "uniform")
PROFILES = ("sine", "gaussian", "step")

# shock-tube data as (rho, u, p) left / right
SHOCK_TUBES = {
    "sod": ((1.0, 0.0, 1.0), (0.125, 0.0, 0.1)),
    "test2": ((1.0, -2.0, 0.4), (1.0, 2.0, 0.4)),
}

# blast defaults: SI units, air
GAS_CONSTANT = 287.0
BLAST = {
    "density": 1.228,
    "core_radius": 5.0,
    "core_temperature": 8.1e7,
    "ambient_temperature": 298.0,
    "side": 81.0,
}

KNOWN = {
    "model": {"kind", "gamma", "velocity", "direction"},
    "mesh": {"gmsh", "box", "cells", "origin", "split", "perturb", "seed", "periodic"},
    "scheme": {"interpolation", "reconstruction", "limited", "flux", "jameson_q", "jameson_eps", "frink_cap"},
    "initial": {
        "preset",
        "x0",
        "axis",
        "profile",
        "width",
        "center",
        "condition",
        "inside",
        "outside",
        "state",
        "core_radius",
        "core_temperature",
        "ambient_temperature",
        "density",
        "gas_constant",
    },
    "time": {"cfl", "t_end", "fixed_dt", "integrator", "max_steps"},
    "output": {"directory", "snapshot_every", "vtk", "fields", "monitor_max_principle"},
}


# -- small parsing helpers ------------------------------------------------------------


class _Source:
    """configparser plus a (section, key) -> line number index."""

    def __init__(self, text, name="<config>"):
        self.name = name
        self.parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        self.parser.optionxform = str
        try:
            self.parser.read_string(text, source=name)
        except configparser.Error as exc:
            line = getattr(exc, "lineno", None)
            raise ConfigError(f"malformed config: {exc.message if hasattr(exc, 'message') else exc}", line) from exc
        self.lines = {}
        section = None
        for no, raw in enumerate(text.splitlines(), start=1):
            s = raw.strip()
            m = re.match(r"^\[([^\]]+)\]", s)
            if m:
                section = m.group(1).strip()
                self.lines[(section, None)] = no
            elif section and s and s[0] not in "#;":
                key = re.split(r"[=:]", s, maxsplit=1)[0].strip()
                self.lines.setdefault((section, key), no)

    def line(self, section, key=None):
        return self.lines.get((section, key), self.lines.get((section, None)))

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def get(self, section, key, default=None):
        if self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        return default

    def error(self, section, key, message):
        return ConfigError(f"[{section}] {key}: {message}" if key else f"[{section}] {message}", self.line(section, key))

    def floats(self, section, key, default=None, count=None):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            vals = tuple(float(v) for v in raw.replace(";", ",").split(",") if v.strip())
        except ValueError:
            raise self.error(section, key, f"expected numbers, got {raw!r}") from None
        if count is not None and len(vals) != count:
            raise self.error(section, key, f"expected {count} values, got {len(vals)}")
        return vals

    def number(self, section, key, default=None, kind=float):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return kind(raw)
        except ValueError:
            raise self.error(section, key, f"expected a number, got {raw!r}") from None

    def flag(self, section, key, default=False):
        if not self.parser.has_option(section, key):
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            raise self.error(section, key, f"expected yes/no, got {self.get(section, key)!r}") from None

    def choice(self, section, key, options, default=None):
        raw = self.get(section, key, default)
        if raw is None:
            raise self.error(section, key, f"missing; valid options: {', '.join(options)}")
        if raw not in options:
            raise self.error(section, key, f"invalid value {raw!r}; valid options: {', '.join(options)}")
        return raw


# -- safe expressions for piecewise initial data ------------------------------------------

_FUNCS = {"abs": np.abs, "sqrt": np.sqrt, "sin": np.sin, "cos": np.cos, "exp": np.exp, "minimum": np.minimum, "maximum": np.maximum}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply, ast.Div: np.divide, ast.Pow: np.power}
_CMPOPS = {ast.Lt: np.less, ast.LtE: np.less_equal, ast.Gt: np.greater, ast.GtE: np.greater_equal}


def compile_condition(text):
    """Vectorized predicate over ``x``, ``y``, ``z``, ``r`` (distance to the origin).

    Only arithmetic, comparisons, ``and``/``or``/``not``, numbers, ``pi`` and a
    few numpy functions are accepted.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse condition {text!r}") from exc

    def ev(node, env):
        if isinstance(node, ast.Expression):
            return ev(node.body, env)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id == "pi":
                return math.pi
            if node.id in env:
                return env[node.id]
            raise ValueError(f"unknown name {node.id!r} in condition")
        if isinstance(node, ast.UnaryOp):
            val = ev(node.operand, env)
            if isinstance(node.op, ast.USub):
                return -val
            if isinstance(node.op, ast.UAdd):
                return val
            if isinstance(node.op, ast.Not):
                return np.logical_not(val)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, env), ev(node.right, env))
        if isinstance(node, ast.BoolOp):
            vals = [ev(v, env) for v in node.values]
            op = np.logical_and if isinstance(node.op, ast.And) else np.logical_or
            out = vals[0]
            for v in vals[1:]:
                out = op(out, v)
            return out
        if isinstance(node, ast.Compare):
            left = ev(node.left, env)
            out = True
            for op, comp in zip(node.ops, node.comparators):
                if type(op) not in _CMPOPS:
                    raise ValueError("only <, <=, >, >= comparisons are allowed")
                right = ev(comp, env)
                out = np.logical_and(out, _CMPOPS[type(op)](left, right))
                left = right
            return out
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
            return _FUNCS[node.func.id](*[ev(a, env) for a in node.args])
        raise ValueError(f"unsupported construct in condition {text!r}")

    # validate once on a dummy point
    def predicate(points):
        p = np.asarray(points, dtype=float)
        env = {"x": p[:, 0], "y": p[:, 1], "z": p[:, 2] if p.shape[1] > 2 else np.zeros(len(p))}
        env["r"] = np.linalg.norm(p, axis=1)
        return np.broadcast_to(np.asarray(ev(tree, env), dtype=bool), (len(p),))

    predicate(np.zeros((1, 3)))
    return predicate


# -- configuration objects ----------------------------------------------------------------


@dataclass
class MeshSpec:
    gmsh: str | None = None
    extents: tuple | None = None
    cells: tuple | None = None
    origin: tuple | None = None
    split: str | None = None
    perturb: float = 0.0
    seed: int | None = None
    periodic: tuple = ()

    def build(self):
        from .mesh import generate_box, load_gmsh, make_periodic

        if self.gmsh:
            mesh = load_gmsh(self.gmsh)
        else:
            d = len(self.extents)
            split = self.split or ("right" if d == 2 else "kuhn")
            mesh = generate_box(d, self.extents, self.cells, split=split, origin=self.origin, perturb=self.perturb, seed=self.seed)
        if self.periodic:
            mesh = make_periodic(mesh, self.periodic)
        return mesh


@dataclass
class ProbeSpec:
    name: str
    point: tuple
    direction: tuple
    samples: int
    radial: bool = False


@dataclass
class OutputSpec:
    directory: str = "output"
    snapshot_every: int = 0
    vtk: bool = True
    fields: tuple = ()
    probes: list = field(default_factory=list)


@dataclass
class InitialSpec:
    preset: str
    params: dict = field(default_factory=dict)


@dataclass
class RunConfig:
    model: object
    mesh: MeshSpec
    scheme: SchemeConfig
    initial: InitialSpec
    time: TimeControls
    output: OutputSpec = field(default_factory=OutputSpec)
    monitor_max_principle: bool = False
    source: str | None = None
    _mesh_cache: object = field(default=None, repr=False)

    @property
    def is_euler(self):
        return isinstance(self.model, GasModel)

    def build_mesh(self):
        if self._mesh_cache is None:
            self._mesh_cache = self.mesh.build()
        return self._mesh_cache

    def build(self):
        """(discretization, initial fields, time controls) for :func:`vcfv.solver.run`."""
        mesh = self.build_mesh()
        scheme = self.scheme
        for tag, bc in scheme.boundary.items():
            if tag != "default" and bc.kind != "periodic" and tag not in mesh.tag_names:
                raise ConfigError(
                    f"boundary tag {tag!r} is not in the mesh; mesh tags: {', '.join(mesh.tag_names) or 'none'}"
                )
        missing = [t for t, f in mesh.boundary_tags.items() if len(f) and t not in scheme.boundary]
        if missing and "default" in scheme.boundary:
            bc = scheme.boundary["default"]
            scheme.boundary.update({t: BoundaryCondition(t, bc.kind, bc.data) for t in missing})
        disc = Discretization(mesh, scheme)
        U0 = initial_conditions(self.initial, mesh, self.model)
        return disc, FieldSet(U0), self.time


# -- initial data ------------------------------------------------------------------------------


def shock_tube_state(mesh, left, right, x0=0.5, axis=0, gas=GasModel()):
    """Conserved cell values of a planar Riemann problem along ``axis``."""
    d = mesh.dim
    x = mesh.centroids[:, axis]

    def prim(state):
        rho, u, p = state
        vel = np.zeros(d)
        vel[axis] = u
        return np.concatenate(([rho], vel, [p]))

    W = np.where((x < x0)[:, None], prim(left), prim(right))
    return prim_to_cons(W, gas)


def blast_state(mesh, gas=GasModel(), center=None, density=1.228, core_radius=5.0, core_temperature=8.1e7,
                ambient_temperature=298.0, gas_constant=GAS_CONSTANT):
    """Hot spherical core in still air; ``p = rho R T``."""
    if center is None:
        lo, hi = mesh.bounds
        center = 0.5 * (lo + hi)
    r = np.linalg.norm(mesh.centroids - np.asarray(center, dtype=float), axis=1)
    T = np.where(r < core_radius, core_temperature, ambient_temperature)
    W = np.zeros((mesh.n_cells, mesh.dim + 2))
    W[:, 0] = density
    W[:, -1] = density * gas_constant * T
    return prim_to_cons(W, gas)


def scalar_profile(name, points, center=None, width=0.25):
    p = np.asarray(points, dtype=float)
    if name == "sine":
        out = np.ones(len(p))
        for k in range(min(p.shape[1], 2)):
            out = out * np.sin(2 * np.pi * p[:, k])
        return out
    c = np.full(p.shape[1], 0.5) if center is None else np.asarray(center, dtype=float)[: p.shape[1]]
    if name == "gaussian":
        return np.exp(-np.sum((p - c) ** 2, axis=1) / width**2)
    if name == "step":
        return np.all(np.abs(p - c) < width, axis=1).astype(float)
    raise ValueError(f"unknown profile {name!r}; valid: {', '.join(PROFILES)}")


def initial_conditions(spec: InitialSpec, mesh, model):
    p = spec.params
    gas = model if isinstance(model, GasModel) else None
    if spec.preset in SHOCK_TUBES:
        left, right = SHOCK_TUBES[spec.preset]
        return shock_tube_state(mesh, left, right, p.get("x0", 0.5), p.get("axis", 0), gas)
    if spec.preset == "blast":
        keys = ("density", "core_radius", "core_temperature", "ambient_temperature", "gas_constant", "center")
        return blast_state(mesh, gas, **{k: p[k] for k in keys if k in p})
    if spec.preset == "advected_profile":
        return scalar_profile(p.get("profile", "sine"), mesh.centroids, p.get("center"), p.get("width", 0.25))
    if spec.preset == "uniform":
        state = np.asarray(p["state"], dtype=float)
        if gas is None:
            return np.full(mesh.n_cells, float(state[0]))
        return prim_to_cons(np.tile(state, (mesh.n_cells, 1)), gas)
    if spec.preset == "piecewise":
        inside = p["condition"](mesh.centroids)
        a = np.asarray(p["inside"], dtype=float)
        b = np.asarray(p["outside"], dtype=float)
        if gas is None:
            return np.where(inside, a[0], b[0])
        return prim_to_cons(np.where(inside[:, None], a, b), gas)
    raise ValueError(f"unknown preset {spec.preset!r}")


# -- parsing -----------------------------------------------------------------------------------


def parse_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    cfg = parse_config_text(text, str(path))
    # relative mesh paths are relative to the config file
    if cfg.mesh.gmsh and not Path(cfg.mesh.gmsh).is_absolute():
        cfg.mesh.gmsh = str(path.parent / cfg.mesh.gmsh)
    return cfg


def parse_config_text(text, name="<config>"):
    src = _Source(text, name)
    sections = set(src.parser.sections())
    for sec in sections:
        if sec not in KNOWN and sec != "boundary" and not sec.startswith("probe"):
            raise src.error(sec, None, "unknown section")
        if sec in KNOWN:
            for key in src.parser.options(sec):
                if key not in KNOWN[sec]:
                    raise src.error(sec, key, f"unknown key; valid keys: {', '.join(sorted(KNOWN[sec]))}")

    # model
    if "model" not in sections:
        raise ConfigError("missing [model] section")
    kind = src.choice("model", "kind", ("euler", "advection", "burgers"))
    if kind == "euler":
        gamma = src.number("model", "gamma", 1.4)
        try:
            model = GasModel(gamma)
        except ValueError as exc:
            raise src.error("model", "gamma", str(exc)) from None
    else:
        try:
            model = ScalarModel(
                kind,
                velocity=src.floats("model", "velocity", (1.0, 0.0)),
                direction=src.floats("model", "direction", (1.0, 0.0)),
            )
        except ValueError as exc:
            raise src.error("model", None, str(exc)) from None

    mesh = _parse_mesh(src, sections)
    dim = len(mesh.extents) if mesh.extents else None

    # scheme
    interp = src.choice("scheme", "interpolation", INTERP_SCHEMES, "consistent_shepard")
    recon = src.choice("scheme", "reconstruction", RECON_SCHEMES, "upwind")
    if kind == "euler":
        flux = src.choice("scheme", "flux", EULER_FLUXES)
    else:
        flux = src.choice("scheme", "flux", SCALAR_FLUXES[kind], SCALAR_FLUXES[kind][0])
    try:
        rc = ReconConfig(
            recon,
            src.flag("scheme", "limited", False),
            dim or 2,
            src.number("scheme", "jameson_q", 2.0),
            src.number("scheme", "jameson_eps", 0.05),
            src.flag("scheme", "frink_cap", True),
        )
    except ValueError as exc:
        raise src.error("scheme", None, str(exc)) from None

    boundary = _parse_boundary(src, sections, kind)
    scheme = SchemeConfig(model, rc, flux, interp, boundary)
    initial = _parse_initial(src, sections, kind)

    try:
        time = TimeControls(
            cfl=src.number("time", "cfl", 0.4),
            t_end=src.number("time", "t_end", 0.0),
            fixed_dt=src.number("time", "fixed_dt", None),
            integrator=src.choice("time", "integrator", INTEGRATORS, "ssprk3"),
            max_steps=src.number("time", "max_steps", 10**9, int),
        )
    except ConfigError as exc:
        if exc.line is not None:
            raise
        raise ConfigError(str(exc), src.line("time")) from None

    output = _parse_output(src, sections, dim)
    monitor = src.flag("output", "monitor_max_principle", False)
    return RunConfig(model, mesh, scheme, initial, time, output, monitor, name)


def _parse_mesh(src, sections):
    if "mesh" not in sections:
        raise ConfigError("missing [mesh] section: give either gmsh = <path> or box = <extents>")
    gmsh = src.get("mesh", "gmsh")
    box = src.floats("mesh", "box")
    if bool(gmsh) == bool(box):
        raise src.error("mesh", None, "give exactly one of gmsh = <path> or box = <extents>")
    periodic = ()
    raw = src.get("mesh", "periodic")
    if raw:
        axes = {"x": 0, "y": 1, "z": 2}
        try:
            periodic = tuple(axes[a.strip()] for a in raw.split(",") if a.strip())
        except KeyError:
            raise src.error("mesh", "periodic", f"axes must be among x, y, z; got {raw!r}") from None
    if gmsh:
        return MeshSpec(gmsh=gmsh, periodic=periodic)
    if len(box) not in (2, 3) or min(box) <= 0:
        raise src.error("mesh", "box", "need 2 or 3 positive extents")
    cells = src.floats("mesh", "cells", count=len(box))
    if cells is None:
        raise src.error("mesh", "cells", "missing cell counts for the box")
    if any(c < 1 or c != int(c) for c in cells):
        raise src.error("mesh", "cells", "cell counts must be positive integers")
    return MeshSpec(
        extents=box,
        cells=tuple(int(c) for c in cells),
        origin=src.floats("mesh", "origin", count=len(box)),
        split=src.get("mesh", "split"),
        perturb=src.number("mesh", "perturb", 0.0),
        seed=src.number("mesh", "seed", None, int),
        periodic=periodic,
    )


def _parse_boundary(src, sections, kind):
    out = {}
    if "boundary" not in sections:
        return out
    for tag in src.parser.options("boundary"):
        raw = src.get("boundary", tag)
        bc_kind, _, data = raw.partition(":")
        bc_kind = bc_kind.strip()
        if bc_kind not in BC_KINDS:
            raise src.error("boundary", tag, f"invalid kind {bc_kind!r}; valid options: {', '.join(BC_KINDS)}")
        value = None
        if data.strip():
            try:
                value = tuple(float(v) for v in data.split(","))
            except ValueError:
                raise src.error("boundary", tag, f"bad boundary data {data.strip()!r}") from None
            if bc_kind == "dirichlet_scalar":
                value = value[0]
        try:
            out[tag] = BoundaryCondition(tag, bc_kind, value)
        except ConfigError as exc:
            raise ConfigError(str(exc), src.line("boundary", tag)) from None
    return out


def _parse_initial(src, sections, kind):
    if "initial" not in sections:
        raise ConfigError("missing [initial] section")
    preset = src.choice("initial", "preset", PRESETS)
    euler_only = {"sod", "test2", "blast"}
    if (preset in euler_only) != (kind == "euler") and preset not in ("uniform", "piecewise"):
        raise src.error("initial", "preset", f"preset {preset!r} does not match model {kind!r}")
    p = {}
    if preset in SHOCK_TUBES:
        p["x0"] = src.number("initial", "x0", 0.5)
        p["axis"] = {"x": 0, "y": 1, "z": 2}.get(src.get("initial", "axis", "x"))
        if p["axis"] is None:
            raise src.error("initial", "axis", "must be x, y or z")
    elif preset == "blast":
        for key in ("density", "core_radius", "core_temperature", "ambient_temperature", "gas_constant"):
            if src.has("initial", key):
                p[key] = src.number("initial", key)
        if src.has("initial", "center"):
            p["center"] = src.floats("initial", "center")
    elif preset == "advected_profile":
        p["profile"] = src.choice("initial", "profile", PROFILES, "sine")
        p["width"] = src.number("initial", "width", 0.25)
        p["center"] = src.floats("initial", "center")
    elif preset == "uniform":
        p["state"] = src.floats("initial", "state")
        if p["state"] is None:
            raise src.error("initial", "state", "uniform preset needs state = ...")
    else:
        cond = src.get("initial", "condition")
        if cond is None:
            raise src.error("initial", "condition", "piecewise preset needs condition = <expression>")
        try:
            p["condition"] = compile_condition(cond)
        except ValueError as exc:
            raise src.error("initial", "condition", str(exc)) from None
        for key in ("inside", "outside"):
            p[key] = src.floats("initial", key)
            if p[key] is None:
                raise src.error("initial", key, "piecewise preset needs inside and outside states")
    return InitialSpec(preset, p)


def _parse_output(src, sections, dim):
    out = OutputSpec()
    if "output" in sections:
        out.directory = src.get("output", "directory", "output")
        out.snapshot_every = src.number("output", "snapshot_every", 0, int)
        out.vtk = src.flag("output", "vtk", True)
        raw = src.get("output", "fields")
        if raw is not None:
            names = tuple(n.strip() for n in raw.split(","))
            if any(not n for n in names):
                raise src.error("output", "fields", "empty field name")
            out.fields = names
    for sec in sorted(s for s in sections if s.startswith("probe")):
        name = sec.partition(" ")[2].strip() or sec
        point = src.floats(sec, "point")
        direction = src.floats(sec, "direction")
        if point is None or direction is None:
            raise src.error(sec, None, "probe needs point and direction")
        if dim is not None and (len(point) != dim or len(direction) != dim):
            raise src.error(sec, None, f"probe vectors need {dim} components")
        if not np.linalg.norm(direction) > 0:
            raise src.error(sec, "direction", "direction must be non-zero")
        samples = src.number(sec, "samples", 100, int)
        if samples < 1:
            raise src.error(sec, "samples", "need at least one sample")
        for key in src.parser.options(sec):
            if key not in ("point", "direction", "samples", "radial"):
                raise src.error(sec, key, "unknown key; valid keys: direction, point, radial, samples")
        out.probes.append(ProbeSpec(name, point, direction, samples, src.flag(sec, "radial", False)))
    return out
