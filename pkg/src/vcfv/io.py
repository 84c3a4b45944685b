"""Output files: VTK legacy ASCII snapshots, line-probe CSVs, run summaries.

Every file is written to a temporary name in the target directory and then
renamed, so readers never see a half-written file.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

log = logging.getLogger(__name__)

VTK_CELL_TYPE = {2: 5, 3: 10}


@dataclass
class Snapshot:
    time: float
    step: int
    # name -> (n_cells,) or (n_cells, k)
    cell_fields: dict = field(default_factory=dict)
    vertex_fields: dict = field(default_factory=dict)


def make_snapshot(disc, fields, with_vertices=False, names=()):
    """Named cell fields of a :class:`~vcfv.solver.FieldSet`.

    Euler runs give ``density``, ``velocity`` and ``pressure``; scalar runs
    give ``u``.  ``names`` restricts the set.
    """
    P = disc.primitive(fields.cell_values)
    if disc.scheme.is_euler:
        cell = {"density": P[:, 0], "velocity": P[:, 1:-1], "pressure": P[:, -1]}
    else:
        cell = {"u": np.asarray(P)}
    vert = {}
    if with_vertices:
        V = disc.vertex_values(P)
        if disc.scheme.is_euler:
            vert = {"density": V[:, 0], "velocity": V[:, 1:-1], "pressure": V[:, -1]}
        else:
            vert = {"u": V}
    if names:
        unknown = [n for n in names if n not in cell]
        if unknown:
            raise ValueError(f"unknown output field(s) {unknown}; available: {', '.join(cell)}")
        cell = {k: v for k, v in cell.items() if k in names}
        vert = {k: v for k, v in vert.items() if k in names}
    return Snapshot(float(fields.time), int(fields.step), cell, vert)


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(x):
    return repr(float(x))


def _vtk_array(name, values, n):
    values = np.asarray(values, dtype=float)
    if values.shape[0] != n:
        raise ValueError(f"field {name!r} has {values.shape[0]} entries, expected {n}")
    if values.ndim == 1:
        body = "\n".join(_fmt(v) for v in values)
        return f"SCALARS {name} double 1\nLOOKUP_TABLE default\n{body}\n"
    pad = np.zeros((n, 3))
    pad[:, : values.shape[1]] = values
    body = "\n".join(" ".join(_fmt(v) for v in row) for row in pad)
    return f"VECTORS {name} double\n{body}\n"


def write_vtk(mesh, snapshot: Snapshot, path, title="vcfv snapshot"):
    """Legacy ASCII unstructured grid with cell (and optional point) data."""
    pts = np.zeros((mesh.n_vertices, 3))
    pts[:, : mesh.dim] = mesh.points
    k = mesh.dim + 1
    lines = [
        "# vtk DataFile Version 3.0",
        f"{title} t={snapshot.time!r} step={snapshot.step}",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_vertices} double",
    ]
    lines += [" ".join(_fmt(v) for v in p) for p in pts]
    lines.append(f"CELLS {mesh.n_cells} {mesh.n_cells * (k + 1)}")
    lines += [f"{k} " + " ".join(str(int(v)) for v in c) for c in mesh.cells]
    lines.append(f"CELL_TYPES {mesh.n_cells}")
    lines += [str(VTK_CELL_TYPE[mesh.dim])] * mesh.n_cells
    text = "\n".join(lines) + "\n"
    if snapshot.cell_fields:
        text += f"CELL_DATA {mesh.n_cells}\n"
        for name, values in snapshot.cell_fields.items():
            if not name:
                raise ValueError("empty field name")
            text += _vtk_array(name, values, mesh.n_cells)
    if snapshot.vertex_fields:
        text += f"POINT_DATA {mesh.n_vertices}\n"
        for name, values in snapshot.vertex_fields.items():
            text += _vtk_array(name, values, mesh.n_vertices)
    return atomic_write(path, text)


# -- probes -----------------------------------------------------------------------------


class CellLocator:
    """Find the cell containing a point (nearest centroid when outside)."""

    def __init__(self, mesh, candidates=16):
        self.mesh = mesh
        self.tree = cKDTree(mesh.centroids)
        self.k = min(candidates, mesh.n_cells)
        d = mesh.dim
        verts = mesh.points[mesh.cells]
        self._origin = verts[:, 0]
        edges = np.swapaxes(verts[:, 1:] - verts[:, :1], 1, 2)
        self._inv = np.linalg.inv(edges)
        self._d = d

    def locate(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        _, cand = self.tree.query(points, k=self.k)
        cand = cand.reshape(len(points), -1)
        out = cand[:, 0].copy()
        found = np.zeros(len(points), dtype=bool)
        for col in range(cand.shape[1]):
            c = cand[:, col]
            lam = np.einsum("nij,nj->ni", self._inv[c], points - self._origin[c])
            bary = np.concatenate([1.0 - lam.sum(axis=1, keepdims=True), lam], axis=1)
            inside = ~found & np.all(bary >= -1e-10, axis=1)
            out[inside] = c[inside]
            found |= inside
            if found.all():
                break
        return out, found


def probe_points(mesh, point, direction, samples, radial=False):
    """Evenly spaced points on the part of ``point + s * direction`` inside the
    bounding box; returns (s, points) with ``s`` the arc length from ``point``.
    A radial probe keeps only ``s >= 0``."""
    p0 = np.asarray(point, dtype=float)
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    lo, hi = mesh.bounds
    s_lo, s_hi = -np.inf, np.inf
    for a in range(mesh.dim):
        if abs(u[a]) < 1e-15:
            if not lo[a] <= p0[a] <= hi[a]:
                return np.zeros(0), np.zeros((0, mesh.dim))
            continue
        t1, t2 = (lo[a] - p0[a]) / u[a], (hi[a] - p0[a]) / u[a]
        s_lo, s_hi = max(s_lo, min(t1, t2)), min(s_hi, max(t1, t2))
    if radial:
        s_lo = max(s_lo, 0.0)
    if s_lo > s_hi:
        return np.zeros(0), np.zeros((0, mesh.dim))
    # midpoints of equal segments keep every sample strictly inside
    s = s_lo + (np.arange(samples) + 0.5) / samples * (s_hi - s_lo)
    return s, p0 + s[:, None] * u


def sample_line(mesh, snapshot: Snapshot, point, direction, samples, locator=None, radial=False):
    """Rows ``(s, x, y, z, fields...)`` along a probe line, one cell per sample."""
    s, pts = probe_points(mesh, point, direction, samples, radial)
    header = ["s", "x", "y", "z"]
    columns = []
    for name, values in snapshot.cell_fields.items():
        values = np.asarray(values)
        if values.ndim == 1:
            header.append(name)
            columns.append(values)
        else:
            for k in range(values.shape[1]):
                header.append(f"{name}_{'xyz'[k]}")
                columns.append(values[:, k])
    if len(s) == 0:
        log.warning("probe line through %s along %s misses the domain", point, direction)
        return header, np.zeros((0, len(header)))
    locator = locator or CellLocator(mesh)
    cells, _ = locator.locate(pts)
    xyz = np.zeros((len(s), 3))
    xyz[:, : mesh.dim] = pts
    data = np.column_stack([s, xyz] + [c[cells] for c in columns])
    return header, data


def write_line_probe(mesh, snapshot: Snapshot, probe, path, locator=None):
    header, data = sample_line(
        mesh, snapshot, probe.point, probe.direction, probe.samples, locator, getattr(probe, "radial", False)
    )
    text = ",".join(header) + "\n" + "".join(",".join(_fmt(v) for v in row) + "\n" for row in data)
    atomic_write(path, text)
    return header, data


def write_summary(path, summary: dict):
    return atomic_write(path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
