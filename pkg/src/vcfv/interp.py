"""Vertex values from cell-centre values.

Four weightings are available for the cells around a vertex, with offsets
``o_j = centroid_j - vertex`` and distances ``r_j = |o_j|``:

``volume``              w_j = |C_j|
``inverse_distance``    w_j = 1 / r_j
``pseudo_laplacian``    w_j = 1 + lam . o_j, with ``sum_j w_j o_j = 0``
``consistent_shepard``  w_j = 1 + lam . (o_j / r_j), effective weight w_j / r_j,
                        with ``sum_j w_j o_j / r_j = 0``

The last two are exact for linear fields.  In both, ``lam`` minimizes
``sum (w_j - 1)^2`` under the moment constraints and solves a d x d symmetric
system, done here with explicit cofactors (Cramer's rule).  Negative weights
are kept as they come.

Some boundary vertices cannot satisfy the constraints with their own cells: a
box corner sees centroids that lie on one line (2-D) or one plane (3-D) away
from the vertex, so every admissible weight set sums to zero.  Such a stencil
is widened to all cells touching its one-ring.  If the system is still
singular, the stencil falls back to inverse-distance weights and is flagged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InterpolationError

SCHEMES = ("volume", "inverse_distance", "pseudo_laplacian", "consistent_shepard")
SINGULAR_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-8


@dataclass
class VertexStencil:
    vertex_id: int
    cell_ids: np.ndarray
    offsets: np.ndarray
    distances: np.ndarray
    weights: np.ndarray
    lagrange: np.ndarray
    determinant: float
    scheme: str
    fallback_applied: bool = False
    extended: bool = False

    @property
    def effective_weights(self):
        """Weights multiplying the cell values (before normalization)."""
        if self.scheme == "consistent_shepard":
            return self.weights / self.distances
        return self.weights

    def interpolate(self, cell_values):
        w = self.effective_weights
        return np.tensordot(w, np.asarray(cell_values)[self.cell_ids], axes=1) / w.sum()


@dataclass
class InterpDiagnostics:
    scheme: str
    n_vertices: int
    n_vertices_with_negative_weight: int
    min_weight: float
    min_determinant: float
    n_fallbacks: int
    n_extended: int = 0
    # the same count restricted to vertices off the boundary; one-sided
    # boundary stencils need negative weights to stay linearly exact
    n_interior_negative: int = 0
    n_interior: int = 0

    def __str__(self):
        return (
            f"scheme                 {self.scheme}\n"
            f"vertices               {self.n_vertices}\n"
            f"negative-weight verts  {self.n_vertices_with_negative_weight}\n"
            f"  interior             {self.n_interior_negative} of {self.n_interior}\n"
            f"min weight             {self.min_weight:.6g}\n"
            f"min |determinant|      {self.min_determinant:.6g}\n"
            f"fallbacks              {self.n_fallbacks}\n"
            f"widened stencils       {self.n_extended}"
        )

    def csv_row(self):
        return (
            f"{self.scheme},{self.n_vertices_with_negative_weight},{self.min_weight:.6g},"
            f"{self.min_determinant:.6g},{self.n_fallbacks},{self.n_extended},{self.n_interior_negative}"
        )

    CSV_HEADER = "scheme,n_negative,min_weight,min_det,n_fallback,n_widened,n_interior_negative"


# -- explicit small solves ------------------------------------------------------


def _solve_sym(M, rhs):
    """Cramer's rule for stacked symmetric 2x2 / 3x3 systems.

    ``M`` has shape (n, d, d), ``rhs`` (n, d).  Returns (solution, determinant);
    the solution is garbage where the determinant vanishes.
    """
    d = M.shape[-1]
    if d == 2:
        a, b, c = M[:, 0, 0], M[:, 0, 1], M[:, 1, 1]
        det = a * c - b * b
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (c * rhs[:, 0] - b * rhs[:, 1]) / det
            y = (a * rhs[:, 1] - b * rhs[:, 0]) / det
        return np.stack([x, y], axis=1), det
    xx, xy, xz = M[:, 0, 0], M[:, 0, 1], M[:, 0, 2]
    yy, yz, zz = M[:, 1, 1], M[:, 1, 2], M[:, 2, 2]
    # cofactors of the symmetric matrix
    c00 = yy * zz - yz * yz
    c01 = xz * yz - xy * zz
    c02 = xy * yz - xz * yy
    c11 = xx * zz - xz * xz
    c12 = xy * xz - xx * yz
    c22 = xx * yy - xy * xy
    det = xx * c00 + xy * c01 + xz * c02
    rx, ry, rz = rhs[:, 0], rhs[:, 1], rhs[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = (c00 * rx + c01 * ry + c02 * rz) / det
        ly = (c01 * rx + c11 * ry + c12 * rz) / det
        lz = (c02 * rx + c12 * ry + c22 * rz) / det
    return np.stack([lx, ly, lz], axis=1), det


def _group_sum(group, values, n):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return np.bincount(group, weights=values, minlength=n)
    return np.stack([np.bincount(group, weights=values[:, k], minlength=n) for k in range(values.shape[1])], axis=1)


def _weights(scheme, group, offsets, volumes, n):
    """Core weight computation over ``n`` stencils given incidence rows.

    Returns (weights, effective, lagrange, det, fallback) where the first two
    are per incidence and the rest per stencil.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown interpolation scheme {scheme!r}; valid: {', '.join(SCHEMES)}")
    d = offsets.shape[1]
    r = np.linalg.norm(offsets, axis=1)
    if np.any(r <= 0):
        raise InterpolationError("cell centroid coincides with a vertex")
    lagrange = np.zeros((n, d))
    det = np.full(n, np.nan)
    fallback = np.zeros(n, dtype=bool)

    if scheme == "volume":
        w = np.asarray(volumes, dtype=float).copy()
        return w, w, lagrange, det, fallback
    if scheme == "inverse_distance":
        w = 1.0 / r
        return w, w, lagrange, det, fallback

    x = offsets if scheme == "pseudo_laplacian" else offsets / r[:, None]
    M = np.empty((n, d, d))
    for a in range(d):
        for b in range(a, d):
            M[:, a, b] = M[:, b, a] = _group_sum(group, x[:, a] * x[:, b], n)
    rhs = -_group_sum(group, x, n)
    lam, det = _solve_sym(M, rhs)

    if scheme == "pseudo_laplacian":
        count = np.bincount(group, minlength=n)
        scale = _group_sum(group, r, n) / np.maximum(count, 1)
        fallback = ~(np.abs(det) >= SINGULAR_TOL * scale ** (2 * d))
    else:
        fallback = ~(np.abs(det) >= SINGULAR_TOL)
    lam[fallback] = 0.0

    w = 1.0 + np.einsum("ij,ij->i", lam[group], x)
    eff = w if scheme == "pseudo_laplacian" else w / r
    # constraints satisfiable only by w = 0 (all centroids in a half-space with
    # exactly d cells): the normalization would divide by zero
    total = _group_sum(group, eff, n)
    size = _group_sum(group, np.abs(eff), n)
    count = np.bincount(group, minlength=n)
    fallback |= ~(np.abs(total) > WEIGHT_SUM_TOL * size)
    # unconstrained weights are 1, so their sum is naturally O(count)
    fallback |= ~(np.abs(_group_sum(group, w, n)) > WEIGHT_SUM_TOL * count)
    lam[fallback] = 0.0
    w = 1.0 + np.einsum("ij,ij->i", lam[group], x)
    fb = fallback[group]
    if scheme == "pseudo_laplacian":
        w = np.where(fb, 1.0 / r, w)
        eff = w
    else:
        # w = 1 with the 1/r factor is plain inverse-distance weighting
        w = np.where(fb, 1.0, w)
        eff = w / r
    return w, eff, lam, det, fallback


def weights_from_offsets(offsets, scheme, volumes=None, vertex_id=-1, cell_ids=None):
    """Stencil for a single vertex given centroid offsets ``(k, d)``."""
    offsets = np.atleast_2d(np.asarray(offsets, dtype=float))
    k = len(offsets)
    if k == 0:
        raise InterpolationError(f"vertex {vertex_id} has no incident cells")
    if volumes is None:
        volumes = np.ones(k)
    group = np.zeros(k, dtype=np.int64)
    w, _, lam, det, fb = _weights(scheme, group, offsets, volumes, 1)
    return VertexStencil(
        vertex_id=vertex_id,
        cell_ids=np.arange(k) if cell_ids is None else np.asarray(cell_ids),
        offsets=offsets,
        distances=np.linalg.norm(offsets, axis=1),
        weights=w,
        lagrange=lam[0],
        determinant=float(det[0]),
        scheme=scheme,
        fallback_applied=bool(fb[0]),
    )


# -- whole-mesh stencils ----------------------------------------------------------


class StencilSet:
    """Stencils of every vertex of a mesh plus the sparse interpolation operator.

    Periodic vertex images share one stencil (``mesh.vertex_images``).
    """

    def __init__(self, mesh, scheme):
        d = mesh.dim
        self.mesh = mesh
        self.scheme = scheme
        roots, canon = np.unique(mesh.vertex_images, return_inverse=True)
        canon = canon.ravel()
        self.roots = roots
        self.canonical = canon
        n = len(roots)

        verts = mesh.cells.ravel()
        cells = np.repeat(np.arange(mesh.n_cells), d + 1)
        group = canon[verts]
        offsets = mesh.centroids[cells] - mesh.points[verts]
        _, _, _, _, fb = _weights(scheme, group, offsets, mesh.volumes[cells], n)

        # Unsatisfiable one-sided stencils (box corners, mostly) are widened to
        # the second ring of cells, which restores linear exactness there.
        self.extended = np.zeros(n, dtype=bool)
        if np.any(fb):
            base = (group, cells, offsets)
            wide = self._second_ring(np.flatnonzero(fb))
            _, _, _, _, fb_wide = _weights(scheme, wide[0], wide[2], mesh.volumes[wide[1]], n)
            good = np.zeros(n, dtype=bool)
            good[np.flatnonzero(fb)] = ~fb_wide[np.flatnonzero(fb)]
            keep_base = ~good[base[0]]
            keep_wide = good[wide[0]]
            group = np.concatenate([base[0][keep_base], wide[0][keep_wide]])
            cells = np.concatenate([base[1][keep_base], wide[1][keep_wide]])
            offsets = np.concatenate([base[2][keep_base], wide[2][keep_wide]])
            self.extended = good

        order = np.lexsort((cells, group))
        group, cells, offsets = group[order], cells[order], offsets[order]
        w, eff, lam, det, fb = _weights(scheme, group, offsets, mesh.volumes[cells], n)
        self.ptr = np.concatenate(([0], np.cumsum(np.bincount(group, minlength=n))))
        self.cell_ids = cells
        self.offsets = offsets
        self.distances = np.linalg.norm(offsets, axis=1)
        self.weights = w
        self.effective = eff
        self.lagrange = lam
        self.determinant = det
        self.fallback = fb
        self.weight_sum = _group_sum(group, eff, n)
        self._group = group

        with np.errstate(divide="ignore", invalid="ignore"):
            data = eff / self.weight_sum[group]
        canon_matrix = sp.csr_matrix((data, (group, cells)), shape=(n, mesh.n_cells))
        self.matrix = canon_matrix[canon].tocsr()

    def _second_ring(self, groups):
        """Incidence rows (group, cell, offset) of cells touching the one-ring."""
        mesh = self.mesh
        members = [[] for _ in range(len(self.roots))]
        for v, g in enumerate(self.canonical):
            members[g].append(v)
        out_g, out_c, out_o = [], [], []
        for g in groups:
            ring1 = np.concatenate([mesh.vertex_cells(v) for v in members[g]])
            near = np.unique(self.canonical[mesh.cells[ring1].ravel()])
            near_verts = np.concatenate([members[h] for h in near])
            ring2 = np.unique(np.concatenate([mesh.vertex_cells(v) for v in near_verts]))
            o = mesh.centroids[ring2] - mesh.points[self.roots[g]]
            for a in mesh.periodic_axes:
                # minimum-image offset across the periodic seam
                L = mesh.period[a]
                o[:, a] -= L * np.round(o[:, a] / L)
            out_g.append(np.full(len(ring2), g))
            out_c.append(ring2)
            out_o.append(o)
        return np.concatenate(out_g), np.concatenate(out_c), np.concatenate(out_o)

    def __len__(self):
        return self.mesh.n_vertices

    def __getitem__(self, v):
        g = self.canonical[v]
        s = slice(self.ptr[g], self.ptr[g + 1])
        return VertexStencil(
            vertex_id=int(v),
            cell_ids=self.cell_ids[s],
            offsets=self.offsets[s],
            distances=self.distances[s],
            weights=self.weights[s],
            lagrange=self.lagrange[g],
            determinant=float(self.determinant[g]),
            scheme=self.scheme,
            fallback_applied=bool(self.fallback[g]),
            extended=bool(self.extended[g]),
        )

    def __iter__(self):
        return (self[v] for v in range(len(self)))

    @property
    def negative_vertices(self):
        """Vertex ids whose stencil carries at least one negative weight."""
        neg = np.bincount(self._group, weights=(self.effective < 0), minlength=len(self.roots)) > 0
        return np.flatnonzero(neg[self.canonical])

    @property
    def fallback_vertices(self):
        return np.flatnonzero(self.fallback[self.canonical])

    def diagnostics(self):
        neg = np.bincount(self._group, weights=(self.effective < 0), minlength=len(self.roots)) > 0
        ok = ~self.fallback & np.isfinite(self.determinant)
        min_det = float(np.abs(self.determinant[ok]).min()) if np.any(ok) else float("nan")
        m = self.mesh
        on_boundary = np.zeros(len(self.roots), dtype=bool)
        on_boundary[self.canonical[m.face_vertices[m.boundary_faces].ravel()]] = True
        return InterpDiagnostics(
            scheme=self.scheme,
            n_vertices=len(self.roots),
            n_vertices_with_negative_weight=int(neg.sum()),
            n_interior_negative=int((neg & ~on_boundary).sum()),
            n_interior=int((~on_boundary).sum()),
            min_weight=float(self.weights.min()),
            min_determinant=min_det,
            n_fallbacks=int(self.fallback.sum()),
            n_extended=int(self.extended.sum()),
        )


def build_all_stencils(mesh, scheme):
    """One stencil per vertex and the aggregated diagnostics."""
    stencils = StencilSet(mesh, scheme)
    return stencils, stencils.diagnostics()


def _single(mesh, vertex, scheme):
    return StencilSet(mesh, scheme)[vertex]


def simple_weights(mesh, vertex, kind):
    if kind not in ("volume", "inverse_distance"):
        raise ValueError("kind must be 'volume' or 'inverse_distance'")
    return _single(mesh, vertex, kind)


def pseudo_laplacian_weights(mesh, vertex):
    return _single(mesh, vertex, "pseudo_laplacian")


def consistent_shepard_weights(mesh, vertex):
    return _single(mesh, vertex, "consistent_shepard")


def interpolate_field(stencils, cell_values):
    """Vertex values from cell values; works on scalar or vector fields."""
    if isinstance(stencils, StencilSet):
        bad = np.flatnonzero(np.abs(stencils.weight_sum) == 0)
        if len(bad):
            v = int(stencils.roots[bad[0]])
            raise InterpolationError(f"weights of vertex {v} sum to zero")
        return stencils.matrix @ np.asarray(cell_values, dtype=float)
    out = []
    for st in stencils:
        if st.effective_weights.sum() == 0:
            raise InterpolationError(f"weights of vertex {st.vertex_id} sum to zero")
        out.append(st.interpolate(cell_values))
    return np.array(out)
