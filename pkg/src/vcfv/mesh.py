"""Simplicial meshes (triangles / tetrahedra) and the geometry the scheme needs.

All per-entity data is stored as flat numpy arrays:

* ``cells[c]`` lists the d+1 vertex ids of cell ``c`` (positively oriented);
* face ``f`` separates ``face_left[f]`` from ``face_right[f]`` (``-1`` on the
  boundary); ``face_normals[f]`` points out of the left cell and its length is
  the face measure;
* ``face_opp_left[f]`` is the vertex of the left cell that does not lie on the
  face (and likewise for the right cell).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import GeometryError, MeshFormatError

SIDE_NAMES = ("xmin", "xmax", "ymin", "ymax", "zmin", "zmax")

# relative tolerance (w.r.t. bounding-box size ** d) below which a cell is degenerate
_DEGENERATE_TOL = 1e-14


class Face(NamedTuple):
    id: int
    vertex_ids: tuple
    left_cell: int
    right_cell: int
    normal: np.ndarray
    midpoint: np.ndarray
    opp_vertex_left: int
    opp_vertex_right: int
    tag: str | None


class Mesh:
    """Immutable simplicial mesh with precomputed geometry.

    Build with :meth:`Mesh.from_cells`, :func:`generate_box` or
    :func:`load_gmsh` rather than calling the constructor directly.
    """

    def __init__(self, points, cells, dim):
        self.points = np.ascontiguousarray(points, dtype=float)
        self.cells = np.ascontiguousarray(cells, dtype=np.int64)
        self.dim = int(dim)
        # filled by _build_connectivity / compute_geometry
        self.reoriented = np.zeros(0, dtype=np.int64)
        self.vertex_images = np.arange(len(self.points))
        self.periodic_axes = ()

    # -- construction ---------------------------------------------------

    @classmethod
    def from_cells(cls, points, cells, facet_groups=None, cell_labels=None):
        """Build connectivity and geometry from raw vertex/cell arrays.

        ``facet_groups`` maps a boundary tag name to an array of facets
        (``(k, d)`` vertex ids); boundary faces not listed in any group get
        the tag ``"boundary"``.  ``cell_labels`` are used in error messages
        (e.g. the element ids of a mesh file).
        """
        points = np.asarray(points, dtype=float)
        cells = np.asarray(cells, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] not in (2, 3):
            raise GeometryError(f"points must have shape (n, 2) or (n, 3), got {points.shape}")
        dim = points.shape[1]
        if cells.ndim != 2 or cells.shape[1] != dim + 1:
            raise GeometryError(f"{dim}-D cells need {dim + 1} vertices, got shape {cells.shape}")
        if len(cells) == 0:
            raise GeometryError("mesh has no cells")
        if cells.min() < 0 or cells.max() >= len(points):
            raise GeometryError("cell references a vertex id out of range")
        if not np.all(np.isfinite(points)):
            raise GeometryError("vertex coordinates must be finite")

        mesh = cls(points, cells, dim)
        mesh._canonicalize(cell_labels)
        mesh._build_connectivity(facet_groups or {})
        compute_geometry(mesh)
        return mesh

    def _canonicalize(self, cell_labels):
        vol = _signed_measures(self.points, self.cells)
        extent = np.ptp(self.points, axis=0).max()
        tiny = _DEGENERATE_TOL * extent**self.dim
        bad = np.flatnonzero(np.abs(vol) <= tiny)
        if len(bad):
            c = int(bad[0])
            label = cell_labels[c] if cell_labels is not None else c
            raise GeometryError(f"degenerate element {label}: measure {vol[c]:.3e}")
        flip = np.flatnonzero(vol < 0)
        if len(flip):
            cells = self.cells.copy()
            cells[flip, 0], cells[flip, 1] = self.cells[flip, 1], self.cells[flip, 0]
            self.cells = cells
        self.reoriented = flip

    def _build_connectivity(self, facet_groups):
        d = self.dim
        nc = len(self.cells)
        # local face k is opposite local vertex k
        local = np.array([[v for v in range(d + 1) if v != k] for k in range(d + 1)])
        all_faces = self.cells[:, local].reshape(-1, d)
        keys = np.sort(all_faces, axis=1)
        uniq, first, inverse, counts = np.unique(
            keys, axis=0, return_index=True, return_inverse=True, return_counts=True
        )
        inverse = inverse.ravel()
        if counts.max() > 2:
            f = int(np.argmax(counts))
            raise GeometryError(f"face {tuple(uniq[f])} is shared by {counts[f]} cells")

        order = np.argsort(inverse, kind="stable")
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        owner = order // (d + 1)
        slot = order % (d + 1)
        nf = len(uniq)
        self.face_vertices = uniq
        self.face_left = owner[starts]
        left_slot = slot[starts]
        self.face_right = np.full(nf, -1, dtype=np.int64)
        right_slot = np.full(nf, -1, dtype=np.int64)
        two = counts == 2
        self.face_right[two] = owner[starts[two] + 1]
        right_slot[two] = slot[starts[two] + 1]
        self.face_opp_left = self.cells[self.face_left, left_slot]
        self.face_opp_right = np.full(nf, -1, dtype=np.int64)
        self.face_opp_right[two] = self.cells[self.face_right[two], right_slot[two]]
        self.cell_faces = inverse.reshape(nc, d + 1)

        # boundary tags
        bfaces = np.flatnonzero(~two)
        tag_index = {tuple(k): f for f, k in zip(bfaces, uniq[bfaces])}
        self.face_tag = np.full(nf, -1, dtype=np.int64)
        names = []
        for name, facets in facet_groups.items():
            facets = np.sort(np.asarray(facets, dtype=np.int64).reshape(-1, d), axis=1)
            tid = len(names)
            names.append(name)
            for fv in facets:
                f = tag_index.get(tuple(fv))
                if f is None:
                    raise MeshFormatError(
                        f"facet {tuple(int(v) for v in fv)} of group {name!r} is not a boundary face"
                    )
                self.face_tag[f] = tid
        untagged = bfaces[self.face_tag[bfaces] < 0]
        if len(untagged):
            names.append("boundary")
            self.face_tag[untagged] = len(names) - 1
        self.tag_names = tuple(names)

        # vertex -> cells incidence (CSR)
        vc_vert = self.cells.ravel()
        vc_cell = np.repeat(np.arange(nc), d + 1)
        perm = np.lexsort((vc_cell, vc_vert))
        self.vertex_cells_index = vc_cell[perm]
        self.vertex_cells_ptr = np.concatenate(
            ([0], np.cumsum(np.bincount(vc_vert, minlength=len(self.points))))
        )

    # -- convenience views --------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.points)

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_faces(self):
        return len(self.face_left)

    @property
    def interior_faces(self):
        return np.flatnonzero(self.face_right >= 0)

    @property
    def boundary_faces(self):
        return np.flatnonzero(self.face_right < 0)

    @property
    def boundary_tags(self):
        """Mapping tag name -> boundary face ids."""
        return {
            name: np.flatnonzero((self.face_tag == t) & (self.face_right < 0))
            for t, name in enumerate(self.tag_names)
        }

    def vertex_cells(self, v):
        return self.vertex_cells_index[self.vertex_cells_ptr[v] : self.vertex_cells_ptr[v + 1]]

    def cell_neighbors(self, c):
        """N(c): cells sharing a face with ``c``."""
        f = self.cell_faces[c]
        other = np.where(self.face_left[f] == c, self.face_right[f], self.face_left[f])
        return other[other >= 0]

    def face(self, f):
        t = self.face_tag[f]
        return Face(
            id=int(f),
            vertex_ids=tuple(int(v) for v in self.face_vertices[f]),
            left_cell=int(self.face_left[f]),
            right_cell=int(self.face_right[f]),
            normal=self.face_normals[f],
            midpoint=self.face_midpoints[f],
            opp_vertex_left=int(self.face_opp_left[f]),
            opp_vertex_right=int(self.face_opp_right[f]),
            tag=self.tag_names[t] if t >= 0 else None,
        )

    @property
    def bounds(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def __repr__(self):
        return (
            f"Mesh(dim={self.dim}, vertices={self.n_vertices}, cells={self.n_cells}, "
            f"faces={self.n_faces}, tags={list(self.tag_names)})"
        )


def _signed_measures(points, cells):
    d = points.shape[1]
    p0 = points[cells[:, 0]]
    edges = np.stack([points[cells[:, k]] - p0 for k in range(1, d + 1)], axis=1)
    return np.linalg.det(edges) / math.factorial(d)


def compute_geometry(mesh):
    """Populate centroids, measures, face normals/midpoints and cell diameters."""
    d = mesh.dim
    pts = mesh.points
    cells = mesh.cells
    vol = _signed_measures(pts, cells)
    if np.any(vol <= 0):
        c = int(np.flatnonzero(vol <= 0)[0])
        raise GeometryError(f"cell {c} has non-positive measure {vol[c]:.3e} after reorientation")
    mesh.volumes = vol
    mesh.centroids = pts[cells].mean(axis=1)
    # h = max distance from centroid to a vertex of the cell
    mesh.cell_diameters = np.linalg.norm(pts[cells] - mesh.centroids[:, None, :], axis=2).max(axis=1)

    fv = pts[mesh.face_vertices]
    mesh.face_midpoints = fv.mean(axis=1)
    if d == 2:
        t = fv[:, 1] - fv[:, 0]
        normals = np.stack([t[:, 1], -t[:, 0]], axis=1)
    else:
        normals = 0.5 * np.cross(fv[:, 1] - fv[:, 0], fv[:, 2] - fv[:, 0])
    outward = np.einsum("ij,ij->i", normals, mesh.face_midpoints - pts[mesh.face_opp_left])
    normals[outward < 0] *= -1.0
    mesh.face_normals = normals
    mesh.face_areas = np.linalg.norm(normals, axis=1)
    return mesh


# --------------------------------------------------------------------------
# structured boxes


def _kuhn_tets(mirror=(0, 0, 0)):
    """Six tets of the unit cube around its main diagonal, as local corner ids.

    Corner id = x + 2 y + 4 z.  ``mirror`` reflects the split per axis.
    """
    tets = []
    for perm in itertools.permutations(range(3)):
        corner = [0, 0, 0]
        path = [tuple(corner)]
        for ax in perm:
            corner[ax] = 1
            path.append(tuple(corner))
        tets.append(
            [
                sum(((c[a] ^ mirror[a]) << a) for a in range(3))
                for c in path
            ]
        )
    return np.array(tets)


def generate_box(d, extents, n, split="right", origin=None, perturb=0.0, seed=None):
    """Structured box split into simplices.

    2-D splits: ``right`` / ``left`` (uniform diagonal direction), ``alternate``
    (checkerboard) and ``random``.  3-D splits: ``kuhn`` (6 tets around the
    main diagonal of every hex) and ``alternate`` (Kuhn split mirrored by cell
    parity).  ``perturb`` moves interior vertices by up to that fraction of the
    local spacing, which keeps the boundary planar.
    """
    if d not in (2, 3):
        raise ValueError("d must be 2 or 3")
    extents = np.asarray(extents, dtype=float).reshape(d)
    n = tuple(int(k) for k in n)
    if len(n) != d or min(n) < 1:
        raise ValueError(f"n must be {d} positive cell counts, got {n}")
    if np.any(extents <= 0):
        raise ValueError("extents must be positive")
    origin = np.zeros(d) if origin is None else np.asarray(origin, dtype=float).reshape(d)
    rng = np.random.default_rng(seed)

    axes = [np.linspace(0.0, extents[a], n[a] + 1) + origin[a] for a in range(d)]
    grid = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in grid], axis=1)
    shape = tuple(k + 1 for k in n)

    def vid(*idx):
        return np.ravel_multi_index(idx, shape)

    if d == 2:
        i, j = np.meshgrid(np.arange(n[0]), np.arange(n[1]), indexing="ij")
        i, j = i.ravel(), j.ravel()
        v00, v10, v01, v11 = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
        if split == "right":
            diag = np.zeros(len(i), dtype=bool)
        elif split == "left":
            diag = np.ones(len(i), dtype=bool)
        elif split == "alternate":
            diag = (i + j) % 2 == 1
        elif split == "random":
            diag = rng.random(len(i)) < 0.5
        else:
            raise ValueError(f"unknown 2-D split {split!r}")
        a = np.where(diag[:, None], np.stack([v00, v10, v01], 1), np.stack([v00, v10, v11], 1))
        b = np.where(diag[:, None], np.stack([v10, v11, v01], 1), np.stack([v00, v11, v01], 1))
        cells = np.stack([a, b], axis=1).reshape(-1, 3)
    else:
        i, j, k = np.meshgrid(np.arange(n[0]), np.arange(n[1]), np.arange(n[2]), indexing="ij")
        i, j, k = i.ravel(), j.ravel(), k.ravel()
        corners = np.stack(
            [vid(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)) for c in range(8)], axis=1
        )
        if split == "kuhn":
            cells = corners[:, _kuhn_tets()].reshape(-1, 4)
        elif split == "alternate":
            out = np.empty((len(i), 6, 4), dtype=np.int64)
            parity = np.stack([i % 2, j % 2, k % 2], axis=1)
            for m in itertools.product((0, 1), repeat=3):
                sel = np.all(parity == m, axis=1)
                out[sel] = corners[sel][:, _kuhn_tets(m)]
            cells = out.reshape(-1, 4)
        else:
            raise ValueError(f"unknown 3-D split {split!r}")

    if perturb:
        spacing = extents / np.array(n)
        lo, hi = origin, origin + extents
        interior = np.all((points > lo + 1e-12 * extents) & (points < hi - 1e-12 * extents), axis=1)
        jitter = rng.uniform(-perturb, perturb, size=points.shape) * spacing
        points[interior] += jitter[interior]

    neg = _signed_measures(points, cells) < 0
    cells[neg, :2] = cells[neg, 1::-1]
    mesh = Mesh.from_cells(points, cells)
    _tag_box_sides(mesh, origin, extents)
    return mesh


def _tag_box_sides(mesh, origin, extents):
    d = mesh.dim
    bf = mesh.boundary_faces
    mid = mesh.face_midpoints[bf]
    tol = 1e-9 * extents.max()
    names = []
    tags = np.full(mesh.n_faces, -1, dtype=np.int64)
    for a in range(d):
        for side, value in ((0, origin[a]), (1, origin[a] + extents[a])):
            on = bf[np.abs(mid[:, a] - value) < tol]
            names.append(SIDE_NAMES[2 * a + side])
            tags[on] = len(names) - 1
    if np.any(tags[bf] < 0):
        raise GeometryError("boundary face not on any box side")
    mesh.face_tag = tags
    mesh.tag_names = tuple(names)


# --------------------------------------------------------------------------
# periodicity


def make_periodic(mesh, axes, tol=1e-9):
    """Return a copy of ``mesh`` with opposite box sides glued along ``axes``.

    Boundary faces on the ``<axis>max`` side become interior faces whose
    right cell is the matching cell on the ``<axis>min`` side; vertices on the
    two sides are identified through ``vertex_images``.
    """
    axes = tuple(sorted(set(int(a) for a in axes)))
    if not axes:
        return mesh
    lo, hi = mesh.bounds
    period = hi - lo
    scale = max(period.max(), 1.0)
    pts = mesh.points

    # union-find over vertex images
    parent = np.arange(mesh.n_vertices)

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tag_of = {name: t for t, name in enumerate(mesh.tag_names)}
    pair_faces = []
    for a in axes:
        lo_name, hi_name = SIDE_NAMES[2 * a], SIDE_NAMES[2 * a + 1]
        if lo_name not in tag_of or hi_name not in tag_of:
            raise GeometryError(f"mesh has no {lo_name}/{hi_name} tags for periodic pairing")
        lo_v = np.flatnonzero(np.abs(pts[:, a] - lo[a]) < tol * scale)
        hi_v = np.flatnonzero(np.abs(pts[:, a] - hi[a]) < tol * scale)
        shifted = pts[hi_v].copy()
        shifted[:, a] -= period[a]
        match = _match_points(shifted, pts[lo_v], tol * scale)
        if match is None:
            raise GeometryError(f"vertices on {lo_name}/{hi_name} do not match for periodicity")
        partner = np.full(mesh.n_vertices, -1, dtype=np.int64)
        partner[hi_v] = lo_v[match]
        for v, w in zip(hi_v, lo_v[match]):
            rv, rw = find(v), find(w)
            if rv != rw:
                parent[max(rv, rw)] = min(rv, rw)

        lo_faces = np.flatnonzero((mesh.face_tag == tag_of[lo_name]) & (mesh.face_right < 0))
        hi_faces = np.flatnonzero((mesh.face_tag == tag_of[hi_name]) & (mesh.face_right < 0))
        lo_key = {tuple(k): f for f, k in zip(lo_faces, mesh.face_vertices[lo_faces])}
        for f in hi_faces:
            key = tuple(sorted(partner[mesh.face_vertices[f]]))
            g = lo_key.get(key)
            if g is None:
                raise GeometryError(f"face {f} on {hi_name} has no periodic partner")
            pair_faces.append((f, g))

    images = np.array([find(v) for v in range(mesh.n_vertices)])
    out = _merge_faces(mesh, pair_faces)
    out.vertex_images = images
    out.periodic_axes = tuple(sorted(set(mesh.periodic_axes) | set(axes)))
    out.period = period
    return out


def _match_points(a, b, tol):
    from scipy.spatial import cKDTree

    if len(a) != len(b):
        return None
    dist, idx = cKDTree(b).query(a)
    if np.any(dist > tol) or len(np.unique(idx)) != len(idx):
        return None
    return idx


def _merge_faces(mesh, pairs):
    out = Mesh.__new__(Mesh)
    out.__dict__.update(mesh.__dict__)
    keep = np.ones(mesh.n_faces, dtype=bool)
    face_right = mesh.face_right.copy()
    face_opp_right = mesh.face_opp_right.copy()
    face_tag = mesh.face_tag.copy()
    cell_faces = mesh.cell_faces.copy()
    for f, g in pairs:
        c = mesh.face_left[g]
        face_right[f] = c
        face_opp_right[f] = mesh.face_opp_left[g]
        face_tag[f] = -1
        keep[g] = False
        cell_faces[cell_faces == g] = f
    new_id = np.cumsum(keep) - 1
    out.face_vertices = mesh.face_vertices[keep]
    out.face_left = mesh.face_left[keep]
    out.face_right = face_right[keep]
    out.face_opp_left = mesh.face_opp_left[keep]
    out.face_opp_right = face_opp_right[keep]
    out.face_normals = mesh.face_normals[keep]
    out.face_areas = mesh.face_areas[keep]
    out.face_midpoints = mesh.face_midpoints[keep]
    out.cell_faces = new_id[cell_faces]
    used = sorted(set(face_tag[keep][face_tag[keep] >= 0]))
    remap = np.full(len(mesh.tag_names), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    ft = face_tag[keep]
    out.face_tag = np.where(ft >= 0, remap[np.maximum(ft, 0)], -1)
    out.tag_names = tuple(mesh.tag_names[t] for t in used)
    return out


# --------------------------------------------------------------------------
# diagnostics


@dataclass
class MeshReport:
    n_cells: int
    n_vertices: int
    n_faces: int
    min_measure: float
    max_measure: float
    total_measure: float
    min_quality: float  # smallest interior angle (2-D) / dihedral angle (3-D), degrees
    h: np.ndarray = field(repr=False)
    boundary_counts: dict = field(default_factory=dict)
    inverted_cells: list = field(default_factory=list)
    max_closure_error: float = 0.0

    def __str__(self):
        lines = [
            f"cells            {self.n_cells}",
            f"vertices         {self.n_vertices}",
            f"faces            {self.n_faces}",
            f"measure min/max  {self.min_measure:.6e} / {self.max_measure:.6e}",
            f"total measure    {self.total_measure:.12g}",
            f"min angle (deg)  {self.min_quality:.3f}",
            f"h min/max        {self.h.min():.6e} / {self.h.max():.6e}",
            f"closure error    {self.max_closure_error:.3e}",
            f"inverted cells   {len(self.inverted_cells)}",
        ]
        for name, count in self.boundary_counts.items():
            lines.append(f"boundary {name:<8s}{count}")
        return "\n".join(lines)


def validate_mesh(mesh):
    """Quality/consistency report; never raises."""
    d = mesh.dim
    normals = np.zeros((mesh.n_cells, d))
    surface = np.zeros(mesh.n_cells)
    for k in range(d + 1):
        f = mesh.cell_faces[:, k]
        sign = np.where(mesh.face_left[f] == np.arange(mesh.n_cells), 1.0, -1.0)
        normals += sign[:, None] * mesh.face_normals[f]
        surface += mesh.face_areas[f]
    closure = np.linalg.norm(normals, axis=1) / surface

    # outward normals per local face, recomputed from the cell itself so that
    # periodic merging does not matter
    pts = mesh.points[mesh.cells]
    local = []
    for k in range(d + 1):
        fv = np.delete(pts, k, axis=1)
        if d == 2:
            t = fv[:, 1] - fv[:, 0]
            nrm = np.stack([t[:, 1], -t[:, 0]], axis=1)
        else:
            nrm = np.cross(fv[:, 1] - fv[:, 0], fv[:, 2] - fv[:, 0])
        s = np.einsum("ij,ij->i", nrm, fv.mean(axis=1) - pts[:, k])
        nrm = nrm * np.sign(s)[:, None]
        local.append(nrm / np.linalg.norm(nrm, axis=1)[:, None])
    min_angle = np.pi
    for a, b in itertools.combinations(range(d + 1), 2):
        cosang = -np.einsum("ij,ij->i", local[a], local[b])
        min_angle = min(min_angle, np.arccos(np.clip(cosang, -1, 1)).min())

    return MeshReport(
        n_cells=mesh.n_cells,
        n_vertices=mesh.n_vertices,
        n_faces=mesh.n_faces,
        min_measure=float(mesh.volumes.min()),
        max_measure=float(mesh.volumes.max()),
        total_measure=float(mesh.volumes.sum()),
        min_quality=float(np.degrees(min_angle)),
        h=mesh.cell_diameters.copy(),
        boundary_counts={name: len(f) for name, f in mesh.boundary_tags.items()},
        inverted_cells=[int(c) for c in mesh.reoriented],
        max_closure_error=float(closure.max()),
    )


# --------------------------------------------------------------------------
# GMSH MSH 2.2 ASCII

_ELEMENT_NODES = {15: 1, 1: 2, 2: 3, 4: 4}
_ELEMENT_DIM = {15: 0, 1: 1, 2: 2, 4: 3}


def _sections(lines):
    sections = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("$") and not line.startswith("$End"):
            name = line[1:]
            end = f"$End{name}"
            j = i + 1
            while j < len(lines) and lines[j].strip() != end:
                j += 1
            if j == len(lines):
                raise MeshFormatError(f"section ${name} is not terminated")
            sections[name] = lines[i + 1 : j]
            i = j
        i += 1
    return sections


def load_gmsh(path):
    """Read a GMSH MSH 2.2 ASCII file of triangles or tetrahedra."""
    path = Path(path)
    try:
        text = path.read_text()
    except UnicodeDecodeError as exc:
        raise MeshFormatError(f"{path}: binary MSH files are not supported") from exc
    sec = _sections(text.splitlines())
    if "MeshFormat" not in sec or not sec["MeshFormat"]:
        raise MeshFormatError(f"{path}: missing $MeshFormat section")
    fmt = sec["MeshFormat"][0].split()
    if not fmt or not fmt[0].startswith("2."):
        raise MeshFormatError(f"{path}: MSH version {fmt[0] if fmt else '?'} unsupported, need 2.2")
    if len(fmt) > 1 and fmt[1] != "0":
        raise MeshFormatError(f"{path}: binary MSH files are not supported")
    for name in ("Nodes", "Elements"):
        if name not in sec:
            raise MeshFormatError(f"{path}: missing ${name} section")

    phys_names = {}
    for line in sec.get("PhysicalNames", [])[1:]:
        parts = line.split(maxsplit=2)
        if len(parts) == 3:
            phys_names[(int(parts[0]), int(parts[1]))] = parts[2].strip().strip('"')

    try:
        node_lines = sec["Nodes"]
        nn = int(node_lines[0])
        raw = np.array([ln.split() for ln in node_lines[1 : nn + 1]], dtype=float)
        node_ids = raw[:, 0].astype(np.int64)
        coords = raw[:, 1:4]
        elems = []
        for ln in sec["Elements"][1 : int(sec["Elements"][0]) + 1]:
            parts = [int(t) for t in ln.split()]
            eid, etype, ntags = parts[0], parts[1], parts[2]
            tags = parts[3 : 3 + ntags]
            nodes = parts[3 + ntags :]
            elems.append((eid, etype, tags, nodes))
    except (ValueError, IndexError) as exc:
        raise MeshFormatError(f"{path}: malformed $Nodes/$Elements: {exc}") from exc

    for eid, etype, _, nodes in elems:
        if etype not in _ELEMENT_NODES:
            raise MeshFormatError(f"{path}: element {eid} has unsupported type {etype}")
        if len(nodes) != _ELEMENT_NODES[etype]:
            raise MeshFormatError(f"{path}: element {eid} has {len(nodes)} nodes")

    types = {e[1] for e in elems}
    if 4 in types:
        d = 3
    elif 2 in types:
        d = 2
    else:
        raise MeshFormatError(f"{path}: no triangle or tetrahedron elements")
    cell_type = 4 if d == 3 else 2
    facet_type = 2 if d == 3 else 1

    index = {nid: k for k, nid in enumerate(node_ids)}
    if d == 2:
        if np.any(np.abs(coords[:, 2]) > 0):
            raise MeshFormatError(f"{path}: 2-D mesh with non-zero z coordinates")
        coords = coords[:, :2]

    def remap(nodes):
        try:
            return [index[n] for n in nodes]
        except KeyError as exc:
            raise MeshFormatError(f"{path}: element references unknown node {exc}") from exc

    cells, labels, groups = [], [], {}
    for eid, etype, tags, nodes in elems:
        if etype == cell_type:
            cells.append(remap(nodes))
            labels.append(eid)
        elif etype == facet_type:
            tag = tags[0] if tags else 0
            name = phys_names.get((d - 1, tag), str(tag))
            groups.setdefault(name, []).append(remap(nodes))

    # keep only vertices used by cells; renumber contiguously
    cells = np.array(cells, dtype=np.int64)
    used = np.unique(cells)
    renum = np.full(len(coords), -1, dtype=np.int64)
    renum[used] = np.arange(len(used))
    groups = {k: renum[np.array(v, dtype=np.int64)] for k, v in groups.items()}
    for name, facets in groups.items():
        if np.any(facets < 0):
            raise MeshFormatError(f"{path}: mixed element dimensions, group {name!r} is detached")
    try:
        return Mesh.from_cells(coords[used], renum[cells], groups, cell_labels=labels)
    except MeshFormatError as exc:
        raise MeshFormatError(f"{path}: mixed element dimensions: {exc}") from exc


def write_gmsh(mesh, path):
    """Write ``mesh`` as MSH 2.2 ASCII with one physical group per boundary tag."""
    d = mesh.dim
    facet_type = 2 if d == 3 else 1
    cell_type = 4 if d == 3 else 2
    tags = mesh.boundary_tags
    out = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat", "$PhysicalNames", str(len(tags) + 1)]
    for k, name in enumerate(tags, start=1):
        out.append(f'{d - 1} {k} "{name}"')
    out.append(f'{d} {len(tags) + 1} "domain"')
    out += ["$EndPhysicalNames", "$Nodes", str(mesh.n_vertices)]
    for k, p in enumerate(mesh.points, start=1):
        xyz = list(p) + [0.0] * (3 - d)
        out.append(f"{k} " + " ".join(repr(float(x)) for x in xyz))
    out.append("$EndNodes")
    elems = []
    for k, (name, faces) in enumerate(tags.items(), start=1):
        for f in faces:
            nodes = " ".join(str(v + 1) for v in mesh.face_vertices[f])
            elems.append(f"{facet_type} 2 {k} {k} {nodes}")
    dom = len(tags) + 1
    for c in mesh.cells:
        elems.append(f"{cell_type} 2 {dom} {dom} " + " ".join(str(v + 1) for v in c))
    out += ["$Elements", str(len(elems))]
    out += [f"{k} {e}" for k, e in enumerate(elems, start=1)]
    out.append("$EndElements")
    Path(path).write_text("\n".join(out) + "\n")
