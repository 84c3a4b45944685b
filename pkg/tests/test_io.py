import json
import logging

import numpy as np
import pytest

from vcfv.config import ProbeSpec
from vcfv.io import CellLocator, Snapshot, make_snapshot, probe_points, sample_line, write_line_probe, write_summary, write_vtk
from vcfv.mesh import generate_box
from vcfv.physics import GasModel, prim_to_cons
from vcfv.recon import ReconConfig
from vcfv.solver import BoundaryCondition, Discretization, FieldSet, SchemeConfig


def _parse_vtk(text):
    lines = text.splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0"
    assert lines[2] == "ASCII"
    assert lines[3] == "DATASET UNSTRUCTURED_GRID"
    n_points = int(lines[4].split()[1])
    k = 5 + n_points
    n_cells, size = map(int, lines[k].split()[1:])
    cells = [list(map(int, ln.split())) for ln in lines[k + 1 : k + 1 + n_cells]]
    assert sum(len(c) for c in cells) == size
    k += 1 + n_cells
    types = [int(t) for t in lines[k + 1 : k + 1 + n_cells]]
    return n_points, cells, types, lines[k + 1 + n_cells :]


def test_vtk_two_cell_square(tmp_path):
    mesh = generate_box(2, (1.0, 1.0), (1, 1))
    snap = Snapshot(0.5, 3, {"u": np.array([1.0, 2.0])})
    path = write_vtk(mesh, snap, tmp_path / "out" / "s.vtk")
    n_points, cells, types, rest = _parse_vtk(path.read_text())
    assert n_points == 4
    assert [c[0] for c in cells] == [3, 3]
    assert types == [5, 5]
    assert rest[0] == "CELL_DATA 2"
    assert rest[1] == "SCALARS u double 1"
    assert [float(v) for v in rest[3:5]] == [1.0, 2.0]
    assert not list((tmp_path / "out").glob("*.tmp"))


def _euler_disc(mesh):
    bcs = {t: BoundaryCondition(t, "slip_wall") for t in mesh.tag_names}
    return Discretization(mesh, SchemeConfig(GasModel(), ReconConfig("upwind", True, mesh.dim), "roe", "consistent_shepard", bcs))


def test_euler_snapshot_arrays(tmp_path):
    mesh = generate_box(3, (1.0, 1.0, 1.0), (1, 1, 1), split="kuhn")
    disc = _euler_disc(mesh)
    U = np.tile(prim_to_cons(np.array([1.0, 0.1, 0.2, 0.3, 2.0])), (mesh.n_cells, 1))
    snap = make_snapshot(disc, FieldSet(U), with_vertices=True)
    assert list(snap.cell_fields) == ["density", "velocity", "pressure"]
    np.testing.assert_allclose(snap.vertex_fields["pressure"], 2.0)
    text = write_vtk(mesh, snap, tmp_path / "e.vtk").read_text()
    assert "SCALARS density double 1" in text
    assert "VECTORS velocity double" in text
    assert "POINT_DATA 8" in text
    assert "\n10\n" in text
    with pytest.raises(ValueError, match="available"):
        make_snapshot(disc, FieldSet(U), names=("temperature",))


def test_2d_vectors_are_padded(tmp_path):
    mesh = generate_box(2, (1.0, 1.0), (1, 1))
    snap = Snapshot(0.0, 0, {"velocity": np.array([[1.0, 2.0], [3.0, 4.0]])})
    text = write_vtk(mesh, snap, tmp_path / "v.vtk").read_text()
    assert "1.0 2.0 0.0" in text


def test_probe_single_sample():
    mesh = generate_box(2, (2.0, 1.0), (4, 2))
    snap = Snapshot(0.0, 0, {"u": np.arange(mesh.n_cells, dtype=float)})
    header, data = sample_line(mesh, snap, (0.0, 0.5), (1.0, 0.0), 1)
    assert header == ["s", "x", "y", "z", "u"]
    assert data.shape == (1, 5)
    assert data[0, 1] == pytest.approx(1.0)


def test_probe_points_are_located_exactly():
    mesh = generate_box(3, (1.0, 1.0, 1.0), (3, 3, 3), split="kuhn", perturb=0.2, seed=5)
    pts = np.random.default_rng(0).uniform(0.01, 0.99, size=(200, 3))
    cells, found = CellLocator(mesh).locate(pts)
    assert found.all()
    for p, c in zip(pts, cells):
        verts = mesh.points[mesh.cells[c]]
        lam = np.linalg.solve((verts[1:] - verts[0]).T, p - verts[0])
        assert lam.min() >= -1e-9 and lam.sum() <= 1 + 1e-9


def test_radial_probe_starts_at_point():
    mesh = generate_box(3, (2.0, 2.0, 2.0), (2, 2, 2), split="kuhn", origin=(-1.0, -1.0, -1.0))
    s, pts = probe_points(mesh, np.zeros(3), np.ones(3), 10, radial=True)
    assert s.min() > 0
    assert s.max() < np.sqrt(3)
    np.testing.assert_allclose(pts[:, 0], pts[:, 1])


def test_probe_outside_domain_warns(caplog):
    mesh = generate_box(2, (1.0, 1.0), (2, 2))
    snap = Snapshot(0.0, 0, {"u": np.zeros(mesh.n_cells)})
    with caplog.at_level(logging.WARNING):
        _, data = sample_line(mesh, snap, (0.0, 5.0), (1.0, 0.0), 10)
    assert data.shape[0] == 0
    assert "misses" in caplog.text


def test_probe_csv_and_summary(tmp_path):
    mesh = generate_box(2, (1.0, 1.0), (2, 2))
    snap = Snapshot(0.0, 0, {"density": np.ones(mesh.n_cells), "velocity": np.zeros((mesh.n_cells, 2))})
    write_line_probe(mesh, snap, ProbeSpec("diag", (0.0, 0.0), (1.0, 1.0), 5), tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "s,x,y,z,density,velocity_x,velocity_y"
    assert len(lines) == 6
    write_summary(tmp_path / "summary.json", {"steps": 3})
    assert json.loads((tmp_path / "summary.json").read_text()) == {"steps": 3}
