import numpy as np
import pytest

from vcfv.mesh import generate_box


def msh_text(points, cells, facets=(), names=None):
    """Minimal MSH 2.2 ASCII text: ``cells`` are triangles (3 ids) or tets (4 ids)."""
    d = len(cells[0]) - 1
    lines = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat"]
    if names:
        lines += ["$PhysicalNames", str(len(names))]
        lines += [f'{d - 1} {tag} "{name}"' for tag, name in names.items()]
        lines.append("$EndPhysicalNames")
    lines += ["$Nodes", str(len(points))]
    for k, p in enumerate(points, start=1):
        xyz = list(p) + [0.0] * (3 - len(p))
        lines.append(f"{k} " + " ".join(str(float(x)) for x in xyz))
    lines.append("$EndNodes")
    elems = [(2 if d == 3 else 1, tag, f) for tag, f in facets]
    elems += [(4 if d == 3 else 2, 99, c) for c in cells]
    lines += ["$Elements", str(len(elems))]
    for k, (etype, tag, nodes) in enumerate(elems, start=1):
        lines.append(f"{k} {etype} 2 {tag} {tag} " + " ".join(str(v + 1) for v in nodes))
    lines.append("$EndElements")
    return "\n".join(lines) + "\n"


@pytest.fixture
def write_msh(tmp_path):
    def _write(points, cells, name="mesh.msh", **kw):
        path = tmp_path / name
        path.write_text(msh_text(points, cells, **kw))
        return path

    return _write


@pytest.fixture(scope="session")
def square_mesh():
    return generate_box(2, (1.0, 1.0), (8, 8), split="alternate")


@pytest.fixture(scope="session")
def cube_mesh():
    return generate_box(3, (1.0, 1.0, 1.0), (4, 4, 4), split="kuhn")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary ----------------------------------------------------------------

ACCEPTANCE = {}


def record(criterion, ok, detail, seconds):
    """Store one acceptance line; printed at the end of the session."""
    ACCEPTANCE[criterion] = (bool(ok), detail, seconds)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail, seconds = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.1f} s]")
