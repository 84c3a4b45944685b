"""Vertex-centroid finite volume schemes on triangle and tetrahedral meshes."""

from .errors import (
    ConfigError,
    GeometryError,
    InterpolationError,
    MeshFormatError,
    PositivityError,
    StepError,
    VcfvError,
)
from .interp import StencilSet, build_all_stencils, interpolate_field
from .mesh import Mesh, generate_box, load_gmsh, make_periodic, validate_mesh, write_gmsh
from .physics import GasModel, ScalarModel
from .recon import FaceInput, ReconConfig, reconstruct
from .solver import BoundaryCondition, Discretization, FieldSet, SchemeConfig, TimeControls, integrate, run

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "ConfigError",
    "Discretization",
    "FaceInput",
    "FieldSet",
    "GasModel",
    "GeometryError",
    "InterpolationError",
    "Mesh",
    "MeshFormatError",
    "PositivityError",
    "ReconConfig",
    "ScalarModel",
    "SchemeConfig",
    "StencilSet",
    "StepError",
    "TimeControls",
    "VcfvError",
    "build_all_stencils",
    "generate_box",
    "integrate",
    "interpolate_field",
    "load_gmsh",
    "make_periodic",
    "reconstruct",
    "run",
    "validate_mesh",
    "write_gmsh",
]
