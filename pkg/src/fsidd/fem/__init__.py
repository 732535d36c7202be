"""Triangular finite elements: spaces, quadrature, assembly and norms."""

from .assembly import (
    apply_essential_bc,
    assemble_boundary_load,
    assemble_form,
    assemble_interface_load,
    assemble_load,
    interpolate,
)
from .norms import error_norms, point_values
from .quadrature import line_rule, triangle_rule
from .space import INTERFACE_TAG, FeSpace, build_space

__all__ = [
    "FeSpace",
    "INTERFACE_TAG",
    "apply_essential_bc",
    "assemble_boundary_load",
    "assemble_form",
    "assemble_interface_load",
    "assemble_load",
    "build_space",
    "error_norms",
    "interpolate",
    "line_rule",
    "point_values",
    "triangle_rule",
]
