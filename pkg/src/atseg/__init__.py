"""Variational image segmentation via Ambrosio-Tortorelli phase fields.

Implements the classical first-order edge penalty and a second-order
(Laplacian) variant, an alternating-minimization driver, synthetic phantoms,
edge post-processing, and bit-exact file I/O.
"""

from .grid import Grid2D, ScalarField, VectorField2, grad_forward, div_adjoint, laplacian, bilaplacian
from .energy import ModelKind, BoundaryKind, ModelParams, EnergyBreakdown, total_energy
from .altmin import SegmentationResult, IterationReport, run

__all__ = [
    "Grid2D",
    "ScalarField",
    "VectorField2",
    "grad_forward",
    "div_adjoint",
    "laplacian",
    "bilaplacian",
    "ModelKind",
    "BoundaryKind",
    "ModelParams",
    "EnergyBreakdown",
    "total_energy",
    "SegmentationResult",
    "IterationReport",
    "run",
]
