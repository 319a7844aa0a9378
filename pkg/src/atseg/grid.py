"""Rectangular grid, scalar/vector fields, and the discrete differential operators.

The gradient uses one-sided (forward) differences with a zero at the last
column/row, the divergence is its exact negative adjoint in the h^2-weighted
inner product, and the Laplacian is the composition of the two.  This makes
every operator built from them symmetric by construction, which the solvers
rely on for exact energy descent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidInputError


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid: nx columns, ny rows, spacing h in both directions."""

    nx: int
    ny: int
    h: float

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise InvalidInputError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")
        if not (self.h > 0 and np.isfinite(self.h)):
            raise InvalidInputError(f"grid spacing must be positive, got {self.h}")

    @classmethod
    def for_image(cls, nx: int, ny: int) -> "Grid2D":
        """Grid whose longer side spans [0, 1]: h = 1/(max(nx, ny) - 1)."""
        if max(nx, ny) < 2:
            raise InvalidInputError(f"grid must be at least 2x2, got {nx}x{ny}")
        return cls(nx, ny, 1.0 / (max(nx, ny) - 1))

    @property
    def npoints(self) -> int:
        return self.nx * self.ny

    @property
    def width(self) -> float:
        return (self.nx - 1) * self.h

    @property
    def height(self) -> float:
        return (self.ny - 1) * self.h

    def xcoords(self) -> np.ndarray:
        return np.arange(self.nx) * self.h

    def ycoords(self) -> np.ndarray:
        return np.arange(self.ny) * self.h


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalarField:
    """Real-valued function sampled on a grid; values flat, row-major (i*nx + j)."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size != self.grid.npoints:
            raise InvalidInputError(
                f"value count {v.size} does not match grid {self.grid.nx}x{self.grid.ny}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("field values must be finite")
        object.__setattr__(self, "values", _freeze(v))

    @classmethod
    def from_matrix(cls, grid: Grid2D, a: np.ndarray) -> "ScalarField":
        a = np.asarray(a, dtype=float)
        if a.shape != (grid.ny, grid.nx):
            raise InvalidInputError(f"expected shape {(grid.ny, grid.nx)}, got {a.shape}")
        return cls(grid, a.reshape(-1).copy())

    @classmethod
    def constant(cls, grid: Grid2D, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.npoints, float(value)))

    def as_matrix(self) -> np.ndarray:
        """Read-only (ny, nx) view of the values."""
        return self.values.reshape(self.grid.ny, self.grid.nx)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class VectorField2:
    """Two-component field on a grid; components stored like ScalarField values."""

    grid: Grid2D
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        for name in ("x", "y"):
            c = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if c.size != self.grid.npoints:
                raise InvalidInputError(f"component {name} has wrong length {c.size}")
            if not np.all(np.isfinite(c)):
                raise InvalidInputError("vector field values must be finite")
            object.__setattr__(self, name, _freeze(c))

    def x_matrix(self) -> np.ndarray:
        return self.x.reshape(self.grid.ny, self.grid.nx)

    def y_matrix(self) -> np.ndarray:
        return self.y.reshape(self.grid.ny, self.grid.nx)


def same_grid(*fields) -> Grid2D:
    grids = {f.grid for f in fields}
    if len(grids) != 1:
        raise GridMismatchError(f"fields live on different grids: {grids}")
    return fields[0].grid


def dot(f: ScalarField, g: ScalarField) -> float:
    """Discrete L2 inner product <f, g> = h^2 * sum(f * g)."""
    grid = same_grid(f, g)
    return grid.h**2 * float(np.dot(f.values, g.values))


def dot_vec(p: VectorField2, q: VectorField2) -> float:
    grid = same_grid(p, q)
    return grid.h**2 * float(np.dot(p.x, q.x) + np.dot(p.y, q.y))


def grad_forward(f: ScalarField) -> VectorField2:
    """Forward-difference gradient; last column (x) / last row (y) set to zero."""
    g = f.grid
    a = f.as_matrix()
    gx = np.zeros((g.ny, g.nx))
    gy = np.zeros((g.ny, g.nx))
    gx[:, :-1] = (a[:, 1:] - a[:, :-1]) / g.h
    gy[:-1, :] = (a[1:, :] - a[:-1, :]) / g.h
    return VectorField2(g, gx.reshape(-1), gy.reshape(-1))


def div_adjoint(p: VectorField2) -> ScalarField:
    """Divergence defined as the exact negative adjoint of grad_forward.

    The last column of p.x and last row of p.y are never read: grad_forward
    writes zeros there, and the adjoint of a zero row is empty.
    """
    g = p.grid
    px = p.x_matrix()
    py = p.y_matrix()
    d = np.zeros((g.ny, g.nx))
    d[:, :-1] += px[:, :-1]
    d[:, 1:] -= px[:, :-1]
    d[:-1, :] += py[:-1, :]
    d[1:, :] -= py[:-1, :]
    return ScalarField(g, d.reshape(-1) / g.h)


def laplacian(f: ScalarField) -> ScalarField:
    """Five-point Laplacian with mirrored (Neumann) boundary: div_adjoint(grad_forward(f))."""
    return div_adjoint(grad_forward(f))


def bilaplacian(f: ScalarField) -> ScalarField:
    """Laplacian applied twice; symmetric positive semidefinite as L^T L."""
    return laplacian(laplacian(f))
