"""Discretized functional data on [0, 1].

Curves live on a shared grid of points with trapezoidal quadrature
weights, so the L2 inner product is a weighted dot product. Linear
operators are stored as plain value matrices ``A``; the quadrature
metric ``W = diag(weights)`` enters when an operator acts on a curve,
``(A f)(t_i) = sum_j w_j A[i, j] f(t_j)``. With this convention an
operator is self-adjoint exactly when its matrix is symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ContractError,
    GridMismatchError,
    InsufficientDataError,
    ParameterError,
)


def _frozen(values, dtype=float) -> np.ndarray:
    """Copy to a float array and make it read-only."""
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Grid:
    """Discretization of [0, 1] with positive quadrature weights summing to 1.

    Parameters
    ----------
    points : array-like of shape (p,)
        Strictly increasing, with ``points[0] == 0`` and ``points[-1] == 1``.
    weights : array-like of shape (p,)
        Positive quadrature weights summing to 1 (within 1e-12).
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weights", _frozen(self.weights))
        pts, w = self.points, self.weights
        if pts.ndim != 1 or pts.size < 2:
            raise ParameterError("grid needs at least two points")
        if w.shape != pts.shape:
            raise ParameterError("weights must match points in length")
        if not np.all(np.diff(pts) > 0):
            raise ParameterError("grid points must be strictly increasing")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise ParameterError("grid must start at 0 and end at 1")
        if not np.all(w > 0):
            raise ParameterError("quadrature weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ParameterError("quadrature weights must sum to 1")

    @classmethod
    def uniform(cls, size: int) -> "Grid":
        """Uniform grid of ``size`` points with trapezoidal weights."""
        if size < 2:
            raise ParameterError("grid needs at least two points")
        return cls.from_points(np.linspace(0.0, 1.0, size))

    @classmethod
    def from_points(cls, points) -> "Grid":
        """Grid on given points with trapezoidal weights (exact for piecewise-linear curves)."""
        pts = np.asarray(points, dtype=float)
        w = np.empty_like(pts)
        w[0] = (pts[1] - pts[0]) / 2.0
        w[-1] = (pts[-1] - pts[-2]) / 2.0
        w[1:-1] = (pts[2:] - pts[:-2]) / 2.0
        return cls(pts, w)

    @property
    def size(self) -> int:
        return self.points.size

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        steps = np.diff(self.points)
        return bool(np.allclose(steps, steps[0], rtol=rtol, atol=0.0))

    def matches(self, other: "Grid") -> bool:
        return self is other or (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )


def _require_same_grid(a: Grid, b: Grid):
    if not a.matches(b):
        raise GridMismatchError("operands live on different grids")


@dataclass(frozen=True, eq=False)
class Curve:
    """A function on [0, 1] represented by its values at the grid points."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape != (self.grid.size,):
            raise ParameterError("curve values must match the grid length")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("curve values must be finite")

    def norm(self) -> float:
        """L2 norm under the grid quadrature."""
        return float(np.sqrt(inner_product(self, self)))


@dataclass(frozen=True, eq=False)
class LinearOp:
    """Linear operator on curves, stored as its p-by-p value matrix.

    The action on a curve is ``(A f)(t_i) = sum_j w_j A[i, j] f(t_j)``;
    see :func:`apply`.
    """

    grid: Grid
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        p = self.grid.size
        if self.matrix.shape != (p, p):
            raise ParameterError("operator matrix must be p-by-p for the grid")
        if not np.all(np.isfinite(self.matrix)):
            raise ParameterError("operator entries must be finite")

    def __call__(self, f: Curve) -> Curve:
        return apply(self, f)


@dataclass(frozen=True, eq=False)
class Dataset:
    """An i.i.d. sample of curves with scalar responses.

    Parameters
    ----------
    grid : Grid
        Common grid of all curves.
    values : ndarray of shape (n, p)
        Row i holds the i-th curve's values at the grid points.
    responses : ndarray of shape (n,)
        Scalar responses.
    centered : bool
        Whether the pointwise sample mean has been removed. When True the
        column means must not exceed 1e-10 in absolute value.
    """

    grid: Grid
    values: np.ndarray
    responses: np.ndarray
    centered: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.atleast_2d(self.values)))
        object.__setattr__(self, "responses", _frozen(self.responses))
        n, p = self.values.shape
        if n < 2:
            raise InsufficientDataError("need at least two observations")
        if p != self.grid.size:
            raise ParameterError("curve values must match the grid length")
        if self.responses.shape != (n,):
            raise ParameterError("responses must be one per curve")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.responses))):
            raise ParameterError("dataset entries must be finite")
        if self.centered and np.abs(self.values.mean(axis=0)).max() > 1e-10:
            raise ContractError("dataset flagged centered but sample mean is not zero")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def curve(self, i: int) -> Curve:
        return Curve(self.grid, self.values[i])


def inner_product(a: Curve, b: Curve) -> float:
    """L2([0,1]) inner product by grid quadrature: sum_i w_i a(t_i) b(t_i)."""
    _require_same_grid(a.grid, b.grid)
    return float(np.dot(a.grid.weights * a.values, b.values))


def outer_product(x: Curve, y: Curve) -> LinearOp:
    """Rank-one operator h -> <x, h> y, with matrix[i, j] = y(t_i) x(t_j)."""
    _require_same_grid(x.grid, y.grid)
    return LinearOp(x.grid, np.outer(y.values, x.values))


def apply(op: LinearOp, f: Curve) -> Curve:
    """Apply an operator to a curve through the quadrature metric."""
    _require_same_grid(op.grid, f.grid)
    return Curve(op.grid, op.matrix @ (op.grid.weights * f.values))


def compose(a: LinearOp, b: LinearOp) -> LinearOp:
    """Operator composition a(b(.)); matrix is A W B."""
    _require_same_grid(a.grid, b.grid)
    return LinearOp(a.grid, a.matrix @ (a.grid.weights[:, None] * b.matrix))


def add(a: LinearOp, b: LinearOp) -> LinearOp:
    _require_same_grid(a.grid, b.grid)
    return LinearOp(a.grid, a.matrix + b.matrix)


def scale(c: float, a: LinearOp) -> LinearOp:
    return LinearOp(a.grid, float(c) * a.matrix)


def identity_operator(grid: Grid) -> LinearOp:
    """Identity in the quadrature metric: A[i, j] = delta_ij / w_j."""
    return LinearOp(grid, np.diag(1.0 / grid.weights))


def hs_norm(op: LinearOp) -> float:
    """Hilbert-Schmidt norm: sqrt(sum_ij w_i w_j A[i, j]^2)."""
    w = op.grid.weights
    return float(np.sqrt(np.einsum("i,j,ij->", w, w, op.matrix**2)))


def center(ds: Dataset) -> Dataset:
    """Subtract the pointwise sample mean from every curve."""
    mean = ds.values.mean(axis=0)
    return Dataset(ds.grid, ds.values - mean, ds.responses, centered=True)


def empirical_covariance(ds: Dataset) -> LinearOp:
    """Sample covariance operator n^{-1} sum_i X_i (tensor) X_i.

    Requires a centered dataset; the matrix entry (i, j) is
    ``n^{-1} sum_k X_k(t_i) X_k(t_j)``.
    """
    if not ds.centered:
        raise ContractError("empirical covariance requires a centered dataset")
    return LinearOp(ds.grid, ds.values.T @ ds.values / ds.n)
