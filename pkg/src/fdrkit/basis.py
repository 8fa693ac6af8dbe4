"""Orthonormal truncation bases and the truncated covariance machinery.

Both basis kinds (functional PCA and quadratic B-splines) yield a system
of curves orthonormal under the grid quadrature. The truncated
covariance restricts a covariance operator to the spanned subspace,
where it admits a bounded inverse and inverse square root; everything
downstream works in the D-dimensional coordinate frame these define.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from .exceptions import ContractError, ParameterError, RankError, SingularityError
from .fda import Curve, Grid, LinearOp

PCA = "pca"
BSPLINE = "bspline"

_SPLINE_DEGREE = 2  # quadratic B-splines


def _frozen(a):
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def fix_signs(rows: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Flip rows so the first entry with absolute value above tol is positive.

    Eigenvectors are defined up to sign; this makes results reproducible.
    """
    rows = np.array(rows, dtype=float)
    for row in rows:
        nz = np.flatnonzero(np.abs(row) > tol)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return rows


def orthonormalize(rows: np.ndarray, grid: Grid, passes: int = 2) -> np.ndarray:
    """Modified Gram-Schmidt in the quadrature inner product.

    Two passes keep the Gram residual at machine precision for
    well-conditioned inputs. Raises RankError on (numerically) dependent rows.
    """
    w = grid.weights
    out = np.array(rows, dtype=float)
    for _ in range(passes):
        for j in range(out.shape[0]):
            for k in range(j):
                out[j] -= np.dot(w * out[k], out[j]) * out[k]
            nrm = np.sqrt(np.dot(w * out[j], out[j]))
            if nrm < 1e-12:
                raise RankError("rows are numerically linearly dependent")
            out[j] /= nrm
    return out


@dataclass(frozen=True, eq=False)
class Basis:
    """Ordered orthonormal system of D curves on a grid.

    Parameters
    ----------
    grid : Grid
    functions : ndarray of shape (D, p)
        Row j holds the j-th basis function's grid values; rows are
        orthonormal under the quadrature inner product (within 1e-8).
    kind : {"pca", "bspline"}
    eigenvalues : ndarray of shape (D,), optional
        For PCA bases, the covariance eigenvalues (nonincreasing).
    """

    grid: Grid
    functions: np.ndarray
    kind: str
    eigenvalues: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "functions", _frozen(np.atleast_2d(self.functions)))
        if self.kind not in (PCA, BSPLINE):
            raise ParameterError(f"unknown basis kind {self.kind!r}")
        d, p = self.functions.shape
        if d < 1:
            raise ParameterError("basis needs at least one function")
        if p != self.grid.size:
            raise ParameterError("basis functions must match the grid length")
        gram = (self.functions * self.grid.weights) @ self.functions.T
        if np.abs(gram - np.eye(d)).max() > 1e-8:
            raise ContractError("basis functions are not orthonormal")
        if self.eigenvalues is not None:
            ev = _frozen(self.eigenvalues)
            object.__setattr__(self, "eigenvalues", ev)
            if ev.shape != (d,):
                raise ParameterError("need one eigenvalue per basis function")
            if np.any(np.diff(ev) > 0) or ev[-1] < -1e-10:
                raise ContractError("PCA eigenvalues must be nonincreasing and nonnegative")

    @property
    def size(self) -> int:
        return self.functions.shape[0]

    def curve(self, j: int) -> Curve:
        return Curve(self.grid, self.functions[j])

    def coordinates(self, values: np.ndarray) -> np.ndarray:
        """Quadrature inner products of curve rows with each basis function.

        ``values`` has shape (p,) or (n, p); the result has shape (D,) or (n, D).
        """
        return np.asarray(values) @ (self.functions * self.grid.weights).T

    def operator_coordinates(self, op: LinearOp) -> np.ndarray:
        """D-by-D coordinate matrix <phi_j, A phi_k> of an operator."""
        bw = self.functions * self.grid.weights
        return bw @ op.matrix @ bw.T

    def lift(self, coords: np.ndarray) -> LinearOp:
        """Operator on the full grid whose coordinate matrix is ``coords``.

        The lifted operator vanishes on the orthogonal complement.
        """
        return LinearOp(self.grid, self.functions.T @ coords @ self.functions)


def pca_basis(gamma_hat: LinearOp, n_components: int) -> Basis:
    """Leading eigenfunctions of a covariance operator.

    The eigenproblem is solved after symmetrizing with the quadrature
    metric, so eigenfunctions are orthonormal under the grid inner
    product and eigenvalues are sorted nonincreasing. Numerical rank is
    counted as eigenvalues above 1e-10 relative to the largest.

    Raises
    ------
    ContractError
        If the operator matrix is not symmetric.
    RankError
        If ``n_components`` exceeds the grid size or the numerical rank.
    """
    p = gamma_hat.grid.size
    mat = gamma_hat.matrix
    if np.abs(mat - mat.T).max() > 1e-10 * max(1.0, np.abs(mat).max()):
        raise ContractError("covariance operator must be symmetric")
    if not 1 <= n_components <= p:
        raise RankError(f"n_components must be in [1, {p}]")
    sw = np.sqrt(gamma_hat.grid.weights)
    sym = sw[:, None] * mat * sw[None, :]
    vals, vecs = np.linalg.eigh((sym + sym.T) / 2.0)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    rank = int(np.count_nonzero(vals > 1e-10 * max(vals[0], 0.0)))
    if n_components > rank:
        raise RankError(
            f"n_components={n_components} exceeds numerical rank {rank}"
        )
    funcs = (vecs[:, :n_components] / sw[:, None]).T
    return Basis(
        gamma_hat.grid,
        fix_signs(funcs),
        PCA,
        eigenvalues=np.maximum(vals[:n_components], 0.0),
    )


def bspline_design(grid: Grid, n_functions: int) -> np.ndarray:
    """Raw quadratic B-spline values at the grid points, shape (D, p).

    Uses a clamped knot vector with ``n_functions - 3`` equally spaced
    interior knots, so the rows form a partition of unity.
    """
    if n_functions < 3:
        raise ParameterError("quadratic B-splines need at least 3 functions")
    k = _SPLINE_DEGREE
    interior = np.linspace(0.0, 1.0, n_functions - k + 1)[1:-1]
    knots = np.concatenate([np.zeros(k + 1), interior, np.ones(k + 1)])
    design = BSpline.design_matrix(grid.points, knots, k, extrapolate=False)
    return design.toarray().T


def bspline_basis(grid: Grid, n_functions: int) -> Basis:
    """Orthonormalized quadratic B-spline basis with equally spaced knots."""
    raw = bspline_design(grid, n_functions)
    return Basis(grid, fix_signs(orthonormalize(raw, grid)), BSPLINE)


def projector(basis: Basis) -> LinearOp:
    """Orthogonal projector onto the basis span: sum_j phi_j (tensor) phi_j."""
    return LinearOp(basis.grid, basis.functions.T @ basis.functions)


@dataclass(frozen=True, eq=False)
class TruncatedCovariance:
    """A covariance operator restricted to a basis span, with inverses.

    Attributes
    ----------
    basis : Basis
    covariance : LinearOp
        The projected operator Pi Gamma Pi.
    inverse : LinearOp
        Its pseudo-inverse: identity on the span, zero on the complement.
    inverse_sqrt : LinearOp
        Pseudo-inverse square root.
    min_eigenvalue : float
        Smallest retained eigenvalue of the coordinate matrix.
    coords, inverse_coords, inverse_sqrt_coords : ndarray (D, D)
        The same three operators in basis coordinates; the estimator
        pipelines work here.
    """

    basis: Basis
    covariance: LinearOp
    inverse: LinearOp
    inverse_sqrt: LinearOp
    min_eigenvalue: float
    coords: np.ndarray
    inverse_coords: np.ndarray
    inverse_sqrt_coords: np.ndarray

    def __post_init__(self):
        for name in ("coords", "inverse_coords", "inverse_sqrt_coords"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))


def truncate_and_invert(
    gamma_hat: LinearOp, basis: Basis, ridge: float = 1e-12
) -> TruncatedCovariance:
    """Project a covariance to the basis span and build its pseudo-inverses.

    The D-by-D coordinate matrix is eigendecomposed; all D eigenpairs
    are retained and inverted. If the smallest eigenvalue does not
    exceed ``ridge`` the operator is reported singular.

    Raises
    ------
    SingularityError
        Smallest coordinate eigenvalue <= ridge; carries that eigenvalue.
    """
    mat = gamma_hat.matrix
    if np.abs(mat - mat.T).max() > 1e-10 * max(1.0, np.abs(mat).max()):
        raise ContractError("covariance operator must be symmetric")
    coords = basis.operator_coordinates(gamma_hat)
    coords = (coords + coords.T) / 2.0
    vals, vecs = np.linalg.eigh(coords)
    t_min = float(vals.min())
    if t_min <= ridge:
        raise SingularityError(
            f"truncated covariance is numerically singular "
            f"(min eigenvalue {t_min:.3e} <= ridge {ridge:.3e})",
            min_eigenvalue=t_min,
        )
    inv = (vecs / vals) @ vecs.T
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.T
    return TruncatedCovariance(
        basis=basis,
        covariance=basis.lift(coords),
        inverse=basis.lift(inv),
        inverse_sqrt=basis.lift(inv_sqrt),
        min_eigenvalue=t_min,
        coords=coords,
        inverse_coords=inv,
        inverse_sqrt_coords=inv_sqrt,
    )
