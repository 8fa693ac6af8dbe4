"""Estimators of the effective dimension-reduction (EDR) directions.

Three methods share one skeleton: center the sample, build a truncation
basis (functional PCA or B-splines), restrict the empirical covariance
to it, form a method-specific moment operator, and eigendecompose the
whitened coordinate matrix

    S = C_D^(-1/2) G C_D^(-1/2)

whose leading eigenvectors, mapped back through C_D^(-1/2), give the
directions. The whitened form has the same eigenvalues as the raw
preconditioned operator C_D^(-1) G but is symmetric, so the
eigenproblem is real and stable.

Moment operators G per method:

- kernel FAVE:  2 * cov(conditional mean) + quadratic conditional
  variance - empirical covariance,
- kernel FSIR:  cov(conditional mean),
- sliced FSAVE: average over response slices of
  (C_D - V_slice) C_D^(-1) (C_D - V_slice).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fda
from .basis import (
    BSPLINE,
    PCA,
    Basis,
    TruncatedCovariance,
    bspline_basis,
    fix_signs,
    pca_basis,
    truncate_and_invert,
)
from .exceptions import (
    EstimationError,
    FdrkitError,
    ParameterError,
    SlicingError,
)
from .fda import Curve, Dataset, LinearOp, center, empirical_covariance
from .smoothing import KernelSmoother, cv_bandwidth, get_kernel

FAVE_METHOD = "fave"
FSIR_METHOD = "fsir"
FSAVE_METHOD = "fsave"

METHODS = (FAVE_METHOD, FSIR_METHOD, FSAVE_METHOD)


@dataclass(frozen=True)
class EdrConfig:
    """Shared estimator configuration.

    Parameters
    ----------
    n_components : int
        Truncation dimension D of the basis subspace.
    n_directions : int
        Number K of EDR directions to extract (K <= D).
    basis : {"pca", "bspline"}
    kernel : {"epanechnikov2", "quartic4"}
        Kernel for the smoothing-based methods (ignored by FSAVE).
        Epanechnikov is the default: it is nonnegative with peak value
        below 1, so local moment estimates stay proper weighted moments.
    bandwidth : float or "cv"
        Fixed bandwidth, or "cv" for least-squares cross-validation.
    bandwidth_grid : ndarray, optional
        Candidate bandwidths for CV; a data-driven default when None.
    clip_cap : float, optional
        Cap of the density clipping floor. When None (the default) the
        cap adapts to the response scale as 0.05 / sd(y): density
        height scales inversely with the response scale, so a fixed cap
        would swallow the entire density of a wide-ranging response and
        shrink every conditional moment toward zero.
    clip_exponent : float, optional
        Exponent of the n^(-c) part of the floor; per-kernel default.
    ridge : float
        Singularity floor for the truncated covariance.
    """

    n_components: int = 4
    n_directions: int = 2
    basis: str = PCA
    kernel: str = "epanechnikov2"
    bandwidth: float | str = "cv"
    bandwidth_grid: np.ndarray | None = None
    clip_cap: float | None = None
    clip_exponent: float | None = None
    ridge: float = 1e-12

    def __post_init__(self):
        if self.basis not in (PCA, BSPLINE):
            raise ParameterError(f"unknown basis kind {self.basis!r}")
        if not 1 <= self.n_directions <= self.n_components:
            raise ParameterError("need 1 <= n_directions <= n_components")
        if isinstance(self.bandwidth, str) and self.bandwidth != "cv":
            raise ParameterError("bandwidth must be a positive number or 'cv'")
        if not isinstance(self.bandwidth, str) and self.bandwidth <= 0:
            raise ParameterError("bandwidth must be a positive number or 'cv'")


@dataclass(frozen=True, eq=False)
class EdrEstimate:
    """Estimated EDR directions with eigenvalues and diagnostics.

    Attributes
    ----------
    grid : Grid
    directions : ndarray of shape (K, p)
        Unit-norm direction curves, leading eigenvalue first.
    eigenvalues : ndarray of shape (K,)
        Eigenvalues of the whitened moment operator, nonincreasing.
    min_eigenvalue : float
        Smallest retained eigenvalue of the truncated covariance.
    method : str
        One of "fave", "fsir", "fsave".
    diagnostics : dict
        Bandwidth, clipping floor, clipping-active count, dimensions.
    """

    grid: fda.Grid
    directions: np.ndarray
    eigenvalues: np.ndarray
    min_eigenvalue: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        directions = np.array(np.atleast_2d(self.directions), dtype=float)
        directions.setflags(write=False)
        object.__setattr__(self, "directions", directions)
        eigenvalues = np.array(self.eigenvalues, dtype=float)
        eigenvalues.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        k, p = self.directions.shape
        if p != self.grid.size or self.eigenvalues.shape != (k,):
            raise ParameterError("directions and eigenvalues must be consistent")
        w = self.grid.weights
        norms = np.sqrt(np.einsum("j,ij,ij->i", w, self.directions, self.directions))
        if np.abs(norms - 1.0).max() > 1e-8:
            raise ParameterError("directions must have unit norm")
        if np.any(np.diff(self.eigenvalues) > 1e-12):
            raise ParameterError("eigenvalues must be nonincreasing")

    @property
    def n_directions(self) -> int:
        return self.directions.shape[0]

    def direction(self, j: int) -> Curve:
        return Curve(self.grid, self.directions[j])

    def indices(self, values: np.ndarray) -> np.ndarray:
        """Inner products <direction_j, x_i> for curve rows; shape (n, K)."""
        return np.asarray(values) @ (self.directions * self.grid.weights).T


def conditional_mean_covariance(smoother: KernelSmoother) -> LinearOp:
    """Average of r(Y_i) (tensor) r(Y_i) over the sample: the inverse-regression covariance."""
    ds = smoother.dataset
    rows = np.array(
        [smoother.conditional_mean(y).values for y in ds.responses]
    )
    return LinearOp(ds.grid, rows.T @ rows / ds.n)


def variance_quadratic(
    smoother: KernelSmoother, trunc: TruncatedCovariance
) -> LinearOp:
    """Average of C(Y_i) C_D^(-1) C(Y_i): the quadratic conditional-variance term.

    Symmetric PSD by construction (each summand is A P A with P PSD).
    """
    ds = smoother.dataset
    w = ds.grid.weights
    middle = w[:, None] * trunc.inverse.matrix * w[None, :]
    acc = np.zeros((ds.grid.size, ds.grid.size))
    for y in ds.responses:
        cv = smoother.conditional_covariance(y).matrix
        acc += cv @ middle @ cv
    return LinearOp(ds.grid, acc / ds.n)


def interest_operator(
    smoother: KernelSmoother, trunc: TruncatedCovariance
) -> tuple[LinearOp, LinearOp]:
    """The preconditioned interest operator and its raw moment combination.

    Returns ``(C_D^(-1) G, G)`` with
    G = 2 cov(conditional mean) + quadratic variance - empirical covariance.
    The combination G is what the whitened eigenproblem consumes.
    """
    combined = fda.add(
        fda.add(
            fda.scale(2.0, conditional_mean_covariance(smoother)),
            variance_quadratic(smoother, trunc),
        ),
        fda.scale(-1.0, empirical_covariance(smoother.dataset)),
    )
    return fda.compose(trunc.inverse, combined), combined


def extract_directions(
    combined: LinearOp,
    trunc: TruncatedCovariance,
    n_directions: int,
    method: str = FAVE_METHOD,
    diagnostics: dict | None = None,
) -> EdrEstimate:
    """Leading directions of the whitened moment operator.

    Forms S = C_D^(-1/2) G C_D^(-1/2) in basis coordinates, takes the
    ``n_directions`` eigenpairs with largest algebraic eigenvalues, maps
    eigenvectors back through C_D^(-1/2), and normalizes to unit norm.
    Reported eigenvalues are those of S.
    """
    core = trunc.basis.operator_coordinates(combined)
    return _extract_from_coordinates(core, trunc, n_directions, method, diagnostics)


def _extract_from_coordinates(core, trunc, n_directions, method, diagnostics=None):
    basis = trunc.basis
    if not 1 <= n_directions <= basis.size:
        raise ParameterError("n_directions must be between 1 and the basis size")
    inv_sqrt = trunc.inverse_sqrt_coords
    whitened = inv_sqrt @ core @ inv_sqrt
    whitened = (whitened + whitened.T) / 2.0
    vals, vecs = np.linalg.eigh(whitened)
    top = slice(-1, -(n_directions + 1), -1)
    coords = inv_sqrt @ vecs[:, top]
    rows = coords.T @ basis.functions
    w = basis.grid.weights
    norms = np.sqrt(np.einsum("j,ij,ij->i", w, rows, rows))
    rows = fix_signs(rows / norms[:, None])
    return EdrEstimate(
        grid=basis.grid,
        directions=rows,
        eigenvalues=vals[top],
        min_eigenvalue=trunc.min_eigenvalue,
        method=method,
        diagnostics=dict(diagnostics or {}),
    )


def _staged(stage):
    """Decorator-free stage wrapper: re-raise library errors with a stage tag."""

    class _Stage:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, FdrkitError):
                raise EstimationError(stage, exc) from exc
            return False

    return _Stage()


def _prepare(dataset: Dataset, config: EdrConfig):
    with _staged("center"):
        ds = dataset if dataset.centered else center(dataset)
    with _staged("covariance"):
        cov = empirical_covariance(ds)
    with _staged("basis"):
        if config.basis == PCA:
            basis = pca_basis(cov, config.n_components)
        else:
            basis = bspline_basis(ds.grid, config.n_components)
    with _staged("truncation"):
        trunc = truncate_and_invert(cov, basis, config.ridge)
    return ds, trunc


def _smoothed_moments(ds: Dataset, config: EdrConfig, trunc: TruncatedCovariance):
    """Coordinate-frame moment matrices for the kernel methods.

    Returns (cov_mean, quadratic, diagnostics): the coordinate matrices
    of the inverse-regression covariance and the quadratic variance
    term, computed by projecting every curve onto the basis once.
    """
    kernel = get_kernel(config.kernel)
    with _staged("bandwidth"):
        if config.bandwidth == "cv":
            h = cv_bandwidth(ds, kernel, config.bandwidth_grid)
        else:
            h = float(config.bandwidth)
    with _staged("smoothing"):
        cap = config.clip_cap
        if cap is None:
            sd = float(np.std(ds.responses, ddof=1))
            cap = 0.05 / sd if sd > 0 else 0.05
        smoother = KernelSmoother(
            ds,
            kernel,
            bandwidth=h,
            clip_cap=cap,
            clip_exponent=config.clip_exponent,
        )
        ys = ds.responses
        n = ds.n
        coords = trunc.basis.coordinates(ds.values)  # (n, D)
        kw = kernel((ys[None, :] - ys[:, None]) / h) / (n * h)  # (n, n)
        dens = kw.sum(axis=1)
        clipped = np.maximum(smoother.clip_floor, dens)
        cond_mean = (kw @ coords) / clipped[:, None]  # (n, D)
        second = np.einsum("ij,jk,jl->ikl", kw, coords, coords)
        second /= clipped[:, None, None]
        cond_cov = second - cond_mean[:, :, None] * cond_mean[:, None, :]
        cov_mean = cond_mean.T @ cond_mean / n
        quadratic = (
            np.einsum("ikl,lm,imn->kn", cond_cov, trunc.inverse_coords, cond_cov) / n
        )
        diagnostics = {
            "bandwidth": h,
            "bandwidth_source": "cv" if config.bandwidth == "cv" else "fixed",
            "clip_floor": smoother.clip_floor,
            "clipping_active": int(np.count_nonzero(dens < smoother.clip_floor)),
        }
    return cov_mean, quadratic, diagnostics


def slice_boundaries(n: int, n_slices: int) -> list[tuple[int, int]]:
    """Near-equal-count slice index ranges; remainders go to the earliest slices."""
    if n_slices < 2:
        raise ParameterError("need at least two slices")
    base, rem = divmod(n, n_slices)
    bounds, start = [], 0
    for s in range(n_slices):
        size = base + (1 if s < rem else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


def _sliced_moments(ds: Dataset, trunc: TruncatedCovariance, n_slices: int):
    """FSAVE coordinate moment matrix from near-equal-count response slices."""
    with _staged("slicing"):
        order = np.argsort(ds.responses, kind="stable")
        coords = trunc.basis.coordinates(ds.values)[order]
        total = trunc.coords
        acc = np.zeros_like(total)
        for start, stop in slice_boundaries(ds.n, n_slices):
            block = coords[start:stop]
            if block.shape[0] < 2:
                raise SlicingError(
                    f"slice [{start}:{stop}] has fewer than two observations"
                )
            centered = block - block.mean(axis=0)
            slice_cov = centered.T @ centered / block.shape[0]
            diff = total - slice_cov
            acc += diff @ trunc.inverse_coords @ diff
        return acc / n_slices


def fave(dataset: Dataset, config: EdrConfig | None = None) -> EdrEstimate:
    """Kernel FAVE estimate of the EDR directions."""
    config = config or EdrConfig()
    ds, trunc = _prepare(dataset, config)
    cov_mean, quadratic, diagnostics = _smoothed_moments(ds, config, trunc)
    core = 2.0 * cov_mean + quadratic - trunc.coords
    with _staged("extraction"):
        return _extract_from_coordinates(
            core, trunc, config.n_directions, FAVE_METHOD,
            _with_common(diagnostics, config),
        )


def fsir(dataset: Dataset, config: EdrConfig | None = None) -> EdrEstimate:
    """Kernel FSIR estimate: eigenstructure of the inverse-regression covariance."""
    config = config or EdrConfig()
    ds, trunc = _prepare(dataset, config)
    cov_mean, _, diagnostics = _smoothed_moments(ds, config, trunc)
    with _staged("extraction"):
        return _extract_from_coordinates(
            cov_mean, trunc, config.n_directions, FSIR_METHOD,
            _with_common(diagnostics, config),
        )


def fsave(dataset: Dataset, n_slices: int, config: EdrConfig | None = None) -> EdrEstimate:
    """Sliced FSAVE estimate from near-equal-count response slices."""
    config = config or EdrConfig()
    ds, trunc = _prepare(dataset, config)
    core = _sliced_moments(ds, trunc, n_slices)
    with _staged("extraction"):
        diagnostics = _with_common({"n_slices": int(n_slices)}, config)
        return _extract_from_coordinates(
            core, trunc, config.n_directions, FSAVE_METHOD, diagnostics
        )


def _with_common(diagnostics: dict, config: EdrConfig) -> dict:
    out = dict(diagnostics)
    out.update(
        n_components=config.n_components,
        n_directions=config.n_directions,
        basis=config.basis,
    )
    return out


def estimate(
    dataset: Dataset,
    method: str,
    config: EdrConfig | None = None,
    n_slices: int | None = None,
) -> EdrEstimate:
    """Dispatch to one of the estimators by method name."""
    if method == FAVE_METHOD:
        return fave(dataset, config)
    if method == FSIR_METHOD:
        return fsir(dataset, config)
    if method == FSAVE_METHOD:
        if n_slices is None:
            raise ParameterError("method 'fsave' requires n_slices")
        return fsave(dataset, n_slices, config)
    raise ParameterError(f"unknown method {method!r}; choose from {METHODS}")
