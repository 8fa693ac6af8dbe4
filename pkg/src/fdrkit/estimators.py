"""Scikit-learn style wrappers around the EDR estimators.

Each estimator takes a matrix of discretized curves ``X`` of shape
(n_samples, n_points) plus a scalar response vector ``y``, fits the
corresponding functional dimension-reduction method, and exposes the
fitted directions. ``transform`` maps curves to their index values
<direction_j, x_i> under the grid quadrature, so the estimators compose
with ordinary sklearn pipelines.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .basis import PCA
from .edr import EdrConfig, FAVE_METHOD, FSAVE_METHOD, FSIR_METHOD, estimate
from .exceptions import ParameterError
from .fda import Dataset, Grid


class _FunctionalEdrEstimator(BaseEstimator, TransformerMixin):
    """Shared fit/transform machinery; subclasses pick the method."""

    _method: str = ""

    def __init__(self, n_directions=2, n_components=4, basis=PCA, ridge=1e-12, grid=None):
        self.n_directions = n_directions
        self.n_components = n_components
        self.basis = basis
        self.ridge = ridge
        self.grid = grid

    def _config(self) -> EdrConfig:
        return EdrConfig(
            n_components=self.n_components,
            n_directions=self.n_directions,
            basis=self.basis,
            ridge=self.ridge,
        )

    def _n_slices(self):
        return None

    def _resolve_grid(self, n_points: int) -> Grid:
        if self.grid is None:
            return Grid.uniform(n_points)
        if self.grid.size != n_points:
            raise ParameterError(
                f"grid has {self.grid.size} points but X has {n_points} columns"
            )
        return self.grid

    def fit(self, X, y):
        """Fit the estimator on curve rows X (n, p) and responses y (n,)."""
        X, y = check_X_y(X, y, y_numeric=True, ensure_min_samples=2)
        grid = self._resolve_grid(X.shape[1])
        dataset = Dataset(grid, X, np.asarray(y, dtype=float))
        result = estimate(dataset, self._method, self._config(), n_slices=self._n_slices())
        self.grid_ = grid
        self.estimate_ = result
        self.directions_ = result.directions
        self.eigenvalues_ = result.eigenvalues
        self.min_eigenvalue_ = result.min_eigenvalue
        self.diagnostics_ = dict(result.diagnostics)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Index values <direction_j, x_i>, shape (n, n_directions)."""
        check_is_fitted(self, "directions_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ParameterError(
                f"X has {X.shape[1]} columns, expected {self.n_features_in_}"
            )
        return self.estimate_.indices(X)


class FAVE(_FunctionalEdrEstimator):
    """Kernel functional average variance estimation.

    Recovers the effective dimension-reduction directions by combining
    the covariance of the kernel-estimated conditional mean with a
    quadratic conditional-variance term, preconditioned by the truncated
    covariance. Sensitive to second-moment structure, so it also handles
    links that are symmetric in the index (where inverse-regression
    methods degenerate).

    Parameters
    ----------
    n_directions : int, default=2
        Number of directions to extract.
    n_components : int, default=4
        Truncation dimension of the basis subspace.
    basis : {"pca", "bspline"}, default="pca"
    kernel : {"epanechnikov2", "quartic4"}, default="epanechnikov2"
    bandwidth : float or "cv", default="cv"
    bandwidth_grid : array-like, optional
        Candidate bandwidths for cross-validation.
    clip_cap : float, optional
        Cap of the density clipping floor min(cap, n^(-clip_exponent));
        scales with the response spread when None.
    clip_exponent : float, optional
        Exponent of the clipping floor; a per-kernel default when None.
    ridge : float, default=1e-12
        Singularity floor for the truncated covariance.
    grid : Grid, optional
        Curve grid; uniform on [0, 1] when None.

    Attributes
    ----------
    directions_ : ndarray of shape (n_directions, n_points)
        Unit-norm direction curves, leading eigenvalue first.
    eigenvalues_ : ndarray of shape (n_directions,)
    min_eigenvalue_ : float
        Smallest retained eigenvalue of the truncated covariance.
    diagnostics_ : dict
        Bandwidth used, clipping floor, clipping-active count.
    """

    _method = FAVE_METHOD

    def __init__(
        self,
        n_directions=2,
        n_components=4,
        basis=PCA,
        kernel="epanechnikov2",
        bandwidth="cv",
        bandwidth_grid=None,
        clip_cap=None,
        clip_exponent=None,
        ridge=1e-12,
        grid=None,
    ):
        super().__init__(
            n_directions=n_directions,
            n_components=n_components,
            basis=basis,
            ridge=ridge,
            grid=grid,
        )
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.bandwidth_grid = bandwidth_grid
        self.clip_cap = clip_cap
        self.clip_exponent = clip_exponent

    def _config(self) -> EdrConfig:
        return EdrConfig(
            n_components=self.n_components,
            n_directions=self.n_directions,
            basis=self.basis,
            kernel=self.kernel,
            bandwidth=self.bandwidth,
            bandwidth_grid=self.bandwidth_grid,
            clip_cap=self.clip_cap,
            clip_exponent=self.clip_exponent,
            ridge=self.ridge,
        )


class FSIR(FAVE):
    """Kernel functional sliced inverse regression.

    Eigendecomposes the covariance of the kernel-estimated conditional
    mean E(X | Y), preconditioned by the truncated covariance. Fast and
    accurate for monotone-in-index links, but degenerates when the link
    is even in an index (the conditional mean vanishes there).
    Parameters and attributes match :class:`FAVE`.
    """

    _method = FSIR_METHOD


class FSAVE(_FunctionalEdrEstimator):
    """Sliced functional average variance estimation.

    Slices the response range into near-equal-count bins and averages
    (C_D - V_slice) C_D^(-1) (C_D - V_slice) over slices, where V_slice
    is the within-slice covariance projected to the basis subspace.

    Parameters
    ----------
    n_directions, n_components, basis, ridge, grid
        As in :class:`FAVE`.
    n_slices : int, default=10
        Number of response slices; every slice needs >= 2 observations.
    """

    _method = FSAVE_METHOD

    def __init__(
        self,
        n_directions=2,
        n_components=4,
        basis=PCA,
        n_slices=10,
        ridge=1e-12,
        grid=None,
    ):
        super().__init__(
            n_directions=n_directions,
            n_components=n_components,
            basis=basis,
            ridge=ridge,
            grid=grid,
        )
        self.n_slices = n_slices

    def _n_slices(self):
        return self.n_slices
