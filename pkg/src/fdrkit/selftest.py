"""Reduced-size self-checks runnable from the CLI.

Each check recomputes a contract through an independent route (naive
loops, analytic values, algebraic identities) and compares. The
``corrupt`` hook deliberately breaks one named check so the harness
itself can be tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fda
from .basis import bspline_basis, bspline_design, pca_basis, projector, truncate_and_invert
from .edr import EdrConfig, fave
from .fda import Curve, Dataset, Grid, LinearOp, center, empirical_covariance, hs_norm
from .simulate import model_spec, simulate_dataset, span_projector, subspace_distance
from .smoothing import EPANECHNIKOV2, QUARTIC4, KernelSmoother


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _gauss_legendre_integral(f, n_nodes=64):
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    return float(np.sum(weights * f(nodes)))


def _naive_density(ys, kernel, h, y):
    total = 0.0
    for yi in ys:
        total += kernel((yi - y) / h)
    return total / (len(ys) * h)


def _naive_mean_numerator(xs, ys, kernel, h, y):
    p = xs.shape[1]
    out = [0.0] * p
    for xi, yi in zip(xs, ys):
        k = kernel((yi - y) / h)
        for j in range(p):
            out[j] += k * xi[j]
    return np.array(out) / (len(ys) * h)


def run_selftest(corrupt: str | None = None) -> list[CheckResult]:
    """Run all checks; ``corrupt`` names one check to sabotage (test hook)."""
    checks = []

    def record(name, passed, detail=""):
        checks.append(CheckResult(name, bool(passed), detail))

    fudge = 1.01  # multiplicative corruption applied by the hook

    # kernel normalization: integral of K over [-1, 1] must be 1
    for kernel in (EPANECHNIKOV2, QUARTIC4):
        factor = fudge if corrupt == "kernel-normalization" else 1.0
        integral = _gauss_legendre_integral(lambda u: factor * kernel(u))
        record(
            "kernel-normalization",
            abs(integral - 1.0) < 1e-8,
            f"{kernel.name}: integral = {integral:.12f}",
        )

    # quartic kernel moments: second vanishes, fourth equals -1/21
    m2 = _gauss_legendre_integral(lambda u: u**2 * QUARTIC4(u))
    m4 = _gauss_legendre_integral(lambda u: u**4 * QUARTIC4(u))
    record(
        "kernel-moments",
        abs(m2) < 1e-8 and abs(m4 + 1.0 / 21.0) < 1e-8,
        f"second = {m2:.2e}, fourth = {m4:.8f}",
    )

    # trapezoidal quadrature is exact for affine functions on any grid
    rng = np.random.default_rng(7)
    pts = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, 17)), [1.0]])
    grid = Grid.from_points(pts)
    a, b = 0.7, -0.3
    line = Curve(grid, a * grid.points + b)
    one = Curve(grid, np.ones(grid.size))
    exact = a / 2 + b
    got = fda.inner_product(line, one)
    record("quadrature-affine-exact", abs(got - exact) < 1e-12, f"error = {abs(got - exact):.2e}")

    # rank-one operator norm identity
    x = Curve(grid, rng.normal(size=grid.size))
    y = Curve(grid, rng.normal(size=grid.size))
    lhs = hs_norm(fda.outer_product(x, y))
    rhs = x.norm() * y.norm()
    record("rank-one-norm", abs(lhs - rhs) < 1e-10, f"error = {abs(lhs - rhs):.2e}")

    # composition against pointwise application
    a_op = LinearOp(grid, rng.normal(size=(grid.size, grid.size)))
    b_op = LinearOp(grid, rng.normal(size=(grid.size, grid.size)))
    f = Curve(grid, rng.normal(size=grid.size))
    via_compose = fda.apply(fda.compose(a_op, b_op), f).values
    via_apply = fda.apply(a_op, fda.apply(b_op, f)).values
    err = np.abs(via_compose - via_apply).max()
    record("compose-vs-apply", err < 1e-10, f"max error = {err:.2e}")

    # smoother values against naive loops
    small_grid = Grid.uniform(12)
    xs = rng.normal(size=(8, 12))
    ys = rng.normal(size=8)
    ds = center(Dataset(small_grid, xs, ys))
    smoother = KernelSmoother(ds, QUARTIC4, bandwidth=0.8)
    worst = 0.0
    for y0 in ys:
        worst = max(worst, abs(smoother.density(y0) - _naive_density(ds.responses, QUARTIC4, 0.8, y0)))
        worst = max(
            worst,
            np.abs(
                smoother.mean_numerator(y0).values
                - _naive_mean_numerator(ds.values, ds.responses, QUARTIC4, 0.8, y0)
            ).max(),
        )
    record("smoother-oracle", worst < 1e-12, f"max error = {worst:.2e}")

    # projector idempotence for both basis kinds
    spec = model_spec("model1", Grid.uniform(40))
    sample = center(simulate_dataset(spec, 60, seed=11))
    cov = empirical_covariance(sample)
    for make in (lambda: pca_basis(cov, 4), lambda: bspline_basis(sample.grid, 5)):
        basis = make()
        proj = projector(basis)
        err = np.abs(
            fda.compose(proj, proj).matrix - proj.matrix
        ).max()
        record("projector-idempotent", err < 1e-10, f"{basis.kind}: max error = {err:.2e}")

    # raw B-splines form a partition of unity
    raw = bspline_design(sample.grid, 6)
    err = np.abs(raw.sum(axis=0) - 1.0).max()
    record("bspline-partition-of-unity", err < 1e-12, f"max error = {err:.2e}")

    # clipping-floor inequality at sample points (one seeded run)
    record_lemma = _clipping_inequality_check(seed=3)
    checks.append(record_lemma)

    # subspace distance algebra: 0, 2, sqrt(2)
    g = Grid.uniform(30)
    base = np.zeros((4, 30))
    for j in range(4):
        base[j] = np.cos((j + 1) * np.pi * g.points)
    from .basis import orthonormalize

    e = orthonormalize(base, g)
    p_a = span_projector(e[:2], g)
    mix = np.array([[2.0, 1.0], [0.5, -1.0]]) @ e[:2]
    p_a2 = span_projector(mix, g)
    p_b = span_projector(e[2:4], g)
    p_c = span_projector(np.stack([e[0], e[2]]), g)
    d_same = subspace_distance(p_a, p_a2)
    d_orth = subspace_distance(p_a, p_b)
    d_share = subspace_distance(p_a, p_c)
    record(
        "subspace-distance-algebra",
        d_same < 1e-8 and abs(d_orth - 2.0) < 1e-8 and abs(d_share - math.sqrt(2)) < 1e-8,
        f"same = {d_same:.2e}, orthogonal = {d_orth:.9f}, shared = {d_share:.9f}",
    )

    # end-to-end determinism of the FAVE pipeline
    data = simulate_dataset(spec, 50, seed=21)
    cfg = EdrConfig(n_components=3, n_directions=2)
    first = fave(data, cfg)
    second = fave(data, cfg)
    identical = np.array_equal(first.directions, second.directions) and np.array_equal(
        first.eigenvalues, second.eigenvalues
    )
    record("pipeline-determinism", identical, "two runs bit-identical" if identical else "runs differ")

    return checks


def _clipping_inequality_check(seed: int) -> CheckResult:
    """Clipped-vs-raw density bound at every sample point, standard normal responses."""
    rng = np.random.default_rng(seed)
    n = 100
    grid = Grid.uniform(20)
    xs = rng.normal(size=(n, grid.size))
    ys = rng.normal(size=n)
    ds = center(Dataset(grid, xs, ys))
    smoother = KernelSmoother(ds, QUARTIC4, bandwidth=0.4)
    floor = smoother.clip_floor
    eval_pts = np.linspace(ys.min(), ys.max(), 2001)
    true_f = np.exp(-(eval_pts**2) / 2) / np.sqrt(2 * np.pi)
    sup_err = float(
        np.abs([smoother.density(t) for t in eval_pts] - true_f).max()
    )
    worst_margin = np.inf
    for yj in ys:
        fhat = smoother.density(yj)
        lhs = abs(max(floor, fhat) - fhat) / max(
            np.exp(-(yj**2) / 2) / np.sqrt(2 * np.pi), floor
        )
        indicator = 1.0 if np.exp(-(yj**2) / 2) / np.sqrt(2 * np.pi) < 2 * floor else 0.0
        rhs = 2.0 * (indicator + sup_err**2 / floor**2)
        worst_margin = min(worst_margin, rhs - lhs)
    return CheckResult(
        "clipping-inequality",
        worst_margin >= 0,
        f"minimum slack = {worst_margin:.3e}",
    )


def format_report(checks: list[CheckResult]) -> str:
    width = max(len(c.name) for c in checks)
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.name.ljust(width)}  {status}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks)} checks, {failed} failed")
    return "\n".join(lines)
