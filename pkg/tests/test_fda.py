"""Core curve/operator algebra against analytic values and naive loops."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import naive_oracles as oracle
from fdrkit import (
    ContractError,
    Curve,
    Dataset,
    Grid,
    GridMismatchError,
    LinearOp,
    ParameterError,
    center,
    empirical_covariance,
    hs_norm,
    inner_product,
    outer_product,
)
from fdrkit import fda
from fdrkit.exceptions import InsufficientDataError


class TestGrid:
    def test_uniform_weights_sum_to_one(self):
        g = Grid.uniform(100)
        assert abs(g.weights.sum() - 1.0) < 1e-12
        assert g.points[0] == 0.0 and g.points[-1] == 1.0

    def test_trapezoid_endpoints_are_half_weight(self):
        g = Grid.uniform(5)
        assert g.weights[0] == pytest.approx(g.weights[1] / 2)

    def test_rejects_unsorted_points(self):
        with pytest.raises(ParameterError):
            Grid(np.array([0.0, 0.6, 0.4, 1.0]), np.full(4, 0.25))

    def test_rejects_bad_endpoints(self):
        with pytest.raises(ParameterError):
            Grid.from_points(np.array([0.1, 0.5, 1.0]))

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ParameterError):
            Grid(np.array([0.0, 0.5, 1.0]), np.array([0.5, 0.5, 0.0]))

    def test_arrays_are_readonly(self):
        g = Grid.uniform(5)
        with pytest.raises(ValueError):
            g.points[0] = 1.0

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_affine_functions_integrate_exactly(self, seed):
        # trapezoid rule is exact for polynomials of degree <= 1 on any grid
        rng = np.random.default_rng(seed)
        interior = np.sort(rng.uniform(0.0, 1.0, size=8))
        g = Grid.from_points(np.concatenate([[0.0], interior, [1.0]]))
        a, b = rng.normal(size=2)
        line = Curve(g, a * g.points + b)
        one = Curve(g, np.ones(g.size))
        assert inner_product(line, one) == pytest.approx(a / 2 + b, abs=1e-12)


class TestInnerProduct:
    def test_constant_one_has_unit_norm(self, fine_grid):
        one = Curve(fine_grid, np.ones(fine_grid.size))
        assert inner_product(one, one) == pytest.approx(1.0, abs=1e-12)

    def test_model1_direction_norm(self, fine_grid):
        # integral of ((2t-1)^3 + 1)^2 over [0,1] is 8/7
        t = fine_grid.points
        b1 = Curve(fine_grid, (2 * t - 1) ** 3 + 1)
        assert inner_product(b1, b1) == pytest.approx(8 / 7, abs=1e-3)

    def test_model2_direction_norm(self, fine_grid):
        # integral of sin^2(5 pi t / 2) over [0,1] is 1/2
        t = fine_grid.points
        b2 = Curve(fine_grid, np.sin(5 * np.pi * t / 2))
        assert inner_product(b2, b2) == pytest.approx(0.5, abs=1e-3)

    def test_grid_mismatch_raises(self, grid):
        other = Grid.uniform(grid.size + 1)
        with pytest.raises(GridMismatchError):
            inner_product(
                Curve(grid, np.zeros(grid.size)), Curve(other, np.zeros(other.size))
            )

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_symmetric_and_bilinear(self, seed):
        rng = np.random.default_rng(seed)
        g = Grid.uniform(13)
        a = Curve(g, rng.normal(size=13))
        b = Curve(g, rng.normal(size=13))
        c = Curve(g, rng.normal(size=13))
        alpha = rng.normal()
        assert inner_product(a, b) == pytest.approx(inner_product(b, a), abs=1e-12)
        combo = Curve(g, alpha * a.values + c.values)
        assert inner_product(combo, b) == pytest.approx(
            alpha * inner_product(a, b) + inner_product(c, b), abs=1e-12
        )


class TestOuterProduct:
    def test_unit_rank_one_is_idempotent_on_its_axis(self, grid, rng):
        x = Curve(grid, rng.normal(size=grid.size))
        x = Curve(grid, x.values / x.norm())
        op = outer_product(x, x)
        assert np.allclose(fda.apply(op, x).values, x.values, atol=1e-12)

    def test_zero_curve_gives_zero_operator(self, grid, random_curves):
        zero = Curve(grid, np.zeros(grid.size))
        op = outer_product(zero, random_curves())
        assert np.all(op.matrix == 0.0)

    def test_action_matches_direct_formula(self, grid, rng):
        x = Curve(grid, rng.normal(size=grid.size))
        y = Curve(grid, rng.normal(size=grid.size))
        op = outer_product(x, y)
        for _ in range(5):
            h = Curve(grid, rng.normal(size=grid.size))
            expected = inner_product(x, h) * y.values
            assert np.abs(fda.apply(op, h).values - expected).max() < 1e-13


class TestApplyCompose:
    def test_metric_identity_acts_as_identity(self, grid, random_curves):
        ident = fda.identity_operator(grid)
        f = random_curves()
        assert np.allclose(fda.apply(ident, f).values, f.values, atol=1e-12)

    def test_zero_operator_gives_zero_curve(self, grid, random_curves):
        zero = LinearOp(grid, np.zeros((grid.size, grid.size)))
        assert np.all(fda.apply(zero, random_curves()).values == 0.0)

    def test_apply_matches_naive(self, grid, rng):
        mat = rng.normal(size=(grid.size, grid.size))
        f = rng.normal(size=grid.size)
        got = fda.apply(LinearOp(grid, mat), Curve(grid, f)).values
        want = oracle.apply_op(grid.weights, mat, f)
        assert np.abs(got - want).max() < 1e-12

    def test_compose_identity_is_noop(self, grid, rng):
        a = LinearOp(grid, rng.normal(size=(grid.size, grid.size)))
        got = fda.compose(fda.identity_operator(grid), a)
        assert np.allclose(got.matrix, a.matrix, atol=1e-12)

    def test_compose_rank_ones(self, grid, rng):
        # (x tensor y) then (u tensor v) collapses to <x, v> (u tensor y)
        x, y, u, v = (Curve(grid, rng.normal(size=grid.size)) for _ in range(4))
        got = fda.compose(outer_product(x, y), outer_product(u, v))
        want = fda.scale(inner_product(x, v), outer_product(u, y))
        assert np.abs(got.matrix - want.matrix).max() < 1e-12

    def test_add_scale_cancel(self, grid, rng):
        a = LinearOp(grid, rng.normal(size=(grid.size, grid.size)))
        out = fda.add(a, fda.scale(-1.0, a))
        assert np.all(out.matrix == 0.0)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_compose_consistent_with_apply(self, seed):
        rng = np.random.default_rng(seed)
        g = Grid.uniform(9)
        a = LinearOp(g, rng.normal(size=(9, 9)))
        b = LinearOp(g, rng.normal(size=(9, 9)))
        f = Curve(g, rng.normal(size=9))
        lhs = fda.apply(fda.compose(a, b), f).values
        rhs = fda.apply(a, fda.apply(b, f)).values
        scale = max(1.0, np.abs(rhs).max())
        assert np.abs(lhs - rhs).max() / scale < 1e-10


class TestHsNorm:
    def test_unit_rank_one(self, grid, rng):
        x = Curve(grid, rng.normal(size=grid.size))
        x = Curve(grid, x.values / x.norm())
        assert hs_norm(outer_product(x, x)) == pytest.approx(1.0, abs=1e-12)

    def test_zero_operator(self, grid):
        assert hs_norm(LinearOp(grid, np.zeros((grid.size, grid.size)))) == 0.0

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_rank_one_norm_identity(self, seed):
        rng = np.random.default_rng(seed)
        g = Grid.uniform(11)
        x = Curve(g, rng.normal(size=11))
        y = Curve(g, rng.normal(size=11))
        assert hs_norm(outer_product(x, y)) == pytest.approx(
            x.norm() * y.norm(), abs=1e-10
        )

    def test_matches_naive(self, grid, rng):
        mat = rng.normal(size=(grid.size, grid.size))
        assert hs_norm(LinearOp(grid, mat)) == pytest.approx(
            oracle.hs_norm(grid.weights, mat), abs=1e-12
        )


class TestCenterAndCovariance:
    def test_center_removes_mean(self, grid, rng):
        ds = Dataset(grid, rng.normal(size=(10, grid.size)), rng.normal(size=10))
        centered = center(ds)
        assert np.abs(centered.values.mean(axis=0)).max() < 1e-12
        assert centered.centered
        assert np.array_equal(centered.responses, ds.responses)

    def test_center_is_idempotent_on_centered_data(self, small_dataset):
        again = center(small_dataset)
        assert np.abs(again.values - small_dataset.values).max() < 1e-12

    def test_identical_curves_center_to_zero(self, grid):
        row = np.linspace(-1, 1, grid.size)
        ds = Dataset(grid, np.tile(row, (4, 1)), np.arange(4.0))
        assert np.abs(center(ds).values).max() == 0.0

    def test_two_curves(self, grid, rng):
        f, g_vals = rng.normal(size=(2, grid.size))
        ds = Dataset(grid, np.stack([f, g_vals]), np.zeros(2))
        got = center(ds).values
        mean = (f + g_vals) / 2
        assert np.allclose(got[0], f - mean, atol=1e-14)
        assert np.allclose(got[1], g_vals - mean, atol=1e-14)

    def test_needs_two_observations(self, grid):
        with pytest.raises(InsufficientDataError):
            Dataset(grid, np.zeros((1, grid.size)), np.zeros(1))

    def test_covariance_requires_centered(self, grid, rng):
        ds = Dataset(grid, rng.normal(size=(5, grid.size)), rng.normal(size=5))
        with pytest.raises(ContractError):
            empirical_covariance(ds)

    def test_opposite_pair_gives_rank_one(self, grid, rng):
        x = rng.normal(size=grid.size)
        ds = Dataset(grid, np.stack([x, -x]), np.zeros(2), centered=True)
        cov = empirical_covariance(ds)
        want = outer_product(Curve(grid, x), Curve(grid, x))
        assert np.abs(cov.matrix - want.matrix).max() < 1e-12

    def test_centered_flag_is_validated(self, grid, rng):
        xs = rng.normal(size=(6, grid.size)) + 5.0
        with pytest.raises(ContractError):
            Dataset(grid, xs, np.zeros(6), centered=True)

    def test_covariance_is_symmetric_psd(self, small_dataset):
        cov = empirical_covariance(small_dataset)
        assert np.abs(cov.matrix - cov.matrix.T).max() < 1e-12
        sw = np.sqrt(small_dataset.grid.weights)
        sym = sw[:, None] * cov.matrix * sw[None, :]
        assert np.linalg.eigvalsh(sym).min() >= -1e-10

    def test_brownian_covariance_matches_min_kernel(self):
        from fdrkit import brownian_paths

        g = Grid.uniform(100)
        paths = brownian_paths(g, 10_000, seed=99)
        ds = center(Dataset(g, paths, np.zeros(10_000)))
        cov = empirical_covariance(ds)
        t = g.points
        want = np.minimum.outer(t, t)
        idx = np.random.default_rng(1).integers(1, 100, size=(10, 2))
        for i, j in idx:
            assert abs(cov.matrix[i, j] - want[i, j]) < 0.05
