"""Grid, transforms, and spectral operators."""

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from besovflow.fields import field_from_callable, random_band_limited, single_mode
from besovflow.spectral import (
    GRAD,
    LAPLACIAN,
    Grid,
    ParameterError,
    SpectralField,
    dealias,
    derivative,
    l2_inner,
    lebesgue_norm,
    leray_project,
    make_grid,
    parseval_l2,
    sobolev_norm,
)


class TestGrid:
    def test_basic_2d(self):
        g = make_grid(2, 8)
        assert g.npoints == 64
        assert set(g.freqs.tolist()) == set(range(-4, 4))

    def test_basic_3d(self):
        assert make_grid(3, 16).npoints == 4096

    def test_rejects_bad_dimension(self):
        with pytest.raises(ParameterError, match="dimension"):
            make_grid(1, 8)
        with pytest.raises(ParameterError, match="dimension"):
            make_grid(4, 8)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ParameterError, match="power of two"):
            make_grid(2, 7)
        with pytest.raises(ParameterError, match="power of two"):
            make_grid(2, 4)

    @given(st.integers(min_value=3, max_value=7))
    def test_accepts_powers_of_two(self, exponent):
        g = make_grid(2, 2**exponent)
        assert g.freqs.size == g.n

    def test_freq_set_size(self, grid2, grid3):
        assert grid2.k.shape == (2, 32, 32)
        assert grid3.k.shape == (3, 16, 16, 16)


class TestSpectralField:
    def test_round_trip(self, grid2):
        f = random_band_limited(grid2, seed=1)
        g = SpectralField(grid2, values=f.values.copy())
        assert np.max(np.abs(g.coeffs - f.coeffs)) < 1e-12 * np.max(np.abs(f.coeffs))

    def test_conjugate_symmetry(self, grid2, grid3):
        for grid, seed in ((grid2, 2), (grid3, 3)):
            f = random_band_limited(grid, seed=seed, components=grid.d)
            assert f.conjugate_symmetry_error() < 1e-14

    def test_needs_exactly_one_representation(self, grid2):
        with pytest.raises(ParameterError):
            SpectralField(grid2)

    def test_algebra(self, grid2):
        f = random_band_limited(grid2, seed=4)
        g = random_band_limited(grid2, seed=5)
        combo = 2.0 * f + g - f
        assert np.allclose(combo.coeffs, f.coeffs + g.coeffs, atol=1e-15)


class TestDerivative:
    def test_laplacian_eigenfunction(self, grid2):
        f = field_from_callable(grid2, lambda x, y: np.cos(x))
        lap = derivative(f, LAPLACIAN)
        assert np.max(np.abs(lap.values + f.values)) < 1e-12

    def test_gradient_of_constant(self, grid2):
        f = SpectralField(grid2, values=np.full((1,) + grid2.shape, 3.7))
        grad = derivative(f, GRAD)
        assert np.max(np.abs(grad.values)) < 1e-12

    def test_laplacian_symbolic_oracle(self, grid2):
        # independent oracle: differentiate sin(2x) cos(y) symbolically
        x, y = sp.symbols("x y")
        expr = sp.sin(2 * x) * sp.cos(y)
        lap_expr = sp.diff(expr, x, 2) + sp.diff(expr, y, 2)
        assert sp.simplify(lap_expr + 5 * expr) == 0
        fn = sp.lambdify((x, y), expr, "numpy")
        lap_fn = sp.lambdify((x, y), lap_expr, "numpy")
        f = field_from_callable(grid2, fn)
        lap = derivative(f, LAPLACIAN)
        oracle = field_from_callable(grid2, lap_fn)
        assert np.max(np.abs(lap.values - oracle.values)) < 1e-12

    def test_multi_index(self, grid2):
        f = field_from_callable(grid2, lambda x, y: np.sin(x) * np.cos(y))
        dxy = derivative(f, (1, 1))
        oracle = field_from_callable(grid2, lambda x, y: -np.cos(x) * np.sin(y))
        assert np.max(np.abs(dxy.values - oracle.values)) < 1e-12

    def test_bad_order(self, grid2):
        f = single_mode(grid2, (1, 0))
        with pytest.raises(ParameterError):
            derivative(f, "curl")
        with pytest.raises(ParameterError):
            derivative(f, (1, 2, 3))

    def test_grad_norm_matches_weighted_coefficients(self, grid2):
        f = random_band_limited(grid2, seed=6)
        grad_l2 = lebesgue_norm(derivative(f, GRAD), 2.0)
        weighted = np.sqrt(
            grid2.volume * np.sum(grid2.k_sq * np.abs(f.coeffs[0]) ** 2)
        )
        assert abs(grad_l2 - weighted) <= 1e-10 * weighted


class TestLerayProjection:
    def test_divergence_free_unchanged(self, grid2):
        f = field_from_callable(grid2, lambda x, y: np.sin(y), lambda x, y: np.sin(x))
        # direct oracle: each mode has xi . c = 0
        div = np.sum(grid2.k * f.coeffs, axis=0)
        assert np.max(np.abs(div)) < 1e-14
        p = leray_project(f)
        assert np.max(np.abs(p.values - f.values)) < 1e-12

    def test_pure_gradient_killed(self, grid2):
        g = field_from_callable(grid2, lambda x, y: np.sin(x) * np.cos(2 * y))
        grad = derivative(g, GRAD)
        p = leray_project(grad)
        assert np.max(np.abs(p.values)) < 1e-12

    def test_idempotent(self, grid2):
        f = SpectralField(
            grid2, values=np.random.default_rng(0).standard_normal((2,) + grid2.shape)
        )
        once = leray_project(f)
        twice = leray_project(once)
        assert np.max(np.abs(twice.coeffs - once.coeffs)) < 1e-10 * np.max(
            np.abs(once.coeffs)
        )
        assert once.divergence_error() < 1e-10

    def test_self_adjoint(self, grid2):
        rng = np.random.default_rng(1)
        f = SpectralField(grid2, values=rng.standard_normal((2,) + grid2.shape))
        g = SpectralField(grid2, values=rng.standard_normal((2,) + grid2.shape))
        lhs = l2_inner(leray_project(f), g)
        rhs = l2_inner(f, leray_project(g))
        assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), 1.0)

    def test_rejects_scalar(self, grid2):
        f = single_mode(grid2, (1, 0))
        with pytest.raises(ParameterError, match="d-vector"):
            leray_project(f)


class TestLebesgueNorm:
    def test_constant(self, grid2):
        f = SpectralField(grid2, values=np.full((1,) + grid2.shape, 2.0))
        for p in (1.0, 2.0, 5.0):
            assert abs(lebesgue_norm(f, p) - 2.0 * (2 * np.pi) ** (2 / p)) < 1e-10
        assert lebesgue_norm(f, math.inf) == pytest.approx(2.0)

    def test_zero(self, grid2):
        f = SpectralField(grid2, coeffs=np.zeros((1,) + grid2.shape, dtype=complex))
        assert lebesgue_norm(f, 3.0) == 0.0

    def test_sine_closed_form(self, grid2):
        # oracle: int sin^2 over the 2-torus = 2 pi^2
        f = field_from_callable(grid2, lambda x, y: np.sin(x))
        assert abs(lebesgue_norm(f, 2.0) - np.sqrt(2 * np.pi**2)) < 1e-12

    def test_rejects_small_p(self, grid2):
        f = single_mode(grid2, (1, 0))
        with pytest.raises(ParameterError):
            lebesgue_norm(f, 0.5)

    def test_parseval(self, grid2, grid3):
        for grid, seed in ((grid2, 7), (grid3, 8)):
            f = random_band_limited(grid, seed=seed)
            quad = lebesgue_norm(f, 2.0)
            spec = parseval_l2(f)
            assert abs(quad - spec) <= 1e-10 * spec


class TestSobolevNorm:
    def test_zero(self, grid2):
        f = SpectralField(grid2, coeffs=np.zeros((1,) + grid2.shape, dtype=complex))
        assert sobolev_norm(f, 2) == 0.0

    def test_sine_oracle(self, grid2):
        # ||sin x||_2^2 = 2 pi^2 and ||d_x sin x||_2^2 = 2 pi^2, so H^1 = 2 pi
        f = field_from_callable(grid2, lambda x, y: np.sin(x))
        assert abs(sobolev_norm(f, 1) - 2 * np.pi) < 1e-12

    def test_monotone_in_order(self, grid2):
        f = random_band_limited(grid2, seed=9)
        values = [sobolev_norm(f, k) for k in range(4)]
        assert values == sorted(values)

    def test_rejects_large_order(self, grid2):
        f = single_mode(grid2, (1, 0))
        with pytest.raises(ParameterError):
            sobolev_norm(f, 4)


class TestDealias:
    def test_band_limited_unchanged(self, grid2):
        f = random_band_limited(grid2, seed=10, k_hi=grid2.n / 3 - 1)
        g = dealias(f)
        assert np.max(np.abs(g.coeffs - f.coeffs)) == 0.0

    def test_idempotent(self, grid2):
        f = random_band_limited(grid2, seed=11, k_hi=grid2.n / 2 - 1)
        once = dealias(f)
        twice = dealias(once)
        assert np.max(np.abs(twice.coeffs - once.coeffs)) == 0.0

    def test_kills_high_mode(self, grid2):
        # direct coefficient inspection: |xi_1| = n/2 - 1 > n/3 must vanish
        k = grid2.n // 2 - 1
        coeffs = np.zeros((1,) + grid2.shape, dtype=complex)
        coeffs[0, k, 0] = 0.5
        coeffs[0, -k, 0] = 0.5
        f = SpectralField(grid2, coeffs=coeffs)
        g = dealias(f)
        assert np.max(np.abs(g.coeffs)) == 0.0
