"""Field constructors and their advertised invariants."""

import numpy as np
import pytest

from besovflow.fields import (
    random_band_limited,
    random_scalar,
    random_solenoidal,
    single_mode,
    taylor_green,
)
from besovflow.spectral import Grid, ParameterError, lebesgue_norm


class TestTaylorGreen:
    def test_divergence_free(self, grid2):
        u = taylor_green(grid2)
        assert u.divergence_error() < 1e-14

    def test_closed_form_values(self, grid2):
        x, y = grid2.x
        u = taylor_green(grid2, nu=0.1, t=2.0)
        amp = np.exp(-0.4)
        assert np.max(np.abs(u.values[0] - amp * np.sin(x) * np.cos(y))) < 1e-14
        assert np.max(np.abs(u.values[1] + amp * np.cos(x) * np.sin(y))) < 1e-14

    def test_needs_2d(self, grid3):
        with pytest.raises(ParameterError):
            taylor_green(grid3)


class TestRandomSolenoidal:
    def test_invariants(self, grid2):
        u = random_solenoidal(grid2, seed=5, amplitude=2.5)
        assert u.divergence_error() < 1e-13
        assert lebesgue_norm(u, 2.0) == pytest.approx(2.5, rel=1e-12)
        assert np.abs(u.coeffs[:, 0, 0]).max() == 0.0  # mean-free
        outside = ~grid2.dealias_mask
        assert np.max(np.abs(u.coeffs[:, outside])) == 0.0  # dealiased

    def test_seed_determinism(self, grid2):
        a = random_solenoidal(grid2, seed=9)
        b = random_solenoidal(grid2, seed=9)
        c = random_solenoidal(grid2, seed=10)
        assert np.array_equal(a.coeffs, b.coeffs)
        assert not np.array_equal(a.coeffs, c.coeffs)

    def test_3d(self, grid3):
        u = random_solenoidal(grid3, seed=6)
        assert u.components == 3
        assert u.divergence_error() < 1e-13


class TestRandomBandLimited:
    def test_band_support(self, grid2):
        f = random_band_limited(grid2, seed=7, k_lo=2.0, k_hi=6.0)
        bad = (grid2.k_mag < 2.0) | (grid2.k_mag > 6.0)
        assert np.max(np.abs(f.coeffs[:, bad])) == 0.0

    def test_same_function_on_finer_grid(self):
        # identical seed + band defines identical coefficients on both grids
        coarse, fine = Grid(2, 32), Grid(2, 64)
        fc = random_band_limited(coarse, seed=8, k_hi=5.0)
        ff = random_band_limited(fine, seed=8, k_hi=5.0)
        for xi in ((1, 2), (-3, 4), (5, 0)):
            ic = tuple(int(np.where(coarse.freqs == m)[0][0]) for m in xi)
            jf = tuple(int(np.where(fine.freqs == m)[0][0]) for m in xi)
            assert fc.coeffs[(0,) + ic] == ff.coeffs[(0,) + jf]

    def test_real_and_normalized(self, grid3):
        f = random_band_limited(grid3, seed=9, components=2, amplitude=3.0)
        assert f.conjugate_symmetry_error() < 1e-14
        assert lebesgue_norm(f, 2.0) == pytest.approx(3.0, rel=1e-12)


class TestScalarsAndModes:
    def test_single_mode_values(self, grid2):
        f = single_mode(grid2, (2, 1), amplitude=0.7)
        x, y = grid2.x
        assert np.max(np.abs(f.values[0] - 0.7 * np.cos(2 * x + y))) < 1e-13

    def test_random_scalar_mean_free(self, grid2):
        f = random_scalar(grid2, seed=10)
        assert abs(float(np.mean(f.values))) < 1e-14
