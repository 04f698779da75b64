"""Besov sequences and norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besovflow.besov import BesovParams, besov_norm, besov_sequence
from besovflow.fields import random_band_limited, single_mode
from besovflow.littlewood_paley import build_cutoffs, phi_profile
from besovflow.spectral import Grid, ParameterError, SpectralField, lebesgue_norm


class TestParams:
    def test_rejects_bad_exponents(self):
        with pytest.raises(ParameterError):
            BesovParams(0.0, 0.5)
        with pytest.raises(ParameterError):
            BesovParams(0.0, 2.0, 0.0)

    def test_key_is_stable(self):
        key = BesovParams(-0.5, math.inf, math.inf).key()
        assert key == "besov_-0.5_inf_inf_inh"


class TestSequence:
    def test_zero_field(self, grid2, cutoffs2):
        f = SpectralField(grid2, coeffs=np.zeros((1,) + grid2.shape, dtype=complex))
        seq = besov_sequence(f, BesovParams(0.7, 3.0), cutoffs2)
        assert np.all(seq.values() == 0.0)

    def test_constant_single_entry(self, grid2, cutoffs2):
        # only the j = -1 block survives; its entry is 2^-s (2 pi)^(d/p) |c|
        const = 1.3
        s, p = 0.6, 3.0
        f = SpectralField(grid2, values=np.full((1,) + grid2.shape, const))
        seq = besov_sequence(f, BesovParams(s, p), cutoffs2)
        entries = dict(seq.entries)
        oracle = 2.0**-s * (2 * np.pi) ** (grid2.d / p) * const
        assert entries[-1] == pytest.approx(oracle, rel=1e-12)
        assert all(v == 0.0 for j, v in entries.items() if j >= 0)

    def test_entries_match_multiplier_oracle(self, grid2, cutoffs2):
        # independent path: multiply raw coefficients, transform, quadrature
        params = BesovParams(0.4, 3.0)
        f = random_band_limited(grid2, seed=21)
        seq = besov_sequence(f, params, cutoffs2)
        for j, entry in seq.entries:
            mult = (
                cutoffs2.chi_samples
                if j == -1
                else phi_profile(grid2.k_mag * 2.0**-j)
            )
            vals = (
                np.real(np.fft.ifftn(f.coeffs * mult, axes=(1, 2))) * grid2.npoints
            )
            mag = np.abs(vals[0])
            oracle = 2.0 ** (j * params.s) * float(
                (grid2.cell_volume * np.sum(mag**3.0)) ** (1.0 / 3.0)
            )
            assert entry == pytest.approx(oracle, rel=1e-10, abs=1e-300)


class TestNorm:
    def test_l2_equivalence_window(self, grid2, cutoffs2):
        # almost-orthogonality: the (0, 2, 2) norm sits within a factor 2
        for seed in range(5):
            f = random_band_limited(grid2, seed=30 + seed)
            b = besov_norm(f, BesovParams(0.0, 2.0, 2.0), cutoffs2)
            l2 = lebesgue_norm(f, 2.0)
            assert 0.5 * l2 <= b <= 2.0 * l2

    @given(lam=st.floats(min_value=1e-6, max_value=1e6))
    @settings(max_examples=25, deadline=None)
    def test_scaling(self, lam):
        grid = Grid(2, 16)
        cutoffs = build_cutoffs(grid)
        f = random_band_limited(grid, seed=41)
        params = BesovParams(-0.3, 4.0)
        base = besov_norm(f, params, cutoffs)
        scaled = besov_norm(lam * f, params, cutoffs)
        assert scaled == pytest.approx(lam * base, rel=1e-12)

    def test_entry_monotonicity_in_s(self, grid2, cutoffs2):
        f = random_band_limited(grid2, seed=42)
        lo = dict(besov_sequence(f, BesovParams(-0.5, 3.0), cutoffs2).entries)
        hi = dict(besov_sequence(f, BesovParams(0.8, 3.0), cutoffs2).entries)
        for j in lo:
            if j >= 0:
                assert lo[j] <= hi[j] * (1 + 1e-12)

    def test_single_mode_sup_norm(self, grid2, cutoffs2):
        # |xi| = 4: blocks j in {1, 2}; oracle via direct multipliers
        f = single_mode(grid2, (4, 0))
        params = BesovParams(1.0, math.inf, math.inf)
        got = besov_norm(f, params, cutoffs2)
        oracle = 0.0
        for j in (1, 2):
            mult = float(phi_profile(np.array([4.0 * 2.0**-j]))[0])
            block_sup = mult * float(np.max(np.abs(f.values)))
            oracle = max(oracle, 2.0**j * block_sup)
        assert got == pytest.approx(oracle, rel=1e-12)

    def test_finite_q_is_lq_sum(self, grid2, cutoffs2):
        f = random_band_limited(grid2, seed=43)
        params = BesovParams(0.2, 3.0, 2.0)
        seq = besov_sequence(f, params, cutoffs2).values()
        assert besov_norm(f, params, cutoffs2) == pytest.approx(
            float(np.sqrt(np.sum(seq**2))), rel=1e-14
        )


class TestHomogeneous:
    def test_agreement_for_positive_blocks(self, grid2, cutoffs2):
        f = random_band_limited(grid2, seed=50).mean_removed()
        inh = dict(besov_sequence(f, BesovParams(0.3, 3.0), cutoffs2).entries)
        hom = dict(
            besov_sequence(
                f, BesovParams(0.3, 3.0, homogeneous=True), cutoffs2
            ).entries
        )
        for j, v in inh.items():
            if j >= 0:
                assert v == pytest.approx(hom.get(j, 0.0), rel=1e-12, abs=1e-300)

    def test_mean_is_removed(self, grid2, cutoffs2):
        f = SpectralField(grid2, values=np.full((1,) + grid2.shape, 5.0))
        norm = besov_norm(f, BesovParams(0.3, 3.0, homogeneous=True), cutoffs2)
        assert norm == 0.0

    def test_reconstruction_of_mean_free_field(self, grid2):
        # homogeneous multipliers sum to 1 on every nonzero grid mode
        grid = grid2
        total = np.zeros(grid.shape)
        for j in range(-1, grid.j_max + 1):
            total = total + phi_profile(grid.k_mag * 2.0**-j)
        nonzero = grid.k_mag > 0
        assert np.max(np.abs(total[nonzero] - 1.0)) < 1e-12


class TestEmbedding:
    def test_into_sup_exponent_norm(self, grid2, cutoffs2):
        # B^(-s)_{p,inf} embeds into B^(-s-d/p)_{inf,inf}: a single constant
        # works corpus-wide (per-block Bernstein is the mechanism)
        s, p = 0.5, 4.0
        lo = BesovParams(-s, p, math.inf)
        hi = BesovParams(-s - grid2.d / p, math.inf, math.inf)
        cal = [
            besov_norm(f, hi, cutoffs2) / besov_norm(f, lo, cutoffs2)
            for f in (random_band_limited(grid2, seed=60 + i) for i in range(8))
        ]
        c_emb = 1.25 * max(cal)
        for i in range(8, 16):
            f = random_band_limited(grid2, seed=60 + i)
            assert besov_norm(f, hi, cutoffs2) <= c_emb * besov_norm(f, lo, cutoffs2)
