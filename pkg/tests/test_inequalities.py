"""Interpolation evaluators, admissible pairs, and the criterion gate."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from besovflow.fields import random_band_limited
from besovflow.inequalities import (
    AdmissiblePair,
    admissible_pair,
    criterion_exponent,
    grad_norm_interpolation,
    grad_window,
    integrated_log_gradient_bound,
    lp_norm_interpolation,
    lp_window,
    validate_criterion,
)
from besovflow.littlewood_paley import build_cutoffs
from besovflow.spectral import Grid, ParameterError, SpectralField


@pytest.fixture(scope="module")
def corpus(grid2):
    return [random_band_limited(grid2, seed=70 + i, k_hi=5.0) for i in range(6)]


class TestWindows:
    def test_lp_window_positivity(self):
        a, b = lp_window(0.5, 8.0)
        assert a > 0.0 and b > 0.0

    def test_lp_window_rejects_outside(self):
        with pytest.raises(ParameterError, match="window"):
            lp_window(0.5, 5.0)  # below 2 + 2/s = 6
        with pytest.raises(ParameterError, match="window"):
            lp_window(0.5, 11.0)  # above 2 + 4/s = 10
        with pytest.raises(ParameterError):
            lp_window(-0.1, 8.0)

    def test_grad_window_rejects_outside(self):
        with pytest.raises(ParameterError, match="window"):
            grad_window(0.0, 2.0)
        with pytest.raises(ParameterError, match="window"):
            grad_window(0.0, 4.5)  # above 2 + 2/(1-s) = 4
        with pytest.raises(ParameterError):
            grad_window(1.0, 3.0)

    @given(
        s=st.floats(min_value=0.05, max_value=3.0),
        frac=st.floats(min_value=0.01, max_value=0.99),
    )
    @settings(max_examples=100)
    def test_lp_window_exponents_positive_everywhere(self, s, frac):
        p = (2.0 + 2.0 / s) + frac * ((2.0 + 4.0 / s) - (2.0 + 2.0 / s))
        assume(p > 2.0 + 2.0 / s and p < 2.0 + 4.0 / s)
        a, b = lp_window(s, p)
        assert a > 0.0 and b > 0.0


class TestLpInterpolation:
    def test_exponent_sum_is_one(self, corpus, cutoffs2):
        for f in corpus[:2]:
            rep = lp_norm_interpolation(f, 0.5, 8.0, cutoffs2)
            assert rep.exponent_sum() == pytest.approx(1.0, abs=1e-12)

    @given(s=st.floats(0.2, 2.0), frac=st.floats(0.1, 0.9))
    @settings(max_examples=50)
    def test_exponent_sum_algebraic(self, s, frac):
        # pure algebra: (1 - 2/p) + (4/p - s(1-2/p)) + (s(1-2/p) - 2/p) = 1
        p = (2.0 + 2.0 / s) * (1 - frac) + (2.0 + 4.0 / s) * frac
        theta = 1.0 - 2.0 / p
        total = theta + (4.0 / p - s * theta) + (s * theta - 2.0 / p)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_ratio_homogeneity(self, corpus, cutoffs2):
        f = corpus[0]
        base = lp_norm_interpolation(f, 0.5, 8.0, cutoffs2).ratio
        for lam in (1e-3, 10.0, 1e3):
            got = lp_norm_interpolation(lam * f, 0.5, 8.0, cutoffs2).ratio
            assert got == pytest.approx(base, rel=1e-10)

    def test_explicit_constant_formula(self, corpus, cutoffs2):
        s, p = 0.5, 8.0
        rep = lp_norm_interpolation(corpus[0], s, p, cutoffs2)
        a = s * (1 - 2 / p) - 2 / p
        b = 4 / p - s * (1 - 2 / p)
        expected = max(1 / (2**a - 1), 1 / (1 - 2**-b))
        assert rep.constant == pytest.approx(expected, rel=1e-14)

    def test_k0_double_inequality(self, corpus, cutoffs2):
        from besovflow.spectral import LAPLACIAN, derivative, lebesgue_norm, sobolev_norm

        for f in corpus:
            rep = lp_norm_interpolation(f, 0.5, 8.0, cutoffs2)
            lap = lebesgue_norm(derivative(f, LAPLACIAN), 2.0)
            h1 = sobolev_norm(f, 1)
            ratio = (lap + h1) / h1
            assert 2.0**rep.k0 <= ratio < 2.0 ** (rep.k0 + 1)
            assert rep.k0 >= 0

    def test_block_sum_dominates_lhs(self, corpus, cutoffs2):
        for f in corpus:
            rep = lp_norm_interpolation(f, 0.5, 8.0, cutoffs2)
            assert rep.lhs <= rep.block_sum * (1 + 1e-8)
            assert set(rep.pieces) == {"low", "mid", "high"}

    def test_rejects_zero_field(self, grid2, cutoffs2):
        zero = SpectralField(grid2, coeffs=np.zeros((1,) + grid2.shape, dtype=complex))
        with pytest.raises(ParameterError, match="nonzero"):
            lp_norm_interpolation(zero, 0.5, 8.0, cutoffs2)

    def test_corpus_sup_stable_under_refinement(self):
        coarse = Grid(2, 32)
        fine = Grid(2, 64)
        cc, cf = build_cutoffs(coarse), build_cutoffs(fine)
        sups = []
        for grid, cut in ((coarse, cc), (fine, cf)):
            ratios = [
                lp_norm_interpolation(
                    random_band_limited(grid, seed=80 + i, k_hi=4.0), 0.5, 8.0, cut
                ).ratio
                for i in range(10)
            ]
            sups.append(max(ratios))
        assert abs(sups[1] - sups[0]) / sups[0] < 0.2


class TestGradInterpolation:
    def test_exponent_sum_is_one(self, corpus, cutoffs2):
        rep = grad_norm_interpolation(corpus[0], 0.0, 3.0, cutoffs2)
        assert rep.exponent_sum() == pytest.approx(1.0, abs=1e-12)

    def test_cubed_bound_matches_quoted_form(self, corpus, cutoffs2):
        # s = 0, q = 3: exponents are (1/3, 1/3, 1/3), so the cubed report
        # reads ||grad u||_3^3 <= C ||u||_B ||grad u||_2 ||grad u||_H1
        rep = grad_norm_interpolation(corpus[0], 0.0, 3.0, cutoffs2)
        exps = [e for _, _, e in rep.rhs_factors]
        assert exps == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-14)

    def test_ratio_homogeneity(self, corpus, cutoffs2):
        f = corpus[1]
        base = grad_norm_interpolation(f, 0.2, 2.5, cutoffs2).ratio
        for lam in (1e-3, 1e3):
            got = grad_norm_interpolation(lam * f, 0.2, 2.5, cutoffs2).ratio
            assert got == pytest.approx(base, rel=1e-10)

    def test_k0_and_chain(self, corpus, cutoffs2):
        from besovflow.spectral import GRAD, LAPLACIAN, derivative, lebesgue_norm

        for f in corpus:
            rep = grad_norm_interpolation(f, 0.0, 3.0, cutoffs2)
            lap = lebesgue_norm(derivative(f, LAPLACIAN), 2.0)
            g2 = lebesgue_norm(derivative(f, GRAD), 2.0)
            ratio = (lap + g2) / g2
            assert 2.0**rep.k0 <= ratio < 2.0 ** (rep.k0 + 1)
            assert rep.lhs <= rep.block_sum * (1 + 1e-8)


class TestLogBound:
    def test_zero_trajectory(self, grid2, cutoffs2, nse_spec):
        from besovflow.systems import simulate
        from besovflow.trajectory import SystemState

        zero = SpectralField(
            grid2, coeffs=np.zeros((2,) + grid2.shape, dtype=complex),
            divergence_free=True,
        )
        traj = simulate(nse_spec, SystemState(0.0, {"u": zero}), 0.1, 0.05)
        rep = integrated_log_gradient_bound(traj.samples, 0.0, 0.1, cutoffs2)
        assert rep.sup_grad_integral == 0.0
        assert rep.besov_integral == 0.0
        assert rep.ratio == 0.0

    def test_time_constant_field_single_time_oracle(self, grid2, cutoffs2):
        # a frozen field reduces the statement to one instant: compute both
        # sides by hand from single-time norms
        import math as m

        from besovflow.besov import BesovParams, besov_norm
        from besovflow.spectral import GRAD, GRAD_LAPLACIAN, derivative, lebesgue_norm
        from besovflow.trajectory import SystemState, TrajectorySample, compute_norms

        u = random_band_limited(grid2, seed=90, components=2)
        samples = []
        for t in (0.0, 0.5, 1.0):
            state = SystemState(t, {"u": u})
            samples.append(
                TrajectorySample(t, state, compute_norms(state, cutoffs2))
            )
        rep = integrated_log_gradient_bound(samples, 0.0, 1.0, cutoffs2)
        span = 1.0
        a = span * lebesgue_norm(derivative(u, GRAD), m.inf)
        b = span * besov_norm(u, BesovParams(1.0, m.inf, m.inf), cutoffs2)
        d = span * lebesgue_norm(derivative(u, GRAD_LAPLACIAN), 2.0)
        assert rep.sup_grad_integral == pytest.approx(a, rel=1e-12)
        assert rep.ratio == pytest.approx(a / (b * m.log(d + m.e) + 1.0), rel=1e-12)
        assert rep.ratio < 10.0

    def test_empty_window_rejected(self, grid2, cutoffs2):
        with pytest.raises(ParameterError, match="window"):
            integrated_log_gradient_bound([], 0.0, 1.0, cutoffs2)


class TestAdmissiblePair:
    def test_midpoint_example(self):
        # s = 1/2: feasible p-interval is (6, 10), midpoint 8, and
        # 2/8 + 2/(8/3) = 1/4 + 3/4 = 1
        pair = admissible_pair(0.5)
        assert pair.p == pytest.approx(8.0, abs=1e-14)
        assert pair.q == pytest.approx(8.0 / 3.0, abs=1e-14)

    @given(s=st.floats(min_value=1e-3, max_value=0.999))
    @settings(max_examples=200)
    def test_invariants_across_the_interval(self, s):
        pair = admissible_pair(s)
        assert 2.0 + 2.0 / s < pair.p < 2.0 + 4.0 / s
        assert 2.0 < pair.q < 2.0 + 2.0 / (s + 1.0)
        assert 2.0 / pair.p + 2.0 / pair.q == pytest.approx(1.0, abs=1e-12)

    def test_rejects_endpoints(self):
        for s in (0.0, 1.0, -0.3, 2.0):
            with pytest.raises(ParameterError):
                admissible_pair(s)

    def test_direct_construction_validates(self):
        with pytest.raises(ParameterError):
            AdmissiblePair(s=0.5, p=7.0, q=3.0)  # relation violated


class TestCriterionGate:
    def test_serrin_pair(self):
        assert criterion_exponent(2, 0.0, 6.0, 3) == pytest.approx(4.0)

    def test_bkm_endpoint(self):
        assert criterion_exponent(2, 1.0, math.inf, 3) == pytest.approx(1.0)

    def test_excluded_endpoint(self):
        with pytest.raises(ParameterError, match="excluded"):
            criterion_exponent(2, -1.0, math.inf, 3)
        with pytest.raises(ParameterError, match="excluded"):
            criterion_exponent(2, -1.0, math.inf, 2)

    def test_family1_solution(self):
        # p = inf: 2/q = 1 - s
        assert criterion_exponent(1, 0.5, math.inf, 3) == pytest.approx(4.0)

    def test_family1_rejects_p_at_threshold(self):
        with pytest.raises(ParameterError):
            criterion_exponent(1, 0.5, 6.0, 3)  # p must exceed d/(1-s) = 6

    def test_family1_rejects_bad_s(self):
        for s in (0.0, 1.0, -0.5):
            with pytest.raises(ParameterError):
                criterion_exponent(1, s, math.inf, 3)

    def test_unknown_family(self):
        with pytest.raises(ParameterError, match="family"):
            criterion_exponent(3, 0.5, math.inf, 3)

    @given(
        s=st.floats(-0.9, 1.0),
        p_inv=st.floats(0.0, 0.4),
        d=st.sampled_from([2, 3]),
    )
    @settings(max_examples=150)
    def test_solved_q_satisfies_relation(self, s, p_inv, d):
        assume(s != -1.0)
        p = math.inf if p_inv == 0.0 else 1.0 / p_inv
        assume(p > d / (1.0 + s) * (1.0 + 1e-9))
        q = criterion_exponent(2, s, p, d)
        assert 2.0 / q + d / p == pytest.approx(1.0 + s, abs=1e-9)
        validate_criterion(2, s, p, q, d)

    def test_validate_rejects_mismatch(self):
        with pytest.raises(ParameterError, match="relation"):
            validate_criterion(2, 0.0, 6.0, 5.0, 3)
