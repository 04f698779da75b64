"""Seeded property suites behind the ``verify`` command.

Each suite sweeps a deterministic corpus of band-limited fields and
reduces every property to a named check with a worst observed value and
a tolerance.  A failed check makes the whole suite fail (exit code 1
from the CLI); empty corpora are parameter errors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .besov import BesovParams, besov_norm, besov_sequence
from .config import RunConfig
from .fields import random_band_limited, single_mode
from .inequalities import (
    admissible_pair,
    grad_norm_interpolation,
    grad_window,
    lp_norm_interpolation,
    lp_window,
)
from .littlewood_paley import (
    Annulus,
    LowBall,
    bernstein_ratio,
    build_cutoffs,
    decompose,
    low_pass,
    lp_block,
    phi_profile,
)
from .spectral import (
    GRAD,
    LAPLACIAN,
    Grid,
    ParameterError,
    SpectralField,
    dealias,
    derivative,
    lebesgue_norm,
    sobolev_norm,
)

SUITES = ("lp", "besov", "lemmas", "bernstein")


@dataclass
class CheckResult:
    name: str
    worst: float
    tolerance: float
    passed: bool
    note: str = ""


@dataclass
class SuiteResult:
    suite: str
    checks: list[CheckResult]
    detail: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_names(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _corpus(cfg: RunConfig, grid: Grid, components: int = 1, tag: int = 0):
    if cfg.corpus_size < 1:
        raise ParameterError("corpus_size must be >= 1 for verify suites")
    k_hi = min(grid.n / 4.0, 8.0)
    return [
        random_band_limited(
            grid, seed=cfg.seed + tag * 1000 + i, components=components, k_hi=k_hi
        )
        for i in range(cfg.corpus_size)
    ]


def run_suite(name: str, cfg: RunConfig) -> SuiteResult:
    if name not in SUITES:
        raise ParameterError(f"unknown suite {name!r}; pick one of {SUITES}")
    return {
        "lp": suite_lp,
        "besov": suite_besov,
        "lemmas": suite_lemmas,
        "bernstein": suite_bernstein,
    }[name](cfg)


# -- dyadic block suite -------------------------------------------------------


def suite_lp(cfg: RunConfig) -> SuiteResult:
    checks: list[CheckResult] = []
    detail: list[dict] = []

    worst = 0.0
    for n in cfg.grid_sizes:
        grid = Grid(cfg.d, n)
        r = grid.k_mag
        total = np.asarray(build_cutoffs(grid).chi_samples, dtype=float).copy()
        for j in range(0, grid.j_max + 3):
            total = total + phi_profile(r * 2.0**-j)
        dev = float(np.max(np.abs(total - 1.0)))
        detail.append({"check": "partition_of_unity", "grid": n, "value": dev})
        worst = max(worst, dev)
    checks.append(CheckResult("partition_of_unity", worst, 1e-12, worst < 1e-12))

    grid = Grid(cfg.d, max(cfg.grid_sizes))
    cutoffs = build_cutoffs(grid)
    corpus = _corpus(cfg, grid)

    def recon_err(f: SpectralField) -> float:
        dec = decompose(f, cutoffs)
        gap = dec.reconstruct().coeffs - f.coeffs
        return float(
            np.sqrt(np.sum(np.abs(gap) ** 2) / np.sum(np.abs(f.coeffs) ** 2))
        )

    errs = _map(recon_err, corpus, cfg.threads)
    detail += [
        {"check": "reconstruction", "field": i, "value": e} for i, e in enumerate(errs)
    ]
    worst = max(errs)
    checks.append(CheckResult("reconstruction", worst, 1e-10, worst <= 1e-10))

    def ortho_err(f: SpectralField) -> float:
        dec = decompose(f, cutoffs)
        f2 = lebesgue_norm(f, 2.0)
        worst_pair = 0.0
        for j in dec.indices():
            for k in dec.indices():
                if abs(j - k) < 2:
                    continue
                double = lp_block(dec.block(k), j, cutoffs)
                worst_pair = max(worst_pair, lebesgue_norm(double, 2.0) / f2)
        return worst_pair

    errs = _map(ortho_err, corpus, cfg.threads)
    worst = max(errs)
    checks.append(CheckResult("block_orthogonality", worst, 1e-12, worst <= 1e-12))

    pairs = list(zip(corpus[::2], corpus[1::2]))

    def product_err(pair) -> float:
        f, g = pair
        f = dealias(f)
        g = dealias(g)
        g_inf = lebesgue_norm(g, math.inf)
        f_l2 = lebesgue_norm(f, 2.0)
        worst_pair = 0.0
        for k in range(1, grid.j_max + 1):
            carrier = low_pass(g, k - 1, cutoffs)
            block = lp_block(f, k, cutoffs)
            prod = dealias(
                SpectralField(grid, values=carrier.values * block.values)
            )
            for j in range(-1, grid.j_max + 1):
                if abs(j - k) < 5:
                    continue
                err = lebesgue_norm(lp_block(prod, j, cutoffs), 2.0)
                worst_pair = max(worst_pair, err / (g_inf * f_l2))
        return worst_pair

    errs = _map(product_err, pairs, cfg.threads)
    worst = max(errs)
    checks.append(CheckResult("product_block_vanishing", worst, 1e-8, worst <= 1e-8))

    f, g = corpus[0], corpus[1]
    worst = 0.0
    for j in range(-1, grid.j_max + 1):
        combo = lp_block(2.0 * f + (-3.0) * g, j, cutoffs)
        split = 2.0 * lp_block(f, j, cutoffs) + (-3.0) * lp_block(g, j, cutoffs)
        gap = lebesgue_norm(combo - split, 2.0)
        scale = max(lebesgue_norm(split, 2.0), 1e-300)
        worst = max(worst, gap / scale)
    checks.append(CheckResult("block_linearity", worst, 1e-12, worst <= 1e-12))

    def lowpass_err(f: SpectralField) -> float:
        worst_j = 0.0
        f2 = lebesgue_norm(f, 2.0)
        for j in range(0, grid.j_max + 2):
            partial = lp_block(f, -1, cutoffs)
            for k in range(0, j):
                partial = partial + lp_block(f, k, cutoffs)
            gap = lebesgue_norm(low_pass(f, j, cutoffs) - partial, 2.0)
            worst_j = max(worst_j, gap / f2)
        return worst_j

    errs = _map(lowpass_err, corpus[:5], cfg.threads)
    worst = max(errs)
    checks.append(CheckResult("lowpass_partial_sum", worst, 1e-10, worst <= 1e-10))

    return SuiteResult("lp", checks, detail)


# -- Besov suite --------------------------------------------------------------


def suite_besov(cfg: RunConfig) -> SuiteResult:
    checks: list[CheckResult] = []
    detail: list[dict] = []
    grid = Grid(cfg.d, max(cfg.grid_sizes))
    cutoffs = build_cutoffs(grid)
    corpus = _corpus(cfg, grid, tag=1)
    params = BesovParams(0.5, 4.0, math.inf)

    def scaling_err(f: SpectralField) -> float:
        base = besov_norm(f, params, cutoffs)
        worst_l = 0.0
        for lam in (1e-3, 7.0, 1e3):
            got = besov_norm(lam * f, params, cutoffs)
            worst_l = max(worst_l, abs(got - lam * base) / (lam * base))
        return worst_l

    errs = _map(scaling_err, corpus, cfg.threads)
    worst = max(errs)
    checks.append(CheckResult("scaling_homogeneity", worst, 1e-12, worst <= 1e-12))

    def recompute_err(f: SpectralField) -> float:
        seq = besov_sequence(f, params, cutoffs)
        worst_e = 0.0
        for j, entry in seq.entries:
            mult = (
                cutoffs.chi_samples
                if j == -1
                else phi_profile(grid.k_mag * 2.0**-j)
            )
            block_vals = (
                np.real(
                    np.fft.ifftn(f.coeffs * mult, axes=tuple(range(1, grid.d + 1)))
                )
                * grid.npoints
            )
            mag = np.sqrt(np.sum(block_vals**2, axis=0))
            oracle = 2.0 ** (j * params.s) * float(
                (grid.cell_volume * np.sum(mag**params.p)) ** (1.0 / params.p)
            )
            worst_e = max(worst_e, abs(entry - oracle) / max(oracle, 1e-300))
        return worst_e

    errs = _map(recompute_err, corpus, cfg.threads)
    worst = max(errs)
    checks.append(CheckResult("per_block_recompute", worst, 1e-10, worst <= 1e-10))

    # calibrate the embedding constant on half the corpus, hold out the rest
    s, p = 0.5, 4.0
    lo = BesovParams(-s, p, math.inf)
    hi = BesovParams(-s - grid.d / p, math.inf, math.inf)
    half = len(corpus) // 2
    ratios_cal = [
        besov_norm(f, hi, cutoffs) / besov_norm(f, lo, cutoffs) for f in corpus[:half]
    ]
    c_emb = 1.25 * max(ratios_cal)
    ratios_test = [
        besov_norm(f, hi, cutoffs) / besov_norm(f, lo, cutoffs) for f in corpus[half:]
    ]
    worst = max(ratios_test) / c_emb
    detail += [
        {"check": "embedding", "field": i, "value": r}
        for i, r in enumerate(ratios_cal + ratios_test)
    ]
    checks.append(
        CheckResult(
            "embedding_into_sup_norm",
            worst,
            1.0,
            worst <= 1.0,
            note=f"calibrated C_emb={c_emb:.6g}",
        )
    )

    def hom_err(f: SpectralField) -> float:
        f0 = f.mean_removed()
        inh = dict(besov_sequence(f0, BesovParams(0.3, 3.0, math.inf), cutoffs).entries)
        hom = dict(
            besov_sequence(
                f0, BesovParams(0.3, 3.0, math.inf, homogeneous=True), cutoffs
            ).entries
        )
        worst_j = 0.0
        for j, v in inh.items():
            if j < 0:
                continue
            # blocks with empty grid support are dropped from the
            # homogeneous sequence; their inhomogeneous entries are zero
            other = hom.get(j, 0.0)
            worst_j = max(worst_j, abs(v - other) / max(v, 1e-300))
        return worst_j

    errs = _map(hom_err, corpus, cfg.threads)
    worst = max(errs)
    checks.append(CheckResult("hom_inhom_agreement", worst, 1e-12, worst <= 1e-12))

    f = corpus[0]
    s1, s2 = -0.5, 0.75
    seq1 = dict(besov_sequence(f, BesovParams(s1, 2.0, math.inf), cutoffs).entries)
    seq2 = dict(besov_sequence(f, BesovParams(s2, 2.0, math.inf), cutoffs).entries)
    worst = 0.0
    for j in seq1:
        if j >= 0 and seq1[j] > seq2[j] * (1.0 + 1e-12):
            worst = max(worst, seq1[j] / seq2[j] - 1.0)
    checks.append(CheckResult("entry_monotonicity", worst, 1e-12, worst <= 1e-12))

    return SuiteResult("besov", checks, detail)


# -- interpolation lemma suite ------------------------------------------------


def suite_lemmas(cfg: RunConfig) -> SuiteResult:
    checks: list[CheckResult] = []
    detail: list[dict] = []

    # fail fast (named) when the configured exponents leave their windows
    try:
        lp_window(cfg.lemma_s, cfg.lemma_p)
        grad_window(min(cfg.lemma_s, 0.99), cfg.lemma_q)
        checks.append(CheckResult("admissible_window", 0.0, 1.0, True))
    except ParameterError as err:
        checks.append(CheckResult("admissible_window", math.inf, 1.0, False, str(err)))
        return SuiteResult("lemmas", checks, detail)

    n = max(cfg.grid_sizes)
    grid = Grid(cfg.d, n)
    fine = Grid(cfg.d, 2 * n)
    cutoffs = build_cutoffs(grid)
    cutoffs_fine = build_cutoffs(fine)
    k_hi = min(n / 8.0, 5.0)
    corpus = [
        (
            random_band_limited(grid, seed=cfg.seed + 2000 + i, k_hi=k_hi),
            random_band_limited(fine, seed=cfg.seed + 2000 + i, k_hi=k_hi),
        )
        for i in range(cfg.corpus_size)
    ]
    s, p, q = cfg.lemma_s, cfg.lemma_p, cfg.lemma_q
    sq = min(cfg.lemma_s, 0.99)

    def eval_pair(pair):
        f, f_fine = pair
        rep = lp_norm_interpolation(f, s, p, cutoffs)
        rep_fine = lp_norm_interpolation(f_fine, s, p, cutoffs_fine)
        repg = grad_norm_interpolation(f, sq, q, cutoffs)
        return rep, rep_fine, repg

    results = _map(eval_pair, corpus, cfg.threads)

    worst = max(
        max(abs(r.exponent_sum() - 1.0), abs(rg.exponent_sum() - 1.0))
        for r, _, rg in results
    )
    checks.append(CheckResult("exponent_sum", worst, 1e-12, worst <= 1e-12))

    def homogeneity_err(pair):
        f, _ = pair
        base = lp_norm_interpolation(f, s, p, cutoffs).ratio
        baseg = grad_norm_interpolation(f, sq, q, cutoffs).ratio
        worst_l = 0.0
        for lam in (1e-3, 1e3):
            r = lp_norm_interpolation(lam * f, s, p, cutoffs).ratio
            rg = grad_norm_interpolation(lam * f, sq, q, cutoffs).ratio
            worst_l = max(worst_l, abs(r - base) / base, abs(rg - baseg) / baseg)
        return worst_l

    errs = _map(homogeneity_err, corpus[: max(4, cfg.corpus_size // 4)], cfg.threads)
    worst = max(errs)
    checks.append(CheckResult("ratio_homogeneity", worst, 1e-10, worst <= 1e-10))

    worst = 0.0
    for (f, _), (rep, _, repg) in zip(corpus, results):
        lap = lebesgue_norm(derivative(f, LAPLACIAN), 2.0)
        h1 = sobolev_norm(f, 1)
        ratio = (lap + h1) / h1
        if not (2.0**rep.k0 <= ratio < 2.0 ** (rep.k0 + 1)):
            worst = max(worst, 1.0)
        g2 = lebesgue_norm(derivative(f, GRAD), 2.0)
        ratio_g = (lap + g2) / g2
        if not (2.0**repg.k0 <= ratio_g < 2.0 ** (repg.k0 + 1)):
            worst = max(worst, 1.0)
    checks.append(CheckResult("k0_double_inequality", worst, 0.5, worst <= 0.5))

    worst = 0.0
    for rep, _, repg in results:
        worst = max(
            worst,
            rep.lhs / rep.block_sum - 1.0,
            repg.lhs / repg.block_sum - 1.0,
        )
    checks.append(CheckResult("block_sum_chain", worst, 1e-8, worst <= 1e-8))

    sup_coarse = max(r.ratio for r, _, _ in results)
    sup_fine = max(rf.ratio for _, rf, _ in results)
    drift = abs(sup_fine - sup_coarse) / sup_coarse
    detail += [
        {"check": "refinement", "grid": n, "value": sup_coarse},
        {"check": "refinement", "grid": 2 * n, "value": sup_fine},
    ]
    checks.append(
        CheckResult(
            "refinement_stability",
            drift,
            0.2,
            drift < 0.2,
            note=f"sup ratio {sup_coarse:.6g} -> {sup_fine:.6g}",
        )
    )

    worst = 0.0
    for s_test in np.linspace(0.05, 0.95, 19):
        pair = admissible_pair(float(s_test))
        worst = max(worst, abs(2.0 / pair.p + 2.0 / pair.q - 1.0))
    checks.append(CheckResult("admissible_pair_sweep", worst, 1e-12, worst <= 1e-12))

    return SuiteResult("lemmas", checks, detail)


# -- Bernstein suite ----------------------------------------------------------


def suite_bernstein(cfg: RunConfig) -> SuiteResult:
    checks: list[CheckResult] = []
    detail: list[dict] = []
    radii = (4.0, 8.0, 16.0)
    grid = Grid(cfg.d, 64)
    if cfg.corpus_size < 1:
        raise ParameterError("corpus_size must be >= 1 for verify suites")

    sups_annulus = []
    sups_low = []
    for r_hi in radii:
        corpus = [
            random_band_limited(
                grid, seed=cfg.seed + 3000 + int(r_hi) * 100 + i,
                k_lo=r_hi / 2.0, k_hi=r_hi,
            )
            for i in range(cfg.corpus_size)
        ]
        ann = [
            bernstein_ratio(f, Annulus(r_hi / 2.0, r_hi), (1,) + (0,) * (cfg.d - 1), 2.0)
            for f in corpus
        ]
        low = [
            bernstein_ratio(f, LowBall(r_hi), GRAD, 2.0, 4.0) for f in corpus
        ]
        sups_annulus.append(max(r.ratio for r in ann))
        sups_low.append(max(r.ratio for r in low))
        detail += [
            {"check": "annulus_ratio", "grid": r_hi, "field": i, "value": r.ratio}
            for i, r in enumerate(ann)
        ]
    var_ann = max(sups_annulus) / min(sups_annulus)
    var_low = max(sups_low) / min(sups_low)
    checks.append(
        CheckResult(
            "annulus_sweep_stability",
            var_ann,
            2.0,
            var_ann < 2.0,
            note=f"sup ratios {[f'{x:.4g}' for x in sups_annulus]}",
        )
    )
    # the mixed-exponent (p=2, q=4) form carries extra small-band sup
    # statistics, so its stability budget is wider than the annulus form's
    checks.append(
        CheckResult(
            "low_ball_sweep_stability",
            var_low,
            2.5,
            var_low < 2.5,
            note=f"sup ratios {[f'{x:.4g}' for x in sups_low]}",
        )
    )

    mode = single_mode(grid, (8,) + (0,) * (cfg.d - 1))
    rep = bernstein_ratio(mode, LowBall(8.0), GRAD, 2.0, 2.0)
    worst = abs(rep.ratio - 1.0)
    checks.append(CheckResult("single_mode_exact", worst, 1e-12, worst <= 1e-12))

    zero = SpectralField(grid, coeffs=np.zeros((1,) + grid.shape, dtype=complex))
    rep = bernstein_ratio(zero, LowBall(8.0), GRAD, 2.0, 2.0)
    ok = rep.degenerate
    checks.append(CheckResult("degenerate_flagged", 0.0 if ok else 1.0, 0.5, ok))

    return SuiteResult("bernstein", checks, detail)
