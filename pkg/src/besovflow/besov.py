"""Besov norms from per-block Lebesgue norms.

The inhomogeneous norm is the l^q norm over j >= -1 of 2^(j s) ||Delta_j f||_p.
The homogeneous variant on the torus removes the spatial mean, then uses
the annulus multiplier phi(2^-j |xi|) at every index: since the smallest
nonzero wavevector has |xi| = 1, only blocks with j >= -1 survive, so both
variants share the entries with j >= 0 and differ only at j = -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .littlewood_paley import CutoffPair, lp_block, phi_profile
from .spectral import ParameterError, SpectralField, lebesgue_norm


@dataclass(frozen=True)
class BesovParams:
    """Regularity index s, integrability p, summation q (inf by default)."""

    s: float
    p: float
    q: float = math.inf
    homogeneous: bool = False

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise ParameterError(f"Besov p must be >= 1, got {self.p}")
        if not (self.q >= 1.0):
            raise ParameterError(f"Besov q must be >= 1, got {self.q}")

    def key(self) -> str:
        """Stable label used for cached norm maps and CSV headers."""
        tag = "hom" if self.homogeneous else "inh"
        return f"besov_{_fmt(self.s)}_{_fmt(self.p)}_{_fmt(self.q)}_{tag}"


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:g}"


@dataclass
class BesovSequence:
    """Entries (j, 2^(j s) ||Delta_j f||_p) feeding the norm."""

    entries: list[tuple[int, float]]
    params: BesovParams

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.entries])


def besov_sequence(
    f: SpectralField, params: BesovParams, cutoffs: CutoffPair
) -> BesovSequence:
    """Per-block weighted norms; homogeneous mode is mean-free and phi-only."""
    grid = f.grid
    entries: list[tuple[int, float]] = []
    if params.homogeneous:
        g = f.mean_removed()
        for j in range(-1, grid.j_max + 1):
            mult = phi_profile(grid.k_mag * 2.0**-j)
            if not np.any(mult != 0.0):
                continue
            block = SpectralField(grid, coeffs=g.coeffs * mult)
            entries.append((j, 2.0 ** (j * params.s) * lebesgue_norm(block, params.p)))
    else:
        for j in range(-1, grid.j_max + 1):
            block = lp_block(f, j, cutoffs)
            entries.append((j, 2.0 ** (j * params.s) * lebesgue_norm(block, params.p)))
    return BesovSequence(entries=entries, params=params)


def besov_norm(f: SpectralField, params: BesovParams, cutoffs: CutoffPair) -> float:
    """l^q norm of the block sequence; q = inf takes the max entry."""
    seq = besov_sequence(f, params, cutoffs).values()
    if seq.size == 0:
        return 0.0
    if math.isinf(params.q):
        return float(np.max(seq))
    return float(np.sum(seq**params.q) ** (1.0 / params.q))
