"""Dyadic frequency blocks built from smooth radial cutoffs.

The cutoff pair (chi, phi) is constructed concretely from a C-infinity
smoothstep: chi falls from 1 to 0 over [1, 4/3] and phi(r) = chi(r/2) -
chi(r).  The telescoping definition makes the partition of unity

    chi(r) + sum_{j>=0} phi(2^-j r) = 1

exact up to floating point (halving the argument is exact), and it places
the supports inside {r <= 4/3} and {3/4 <= r <= 8/3} respectively.  Blocks
act as Fourier multipliers; no convolution kernel is ever materialized.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .spectral import Grid, ParameterError, SpectralField, derivative, lebesgue_norm

CHI_SUPPORT_RADIUS = 4.0 / 3.0
PHI_SUPPORT = (0.75, 8.0 / 3.0)


def _smooth_step_down(u) -> np.ndarray:
    """C-infinity transition: 1 for u <= 0, 0 for u >= 1."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    rising = np.zeros_like(u)
    falling = np.zeros_like(u)
    np.exp(np.divide(-1.0, u, out=rising, where=u > 0.0), out=rising, where=u > 0.0)
    v = 1.0 - u
    np.exp(np.divide(-1.0, v, out=falling, where=v > 0.0), out=falling, where=v > 0.0)
    out = falling / (rising + falling)
    out[u <= 0.0] = 1.0
    out[u >= 1.0] = 0.0
    return out


def chi_profile(r) -> np.ndarray:
    """Low-frequency cutoff: 1 on {r <= 1}, 0 on {r >= 4/3}, smooth between."""
    r = np.asarray(r, dtype=float)
    out = _smooth_step_down((r - 1.0) * 3.0)
    return out.reshape(r.shape) if r.shape else out[0]


def phi_profile(r) -> np.ndarray:
    """Annulus cutoff phi(r) = chi(r/2) - chi(r), supported in [3/4, 8/3]."""
    r = np.asarray(r, dtype=float)
    return chi_profile(r / 2.0) - chi_profile(r)


@dataclass(frozen=True)
class CutoffPair:
    """Radial profiles chi, phi plus their samples on one grid's magnitudes."""

    grid: Grid
    chi_samples: np.ndarray = field(repr=False)
    phi_samples: np.ndarray = field(repr=False)

    def chi(self, r) -> np.ndarray:
        return chi_profile(r)

    def phi(self, r) -> np.ndarray:
        return phi_profile(r)

    def block_multiplier(self, j: int) -> np.ndarray:
        """Multiplier of the j-th dyadic block on this grid."""
        if j <= -2:
            return np.zeros(self.grid.shape)
        if j == -1:
            return self.chi_samples
        return phi_profile(self.grid.k_mag * 2.0**-j)

    def lowpass_multiplier(self, j: int) -> np.ndarray:
        return chi_profile(self.grid.k_mag * 2.0**-j)


def build_cutoffs(grid: Grid) -> CutoffPair:
    """Sample the cutoff pair on a grid's frequency magnitudes."""
    r = grid.k_mag
    return CutoffPair(grid=grid, chi_samples=chi_profile(r), phi_samples=phi_profile(r))


def lp_block(f: SpectralField, j: int, cutoffs: CutoffPair) -> SpectralField:
    """Dyadic block: chi(|xi|) for j = -1, phi(2^-j |xi|) for j >= 0.

    j <= -2 returns the zero field by definition; j beyond the grid's
    resolved scales comes out zero automatically.
    """
    if cutoffs.grid != f.grid:
        raise ParameterError("cutoffs were built for a different grid")
    mult = cutoffs.block_multiplier(j)
    return SpectralField(
        f.grid, coeffs=f.coeffs * mult, divergence_free=f.divergence_free
    )


def low_pass(f: SpectralField, j: int, cutoffs: CutoffPair) -> SpectralField:
    """Low-pass chi(2^-j |xi|); equals the block sum over indices < j."""
    if j < 0:
        raise ParameterError(f"low-pass index must be >= 0, got {j}")
    if cutoffs.grid != f.grid:
        raise ParameterError("cutoffs were built for a different grid")
    mult = cutoffs.lowpass_multiplier(j)
    return SpectralField(
        f.grid, coeffs=f.coeffs * mult, divergence_free=f.divergence_free
    )


@dataclass
class DyadicDecomposition:
    """The family of blocks of one field, indexed j = -1 .. j_max."""

    source: SpectralField
    blocks: list[SpectralField]
    j_max: int

    def block(self, j: int) -> SpectralField:
        if j < -1 or j > self.j_max:
            raise ParameterError(f"block index {j} outside [-1, {self.j_max}]")
        return self.blocks[j + 1]

    def indices(self) -> range:
        return range(-1, self.j_max + 1)

    def reconstruct(self) -> SpectralField:
        total = self.blocks[0]
        for b in self.blocks[1:]:
            total = total + b
        return total


def decompose(f: SpectralField, cutoffs: CutoffPair) -> DyadicDecomposition:
    """Split a field into its dyadic blocks (always reconstructable).

    j_max is the largest index whose multiplier touches the grid; the sum
    of the kept blocks reproduces the source because the partition of
    unity saturates at the grid's top frequency.
    """
    grid = f.grid
    blocks = [lp_block(f, -1, cutoffs)]
    j_max = -1
    for j in range(0, grid.j_max + 1):
        mult = cutoffs.block_multiplier(j)
        blocks.append(
            SpectralField(grid, coeffs=f.coeffs * mult, divergence_free=f.divergence_free)
        )
        if np.any(mult != 0.0):
            j_max = j
    return DyadicDecomposition(source=f, blocks=blocks[: j_max + 2], j_max=j_max)


@dataclass(frozen=True)
class LowBall:
    """Spectral support declared inside {|xi| <= radius}."""

    radius: float


@dataclass(frozen=True)
class Annulus:
    """Spectral support declared inside {r_lo <= |xi| <= r_hi}."""

    r_lo: float
    r_hi: float


@dataclass
class BernsteinReport:
    """Observed ratio for one band-limited field.

    ``ratio`` is the left side divided by the band-scaled right side, so a
    band-independent constant shows up as a stable ratio across radii.
    """

    form: str
    ratio: float
    numerator: float
    denominator: float
    degenerate: bool = False


def _band_violation(f: SpectralField, band) -> float:
    mag = f.grid.k_mag
    if isinstance(band, LowBall):
        outside = mag > band.radius
    else:
        outside = (mag < band.r_lo) | (mag > band.r_hi)
    total = np.sqrt(np.sum(np.abs(f.coeffs) ** 2))
    if total == 0.0:
        return 0.0
    bad = np.sqrt(np.sum(np.abs(f.coeffs[:, outside]) ** 2))
    return float(bad / total)


def _alpha_order(alpha) -> int:
    return 1 if alpha == "grad" else sum(alpha)


def _sup_partial_norm(f: SpectralField, order: int, p: float) -> float:
    """sup over all partials of the given total order of their L^p norms."""
    best = 0.0
    for beta in itertools.product(range(order + 1), repeat=f.grid.d):
        if sum(beta) != order:
            continue
        best = max(best, lebesgue_norm(derivative(f, beta), p))
    return best


def bernstein_ratio(
    f: SpectralField, band, alpha, p: float, q: float | None = None
) -> BernsteinReport:
    """Empirical Bernstein ratio for a field supported in a declared band.

    Low-ball form: ||d^alpha f||_q / (R^(|alpha| + d(1/p - 1/q)) ||f||_p).
    Annulus form:  ||f||_p / (R^-|alpha| sup_{|beta|=|alpha|} ||d^beta f||_p).

    ``alpha`` is a multi-index tuple or "grad" (full gradient).  The band
    membership of the spectrum is verified first.
    """
    if q is None:
        q = p
    if isinstance(band, LowBall):
        if p > q:
            raise ParameterError(f"low-ball form needs p <= q, got p={p} q={q}")
    elif isinstance(band, Annulus):
        if q != p:
            raise ParameterError("annulus form uses a single exponent: pass q == p")
    else:
        raise ParameterError(f"band must be LowBall or Annulus, got {band!r}")
    if _band_violation(f, band) > 1e-12:
        raise ParameterError("field has spectral content outside the declared band")

    if lebesgue_norm(f, 2.0) == 0.0:
        return BernsteinReport(
            form="low" if isinstance(band, LowBall) else "annulus",
            ratio=0.0,
            numerator=0.0,
            denominator=0.0,
            degenerate=True,
        )

    order = _alpha_order(alpha)
    d = f.grid.d
    if isinstance(band, LowBall):
        num = lebesgue_norm(derivative(f, alpha), q)
        scale = band.radius ** (order + d * (1.0 / p - 1.0 / q))
        den = scale * lebesgue_norm(f, p)
        return BernsteinReport("low", num / den, num, den)
    num = lebesgue_norm(f, p)
    if alpha == "grad":
        sup_norm = lebesgue_norm(derivative(f, "grad"), p)
    else:
        sup_norm = _sup_partial_norm(f, order, p)
    den = band.r_hi**-order * sup_norm
    return BernsteinReport("annulus", num / den, num, den)
