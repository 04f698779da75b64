"""Deterministic field constructors: presets and seeded random spectra."""

from __future__ import annotations

import numpy as np

from .spectral import (
    Grid,
    ParameterError,
    SpectralField,
    dealias,
    lebesgue_norm,
    leray_project,
)


def taylor_green(grid: Grid, nu: float = 0.0, t: float = 0.0) -> SpectralField:
    """2D Taylor-Green vortex u = (sin x cos y, -cos x sin y) e^(-2 nu t).

    The advective nonlinearity of this field is a pure gradient, so under
    Leray projection it decays by pure diffusion; that makes it the solver
    regression oracle.
    """
    if grid.d != 2:
        raise ParameterError("the Taylor-Green preset is two-dimensional")
    x, y = grid.x
    amp = np.exp(-2.0 * nu * t)
    values = np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)]) * amp
    return SpectralField(grid, values=values, divergence_free=True)


def single_mode(grid: Grid, wavevector, amplitude: float = 1.0) -> SpectralField:
    """Scalar cosine mode cos(xi . x) with the given integer wavevector."""
    xi = np.asarray(wavevector, dtype=float)
    if xi.shape != (grid.d,):
        raise ParameterError(f"wavevector must have {grid.d} components")
    phase = np.tensordot(xi, grid.x, axes=(0, 0))
    return SpectralField(grid, values=amplitude * np.cos(phase))


def field_from_callable(grid: Grid, *component_fns) -> SpectralField:
    """Evaluate callables of the coordinate meshes into a field."""
    values = np.stack([np.asarray(fn(*grid.x), dtype=float) for fn in component_fns])
    return SpectralField(grid, values=values)


def _spectral_envelope(grid: Grid, peak_k: float) -> np.ndarray:
    kmag = grid.k_mag
    env = (kmag / peak_k) ** 2 * np.exp(-((kmag / peak_k) ** 2))
    env[(0,) * grid.d] = 0.0
    return env


def random_solenoidal(
    grid: Grid,
    seed: int,
    amplitude: float = 1.0,
    peak_k: float = 3.0,
    max_k: float | None = None,
) -> SpectralField:
    """Seeded random divergence-free velocity with a bump energy spectrum.

    Mean-free, dealiased, and rescaled so the L^2 norm equals ``amplitude``.
    """
    rng = np.random.default_rng(seed)
    white = rng.standard_normal((grid.d,) + grid.shape)
    coeffs = np.fft.fftn(white, axes=tuple(range(1, grid.d + 1))) / grid.npoints
    coeffs *= _spectral_envelope(grid, peak_k)
    if max_k is not None:
        coeffs[:, grid.k_mag > max_k] = 0.0
    f = dealias(leray_project(SpectralField(grid, coeffs=coeffs)))
    norm = lebesgue_norm(f, 2.0)
    if norm == 0.0:
        raise ParameterError("random spectrum came out empty; widen the band")
    return f * (amplitude / norm)


def random_scalar(
    grid: Grid, seed: int, amplitude: float = 1.0, peak_k: float = 3.0
) -> SpectralField:
    """Seeded random mean-free scalar with the same bump spectrum."""
    rng = np.random.default_rng(seed)
    white = rng.standard_normal((1,) + grid.shape)
    coeffs = np.fft.fftn(white, axes=tuple(range(1, grid.d + 1))) / grid.npoints
    coeffs *= _spectral_envelope(grid, peak_k)
    f = dealias(SpectralField(grid, coeffs=coeffs))
    norm = lebesgue_norm(f, 2.0)
    if norm == 0.0:
        raise ParameterError("random spectrum came out empty")
    return f * (amplitude / norm)


def random_band_limited(
    grid: Grid,
    seed: int,
    components: int = 1,
    k_lo: float = 1.0,
    k_hi: float | None = None,
    amplitude: float = 1.0,
) -> SpectralField:
    """Seeded random field supported in the annulus k_lo <= |xi| <= k_hi.

    Used for corpora: the coefficients depend only on the seed and the
    band, so the same function can be re-sampled on a finer grid.
    """
    if k_hi is None:
        k_hi = grid.n / 4.0
    rng = np.random.default_rng(seed)
    mask = (grid.k_mag >= k_lo) & (grid.k_mag <= k_hi)
    coeffs = np.zeros((components,) + grid.shape, dtype=complex)
    # Draw per-mode amplitudes over the canonical sorted mode list, so the
    # same seed + band defines the same function on any grid containing it.
    freqs = grid.freqs
    where = {int(v): i for i, v in enumerate(freqs)}
    modes = sorted(tuple(int(freqs[i]) for i in row) for row in np.argwhere(mask))
    for mode in modes:
        if mode <= tuple(-x for x in mode):
            continue
        if any(-m not in where for m in mode):
            continue  # mirror of a -n/2 component is off-grid
        draw = rng.standard_normal(2 * components)
        loc = tuple(where[m] for m in mode)
        neg = tuple(where[-m] for m in mode)
        for c in range(components):
            z = (draw[2 * c] + 1j * draw[2 * c + 1]) / 2.0
            coeffs[(c,) + loc] = z
            coeffs[(c,) + neg] = np.conj(z)
    f = SpectralField(grid, coeffs=coeffs)
    norm = lebesgue_norm(f, 2.0)
    if norm == 0.0:
        raise ParameterError("band contains no grid modes")
    return f * (amplitude / norm)
