"""Real periodic fields on the torus [0, 2*pi)^d with spectral operators.

Everything in this package lives on a uniform grid over the 2*pi-periodic
torus.  This is a deliberate discretization choice: the analysis we monitor
is usually stated on the whole space, but all the operators involved are
frequency-local, so the dyadic machinery transfers to the torus unchanged
and every Fourier multiplier becomes exact on the grid.

Coefficient convention: ``f(x) = sum_xi c(xi) exp(i xi . x)`` over integer
wavevectors xi with components in [-n/2, n/2), so a unit cosine mode carries
two coefficients of value 1/2.  Fields are real; the coefficient cache is
conjugate-symmetric at all times.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

GRAD = "grad"
LAPLACIAN = "laplacian"
GRAD_LAPLACIAN = "grad_laplacian"


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, 2*pi)^d with integer wavevectors.

    ``d`` must be 2 or 3 and ``n`` (points per dimension) a power of two
    >= 8.  Wavevector ordering is fixed: serialization uses lexicographic
    order on the shifted indices xi + n/2 so restarts are bit-stable.
    """

    d: int
    n: int

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ParameterError(f"dimension must be 2 or 3, got {self.d}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ParameterError(
                f"points per dimension must be a power of two >= 8, got {self.n}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def npoints(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        return (2.0 * np.pi / self.n) ** self.d

    @property
    def volume(self) -> float:
        return (2.0 * np.pi) ** self.d

    @property
    def freqs(self) -> np.ndarray:
        """1D integer frequencies in FFT order."""
        return _freqs(self)

    @property
    def k(self) -> np.ndarray:
        """Wavevector component meshes, shape (d, n, ..., n)."""
        return _wavevectors(self)

    @property
    def k_sq(self) -> np.ndarray:
        return _k_sq(self)

    @property
    def k_mag(self) -> np.ndarray:
        return _k_mag(self)

    @property
    def x(self) -> np.ndarray:
        """Physical coordinate meshes, shape (d, n, ..., n)."""
        return _coords(self)

    @property
    def dealias_mask(self) -> np.ndarray:
        """True where every |xi_m| <= n/3 (the 2/3 rule)."""
        return _dealias_mask(self)

    @property
    def j_max(self) -> int:
        """Largest dyadic block index that can be nonzero on this grid."""
        return int(math.ceil(math.log2(self.n / 2))) + 1


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def _freqs(grid: Grid) -> np.ndarray:
    return _freeze(np.fft.fftfreq(grid.n, 1.0 / grid.n).astype(np.int64))


@lru_cache(maxsize=None)
def _wavevectors(grid: Grid) -> np.ndarray:
    axes = np.meshgrid(*([_freqs(grid).astype(float)] * grid.d), indexing="ij")
    return _freeze(np.stack(axes))


@lru_cache(maxsize=None)
def _k_sq(grid: Grid) -> np.ndarray:
    return _freeze(np.sum(_wavevectors(grid) ** 2, axis=0))


@lru_cache(maxsize=None)
def _k_mag(grid: Grid) -> np.ndarray:
    return _freeze(np.sqrt(_k_sq(grid)))


@lru_cache(maxsize=None)
def _coords(grid: Grid) -> np.ndarray:
    xs = np.linspace(0.0, 2.0 * np.pi, grid.n, endpoint=False)
    return _freeze(np.stack(np.meshgrid(*([xs] * grid.d), indexing="ij")))


@lru_cache(maxsize=None)
def _dealias_mask(grid: Grid) -> np.ndarray:
    keep = np.abs(_wavevectors(grid)) <= grid.n / 3.0
    return _freeze(np.logical_and.reduce(keep, axis=0))


def make_grid(d: int, n: int) -> Grid:
    """Build a torus grid; rejects d outside {2, 3} and non-power-of-two n."""
    return Grid(d, n)


class SpectralField:
    """Real (vector) field with a consistent Fourier coefficient cache.

    Arrays have shape (components, n, ..., n).  Construct with exactly one
    of ``values`` or ``coeffs``; the other representation is derived lazily
    and cached.
    """

    __slots__ = ("grid", "divergence_free", "_values", "_coeffs")

    def __init__(self, grid: Grid, *, values=None, coeffs=None, divergence_free=False):
        if (values is None) == (coeffs is None):
            raise ParameterError("provide exactly one of values= or coeffs=")
        self.grid = grid
        self.divergence_free = divergence_free
        if values is not None:
            values = np.asarray(values, dtype=float)
            if values.ndim == grid.d:
                values = values[np.newaxis]
            if values.ndim != grid.d + 1 or values.shape[1:] != grid.shape:
                raise ParameterError(
                    f"values shape {values.shape} does not match grid {grid.shape}"
                )
            self._values = values
            self._coeffs = None
        else:
            coeffs = np.asarray(coeffs, dtype=complex)
            if coeffs.ndim == grid.d:
                coeffs = coeffs[np.newaxis]
            if coeffs.ndim != grid.d + 1 or coeffs.shape[1:] != grid.shape:
                raise ParameterError(
                    f"coeffs shape {coeffs.shape} does not match grid {grid.shape}"
                )
            self._coeffs = coeffs
            self._values = None

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        return tuple(range(1, self.grid.d + 1))

    @property
    def components(self) -> int:
        base = self._coeffs if self._coeffs is not None else self._values
        return base.shape[0]

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = (
                np.fft.fftn(self._values, axes=self.spatial_axes) / self.grid.npoints
            )
        return self._coeffs

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            back = np.fft.ifftn(self._coeffs, axes=self.spatial_axes)
            self._values = np.real(back) * self.grid.npoints
        return self._values

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean magnitude across components."""
        return np.sqrt(np.sum(self.values**2, axis=0))

    def copy(self) -> "SpectralField":
        return SpectralField(
            self.grid, coeffs=self.coeffs.copy(), divergence_free=self.divergence_free
        )

    def mean_removed(self) -> "SpectralField":
        """Same field with the zero Fourier mode set to zero."""
        c = self.coeffs.copy()
        c[(slice(None),) + (0,) * self.grid.d] = 0.0
        return SpectralField(self.grid, coeffs=c, divergence_free=self.divergence_free)

    def conjugate_symmetry_error(self) -> float:
        """max |c(-xi) - conj(c(xi))| over all modes and components."""
        mirrored = self.coeffs
        for ax in self.spatial_axes:
            mirrored = np.roll(np.flip(mirrored, axis=ax), 1, axis=ax)
        return float(np.max(np.abs(mirrored - np.conj(self.coeffs))))

    def divergence_error(self) -> float:
        """max_xi |xi . c(xi)| relative to the coefficient l2 size."""
        if self.components != self.grid.d:
            raise ParameterError("divergence needs exactly d components")
        div = np.sum(self.grid.k * self.coeffs, axis=0)
        scale = np.sqrt(np.sum(np.abs(self.coeffs) ** 2))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(div)) / scale)

    def _binary(self, other, op):
        if not isinstance(other, SpectralField) or other.grid != self.grid:
            return NotImplemented
        flag = self.divergence_free and other.divergence_free
        return SpectralField(
            self.grid, coeffs=op(self.coeffs, other.coeffs), divergence_free=flag
        )

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return SpectralField(
            self.grid,
            coeffs=self.coeffs * scalar,
            divergence_free=self.divergence_free,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def field_from_values(grid: Grid, values, divergence_free=False) -> SpectralField:
    return SpectralField(grid, values=values, divergence_free=divergence_free)


def field_from_coeffs(grid: Grid, coeffs, divergence_free=False) -> SpectralField:
    return SpectralField(grid, coeffs=coeffs, divergence_free=divergence_free)


def _multi_indices(d: int, max_order: int):
    for alpha in itertools.product(range(max_order + 1), repeat=d):
        if sum(alpha) <= max_order:
            yield alpha


def _exact_indices(d: int, order: int):
    for alpha in itertools.product(range(order + 1), repeat=d):
        if sum(alpha) == order:
            yield alpha


def derivative(f: SpectralField, order) -> SpectralField:
    """Spectral derivative: multi-index tuple or one of grad / laplacian /
    grad_laplacian.

    ``grad`` of a c-component field returns c*d components ordered
    [d_1 f_1 .. d_d f_1, d_1 f_2, ...].  ``laplacian`` multiplies by
    -|xi|^2 componentwise.
    """
    grid = f.grid
    if order == GRAD:
        k = grid.k
        c = f.coeffs
        out = np.empty((f.components * grid.d,) + grid.shape, dtype=complex)
        for i in range(f.components):
            for m in range(grid.d):
                out[i * grid.d + m] = 1j * k[m] * c[i]
        return SpectralField(grid, coeffs=out)
    if order == LAPLACIAN:
        return SpectralField(
            grid,
            coeffs=-grid.k_sq * f.coeffs,
            divergence_free=f.divergence_free,
        )
    if order == GRAD_LAPLACIAN:
        return derivative(derivative(f, LAPLACIAN), GRAD)
    if isinstance(order, tuple):
        if len(order) != grid.d or any(a < 0 or int(a) != a for a in order):
            raise ParameterError(f"bad multi-index {order} for d={grid.d}")
        mult = np.ones(grid.shape, dtype=complex)
        for m, a in enumerate(order):
            if a:
                mult = mult * (1j * grid.k[m]) ** a
        return SpectralField(grid, coeffs=f.coeffs * mult)
    raise ParameterError(f"unknown derivative order {order!r}")


def leray_project(f: SpectralField) -> SpectralField:
    """Project onto divergence-free fields: c <- (I - xi xi^T/|xi|^2) c.

    The zero mode is left unchanged.  Scalar input is rejected.
    """
    grid = f.grid
    if f.components != grid.d:
        raise ParameterError(
            f"Leray projection needs a d-vector field, got {f.components} components"
        )
    c = f.coeffs
    ksq = np.where(grid.k_sq == 0.0, 1.0, grid.k_sq)
    k_dot_c = np.sum(grid.k * c, axis=0)
    proj = c - grid.k * (k_dot_c / ksq)
    return SpectralField(grid, coeffs=proj, divergence_free=True)


def lebesgue_norm(f: SpectralField, p: float) -> float:
    """L^p norm by the uniform rectangle rule; p = inf is the grid max.

    The rectangle rule is spectrally accurate for smooth periodic
    integrands; the grid max underestimates the true sup by a
    resolution-dependent amount, which downstream tolerances absorb.
    """
    if not (p >= 1.0):
        raise ParameterError(f"Lebesgue exponent must be >= 1, got {p}")
    mag = f.magnitude()
    if math.isinf(p):
        return float(np.max(mag))
    return float((f.grid.cell_volume * np.sum(mag**p)) ** (1.0 / p))


@lru_cache(maxsize=None)
def _sobolev_weight(grid: Grid, k: int) -> np.ndarray:
    w = np.zeros(grid.shape)
    kv = _wavevectors(grid)
    for alpha in _multi_indices(grid.d, k):
        term = np.ones(grid.shape)
        for m, a in enumerate(alpha):
            if a:
                term = term * kv[m] ** (2 * a)
        w += term
    return _freeze(w)


def sobolev_norm(f: SpectralField, k: int) -> float:
    """H^k norm (sum over all partials of order <= k) computed by Parseval.

    Exact for band-limited fields.  k must be in {0, 1, 2, 3}.
    """
    if k not in (0, 1, 2, 3):
        raise ParameterError(f"Sobolev order must be in 0..3, got {k}")
    w = _sobolev_weight(f.grid, k)
    total = np.sum(w * np.abs(f.coeffs) ** 2)
    return float(np.sqrt(f.grid.volume * total))


def dealias(f: SpectralField) -> SpectralField:
    """Zero every coefficient with any |xi_m| > n/3.  Idempotent."""
    return SpectralField(
        f.grid,
        coeffs=f.coeffs * f.grid.dealias_mask,
        divergence_free=f.divergence_free,
    )


def l2_inner(f: SpectralField, g: SpectralField) -> float:
    """Discrete L^2 inner product (rectangle rule, summed over components)."""
    if f.grid != g.grid or f.components != g.components:
        raise ParameterError("inner product needs fields on the same grid")
    return float(f.grid.cell_volume * np.sum(f.values * g.values))


def parseval_l2(f: SpectralField) -> float:
    """L^2 norm from the coefficient side: sqrt((2 pi)^d sum |c|^2)."""
    return float(np.sqrt(f.grid.volume * np.sum(np.abs(f.coeffs) ** 2)))
