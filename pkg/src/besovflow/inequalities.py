"""Multiplicative interpolation bounds and criterion exponent arithmetic.

Two evaluators measure both sides of the Besov-Sobolev interpolation
bounds that drive the monitors:

* ``lp_norm_interpolation`` bounds ||f||_p by a negative-index sup-Besov
  norm against H^1 and H^2 norms, valid for p in (2 + 2/s, 2 + 4/s);
* ``grad_norm_interpolation`` bounds ||grad f||_q by a positive-index
  sup-Besov norm against ||grad f||_2 and ||grad f||_{H^1}, valid for q
  in (2, 2 + 2/(1-s)).

Each report separates the explicit, computable part of the constant (a
max of two dyadic geometric-series factors) from the dimensional factor,
which is never hard-coded: corpus sweeps calibrate it empirically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .besov import BesovParams, besov_norm
from .littlewood_paley import CutoffPair, lp_block
from .spectral import (
    GRAD,
    LAPLACIAN,
    ParameterError,
    SpectralField,
    derivative,
    lebesgue_norm,
    sobolev_norm,
)

FAMILY_NEG = 1  # criterion in a negative-regularity sup-Besov norm
FAMILY_POS = 2  # criterion in a positive-regularity sup-Besov norm


@dataclass
class InterpolationReport:
    """Both sides of one interpolation bound for one field.

    ``rhs_factors`` lists (name, value, exponent); exponents sum to 1, so
    ``ratio = lhs / prod(value**exponent)`` is scale-invariant.  ``k0`` is
    the dyadic splitting index actually selected, and ``block_sum`` the
    numerically evaluated three-piece split that must dominate the lhs.
    """

    lhs: float
    rhs_factors: list[tuple[str, float, float]]
    constant: float
    k0: int
    ratio: float
    block_sum: float
    pieces: dict[str, float] = field(default_factory=dict)

    def exponent_sum(self) -> float:
        return sum(e for _, _, e in self.rhs_factors)


def lp_window(s: float, p: float) -> tuple[float, float]:
    """Positive dyadic exponents (a, b) of the L^p bound, or a rejection.

    a = s(1 - 2/p) - 2/p and b = 4/p - s(1 - 2/p); both are positive
    exactly when p lies in the open window (2 + 2/s, 2 + 4/s).
    """
    if not s > 0.0:
        raise ParameterError(f"regularity index must be positive, got s={s}")
    a = s * (1.0 - 2.0 / p) - 2.0 / p
    b = 4.0 / p - s * (1.0 - 2.0 / p)
    if not (a > 0.0 and b > 0.0):
        raise ParameterError(
            f"p={p} outside the admissible window ({2 + 2 / s:g}, {2 + 4 / s:g}) for s={s}"
        )
    return a, b


def grad_window(s: float, q: float) -> tuple[float, float]:
    """Positive dyadic exponents (a, b) of the gradient bound."""
    if not s < 1.0:
        raise ParameterError(f"regularity index must be < 1, got s={s}")
    a = (1.0 - s) * (1.0 - 2.0 / q)
    b = 2.0 / q - (1.0 - s) * (1.0 - 2.0 / q)
    if not (a > 0.0 and b > 0.0):
        raise ParameterError(
            f"q={q} outside the admissible window (2, {2 + 2 / (1 - s):g}) for s={s}"
        )
    return a, b


def _explicit_constant(a: float, b: float) -> float:
    return max(1.0 / (2.0**a - 1.0), 1.0 / (1.0 - 2.0**-b))


def _split_index(top: float, base: float) -> int:
    """Unique integer k0 >= 0 with 2^k0 <= (top + base)/base < 2^(k0+1)."""
    return int(math.floor(math.log2((top + base) / base)))


def lp_norm_interpolation(
    f: SpectralField, s: float, p: float, cutoffs: CutoffPair
) -> InterpolationReport:
    """Evaluate ||f||_p against Besov^(-s) x H^1 x H^2 with explicit pieces."""
    a, b = lp_window(s, p)
    lhs = lebesgue_norm(f, p)
    if lhs == 0.0:
        raise ParameterError("interpolation report needs a nonzero field")
    bes = besov_norm(f, BesovParams(-s, math.inf, math.inf), cutoffs)
    h1 = sobolev_norm(f, 1)
    h2 = sobolev_norm(f, 2)
    lap_l2 = lebesgue_norm(derivative(f, LAPLACIAN), 2.0)
    k0 = _split_index(lap_l2, h1)

    factors = [
        ("besov_neg_s_inf_inf", bes, 1.0 - 2.0 / p),
        ("h1", h1, b),
        ("h2", h2, a),
    ]
    prod = math.prod(v**e for _, v, e in factors)
    low = lebesgue_norm(lp_block(f, -1, cutoffs), p)
    mid = sum(
        lebesgue_norm(lp_block(f, j, cutoffs), p) for j in range(0, k0 + 1)
    )
    high = sum(
        lebesgue_norm(lp_block(f, j, cutoffs), p)
        for j in range(k0 + 1, f.grid.j_max + 1)
    )
    return InterpolationReport(
        lhs=lhs,
        rhs_factors=factors,
        constant=_explicit_constant(a, b),
        k0=k0,
        ratio=lhs / prod,
        block_sum=low + mid + high,
        pieces={"low": low, "mid": mid, "high": high},
    )


def grad_norm_interpolation(
    f: SpectralField, s: float, q: float, cutoffs: CutoffPair
) -> InterpolationReport:
    """Evaluate ||grad f||_q against Besov^s x ||grad f||_2 x ||grad f||_H1."""
    a, b = grad_window(s, q)
    grad = derivative(f, GRAD)
    lhs = lebesgue_norm(grad, q)
    grad_l2 = lebesgue_norm(grad, 2.0)
    if grad_l2 == 0.0:
        raise ParameterError("interpolation report needs a nonzero gradient")
    bes = besov_norm(f, BesovParams(s, math.inf, math.inf), cutoffs)
    grad_h1 = sobolev_norm(grad, 1)
    lap_l2 = lebesgue_norm(derivative(f, LAPLACIAN), 2.0)
    k0 = _split_index(lap_l2, grad_l2)

    factors = [
        ("besov_s_inf_inf", bes, 1.0 - 2.0 / q),
        ("grad_l2", grad_l2, b),
        ("grad_h1", grad_h1, a),
    ]
    prod = math.prod(v**e for _, v, e in factors)
    low = lebesgue_norm(derivative(lp_block(f, -1, cutoffs), GRAD), q)
    mid = sum(
        lebesgue_norm(derivative(lp_block(f, j, cutoffs), GRAD), q)
        for j in range(0, k0 + 1)
    )
    high = sum(
        lebesgue_norm(derivative(lp_block(f, j, cutoffs), GRAD), q)
        for j in range(k0 + 1, f.grid.j_max + 1)
    )
    return InterpolationReport(
        lhs=lhs,
        rhs_factors=factors,
        constant=_explicit_constant(a, b),
        k0=k0,
        ratio=lhs / prod,
        block_sum=low + mid + high,
        pieces={"low": low, "mid": mid, "high": high},
    )


@dataclass
class LogBoundReport:
    """Time-integrated logarithmic gradient bound over one window.

    ``sup_grad_integral`` is int ||grad u||_inf dt, ``besov_integral`` is
    int ||u||_{B^1_inf,inf} dt, ``third_deriv_integral`` is
    int ||grad lap u||_2 dt, and ``ratio`` divides the first by
    besov_integral * log(third_deriv_integral + e) + 1.
    """

    t1: float
    t2: float
    sup_grad_integral: float
    besov_integral: float
    third_deriv_integral: float
    ratio: float


def _trapezoid(t: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def integrated_log_gradient_bound(
    samples, t1: float, t2: float, cutoffs: CutoffPair | None = None
) -> LogBoundReport:
    """Trapezoid-in-time evaluation of the logarithmic gradient bound.

    ``samples`` is a sequence of trajectory samples carrying cached norms
    (keys ``grad_u_linf``, ``besov_1_inf_inf_inh``, ``grad_lap_u_l2``);
    missing values are recomputed from the stored state when ``cutoffs``
    is given.
    """
    window = [s for s in samples if t1 - 1e-12 <= s.t <= t2 + 1e-12]
    if len(window) < 2 or not t1 < t2:
        raise ParameterError("log bound needs a nonempty window t1 < t2")
    t = np.array([s.t for s in window])
    a = np.array([_sample_norm(s, "grad_u_linf", cutoffs) for s in window])
    bkey = BesovParams(1.0, math.inf, math.inf).key()
    b = np.array([_sample_norm(s, bkey, cutoffs) for s in window])
    dv = np.array([_sample_norm(s, "grad_lap_u_l2", cutoffs) for s in window])
    big_a = _trapezoid(t, a)
    big_b = _trapezoid(t, b)
    big_d = _trapezoid(t, dv)
    denom = big_b * math.log(big_d + math.e) + 1.0
    return LogBoundReport(
        t1=t1,
        t2=t2,
        sup_grad_integral=big_a,
        besov_integral=big_b,
        third_deriv_integral=big_d,
        ratio=big_a / denom,
    )


def _sample_norm(sample, key: str, cutoffs: CutoffPair | None) -> float:
    if key in sample.norms:
        return sample.norms[key]
    u = sample.state.fields["u"]
    if key == "grad_u_linf":
        return lebesgue_norm(derivative(u, GRAD), math.inf)
    if key == "grad_lap_u_l2":
        return lebesgue_norm(derivative(u, "grad_laplacian"), 2.0)
    if key.startswith("besov_") and cutoffs is not None:
        return besov_norm(u, BesovParams(1.0, math.inf, math.inf), cutoffs)
    raise ParameterError(f"norm {key!r} not cached and not recomputable here")


@dataclass(frozen=True)
class AdmissiblePair:
    """Conjugate exponent pair with 2/p + 2/q = 1 inside both windows."""

    s: float
    p: float
    q: float

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ParameterError(f"s must be in (0, 1), got {self.s}")
        if not (2.0 + 2.0 / self.s < self.p < 2.0 + 4.0 / self.s):
            raise ParameterError(f"p={self.p} outside its window for s={self.s}")
        if not (2.0 < self.q < 2.0 + 2.0 / (self.s + 1.0)):
            raise ParameterError(f"q={self.q} outside its window for s={self.s}")
        if abs(2.0 / self.p + 2.0 / self.q - 1.0) > 1e-12:
            raise ParameterError("pair does not satisfy 2/p + 2/q = 1")


def admissible_pair(s: float) -> AdmissiblePair:
    """Choose the midpoint of the feasible p-interval and solve for q.

    Feasibility couples the two windows through 2/p + 2/q = 1: q stays
    inside (2, 2 + 2/(s+1)) exactly when p > 2s + 4, so the p-interval is
    (max(2 + 2/s, 2s + 4), 2 + 4/s).  The midpoint keeps maximal margin
    from the endpoint singularities of the explicit constants.
    """
    if not 0.0 < s < 1.0:
        raise ParameterError(f"s must be in (0, 1), got {s}")
    p_lo = max(2.0 + 2.0 / s, 2.0 * s + 4.0)
    p_hi = 2.0 + 4.0 / s
    p = 0.5 * (p_lo + p_hi)
    q = 2.0 * p / (p - 2.0)
    return AdmissiblePair(s=s, p=p, q=q)


def criterion_exponent(family: int, s: float, p: float, d: int) -> float:
    """Solve the criterion relation for q, rejecting inadmissible triples.

    Family 1: 2/q + d/p = 1 - s with s in (0, 1) and p > d/(1-s).
    Family 2: 2/q + d/p = 1 + s with s in (-1, 1] and p > d/(1+s).
    The endpoint (p, q, s) = (inf, inf, -1) is excluded by fiat.
    """
    if d not in (2, 3):
        raise ParameterError(f"dimension must be 2 or 3, got {d}")
    if family == FAMILY_NEG:
        if not 0.0 < s < 1.0:
            raise ParameterError(f"family 1 needs s in (0, 1), got {s}")
        gap = 1.0 - s
    elif family == FAMILY_POS:
        if s == -1.0:
            raise ParameterError(
                "the endpoint triple (p, q, s) = (inf, inf, -1) and all other "
                "s = -1 cases are excluded"
            )
        if not -1.0 < s <= 1.0:
            raise ParameterError(f"family 2 needs s in (-1, 1], got {s}")
        gap = 1.0 + s
    else:
        raise ParameterError(f"criterion family must be 1 or 2, got {family}")
    if not p > d / gap:
        raise ParameterError(f"p={p} must exceed {d / gap:g} for s={s}, d={d}")
    inv_q = (gap - d / p) / 2.0
    if inv_q <= 0.0:
        raise ParameterError("relation leaves no room for a positive 1/q")
    return 1.0 / inv_q


def validate_criterion(family: int, s: float, p: float, q: float, d: int) -> None:
    """Check that a full (s, p, q) triple satisfies its family's relation."""
    expected = criterion_exponent(family, s, p, d)
    if not (q >= 1.0):
        raise ParameterError(f"q must be >= 1, got {q}")
    if abs(1.0 / q - 1.0 / expected) > 1e-9:
        raise ParameterError(
            f"triple (s={s}, p={p}, q={q}) violates the family-{family} "
            f"relation; expected q={expected:g}"
        )
