"""Pseudospectral solvers behind one axiomatized-system interface.

A :class:`SystemSpec` packages what the monitors assume about a viscous
system: its kind and diffusivities, the six constants of its energy
inequalities, and a basic-energy bound M(t) determined by the initial
data.  Three concrete systems implement the interface on the torus, all
in velocity form with Leray projection enforcing incompressibility:

* ``nse``         incompressible Navier-Stokes (d = 2 or 3);
* ``mhd``         incompressible MHD, velocity u and magnetic field b;
* ``boussinesq``  2D Boussinesq, velocity u and buoyancy scalar theta.

Time stepping is classical four-stage Runge-Kutta in spectral space with
the 2/3-rule applied to every nonlinear product, so a trajectory is a
deterministic function of (initial data, dt).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .besov import BesovParams
from .littlewood_paley import CutoffPair, build_cutoffs
from .spectral import Grid, ParameterError, SpectralField
from .trajectory import (
    DEFAULT_BESOV_NORMS,
    SystemState,
    Trajectory,
    TrajectorySample,
    make_sample,
)

KINDS = ("nse", "mhd", "boussinesq")

# Largest |lambda| dt accepted per RK4 stage, inside the stability regions
# (2.79 on the negative real axis, 2*sqrt(2) on the imaginary axis).
RK4_STABILITY_MARGIN = 2.5


class CflError(RuntimeError):
    """dt exceeds the stability bound for the current state."""


@dataclass(frozen=True)
class EnergyBound:
    """Nondecreasing continuous bound M(t) = m0 + m1 t on sup ||u||_2."""

    m0: float
    m1: float = 0.0

    def __post_init__(self):
        if self.m0 < 0.0 or self.m1 < 0.0:
            raise ParameterError("energy bound coefficients must be nonnegative")

    def __call__(self, t) -> np.ndarray | float:
        return self.m0 + self.m1 * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class EnergyConstants:
    """The six constants (c1, c1', c2, c2', c3, c3') of the energy bounds."""

    c1: float
    c1p: float
    c2: float
    c2p: float
    c3: float
    c3p: float

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value <= 0.0:
                raise ParameterError(f"energy constant {name} must be positive")


def default_constants(nu: float) -> EnergyConstants:
    """Dissipation constants equal to nu, Young-split partners 1/nu."""
    return EnergyConstants(nu, 1.0 / nu, nu, 1.0 / nu, nu, 1.0 / nu)


@dataclass
class SystemSpec:
    """A viscous system together with its assumed energy structure."""

    kind: str
    d: int
    nu: float
    eta: float | None = None
    kappa: float | None = None
    constants: EnergyConstants | None = None
    energy_bound: EnergyBound | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.nu <= 0.0:
            raise ParameterError("viscosity must be positive")
        if self.kind == "mhd":
            if self.eta is None:
                self.eta = self.nu
            if self.eta <= 0.0:
                raise ParameterError("magnetic diffusivity must be positive")
        if self.kind == "boussinesq":
            if self.d != 2:
                raise ParameterError("the Boussinesq system is 2D at desk scale")
            if self.kappa is None:
                self.kappa = self.nu
            if self.kappa <= 0.0:
                raise ParameterError("thermal diffusivity must be positive")
        if self.constants is None:
            self.constants = default_constants(self.nu)

    def field_names(self) -> tuple[str, ...]:
        if self.kind == "mhd":
            return ("u", "b")
        if self.kind == "boussinesq":
            return ("u", "theta")
        return ("u",)

    def max_diffusivity(self) -> float:
        return max(
            self.nu,
            self.eta if self.eta is not None else 0.0,
            self.kappa if self.kappa is not None else 0.0,
        )


def default_energy_bound(spec: SystemSpec, initial: SystemState) -> EnergyBound:
    """The standard basic-energy bound determined by the initial data.

    NSE: sup ||u||_2 <= ||u0||_2.  MHD: the combined field energy bounds
    each piece.  Boussinesq: buoyancy forcing can feed the velocity at a
    rate bounded by the (conserved-in-norm) scalar, so M grows linearly.
    """
    from .spectral import lebesgue_norm

    u0 = lebesgue_norm(initial.fields["u"], 2.0)
    if spec.kind == "nse":
        return EnergyBound(u0)
    if spec.kind == "mhd":
        b0 = lebesgue_norm(initial.fields["b"], 2.0)
        return EnergyBound(math.sqrt(u0**2 + b0**2))
    theta0 = lebesgue_norm(initial.fields["theta"], 2.0)
    return EnergyBound(u0, theta0)


# -- right-hand sides ---------------------------------------------------------


def _grad_values(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Physical-space partials, shape (components, d, n, ...)."""
    spatial = tuple(range(2, grid.d + 2))
    stacked = 1j * grid.k[np.newaxis, :] * coeffs[:, np.newaxis]
    return np.real(np.fft.ifftn(stacked, axes=spatial)) * grid.npoints


def _values(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    spatial = tuple(range(1, grid.d + 1))
    return np.real(np.fft.ifftn(coeffs, axes=spatial)) * grid.npoints


def _coeffs(grid: Grid, values: np.ndarray) -> np.ndarray:
    spatial = tuple(range(1, grid.d + 1))
    return np.fft.fftn(values, axes=spatial) / grid.npoints


def _advect(grid: Grid, carrier: np.ndarray, carried: np.ndarray) -> np.ndarray:
    """Dealiased coefficients of (carrier . grad) carried."""
    vals = _values(grid, carrier)
    grads = _grad_values(grid, carried)
    conv = np.einsum("m...,im...->i...", vals, grads)
    return _coeffs(grid, conv) * grid.dealias_mask


def _project(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    ksq = np.where(grid.k_sq == 0.0, 1.0, grid.k_sq)
    k_dot = np.sum(grid.k * coeffs, axis=0)
    return coeffs - grid.k * (k_dot / ksq)


def _rhs_coeffs(
    spec: SystemSpec, grid: Grid, state: dict[str, np.ndarray]
) -> dict[str, np.ndarray]:
    u = state["u"]
    if spec.kind == "nse":
        du = -_advect(grid, u, u) - spec.nu * grid.k_sq * u
        return {"u": _project(grid, du)}
    if spec.kind == "mhd":
        b = state["b"]
        du = -_advect(grid, u, u) + _advect(grid, b, b) - spec.nu * grid.k_sq * u
        db = -_advect(grid, u, b) + _advect(grid, b, u) - spec.eta * grid.k_sq * b
        return {"u": _project(grid, du), "b": _project(grid, db)}
    theta = state["theta"]
    buoyancy = np.zeros_like(u)
    buoyancy[-1] = theta[0]
    du = -_advect(grid, u, u) + buoyancy - spec.nu * grid.k_sq * u
    dtheta = -_advect(grid, u, theta) - spec.kappa * grid.k_sq * theta
    return {"u": _project(grid, du), "theta": dtheta}


def rhs(spec: SystemSpec, state: SystemState) -> SystemState:
    """Time derivative of a state (same field names, same grid)."""
    grid = state.grid
    if grid.d != spec.d:
        raise ParameterError("state dimension does not match the system spec")
    raw = {name: f.coeffs for name, f in state.fields.items()}
    out = _rhs_coeffs(spec, grid, raw)
    fields = {
        name: SpectralField(grid, coeffs=c, divergence_free=name in ("u", "b"))
        for name, c in out.items()
    }
    return SystemState(t=state.t, fields=fields)


def cfl_limit(spec: SystemSpec, state: SystemState) -> float:
    """Largest stable dt for the current state under RK4."""
    grid = state.grid
    k_kept = math.sqrt(grid.d) * grid.n / 3.0
    lam_visc = spec.max_diffusivity() * k_kept**2
    umax = float(np.max(state.fields["u"].magnitude()))
    if spec.kind == "mhd":
        umax = max(umax, float(np.max(state.fields["b"].magnitude())))
    lam_adv = umax * k_kept
    lam = max(lam_visc, lam_adv)
    if lam == 0.0:
        return math.inf
    return RK4_STABILITY_MARGIN / lam


def step(spec: SystemSpec, state: SystemState, dt: float) -> SystemState:
    """One classical RK4 step; raises CflError instead of going unstable."""
    if dt <= 0.0:
        raise ParameterError("dt must be positive")
    limit = cfl_limit(spec, state)
    if dt > limit:
        raise CflError(
            f"dt={dt:g} exceeds the stability bound {limit:g} "
            f"(kind={spec.kind}, n={state.grid.n})"
        )
    grid = state.grid
    c0 = {name: f.coeffs for name, f in state.fields.items()}

    def f_of(c):
        return _rhs_coeffs(spec, grid, c)

    k1 = f_of(c0)
    k2 = f_of({n: c0[n] + 0.5 * dt * k1[n] for n in c0})
    k3 = f_of({n: c0[n] + 0.5 * dt * k2[n] for n in c0})
    k4 = f_of({n: c0[n] + dt * k3[n] for n in c0})
    new = {
        n: c0[n] + (dt / 6.0) * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]) for n in c0
    }
    fields = {
        name: SpectralField(grid, coeffs=c, divergence_free=name in ("u", "b"))
        for name, c in new.items()
    }
    return SystemState(t=state.t + dt, fields=fields)


def prepare_initial(spec: SystemSpec, state: SystemState) -> SystemState:
    """Dealias all fields and verify the divergence-free side condition."""
    from .spectral import dealias

    fields = {}
    for name, f in state.fields.items():
        g = dealias(f)
        if name in ("u", "b"):
            if g.divergence_error() > 1e-10:
                raise ParameterError(
                    f"initial field {name!r} is not divergence-free "
                    f"(relative error {g.divergence_error():.2e})"
                )
            g.divergence_free = True
        fields[name] = g
    missing = set(spec.field_names()) - set(fields)
    if missing:
        raise ParameterError(f"initial state is missing fields {sorted(missing)}")
    return SystemState(t=state.t, fields=fields)


def simulate(
    spec: SystemSpec,
    initial: SystemState,
    t_end: float,
    dt: float,
    sample_every: int = 1,
    *,
    besov_params: tuple[BesovParams, ...] = DEFAULT_BESOV_NORMS,
    cutoffs: CutoffPair | None = None,
    norm_guard: float = 1e6,
    seed: int = 0,
    config_hash: str = "",
) -> Trajectory:
    """Integrate from ``initial.t`` to ``t_end``, sampling cached norms.

    dt must divide the span.  The run stops early (with a diagnostic on
    the returned trajectory) if a watched norm exceeds ``norm_guard`` or
    turns non-finite; stepping raises CflError rather than running an
    unstable step.
    """
    if sample_every < 1:
        raise ParameterError("sample_every must be >= 1")
    span = t_end - initial.t
    if span < -1e-12:
        raise ParameterError("t_end lies before the initial time")
    steps = int(round(span / dt)) if span > 0 else 0
    if abs(steps * dt - span) > 1e-9 * max(1.0, abs(span)):
        raise ParameterError(f"dt={dt} does not divide the span {span}")
    state = prepare_initial(spec, initial)
    if cutoffs is None:
        cutoffs = build_cutoffs(state.grid)

    samples = [make_sample(state, cutoffs, besov_params)]
    traj = Trajectory(
        samples=samples,
        kind=spec.kind,
        dt=dt,
        sample_every=sample_every,
        seed=seed,
        besov_params=besov_params,
        config_hash=config_hash,
    )
    guard = _guard_reason(samples[0], norm_guard)
    if guard:
        traj.guard_tripped = True
        traj.guard_reason = guard
        return traj
    for i in range(1, steps + 1):
        state = step(spec, state, dt)
        if i % sample_every == 0 or i == steps:
            sample = make_sample(state, cutoffs, besov_params)
            samples.append(sample)
            guard = _guard_reason(sample, norm_guard)
            if guard:
                traj.guard_tripped = True
                traj.guard_reason = guard
                break
    return traj


def _guard_reason(sample: TrajectorySample, norm_guard: float) -> str | None:
    for key in ("u_l2", "u_h2", "grad_u_linf"):
        value = sample.norms[key]
        if not math.isfinite(value):
            return f"{key} became non-finite at t={sample.t:g}"
        if value > norm_guard:
            return f"{key}={value:g} exceeded the overflow guard {norm_guard:g} at t={sample.t:g}"
    return None
