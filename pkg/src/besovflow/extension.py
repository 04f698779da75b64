"""Checkpoint / restart / join: the executable shadow of solution extension.

The pattern: a run is monitored up to a target horizon T*; if its
criterion verdict is finite, a restart is launched from a checkpoint at
some T** < T* and integrated over a local span chosen so that
T** + span > T*.  Joining the two segments must reproduce the direct run
bit-for-bit (the integrator is deterministic), which is checked by
``joint_run``; ``extend_beyond`` performs the licensed extension and
refuses when the verdict does not allow it.

The local existence span is not derivable from first principles here; it
is read from an empirical lookup table (span versus H^1 size of the
restart data), shipped with defaults and regenerable with
``estimate_local_span`` (see scripts/regen_span_table.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checkpoint import CheckpointError, decode_checkpoint, encode_checkpoint
from .fields import random_solenoidal
from .monitor import VERDICT_FINITE
from .spectral import Grid, ParameterError
from .systems import SystemSpec, simulate
from .trajectory import SystemState, Trajectory

# Empirical local-existence spans per system: rows (h1_cap, span), i.e. a
# restart whose H^1 norm is below h1_cap ran stably for at least `span`.
DEFAULT_SPAN_TABLE: dict[str, tuple[tuple[float, float], ...]] = {
    "nse": ((0.5, 1.0), (1.0, 0.6), (2.0, 0.3), (4.0, 0.15), (8.0, 0.08), (16.0, 0.04)),
    "mhd": ((0.5, 0.8), (1.0, 0.5), (2.0, 0.25), (4.0, 0.12), (8.0, 0.06), (16.0, 0.03)),
    "boussinesq": (
        (0.5, 0.8),
        (1.0, 0.5),
        (2.0, 0.25),
        (4.0, 0.12),
        (8.0, 0.06),
        (16.0, 0.03),
    ),
}


def local_span(kind: str, h1_norm: float, table=None) -> float:
    """Lookup span for restart data of the given H^1 size (conservative)."""
    rows = (table or DEFAULT_SPAN_TABLE)[kind]
    for cap, span in rows:
        if h1_norm <= cap:
            return span
    cap, span = rows[-1]
    # extrapolate past the table with the parabolic scaling span ~ 1/h1^2
    return span * (cap / h1_norm) ** 2


def estimate_local_span(
    spec: SystemSpec,
    h1_bound: float,
    n: int = 32,
    dt: float = 2e-3,
    trials: int = 3,
    seed: int = 7,
    growth_cap: float = 2.0,
    t_max: float = 2.0,
) -> float:
    """Re-derive one table row: integrate random data of the given H^1 size
    until the H^1 norm doubles (or t_max), and keep half the worst span."""
    from .spectral import lebesgue_norm, sobolev_norm

    grid = Grid(spec.d, n)
    worst = t_max
    for trial in range(trials):
        u0 = random_solenoidal(grid, seed=seed + trial)
        h1 = sobolev_norm(u0, 1)
        u0 = u0 * (h1_bound / h1)
        fields = {"u": u0}
        if spec.kind == "mhd":
            b0 = random_solenoidal(grid, seed=seed + 100 + trial)
            fields["b"] = b0 * (h1_bound / sobolev_norm(b0, 1))
        if spec.kind == "boussinesq":
            from .fields import random_scalar

            fields["theta"] = random_scalar(grid, seed=seed + 200 + trial)
        traj = simulate(
            spec,
            SystemState(0.0, fields),
            t_max,
            dt,
            sample_every=max(1, int(0.02 / dt)),
            norm_guard=1e4,
        )
        h1_series = traj.norm_series("u_h1")
        grown = np.nonzero(h1_series > growth_cap * h1_series[0])[0]
        span = traj.times[grown[0]] if grown.size else traj.times[-1]
        worst = min(worst, float(span))
    return 0.5 * worst


@dataclass
class ExtensionPlan:
    """Restart plan: horizon, restart time, local span, checkpoint bytes.

    Invariant: 0 < t_star_star < t_star < t_star_star + span.
    """

    t_star: float
    t_star_star: float
    span: float
    checkpoint: bytes

    def __post_init__(self):
        if not 0.0 < self.t_star_star < self.t_star:
            raise ParameterError(
                f"need 0 < t_star_star={self.t_star_star} < t_star={self.t_star}"
            )
        if not self.t_star_star + self.span > self.t_star:
            raise ParameterError(
                f"restart span {self.span} does not reach past t_star={self.t_star}"
            )


def plan_from_trajectory(
    traj: Trajectory,
    t_star: float,
    span: float | None = None,
    t_star_star: float | None = None,
    table=None,
) -> ExtensionPlan:
    """Choose a restart sample near t_star - 2 span / 3 and pack its state.

    The span defaults to the table lookup at the trajectory's running H^1
    sup; the restart time snaps to an actual sample time.
    """
    times = traj.times
    if t_star > times[-1] + 1e-12:
        raise ParameterError("t_star lies beyond the trajectory")
    if span is None:
        h1_sup = float(np.max(traj.norm_series("u_h1")))
        span = local_span(traj.kind, h1_sup, table)
    if t_star_star is None:
        t_star_star = t_star - 2.0 * span / 3.0
    candidates = [
        i
        for i, t in enumerate(times)
        if 0.0 < t < t_star and t + span > t_star + 1e-12
    ]
    if not candidates:
        raise ParameterError(
            f"no sample time allows a restart: span {span:g} is too short "
            f"for the sampling grid near t_star={t_star:g}"
        )
    best = min(candidates, key=lambda i: abs(times[i] - t_star_star))
    sample = traj.samples[best]
    blob = encode_checkpoint(traj.kind, sample.t, traj.seed, sample.state.fields)
    return ExtensionPlan(
        t_star=t_star, t_star_star=float(times[best]), span=float(span), checkpoint=blob
    )


def _state_from_checkpoint(blob: bytes) -> SystemState:
    data = decode_checkpoint(blob)
    for name in ("u", "b"):
        if name in data.fields:
            data.fields[name].divergence_free = True
    return SystemState(t=data.t, fields=data.fields)


@dataclass
class JointRunResult:
    joined: Trajectory
    direct: Trajectory
    max_deviation: float


def joint_run(
    spec: SystemSpec,
    initial: SystemState,
    plan: ExtensionPlan,
    dt: float,
    sample_every: int = 1,
    **simulate_kwargs,
) -> JointRunResult:
    """Run split-at-T** against direct-to-the-end and measure the gap.

    The split run serializes its T** state through the checkpoint codec
    (so the byte format is exercised) and restarts from the decoded copy.
    Returns both trajectories and the max relative L^2 deviation of the
    velocity at shared sample times.
    """
    for name, span in (("t_star_star", plan.t_star_star), ("span", plan.span)):
        k = span / dt
        if abs(k - round(k)) > 1e-9:
            raise ParameterError(f"dt={dt} does not divide {name}={span}")
    t_end = plan.t_star_star + plan.span
    seg1 = simulate(
        spec, initial, plan.t_star_star, dt, sample_every, **simulate_kwargs
    )
    last = seg1.samples[-1]
    blob = encode_checkpoint(spec.kind, last.t, seg1.seed, last.state.fields)
    restart_state = _state_from_checkpoint(blob)
    seg2 = simulate(spec, restart_state, t_end, dt, sample_every, **simulate_kwargs)
    joined = Trajectory(
        samples=seg1.samples + seg2.samples[1:],
        kind=seg1.kind,
        dt=dt,
        sample_every=sample_every,
        seed=seg1.seed,
        besov_params=seg1.besov_params,
        guard_tripped=seg1.guard_tripped or seg2.guard_tripped,
        guard_reason=seg1.guard_reason or seg2.guard_reason,
        config_hash=seg1.config_hash,
    )
    direct = simulate(spec, initial, t_end, dt, sample_every, **simulate_kwargs)
    deviation = _max_relative_deviation(joined, direct)
    return JointRunResult(joined=joined, direct=direct, max_deviation=deviation)


def _max_relative_deviation(a: Trajectory, b: Trajectory) -> float:
    worst = 0.0
    bt = {round(s.t, 12): s for s in b.samples}
    for sa in a.samples:
        sb = bt.get(round(sa.t, 12))
        if sb is None:
            continue
        ua = sa.state.fields["u"].coeffs
        ub = sb.state.fields["u"].coeffs
        scale = np.sqrt(np.sum(np.abs(ub) ** 2))
        gap = np.sqrt(np.sum(np.abs(ua - ub) ** 2))
        worst = max(worst, float(gap / max(scale, 1e-300)))
    return worst


@dataclass
class ExtensionResult:
    accepted: bool
    reason: str | None
    trajectory: Trajectory | None
    a_priori_bound: float | None


def extend_beyond(
    spec: SystemSpec,
    traj: Trajectory,
    plan: ExtensionPlan,
    verdict: str,
    **simulate_kwargs,
) -> ExtensionResult:
    """Extend a run past its horizon if (and only if) the verdict licenses it.

    A finite criterion verdict on (0, T*) comes with the a priori bound
    sup ||u||_H1^2 + int ||u||_H2^2, which is attached to the result; a
    diverging or guard-tripped verdict yields a refusal with its reason.
    """
    if verdict != VERDICT_FINITE:
        return ExtensionResult(
            accepted=False,
            reason=f"extension refused: monitor verdict was {verdict!r}",
            trajectory=None,
            a_priori_bound=None,
        )
    try:
        restart_state = _state_from_checkpoint(plan.checkpoint)
    except CheckpointError as err:
        return ExtensionResult(
            accepted=False,
            reason=f"extension refused: checkpoint unusable ({err})",
            trajectory=None,
            a_priori_bound=None,
        )
    if abs(restart_state.t - plan.t_star_star) > 1e-9:
        return ExtensionResult(
            accepted=False,
            reason="extension refused: checkpoint time does not match the plan",
            trajectory=None,
            a_priori_bound=None,
        )
    head = traj.slice(plan.t_star_star)
    t = head.times
    h1_sq = head.norm_series("u_h1") ** 2
    h2_sq = head.norm_series("u_h2") ** 2
    bound = float(np.max(h1_sq) + np.sum(0.5 * (h2_sq[1:] + h2_sq[:-1]) * np.diff(t)))
    tail = simulate(
        spec,
        restart_state,
        plan.t_star_star + plan.span,
        traj.dt,
        traj.sample_every,
        **simulate_kwargs,
    )
    extended = Trajectory(
        samples=head.samples + tail.samples[1:],
        kind=traj.kind,
        dt=traj.dt,
        sample_every=traj.sample_every,
        seed=traj.seed,
        besov_params=traj.besov_params,
        guard_tripped=tail.guard_tripped,
        guard_reason=tail.guard_reason,
        config_hash=traj.config_hash,
    )
    return ExtensionResult(
        accepted=True, reason=None, trajectory=extended, a_priori_bound=bound
    )
