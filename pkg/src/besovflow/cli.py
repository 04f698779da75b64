"""Batch command-line entry points.

Subcommands: ``verify`` (property suites), ``simulate`` (run + store a
trajectory), ``monitor`` (criteria/residuals over a stored trajectory),
``extend`` (checkpoint-restart past a horizon).  Exit codes: 0 success,
1 invariant violation or refused extension, 2 usage or parameter error.
Flags can also come from ``BESOVFLOW_*`` environment variables.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import ConfigError, RunConfig, load_config
from .extension import extend_beyond, plan_from_trajectory
from .fields import random_scalar, random_solenoidal, taylor_green
from .monitor import run_monitor
from .reporting import write_json, write_monitor_outputs, write_suite_outputs
from .spectral import Grid, ParameterError
from .suites import SUITES, run_suite
from .systems import SystemSpec, default_energy_bound, simulate
from .trajectory import SystemState, load_trajectory, save_trajectory

CONTEXT_SETTINGS = {"auto_envvar_prefix": "BESOVFLOW"}


def _common(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="Run configuration file.")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default="out", help="Output directory.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override the config seed.")(fn)
    fn = click.option("--threads", type=int, default=None, help="Worker threads for corpus suites.")(fn)
    return fn


def _load(config_path, seed, threads) -> RunConfig:
    try:
        return load_config(config_path, overrides={"seed": seed, "threads": threads})
    except (ConfigError, ParameterError) as err:
        raise click.UsageError(str(err))


def _system(cfg: RunConfig) -> SystemSpec:
    return SystemSpec(kind=cfg.kind, d=cfg.d, nu=cfg.nu, eta=cfg.eta, kappa=cfg.kappa)


def _initial_state(cfg: RunConfig) -> SystemState:
    grid = Grid(cfg.d, cfg.n)
    if cfg.ic == "taylor_green":
        u0 = taylor_green(grid)
    else:
        u0 = random_solenoidal(
            grid, seed=cfg.seed, amplitude=cfg.ic_amplitude, peak_k=cfg.ic_peak_k
        )
    fields = {"u": u0}
    if cfg.kind == "mhd":
        fields["b"] = random_solenoidal(
            grid, seed=cfg.seed + 1, amplitude=0.5 * cfg.ic_amplitude, peak_k=cfg.ic_peak_k
        )
    if cfg.kind == "boussinesq":
        fields["theta"] = random_scalar(
            grid, seed=cfg.seed + 2, amplitude=0.5 * cfg.ic_amplitude, peak_k=cfg.ic_peak_k
        )
    return SystemState(t=0.0, fields=fields)


@click.group(context_settings=CONTEXT_SETTINGS)
def main():
    """Dyadic analysis suites and criterion monitors for periodic solvers."""


@main.command()
@click.argument("suite", type=click.Choice(SUITES))
@_common
def verify(suite, config_path, out_dir, seed, threads):
    """Run a property suite on a seeded corpus; exit 1 on any violation."""
    cfg = _load(config_path, seed, threads)
    try:
        result = run_suite(suite, cfg)
    except (ParameterError, ConfigError) as err:
        raise click.UsageError(str(err))
    write_suite_outputs(result, out_dir, cfg.config_hash(), cfg.seed)
    for check in result.checks:
        status = "ok" if check.passed else "VIOLATION"
        click.echo(f"{suite}/{check.name}: {status} (worst {check.worst:.3g}, tol {check.tolerance:g})")
    if not result.passed:
        click.echo(f"suite {suite} failed: {', '.join(result.failed_names())}", err=True)
        sys.exit(1)


@main.command(name="simulate")
@_common
def simulate_cmd(config_path, out_dir, seed, threads):
    """Integrate the configured system and store the trajectory."""
    cfg = _load(config_path, seed, threads)
    spec = _system(cfg)
    try:
        state = _initial_state(cfg)
        traj = simulate(
            spec,
            state,
            cfg.t_end,
            cfg.dt,
            cfg.sample_every,
            norm_guard=cfg.norm_guard,
            seed=cfg.seed,
            config_hash=cfg.config_hash(),
        )
    except ParameterError as err:
        raise click.UsageError(str(err))
    out = Path(out_dir)
    save_trajectory(traj, out)
    for line in cfg.canonical_text().splitlines():
        click.echo(f"resolved {line}")
    click.echo(
        f"stored {len(traj.samples)} samples in {out}"
        + (f" (guard tripped: {traj.guard_reason})" if traj.guard_tripped else "")
    )


@main.command(name="monitor")
@click.argument("trajectory_dir", type=click.Path(exists=True))
@_common
def monitor_cmd(trajectory_dir, config_path, out_dir, seed, threads):
    """Run all configured criterion monitors over a stored trajectory."""
    cfg = _load(config_path, seed, threads)
    if not cfg.criteria:
        raise click.UsageError("monitor needs at least one criterion_N in the config")
    traj = load_trajectory(trajectory_dir)
    spec = _system(cfg)
    spec.energy_bound = default_energy_bound(spec, traj.samples[0].state)
    try:
        report = run_monitor(
            traj,
            list(cfg.criteria),
            spec,
            epsilon=cfg.epsilon,
            divergence_factor=cfg.divergence_factor,
            gronwall_c=cfg.gronwall_c,
        )
    except ParameterError as err:
        raise click.UsageError(str(err))
    write_monitor_outputs(report, out_dir)
    click.echo(f"verdict: {report.verdict}")
    for res in report.criteria:
        click.echo(
            f"criterion family {res.crit.family} (s={res.crit.s:g}, p={res.crit.p:g}, "
            f"q={res.crit.q:g}): integral {res.value:.6g}, {res.verdict}"
        )


@main.command(name="extend")
@click.argument("trajectory_dir", type=click.Path(exists=True))
@_common
def extend_cmd(trajectory_dir, config_path, out_dir, seed, threads):
    """Extend a stored run past t_star when the monitor verdict allows it."""
    cfg = _load(config_path, seed, threads)
    if not cfg.criteria:
        raise click.UsageError("extend needs at least one criterion_N in the config")
    traj = load_trajectory(trajectory_dir)
    spec = _system(cfg)
    spec.energy_bound = default_energy_bound(spec, traj.samples[0].state)
    t_star = cfg.t_star if cfg.t_star is not None else float(traj.times[-1])
    try:
        report = run_monitor(
            traj,
            list(cfg.criteria),
            spec,
            epsilon=cfg.epsilon,
            divergence_factor=cfg.divergence_factor,
            gronwall_c=cfg.gronwall_c,
        )
        plan = plan_from_trajectory(
            traj, t_star, span=cfg.local_span, t_star_star=cfg.t_star_star
        )
        result = extend_beyond(spec, traj, plan, report.verdict, seed=cfg.seed)
    except ParameterError as err:
        raise click.UsageError(str(err))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(
        out / "extension.json",
        {
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
            "verdict": report.verdict,
            "accepted": result.accepted,
            "reason": result.reason,
            "t_star": plan.t_star,
            "t_star_star": plan.t_star_star,
            "span": plan.span,
            "a_priori_bound": result.a_priori_bound,
        },
    )
    if result.accepted:
        save_trajectory(result.trajectory, out / "extended")
        click.echo(
            f"extended past t_star={t_star:g} to t={result.trajectory.times[-1]:g} "
            f"(a priori bound {result.a_priori_bound:.6g})"
        )
    else:
        click.echo(result.reason, err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
