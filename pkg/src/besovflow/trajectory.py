"""Trajectory samples with cached norms, and their on-disk layout.

A stored trajectory directory contains:

    manifest.json             system metadata, seed, config hash
    norms.csv                 one row per sample, full-precision floats
    checkpoints/sample_*.ckpt full state per sample (binary format of
                              :mod:`besovflow.checkpoint`)

Norm cache keys (CSV columns) name the quantity: ``u_l2``, ``u_h1``,
``u_h2``, ``u_h3``, ``grad_u_l2``, ``lap_u_l2``, ``grad_lap_u_l2``,
``grad_u_l3``, ``grad_u_l4``, ``grad_u_linf``, ``u2_grad_u2`` (the
quadrature of |u|^2 |grad u|^2), ``hess_weighted_rhs`` (the quadrature of
|grad u| |hess u|^2 + |grad u|^4), plus one ``besov_*`` column per
requested Besov norm.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .besov import BesovParams, besov_norm
from .checkpoint import read_checkpoint, write_checkpoint
from .littlewood_paley import CutoffPair, build_cutoffs
from .spectral import (
    GRAD,
    GRAD_LAPLACIAN,
    LAPLACIAN,
    Grid,
    ParameterError,
    SpectralField,
    derivative,
    lebesgue_norm,
    sobolev_norm,
)

BASE_NORM_KEYS = (
    "u_l2",
    "u_h1",
    "u_h2",
    "u_h3",
    "grad_u_l2",
    "lap_u_l2",
    "grad_lap_u_l2",
    "grad_u_l3",
    "grad_u_l4",
    "grad_u_linf",
    "u2_grad_u2",
    "hess_weighted_rhs",
)

# Norms every monitor relies on; always cached along a trajectory.
DEFAULT_BESOV_NORMS = (
    BesovParams(1.0, math.inf, math.inf),
    BesovParams(0.0, math.inf, math.inf),
)


@dataclass
class SystemState:
    """Named fields of one PDE system at one time."""

    t: float
    fields: dict[str, SpectralField]

    @property
    def grid(self) -> Grid:
        return next(iter(self.fields.values())).grid

    def velocity(self) -> SpectralField:
        return self.fields["u"]


@dataclass
class TrajectorySample:
    """One sampled state plus its cached norm map."""

    t: float
    state: SystemState
    norms: dict[str, float]


@dataclass
class Trajectory:
    """Immutable-once-emitted sample list with integration metadata."""

    samples: list[TrajectorySample]
    kind: str
    dt: float
    sample_every: int
    seed: int = 0
    besov_params: tuple[BesovParams, ...] = DEFAULT_BESOV_NORMS
    guard_tripped: bool = False
    guard_reason: str | None = None
    config_hash: str = ""

    @property
    def grid(self) -> Grid:
        return self.samples[0].state.grid

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def norm_series(self, key: str) -> np.ndarray:
        return np.array([s.norms[key] for s in self.samples])

    def slice(self, t_max: float) -> "Trajectory":
        """Samples with t <= t_max (tolerant to roundoff at the boundary)."""
        kept = [s for s in self.samples if s.t <= t_max + 1e-12]
        return Trajectory(
            samples=kept,
            kind=self.kind,
            dt=self.dt,
            sample_every=self.sample_every,
            seed=self.seed,
            besov_params=self.besov_params,
            guard_tripped=self.guard_tripped,
            guard_reason=self.guard_reason,
            config_hash=self.config_hash,
        )


def compute_norms(
    state: SystemState,
    cutoffs: CutoffPair,
    besov_params: tuple[BesovParams, ...] = DEFAULT_BESOV_NORMS,
) -> dict[str, float]:
    """Evaluate the full norm cache for one state (velocity field)."""
    u = state.velocity()
    grad = derivative(u, GRAD)
    lap = derivative(u, LAPLACIAN)
    hess = derivative(grad, GRAD)
    umag = u.magnitude()
    gmag = grad.magnitude()
    hmag = hess.magnitude()
    cell = u.grid.cell_volume
    norms = {
        "u_l2": lebesgue_norm(u, 2.0),
        "u_h1": sobolev_norm(u, 1),
        "u_h2": sobolev_norm(u, 2),
        "u_h3": sobolev_norm(u, 3),
        "grad_u_l2": lebesgue_norm(grad, 2.0),
        "lap_u_l2": lebesgue_norm(lap, 2.0),
        "grad_lap_u_l2": lebesgue_norm(derivative(u, GRAD_LAPLACIAN), 2.0),
        "grad_u_l3": lebesgue_norm(grad, 3.0),
        "grad_u_l4": lebesgue_norm(grad, 4.0),
        "grad_u_linf": lebesgue_norm(grad, math.inf),
        "u2_grad_u2": float(cell * np.sum(umag**2 * gmag**2)),
        "hess_weighted_rhs": float(cell * np.sum(gmag * hmag**2 + gmag**4)),
    }
    for params in besov_params:
        norms[params.key()] = besov_norm(u, params, cutoffs)
    return norms


def make_sample(
    state: SystemState,
    cutoffs: CutoffPair,
    besov_params: tuple[BesovParams, ...] = DEFAULT_BESOV_NORMS,
) -> TrajectorySample:
    return TrajectorySample(
        t=state.t, state=state, norms=compute_norms(state, cutoffs, besov_params)
    )


def save_trajectory(traj: Trajectory, out_dir) -> None:
    """Write manifest, norms CSV, and one checkpoint per sample."""
    out = Path(out_dir)
    (out / "checkpoints").mkdir(parents=True, exist_ok=True)
    keys = sorted(traj.samples[0].norms)
    manifest = {
        "schema_version": 1,
        "kind": traj.kind,
        "d": traj.grid.d,
        "n": traj.grid.n,
        "dt": traj.dt,
        "sample_every": traj.sample_every,
        "seed": traj.seed,
        "config_hash": traj.config_hash,
        "guard_tripped": traj.guard_tripped,
        "guard_reason": traj.guard_reason,
        "besov_params": [
            {"s": b.s, "p": _json_num(b.p), "q": _json_num(b.q), "homogeneous": b.homogeneous}
            for b in traj.besov_params
        ],
        "norm_keys": keys,
        "n_samples": len(traj.samples),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / "norms.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"# config_hash={traj.config_hash} seed={traj.seed}"])
        writer.writerow(["t"] + keys)
        for s in traj.samples:
            writer.writerow(
                [f"{s.t:.17g}"] + [f"{s.norms[k]:.17g}" for k in keys]
            )
    for i, s in enumerate(traj.samples):
        write_checkpoint(
            out / "checkpoints" / f"sample_{i:05d}.ckpt",
            traj.kind,
            s.t,
            traj.seed,
            s.state.fields,
        )


def load_trajectory(in_dir) -> Trajectory:
    """Reload a stored trajectory (states, norms, metadata)."""
    src = Path(in_dir)
    with open(src / "manifest.json") as fh:
        manifest = json.load(fh)
    if manifest.get("schema_version") != 1:
        raise ParameterError("unsupported trajectory schema version")
    keys = manifest["norm_keys"]
    samples: list[TrajectorySample] = []
    with open(src / "norms.csv", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if rows[0] != ["t"] + keys:
        raise ParameterError("norms.csv header does not match the manifest")
    for i, row in enumerate(rows[1:]):
        data = read_checkpoint(src / "checkpoints" / f"sample_{i:05d}.ckpt")
        fields = data.fields
        for name in ("u", "b"):
            if name in fields:
                fields[name].divergence_free = True
        norms = dict(zip(keys, map(float, row[1:])))
        samples.append(
            TrajectorySample(
                t=float(row[0]), state=SystemState(t=data.t, fields=fields), norms=norms
            )
        )
    besov_params = tuple(
        BesovParams(
            s=b["s"],
            p=_from_json_num(b["p"]),
            q=_from_json_num(b["q"]),
            homogeneous=b["homogeneous"],
        )
        for b in manifest["besov_params"]
    )
    return Trajectory(
        samples=samples,
        kind=manifest["kind"],
        dt=manifest["dt"],
        sample_every=manifest["sample_every"],
        seed=manifest["seed"],
        besov_params=besov_params,
        guard_tripped=manifest["guard_tripped"],
        guard_reason=manifest["guard_reason"],
        config_hash=manifest["config_hash"],
    )


def _json_num(x: float):
    return "inf" if math.isinf(x) else x


def _from_json_num(x) -> float:
    return math.inf if x == "inf" else float(x)


def recompute_norms(
    sample: TrajectorySample,
    cutoffs: CutoffPair | None = None,
    besov_params: tuple[BesovParams, ...] = DEFAULT_BESOV_NORMS,
) -> dict[str, float]:
    """Recompute the norm cache from the stored state (determinism check)."""
    if cutoffs is None:
        cutoffs = build_cutoffs(sample.state.grid)
    return compute_norms(sample.state, cutoffs, besov_params)
