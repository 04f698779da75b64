"""Deterministic report files: versioned JSON plus per-quantity CSV.

Every payload embeds the config hash and seed.  Re-running a command
with the same configuration reproduces every byte except the ``meta``
object, which holds the timestamp and nothing else; comparisons should
drop it.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .monitor import MonitorReport
from .suites import SuiteResult

SCHEMA_VERSION = 1


def _meta() -> dict:
    return {"created_utc": datetime.now(timezone.utc).isoformat()}


def _jsonable(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, (np.floating, np.integer)):
        return _jsonable(float(x))
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def write_json(path, payload: dict) -> None:
    body = dict(payload)
    body["schema_version"] = SCHEMA_VERSION
    body["meta"] = _meta()
    with open(path, "w") as fh:
        json.dump(_jsonable(body), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_series_csv(path, header: list[str], columns: list[np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([f"{v:.17g}" for v in row])


def write_suite_outputs(result: SuiteResult, out_dir, cfg_hash: str, seed: int) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "suite": result.suite,
        "config_hash": cfg_hash,
        "seed": seed,
        "passed": result.passed,
        "checks": [
            {
                "name": c.name,
                "worst": c.worst,
                "tolerance": c.tolerance,
                "passed": c.passed,
                "note": c.note,
            }
            for c in result.checks
        ],
    }
    write_json(out / f"verify_{result.suite}.json", payload)
    with open(out / f"verify_{result.suite}_detail.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"# config_hash={cfg_hash} seed={seed}"])
        keys = ["check", "grid", "field", "value"]
        writer.writerow(keys)
        for row in result.detail:
            writer.writerow([row.get(k, "") for k in keys])


def monitor_report_payload(report: MonitorReport) -> dict:
    payload = {
        "config_hash": report.config_hash,
        "seed": report.seed,
        "verdict": report.verdict,
        "constants": report.constants,
        "basic_energy": {
            "ok": report.basic_energy.ok,
            "max_violation_rel": report.basic_energy.max_violation_rel,
        },
        "residuals": {
            name: {"max_residual": r.max_residual, "max_relative": r.max_relative}
            for name, r in report.residuals.items()
        },
        "criteria": [
            {
                "family": r.crit.family,
                "s": r.crit.s,
                "p": r.crit.p,
                "q": r.crit.q,
                "homogeneous": r.crit.homogeneous,
                "value": r.value,
                "verdict": r.verdict,
            }
            for r in report.criteria
        ],
        "gronwall": [
            {
                "s_eff": g.s_eff,
                "exponent": g.exponent,
                "c_used": g.c_used,
                "calibrated": g.calibrated,
                "crossed": g.crossed,
            }
            for g in report.gronwall
        ],
    }
    if report.endpoint is not None:
        ep = report.endpoint
        payload["endpoint"] = {
            "epsilon": ep.state.epsilon,
            "delta": ep.state.delta,
            "window_warning": ep.window.warning,
            "tail_integral": ep.window.tail_integral,
            "first_level_sup_final": ep.state.first_level_sup[-1],
            "second_level_sup_final": ep.state.second_level_sup[-1],
            "grad4_integral": ep.grad4_integral,
            "grad4_bound": ep.grad4_bound,
            "grad4_ok": ep.grad4_ok,
            "ladyzhenskaya": ep.lady_constant,
            "bounded": ep.bounded,
        }
    return payload


def write_monitor_outputs(report: MonitorReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "monitor_report.json", monitor_report_payload(report))

    residuals = list(report.residuals.values())
    header = ["t"] + [r.name for r in residuals]
    write_series_csv(
        out / "residuals.csv",
        header,
        [residuals[0].t] + [r.residual for r in residuals],
    )
    for i, res in enumerate(report.criteria, start=1):
        write_series_csv(
            out / f"criterion_{i}.csv",
            ["t", "besov_norm", "increment"],
            [res.t, res.norm_values, res.increments],
        )
    for i, g in enumerate(report.gronwall, start=1):
        write_series_csv(
            out / f"gronwall_{i}.csv",
            ["t", "integrand", "bound", "observed"],
            [g.t, g.integrand, g.bound, g.observed],
        )
    if report.endpoint is not None:
        st = report.endpoint.state
        write_series_csv(
            out / "endpoint.csv",
            ["t", "f1", "f2", "F1", "F2"],
            [st.t, st.first_level, st.second_level, st.first_level_sup, st.second_level_sup],
        )
