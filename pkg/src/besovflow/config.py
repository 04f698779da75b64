"""Flat key-value run configuration.

Format: one ``key = value`` pair per line; ``#`` starts a comment; blank
lines are ignored.  Unknown keys are errors (fail fast).  Values of
``inf`` are accepted where exponents allow it.  Environment variables
``BESOVFLOW_<KEY>`` override file values; command-line flags override
both.  Criteria are given as indexed keys::

    criterion_1 = 2 0 inf 2        # family s p q
    criterion_2 = 2 0.5 inf 4 hom  # optional homogeneous-norm flag

Schema (defaults in parentheses):

    kind (nse) | d (2) | n (32) | nu (0.05) | eta | kappa
    dt (0.002) | t_end (1.0) | sample_every (5)
    ic (random: taylor_green | random) | ic_amplitude (1.0) | ic_peak_k (3.0)
    seed (1234) | threads (1) | norm_guard (1e6)
    epsilon (0.1) | residual_tol (1e-6) | divergence_factor (10.0)
    gronwall_c (calibrated when unset)
    corpus_size (20) | grid_sizes (16 32) | lemma_s (0.5) | lemma_p (8.0)
    lemma_q (3.0)
    t_star | local_span | t_star_star      (extension planning)
    criterion_N                             (any number of criteria)
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field, fields as dataclass_fields
from pathlib import Path

from .monitor import CriterionSpec
from .spectral import ParameterError

ENV_PREFIX = "BESOVFLOW_"

IC_PRESETS = ("taylor_green", "random")


class ConfigError(ValueError):
    """Malformed configuration text or values."""


def _parse_float(value: str) -> float:
    try:
        return math.inf if value.strip() == "inf" else float(value)
    except ValueError as err:
        raise ConfigError(f"not a number: {value!r}") from err


def _parse_int(value: str) -> int:
    try:
        return int(value)
    except ValueError as err:
        raise ConfigError(f"not an integer: {value!r}") from err


def _parse_int_list(value: str) -> tuple[int, ...]:
    return tuple(_parse_int(tok) for tok in value.replace(",", " ").split())


def parse_criterion(value: str) -> CriterionSpec:
    toks = value.split()
    if len(toks) not in (4, 5) or (len(toks) == 5 and toks[4] != "hom"):
        raise ConfigError(
            f"criterion must be 'family s p q [hom]', got {value!r}"
        )
    try:
        return CriterionSpec(
            family=_parse_int(toks[0]),
            s=_parse_float(toks[1]),
            p=_parse_float(toks[2]),
            q=_parse_float(toks[3]),
            homogeneous=len(toks) == 5,
        )
    except ParameterError as err:
        raise ConfigError(str(err)) from err


@dataclass
class RunConfig:
    """Typed view of one configuration; field names are the config keys."""

    kind: str = "nse"
    d: int = 2
    n: int = 32
    nu: float = 0.05
    eta: float | None = None
    kappa: float | None = None
    dt: float = 0.002
    t_end: float = 1.0
    sample_every: int = 5
    ic: str = "random"
    ic_amplitude: float = 1.0
    ic_peak_k: float = 3.0
    seed: int = 1234
    threads: int = 1
    norm_guard: float = 1e6
    epsilon: float = 0.1
    residual_tol: float = 1e-6
    divergence_factor: float = 10.0
    gronwall_c: float | None = None
    corpus_size: int = 20
    grid_sizes: tuple[int, ...] = (16, 32)
    lemma_s: float = 0.5
    lemma_p: float = 8.0
    lemma_q: float = 3.0
    t_star: float | None = None
    local_span: float | None = None
    t_star_star: float | None = None
    criteria: tuple[CriterionSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.ic not in IC_PRESETS:
            raise ConfigError(f"unknown initial-condition preset {self.ic!r}")
        if self.corpus_size < 0:
            raise ConfigError("corpus_size must be nonnegative")

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]

    def canonical_text(self) -> str:
        lines = []
        for f in dataclass_fields(self):
            if f.name == "criteria":
                for i, c in enumerate(self.criteria, start=1):
                    hom = " hom" if c.homogeneous else ""
                    lines.append(
                        f"criterion_{i} = {c.family} {_fmt(c.s)} {_fmt(c.p)} "
                        f"{_fmt(c.q)}{hom}"
                    )
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = " ".join(str(v) for v in value)
            lines.append(f"{f.name} = {_fmt(value)}")
        return "\n".join(sorted(lines)) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.17g}"
    return str(value)


_PARSERS = {
    "kind": str,
    "d": _parse_int,
    "n": _parse_int,
    "nu": _parse_float,
    "eta": _parse_float,
    "kappa": _parse_float,
    "dt": _parse_float,
    "t_end": _parse_float,
    "sample_every": _parse_int,
    "ic": str,
    "ic_amplitude": _parse_float,
    "ic_peak_k": _parse_float,
    "seed": _parse_int,
    "threads": _parse_int,
    "norm_guard": _parse_float,
    "epsilon": _parse_float,
    "residual_tol": _parse_float,
    "divergence_factor": _parse_float,
    "gronwall_c": _parse_float,
    "corpus_size": _parse_int,
    "grid_sizes": _parse_int_list,
    "lemma_s": _parse_float,
    "lemma_p": _parse_float,
    "lemma_q": _parse_float,
    "t_star": _parse_float,
    "local_span": _parse_float,
    "t_star_star": _parse_float,
}


def _raw_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _apply_env(pairs: dict[str, str]) -> None:
    for name, value in os.environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key in _PARSERS or key.startswith("criterion_"):
            pairs[key] = value


def load_config(
    path: str | Path | None = None,
    overrides: dict[str, object] | None = None,
    use_env: bool = True,
) -> RunConfig:
    """Parse a config file (or defaults), then env vars, then overrides."""
    text = Path(path).read_text() if path is not None else ""
    pairs = _raw_pairs(text)
    if use_env:
        _apply_env(pairs)

    kwargs: dict[str, object] = {}
    criteria: dict[int, CriterionSpec] = {}
    for key, value in pairs.items():
        if key.startswith("criterion_"):
            suffix = key[len("criterion_"):]
            if not suffix.isdigit():
                raise ConfigError(f"criterion keys look like criterion_1, got {key!r}")
            criteria[int(suffix)] = parse_criterion(value)
            continue
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        kwargs[key] = _PARSERS[key](value)
    if criteria:
        kwargs["criteria"] = tuple(criteria[i] for i in sorted(criteria))
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                kwargs[key] = value
    try:
        return RunConfig(**kwargs)
    except (TypeError, ParameterError) as err:
        raise ConfigError(str(err)) from err
