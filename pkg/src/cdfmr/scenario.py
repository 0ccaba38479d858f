"""Scenario files: one ``key = value`` per line, ``#`` comments, comma lists.

Example::

    clusters = 3,2
    budget_model = unbalanced
    delta = 4
    gamma_d_sweep_db = 0, 30, 2
    rate_threshold = 0.3
    modulation = BPSK
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .analytic import OutageThreshold
from .network import (
    ClusterTopology,
    LinkBudget,
    ModulationParams,
    balanced_budget,
    explicit_budget,
    modulation_from_name,
    unbalanced_budget,
)
from .simulator import METRICS

BUDGET_MODELS = ("balanced", "unbalanced", "explicit")


class ScenarioError(ValueError):
    pass


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def sweep_points(sweep: tuple[float, float, float]) -> list[float]:
    """Inclusive arithmetic grid start, start+step, ..., <= stop."""
    start, stop, step = sweep
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(max(count, 0))]


@dataclass(frozen=True)
class Scenario:
    clusters: tuple[int, ...]
    budget_model: str
    delta: float = 4.0
    explicit_gammas_db: tuple[float, ...] | None = None
    gamma_d_sweep_db: tuple[float, float, float] = (0.0, 30.0, 2.0)
    rate_threshold: float = 0.3
    modulation: tuple[str, int | None] = ("BPSK", None)
    mu_sweep: tuple[float, float, float] | None = None
    samples: int = 1_000_000
    seed: int = 42
    outputs: tuple[str, ...] = field(default=METRICS)

    def __post_init__(self):
        validate(self)

    @property
    def topology(self) -> ClusterTopology:
        return ClusterTopology(self.clusters)

    @property
    def threshold(self) -> OutageThreshold:
        return OutageThreshold(self.rate_threshold)

    @property
    def mod(self) -> ModulationParams:
        return modulation_from_name(*self.modulation)

    def gamma_d_grid_db(self) -> list[float]:
        return sweep_points(self.gamma_d_sweep_db)

    def mu_grid(self) -> list[float]:
        return [1.0] if self.mu_sweep is None else sweep_points(self.mu_sweep)

    def budget(self, gamma_d_db: float) -> LinkBudget:
        gd = db_to_linear(gamma_d_db)
        n = len(self.clusters)
        if self.budget_model == "unbalanced":
            return unbalanced_budget(n, self.delta, gd)
        if self.budget_model == "balanced":
            return balanced_budget(n, self.delta, gd)
        # explicit per-hop values are gains in dB over the direct link
        return explicit_budget([db_to_linear(gamma_d_db + g) for g in self.explicit_gammas_db], gd)

    def replace(self, **changes) -> Scenario:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return Scenario(**values)


def _fail(key: str, message: str):
    raise ScenarioError(f"{key}: {message}")


def validate(s: Scenario) -> None:
    try:
        topology = ClusterTopology(tuple(s.clusters))
    except ValueError as exc:
        _fail("clusters", str(exc))
    if s.budget_model not in BUDGET_MODELS:
        _fail("budget_model", f"must be one of {', '.join(BUDGET_MODELS)}, got {s.budget_model!r}")
    if not (math.isfinite(s.delta) and s.delta >= 0):
        _fail("delta", "must be finite and nonnegative")
    if (s.explicit_gammas_db is not None) != (s.budget_model == "explicit"):
        _fail("explicit_gammas_db", "must be given exactly when budget_model = explicit")
    if s.explicit_gammas_db is not None:
        if len(s.explicit_gammas_db) != topology.n_hops:
            _fail("explicit_gammas_db", f"needs {topology.n_hops} values for {topology.n_clusters} clusters")
        if not all(math.isfinite(g) for g in s.explicit_gammas_db):
            _fail("explicit_gammas_db", "values must be finite")
    for key in ("gamma_d_sweep_db", "mu_sweep"):
        sweep = getattr(s, key)
        if sweep is None:
            continue
        if len(sweep) != 3 or not all(math.isfinite(v) for v in sweep):
            _fail(key, "expects finite start, stop, step")
        if not sweep[2] > 0:
            _fail(key, "step must be positive")
        if sweep[1] < sweep[0]:
            _fail(key, "stop must not be below start")
    if s.mu_sweep is not None and s.mu_sweep[0] < 0:
        _fail("mu_sweep", "mu must be nonnegative")
    if not (math.isfinite(s.rate_threshold) and s.rate_threshold >= 0):
        _fail("rate_threshold", "must be finite and nonnegative")
    try:
        modulation_from_name(*s.modulation)
    except ValueError as exc:
        _fail("modulation", str(exc))
    if s.samples < 1:
        _fail("samples", "must be positive")
    if not 0 <= s.seed < 2**64:
        _fail("seed", "must fit in 64 unsigned bits")
    if not s.outputs:
        _fail("outputs", "needs at least one metric")
    bad = [m for m in s.outputs if m not in METRICS]
    if bad:
        _fail("outputs", f"unknown metrics {bad}; choose from {', '.join(METRICS)}")


def _split(value: str) -> list[str]:
    parts = [p.strip() for p in value.split(",")]
    if not value.strip() or any(not p for p in parts):
        raise ValueError("empty list element")
    return parts


def _int(text: str) -> int:
    return int(text, 10)


def _parse_value(key: str, value: str):
    if key == "clusters":
        return tuple(_int(p) for p in _split(value))
    if key == "budget_model":
        return value.strip()
    if key in ("delta", "rate_threshold"):
        return float(value)
    if key == "explicit_gammas_db":
        return tuple(float(p) for p in _split(value))
    if key in ("gamma_d_sweep_db", "mu_sweep"):
        parts = tuple(float(p) for p in _split(value))
        if len(parts) != 3:
            raise ValueError("expects start, stop, step")
        return parts
    if key == "modulation":
        parts = _split(value)
        if len(parts) > 2:
            raise ValueError("expects a name and an optional order")
        return (parts[0].upper(), _int(parts[1]) if len(parts) == 2 else None)
    if key in ("samples", "seed"):
        return _int(value.strip())
    if key == "outputs":
        names = set(_split(value))
        return tuple(m for m in METRICS if m in names) + tuple(sorted(names - set(METRICS)))
    raise AssertionError(key)


_KEYS = tuple(f.name for f in fields(Scenario))


def parse_scenario(text: str) -> Scenario:
    seen: dict[str, int] = {}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ScenarioError(f"{key}: duplicate key on lines {seen[key]} and {lineno}")
        seen[key] = lineno
        if not value:
            raise ScenarioError(f"{key}: empty value on line {lineno}")
        try:
            values[key] = _parse_value(key, value)
        except ValueError as exc:
            raise ScenarioError(f"{key}: cannot parse {value!r} on line {lineno} ({exc})") from exc
    for key in ("clusters", "budget_model"):
        if key not in values:
            raise ScenarioError(f"{key}: required key missing")
    return Scenario(**values)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_scenario(s: Scenario) -> str:
    """Inverse of parse_scenario; optional fields left unset are omitted."""
    lines = []
    for f in fields(Scenario):
        v = getattr(s, f.name)
        if v is None:
            continue
        if f.name == "modulation":
            name, order = v
            text = name if order is None else f"{name}, {order}"
        elif isinstance(v, tuple):
            text = ", ".join(_fmt(x) for x in v)
        else:
            text = _fmt(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"
