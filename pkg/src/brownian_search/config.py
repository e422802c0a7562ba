"""Scenario files: flat ``key = value`` lines, ``#`` starts a comment."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from .cost_model import YEAR, OracleCost, TechProfile

BUNDLED = ("near_future", "all_unity", "expensive_memory_ideal_quantum", "unpowered_unity_memcost")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.key = key


_POW = re.compile(r"^\s*([0-9.]+(?:[eE][-+]?\d+)?)\s*\^\s*([-+]?\d+(?:\.\d+)?)\s*$")
_YEARS = re.compile(r"^\s*([0-9.]*(?:[eE][-+]?\d+)?)\s*(?:yr|year|years)\s*$")


def parse_quantity(text: str) -> float:
    """Parse ``2^80``, ``1e-3``, ``3e6``, ``1year`` / ``2years`` into a float."""
    s = str(text).strip()
    m = _POW.match(s)
    if m:
        return float(m.group(1)) ** float(m.group(2))
    m = _YEARS.match(s)
    if m:
        return (float(m.group(1)) if m.group(1) else 1.0) * YEAR
    try:
        return float(s)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    temperature_K: float
    t_seconds: float
    memcost_ratio: float
    m0: float
    d0: float
    g0: float
    mem_factor: float
    depth_factor: float
    gate_factor: float
    T_quant_K: float
    energy_budget_J: float | None = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "name" or value is None:
                continue
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{f.name} must be positive, got {value!r}", key=f.name)

    @property
    def tech(self) -> TechProfile:
        return TechProfile(self.memcost_ratio, self.mem_factor, self.depth_factor, self.gate_factor,
                           self.temperature_K, self.T_quant_K)

    @property
    def oracle(self) -> OracleCost:
        return OracleCost(self.m0, self.d0, self.g0)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {value if f.name == 'name' else repr(float(value))}")
        return "\n".join(lines) + "\n"


_FIELDS = {f.name: f for f in fields(ScenarioConfig)}
_REQUIRED = {name for name, f in _FIELDS.items() if name != "energy_budget_J"}


def parse_config(text: str) -> ScenarioConfig:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno, key)
        if key == "name":
            values[key] = value
            continue
        try:
            values[key] = parse_quantity(value)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", lineno, key) from None
    missing = sorted(_REQUIRED - values.keys())
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}", key=missing[0])
    return ScenarioConfig(**values)


def load_config(path_or_name: str) -> ScenarioConfig:
    """Load a config file, or a bundled scenario by name."""
    if path_or_name in BUNDLED:
        text = resources.files(__package__).joinpath("scenarios", f"{path_or_name}.cfg").read_text()
    else:
        try:
            text = Path(path_or_name).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path_or_name}: {exc.strerror}") from None
    return parse_config(text)
