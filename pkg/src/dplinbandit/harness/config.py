"""Experiment configuration: flat ``key=value`` files plus CLI overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from ..bandit.algorithms import DESIGNS, MODELS
from ..bandit.schedule import MIN_HORIZON
from ..environment import NOISE_KINDS, NoiseModel
from ..errors import ConfigError

DEFAULT_EPSILONS = (0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep. Defaults reproduce the K=10, d=2, T=10^6 experiment.

    ``model`` holds one or more trust models; ``epsilon_grid`` is read as
    epsilon0 for the local model and ignored by the non-private baseline.
    """

    model: tuple[str, ...] = MODELS
    d: int = 2
    K: int = 10
    T: int = 10 ** 6
    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILONS
    delta: float = 1e-6
    seeds: tuple[int, ...] = tuple(range(20))
    noise: str = "uniform-bounded"
    sigma: float = 0.1
    output_dir: str = "results"
    design: str = "core"
    workers: int = 1
    record_runtime: bool = False

    @property
    def noise_model(self) -> NoiseModel:
        return NoiseModel(self.noise, self.sigma)

    def validate(self) -> "ExperimentConfig":
        if not self.model or any(m not in MODELS for m in self.model):
            raise ConfigError("model", f"expected a subset of {', '.join(MODELS)}")
        if len(set(self.model)) != len(self.model):
            raise ConfigError("model", "duplicate model")
        if self.d < 1:
            raise ConfigError("d", "must be >= 1")
        if self.K < 2:
            raise ConfigError("K", "must be >= 2")
        if self.T < MIN_HORIZON:
            raise ConfigError("T", f"must be >= {MIN_HORIZON}")
        private = [m for m in self.model if m != "nonprivate"]
        if private and not self.epsilon_grid:
            raise ConfigError("epsilon_grid", "empty grid for a private model")
        if any(not (e > 0) or math.isnan(e) for e in self.epsilon_grid):
            raise ConfigError("epsilon_grid", "values must be positive")
        if not 0 < self.delta < 1:
            raise ConfigError("delta", "must lie in (0, 1)")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed required")
        if any(s < 0 for s in self.seeds) or len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds", "seeds must be distinct nonnegative integers")
        if self.noise not in NOISE_KINDS:
            raise ConfigError("noise", f"expected one of {', '.join(NOISE_KINDS)}")
        if not self.sigma >= 0:
            raise ConfigError("sigma", "must be >= 0")
        if self.design not in DESIGNS:
            raise ConfigError("design", f"expected one of {', '.join(DESIGNS)}")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        return self


def _split(text: str) -> list[str]:
    return [p.strip() for p in str(text).split(",") if p.strip()]


def parse_seeds(text) -> tuple[int, ...]:
    """``"0-19"``, ``"0..19"``, ``"1,5,7"`` or any comma-separated mix."""
    if isinstance(text, (list, tuple)):
        return tuple(int(s) for s in text)
    seeds: list[int] = []
    for part in _split(text):
        sep = ".." if ".." in part else ("-" if "-" in part[1:] else None)
        if sep:
            lo, hi = part.split(sep, 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return tuple(seeds)


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _scalar_int(text) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


_CONVERTERS = {
    "model": lambda v: tuple(v) if isinstance(v, (list, tuple)) else tuple(_split(v)),
    "d": _scalar_int,
    "K": _scalar_int,
    "T": _scalar_int,
    "epsilon_grid": lambda v: tuple(float(x) for x in (v if isinstance(v, (list, tuple)) else _split(v))),
    "delta": float,
    "seeds": parse_seeds,
    "noise": str,
    "sigma": float,
    "output_dir": str,
    "design": str,
    "workers": _scalar_int,
    "record_runtime": _parse_bool,
}
FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))


def read_config_file(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"no such file {path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {lineno} is not key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    return values


def parse_config(path=None, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
    """Build a validated config; ``overrides`` (e.g. CLI flags) win over file values."""
    raw: dict[str, Any] = dict(read_config_file(path)) if path else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    kwargs = {}
    for key, value in raw.items():
        if key not in _CONVERTERS:
            raise ConfigError(key, "unknown key")
        try:
            kwargs[key] = _CONVERTERS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, str(exc)) from exc
    return ExperimentConfig(**kwargs).validate()


def format_config(config: ExperimentConfig) -> str:
    """Serialise back to the flat file format."""
    lines = []
    for name in FIELD_NAMES:
        value = getattr(config, name)
        if isinstance(value, tuple):
            value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{name}={value}")
    return "\n".join(lines) + "\n"
