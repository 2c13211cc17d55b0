"""Synthetic stochastic linear bandit instances and pseudo-regret accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .errors import HorizonExceeded, UnknownAction
from .geometry import Action, ActionSet

NOISE_KINDS = ("uniform-bounded", "truncated-gaussian")
MAX_RESAMPLE = 100


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "uniform-bounded"
    sigma: float = 0.1

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not self.sigma >= 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True, eq=False)
class BanditInstance:
    theta_star: np.ndarray
    actions: ActionSet
    noise: NoiseModel = NoiseModel()
    means: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        theta = np.asarray(self.theta_star, dtype=float).reshape(-1)
        if theta.shape[0] != self.actions.dim:
            raise ValueError("theta_star dimension does not match the actions")
        if np.linalg.norm(theta) > 1.0 + 1e-12:
            raise ValueError("||theta_star|| must be <= 1")
        theta.setflags(write=False)
        object.__setattr__(self, "theta_star", theta)
        means = self.actions.coords @ theta
        means.setflags(write=False)
        object.__setattr__(self, "means", means)

    @property
    def optimal_value(self) -> float:
        return float(self.means.max())

    @property
    def best_position(self) -> int:
        return int(np.argmax(self.means))


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    return x / norms


def generate_instance(d: int, K: int, seed: int, noise: NoiseModel | None = None) -> BanditInstance:
    """K actions and theta_star drawn uniformly on the unit sphere of R^d."""
    if d < 1 or K < 2:
        raise ValueError("need d >= 1 and K >= 2")
    rng = np.random.default_rng(seed)
    actions = _unit_rows(rng.standard_normal((K, d)))
    theta = _unit_rows(rng.standard_normal(d))
    return BanditInstance(theta, ActionSet(actions), noise or NoiseModel())


def _noise(means: np.ndarray, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    if noise.kind == "uniform-bounded":
        half_width = np.minimum(noise.sigma, np.maximum(1.0 - np.abs(means), 0.0))
        return half_width * (2.0 * rng.random(means.shape[0]) - 1.0)
    eta = noise.sigma * rng.standard_normal(means.shape[0])
    bad = np.abs(means + eta) > 1.0
    for _ in range(MAX_RESAMPLE - 1):
        if not bad.any():
            break
        eta[bad] = noise.sigma * rng.standard_normal(int(bad.sum()))
        bad = np.abs(means + eta) > 1.0
    return np.clip(means + eta, -1.0, 1.0) - means


def pull_many(instance: BanditInstance, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Rewards for a sequence of pulls given by positions into ``instance.actions``."""
    means = instance.means[np.asarray(positions, dtype=np.int64)]
    rewards = means + _noise(means, instance.noise, rng)
    return np.clip(rewards, -1.0, 1.0)


def pull(instance: BanditInstance, action: Action, rng: np.random.Generator) -> float:
    if action not in instance.actions:
        raise UnknownAction(f"action {action.id} is not in the instance")
    return float(pull_many(instance, np.array([instance.actions.position(action.id)]), rng)[0])


@dataclass(frozen=True)
class RegretAccumulator:
    """Running pseudo-regret: true gaps, never noisy rewards."""

    optimal_value: float
    horizon: int
    cumulative: float = 0.0
    pulls: int = 0


def record(acc: RegretAccumulator, action: Action, theta_star) -> RegretAccumulator:
    if acc.pulls >= acc.horizon:
        raise HorizonExceeded(f"horizon {acc.horizon} already reached")
    gap = acc.optimal_value - float(np.dot(action.coords, theta_star))
    return replace(acc, cumulative=acc.cumulative + gap, pulls=acc.pulls + 1)


def regret_grid(T: int, points: int = 50) -> np.ndarray:
    """Strictly increasing, roughly geometric integer times in [1, T] ending at T."""
    points = min(points, T)
    raw = np.rint(np.geomspace(1.0, float(T), points)).astype(np.int64)
    grid = np.empty(points, dtype=np.int64)
    prev = 0
    for k, t in enumerate(raw):
        prev = max(int(t), prev + 1)
        grid[k] = prev
    # pull the tail back under T if the forward fix-up overshot
    grid[-1] = T
    for k in range(points - 2, -1, -1):
        grid[k] = min(grid[k], grid[k + 1] - 1)
    return grid


class RegretCurve:
    """Pseudo-regret accumulator that samples the running total on a time grid."""

    def __init__(self, optimal_value: float, horizon: int, grid: np.ndarray | None = None):
        self.acc = RegretAccumulator(optimal_value, horizon)
        self.grid = regret_grid(horizon) if grid is None else np.asarray(grid)
        self.values: list[float] = []
        self._next = 0

    @property
    def pulls(self) -> int:
        return self.acc.pulls

    @property
    def remaining(self) -> int:
        return self.acc.horizon - self.acc.pulls

    def extend(self, gaps: np.ndarray) -> None:
        gaps = np.asarray(gaps, dtype=float)
        n = gaps.shape[0]
        if n == 0:
            return
        start = self.acc.pulls
        if start + n > self.acc.horizon:
            raise HorizonExceeded(f"{n} pulls exceed the remaining horizon {self.remaining}")
        running = self.acc.cumulative + np.cumsum(gaps)
        while self._next < len(self.grid) and self.grid[self._next] <= start + n:
            self.values.append(float(running[self.grid[self._next] - start - 1]))
            self._next += 1
        self.acc = replace(self.acc, cumulative=float(running[-1]), pulls=start + n)

    def extend_constant(self, gap: float, count: int) -> None:
        if count <= 0:
            return
        start = self.acc.pulls
        if start + count > self.acc.horizon:
            raise HorizonExceeded(f"{count} pulls exceed the remaining horizon {self.remaining}")
        base = self.acc.cumulative
        while self._next < len(self.grid) and self.grid[self._next] <= start + count:
            self.values.append(base + gap * float(self.grid[self._next] - start))
            self._next += 1
        self.acc = replace(self.acc, cumulative=base + gap * count, pulls=start + count)

    def points(self) -> list[tuple[int, float]]:
        return [(int(t), v) for t, v in zip(self.grid[: len(self.values)], self.values)]


@dataclass
class RegretTrace:
    """Result of a single bandit run."""

    grid: list[tuple[int, float]]
    batches: list[Any]
    final_regret: float
    metadata: dict[str, Any]
    total_pulls: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.grid], dtype=np.int64)

    @property
    def regret(self) -> np.ndarray:
        return np.array([r for _, r in self.grid])


def sphere_points(n: int, d: int, seed: int) -> np.ndarray:
    """``n`` points uniform on the unit sphere of R^d (helper for tests and demos)."""
    rng = np.random.default_rng(seed)
    return _unit_rows(rng.standard_normal((n, d)))


def circle_points(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack([np.cos(angle), np.sin(angle)])
