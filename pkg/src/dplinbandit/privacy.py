"""Laplace noise, shuffling amplification and a Laplace-sum tail bound.

All Laplace sampling goes through the inverse CDF of a single uniform draw so
that a seeded ``numpy.random.Generator`` reproduces noise bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EPS0_FLOOR = 1e-9
EPS0_CEIL = 50.0
BISECTION_WIDTH = 1e-12


@dataclass(frozen=True)
class PrivacyBudget:
    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must lie in [0, 1)")


@dataclass(frozen=True)
class NoiseDraw:
    value: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def laplace_from_uniform(u, scale):
    """Inverse Laplace CDF; ``u`` must lie strictly inside (0, 1)."""
    c = np.asarray(u, dtype=float) - 0.5
    return -scale * np.sign(c) * np.log1p(-2.0 * np.abs(c))


def _open_uniform(rng: np.random.Generator, size=None):
    u = rng.random(size)
    if size is None:
        while u == 0.0:
            u = rng.random()
        return u
    zero = u == 0.0
    while zero.any():
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0.0
    return u


def sample_laplace(scale: float, rng: np.random.Generator) -> float:
    """One draw from Lap(scale), consuming exactly one uniform in the common case."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    return float(laplace_from_uniform(_open_uniform(rng), scale))


def sample_laplace_array(scale: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent Lap(scale) draws. A zero scale yields exact zeros."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    return laplace_from_uniform(_open_uniform(rng, size), scale)


@dataclass
class LaplaceMechanism:
    """Counting wrapper around a caller-owned random stream.

    Every privatised release goes through :meth:`privatize`, which records the
    number of draws and the scales used so runs can be audited afterwards.
    """

    rng: np.random.Generator
    draws: int = 0
    scales: list[float] = field(default_factory=list)

    def privatize(self, values: np.ndarray, epsilon: float) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        scale = 0.0 if math.isinf(epsilon) else 1.0 / epsilon
        noise = sample_laplace_array(scale, values.shape[0], self.rng)
        self.draws += values.shape[0]
        if values.shape[0]:
            self.scales.append(scale)
        return values + noise


def validity_boundary(n: int, delta: float) -> float:
    """Largest eps0 for which the shuffling amplification bound applies."""
    ratio = n / (16.0 * math.log(4.0 / delta))
    return math.log(ratio) if ratio > 0 else -math.inf


def amplification_valid(epsilon0: float, n: int, delta: float) -> bool:
    return epsilon0 <= validity_boundary(n, delta)


def amplify(epsilon0: float, n: int, delta: float) -> float:
    """Central epsilon of n shuffled eps0-LDP reports at failure probability delta."""
    if not epsilon0 > 0 or n < 1 or not 0 < delta < 1:
        raise ValueError("need epsilon0 > 0, n >= 1 and 0 < delta < 1")
    log4d = math.log(4.0 / delta)
    ratio = math.tanh(epsilon0 / 2.0)  # (e^x - 1) / (e^x + 1)
    if epsilon0 <= 30.0:
        ex = math.exp(epsilon0)
        inner = 8.0 * math.sqrt(ex * log4d / n) + 8.0 * ex / n
        return math.log1p(ratio * inner)
    log_a = math.log(8.0) + 0.5 * (epsilon0 + math.log(log4d) - math.log(n))
    log_b = math.log(8.0) + epsilon0 - math.log(n)
    log_y = math.log(ratio) + float(np.logaddexp(log_a, log_b))
    return float(np.logaddexp(0.0, log_y))


def invert_amplification(epsilon_target: float, n: int, delta: float) -> float:
    """Per-client eps0 whose shuffled release is ``epsilon_target``-DP.

    Bisection on the monotone amplification map, restricted to its validity
    region. Where shuffling cannot reach the target (tiny batches), no
    amplification is claimed and the answer falls back to ``epsilon_target``.
    The lower bracket end is returned so the achieved central epsilon never
    exceeds the target.
    """
    if not epsilon_target > 0 or n < 1 or not 0 < delta < 1:
        raise ValueError("need epsilon_target > 0, n >= 1 and 0 < delta < 1")
    hi = min(validity_boundary(n, delta), EPS0_CEIL)
    if hi <= EPS0_FLOOR:
        return epsilon_target
    if amplify(hi, n, delta) < epsilon_target:
        return max(epsilon_target, hi)
    lo = EPS0_FLOOR
    if amplify(lo, n, delta) > epsilon_target:
        return epsilon_target
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if amplify(mid, n, delta) <= epsilon_target:
            lo = mid
        else:
            hi = mid
    return max(epsilon_target, lo)


def laplace_sum_tail(n: int, b: float, c: float, t: float) -> float:
    """Upper bound on P[sum_i l_i z_i >= t] for z_i ~ Lap(1/b) and |l_i| <= c."""
    if n < 1 or not (b > 0 and c > 0 and t > 0):
        raise ValueError("need n >= 1 and b, c, t > 0")
    if t <= n * c / b:
        return math.exp(-(t * t * b * b) / (2.0 * n * c * c))
    return math.exp(n / 2.0 - (b / c) * t)


def laplace_sum_tail_conservative(n: int, b: float, c: float, t: float) -> float:
    """Chernoff bound on the same tail that holds for every ``|l_i| <= c``.

    Uses ``1/(1 - x^2) <= exp(2 x^2)`` for ``|x| <= 1/sqrt(2)``, i.e. a
    sub-exponential proxy of ``2 l^2 / b^2`` per term. ``laplace_sum_tail``
    assumes a proxy four times smaller and is exceeded empirically once
    ``t`` is a few standard deviations out.
    """
    if n < 1 or not (b > 0 and c > 0 and t > 0):
        raise ValueError("need n >= 1 and b, c, t > 0")
    if t <= 2.0 * math.sqrt(2.0) * n * c / b:
        return math.exp(-(t * t * b * b) / (8.0 * n * c * c))
    return math.exp(n - (b / (math.sqrt(2.0) * c)) * t)
