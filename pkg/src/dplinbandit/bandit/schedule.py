"""Batch schedule and per-batch confidence radii.

Every logarithm here is natural: with ``q = (2T)^(1/ln T)`` this is the only
base for which ``e <= q <= e^2`` holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import HorizonTooSmall

MIN_HORIZON = 16


@dataclass(frozen=True)
class BatchSchedule:
    T: int
    q: float
    num_batches: int

    def batch_target(self, i: int) -> float:
        return self.q ** i


def make_schedule(T: int) -> BatchSchedule:
    if T < MIN_HORIZON:
        raise HorizonTooSmall(f"T={T} < {MIN_HORIZON}")
    log_t = math.log(T)
    q = math.exp(math.log(2 * T) / log_t)
    return BatchSchedule(T=T, q=q, num_batches=max(1, math.floor(log_t) - 1))


def _log_term(active_size: int, T: int) -> float:
    return math.log(4.0 * active_size * float(T) ** 2)


def gamma_nonprivate(i: int, q: float, d: int, active_size: int, T: int) -> float:
    return math.sqrt(4.0 * d / q ** i * _log_term(active_size, T))


def gamma_central(i: int, q: float, d: int, active_size: int, T: int,
                  epsilon: float, core_size: int) -> float:
    """Radius for sums privatised once per core action with Lap(1/epsilon).

    The unknown core-size constant times d^2 is replaced by the actual core
    cardinality times d.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    log_term = _log_term(active_size, T)
    private = (2.0 * core_size * d + 2.0 * d * log_term) / (epsilon * q ** i)
    return gamma_nonprivate(i, q, d, active_size, T) + private


def gamma_local(i: int, q: float, d: int, active_size: int, T: int,
                epsilon0: float, n_i: int) -> float:
    """Radius when each of the ``n_i`` rewards carries its own Lap(1/epsilon0)."""
    if not epsilon0 > 0:
        raise ValueError("epsilon0 must be positive")
    log_term = _log_term(active_size, T)
    private = 2.0 * d / (q ** i * epsilon0) * math.sqrt(n_i * log_term)
    return gamma_nonprivate(i, q, d, active_size, T) + private
