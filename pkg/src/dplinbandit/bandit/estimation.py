"""Least-squares estimation from per-action sums and gap-based elimination."""

from __future__ import annotations

import numpy as np

from ..errors import SingularDesign
from ..geometry import RANK_RTOL, ActionSet, span_basis


def least_squares(counts, actions, noisy_sums) -> np.ndarray:
    """``V^+ sum_a s_a a`` with ``V = sum_a n_a a a^T``, inverted on the span of ``actions``.

    ``actions`` is an :class:`ActionSet` or a K x d coordinate array aligned
    with ``counts`` and ``noisy_sums``.
    """
    x = actions.coords if isinstance(actions, ActionSet) else np.atleast_2d(np.asarray(actions, float))
    counts = np.asarray(counts, dtype=float)
    sums = np.asarray(noisy_sums, dtype=float)
    if np.any(counts <= 0):
        raise ValueError("counts must be positive")
    basis = span_basis(x)
    m = basis.shape[1]
    y = x @ basis
    v = y.T @ (counts[:, None] * y)
    eig = np.linalg.eigvalsh(v)
    if m == 0 or eig[0] <= RANK_RTOL * eig[-1]:
        raise SingularDesign(f"design rank below span dimension {m}")
    return basis @ np.linalg.solve(v, y.T @ sums)


def eliminate(active: ActionSet, theta_hat, gamma: float) -> ActionSet:
    """Keep the actions whose estimated value is within ``2 gamma`` of the best active one."""
    values = active.coords @ np.asarray(theta_hat, dtype=float)
    return active.subset(values >= values.max() - 2.0 * gamma)
