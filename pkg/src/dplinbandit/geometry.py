"""Finite action sets, greedy covering nets and near G-optimal designs.

All routines here are deterministic. Inverses of design matrices are always
taken on the linear span of the actions involved, so action sets that live in
a lower-dimensional subspace of R^d are handled without regularisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DesignInfeasible, SpanMismatch

NORM_TOL = 1e-12
RANK_RTOL = 1e-10
SPAN_TOL = 1e-8


@dataclass(frozen=True)
class Action:
    id: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float).reshape(-1)
        if np.linalg.norm(coords) > 1.0 + NORM_TOL:
            raise ValueError(f"action {self.id} has norm > 1")
        object.__setattr__(self, "coords", coords)


class ActionSet:
    """An ordered, duplicate-free collection of actions in the unit ball.

    Actions are kept sorted by id, so "first" always means "lowest id".
    """

    __slots__ = ("_coords", "_ids", "_pos")

    def __init__(self, coords, ids: Sequence[int] | None = None):
        coords = np.array(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords.reshape(1, -1)
        if coords.ndim != 2 or coords.shape[0] == 0 or coords.shape[1] == 0:
            raise ValueError("an action set needs at least one action with d >= 1")
        k = coords.shape[0]
        ids_arr = np.arange(k) if ids is None else np.array(ids, dtype=np.int64).reshape(-1)
        if ids_arr.shape[0] != k:
            raise ValueError("ids and coords disagree in length")
        if np.unique(ids_arr).shape[0] != k:
            raise ValueError("action ids must be unique")
        if np.any(np.linalg.norm(coords, axis=1) > 1.0 + NORM_TOL):
            raise ValueError("every action must satisfy ||a|| <= 1")
        if np.unique(coords, axis=0).shape[0] != k:
            raise ValueError("duplicate action coordinates")
        order = np.argsort(ids_arr, kind="stable")
        self._coords = coords[order]
        self._coords.setflags(write=False)
        self._ids = ids_arr[order]
        self._ids.setflags(write=False)
        self._pos = {int(i): p for p, i in enumerate(self._ids)}

    @classmethod
    def from_actions(cls, actions: Iterable[Action]) -> "ActionSet":
        actions = list(actions)
        return cls([a.coords for a in actions], [a.id for a in actions])

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def ids(self) -> np.ndarray:
        return self._ids

    @property
    def dim(self) -> int:
        return self._coords.shape[1]

    def __len__(self) -> int:
        return self._coords.shape[0]

    def __iter__(self) -> Iterator[Action]:
        for p in range(len(self)):
            yield self[p]

    def __getitem__(self, position: int) -> Action:
        return Action(int(self._ids[position]), self._coords[position])

    def __contains__(self, action: Action) -> bool:
        p = self._pos.get(int(action.id))
        return p is not None and np.array_equal(self._coords[p], action.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActionSet):
            return NotImplemented
        return np.array_equal(self._ids, other._ids) and np.array_equal(self._coords, other._coords)

    def __repr__(self) -> str:
        return f"ActionSet(K={len(self)}, d={self.dim})"

    def position(self, action_id: int) -> int:
        return self._pos[int(action_id)]

    def positions_of(self, action_ids) -> np.ndarray:
        """Vectorised id -> position lookup (ids must be present)."""
        action_ids = np.asarray(action_ids, dtype=np.int64)
        pos = np.searchsorted(self._ids, action_ids)
        if np.any(pos >= len(self)) or np.any(self._ids[np.minimum(pos, len(self) - 1)] != action_ids):
            raise KeyError("unknown action id")
        return pos

    def has_id(self, action_id: int) -> bool:
        return int(action_id) in self._pos

    def by_id(self, action_id: int) -> Action:
        return self[self._pos[int(action_id)]]

    def subset(self, positions) -> "ActionSet":
        """Sub-collection selected by a boolean mask or integer positions."""
        positions = np.asarray(positions)
        if positions.dtype == bool:
            positions = np.flatnonzero(positions)
        positions = np.sort(positions)
        return ActionSet(self._coords[positions], self._ids[positions])

    def issubset(self, other: "ActionSet") -> bool:
        return all(a in other for a in self)


@dataclass(frozen=True)
class NetParams:
    zeta: float

    def __post_init__(self):
        if not self.zeta > 0:
            raise ValueError("zeta must be positive")


@dataclass(frozen=True)
class DesignResult:
    """Output of :func:`frank_wolfe_design`.

    ``basis`` is an orthonormal d x m basis of the span of the input actions;
    ``max_norm`` is the largest ``a^T V(pi)^+ a`` over the input actions.
    """

    core: ActionSet
    weights: dict[int, float]
    design_matrix: np.ndarray
    span_dim: int
    max_norm: float
    basis: np.ndarray = field(repr=False)
    iterations: int = 0

    @property
    def core_weights(self) -> np.ndarray:
        return np.array([self.weights[int(i)] for i in self.core.ids])


def span_basis(coords: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (d x m) of the row span of ``coords``."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    _, s, vt = np.linalg.svd(coords, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((coords.shape[1], 0))
    m = int(np.sum(s > rtol * s[0]))
    return vt[:m].T.copy()


def span_rank(coords: np.ndarray) -> int:
    return span_basis(coords).shape[1]


def build_zeta_net(actions: ActionSet, params: NetParams) -> ActionSet:
    """Greedy zeta-cover of a finite action set.

    Actions are scanned in id order and kept unless an already kept action is
    within ``zeta``; afterwards actions are appended (again in id order) until
    the net spans the same subspace as the input.
    """
    coords = actions.coords
    k = len(actions)
    covered = np.zeros(k, dtype=bool)
    chosen: list[int] = []
    while not covered.all():
        p = int(np.argmin(covered))  # first uncovered position
        chosen.append(p)
        covered |= np.linalg.norm(coords - coords[p], axis=1) <= params.zeta

    # ranks are measured against the scale of the whole set, so a near-zero
    # action cannot pass for a direction on its own
    sv = np.linalg.svd(coords, compute_uv=False)
    floor = RANK_RTOL * sv[0]
    target_rank = int(np.sum(sv > floor))

    def rank_of(rows: list[int]) -> int:
        return int(np.sum(np.linalg.svd(coords[rows], compute_uv=False) > floor))

    rank = rank_of(chosen)
    if rank < target_rank:
        in_net = set(chosen)
        for p in range(k):
            if p in in_net:
                continue
            r = rank_of(chosen + [p])
            if r > rank:
                chosen.append(p)
                rank = r
                if rank == target_rank:
                    break
    return actions.subset(np.array(chosen))


def _pivoted_spanning_subset(y: np.ndarray, m: int) -> list[int]:
    # greedy largest-residual pivoting in span coordinates; argmax ties go to lowest position
    residual = y.copy()
    chosen: list[int] = []
    for _ in range(m):
        norms = np.einsum("ij,ij->i", residual, residual)
        norms[chosen] = -1.0
        p = int(np.argmax(norms))
        chosen.append(p)
        u = residual[p] / math.sqrt(norms[p])
        residual = residual - np.outer(residual @ u, u)
    return sorted(chosen)


def _norms_in_span(y: np.ndarray, weights: np.ndarray) -> np.ndarray:
    v = y.T @ (weights[:, None] * y)
    try:
        sol = np.linalg.solve(v, y.T)
    except np.linalg.LinAlgError:
        return np.full(y.shape[0], np.inf)
    if not np.all(np.isfinite(sol)):
        return np.full(y.shape[0], np.inf)
    return np.einsum("ij,ji->i", y, sol)


def default_max_iters(dim: int, num_actions: int) -> int:
    return 50 * dim * math.ceil(math.log(math.log(num_actions) + 2) + 1)


def _make_result(actions: ActionSet, basis: np.ndarray, weights: np.ndarray,
                 max_norm: float, iterations: int) -> DesignResult:
    support = np.flatnonzero(weights > 0)
    core = actions.subset(support)
    x = actions.coords[support]
    w = weights[support]
    return DesignResult(
        core=core,
        weights={int(i): float(wi) for i, wi in zip(actions.ids[support], w)},
        design_matrix=x.T @ (w[:, None] * x),
        span_dim=basis.shape[1],
        max_norm=float(max_norm),
        basis=basis,
        iterations=iterations,
    )


def frank_wolfe_design(
    actions: ActionSet,
    target_norm_slack: float = 0.05,
    max_iters: int | None = None,
    prune_threshold: float = 1e-6,
) -> DesignResult:
    """Near G-optimal design over ``actions`` by Frank-Wolfe (Kiefer-Wolfowitz).

    Starts from the uniform distribution over a pivoted spanning subset and
    moves mass towards the action with the largest ``||a||^2_{V(pi)^-1}``
    using the exact D-optimal line search, until every action satisfies
    ``a^T V(pi)^+ a <= 2 m (1 + slack)`` where ``m`` is the span dimension.
    Small weights are then pruned as long as the bound survives.

    Raises:
        DesignInfeasible: the bound was not met within ``max_iters``.
    """
    basis = span_basis(actions.coords)
    m = basis.shape[1]
    if m == 0:
        raise ValueError("actions span the zero subspace")
    if max_iters is None:
        max_iters = default_max_iters(actions.dim, len(actions))
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")

    y = actions.coords @ basis
    k = y.shape[0]
    weights = np.zeros(k)
    weights[_pivoted_spanning_subset(y, m)] = 1.0 / m
    target = 2.0 * m * (1.0 + target_norm_slack)

    it = 0
    while True:
        norms = _norms_in_span(y, weights)
        j = int(np.argmax(norms))
        g = float(norms[j])
        if g <= target:
            break
        if it >= max_iters:
            raise DesignInfeasible(g, target, it)
        step = (g / m - 1.0) / (g - 1.0)
        weights *= 1.0 - step
        weights[j] += step
        it += 1
    weights /= weights.sum()
    max_norm = g

    threshold = prune_threshold
    for _ in range(10):
        if not np.any((weights > 0) & (weights < threshold)):
            break
        pruned = np.where(weights < threshold, 0.0, weights)
        pruned /= pruned.sum()
        g_pruned = float(np.max(_norms_in_span(y, pruned)))
        if g_pruned <= target:
            weights, max_norm = pruned, g_pruned
            break
        threshold /= 2.0

    return _make_result(actions, basis, weights, max_norm, it)


def uniform_design(actions: ActionSet) -> DesignResult:
    """Uniform distribution over every action; used as a no-core-set baseline."""
    basis = span_basis(actions.coords)
    if basis.shape[1] == 0:
        raise ValueError("actions span the zero subspace")
    weights = np.full(len(actions), 1.0 / len(actions))
    g = float(np.max(_norms_in_span(actions.coords @ basis, weights)))
    return _make_result(actions, basis, weights, g, 0)


def design_norms(actions: ActionSet, design: DesignResult) -> np.ndarray:
    """``a^T V(pi)^+ a`` for every action, with the inverse taken on the design span."""
    q = design.basis
    x = actions.coords
    y = x @ q
    off_span = np.linalg.norm(x - y @ q.T, axis=1)
    if np.any(off_span > SPAN_TOL):
        bad = int(actions.ids[int(np.argmax(off_span))])
        raise SpanMismatch(f"action {bad} leaves the design span by {off_span.max():.3g}")
    v = q.T @ design.design_matrix @ q
    return np.einsum("ij,ji->i", y, np.linalg.solve(v, y.T))


def max_design_norm(actions: ActionSet, design: DesignResult) -> float:
    return float(np.max(design_norms(actions, design)))
