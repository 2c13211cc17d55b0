"""Server / shuffler / client roles for the shuffled model.

Messages travel through explicit FIFO queues. Each message is columnar: one
``ActionAssignment`` carries the assignment of every client in the batch, one
``PrivatizedReward`` carries every client's report. This keeps batches of
several hundred thousand clients cheap while preserving who sees what: the
server only ever receives a :class:`BatchReport`, ordered by the public
enumeration of the core multiset, never by client.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..environment import BanditInstance, pull_many
from ..privacy import LaplaceMechanism, invert_amplification


@dataclass(frozen=True)
class ActionAssignment:
    """Shuffler -> clients: client ``client_ids[j]`` plays ``action_ids[j]``."""

    client_ids: np.ndarray
    action_ids: np.ndarray
    batch_size: int


@dataclass(frozen=True)
class PrivatizedReward:
    """Clients -> shuffler: the noisy reward reported from each slot."""

    slots: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class BatchReport:
    """Shuffler -> server: (action, noisy reward) pairs in enumeration order."""

    action_ids: np.ndarray
    values: np.ndarray

    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.action_ids.tolist(), self.values.tolist()))


class Shuffler:
    """Trusted relay: permutes assignments out, un-permutes rewards back."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.enumeration: np.ndarray | None = None
        self.permutation: np.ndarray | None = None

    def dispatch(self, core_ids: np.ndarray, counts: np.ndarray) -> ActionAssignment:
        enumeration = np.repeat(np.asarray(core_ids, dtype=np.int64), np.asarray(counts, dtype=np.int64))
        n = enumeration.shape[0]
        perm = self.rng.permutation(n)
        self.enumeration, self.permutation = enumeration, perm
        return ActionAssignment(np.arange(n), enumeration[perm], n)

    def collect(self, message: PrivatizedReward) -> BatchReport:
        values = np.empty(self.permutation.shape[0])
        values[self.permutation[message.slots]] = message.values
        return BatchReport(self.enumeration.copy(), values)


class ClientPool:
    """All clients of one batch; each plays its action and privatises locally.

    ``last_raw`` keeps the clean rewards for auditing only; it is never sent.
    """

    def __init__(self, instance: BanditInstance, epsilon: float, delta: float,
                 env_rng: np.random.Generator, mechanism: LaplaceMechanism,
                 reward_override: dict[int, float] | None = None, offset: int = 0):
        self.instance = instance
        self.epsilon = epsilon
        self.delta = delta
        self.env_rng = env_rng
        self.mechanism = mechanism
        self.reward_override = reward_override or {}
        self.offset = offset
        self.last_raw: np.ndarray | None = None
        self.last_epsilon0: float | None = None

    def respond(self, message: ActionAssignment) -> PrivatizedReward:
        # every client receives the same n_i, so every client derives the same eps0
        eps0 = invert_amplification(self.epsilon, message.batch_size, self.delta)
        positions = self.instance.actions.positions_of(message.action_ids)
        rewards = pull_many(self.instance, positions, self.env_rng)
        apply_overrides(rewards, self.reward_override, self.offset)
        self.last_raw = rewards
        self.last_epsilon0 = eps0
        return PrivatizedReward(message.client_ids, self.mechanism.privatize(rewards, eps0))


def apply_overrides(rewards: np.ndarray, overrides: dict[int, float], offset: int) -> None:
    for t, value in overrides.items():
        if offset <= t < offset + rewards.shape[0]:
            rewards[t - offset] = value


@dataclass
class ShuffleRound:
    report: BatchReport
    client_actions: np.ndarray
    raw_rewards: np.ndarray
    epsilon0: float


def run_shuffle_round(shuffler: Shuffler, clients: ClientPool,
                      core_ids: np.ndarray, counts: np.ndarray) -> ShuffleRound:
    """One batch of the three-role exchange through explicit queues."""
    to_clients: deque[ActionAssignment] = deque()
    to_shuffler: deque[PrivatizedReward] = deque()
    to_server: deque[BatchReport] = deque()

    to_clients.append(shuffler.dispatch(core_ids, counts))
    assignment = to_clients.popleft()
    to_shuffler.append(clients.respond(assignment))
    to_server.append(shuffler.collect(to_shuffler.popleft()))
    return ShuffleRound(
        report=to_server.popleft(),
        client_actions=assignment.action_ids,
        raw_rewards=clients.last_raw,
        epsilon0=clients.last_epsilon0,
    )
