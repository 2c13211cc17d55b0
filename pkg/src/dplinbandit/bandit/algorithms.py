"""Batched phased elimination in the central, local and shuffled trust models.

All four runners share one loop. Per batch ``i`` a near G-optimal design is
computed on the active set, each core action is played ``ceil(pi(a) q^i)``
times, the rewards are released according to the trust model, and actions
more than ``2 gamma_i`` below the empirical best are dropped. Whatever horizon
is left after the last batch is spent on the empirical best action.

Random streams are derived from ``(seed, batch, role)`` so that two runs on the
same seed share environment noise whenever they play the same pulls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..environment import BanditInstance, RegretCurve, RegretTrace, pull_many
from ..geometry import (
    ActionSet,
    DesignResult,
    NetParams,
    build_zeta_net,
    frank_wolfe_design,
    uniform_design,
)
from ..privacy import LaplaceMechanism, invert_amplification
from .estimation import eliminate, least_squares
from .protocol import ClientPool, Shuffler, apply_overrides, run_shuffle_round
from .schedule import gamma_central, gamma_local, gamma_nonprivate, make_schedule

MODELS = ("central", "local", "shuffled", "nonprivate")
DESIGNS = ("core", "uniform")

ROLE_ENV = 0
ROLE_PRIVACY = 1
ROLE_SHUFFLE = 2


def substream(seed: int, batch: int, role: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(batch, role)))


@dataclass
class BatchRecord:
    batch_index: int
    active_set: ActionSet
    design: DesignResult
    counts: dict[int, int]
    raw_sums: dict[int, float]
    noisy_sums: dict[int, float]
    theta_hat: np.ndarray | None
    gamma: float
    batch_len: int
    next_active_size: int
    eps0_batch: float | None = None
    noise_draws: int = 0
    noise_scales: tuple[float, ...] = ()
    max_error: float | None = None
    best_survived: bool = True
    truncated: bool = False

    @property
    def active_size(self) -> int:
        return len(self.active_set)

    @property
    def core_size(self) -> int:
        return len(self.design.core)

    @property
    def covered(self) -> bool:
        """``|<a, theta_hat - theta*>| <= gamma`` for every active action."""
        return self.max_error is not None and self.max_error <= self.gamma


def _block_sums(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    return np.add.reduceat(values, starts)


def _as_dict(ids: np.ndarray, values) -> dict:
    return {int(k): v.item() for k, v in zip(ids, np.asarray(values))}


def _run(instance: BanditInstance, T: int, seed: int, model: str, *,
         epsilon: float = math.inf, delta: float | None = None, design: str = "core",
         reward_override: dict[int, float] | None = None) -> RegretTrace:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if design not in DESIGNS:
        raise ValueError(f"unknown design {design!r}")
    if model != "nonprivate" and not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if model == "shuffled" and not (delta is not None and 0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")

    schedule = make_schedule(T)
    actions = instance.actions
    d = actions.dim
    theta_star = instance.theta_star
    gaps = instance.optimal_value - instance.means
    overrides = reward_override or {}

    active = build_zeta_net(actions, NetParams(1.0 / T))
    net_best_id = int(active.ids[int(np.argmax(active.coords @ theta_star))])
    curve = RegretCurve(instance.optimal_value, T)
    records: list[BatchRecord] = []
    theta_hat = None

    for i in range(1, schedule.num_batches + 1):
        if curve.remaining == 0:
            break
        des = frank_wolfe_design(active) if design == "core" else uniform_design(active)
        core = des.core
        counts = np.ceil(des.core_weights * schedule.batch_target(i)).astype(np.int64)
        n_i = int(counts.sum())
        k_i = len(active)
        env_rng = substream(seed, i, ROLE_ENV)
        mech = LaplaceMechanism(substream(seed, i, ROLE_PRIVACY))
        eps0_batch = None

        if model == "central":
            gamma = gamma_central(i, schedule.q, d, k_i, T, epsilon, len(core))
        elif model == "local":
            gamma = gamma_local(i, schedule.q, d, k_i, T, epsilon, n_i)
        elif model == "shuffled":
            eps0_batch = invert_amplification(epsilon, n_i, delta)
            gamma = gamma_local(i, schedule.q, d, k_i, T, eps0_batch, n_i)
        else:
            gamma = gamma_nonprivate(i, schedule.q, d, k_i, T)

        truncated = n_i > curve.remaining
        if model == "shuffled":
            shuffler = Shuffler(substream(seed, i, ROLE_SHUFFLE))
            if truncated:
                play = actions.positions_of(shuffler.dispatch(core.ids, counts).action_ids)
            else:
                clients = ClientPool(instance, epsilon, delta, env_rng, mech, overrides, curve.pulls)
                rnd = run_shuffle_round(shuffler, clients, core.ids, counts)
                play = actions.positions_of(rnd.client_actions)
                raw_enum = np.empty(n_i)
                raw_enum[shuffler.permutation] = rnd.raw_rewards
                raw = _block_sums(raw_enum, counts)
                noisy = _block_sums(rnd.report.values, counts)
        else:
            play = np.repeat(actions.positions_of(core.ids), counts)
            if not truncated:
                rewards = pull_many(instance, play, env_rng)
                apply_overrides(rewards, overrides, curve.pulls)
                raw = _block_sums(rewards, counts)
                if model == "central":
                    noisy = mech.privatize(raw, epsilon)
                elif model == "local":
                    noisy = _block_sums(mech.privatize(rewards, epsilon), counts)
                else:
                    noisy = raw.copy()

        if truncated:
            # the horizon ends inside this batch: no estimate, no elimination
            curve.extend(gaps[play[: curve.remaining]])
            records.append(BatchRecord(
                batch_index=i, active_set=active, design=des,
                counts=_as_dict(core.ids, counts), raw_sums={}, noisy_sums={},
                theta_hat=None, gamma=gamma, batch_len=n_i, next_active_size=k_i,
                eps0_batch=eps0_batch, truncated=True,
                best_survived=active.has_id(net_best_id),
            ))
            break

        curve.extend(gaps[play])
        theta_hat = least_squares(counts, core, noisy)
        max_error = float(np.max(np.abs(active.coords @ (theta_hat - theta_star))))
        next_active = eliminate(active, theta_hat, gamma)
        records.append(BatchRecord(
            batch_index=i, active_set=active, design=des,
            counts=_as_dict(core.ids, counts),
            raw_sums=_as_dict(core.ids, raw), noisy_sums=_as_dict(core.ids, noisy),
            theta_hat=theta_hat, gamma=gamma, batch_len=n_i,
            next_active_size=len(next_active), eps0_batch=eps0_batch,
            noise_draws=mech.draws, noise_scales=tuple(mech.scales),
            max_error=max_error, best_survived=next_active.has_id(net_best_id),
        ))
        active = next_active

    exploit_id = None
    if curve.remaining > 0:
        if theta_hat is None:
            p = 0
        else:
            p = int(np.argmax(active.coords @ theta_hat))
        exploit_id = int(active.ids[p])
        curve.extend_constant(float(gaps[actions.position(exploit_id)]), curve.remaining)

    metadata = {
        "model": model,
        "epsilon": None if model == "nonprivate" else epsilon,
        "delta": delta if model == "shuffled" else None,
        "seed": seed,
        "d": d,
        "K": len(actions),
        "T": T,
        "design": design,
        "net_size": len(records[0].active_set) if records else None,
        "exploit_action": exploit_id,
        "best_action": net_best_id,
    }
    return RegretTrace(
        grid=curve.points(), batches=records, final_regret=curve.acc.cumulative,
        metadata=metadata, total_pulls=curve.pulls,
    )


def run_central(instance: BanditInstance, T: int, epsilon: float, seed: int, *,
                design: str = "core", reward_override: dict[int, float] | None = None) -> RegretTrace:
    """epsilon-DP with a trusted server: one Lap(1/epsilon) per core-action reward sum.

    ``design="uniform"`` replaces the core set by the whole active set with
    uniform weights (the no-core-set comparator).
    """
    return _run(instance, T, seed, "central", epsilon=epsilon, design=design,
                reward_override=reward_override)


def run_local(instance: BanditInstance, T: int, epsilon0: float, seed: int, *,
              reward_override: dict[int, float] | None = None) -> RegretTrace:
    """epsilon0-LDP: every client adds Lap(1/epsilon0) to its own reward."""
    return _run(instance, T, seed, "local", epsilon=epsilon0, reward_override=reward_override)


def run_shuffled(instance: BanditInstance, T: int, epsilon: float, delta: float, seed: int, *,
                 reward_override: dict[int, float] | None = None) -> RegretTrace:
    """(epsilon, delta)-DP through a trusted shuffler between clients and server."""
    return _run(instance, T, seed, "shuffled", epsilon=epsilon, delta=delta,
                reward_override=reward_override)


def run_nonprivate(instance: BanditInstance, T: int, seed: int) -> RegretTrace:
    return _run(instance, T, seed, "nonprivate")


def run_model(model: str, instance: BanditInstance, T: int, seed: int,
              epsilon: float | None = None, delta: float = 1e-6, design: str = "core") -> RegretTrace:
    if model == "central":
        return run_central(instance, T, epsilon, seed, design=design)
    if model == "local":
        return run_local(instance, T, epsilon, seed)
    if model == "shuffled":
        return run_shuffled(instance, T, epsilon, delta, seed)
    if model == "nonprivate":
        return run_nonprivate(instance, T, seed)
    raise ValueError(f"unknown model {model!r}")
