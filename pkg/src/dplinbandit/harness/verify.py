"""Fast invariant checks behind ``dplinbandit verify``.

Each check returns a :class:`Check`; none of them raise on failure so the
whole suite always reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..bandit.algorithms import run_central, run_model
from ..environment import circle_points, generate_instance, sphere_points
from ..geometry import ActionSet, NetParams, build_zeta_net, design_norms, frank_wolfe_design, span_rank
from ..privacy import (
    amplify,
    invert_amplification,
    laplace_sum_tail,
    laplace_sum_tail_conservative,
    sample_laplace_array,
    validity_boundary,
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def check_covering() -> Check:
    worst = 0.0
    for seed in range(5):
        pts = ActionSet(circle_points(300, seed))
        zeta = 0.05 + 0.05 * seed
        net = build_zeta_net(pts, NetParams(zeta))
        dist = np.linalg.norm(pts.coords[:, None, :] - net.coords[None, :, :], axis=2).min(axis=1)
        worst = max(worst, float(dist.max() / zeta))
        if span_rank(net.coords) != span_rank(pts.coords):
            return Check("covering", False, f"net loses span (seed {seed})")
    return Check("covering", worst <= 1.0, f"max distance / zeta = {worst:.3f}")


def check_design() -> Check:
    worst = 0.0
    for seed in range(10):
        d = (2, 3, 5)[seed % 3]
        acts = ActionSet(sphere_points(50, d, seed))
        des = frank_wolfe_design(acts)
        ratio = float(design_norms(acts, des).max()) / (2 * des.span_dim * 1.05)
        worst = max(worst, ratio)
        if abs(sum(des.weights.values()) - 1.0) > 1e-9:
            return Check("design", False, "weights do not sum to one")
        if np.linalg.eigvalsh(des.design_matrix).min() < -1e-10:
            return Check("design", False, "design matrix not PSD")
    return Check("design", worst <= 1.0, f"max norm / bound = {worst:.3f}")


def check_amplification() -> Check:
    delta = 1e-6
    worst = 0.0
    for n in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
        for eps in (0.01, 0.05, 0.1, 0.5):
            eps0 = invert_amplification(eps, n, delta)
            if eps0 < eps:
                return Check("amplification", False, f"eps0 < eps at n={n}, eps={eps}")
            if eps0 <= validity_boundary(n, delta) and eps0 > eps:
                worst = max(worst, abs(amplify(eps0, n, delta) - eps))
    return Check("amplification", worst <= 1e-9, f"max round-trip error {worst:.2e}")


def check_laplace_tail() -> Check:
    rng = np.random.default_rng(11)
    trials = 20000
    worst, stated_violations = -math.inf, 0
    for n in (1, 5, 20):
        sums = sample_laplace_array(1.0, trials * n, rng).reshape(trials, n).sum(axis=1)
        for f in (0.5, 1.0, 2.0):
            t = f * n
            p = float(np.mean(sums >= t))
            se = math.sqrt(max(p * (1 - p), 1.0 / trials) / trials)
            worst = max(worst, (p - laplace_sum_tail_conservative(n, 1.0, 1.0, t)) / se)
            if (p - laplace_sum_tail(n, 1.0, 1.0, t)) / se > 3.0:
                stated_violations += 1
    return Check("laplace-tail", worst <= 3.0,
                 f"conservative bound max excess {worst:.2f} s.e.; "
                 f"stated bound exceeded in {stated_violations}/9 cells")


def check_runs() -> Check:
    T = 20_000
    inst = generate_instance(2, 10, 0)
    for model, eps in (("nonprivate", None), ("central", 1.0), ("local", 1.0), ("shuffled", 0.5)):
        tr = run_model(model, inst, T, 0, epsilon=eps, delta=1e-6)
        if tr.total_pulls != T:
            return Check("runs", False, f"{model}: {tr.total_pulls} pulls != T")
        regret = tr.regret
        if np.any(np.diff(regret) < -1e-9):
            return Check("runs", False, f"{model}: regret decreases")
        for rec in tr.batches:
            if rec.truncated:
                continue
            if model == "central" and rec.noise_draws != rec.core_size:
                return Check("runs", False, "central noise count != |C_i|")
            if model in ("local", "shuffled") and rec.noise_draws != rec.batch_len:
                return Check("runs", False, f"{model} noise count != n_i")
            if model == "shuffled" and rec.eps0_batch < eps:
                return Check("runs", False, "eps0 below eps")
    return Check("runs", True, "budget, monotone regret and noise counts hold")


def check_sensitivity() -> Check:
    inst = generate_instance(2, 10, 3)
    T = 20_000
    base = run_model("central", inst, T, 3, epsilon=1.0)
    last = [r for r in base.batches if not r.truncated][-1]
    start = sum(r.batch_len for r in base.batches if r.batch_index < last.batch_index)
    t = start + last.batch_len // 2
    replay = run_central(inst, T, 1.0, 3, reward_override={t: -1.0})
    changed = []
    for a, b in zip(base.batches, replay.batches):
        for k in a.raw_sums:
            diff = abs(a.raw_sums[k] - b.raw_sums.get(k, math.nan))
            if diff > 0:
                changed.append(diff)
    ok = len(changed) == 1 and changed[0] <= 2.0
    return Check("sensitivity", ok, f"{len(changed)} sum(s) changed, by {changed}")


CHECKS: tuple[Callable[[], Check], ...] = (
    check_covering,
    check_design,
    check_amplification,
    check_laplace_tail,
    check_runs,
    check_sensitivity,
)


def run_checks() -> list[Check]:
    results = []
    for fn in CHECKS:
        try:
            results.append(fn())
        except Exception as exc:
            results.append(Check(fn.__name__.removeprefix("check_"), False, f"{type(exc).__name__}: {exc}"))
    return results
