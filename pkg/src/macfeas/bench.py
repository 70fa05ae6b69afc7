"""Traversal vs. SFM timing on random boundary-straddling instances.

Powers are log-uniform on [1e-3, 1] W. Rates point along a random direction
``d`` and are scaled to ``0.97 t*`` (feasible) or ``1.03 t*`` (infeasible),
where ``t* = min_S g(S) / d(S)`` is the largest feasible scaling. ``t*`` is
found by Dinkelbach iteration over exact SFM minimizations, so the binding
subset can be anything, not just the full user set.
"""

from __future__ import annotations

import statistics
import timeit
from dataclasses import dataclass

import numpy as np

from . import sfm
from .capacity import (
    BRUTE_FORCE_CAP,
    ChannelConfig,
    capacity_of_subset,
    check_feasibility_bruteforce,
    check_feasibility_sfm,
    gap_oracle,
)

W_HZ = 2e5
N0 = 3e-7
MARGIN = 0.03


@dataclass
class BenchRow:
    n: int
    trials: int
    feasible: int
    brute_median_s: float | None
    sfm_median_s: float
    brute_calls: int | None
    sfm_median_calls: float
    agree: bool


def max_feasible_scale(cfg: ChannelConfig, direction: np.ndarray, max_iter: int = 60) -> float:
    """Largest ``t`` with ``t * direction`` inside the region (Dinkelbach)."""
    full = (1 << cfg.user_count) - 1
    t = capacity_of_subset(cfg, full) / float(direction.sum())
    for _ in range(max_iter):
        oracle = gap_oracle(cfg, t * direction)
        cert = sfm.minimize(oracle, sfm.SfmOptions(epsilon=1e-9 * cfg.bandwidth))
        s = cert.minimizing_set
        if cert.min_value >= -1e-9 * cfg.bandwidth or s == 0:
            return t
        t = capacity_of_subset(cfg, s) / float(sum(direction[i] for i in sfm.members(s)))
    return t


def random_instance(n: int, seed: int, trial: int, feasible: bool) -> tuple[ChannelConfig, np.ndarray]:
    rng = np.random.default_rng([seed, n, trial])
    powers = 10.0 ** rng.uniform(-3.0, 0.0, n)
    cfg = ChannelConfig(W_HZ, N0, tuple(powers))
    d = rng.uniform(0.2, 1.0, n)
    t = max_feasible_scale(cfg, d)
    factor = 1.0 - MARGIN if feasible else 1.0 + MARGIN
    return cfg, factor * t * d


def _timed(fn, args, repeats: int):
    """Result of ``fn(*args)`` and its best per-call time over ``repeats`` autoranged samples.

    Each sample loops the call until it spans at least 0.2 s, so
    microsecond-scale runs are not dominated by timer resolution.
    """
    out = fn(*args)
    timer = timeit.Timer(lambda: fn(*args))
    best = min(t / k for k, t in (timer.autorange() for _ in range(repeats)))
    return out, best


def run_bench(n_values, trials: int, seed: int, brute_cap: int = BRUTE_FORCE_CAP,
              repeats: int = 3) -> list[BenchRow]:
    """Median per-call times (best of ``repeats`` autoranged samples per trial) and oracle calls per ``n``.

    Trial ``k`` is feasible for even ``k``. The traversal arm is skipped above
    ``brute_cap`` users.
    """
    rows = []
    for n in n_values:
        b_times, s_times, s_calls = [], [], []
        feasible = 0
        agree = True
        for k in range(trials):
            cfg, rates = random_instance(n, seed, k, feasible=(k % 2 == 0))
            sv, best_s = _timed(check_feasibility_sfm, (cfg, rates), repeats)
            s_times.append(best_s)
            s_calls.append(sv.oracle_calls)
            feasible += sv.feasible
            if n <= brute_cap:
                bv, best_b = _timed(check_feasibility_bruteforce, (cfg, rates, brute_cap), repeats)
                b_times.append(best_b)
                agree &= bv.feasible == sv.feasible
        rows.append(BenchRow(
            n=n,
            trials=trials,
            feasible=feasible,
            brute_median_s=statistics.median(b_times) if b_times else None,
            sfm_median_s=statistics.median(s_times),
            brute_calls=(1 << n) - 1 if n <= brute_cap else None,
            sfm_median_calls=statistics.median(s_calls),
            agree=agree,
        ))
    return rows
