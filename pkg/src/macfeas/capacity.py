"""Gaussian multiple-access capacity region and membership tests.

The region is the polymatroid ``{R >= 0 : R(S) <= g(S) for all S}`` with
``g(S) = W log2(1 + P(S) / (N0 W))``. A rate vector is inside iff the gap
``f(S) = g(S) - R(S)`` has minimum zero (attained at the empty set). Subsets
are bitmasks over 0-based user indices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import sfm

__all__ = [
    "CapacityError",
    "ChannelConfig",
    "Method",
    "FeasibilityVerdict",
    "BRUTE_FORCE_CAP",
    "feasibility_tolerance",
    "capacity_of_subset",
    "gap",
    "gap_oracle",
    "check_feasibility_bruteforce",
    "check_feasibility_equal_power",
    "check_feasibility_sfm",
    "check_feasibility",
    "powers_equal",
]

BRUTE_FORCE_CAP = 25
TOL_PER_HZ = 1e-9
EPSILON_PER_HZ = 1e-6


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelConfig:
    """Bandwidth ``W`` (Hz), noise density ``N0`` (W/Hz) and per-user powers (W)."""

    bandwidth: float
    noise_density: float
    powers: tuple[float, ...]

    def __post_init__(self) -> None:
        w, n0 = float(self.bandwidth), float(self.noise_density)
        if not (math.isfinite(w) and w > 0):
            raise CapacityError(f"bandwidth must be positive, got {self.bandwidth!r}")
        if not (math.isfinite(n0) and n0 > 0):
            raise CapacityError(f"noise_density must be positive, got {self.noise_density!r}")
        powers = tuple(float(p) for p in self.powers)
        if not powers:
            raise CapacityError("at least one user is required")
        for i, p in enumerate(powers):
            if not (math.isfinite(p) and p >= 0):
                raise CapacityError(f"power of user {i} must be >= 0, got {p!r}")
        object.__setattr__(self, "bandwidth", w)
        object.__setattr__(self, "noise_density", n0)
        object.__setattr__(self, "powers", powers)

    @property
    def user_count(self) -> int:
        return len(self.powers)

    @property
    def noise_power(self) -> float:
        return self.noise_density * self.bandwidth

    def with_powers(self, powers: Sequence[float]) -> "ChannelConfig":
        return ChannelConfig(self.bandwidth, self.noise_density, tuple(powers))


class Method(str, enum.Enum):
    BRUTE_FORCE = "brute-force"
    EQUAL_POWER = "equal-power"
    SFM = "sfm"


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of a membership test.

    ``min_gap`` is the minimum of ``f`` over all subsets, empty set included,
    so it is never positive. ``exact`` is False only when an SFM run stopped as
    soon as infeasibility was proven; ``min_gap`` is then an upper bound on the
    true minimum (still below ``-tolerance``).
    """

    feasible: bool
    min_gap: float
    witness: int
    method: Method
    tolerance: float
    exact: bool = True
    oracle_calls: int = 0

    @property
    def witness_members(self) -> list[int]:
        return sfm.members(self.witness)


def feasibility_tolerance(cfg: ChannelConfig) -> float:
    return TOL_PER_HZ * cfg.bandwidth


def _rates(cfg: ChannelConfig, rates) -> np.ndarray:
    r = np.asarray(rates, dtype=float)
    if r.ndim != 1 or r.shape[0] != cfg.user_count:
        raise CapacityError(f"expected {cfg.user_count} rates, got shape {r.shape}")
    if not np.all(np.isfinite(r)) or np.any(r < 0):
        raise CapacityError("rates must be finite and >= 0")
    return r


def _rate_list(cfg: ChannelConfig, rates) -> list[float]:
    # pure-Python twin of _rates; numpy's per-call overhead dominates small N
    try:
        r = [float(v) for v in rates]
    except (TypeError, ValueError) as exc:
        raise CapacityError(f"rates must be a vector of numbers: {exc}") from exc
    if len(r) != cfg.user_count:
        raise CapacityError(f"expected {cfg.user_count} rates, got {len(r)}")
    if not all(0.0 <= v < math.inf for v in r):
        raise CapacityError("rates must be finite and >= 0")
    return r


def capacity_of_subset(cfg: ChannelConfig, s: int) -> float:
    """Sum-rate bound ``W log2(1 + P(S)/(N0 W))`` of subset ``s``."""
    if s < 0 or s >> cfg.user_count:
        raise CapacityError(f"subset {s:#x} is not within {cfg.user_count} users")
    p = sum(cfg.powers[i] for i in sfm.members(s))
    return cfg.bandwidth * math.log2(1.0 + p / cfg.noise_power)


def gap(cfg: ChannelConfig, rates, s: int) -> float:
    """``g(S) - R(S)``; negative means the subset's sum-rate bound is violated."""
    r = _rates(cfg, rates)
    return capacity_of_subset(cfg, s) - float(sum(r[i] for i in sfm.members(s)))


def _gap_function(cfg: ChannelConfig, r: np.ndarray):
    # byte-wise lookup tables keep each evaluation O(n / 8)
    n = cfg.user_count
    w, inv_noise = cfg.bandwidth, 1.0 / cfg.noise_power
    p_tabs, r_tabs = [], []
    for lo in range(0, n, 8):
        ps = list(cfg.powers[lo:lo + 8])
        rs = [float(v) for v in r[lo:lo + 8]]
        p_tabs.append(_subset_sums(ps))
        r_tabs.append(_subset_sums(rs))
    chunks = list(zip(range(0, n, 8), p_tabs, r_tabs))
    log2 = math.log2

    def f(mask: int) -> float:
        if mask == 0:
            return 0.0
        p = rr = 0.0
        for lo, pt, rt in chunks:
            b = (mask >> lo) & 0xFF
            p += pt[b]
            rr += rt[b]
        return w * log2(1.0 + p * inv_noise) - rr

    return f


def gap_oracle(cfg: ChannelConfig, rates) -> sfm.SubmodularOracle:
    """Memoized oracle for the gap function, ready for :func:`sfm.minimize`."""
    r = _rates(cfg, rates)
    return sfm.SubmodularOracle(_gap_function(cfg, r), cfg.user_count)


def _subset_sums(values: Sequence[float]) -> list[float]:
    out = [0.0]
    for v in values:
        out = out + [s + v for s in out]
    return out


def check_feasibility_bruteforce(cfg: ChannelConfig, rates, cap: int = BRUTE_FORCE_CAP) -> FeasibilityVerdict:
    """Evaluate every one of the ``2**N - 1`` sum-rate inequalities.

    Subsets are visited in increasing bitmask order; the witness is the
    smallest bitmask attaining the minimum (the empty set when nothing is
    negative).
    """
    n = cfg.user_count
    if n > cap:
        raise CapacityError(f"{n} users exceeds the brute-force cap of {cap}")
    r = _rate_list(cfg, rates)
    w, inv_noise = cfg.bandwidth, 1.0 / cfg.noise_power
    k = min(n, 10)
    low_p = _subset_sums(cfg.powers[:k])
    low_r = _subset_sums(r[:k])
    high_p = _subset_sums(cfg.powers[k:])
    high_r = _subset_sums(r[k:])
    log2 = math.log2
    best, best_mask = 0.0, 0
    for hi, (hp, hr) in enumerate(zip(high_p, high_r)):
        vals = [w * log2(1.0 + (hp + p) * inv_noise) - (hr + q) for p, q in zip(low_p, low_r)]
        if hi == 0:
            vals[0] = 0.0
        m = min(vals)
        if m < best:
            best = m
            best_mask = (hi << k) | vals.index(m)
    tol = feasibility_tolerance(cfg)
    return FeasibilityVerdict(best >= -tol, best, best_mask, Method.BRUTE_FORCE, tol,
                              oracle_calls=(1 << n) - 1)


def powers_equal(cfg: ChannelConfig, rel: float = 1e-12) -> bool:
    p0 = cfg.powers[0]
    return all(abs(p - p0) <= rel * max(abs(p0), abs(p)) for p in cfg.powers)


def check_feasibility_equal_power(cfg: ChannelConfig, rates) -> FeasibilityVerdict:
    """``N``-inequality test for users sharing one transmit power.

    With equal powers ``g`` depends only on ``|S|``, so for each size ``k`` the
    binding subset is the ``k`` largest rates.
    """
    if not powers_equal(cfg):
        raise CapacityError("equal-power test requires all powers equal")
    r = _rate_list(cfg, rates)
    n = cfg.user_count
    order = sorted(range(n), key=lambda i: (-r[i], i))
    p = cfg.powers[0]
    best, best_mask, prefix, mask = 0.0, 0, 0.0, 0
    for k, i in enumerate(order, start=1):
        prefix += r[i]
        mask |= 1 << i
        slack = cfg.bandwidth * math.log2(1.0 + k * p / cfg.noise_power) - prefix
        if slack < best:
            best, best_mask = slack, mask
    tol = feasibility_tolerance(cfg)
    return FeasibilityVerdict(best >= -tol, best, best_mask, Method.EQUAL_POWER, tol, oracle_calls=n)


def check_feasibility_sfm(
    cfg: ChannelConfig,
    rates,
    epsilon: Optional[float] = None,
    early_exit: bool = True,
) -> FeasibilityVerdict:
    """Membership by submodular minimization of the gap function.

    With ``early_exit`` the solver stops once the verdict is certain: a base
    with ``x^-(E) >= -tol`` proves feasibility, any evaluated subset with
    ``f(S) < -tol`` proves infeasibility.
    """
    oracle = gap_oracle(cfg, rates)
    tol = feasibility_tolerance(cfg)
    eps = epsilon if epsilon is not None else EPSILON_PER_HZ * cfg.bandwidth
    opts = sfm.SfmOptions(epsilon=eps, decision_tol=tol if early_exit else None)
    cert = sfm.minimize(oracle, opts)
    if cert.stop_reason == "decided-feasible":
        feasible = True
    elif cert.stop_reason == "decided-infeasible":
        feasible = False
    else:
        feasible = cert.min_value >= -tol
    exact = cert.stop_reason != "decided-infeasible"
    return FeasibilityVerdict(feasible, cert.min_value, cert.minimizing_set, Method.SFM, tol,
                              exact=exact, oracle_calls=cert.oracle_calls)


def check_feasibility(cfg: ChannelConfig, rates, method: str = "auto",
                      brute_cap: int = BRUTE_FORCE_CAP) -> FeasibilityVerdict:
    """Dispatch on ``method``: ``auto``, ``brute``, ``equal-power`` or ``sfm``.

    ``auto`` uses the equal-power test when powers are equal, brute force up to
    ``brute_cap`` users and SFM beyond.
    """
    if method == "auto":
        if powers_equal(cfg):
            return check_feasibility_equal_power(cfg, rates)
        if cfg.user_count > brute_cap:
            return check_feasibility_sfm(cfg, rates)
        return check_feasibility_bruteforce(cfg, rates, cap=brute_cap)
    if method in ("brute", "brute-force"):
        return check_feasibility_bruteforce(cfg, rates, cap=brute_cap)
    if method == "equal-power":
        return check_feasibility_equal_power(cfg, rates)
    if method == "sfm":
        return check_feasibility_sfm(cfg, rates)
    raise CapacityError(f"unknown method {method!r}")
