"""Sum-power threshold and power reallocation for a required rate vector.

Inverting the capacity region gives the feasible power region
``{P : P(S) >= (2**(R(S)/W) - 1) N0 W for all S}``. Its sum constraint is the
threshold; splitting any sum at or above it in proportion to
``2**(R_j/W) - 1`` lands inside the region.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .capacity import ChannelConfig, FeasibilityVerdict, check_feasibility

__all__ = [
    "PowerError",
    "BelowThresholdError",
    "AllocationMode",
    "AllocationResult",
    "min_sum_power",
    "allocate_optimal",
    "allocate_fixed_sum",
    "verify_power_feasibility",
    "required_subset_power",
    "power_region_slack",
]


class PowerError(ValueError):
    pass


class BelowThresholdError(PowerError):
    def __init__(self, sum_power: float, threshold: float):
        super().__init__(
            f"sum power {sum_power!r} W is below the minimum {threshold!r} W; "
            "no split of it meets the rates"
        )
        self.sum_power = sum_power
        self.threshold = threshold

    @property
    def deficit(self) -> float:
        return self.threshold - self.sum_power


class AllocationMode(str, enum.Enum):
    OPTIMAL = "optimal-min-sum"
    FIXED_SUM = "fixed-sum"


@dataclass(frozen=True)
class AllocationResult:
    powers: np.ndarray
    sum_power: float
    mode: AllocationMode
    threshold: float


def _check(rates, bandwidth: float, noise_density: float) -> np.ndarray:
    r = np.asarray(rates, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise PowerError("rates must be a non-empty vector")
    if not np.all(np.isfinite(r)) or np.any(r < 0):
        raise PowerError("rates must be finite and >= 0")
    if not (bandwidth > 0 and math.isfinite(bandwidth)):
        raise PowerError(f"bandwidth must be positive, got {bandwidth!r}")
    if not (noise_density > 0 and math.isfinite(noise_density)):
        raise PowerError(f"noise density must be positive, got {noise_density!r}")
    return r


def _excess(r: np.ndarray, bandwidth: float) -> np.ndarray:
    # 2**(R/W) - 1 without cancellation for small R/W
    return np.expm1(r / bandwidth * math.log(2.0))


def _weights(r: np.ndarray, bandwidth: float, what: str) -> tuple[np.ndarray, float]:
    if not np.any(r > 0.0):
        raise PowerError(f"all rates are zero; {what}")
    a = _excess(r, bandwidth)
    total = float(a.sum())
    if total <= 0.0:
        # excess underflows for subnormal rates; it is linear in R there
        a, total = r.copy(), float(r.sum())
    return a, total


def min_sum_power(rates, bandwidth: float, noise_density: float) -> float:
    """``(2**(sum(R)/W) - 1) N0 W``: no allocation with a smaller sum works."""
    r = _check(rates, bandwidth, noise_density)
    return float(math.expm1(r.sum() / bandwidth * math.log(2.0)) * noise_density * bandwidth)


def required_subset_power(rates, bandwidth: float, noise_density: float, s: int) -> float:
    """Least ``P(S)`` that supports the rates of subset ``s``."""
    r = _check(rates, bandwidth, noise_density)
    tot = sum(float(r[i]) for i in range(r.size) if (s >> i) & 1)
    return math.expm1(tot / bandwidth * math.log(2.0)) * noise_density * bandwidth


def allocate_fixed_sum(rates, bandwidth: float, noise_density: float, sum_power: float) -> AllocationResult:
    """Split ``sum_power`` in proportion to ``2**(R_j/W) - 1``.

    Raises :class:`BelowThresholdError` when ``sum_power`` is under the
    threshold. Users with zero rate get zero power.
    """
    r = _check(rates, bandwidth, noise_density)
    threshold = min_sum_power(r, bandwidth, noise_density)
    sum_power = float(sum_power)
    if sum_power < threshold * (1.0 - 1e-12):
        raise BelowThresholdError(sum_power, threshold)
    a, total = _weights(r, bandwidth, "the split is undefined")
    powers = (a / total) * sum_power
    return AllocationResult(powers, sum_power, AllocationMode.FIXED_SUM, threshold)


def allocate_optimal(rates, bandwidth: float, noise_density: float) -> AllocationResult:
    """Minimum-sum-power allocation: the proportional split of the threshold."""
    r = _check(rates, bandwidth, noise_density)
    threshold = min_sum_power(r, bandwidth, noise_density)
    a, total = _weights(r, bandwidth, "there is nothing to allocate")
    powers = (a / total) * threshold
    return AllocationResult(powers, threshold, AllocationMode.OPTIMAL, threshold)


def verify_power_feasibility(powers, rates, bandwidth: float, noise_density: float) -> FeasibilityVerdict:
    """Check ``P(S) >= (2**(R(S)/W) - 1) N0 W`` for every subset.

    The verdict is expressed in rate units so it lines up with the capacity
    module: ``min_gap`` is the smallest ``g(S) - R(S)`` under these powers and
    the same ``1e-9 W`` tolerance applies.
    """
    r = _check(rates, bandwidth, noise_density)
    p = np.asarray(powers, dtype=float)
    if p.shape != r.shape:
        raise PowerError(f"{p.size} powers for {r.size} rates")
    cfg = ChannelConfig(bandwidth, noise_density, tuple(p))
    return check_feasibility(cfg, r, method="auto")


def power_region_slack(powers, rates, bandwidth: float, noise_density: float) -> tuple[float, int]:
    """Smallest relative power slack ``P(S)/need(S) - 1`` over nonempty subsets.

    Enumerates subsets; used to cross-check :func:`verify_power_feasibility`
    in power units.
    """
    r = _check(rates, bandwidth, noise_density)
    p = np.asarray(powers, dtype=float)
    n = r.size
    best, best_mask = math.inf, 0
    for s in range(1, 1 << n):
        need = required_subset_power(r, bandwidth, noise_density, s)
        have = sum(float(p[i]) for i in range(n) if (s >> i) & 1)
        if need <= 0.0:
            continue
        slack = have / need - 1.0
        if slack < best:
            best, best_mask = slack, s
    return best, best_mask
