"""Delay requirements to required service rates.

Each user's buffer is an M/G/1 queue fed by Poisson packets of a fixed length
of one bit, so packet rates and bit rates coincide numerically. The mean
sojourn time of an M/G/1 queue follows from Pollaczek-Khinchine plus Little's
law; inverting it gives the smallest mean service rate that meets a delay
bound. Deterministic service (M/D/1, zero coefficient of variation) needs the
least rate of all service disciplines, so that is the rate the rest of the
package asks the channel for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "QueueingError",
    "UnstableQueueError",
    "UserDemand",
    "ServiceSpec",
    "sojourn_time",
    "required_rate_general",
    "required_rate",
    "required_rate_vector",
]


class QueueingError(ValueError):
    """Invalid queueing input (non-positive rate, bound, or negative cv)."""


class UnstableQueueError(QueueingError):
    """Arrival rate at or above the service rate."""


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise QueueingError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class UserDemand:
    """Poisson arrival rate (packets/s) and mean delay bound (s) of one user."""

    arrival_rate: float
    delay_bound: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "arrival_rate", _positive("arrival_rate", self.arrival_rate))
        object.__setattr__(self, "delay_bound", _positive("delay_bound", self.delay_bound))


@dataclass(frozen=True)
class ServiceSpec:
    """Mean service rate (bits/s) and coefficient of variation of the service time."""

    mean_rate: float
    cv_service_time: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean_rate", _positive("mean_rate", self.mean_rate))
        cv = float(self.cv_service_time)
        if not math.isfinite(cv) or cv < 0.0:
            raise QueueingError(f"cv_service_time must be >= 0, got {cv!r}")
        object.__setattr__(self, "cv_service_time", cv)


def sojourn_time(spec: ServiceSpec, arrival_rate: float) -> float:
    """Mean time a packet spends in an M/G/1 queue (waiting plus service).

    Parameters
    ----------
    spec : ServiceSpec
        Service rate ``R`` and service-time coefficient of variation ``c``.
    arrival_rate : float
        Poisson arrival rate ``lam``; must satisfy ``lam < R``.

    Returns
    -------
    float
        ``1/R + (lam/R**2)(1 + c**2) / (2(1 - lam/R))`` seconds.
    """
    lam = _positive("arrival_rate", arrival_rate)
    rate = spec.mean_rate
    rho = lam / rate
    if rho >= 1.0:
        raise UnstableQueueError(
            f"arrival rate {lam!r} >= service rate {rate!r}; utilization {rho:.6g}"
        )
    cv2 = spec.cv_service_time ** 2
    return 1.0 / rate + (lam / rate**2) * (1.0 + cv2) / (2.0 * (1.0 - rho))


def required_rate_general(demand: UserDemand, cv: float) -> float:
    """Smallest mean service rate meeting ``demand`` for service-time cv ``cv``.

    Positive root of the sojourn-time equation solved for ``R``:
    ``((lam*tau + 1) + sqrt(lam**2 tau**2 + 2 lam tau cv**2 + 1)) / (2 tau)``.
    """
    cv = float(cv)
    if not math.isfinite(cv) or cv < 0.0:
        raise QueueingError(f"cv must be >= 0, got {cv!r}")
    lt = demand.arrival_rate * demand.delay_bound
    return ((lt + 1.0) + math.sqrt(lt * lt + 2.0 * lt * cv * cv + 1.0)) / (2.0 * demand.delay_bound)


def required_rate(demand: UserDemand) -> float:
    """Required service rate under deterministic (M/D/1) service.

    Always strictly above the arrival rate, so the resulting queue is stable.
    """
    lt = demand.arrival_rate * demand.delay_bound
    return ((lt + 1.0) + math.sqrt(lt * lt + 1.0)) / (2.0 * demand.delay_bound)


def required_rate_vector(demands: Sequence[UserDemand]) -> np.ndarray:
    """Per-user M/D/1 required rates, in input order."""
    if len(demands) == 0:
        raise QueueingError("at least one user demand is required")
    out = np.empty(len(demands))
    for i, d in enumerate(demands):
        try:
            out[i] = required_rate(d)
        except QueueingError as exc:
            raise QueueingError(f"user {i}: {exc}") from exc
    return out
