"""Scenario files: one JSON document in SI units.

    {
      "channel": {"bandwidth_hz": 200000, "noise_density_w_per_hz": 3e-7},
      "users": [
        {"arrival_rate": 800, "delay_bound_s": 8e-6, "power_w": 0.02},
        ...
      ]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .capacity import ChannelConfig
from .queueing import UserDemand, required_rate_vector

__all__ = ["ScenarioError", "Scenario", "parse_scenario", "load_scenario"]


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    channel: ChannelConfig
    demands: tuple[UserDemand, ...]

    @property
    def user_count(self) -> int:
        return len(self.demands)

    def required_rates(self) -> np.ndarray:
        return required_rate_vector(self.demands)

    def to_dict(self) -> dict[str, Any]:
        return {
            "channel": {
                "bandwidth_hz": self.channel.bandwidth,
                "noise_density_w_per_hz": self.channel.noise_density,
            },
            "users": [
                {"arrival_rate": d.arrival_rate, "delay_bound_s": d.delay_bound, "power_w": p}
                for d, p in zip(self.demands, self.channel.powers)
            ],
        }


def _number(obj: dict, key: str, where: str, *, positive: bool) -> float:
    if key not in obj:
        raise ScenarioError(f"{where}.{key}: missing")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where}.{key}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v) or (v <= 0 if positive else v < 0):
        bound = "> 0" if positive else ">= 0"
        raise ScenarioError(f"{where}.{key}: must be {bound}, got {v!r}")
    return v


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario JSON; errors name the line or field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("top level: expected an object")
    ch = doc.get("channel")
    if not isinstance(ch, dict):
        raise ScenarioError("channel: missing or not an object")
    w = _number(ch, "bandwidth_hz", "channel", positive=True)
    n0 = _number(ch, "noise_density_w_per_hz", "channel", positive=True)
    users = doc.get("users")
    if not isinstance(users, list) or not users:
        raise ScenarioError("users: expected a non-empty list")
    demands, powers = [], []
    for i, u in enumerate(users):
        where = f"users[{i}]"
        if not isinstance(u, dict):
            raise ScenarioError(f"{where}: expected an object")
        lam = _number(u, "arrival_rate", where, positive=True)
        tau = _number(u, "delay_bound_s", where, positive=True)
        demands.append(UserDemand(lam, tau))
        powers.append(_number(u, "power_w", where, positive=False))
    return Scenario(ChannelConfig(w, n0, tuple(powers)), tuple(demands))


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"{p}: {exc.strerror}") from exc
    try:
        return parse_scenario(text)
    except ScenarioError as exc:
        raise ScenarioError(f"{p}: {exc}") from exc
