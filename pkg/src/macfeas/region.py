"""Capacity-region geometry as plot data for two and three users.

Vertices of the polymatroid are the successive-decoding corner points of every
user subset (users outside the subset at rate zero); facets are the sum-rate
constraints ``R(S) <= g(S)``. Output is tab-separated with a single header
line and one record per vertex, facet, or the required-rate point:

    kind    label   r1 .. rN    value

``vertex`` rows hold coordinates and their sum rate; ``facet`` rows hold the
0/1 membership of ``S`` and the bound ``g(S)``; the ``point`` row holds the
required rates and the smallest gap ``g(S) - R(S)`` (negative means outside).
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .capacity import ChannelConfig, capacity_of_subset, check_feasibility_bruteforce
from .report import fmt

__all__ = ["RegionError", "region_vertices", "region_facets", "region_records", "format_region"]


class RegionError(ValueError):
    pass


def region_vertices(cfg: ChannelConfig) -> list[tuple[str, np.ndarray]]:
    """Distinct corner points, labelled by the order marginal gains are taken.

    Label ``"2>1"`` gives user 2 the single-user rate ``g({2})`` and user 1
    the remainder ``g({1,2}) - g({2})``; users are 1-based in labels and
    users not named sit at zero rate.
    """
    n = cfg.user_count
    out: list[tuple[str, np.ndarray]] = []
    seen: set[tuple] = set()
    for k in range(n + 1):
        for subset in itertools.combinations(range(n), k):
            for order in itertools.permutations(subset):
                pt = np.zeros(n)
                mask, prev = 0, 0.0
                for u in order:
                    mask |= 1 << u
                    val = capacity_of_subset(cfg, mask)
                    pt[u] = val - prev
                    prev = val
                key = tuple(round(float(v), 6) for v in pt)
                if key in seen:
                    continue
                seen.add(key)
                label = ">".join(str(u + 1) for u in order) or "origin"
                out.append((label, pt))
    return out


def region_facets(cfg: ChannelConfig) -> list[tuple[int, float]]:
    n = cfg.user_count
    return [(s, capacity_of_subset(cfg, s)) for s in range(1, 1 << n)]


def region_records(cfg: ChannelConfig, rates: Sequence[float]) -> list[list]:
    n = cfg.user_count
    if n not in (2, 3):
        raise RegionError(f"region plots support 2 or 3 users, got {n}")
    r = np.asarray(rates, dtype=float)
    rows: list[list] = []
    for label, pt in region_vertices(cfg):
        rows.append(["vertex", label, *pt.tolist(), float(pt.sum())])
    for s, bound in region_facets(cfg):
        label = "S=" + ",".join(str(i + 1) for i in range(n) if (s >> i) & 1)
        rows.append(["facet", label, *[float((s >> i) & 1) for i in range(n)], bound])
    verdict = check_feasibility_bruteforce(cfg, r)
    rows.append(["point", "required", *r.tolist(), verdict.min_gap])
    return rows


def format_region(cfg: ChannelConfig, rates: Sequence[float]) -> str:
    rows = region_records(cfg, rates)
    n = cfg.user_count
    header = "\t".join(["kind", "label", *[f"r{i + 1}" for i in range(n)], "value"])
    lines = [header]
    for row in rows:
        lines.append("\t".join([row[0], row[1], *[fmt(v) for v in row[2:]]]))
    return "\n".join(lines) + "\n"
