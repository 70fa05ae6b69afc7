"""Combinatorial submodular function minimization by flow scaling.

The solver keeps a base ``x`` of the base polyhedron ``B(f)`` as a convex
combination of extreme bases (one per linear ordering) together with a flow
``phi`` on the complete directed graph over the ground set. It pushes the
vector ``z = x + boundary(phi)`` towards nonnegativity: flow is augmented from
``C = {z <= -delta}`` to ``D = {z >= delta}`` along zero-flow arcs, and when no
such path exists, Double-Exchange swaps adjacent elements in one of the
orderings so that flow is traded for base mass without changing ``z``. The
scale ``delta`` halves after each phase.

Sets are bitmasks over ``range(n)``: bit ``i`` set means element ``i`` is a
member. Weak duality ``x^-(E) <= min_S f(S)`` for every ``x`` in ``B(f)``
turns the final base into a certificate for the returned set.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "SfmError",
    "NotNormalizedError",
    "SubmodularityViolation",
    "InactiveTripleError",
    "AdjacencyError",
    "BudgetExceeded",
    "SubmodularOracle",
    "ExtremeBase",
    "SfmOptions",
    "SfmCertificate",
    "ScalingState",
    "mask_of",
    "members",
    "extreme_base",
    "exchange_capacity",
    "reduce_combination",
    "minimize",
    "brute_force_minimum",
]


class SfmError(RuntimeError):
    pass


class NotNormalizedError(SfmError):
    """The oracle does not satisfy ``f(empty) == 0``."""


class SubmodularityViolation(SfmError):
    pass


class InactiveTripleError(SfmError):
    pass


class AdjacencyError(SfmError):
    """``u`` does not immediately succeed ``v`` in the ordering."""


class BudgetExceeded(SfmError):
    pass


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class SubmodularOracle:
    """Memoizing wrapper around a set function ``func(mask) -> float``.

    ``eval_count`` counts distinct sets evaluated (cache misses); ``best_mask``
    and ``best_value`` track the smallest value seen so far, starting from the
    empty set at 0. Ties keep the smaller bitmask.
    """

    def __init__(self, func: Callable[[int], float], ground_size: int, cache_cap: int = 1 << 22):
        if ground_size < 0:
            raise ValueError("ground_size must be >= 0")
        self.func = func
        self.ground_size = int(ground_size)
        self.cache_cap = cache_cap
        self.eval_count = 0
        self.best_mask = 0
        self.best_value = 0.0
        self._cache: dict[int, float] = {}

    @property
    def full_mask(self) -> int:
        return (1 << self.ground_size) - 1

    def __call__(self, mask: int) -> float:
        v = self._cache.get(mask)
        if v is not None:
            return v
        v = float(self.func(mask))
        self.eval_count += 1
        if len(self._cache) < self.cache_cap:
            self._cache[mask] = v
        if v < self.best_value or (v == self.best_value and mask < self.best_mask):
            self.best_value = v
            self.best_mask = mask
        return v


@dataclass
class ExtremeBase:
    """Extreme base generated by a linear ordering, with its convex weight.

    ``prefix[p]`` is the bitmask of ``ordering[: p + 1]``; ``position`` maps an
    element to its index in ``ordering``.
    """

    vector: list[float]
    ordering: list[int]
    coefficient: float = 1.0
    prefix: list[int] = field(default_factory=list, repr=False)
    position: list[int] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if not self.prefix:
            m, pre = 0, []
            for e in self.ordering:
                m |= 1 << e
                pre.append(m)
            self.prefix = pre
        if not self.position:
            pos = [0] * len(self.ordering)
            for p, e in enumerate(self.ordering):
                pos[e] = p
            self.position = pos

    def copy(self) -> "ExtremeBase":
        return ExtremeBase(
            list(self.vector), list(self.ordering), self.coefficient,
            list(self.prefix), list(self.position),
        )

    def swap_adjacent(self, u: int, v: int) -> None:
        """Interchange ``v`` and its immediate successor ``u`` in the ordering."""
        p = self.position[u]
        self.ordering[p - 1], self.ordering[p] = u, v
        self.position[u], self.position[v] = p - 1, p
        below = self.prefix[p - 2] if p >= 2 else 0
        self.prefix[p - 1] = below | (1 << u)


def extreme_base(oracle: SubmodularOracle, ordering: Sequence[int]) -> ExtremeBase:
    """Marginal gains ``y(v) = f(L(v)) - f(L(v) - {v})`` along ``ordering``."""
    n = oracle.ground_size
    ordering = [int(e) for e in ordering]
    if sorted(ordering) != list(range(n)):
        raise ValueError(f"ordering {ordering} is not a permutation of range({n})")
    y = [0.0] * n
    prev_mask, prev_val = 0, oracle(0)
    for e in ordering:
        m = prev_mask | (1 << e)
        val = oracle(m)
        y[e] = val - prev_val
        prev_mask, prev_val = m, val
    return ExtremeBase(y, ordering)


def exchange_capacity(oracle: SubmodularOracle, base: ExtremeBase, u: int, v: int) -> float:
    """Exchange capacity ``f(L(u) - {v}) - f(L(u)) + y(v)``.

    ``u`` must immediately succeed ``v`` in ``base.ordering``. Submodularity
    makes the result nonnegative; rounding can leave a tiny negative value,
    which is returned as is.
    """
    p = base.position[u]
    if p == 0 or base.ordering[p - 1] != v:
        raise AdjacencyError(f"{u} does not immediately succeed {v} in {base.ordering}")
    lu = base.prefix[p]
    return oracle(lu & ~(1 << v)) - oracle(lu) + base.vector[v]


def _affine_null_vector(Y: np.ndarray, rel_tol: float) -> Optional[np.ndarray]:
    """Nonzero ``mu`` with ``Y.T @ mu == 0`` and ``sum(mu) == 0``, or None.

    ``Y`` holds one base per row. The ones row is scaled to the data so that
    the rank decision is not dominated by units.
    """
    k, n = Y.shape
    if k == 1:
        return None
    scale = float(np.max(np.abs(Y))) or 1.0
    A = np.vstack([Y.T, np.full((1, k), scale)])
    if k > n + 1:
        # more columns than rows: a null vector exists outright
        _, _, vt = np.linalg.svd(A, full_matrices=True)
        return vt[-1]
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    if s[-1] <= rel_tol * max(s[0], scale):
        return vt[-1]
    return None


def reduce_combination(bases: list[ExtremeBase], rel_tol: float = 1e-12,
                       copy: bool = True) -> list[ExtremeBase]:
    """Prune a convex combination to affinely independent extreme bases.

    Repeatedly finds an affine dependence ``sum(mu_j y_j) = 0, sum(mu_j) = 0``,
    moves the weights by ``theta = min(lambda_j / mu_j : mu_j > 0)`` and drops
    the weights that reach zero. The combined vector and the total weight are
    unchanged up to rounding. Returns a new list; with ``copy=False`` the
    surviving bases are the input objects with their weights updated.
    """
    if not bases:
        raise ValueError("empty combination")
    lam_sum = sum(b.coefficient for b in bases)
    if any(b.coefficient < 0 for b in bases) or abs(lam_sum - 1.0) > 1e-9:
        raise ValueError(f"inconsistent combination: weights sum to {lam_sum!r}")
    kept = [b.copy() if copy else b for b in bases if b.coefficient > 0.0]
    while len(kept) > 1:
        Y = np.array([b.vector for b in kept])
        mu = _affine_null_vector(Y, rel_tol)
        if mu is None:
            break
        if not np.any(mu > 0):
            mu = -mu
        lam = np.array([b.coefficient for b in kept])
        pos = mu > 0
        ratios = np.where(pos, lam / np.where(pos, mu, 1.0), np.inf)
        j = int(np.argmin(ratios))
        theta = ratios[j]
        lam = lam - theta * mu
        lam[j] = 0.0
        survivors = []
        for b, w in zip(kept, lam):
            if w > 0.0:
                b.coefficient = float(w)
                survivors.append(b)
        kept = survivors
    return kept


def brute_force_minimum(func: Callable[[int], float], n: int) -> tuple[float, int]:
    """Exhaustive minimum over all ``2**n`` sets; ties go to the smallest mask."""
    best_v, best_m = float(func(0)), 0
    for m in range(1, 1 << n):
        v = float(func(m))
        if v < best_v:
            best_v, best_m = v, m
    return best_v, best_m


@dataclass
class SfmOptions:
    """Solver settings.

    epsilon
        Target duality gap; the solver stops once ``f(best) - x^-(E) <= epsilon``.
        ``None`` picks ``1e-9`` times the largest prefix value of the initial base.
    decision_tol
        If set, stop as soon as the sign of the minimum relative to
        ``-decision_tol`` is certain (``x^-(E) >= -tol`` or some ``f(S) < -tol``).
    budget_constant
        Scales the defensive step budget ``c * n**5 * log2(M / epsilon)``.
    debug
        Spot-check submodularity on random pairs and assert base consistency.
    observer
        ``observer(event, state, info)`` is called on ``"init"``,
        ``"double_exchange"``, ``"augment"``, ``"reduce"``, ``"phase_end"``,
        ``"halve"``.
    """

    epsilon: Optional[float] = None
    decision_tol: Optional[float] = None
    budget_constant: float = 50.0
    debug: bool = False
    debug_samples: int = 64
    seed: int = 0
    observer: Optional[Callable[[str, "ScalingState", dict], None]] = None


@dataclass
class SfmCertificate:
    min_value: float
    minimizing_set: int
    base: np.ndarray
    bases: list[ExtremeBase]
    oracle_calls: int
    x_minus: float
    duality_gap: float
    converged: bool
    stop_reason: str
    phases: int = 0
    double_exchanges: int = 0
    augmentations: int = 0

    @property
    def members(self) -> list[int]:
        return members(self.minimizing_set)


class ScalingState:
    """Mutable state of one scaling run: bases, weights, ``x``, flow, ``delta``.

    ``reach[v]`` marks vertices reachable from ``C`` along zero-flow arcs
    (the set called ``B`` in the algorithm).
    """

    def __init__(self, oracle: SubmodularOracle, start: ExtremeBase, delta: float):
        self.oracle = oracle
        self.n = oracle.ground_size
        self.bases: list[ExtremeBase] = [start]
        self.x: list[float] = list(start.vector)
        self.phi: list[list[float]] = [[0.0] * self.n for _ in range(self.n)]
        self.delta = float(delta)
        self.reach: list[bool] = [False] * self.n
        self.in_c: list[bool] = [False] * self.n
        self.in_d: list[bool] = [False] * self.n
        self.bnd: list[float] = [0.0] * self.n
        self.debug = False

    # -- flow bookkeeping -------------------------------------------------

    def boundary(self) -> list[float]:
        """Net outflow of every vertex, recomputed from ``phi``."""
        n, phi = self.n, self.phi
        out = [0.0] * n
        for a in range(n):
            row = phi[a]
            for b in range(n):
                if a != b:
                    w = row[b]
                    if w:
                        out[a] += w
                        out[b] -= w
        return out

    def z(self) -> list[float]:
        return [xv + bv for xv, bv in zip(self.x, self.bnd)]

    def x_minus(self) -> float:
        return sum(v for v in self.x if v < 0.0)

    def refresh_sets(self) -> None:
        """Recompute C, D and the reachable set from the current ``z``."""
        z, d = self.z(), self.delta
        self.in_c = [zv <= -d for zv in z]
        self.in_d = [zv >= d for zv in z]
        self.reach = [False] * self.n
        self._grow_reach([v for v in range(self.n) if self.in_c[v]])

    def _grow_reach(self, seeds: list[int]) -> None:
        n, phi, reach = self.n, self.phi, self.reach
        queue = deque()
        for s in seeds:
            if not reach[s]:
                reach[s] = True
                queue.append(s)
        while queue:
            a = queue.popleft()
            row = phi[a]
            for b in range(n):
                if not reach[b] and b != a and row[b] == 0.0:
                    reach[b] = True
                    queue.append(b)

    def reach_meets_d(self) -> bool:
        return any(r and d for r, d in zip(self.reach, self.in_d))

    def reach_mask(self) -> int:
        return mask_of(v for v in range(self.n) if self.reach[v])

    # -- Double-Exchange ----------------------------------------------------

    def find_active_triple(self) -> Optional[tuple[int, int, int]]:
        reach = self.reach
        for i, b in enumerate(self.bases):
            order = b.ordering
            for p in range(1, self.n):
                u, v = order[p], order[p - 1]
                if reach[u] and not reach[v]:
                    return i, u, v
        return None

    def double_exchange(self, i: int, u: int, v: int) -> float:
        """Apply Double-Exchange to the active triple ``(i, u, v)``; return ``alpha``."""
        if not (0 <= i < len(self.bases)):
            raise InactiveTripleError(f"no base with index {i}")
        base = self.bases[i]
        p = base.position[u]
        if p == 0 or base.ordering[p - 1] != v or not self.reach[u] or self.reach[v]:
            raise InactiveTripleError(f"({i}, {u}, {v}) is not an active triple")
        cap = exchange_capacity(self.oracle, base, u, v)
        if cap < 0.0:
            if self.debug and cap < -1e-9 * (1.0 + abs(base.vector[v])):
                raise SubmodularityViolation(
                    f"negative exchange capacity {cap!r} for ({u}, {v}) in {base.ordering}"
                )
            cap = 0.0
        lam = base.coefficient
        full = lam * cap
        flow = self.phi[u][v]
        if full <= flow:
            alpha = full
            self.phi[u][v] = flow - alpha
        else:
            alpha = flow
            self.phi[u][v] = 0.0
            # keep the unexchanged share of y_i under a fresh index
            part = min(alpha / cap, lam)
            rest = base.copy()
            rest.coefficient = lam - part
            base.coefficient = part
            self.bases.append(rest)
        self.x[u] += alpha
        self.x[v] -= alpha
        self.bnd[u] -= alpha
        self.bnd[v] += alpha
        base.vector[u] += cap
        base.vector[v] -= cap
        base.swap_adjacent(u, v)
        if self.phi[u][v] == 0.0:
            self._grow_reach([v])
        return alpha

    # -- augmentation -------------------------------------------------------

    def augmenting_path(self) -> Optional[list[int]]:
        """Shortest zero-flow path from C to D, breadth first by vertex index."""
        n, phi = self.n, self.phi
        parent = [-1] * n
        seen = [False] * n
        queue = deque()
        for s in range(n):
            if self.in_c[s]:
                seen[s] = True
                queue.append(s)
        while queue:
            a = queue.popleft()
            if self.in_d[a]:
                path = [a]
                while parent[path[-1]] >= 0:
                    path.append(parent[path[-1]])
                return path[::-1]
            row = phi[a]
            for b in range(n):
                if not seen[b] and b != a and row[b] == 0.0:
                    seen[b] = True
                    parent[b] = a
                    queue.append(b)
        return None

    def augment(self, path: list[int]) -> None:
        d, phi, bnd = self.delta, self.phi, self.bnd
        for a, b in zip(path, path[1:]):
            # net flow a -> b rises by exactly delta
            back = phi[b][a]
            phi[a][b] = d - back
            phi[b][a] = 0.0
        bnd[path[0]] += d
        bnd[path[-1]] -= d
        self.refresh_sets()

    def reduce(self) -> None:
        if len(self.bases) > 1:
            self.bases = reduce_combination(self.bases, copy=False)

    def halve(self) -> None:
        self.delta /= 2.0
        for row in self.phi:
            for b in range(self.n):
                row[b] /= 2.0
        self.bnd = [b / 2.0 for b in self.bnd]


def _spot_check_submodular(oracle: SubmodularOracle, samples: int, seed: int) -> None:
    n = oracle.ground_size
    rng = random.Random(seed)
    full = oracle.full_mask
    scale = max(1.0, abs(oracle(full)))
    for _ in range(samples):
        s, t = rng.getrandbits(n) & full, rng.getrandbits(n) & full
        lhs = oracle(s) + oracle(t)
        rhs = oracle(s | t) + oracle(s & t)
        if lhs < rhs - 1e-9 * scale:
            raise SubmodularityViolation(
                f"f({s:#x}) + f({t:#x}) = {lhs!r} < {rhs!r} = f(union) + f(intersection)"
            )


def _certificate(oracle, state, epsilon, reason, phases, n_de, n_aug) -> SfmCertificate:
    xm = sum(v for v in state.x if v < 0.0) if state is not None else 0.0
    best_v, best_m = oracle.best_value, oracle.best_mask
    gap = best_v - xm
    return SfmCertificate(
        min_value=best_v,
        minimizing_set=best_m,
        base=np.array(state.x if state is not None else []),
        bases=[b.copy() for b in state.bases] if state is not None else [],
        oracle_calls=oracle.eval_count,
        x_minus=xm,
        duality_gap=gap,
        converged=gap <= epsilon,
        stop_reason=reason,
        phases=phases,
        double_exchanges=n_de,
        augmentations=n_aug,
    )


def minimize(oracle: SubmodularOracle, opts: Optional[SfmOptions] = None) -> SfmCertificate:
    """Minimize a normalized submodular set function.

    Runs scaling phases starting from the extreme base of the natural ordering
    with ``delta = min(|x^-(E)|, x^+(E)) / n**2``. Each phase alternates
    Double-Exchange and ``delta``-augmentation until neither applies, then
    prunes the convex combination; ``delta`` and the flow are halved between
    phases. The run ends when the smallest value seen is within ``epsilon`` of
    ``x^-(E)``, which bounds it from below.

    The returned set is the best evaluated set. It always contains the
    reachable set of the last phase among its candidates.
    """
    opts = opts or SfmOptions()
    n = oracle.ground_size
    f0 = oracle(0)
    if n == 0:
        if f0 != 0.0:
            raise NotNormalizedError(f"f(empty) = {f0!r}")
        return SfmCertificate(0.0, 0, np.zeros(0), [], oracle.eval_count, 0.0, 0.0, True, "empty")

    start = extreme_base(oracle, range(n))
    scale = max(abs(oracle(m)) for m in start.prefix)
    if abs(f0) > 1e-12 * max(1.0, scale):
        raise NotNormalizedError(f"f(empty) = {f0!r}, expected 0")
    if opts.debug:
        _spot_check_submodular(oracle, opts.debug_samples, opts.seed)
    eps = opts.epsilon if opts.epsilon is not None else 1e-9 * (scale if scale > 0 else 1.0)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    tol = opts.decision_tol
    observe = opts.observer

    xneg = sum(v for v in start.vector if v < 0.0)
    xpos = sum(v for v in start.vector if v > 0.0)
    delta = min(-xneg, xpos) / (n * n)
    state = ScalingState(oracle, start, delta)
    state.debug = opts.debug
    if observe:
        observe("init", state, {})

    if delta <= 0.0:
        # x already all >= 0 (minimum is 0 at the empty set) or all <= 0 (E is optimal)
        return _certificate(oracle, state, eps, "degenerate-start", 0, 0, 0)

    m_est = max(scale, -xneg, xpos)
    budget = int(opts.budget_constant * n**5 * max(1.0, math.log2(max(m_est / eps, 2.0)))) + 100
    delta_floor = 1e-15 * m_est / (n * n)
    steps = n_de = n_aug = phases = 0

    def decided() -> Optional[str]:
        if tol is None:
            return None
        if oracle.best_value < -tol:
            return "decided-infeasible"
        if state.x_minus() >= -tol:
            return "decided-feasible"
        return None

    def reduce() -> None:
        state.reduce()
        if observe:
            observe("reduce", state, {})

    reason = decided()
    while reason is None:
        phases += 1
        state.refresh_sets()
        while True:
            while not state.reach_meets_d():
                triple = state.find_active_triple()
                if triple is None:
                    break
                z_before = list(state.z()) if observe else None
                alpha = state.double_exchange(*triple)
                n_de += 1
                steps += 1
                if observe:
                    observe("double_exchange", state, {"triple": triple, "alpha": alpha, "z_before": z_before})
            if not state.reach_meets_d():
                # no augmenting path and no active triple: the phase is over
                reduce()
                break
            path = state.augmenting_path()
            state.augment(path)
            n_aug += 1
            steps += 1
            if observe:
                observe("augment", state, {"path": path})
            reduce()
            if steps > budget:
                raise BudgetExceeded(f"exceeded {budget} steps at delta={state.delta!r}")
            reason = decided()
            if reason is not None:
                break
        if reason is not None:
            break
        oracle(state.reach_mask())
        if observe:
            observe("phase_end", state, {"reach": state.reach_mask()})
        reason = decided()
        if reason is not None:
            break
        # a decision run only stops once the sign relative to -tol is certain
        if tol is None and oracle.best_value - state.x_minus() <= eps:
            reason = "gap-closed"
            break
        if state.delta < delta_floor:
            reason = "precision-floor"
            break
        state.halve()
        if observe:
            observe("halve", state, {})

    return _certificate(oracle, state, eps, reason, phases, n_de, n_aug)
