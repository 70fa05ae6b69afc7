"""Acceptance criteria; each test prints one PASS/FAIL line in the summary."""

import math
import time

import numpy as np
import pytest

import conftest
from conftest import LAM2, LAM3, N0, P2_ORIG, P3_ORIG, P3_REALLOC, SYNTHETIC, TAU2, TAU3, W, enumerate_min
from macfeas import cli, sfm
from macfeas.capacity import (
    ChannelConfig,
    check_feasibility,
    check_feasibility_bruteforce,
    check_feasibility_equal_power,
    gap_oracle,
)
from macfeas.power import allocate_fixed_sum, allocate_optimal, min_sum_power, verify_power_feasibility
from macfeas.queueing import UserDemand, required_rate_vector

R2 = required_rate_vector([UserDemand(l, t) for l, t in zip(LAM2, TAU2)])
R3 = required_rate_vector([UserDemand(l, t) for l, t in zip(LAM3, TAU3)])


def record(number, title, ok, detail=""):
    conftest.ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}" + (f": {detail}" if detail else ""))
    assert ok, detail


def rel_errs(got, want):
    got, want = np.asarray(got, float), np.asarray(want, float)
    return np.abs(got - want) / np.abs(want)


def test_1_required_rates():
    err = rel_errs(R3, [0.4394e5, 0.3377e5, 1.4647e5]).max()
    record(1, "required rates (3-user)", err <= 1e-3, f"max rel err {err:.2e} (tol 1e-3)")


def test_2_min_sum_power():
    p = min_sum_power(R2, W, N0)
    err = abs(p - 0.0503) / 0.0503
    record(2, "minimum sum power (2-user)", err <= 5e-3, f"{p * 1e3:.4f} mW, rel err {err:.2e} (tol 5e-3)")


def test_3_allocations():
    cases = [
        (allocate_optimal(R2, W, N0).powers, [0.0372, 0.0131]),
        (allocate_fixed_sum(R2, W, N0, 0.060).powers, [0.0444, 0.0156]),
        (allocate_fixed_sum(R3, W, N0, 1.0559).powers, [0.1828, 0.1380, 0.7351]),
        (allocate_optimal(R3, W, N0).powers, [0.0122, 0.0092, 0.0491]),
    ]
    err = max(rel_errs(g, w).max() for g, w in cases)
    record(3, "power allocations", err <= 5e-3, f"max rel err {err:.2e} (tol 5e-3)")


def test_4_verdicts():
    cfg2 = lambda p: ChannelConfig(W, N0, tuple(p))
    checks = {
        "2-user original infeasible": not check_feasibility(cfg2(P2_ORIG), R2).feasible,
        "3-user original infeasible": not check_feasibility(cfg2(P3_ORIG), R3).feasible,
        "2-user reallocated feasible": check_feasibility(cfg2(allocate_fixed_sum(R2, W, N0, 0.060).powers), R2).feasible,
        "3-user reallocated feasible": check_feasibility(cfg2(P3_REALLOC), R3).feasible,
        "2-user optimal feasible": verify_power_feasibility(allocate_optimal(R2, W, N0).powers, R2, W, N0).feasible,
        "3-user optimal feasible": verify_power_feasibility(allocate_optimal(R3, W, N0).powers, R3, W, N0).feasible,
    }
    bad = [k for k, ok in checks.items() if not ok]
    record(4, "verdict reproduction", not bad, "all 6 verdicts match" if not bad else f"wrong: {bad}")


def test_5_sfm_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    failures = []
    eps_gap = 1e-6 * W
    for k in range(500):
        n = int(rng.integers(2, 13))
        cfg, rates = conftest.random_mac(n, rng, spread=(0.6, 1.4))
        oracle = gap_oracle(cfg, rates)
        best, _ = enumerate_min(oracle.func, n)
        cert = sfm.minimize(oracle, sfm.SfmOptions(epsilon=eps_gap))
        if abs(cert.min_value - best) > eps_gap or abs(oracle.func(cert.minimizing_set) - best) > eps_gap:
            failures.append(("mac", k, n))
    for k in range(100):
        n = int(rng.integers(1, 11))
        f = SYNTHETIC[k % 3](n, rng)
        best, _ = enumerate_min(f, n)
        eps = 1e-8
        cert = sfm.minimize(sfm.SubmodularOracle(f, n), sfm.SfmOptions(epsilon=eps))
        if abs(cert.min_value - best) > eps or abs(f(cert.minimizing_set) - best) > eps:
            failures.append(("synthetic", k, n))
    dt = time.perf_counter() - t0
    record(5, "SFM matches enumeration", not failures and dt < 120,
           f"500 MAC + 100 synthetic, {len(failures)} failures, {dt:.1f} s (target < 120 s)")


def test_6_equal_power_fast_path():
    rng = np.random.default_rng(77)
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(1, 13))
        p = 10 ** rng.uniform(-3, 0)
        cfg = ChannelConfig(W, N0, (p,) * n)
        total = cfg.bandwidth * math.log2(1 + n * p / (N0 * W))
        d = rng.uniform(0.05, 1.0, n)
        rates = d / d.sum() * total * rng.uniform(0.8, 1.2)
        a = check_feasibility_equal_power(cfg, rates)
        b = check_feasibility_bruteforce(cfg, rates)
        mismatches += a.feasible != b.feasible
    record(6, "equal-power fast path", mismatches == 0, f"200 instances, {mismatches} mismatches")


class InvariantChecker:
    def __init__(self, func, true_min):
        # raw function, so checks do not feed the solver's memo or best-set tracking
        self.func = func
        self.true_min = true_min
        self.scale = None
        self.violations = []
        self.events = 0

    def __call__(self, event, state, info):
        self.events += 1
        n = state.n
        full = (1 << n) - 1
        if self.scale is None:
            self.scale = max(1.0, max(abs(self.func(m)) for m in range(1 << n)))
        s = self.scale
        x = np.array(state.x)
        if abs(x.sum() - self.func(full)) > 1e-9 * s:
            self.violations.append((event, "x(E) != f(E)"))
        if x[x < 0].sum() > self.true_min + 1e-9 * s:
            self.violations.append((event, "x-(E) > min f"))
        phi = np.array(state.phi)
        if phi.min() < -1e-12 * s or phi.max() > state.delta * (1 + 1e-12) + 1e-15 * s:
            self.violations.append((event, "phi outside [0, delta]"))
        if event == "double_exchange" and np.abs(np.array(state.z()) - info["z_before"]).max() > 1e-9 * s:
            self.violations.append((event, "z changed"))
        lam = sum(b.coefficient for b in state.bases)
        recon = sum(b.coefficient * np.array(b.vector) for b in state.bases)
        if abs(lam - 1.0) > 1e-12 * len(state.bases):
            self.violations.append((event, "sum lambda != 1"))
        if event == "reduce" and np.abs(recon - x).max() > 1e-10 * s:
            self.violations.append((event, "reconstruction"))


def test_7_sfm_invariants():
    rng = np.random.default_rng(5)
    bad, events = [], 0
    for k in range(60):
        n = int(rng.integers(2, 9))
        if k % 2:
            cfg, rates = conftest.random_mac(n, rng)
            oracle = gap_oracle(cfg, rates)
        else:
            oracle = sfm.SubmodularOracle(SYNTHETIC[k % 3](n, rng), n)
        best, _ = enumerate_min(oracle.func, n)
        chk = InvariantChecker(oracle.func, best)
        sfm.minimize(oracle, sfm.SfmOptions(observer=chk, debug=True))
        events += chk.events
        bad += chk.violations
    record(7, "SFM invariants on instrumented runs", not bad,
           f"60 runs, {events} checkpoints, {len(bad)} violations" + (f" first {bad[0]}" if bad else ""))


def test_8_sum_power_inequalities():
    rng = np.random.default_rng(8)
    violations = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 13))
        rates = rng.uniform(0, 2.0, n) * W * rng.choice([1e-3, 1e-1, 1.0])
        mask = rng.uniform(size=n) < 0.5
        if not mask.any():
            mask[rng.integers(n)] = True
        a = np.expm1(rates / W * math.log(2))
        r_s = rates[mask].sum()
        t_s = 2.0 ** (r_s / W)
        if r_s > 0 and rates.sum() > 0:
            lhs = a[mask].sum() / math.expm1(r_s / W * math.log(2))
            rhs = a.sum() / math.expm1(rates.sum() / W * math.log(2))
            violations += lhs < rhs * (1 - 1e-12)
        kernel = a[mask].sum() * t_s - t_s + 1
        violations += kernel < -1e-12 * t_s
    record(8, "sum-power set-function and kernel inequalities", violations == 0, f"10000 samples, {violations} violations")


@pytest.mark.slow
def test_9_bench_trend():
    t0 = time.perf_counter()
    doc, _ = cli.cmd_bench([5, 10, 15, 20], trials=5, seed=0, repeats=3)
    rows = doc.result["rows"]
    b = [r["brute_median_s"] for r in rows]
    s = [r["sfm_median_s"] for r in rows]
    b_growth = [b[i + 1] / b[i] for i in range(3)]
    s_growth = [s[i + 1] / s[i] for i in range(3)]
    dt = time.perf_counter() - t0
    ok = min(b_growth) >= 8 and max(s_growth) <= 3 and dt < 300
    fmt = lambda xs: ", ".join(f"{x:.1f}x" for x in xs)
    record(9, "benchmark trend", ok,
           f"brute growth [{fmt(b_growth)}] (need >= 8x), SFM growth [{fmt(s_growth)}] (need <= 3x), {dt:.0f} s")
