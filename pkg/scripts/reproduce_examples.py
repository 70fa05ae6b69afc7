"""Print required rates, thresholds, allocations and verdicts for the bundled scenarios."""

from pathlib import Path

import numpy as np

from macfeas.capacity import check_feasibility
from macfeas.power import allocate_fixed_sum, allocate_optimal, min_sum_power, verify_power_feasibility
from macfeas.scenario import load_scenario

SCEN = Path(__file__).resolve().parent.parent / "scenarios"


def show(name, keep_sum=None):
    sc = load_scenario(SCEN / name)
    cfg, rates = sc.channel, sc.required_rates()
    w, n0 = cfg.bandwidth, cfg.noise_density
    v = check_feasibility(cfg, rates)
    opt = allocate_optimal(rates, w, n0)
    print(f"--- {name}")
    print("required rates [bit/s]:", np.array2string(rates, precision=1))
    print(f"verdict: {'feasible' if v.feasible else 'infeasible'} (min gap {v.min_gap:.2f}, "
          f"users {[i + 1 for i in v.witness_members]})")
    print(f"threshold: {min_sum_power(rates, w, n0):.6f} W")
    print("optimal powers [W]:", np.array2string(opt.powers, precision=6),
          "feasible" if verify_power_feasibility(opt.powers, rates, w, n0).feasible else "infeasible")
    total = keep_sum if keep_sum is not None else sum(cfg.powers)
    fixed = allocate_fixed_sum(rates, w, n0, total)
    print(f"split of {total:.6g} W:", np.array2string(fixed.powers, precision=6))


if __name__ == "__main__":
    show("two_user.json", keep_sum=0.060)
    show("three_user.json", keep_sum=1.0559)
    show("three_user_reallocated.json")
