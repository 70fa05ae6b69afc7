"""``macfeas`` command line: check, allocate, bench, region.

Exit status: 0 feasible / success, 2 infeasible (check) or below threshold
(allocate), 1 usage or input error. Users are numbered from 1 in all output.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .bench import run_bench
from .capacity import CapacityError, check_feasibility
from .power import BelowThresholdError, allocate_fixed_sum, allocate_optimal, verify_power_feasibility
from .region import RegionError, format_region
from .report import ReportDocument
from .scenario import Scenario, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2


def _users(mask: int, n: int) -> list[int]:
    return [i + 1 for i in range(n) if (mask >> i) & 1]


def cmd_check(scenario: Scenario, method: str = "auto") -> tuple[ReportDocument, int]:
    t0 = time.perf_counter()
    rates = scenario.required_rates()
    verdict = check_feasibility(scenario.channel, rates, method=method)
    n = scenario.user_count
    result = {
        "feasible": verdict.feasible,
        "method": verdict.method.value,
        "min_gap_bps": verdict.min_gap,
        "min_gap_exact": verdict.exact,
        "witness_users": _users(verdict.witness, n),
        "tolerance_bps": verdict.tolerance,
        "required_rates_bps": rates,
        "oracle_calls": verdict.oracle_calls,
    }
    doc = ReportDocument("check", scenario.to_dict(), result,
                         {"wall_time_s": time.perf_counter() - t0, "requested_method": method})
    return doc, EXIT_OK if verdict.feasible else EXIT_NEGATIVE


def cmd_allocate(scenario: Scenario, mode: str) -> tuple[ReportDocument, int]:
    t0 = time.perf_counter()
    cfg = scenario.channel
    rates = scenario.required_rates()
    current = float(sum(cfg.powers))
    result = {"mode": mode, "current_sum_power_w": current, "required_rates_bps": rates}
    status = EXIT_OK
    try:
        if mode == "optimal":
            alloc = allocate_optimal(rates, cfg.bandwidth, cfg.noise_density)
        elif mode == "keep-sum":
            alloc = allocate_fixed_sum(rates, cfg.bandwidth, cfg.noise_density, current)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except BelowThresholdError as exc:
        result.update({
            "threshold_w": exc.threshold,
            "deficit_w": exc.deficit,
            "powers_w": None,
            "verified_feasible": None,
        })
        status = EXIT_NEGATIVE
    else:
        stamp = verify_power_feasibility(alloc.powers, rates, cfg.bandwidth, cfg.noise_density)
        result.update({
            "threshold_w": alloc.threshold,
            "powers_w": alloc.powers,
            "sum_power_w": alloc.sum_power,
            "allocation": alloc.mode.value,
            "verified_feasible": stamp.feasible,
            "verified_min_gap_bps": stamp.min_gap,
        })
    doc = ReportDocument("allocate", scenario.to_dict(), result,
                         {"wall_time_s": time.perf_counter() - t0})
    return doc, status


def cmd_bench(n_values: list[int], trials: int, seed: int, repeats: int = 3) -> tuple[ReportDocument, int]:
    t0 = time.perf_counter()
    rows = run_bench(n_values, trials, seed, repeats=repeats)
    table = [asdict(r) for r in rows]
    doc = ReportDocument("bench", {"n": n_values, "trials": trials, "seed": seed, "repeats": repeats},
                         {"rows": table}, {"wall_time_s": time.perf_counter() - t0})
    return doc, EXIT_OK


def cmd_region(scenario: Scenario, out: str | None = None) -> tuple[ReportDocument, str, int]:
    rates = scenario.required_rates()
    text = format_region(scenario.channel, rates)
    if out:
        Path(out).write_text(text)
    doc = ReportDocument("region", scenario.to_dict(),
                         {"records": text.count("\n") - 1, "out": out or "-",
                          "required_rates_bps": rates}, {})
    return doc, text, EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("user counts must be >= 1")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="macfeas", description="Delay feasibility of Gaussian multiple-access systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide whether the delay bounds can be met")
    c.add_argument("scenario")
    c.add_argument("--method", choices=["auto", "brute", "equal-power", "sfm"], default="auto")
    c.add_argument("--json", action="store_true")

    a = sub.add_parser("allocate", help="minimum sum power and power reallocation")
    a.add_argument("scenario")
    a.add_argument("--mode", choices=["optimal", "keep-sum"], required=True)
    a.add_argument("--json", action="store_true")

    b = sub.add_parser("bench", help="traversal vs. SFM timing")
    b.add_argument("--n", type=_int_list, default=[5, 10, 15, 20])
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--json", action="store_true")

    r = sub.add_parser("region", help="capacity-region plot data for 2 or 3 users")
    r.add_argument("scenario")
    r.add_argument("--out", help="output path (default: stdout)")
    return p


def _emit(doc: ReportDocument, as_json: bool) -> None:
    print(doc.to_json() if as_json else doc.to_text())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            doc, code = cmd_check(load_scenario(args.scenario), args.method)
            _emit(doc, args.json)
        elif args.command == "allocate":
            doc, code = cmd_allocate(load_scenario(args.scenario), args.mode)
            _emit(doc, args.json)
        elif args.command == "bench":
            if args.trials < 1:
                raise ValueError("--trials must be >= 1")
            doc, code = cmd_bench(args.n, args.trials, args.seed, args.repeats)
            _emit(doc, args.json)
        else:
            doc, text, code = cmd_region(load_scenario(args.scenario), args.out)
            if args.out:
                print(doc.to_text())
            else:
                sys.stdout.write(text)
    except (ScenarioError, CapacityError, RegionError, ValueError) as exc:
        print(f"macfeas: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
