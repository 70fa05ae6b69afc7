"""Plot a 2-user capacity region and the required-rate point (needs matplotlib)."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from macfeas.region import region_records
from macfeas.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario")
    ap.add_argument("--out", default="region.png")
    args = ap.parse_args()

    sc = load_scenario(args.scenario)
    if sc.user_count != 2:
        raise SystemExit("only 2-user scenarios are plotted; use `macfeas region` for 3 users")
    rows = region_records(sc.channel, sc.required_rates())
    v = {r[1]: (r[2], r[3]) for r in rows if r[0] == "vertex"}
    outline = [v[k] for k in ("origin", "1", "1>2", "2>1", "2") if k in v] + [v["origin"]]
    xs, ys = zip(*outline)
    point = [r for r in rows if r[0] == "point"][0]

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.fill(xs, ys, alpha=0.25)
    ax.plot(xs, ys, "k-", lw=1)
    ax.plot(point[2], point[3], "r*", ms=10, label="required rates")
    ax.set_xlabel("$R_1$ [bit/s]")
    ax.set_ylabel("$R_2$ [bit/s]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
