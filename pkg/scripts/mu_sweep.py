"""Steady-state errors of the proposed scheme as the filter time scale shrinks.

Runs both proposed presets over the same mu grid and writes one CSV per preset.
Large mu can destabilise the loop; those rows are reported, not dropped.

    python3 scripts/mu_sweep.py --out results/mu_sweep --values 0.1,0.05,0.02,0.01
"""
import argparse
from pathlib import Path

from hfnoise import config as cfgmod
from hfnoise.experiments import bound_for, is_non_increasing, rows_to_csv, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/mu_sweep")
    ap.add_argument("--values", default="0.1,0.05,0.02,0.01")
    ap.add_argument("--presets", default="table1_r2,table1_r5")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    values = [float(v) for v in args.values.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for key in args.presets.split(","):
        data = cfgmod.preset(key)
        rows = sweep(data, "filter.mu", values, args.jobs)
        rows_to_csv(rows, out / f"{key}.csv")
        e0 = [r.metrics.errors[0] if r.ok else float("inf") for r in rows]
        print(f"{key}")
        for mu, e, row in zip(values, e0, rows):
            bound = bound_for(cfgmod.set_path(data, "filter.mu", mu))
            print(f"  mu={mu:<6g} e0={e:<12.4g} noise bound={bound:.4g}")
        print(f"  e0 non-increasing as mu shrinks: {is_non_increasing(e0)}")


if __name__ == "__main__":
    main()
