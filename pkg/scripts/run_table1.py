"""Four-way observer comparison on the nominal plant.

Writes table1.csv (measured errors next to the published ones) and prints it.

    python3 scripts/run_table1.py --out results/table1 [--jobs 4] [--window 30 --t-end 40]
"""
import argparse
from pathlib import Path

from hfnoise.experiments import PUBLISHED_TABLE1, reproduce_table1, rows_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/table1")
    ap.add_argument("--dt", type=float, default=1e-4)
    ap.add_argument("--t-end", type=float, default=20.0)
    ap.add_argument("--window", type=float, default=8.0, help="start of the steady-state window")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = reproduce_table1(args.dt, args.t_end, args.window, args.jobs)
    rows_to_csv(rows, out / "table1.csv", published=PUBLISHED_TABLE1)
    print((out / "table1.csv").read_text(), end="")


if __name__ == "__main__":
    main()
