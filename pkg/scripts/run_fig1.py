"""Perturbed plant with a sinusoidal disturbance and three-tone noise (r = 5).

Saves the trajectory and prints the steady-state peaks. ``--no-noise`` repeats
the run with w = 0, which separates the disturbance response from the noise.

    python3 scripts/run_fig1.py --out results/fig1
"""
import argparse
from pathlib import Path

from hfnoise.experiments import PUBLISHED_FIG1, reproduce_fig1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/fig1")
    ap.add_argument("--dt", type=float, default=1e-5)
    ap.add_argument("--t-end", type=float, default=20.0)
    ap.add_argument("--stride", type=int, default=10)
    ap.add_argument("--no-noise", action="store_true")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res = reproduce_fig1(args.dt, args.t_end, record_stride=args.stride, noise=not args.no_noise)
    res.trajectory.to_csv(out / "trajectory.csv")
    print("quantity,measured,published")
    print(f"max_abs_state,{res.max_abs_state:.6g},{PUBLISHED_FIG1['max_abs_state']}")
    print(f"max_estimate_error,{res.max_estimate_error:.6g},{PUBLISHED_FIG1['max_estimate_error']}")
    for i, (peak, err) in enumerate(zip(res.metrics.peaks, res.metrics.errors)):
        print(f"z{i}: peak {peak:.4g}  estimate error {err:.4g}")


if __name__ == "__main__":
    main()
