"""Command-line front end.

    hfnoise simulate --config F --out DIR
    hfnoise table1 --out DIR
    hfnoise fig1 --out DIR
    hfnoise bound --config F
    hfnoise verify --config F --grid N
    hfnoise sweep --config F --param P --values V1,V2,...

``--config`` takes a JSON file or the name of a bundled preset
(table1_hgo, table1_mod_hgo, table1_r2, table1_r5, fig1).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import config as cfgmod
from . import experiments as ex
from .control import validate
from .filters import attenuation_bound, cascade_gain, stage_gain_phase
from .plant import verify_over_box
from .signals import SinusoidSum
from .sim import DivergenceError, run

log = logging.getLogger("hfnoise")


class Manifest:
    """Records which outputs were written; saved next to them."""

    def __init__(self, out: Path, command: str):
        self.out = out
        self.data = {"command": command, "outputs": [], "status": "running"}
        out.mkdir(parents=True, exist_ok=True)

    def wrote(self, path: Path):
        self.data["outputs"].append(path.name)

    def finish(self, status: str, **extra):
        self.data["status"] = status
        self.data.update(extra)
        (self.out / "manifest.json").write_text(json.dumps(self.data, indent=2) + "\n")


def _metrics_csv(rows, path: Path):
    ex.rows_to_csv(rows, path)


def cmd_simulate(args) -> int:
    cfg, _ = cfgmod.load(args.config)
    out = Path(args.out)
    man = Manifest(out, "simulate")
    try:
        result = run(cfg.system(), cfg.sim)
    except DivergenceError as exc:
        if exc.trajectory is not None:
            path = out / "trajectory.csv"
            exc.trajectory.to_csv(path)
            man.wrote(path)
        man.finish("diverged", partial=True, error=str(exc))
        log.error("%s", exc)
        return 1
    traj_path = out / cfg.output.get("trajectory", "trajectory.csv")
    result.trajectory.to_csv(traj_path)
    man.wrote(traj_path)
    met_path = out / cfg.output.get("metrics", "metrics.csv")
    _metrics_csv([ex.Row("run", result.metrics)], met_path)
    man.wrote(met_path)
    man.finish("ok")
    return 0


def cmd_table1(args) -> int:
    out = Path(args.out)
    man = Manifest(out, "table1")
    rows = ex.reproduce_table1(dt=args.dt, t_end=args.t_end, window_start=args.window,
                               jobs=args.jobs)
    path = out / "table1.csv"
    ex.rows_to_csv(rows, path, published=ex.PUBLISHED_TABLE1)
    man.wrote(path)
    failed = [r.name for r in rows if not r.ok]
    man.finish("diverged" if failed else "ok", partial=bool(failed), diverged=failed)
    print(path.read_text(), end="")
    return 1 if failed else 0


def cmd_fig1(args) -> int:
    out = Path(args.out)
    man = Manifest(out, "fig1")
    try:
        res = ex.reproduce_fig1(dt=args.dt, t_end=args.t_end, record_stride=args.stride)
    except DivergenceError as exc:
        man.finish("diverged", partial=True, error=str(exc))
        log.error("%s", exc)
        return 1
    path = out / "fig1_trajectory.csv"
    res.trajectory.to_csv(path)
    man.wrote(path)
    summary = out / "fig1_summary.csv"
    summary.write_text(
        "quantity,value,published\n"
        f"max_abs_state,{res.max_abs_state:.17g},{ex.PUBLISHED_FIG1['max_abs_state']}\n"
        f"max_estimate_error,{res.max_estimate_error:.17g},"
        f"{ex.PUBLISHED_FIG1['max_estimate_error']}\n")
    man.wrote(summary)
    man.finish("ok")
    print(summary.read_text(), end="")
    return 0


def cmd_bound(args) -> int:
    cfg, _ = cfgmod.load(args.config)
    if cfg.filter is None:
        raise cfgmod.ConfigError("filter", "bound needs a filter section")
    noise = cfg.noise if isinstance(cfg.noise, SinusoidSum) else SinusoidSum()
    print(f"attenuation_bound,{attenuation_bound(cfg.filter, noise):.17g}")
    print("frequency_rad_s,stage,gain,phase_rad,cumulative_gain")
    for term in noise.terms:
        for j in range(1, cfg.filter.r + 1):
            g, ph = stage_gain_phase(cfg.filter, j, term.frequency)
            print(f"{term.frequency:.17g},{j},{g:.17g},{ph:.17g},"
                  f"{cascade_gain(cfg.filter, term.frequency, j):.17g}")
    return 0


def cmd_verify(args) -> int:
    cfg, _ = cfgmod.load(args.config)
    nominal = validate(cfg.controller, cfg.plant)
    for line in nominal.lines():
        print(f"nominal {line}")
    if cfg.box is None:
        raise cfgmod.ConfigError("box", "verify needs a box section")
    rep = verify_over_box(cfg.box, cfg.plant.num, cfg.controller.alpha, cfg.controller.poly,
                          args.grid)
    print(f"grid_points,{rep.total}")
    print(f"pass,{rep.passed}")
    print(f"fail,{rep.failed}")
    if rep.first_failure is not None:
        print("first_failure," + ";".join(f"{k}={v:.17g}" for k, v in rep.first_failure.items()))
    return 0


def cmd_sweep(args) -> int:
    _, data = cfgmod.load(args.config)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    rows = ex.sweep(data, args.param, values, jobs=args.jobs)
    print(f"{args.param},e0,e1,e2,e3,status")
    for v, r in zip(values, rows):
        errs = ",".join(format(e, ".17g") for e in r.metrics.errors) if r.ok else ""
        print(f"{v:.17g},{errs},{'ok' if r.ok else 'diverged'}")
    if args.out:
        out = Path(args.out)
        man = Manifest(out, "sweep")
        path = out / "sweep.csv"
        ex.rows_to_csv(rows, path)
        man.wrote(path)
        man.finish("ok" if all(r.ok for r in rows) else "diverged")
    return 0 if all(r.ok for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hfnoise", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one closed-loop run")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table1", help="four-way observer comparison")
    p.add_argument("--out", required=True)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--window", type=float, default=8.0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("fig1", help="perturbed plant with disturbance and three-tone noise")
    p.add_argument("--out", required=True)
    p.add_argument("--dt", type=float, default=1e-5)
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--stride", type=int, default=10)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("bound", help="noise attenuation bound and per-stage gains")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="Hurwitz check of the closed loop over the parameter box")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", type=int, default=5)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="repeat a run over values of one parameter")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (cfgmod.ConfigError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
