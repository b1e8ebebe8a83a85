"""Reproduction experiments and parameter sweeps."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import config as cfgmod
from .filters import attenuation_bound
from .sim import DivergenceError, Metrics, RunResult, Trajectory, run

# published steady-state sup errors e^(0..3)
PUBLISHED_TABLE1 = {
    "hgo": (0.22, 8.41, 132.3, 698.0),
    "mod_hgo": (0.26, 4.9, 31.1, 266.1),
    "proposed_r2": (0.04, 0.2, 2.0, 57.0),
    "proposed_r5": (3e-3, 7.5e-4, 2e-3, 5e-3),
}
PUBLISHED_FIG1 = {"max_abs_state": 0.014, "max_estimate_error": 2e-3}


@dataclass
class Row:
    name: str
    metrics: Optional[Metrics] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_row(args) -> Row:
    name, data = args
    try:
        cfg = cfgmod.config_from_dict(data)
        result = run(cfg.system(), cfg.sim)
    except DivergenceError as exc:
        return Row(name, error=str(exc))
    return Row(name, result.metrics)


def _map(fn, items, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def table1_configs(dt: float = 1e-4, t_end: float = 20.0, window_start: float = 8.0,
                   record_stride: int = 10) -> list[tuple[str, dict]]:
    out = []
    for name, key in cfgmod.TABLE1_ROWS:
        data = cfgmod.preset(key)
        data["sim"].update(dt=dt, t_end=t_end, steady_window_start=window_start,
                           record_stride=record_stride)
        out.append((name, data))
    return out


def reproduce_table1(dt: float = 1e-4, t_end: float = 20.0, window_start: float = 8.0,
                     jobs: int = 1) -> list[Row]:
    """The four comparison runs (HGO, modified HGO, proposed r=2 and r=5)
    with identical plant, noise, initial state and control law."""
    return _map(_run_row, table1_configs(dt, t_end, window_start), jobs)


def bound_for(data: dict) -> float:
    cfg = cfgmod.config_from_dict(data)
    if cfg.filter is None:
        raise ValueError("configuration has no filter")
    return attenuation_bound(cfg.filter, cfg.noise)


@dataclass
class Fig1Result:
    trajectory: Trajectory
    metrics: Metrics
    max_abs_state: float
    max_estimate_error: float


def reproduce_fig1(dt: float = 1e-5, t_end: float = 20.0, window_start: float = 10.0,
                   record_stride: int = 10, noise: bool = True,
                   disturbance: bool = True) -> Fig1Result:
    """Second experiment (perturbed plant, f = sin t, three-tone noise, r = 5)."""
    data = cfgmod.preset("fig1")
    data["sim"].update(dt=dt, t_end=t_end, steady_window_start=window_start,
                       record_stride=record_stride)
    if not noise:
        data["noise"] = 0.0
    if not disturbance:
        data["disturbance"] = 0.0
    cfg = cfgmod.config_from_dict(data)
    result: RunResult = run(cfg.system(), cfg.sim)
    m = result.metrics
    return Fig1Result(result.trajectory, m, max(m.peaks), max(m.errors))


def sweep(data: dict, param: str, values: Sequence, jobs: int = 1) -> list[Row]:
    """Repeat a run across values of one scalar parameter."""
    items = [(f"{param}={v}", cfgmod.set_path(data, param, v)) for v in values]
    for _, d in items:
        cfgmod.config_from_dict(d)  # fail fast on invalid values
    return _map(_run_row, items, jobs)


def rows_to_csv(rows: Sequence[Row], path, published: Optional[dict] = None) -> None:
    """One row per run: ``algorithm,e0..e3`` (+ published columns when given)."""
    n = max((len(r.metrics.errors) for r in rows if r.ok), default=0)
    header = ["algorithm"] + [f"e{i}" for i in range(n)]
    if published:
        header += [f"published_e{i}" for i in range(n)]
    header.append("status")
    lines = [",".join(header)]
    for r in rows:
        vals = [format(v, ".17g") for v in r.metrics.errors] if r.ok else [""] * n
        if published:
            vals += [format(v, ".17g") for v in published.get(r.name, ())] or [""] * n
        lines.append(",".join([r.name] + vals + ["ok" if r.ok else f"diverged ({r.error})"]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def is_non_increasing(values: Sequence[float]) -> bool:
    arr = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(arr) <= 0))
