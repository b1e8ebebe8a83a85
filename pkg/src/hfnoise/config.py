"""Run configuration: strict JSON schema, validation, bundled presets."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .control import ControllerConfig
from .filters import FilterConfig
from .observers import DelayDiffConfig, HgoConfig, ModHgoConfig
from .plant import ParameterBox, PlantModel, Polynomial, relative_degree
from .signals import Signal, Zero, from_spec, to_spec
from .sim import ClosedLoopSystem, SimConfig, check_step


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


SCHEMA = {
    "plant": ({"denominator", "numerator", "gain", "x0"}, {"denominator", "x0"}),
    "box": ({"denominator", "gain", "numerator"}, {"denominator"}),
    "filter": ({"mu", "sigma"}, {"mu", "sigma"}),
    "observer": ({"kind", "h", "gains", "block_gains"}, {"kind"}),
    "controller": ({"alpha", "d"}, {"alpha", "d"}),
    "sim": ({"dt", "t_end", "record_stride", "steady_window_start", "dt_policy"},
            {"dt", "t_end"}),
    "output": ({"trajectory", "metrics"}, set()),
}
TOP_KEYS = ("plant", "box", "filter", "observer", "controller", "disturbance", "noise",
            "sim", "output")
REQUIRED_TOP = ("plant", "controller", "observer", "sim")


@dataclass(frozen=True)
class RunConfig:
    plant: PlantModel
    x0: tuple[float, ...]
    controller: ControllerConfig
    observer: Any
    sim: SimConfig
    filter: Optional[FilterConfig] = None
    box: Optional[ParameterBox] = None
    disturbance: Signal = Zero()
    noise: Signal = Zero()
    output: dict = field(default_factory=dict, compare=False)

    def system(self) -> ClosedLoopSystem:
        return ClosedLoopSystem(self.plant, self.x0, self.controller, self.observer,
                                self.filter, self.disturbance, self.noise)


def _section(data: dict, key: str) -> dict:
    sec = data[key]
    if not isinstance(sec, dict):
        raise ConfigError(key, "must be a mapping")
    allowed, required = SCHEMA[key]
    for k in sec:
        if k not in allowed:
            raise ConfigError(f"{key}.{k}", "unknown key")
    for k in sorted(required):
        if k not in sec:
            raise ConfigError(f"{key}.{k}", "missing required key")
    return sec


def _floats(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "must be a non-empty list of numbers")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}[{i}]", "must be a number")
        out.append(float(v))
    return tuple(out)


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "must be a number")
    return float(value)


def _intervals(value, path: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(value, list):
        raise ConfigError(path, "must be a list of [lo, hi] pairs")
    out = []
    for i, pair in enumerate(value):
        lo_hi = _floats(pair, f"{path}[{i}]")
        if len(lo_hi) != 2:
            raise ConfigError(f"{path}[{i}]", "interval needs exactly two numbers")
        out.append(lo_hi)
    return tuple(out)


def _build(path: str, fn, *args, **kwargs):
    """Run a constructor, re-labelling invariant failures with a key path."""
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise ConfigError(path, str(msg)) from None


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("", "top level must be a mapping")
    for k in data:
        if k not in TOP_KEYS:
            raise ConfigError(k, "unknown key")
    for k in REQUIRED_TOP:
        if k not in data:
            raise ConfigError(k, "missing required key")

    p = _section(data, "plant")
    den = _floats(p["denominator"], "plant.denominator")
    num = _floats(p.get("numerator", [1.0]), "plant.numerator")
    gain = _number(p.get("gain", 1.0), "plant.gain")
    plant = _build("plant", PlantModel, Polynomial(den), Polynomial(num), gain)
    x0 = _floats(p["x0"], "plant.x0")
    if len(x0) != plant.order:
        raise ConfigError("plant.x0", f"must have length {plant.order}")
    gamma = relative_degree(plant)

    box = None
    if data.get("box") is not None:
        b = _section(data, "box")
        den_iv = _intervals(b["denominator"], "box.denominator")
        if len(den_iv) != plant.order:
            raise ConfigError("box.denominator", f"needs {plant.order} intervals")
        gain_iv = _floats(b.get("gain", [gain, gain]), "box.gain")
        if len(gain_iv) != 2:
            raise ConfigError("box.gain", "interval needs exactly two numbers")
        num_iv = _intervals(b["numerator"], "box.numerator") if "numerator" in b else None
        box = _build("box", ParameterBox, den_iv, gain_iv, num_iv)

    flt = None
    if data.get("filter") is not None:
        fs = _section(data, "filter")
        mu = _number(fs["mu"], "filter.mu")
        if not mu > 0:
            raise ConfigError("filter.mu", "mu must be positive")
        flt = _build("filter", FilterConfig, mu, _floats(fs["sigma"], "filter.sigma"))

    c = _section(data, "controller")
    controller = _build("controller", ControllerConfig, _number(c["alpha"], "controller.alpha"),
                        _floats(c["d"], "controller.d"))
    if controller.gamma != gamma:
        raise ConfigError("controller.d", f"needs {gamma} coefficients (relative degree)")

    o = _section(data, "observer")
    kind = o["kind"]
    if kind == "delay_diff":
        for k in ("gains", "block_gains"):
            if k in o:
                raise ConfigError(f"observer.{k}", "not used by delay_diff")
        if "h" not in o:
            raise ConfigError("observer.h", "missing required key")
        observer = _build("observer.h", DelayDiffConfig, _number(o["h"], "observer.h"), gamma)
    elif kind == "hgo":
        for k in ("h", "block_gains"):
            if k in o:
                raise ConfigError(f"observer.{k}", "not used by hgo")
        observer = (_build("observer.gains", HgoConfig, _floats(o["gains"], "observer.gains"))
                    if "gains" in o else HgoConfig())
        if observer.gamma != gamma:
            raise ConfigError("observer.gains", f"needs {gamma} gains")
    elif kind == "mod_hgo":
        for k in ("h", "gains"):
            if k in o:
                raise ConfigError(f"observer.{k}", "not used by mod_hgo")
        if "block_gains" in o:
            pairs = _intervals(o["block_gains"], "observer.block_gains")
            observer = _build("observer.block_gains", ModHgoConfig, pairs)
        else:
            observer = ModHgoConfig()
        if observer.gamma != gamma:
            raise ConfigError("observer.block_gains", f"needs {gamma - 1} gain pairs")
    else:
        raise ConfigError("observer.kind", "must be one of delay_diff, hgo, mod_hgo")

    disturbance = _build("disturbance", from_spec, data.get("disturbance", 0.0))
    noise = _build("noise", from_spec, data.get("noise", 0.0))

    s = _section(data, "sim")
    stride = s.get("record_stride", 1)
    if isinstance(stride, bool) or not isinstance(stride, int):
        raise ConfigError("sim.record_stride", "must be an integer")
    sim = _build("sim", SimConfig, _number(s["dt"], "sim.dt"), _number(s["t_end"], "sim.t_end"),
                 stride, _number(s.get("steady_window_start", 0.0), "sim.steady_window_start"),
                 s.get("dt_policy", "reject"))

    output = dict(_section(data, "output")) if data.get("output") is not None else {}
    cfg = RunConfig(plant, x0, controller, observer, sim, flt, box, disturbance, noise, output)
    system = _build("", cfg.system)
    _build("sim.dt", check_step, system, sim)
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a JSON run configuration."""
    if not text.strip():
        data = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    data: dict = {
        "plant": {"denominator": list(cfg.plant.den.coeffs),
                  "numerator": list(cfg.plant.num.coeffs),
                  "gain": cfg.plant.gain, "x0": list(cfg.x0)},
        "controller": {"alpha": cfg.controller.alpha, "d": list(cfg.controller.d)},
        "disturbance": to_spec(cfg.disturbance),
        "noise": to_spec(cfg.noise),
        "sim": {"dt": cfg.sim.dt, "t_end": cfg.sim.t_end, "record_stride": cfg.sim.record_stride,
                "steady_window_start": cfg.sim.steady_window_start,
                "dt_policy": cfg.sim.dt_policy},
    }
    obs = cfg.observer
    if isinstance(obs, DelayDiffConfig):
        data["observer"] = {"kind": "delay_diff", "h": obs.h}
    elif isinstance(obs, HgoConfig):
        data["observer"] = {"kind": "hgo", "gains": list(obs.gains)}
    else:
        data["observer"] = {"kind": "mod_hgo", "block_gains": [list(p) for p in obs.block_gains]}
    if cfg.filter is not None:
        data["filter"] = {"mu": cfg.filter.mu, "sigma": list(cfg.filter.sigma)}
    if cfg.box is not None:
        data["box"] = {"denominator": [list(iv) for iv in cfg.box.den],
                       "gain": list(cfg.box.gain)}
        if cfg.box.num is not None:
            data["box"]["numerator"] = [list(iv) for iv in cfg.box.num]
    if cfg.output:
        data["output"] = dict(cfg.output)
    return data


def serialize(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2)


def set_path(data: dict, dotted: str, value) -> dict:
    """Copy of ``data`` with ``dotted`` (e.g. ``filter.mu``) replaced by ``value``."""
    out = copy.deepcopy(data)
    keys = dotted.split(".")
    node = out
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            raise ConfigError(dotted, "no such section")
        node = node[k]
    if keys[-1] not in node:
        raise ConfigError(dotted, "no such parameter")
    node[keys[-1]] = value
    return out


# bundled presets -----------------------------------------------------------

_NOMINAL_PLANT = {"denominator": [0.0, 1.0, 1.0, 0.0, 1.0], "numerator": [1.0], "gain": 1.0,
                  "x0": [1.0, 0.0, 0.0, -1.0]}
_BOX = {"denominator": [[-1.0, 1.0], [-3.0, 3.0], [-2.0, 2.0], [-1.0, 0.1]],
        "gain": [1.0, 1.0]}
_CONTROLLER = {"alpha": 7.0, "d": [0.9, 1.5, 2.0, 0.5]}
_SIM_TABLE1 = {"dt": 1e-4, "t_end": 20.0, "record_stride": 10, "steady_window_start": 8.0,
               "dt_policy": "reject"}
_NOISE_500 = [{"amplitude": 1.0, "frequency_rad_s": 500.0, "phase_rad": 0.0}]


def _table1(observer: dict, sigma: Optional[list]) -> dict:
    cfg = {"plant": _NOMINAL_PLANT, "box": _BOX, "observer": observer,
           "controller": _CONTROLLER, "disturbance": 0.0, "noise": _NOISE_500,
           "sim": _SIM_TABLE1}
    if sigma is not None:
        cfg["filter"] = {"mu": 0.01, "sigma": sigma}
    return copy.deepcopy(cfg)


PRESETS: dict[str, dict] = {
    "table1_hgo": _table1({"kind": "hgo"}, None),
    "table1_mod_hgo": _table1({"kind": "mod_hgo"}, None),
    "table1_r2": _table1({"kind": "delay_diff", "h": 0.05}, [1.0, 1.0]),
    "table1_r5": _table1({"kind": "delay_diff", "h": 0.05}, [1.0] * 5),
    "fig1": {
        "plant": {"denominator": [1.0, 3.0, 2.0, 0.1, 1.0], "numerator": [1.0], "gain": 1.0,
                  "x0": [1.0, 0.0, 0.0, -1.0]},
        "box": copy.deepcopy(_BOX),
        "filter": {"mu": 0.01, "sigma": [1.0] * 5},
        "observer": {"kind": "delay_diff", "h": 0.05},
        "controller": copy.deepcopy(_CONTROLLER),
        "disturbance": [{"amplitude": 1.0, "frequency_rad_s": 1.0, "phase_rad": 0.0}],
        "noise": [{"amplitude": 1.0, "frequency_rad_s": 500.0, "phase_rad": 0.0},
                  {"amplitude": 1.0, "frequency_rad_s": 1000.0, "phase_rad": 0.0},
                  {"amplitude": 1.0, "frequency_rad_s": 10000.0, "phase_rad": 0.0}],
        "sim": {"dt": 1e-5, "t_end": 20.0, "record_stride": 10, "steady_window_start": 10.0,
                "dt_policy": "reject"},
    },
}

TABLE1_ROWS = (("hgo", "table1_hgo"), ("mod_hgo", "table1_mod_hgo"),
               ("proposed_r2", "table1_r2"), ("proposed_r5", "table1_r5"))


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    return copy.deepcopy(PRESETS[name])


def load(ref: str) -> tuple[RunConfig, dict]:
    """Resolve a preset name or a JSON file path; returns the parsed config
    and its raw dict form."""
    if ref in PRESETS:
        data = preset(ref)
        return config_from_dict(data), data
    with open(ref) as fh:
        text = fh.read()
    cfg = parse_config(text)
    return cfg, json.loads(text) if text.strip() else {}
