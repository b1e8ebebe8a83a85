"""Output-feedback stabilization of uncertain LTI plants under high-frequency
measurement noise: cascade low-pass filtering, delayed-difference derivative
estimation, and high-gain observer baselines."""

from .control import ControllerConfig, control, control_from_history, validate
from .filters import FilterConfig, attenuation_bound, stage_gain_phase
from .observers import DelayDiffConfig, HgoConfig, HistoryBuffer, ModHgoConfig
from .plant import ParameterBox, PlantModel, Polynomial, is_hurwitz
from .signals import Constant, SinusoidSum, Zero
from .sim import ClosedLoopSystem, DivergenceError, SimConfig, run

__version__ = "0.1.0"
