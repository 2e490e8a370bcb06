"""Simulation and numerical verification of multi-order fractional cooperative systems."""

from .attractivity import EnvelopeParams, build_envelope, capital_I, search_eta
from .field import VectorField, analyze, check_cooperative, weighted_norm
from .fieldfile import load_field, parse_field
from .kolmogorov import assemble, find_equilibrium, rate_check
from .report import Verdict
from .solver import MultiOrder, SolveConfig, Trajectory, integrate
from .special_fn import SampledFunction, caputo_numeric, ml, rl_integral

__version__ = "0.1.0"

__all__ = [
    "EnvelopeParams",
    "MultiOrder",
    "SampledFunction",
    "SolveConfig",
    "Trajectory",
    "VectorField",
    "Verdict",
    "analyze",
    "assemble",
    "build_envelope",
    "capital_I",
    "caputo_numeric",
    "check_cooperative",
    "find_equilibrium",
    "integrate",
    "load_field",
    "ml",
    "parse_field",
    "rate_check",
    "rl_integral",
    "search_eta",
    "weighted_norm",
]
