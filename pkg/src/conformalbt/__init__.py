"""Balanced truncation with Gramians defined through conformal maps."""

from .analysis import ErrorReport, evaluate_reduction, h2_error_bound, h2abar_error_norm, h2abar_norm
from .balancing import ReductionResult, balance_full, classical_bt, conformal_bt
from .benchmarks import BenchmarkSpec, benchmark_map, make_benchmark
from .errors import ConformalBTError
from .gramians import GramianPair, compute_gramians
from .maps import JoukowskiMap, MobiusMap
from .quadrature import QuadratureConfig
from .sim import Impulse, Samples, Step, Trajectory, output_relative_error, simulate
from .system import LtiSystem, transfer_eval

__version__ = "0.1.0"

__all__ = [
    "BenchmarkSpec",
    "ConformalBTError",
    "ErrorReport",
    "GramianPair",
    "Impulse",
    "JoukowskiMap",
    "LtiSystem",
    "MobiusMap",
    "QuadratureConfig",
    "ReductionResult",
    "Samples",
    "Step",
    "Trajectory",
    "balance_full",
    "benchmark_map",
    "classical_bt",
    "compute_gramians",
    "conformal_bt",
    "evaluate_reduction",
    "h2_error_bound",
    "h2abar_error_norm",
    "h2abar_norm",
    "make_benchmark",
    "output_relative_error",
    "simulate",
    "transfer_eval",
]
