"""
EntroFlux Solver Package

周期环面上的有限体积近似解序列、参考解与弱形式残差
"""

from .grid import TorusGrid, block_view, coarse_average, coarsening_ratio
from .initial import INITIAL_KINDS, ConservedField, InitialSpec, init_field, smooth_profile
from .reference import ReferenceSolution, max_jump, reference_solution
from .schemes import SCHEMES, entropy_production, stable_dt, step
from .trajectory import Trajectory, run, run_family
from .weak import TestFunction, build_test_bank, cutoff_weights, weak_residual

__all__ = [
    "TorusGrid",
    "coarsening_ratio",
    "block_view",
    "coarse_average",
    "ConservedField",
    "InitialSpec",
    "INITIAL_KINDS",
    "init_field",
    "smooth_profile",
    "SCHEMES",
    "step",
    "stable_dt",
    "entropy_production",
    "Trajectory",
    "run",
    "run_family",
    "ReferenceSolution",
    "reference_solution",
    "max_jump",
    "TestFunction",
    "build_test_bank",
    "cutoff_weights",
    "weak_residual",
]
