"""
EntroFlux Systems Package

双曲系统注册表: 熵结构、解析导数与约束
"""

from .base import (
    ConstraintSpec,
    StateDomain,
    SystemSpec,
    evaluate,
    hessian_form,
    invert_A,
    jacobian,
)
from .euler import PressureLaw, make_euler
from .incompressible import (
    make_inc_euler,
    make_inc_mhd,
    make_nonhom_inc_euler,
    make_nonhom_inc_mhd,
)
from .projection import SmoothFieldSampler, discrete_divergence, helmholtz_project
from .registry import SYSTEMS, default_box, get_system, list_systems
from .swmhd import make_swmhd

__all__ = [
    "ConstraintSpec",
    "StateDomain",
    "SystemSpec",
    "evaluate",
    "jacobian",
    "hessian_form",
    "invert_A",
    "PressureLaw",
    "make_euler",
    "make_swmhd",
    "make_inc_euler",
    "make_inc_mhd",
    "make_nonhom_inc_euler",
    "make_nonhom_inc_mhd",
    "SmoothFieldSampler",
    "discrete_divergence",
    "helmholtz_project",
    "SYSTEMS",
    "default_box",
    "get_system",
    "list_systems",
]
