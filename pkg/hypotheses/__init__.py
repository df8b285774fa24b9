"""
EntroFlux Hypotheses Package

结构假设 H1-H5 与 H2' 的数值检验
"""

from .checks import check_H1, check_H2, check_H2prime, check_H3, constraint_residual
from .derivatives import central_difference, check_derivatives
from .design import SampleDesign, ray_states, require_box_inside, sample_box, sample_directions, vertices
from .growth import check_H4, check_H5, estimate_H5_constant, ray_ratios
from .report import HypothesisReport

__all__ = [
    "SampleDesign",
    "HypothesisReport",
    "require_box_inside",
    "sample_box",
    "sample_directions",
    "ray_states",
    "vertices",
    "central_difference",
    "check_derivatives",
    "check_H1",
    "check_H2",
    "check_H3",
    "check_H2prime",
    "constraint_residual",
    "check_H4",
    "check_H5",
    "estimate_H5_constant",
    "ray_ratios",
]
