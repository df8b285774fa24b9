"""
EntroFlux Measures Package

离散 Young 测度、集中测度、Radon-Nikodym 密度与修正回归函数
"""

from .concentration import (
    ConcentrationField,
    check_domination,
    concentration_mass,
    concentration_relations,
    extrapolate_in_k,
    family_concentration,
    family_relations,
    quantity_series,
    time_slices,
)
from .radon_nikodym import DensityField, hat_kernel, mollify, radon_nikodym
from .recession import RecessionProbe, recession, recession_sweep
from .young import DiscreteYoungMeasure, empirical_young_measure

__all__ = [
    "DiscreteYoungMeasure",
    "empirical_young_measure",
    "ConcentrationField",
    "concentration_mass",
    "family_concentration",
    "quantity_series",
    "extrapolate_in_k",
    "time_slices",
    "check_domination",
    "concentration_relations",
    "family_relations",
    "DensityField",
    "hat_kernel",
    "mollify",
    "radon_nikodym",
    "RecessionProbe",
    "recession",
    "recession_sweep",
]
