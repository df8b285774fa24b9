"""
EntroFlux Orlicz Package

N 函数、Fenchel 共轭与 "本质更强" 检验
"""

from .conjugate import biconjugate, fenchel_conjugate, fenchel_young_check
from .nfunctions import M1, M2, NFUNCTIONS, NFunction, power_nfunction, validate_nfunction
from .stronger import essentially_stronger_check

__all__ = [
    "NFunction",
    "M1",
    "M2",
    "NFUNCTIONS",
    "power_nfunction",
    "validate_nfunction",
    "fenchel_conjugate",
    "biconjugate",
    "fenchel_young_check",
    "essentially_stronger_check",
]
