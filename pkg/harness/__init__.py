"""
EntroFlux Harness Package

相对熵时间序列、Gronwall 拟合与唯一性细化探针
"""

from .probe import mismatched_spec, uniqueness_probe
from .series import GronwallFit, GronwallSeries, default_cap, fit_gronwall, relent_trajectory

__all__ = [
    "GronwallSeries",
    "GronwallFit",
    "relent_trajectory",
    "fit_gronwall",
    "default_cap",
    "uniqueness_probe",
    "mismatched_spec",
]
