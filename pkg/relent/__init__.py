"""
EntroFlux Relative Entropy Package

相对熵与相对通量, 及其测度平均
"""

from .averaged import AtomicMeasure, averaged_H, averaged_H_field, averaged_Z, averaged_Z_field
from .pointwise import (
    RelativeQuantities,
    conserved_relative_entropy,
    local_quadratic_probe,
    relative_entropy,
    relative_flux,
    relative_flux_with,
    relative_quantities,
    transfer_matrices,
)

__all__ = [
    "RelativeQuantities",
    "relative_entropy",
    "relative_flux",
    "relative_flux_with",
    "relative_quantities",
    "transfer_matrices",
    "conserved_relative_entropy",
    "local_quadratic_probe",
    "AtomicMeasure",
    "averaged_H",
    "averaged_Z",
    "averaged_H_field",
    "averaged_Z_field",
]
