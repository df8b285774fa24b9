"""
EntroFlux Utils Package

通用工具与异常层级
"""

from .errors import (
    BlowupError,
    CapError,
    ConfigError,
    DomainError,
    EntroFluxError,
    FitError,
    GridError,
    MaskedAll,
    MeasureError,
    OverflowGuard,
    ParseError,
    ShockError,
    SingularError,
    VacuumError,
    ValidationError,
)
from .helpers import (
    format_scientific,
    format_verdict,
    is_nonincreasing,
    measured_rate,
    safe_divide,
    to_builtin,
)

__all__ = [
    "EntroFluxError",
    "DomainError",
    "VacuumError",
    "SingularError",
    "MeasureError",
    "GridError",
    "ShockError",
    "BlowupError",
    "OverflowGuard",
    "MaskedAll",
    "CapError",
    "FitError",
    "ConfigError",
    "ParseError",
    "ValidationError",
    "safe_divide",
    "measured_rate",
    "is_nonincreasing",
    "format_scientific",
    "format_verdict",
    "to_builtin",
]
