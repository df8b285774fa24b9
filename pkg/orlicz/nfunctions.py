"""
EntroFlux N 函数模块

N 函数 M: ℝ₊ → ℝ₊ (凸, M(0) = 0, M(v)/v 在 0 处趋于 0、在 ∞ 处趋于 ∞)
以及 Euler 估计所用的 M₁(ρ) = ρ²√log(ρ+1), M₂(ρ) = ρ²
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from utils.errors import ConfigError


@dataclass(frozen=True)
class NFunction:
    """
    N 函数

    Attributes:
        name: 名称
        fn: 向量化的 M
        conjugate: 闭式共轭 M* (可选)
    """
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    conjugate: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, v):
        return self.fn(np.asarray(v, dtype=float))


def _m1(v):
    return v * v * np.sqrt(np.log1p(v))


def _m2(v):
    return v * v


M1 = NFunction("M1", _m1)
M2 = NFunction("M2", _m2, conjugate=lambda xi: 0.25 * np.asarray(xi, dtype=float) ** 2)

NFUNCTIONS: Dict[str, NFunction] = {
    "M1": M1,
    "M2": M2,
}


def power_nfunction(p: float) -> NFunction:
    """
    M(v) = v^p / p, p > 1, 共轭 ξ^q / q (1/p + 1/q = 1)

    Example:
        >>> power_nfunction(2.0).conjugate(2.0)
        2.0
    """
    if p <= 1.0:
        raise ConfigError(f"power N-function needs p > 1, got {p}")
    q = p / (p - 1.0)
    return NFunction(
        f"power_{p:g}",
        lambda v: np.power(v, p) / p,
        conjugate=lambda xi: np.power(np.asarray(xi, dtype=float), q) / q,
    )


def validate_nfunction(M: NFunction, grid: np.ndarray = None) -> Dict[str, bool]:
    """
    在探测网格上检查 N 函数条件

    Returns:
        各条件的判定 {zero_at_origin, convex, small_limit, large_limit}
    """
    grid = np.geomspace(1e-6, 1e6, 121) if grid is None else np.asarray(grid, dtype=float)
    values = M(grid)
    mid = M(0.5 * (grid[:-1] + grid[1:]))
    chord = 0.5 * (values[:-1] + values[1:])
    slope = values / grid
    return {
        "zero_at_origin": bool(abs(float(M(0.0))) <= 1e-14),
        "convex": bool(np.all(mid <= chord * (1.0 + 1e-12) + 1e-300)),
        "small_limit": bool(slope[0] < slope[len(slope) // 2] and slope[0] < 1e-3),
        "large_limit": bool(slope[-1] > slope[len(slope) // 2] and slope[-1] > 1e3),
    }
