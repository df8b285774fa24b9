"""
EntroFlux 采样设计模块

以紧盒均匀采样与远场射线实现 "对所有 u ∈ X" 的量词
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from config import config
from systems.base import SystemSpec
from utils.errors import ConfigError, DomainError


@dataclass
class SampleDesign:
    """
    采样设计

    Attributes:
        compact_box: 每个坐标的区间 (lo, hi)
        n_samples: 盒内样本数
        ray_directions: 射线方向数
        s_grid: 射线参数的递增几何阶梯
        seed: 随机种子
    """
    compact_box: Tuple[Tuple[float, float], ...]
    n_samples: int = 1000
    ray_directions: int = 64
    s_grid: np.ndarray = field(default_factory=lambda: np.geomspace(1e1, 1e6, 21))
    seed: int = config.DEFAULT_SEED

    def __post_init__(self):
        self.compact_box = tuple((float(lo), float(hi)) for lo, hi in self.compact_box)
        self.s_grid = np.asarray(self.s_grid, dtype=float)
        if any(hi < lo for lo, hi in self.compact_box):
            raise ConfigError("compact box intervals need lo <= hi")
        if self.s_grid.size < 2 or np.any(np.diff(self.s_grid) <= 0):
            raise ConfigError("s_grid must be strictly increasing")
        if self.n_samples < 1 or self.ray_directions < 1:
            raise ConfigError("sample counts must be positive")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def doubled(self) -> "SampleDesign":
        """样本数加倍的同种子设计 (前一半样本与原设计一致)"""
        return SampleDesign(
            compact_box=self.compact_box,
            n_samples=2 * self.n_samples,
            ray_directions=2 * self.ray_directions,
            s_grid=self.s_grid,
            seed=self.seed,
        )


def require_box_inside(system: SystemSpec, design: SampleDesign, margin: Optional[float] = None) -> None:
    """
    紧盒需严格位于 X 内部

    Raises:
        DomainError: 盒与 ∂X 的距离不超过 margin
    """
    margin = config.INTERIOR_MARGIN if margin is None else margin
    if len(design.compact_box) != system.state_dim:
        raise ConfigError(f"box has {len(design.compact_box)} intervals, system has n={system.state_dim}")
    for idx, bound in system.domain.lower.items():
        lo = design.compact_box[idx][0]
        if lo - bound <= margin:
            raise DomainError(
                f"box coordinate {idx} starts at {lo:g}, within {margin:g} of the boundary {bound:g}"
            )


def sample_box(design: SampleDesign, count: Optional[int] = None, rng=None) -> np.ndarray:
    """
    盒内均匀样本; 同种子下前 k 个样本与样本数无关

    Returns:
        (count, n)
    """
    count = design.n_samples if count is None else count
    rng = design.rng() if rng is None else rng
    lo = np.array([b[0] for b in design.compact_box])
    hi = np.array([b[1] for b in design.compact_box])
    return lo + (hi - lo) * rng.random((count, lo.size))


def sample_directions(system: SystemSpec, count: int, rng) -> np.ndarray:
    """
    单位球面与 X 的交上的方向 (有下界的坐标取正)

    Returns:
        (count, n)
    """
    raw = rng.normal(size=(count, system.state_dim))
    for idx in system.domain.lower:
        raw[:, idx] = np.abs(raw[:, idx]) + 1e-3
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def ray_states(system: SystemSpec, directions: np.ndarray, s_grid: Sequence[float]) -> np.ndarray:
    """
    u_s = (s^{α₁}β₁, …, s^{α_n}β_n)

    Returns:
        (n_rays, n_s, n)
    """
    s = np.asarray(s_grid, dtype=float)
    exponents = np.asarray(system.scaling_exponents, dtype=float)
    scale = s[:, None] ** exponents[None, :]
    return directions[:, None, :] * scale[None, :, :]


def vertices(design: SampleDesign) -> np.ndarray:
    """盒的全部顶点 (2ⁿ, n)"""
    grids = np.meshgrid(*design.compact_box, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)
