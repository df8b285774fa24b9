"""
EntroFlux 环面网格模块

周期单位环面 𝕋^d 上的均匀网格, 以及快照时间表
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from utils.errors import GridError

TIME_EPS = 1e-12


@dataclass(frozen=True)
class TorusGrid:
    """
    周期网格

    Attributes:
        d: 空间维数 (1 或 2)
        N: 每个方向的单元数
        T: 终止时间
        cfl: CFL 数 ∈ (0, 1)
        snapshot_dt: 快照间隔; None 表示只存 t=0 与 t=T
        store_every_step: 是否存储每一步 (弱形式求积需要)
    """

    d: int
    N: int
    T: float
    cfl: float = 0.45
    snapshot_dt: Optional[float] = None
    store_every_step: bool = False

    def __post_init__(self):
        problems = []
        if self.d not in (1, 2):
            problems.append(f"d must be 1 or 2, got {self.d}")
        if self.N < 2:
            problems.append(f"N must be >= 2, got {self.N}")
        if not self.T > 0:
            problems.append(f"T must be positive, got {self.T}")
        if not 0.0 < self.cfl < 1.0:
            problems.append(f"CFL must lie in (0, 1), got {self.cfl}")
        if self.snapshot_dt is not None and not self.snapshot_dt > 0:
            problems.append(f"snapshot_dt must be positive, got {self.snapshot_dt}")
        if problems:
            raise GridError("; ".join(problems))

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    def centers(self) -> Tuple[np.ndarray, ...]:
        """单元中心坐标, 每个数组形状为 shape"""
        x = (np.arange(self.N) + 0.5) / self.N
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))

    def snapshot_times(self) -> List[float]:
        """
        快照时间表 (首项 0, 末项 T, 严格递增)

        Example:
            >>> TorusGrid(d=1, N=8, T=0.1, snapshot_dt=0.05).snapshot_times()
            [0.0, 0.05, 0.1]
        """
        if self.snapshot_dt is None:
            return [0.0, float(self.T)]
        count = int(np.floor(self.T / self.snapshot_dt + TIME_EPS))
        times = [k * self.snapshot_dt for k in range(count + 1)]
        if self.T - times[-1] > TIME_EPS * max(1.0, self.T):
            times.append(float(self.T))
        else:
            times[-1] = float(self.T)
        return [float(t) for t in times]

    def refined(self, N: int) -> "TorusGrid":
        """同一时间设定下的另一分辨率"""
        return TorusGrid(
            d=self.d,
            N=N,
            T=self.T,
            cfl=self.cfl,
            snapshot_dt=self.snapshot_dt,
            store_every_step=self.store_every_step,
        )


def coarsening_ratio(fine_N: int, coarse_N: int) -> int:
    """
    嵌套网格的加粗比

    Raises:
        GridError: 粗网格不整除细网格
    """
    if coarse_N < 1 or fine_N % coarse_N:
        raise GridError(f"coarse N={coarse_N} does not divide fine N={fine_N}")
    return fine_N // coarse_N


def block_view(values: np.ndarray, d: int, ratio: int) -> np.ndarray:
    """
    把细网格数组重排为 (粗单元..., 块内细单元..., 分量)

    Args:
        values: 形状 (N,)*d + rest
        d: 空间维数
        ratio: 加粗比

    Returns:
        形状 (M,)*d + (ratio,)*d + rest, M = N / ratio
    """
    N = values.shape[0]
    M = N // ratio
    rest = values.shape[d:]
    split = values.reshape(sum(((M, ratio) for _ in range(d)), ()) + rest)
    order = tuple(2 * k for k in range(d)) + tuple(2 * k + 1 for k in range(d))
    order += tuple(range(2 * d, 2 * d + len(rest)))
    return split.transpose(order)


def coarse_average(values: np.ndarray, d: int, ratio: int) -> np.ndarray:
    """细单元值在粗单元上的算术平均"""
    blocks = block_view(values, d, ratio)
    return blocks.mean(axis=tuple(range(d, 2 * d)))
