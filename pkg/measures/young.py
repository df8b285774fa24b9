"""
EntroFlux Young 测度模块

把细网格单元值装箱到粗单元, 得到离散 Young 测度 (原子 + 权重)
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from config import config
from relent.averaged import check_weights
from solver.grid import block_view, coarsening_ratio

logger = logging.getLogger(__name__)


@dataclass
class DiscreteYoungMeasure:
    """
    粗网格上的离散 Young 测度

    Attributes:
        atoms: (cells, K, n), 不足 K 个原子的单元以首个原子填充
        weights: (cells, K), 填充位置权重为 0
        coarse_N / d: 粗网格
        provenance: 来源说明 (细网格 N、加粗比等)
    """

    atoms: np.ndarray
    weights: np.ndarray
    coarse_N: int
    d: int
    provenance: Dict = field(default_factory=dict)

    def __post_init__(self):
        check_weights(self.weights)

    @property
    def cell_volume(self) -> float:
        return (1.0 / self.coarse_N) ** self.d

    @property
    def atom_counts(self) -> np.ndarray:
        return np.count_nonzero(self.weights > 0, axis=1)

    def mean(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """每个单元的 ⟨ν, f⟩"""
        values = np.asarray(fn(self.atoms))
        w = self.weights.reshape(self.weights.shape + (1,) * (values.ndim - 2))
        return np.sum(w * values, axis=1)

    def integral(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """环面积分 ∫⟨ν, f⟩ dx"""
        return np.sum(self.mean(fn), axis=0) * self.cell_volume

    def barycenter(self) -> np.ndarray:
        """状态空间重心 (cells, n)"""
        return self.mean(lambda u: u)

    def variance(self) -> np.ndarray:
        """每个单元关于原子重心的加权二阶矩"""
        center = self.barycenter()
        spread = np.sum((self.atoms - center[:, None, :]) ** 2, axis=-1)
        return np.sum(self.weights * spread, axis=1)


def _merge_cell(values: np.ndarray, tol: float):
    """合并相距 tol 以内的原子, 代表元取首次出现的值"""
    keys = np.round(values / tol)
    _, first, counts = np.unique(keys, axis=0, return_index=True, return_counts=True)
    return values[first], counts / values.shape[0]


def empirical_young_measure(
    fine_u: np.ndarray,
    coarse_N: int,
    d: Optional[int] = None,
    tol: Optional[float] = None,
    provenance: Optional[Dict] = None
) -> DiscreteYoungMeasure:
    """
    细网格状态场 → 粗网格离散 Young 测度

    Args:
        fine_u: 细网格状态, 形状 (N,)*d + (n,)
        coarse_N: 粗网格单元数 (需整除 N)
        d: 空间维数; None 时由形状推断
        tol: 原子合并容差
        provenance: 附加来源信息

    Returns:
        DiscreteYoungMeasure

    Raises:
        GridError: 网格不嵌套

    Example:
        >>> field = np.tile([[1.0, 0.0], [2.0, 0.0]], (4, 1))
        >>> empirical_young_measure(field, 1).weights
        array([[0.5, 0.5]])
    """
    fine_u = np.asarray(fine_u, dtype=float)
    d = fine_u.ndim - 1 if d is None else d
    tol = config.ATOM_MERGE_TOL if tol is None else tol
    N = fine_u.shape[0]
    n = fine_u.shape[-1]
    ratio = coarsening_ratio(N, coarse_N)
    cells = block_view(fine_u, d, ratio).reshape(coarse_N ** d, ratio ** d, n)

    merged = [_merge_cell(cell, tol) for cell in cells]
    K = max(len(w) for _, w in merged)
    atoms = np.empty((len(merged), K, n))
    weights = np.zeros((len(merged), K))
    for i, (cell_atoms, cell_weights) in enumerate(merged):
        k = len(cell_weights)
        atoms[i, :k] = cell_atoms
        atoms[i, k:] = cell_atoms[0]
        weights[i, :k] = cell_weights

    info = {"fine_N": N, "coarse_N": coarse_N, "ratio": ratio}
    info.update(provenance or {})
    logger.debug("Young measure N=%d -> %d: up to %d atoms per cell", N, coarse_N, K)
    return DiscreteYoungMeasure(atoms=atoms, weights=weights, coarse_N=coarse_N, d=d, provenance=info)
