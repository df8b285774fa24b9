"""
EntroFlux Radon-Nikodym 模块

以帽形核 κ_ε 磨光两个测度后逐单元取比值, 估计 D_{m_f} m_g
"""

import logging
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
from scipy import ndimage

from config import config
from utils.errors import ConfigError, MaskedAll

logger = logging.getLogger(__name__)


@dataclass
class DensityField:
    """
    Radon-Nikodym 密度估计

    Attributes:
        epsilons: 磨光半径阶梯
        densities: {ε: (cells, C)}, 被掩蔽单元为 NaN
        estimate: 最小 ε 上的密度
        mask: True 表示单元被掩蔽 (m_f < 1e-14)
    """

    epsilons: np.ndarray
    densities: Dict[float, np.ndarray]
    estimate: np.ndarray
    mask: np.ndarray


def hat_kernel(r, epsilon: float) -> np.ndarray:
    """
    κ_ε(r): [0, ε] 上为 1, [ε, 2ε] 上为 2 − r/ε, 其外为 0

    Example:
        >>> hat_kernel([0.5, 1.5, 3.0], 1.0)
        array([1. , 0.5, 0. ])
    """
    r = np.abs(np.asarray(r, dtype=float))
    return np.clip(2.0 - r / epsilon, 0.0, 1.0)


def kernel_stencil(epsilon: float, h: float, d: int) -> np.ndarray:
    """以单元中心距离计值的 d 维核模板, 边长 2·reach + 1"""
    reach = int(np.ceil(2.0 * epsilon / h))
    offsets = np.arange(-reach, reach + 1) * h
    grids = np.meshgrid(*([offsets] * d), indexing="ij")
    r = np.sqrt(sum(g ** 2 for g in grids))
    return hat_kernel(r, epsilon)


def mollify(masses: np.ndarray, coarse_N: int, d: int, epsilon: float) -> np.ndarray:
    """
    ⟨m, κ_ε(|· − x_i|)⟩ 在每个单元中心的值 (周期卷绕)

    Args:
        masses: (cells,) 或 (cells, C)

    Returns:
        与输入同形
    """
    masses = np.asarray(masses, dtype=float)
    flat = masses.reshape(masses.shape[0], -1)
    stencil = kernel_stencil(epsilon, 1.0 / coarse_N, d)
    shape = (coarse_N,) * d
    out = np.empty_like(flat)
    for c in range(flat.shape[1]):
        out[:, c] = ndimage.convolve(flat[:, c].reshape(shape), stencil, mode="wrap").ravel()
    return out.reshape(masses.shape)


def radon_nikodym(
    m_g: np.ndarray,
    m_f: np.ndarray,
    coarse_N: int,
    d: int,
    epsilon_ladder: Sequence[float]
) -> DensityField:
    """
    D_{m_f} m_g 的核估计

    Args:
        m_g: 带符号 (或向量) 单元质量 (cells,) / (cells, C)
        m_f: 非负单元质量 (cells,)
        coarse_N / d: 粗网格
        epsilon_ladder: 磨光半径; 最小者给出估计值

    Returns:
        DensityField

    Raises:
        MaskedAll: m_f 处处低于掩蔽阈值
        ConfigError: 质量形状与网格不符或 ε 阶梯为空
    """
    m_g = np.asarray(m_g, dtype=float)
    m_f = np.asarray(m_f, dtype=float).reshape(-1)
    cells = coarse_N ** d
    if m_f.size != cells or m_g.shape[0] != cells:
        raise ConfigError(f"masses must have {cells} cells, got {m_g.shape[0]} and {m_f.size}")
    eps = np.sort(np.asarray(epsilon_ladder, dtype=float))
    if eps.size == 0 or np.any(eps <= 0):
        raise ConfigError("epsilon_ladder must hold positive radii")

    mask = m_f < config.RN_MASK_TOL
    if np.all(mask):
        raise MaskedAll("m_f vanishes on every cell")
    g_flat = m_g.reshape(cells, -1)
    densities = {}
    for epsilon in eps:
        num = mollify(g_flat, coarse_N, d, epsilon)
        den = mollify(m_f, coarse_N, d, epsilon)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den[:, None]
        ratio[mask] = np.nan
        densities[float(epsilon)] = ratio.reshape(m_g.shape)
    logger.debug("radon-nikodym: %d of %d cells masked", int(mask.sum()), cells)
    return DensityField(epsilons=eps, densities=densities, estimate=densities[float(eps[0])], mask=mask)
