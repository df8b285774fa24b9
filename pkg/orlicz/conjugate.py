"""
EntroFlux Fenchel 共轭模块

M*(ξ) = sup_ρ (ξρ − M(ρ)), 内层凹目标用向量化黄金分割搜索
"""

import logging
from typing import Callable, Dict, Optional

import numpy as np

from config import config
from utils.errors import CapError, DomainError

from .nfunctions import NFunction

logger = logging.getLogger(__name__)

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
CAP_FRACTION = 1.0 - 1e-6


def golden_section_max(
    objective: Callable[[np.ndarray], np.ndarray],
    shape,
    upper: float,
    iterations: int
) -> np.ndarray:
    """
    对一族单峰函数在 [0, upper] 上同时做黄金分割, 返回最大点

    Args:
        objective: 接收形状为 shape 的试探点数组
        shape: 问题批量形状
        upper: 搜索上界
        iterations: 迭代次数
    """
    a = np.zeros(shape)
    b = np.full(shape, float(upper))
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = objective(c)
    fd = objective(d)
    for _ in range(iterations):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - INV_PHI * (b - a)
        d_new = a + INV_PHI * (b - a)
        # 复用未移动的内点
        c, d = np.where(left, c_new, d), np.where(left, c, d_new)
        f_probe = objective(np.where(left, c, d))
        fc, fd = np.where(left, f_probe, fd), np.where(left, fc, f_probe)
    return 0.5 * (a + b)


def fenchel_conjugate(
    M: NFunction,
    xi,
    search_cap: Optional[float] = None,
    iterations: Optional[int] = None,
    numeric: bool = False
) -> np.ndarray:
    """
    数值 Fenchel 共轭

    Args:
        M: N 函数
        xi: 对偶变量 (≥ 0, 可为数组)
        search_cap: 内层最大化的上界
        iterations: 黄金分割迭代次数
        numeric: 即使有闭式也强制数值计算

    Returns:
        M*(ξ), 与 xi 同形状

    Raises:
        DomainError: xi 含负值
        CapError: 最大点触及 search_cap

    Example:
        >>> float(fenchel_conjugate(M2, 2.0))
        1.0
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise DomainError("conjugate is evaluated for xi >= 0 only")
    if M.conjugate is not None and not numeric:
        return np.asarray(M.conjugate(xi), dtype=float)

    cap = config.CONJUGATE_CAP if search_cap is None else search_cap
    iters = config.GOLDEN_ITERATIONS if iterations is None else iterations

    def objective(rho):
        return xi * rho - M(rho)

    rho_star = golden_section_max(objective, xi.shape, cap, iters)
    if np.any(rho_star >= CAP_FRACTION * cap):
        worst = float(np.max(xi[rho_star >= CAP_FRACTION * cap]))
        raise CapError(f"{M.name}* maximizer reached search cap {cap:g} at xi={worst:g}")
    return np.maximum(objective(rho_star), 0.0)


def biconjugate(M: NFunction, v, xi_cap: float = 1e4, iterations: Optional[int] = None) -> np.ndarray:
    """
    M**(v) = sup_ξ (vξ − M*(ξ)), 嵌套黄金分割

    凸下半连续的 M 满足 M** = M; 数值上 M** ≤ M + 容差
    """
    v = np.asarray(v, dtype=float)
    iters = config.GOLDEN_ITERATIONS if iterations is None else iterations

    def conj(xi):
        return fenchel_conjugate(M, xi, iterations=iters)

    def objective(xi):
        return v * xi - conj(xi)

    xi_star = golden_section_max(objective, v.shape, xi_cap, iters)
    return np.maximum(objective(xi_star), 0.0)


def fenchel_young_check(M: NFunction, v, w, tol: float = 1e-8) -> Dict[str, float]:
    """
    检查 vw ≤ M(v) + M*(w)

    Args:
        M: N 函数
        v, w: 非负样本 (同形状)
        tol: 判定容差

    Returns:
        {"max_violation", "passed", "samples"}
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    slack = v * w - M(v) - fenchel_conjugate(M, w)
    worst = float(np.max(slack)) if slack.size else 0.0
    logger.debug("Fenchel-Young %s: max violation %.3e over %d pairs", M.name, worst, slack.size)
    return {
        "max_violation": worst,
        "passed": worst <= tol,
        "samples": int(slack.size),
    }
