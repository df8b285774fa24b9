"""
EntroFlux 导数核对模块

解析雅可比与中心差分的比较 (相对误差 ≤ 1e-5)
"""

import logging
from typing import Callable, Dict, Optional

import numpy as np

from config import config
from systems.base import SystemSpec

from .design import SampleDesign, require_box_inside, sample_box
from .report import HypothesisReport

logger = logging.getLogger(__name__)


def central_difference(fn: Callable, u: np.ndarray, step: Optional[float] = None) -> np.ndarray:
    """
    批量中心差分雅可比

    Args:
        fn: 向量化函数, 输出 (m, *out)
        u: 样本 (m, n)
        step: 相对步长, 实际步长 step·max(1, |u_j|)

    Returns:
        (m, *out, n), 最后一轴为 ∂/∂u_j
    """
    step = config.FD_STEP if step is None else step
    u = np.asarray(u, dtype=float)
    cols = []
    for j in range(u.shape[-1]):
        h = step * np.maximum(1.0, np.abs(u[..., j]))
        e = np.zeros_like(u)
        e[..., j] = h
        diff = np.asarray(fn(u + e)) - np.asarray(fn(u - e))
        h_b = h.reshape(h.shape + (1,) * (diff.ndim - h.ndim))
        cols.append(diff / (2.0 * h_b))
    return np.stack(cols, axis=-1)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """逐样本 max|an − fd| / max(1, max|an|) 的最大值"""
    m = analytic.shape[0]
    an = analytic.reshape(m, -1)
    fd = numeric.reshape(m, -1)
    scale = np.maximum(1.0, np.max(np.abs(an), axis=1))
    return float(np.max(np.max(np.abs(an - fd), axis=1) / scale))


def derivative_pairs(system: SystemSpec) -> Dict[str, tuple]:
    """名称 → (函数, 解析导数)"""
    pairs = {
        "grad_A": (system.A, system.grad_A),
        "grad_eta": (system.eta, system.grad_eta),
        "grad_G": (system.G, system.grad_G),
        "hess_A": (system.grad_A, system.hess_A),
        "hess_eta": (system.grad_eta, system.hess_eta),
    }
    for a in range(system.space_dim):
        pairs[f"grad_F[{a}]"] = (system.F[a], system.grad_F[a])
        pairs[f"grad_q[{a}]"] = (system.q[a], system.grad_q[a])
    return pairs


def check_derivatives(
    system: SystemSpec,
    design: SampleDesign,
    tol: Optional[float] = None
) -> HypothesisReport:
    """
    全部解析导数与中心差分的核对报告

    Args:
        system: 系统
        design: 采样设计
        tol: 相对误差容差 (默认有限差分级 1e-5)

    Returns:
        HypothesisReport (id "derivatives")
    """
    tol = config.FD_TOL if tol is None else tol
    require_box_inside(system, design)
    u = sample_box(design)
    residuals = {}
    for name, (fn, grad) in derivative_pairs(system).items():
        residuals[name] = relative_error(grad(u), central_difference(fn, u))
    worst = max(residuals, key=residuals.get)
    logger.debug("%s derivatives: worst %s = %.3e", system.name, worst, residuals[worst])
    return HypothesisReport(
        hypothesis="derivatives",
        verdict=all(r <= tol for r in residuals.values()),
        tolerance=tol,
        residuals=residuals,
        samples={"states": int(u.shape[0])},
        seed=design.seed,
    )
