"""
EntroFlux 修正回归函数模块

沿各向异性射线 u_s = (s^{α₁}β₁, …, s^{α_n}β_n) 估计 f^∞(β) = lim f(u_s)/η(u_s),
相对量同时以直接比值与恒等式 η^∞(·|U) = 1 − G(U)·A^∞、
F_α^∞(·|U) = F_α^∞ − ∇F_α(U)∇A(U)⁻¹A^∞ 两种方式计算
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from relent.pointwise import relative_entropy_unchecked, relative_flux_with, transfer_matrices
from systems.base import SystemSpec
from utils.errors import ConfigError, DomainError, OverflowGuard

logger = logging.getLogger(__name__)

QUANTITIES = ("A", "F", "eta_rel", "F_rel")
IDENTITY_SLACK = 1e-10


@dataclass
class RecessionProbe:
    """
    射线探针

    Attributes:
        direction: 单位方向 β (有下界坐标需为正)
        exponents: 射线指数; None 时取系统默认
        s_grid: 递增的 s 网格
    """

    direction: np.ndarray
    exponents: Optional[Sequence[float]] = None
    s_grid: Sequence[float] = tuple(np.logspace(0.0, 4.0, 9))

    def __post_init__(self):
        self.direction = np.asarray(self.direction, dtype=float)
        self.s_grid = np.asarray(self.s_grid, dtype=float)
        norm = np.linalg.norm(self.direction)
        if norm == 0.0:
            raise ConfigError("probe direction must be nonzero")
        self.direction = self.direction / norm
        if self.s_grid.size < 2 or np.any(np.diff(self.s_grid) <= 0) or self.s_grid[0] <= 0:
            raise ConfigError("s_grid must be positive and strictly increasing with at least two points")

    def states(self, system: SystemSpec) -> np.ndarray:
        """(n_s, n) 射线状态"""
        if self.direction.size != system.state_dim:
            raise ConfigError(f"direction has {self.direction.size} components, {system.name} needs {system.state_dim}")
        for idx in system.domain.lower:
            if self.direction[idx] <= 0.0:
                raise DomainError(f"direction component {idx} must be positive for {system.name}")
        exponents = np.asarray(system.scaling_exponents if self.exponents is None else self.exponents, dtype=float)
        return self.direction[None, :] * self.s_grid[:, None] ** exponents[None, :]


def _terminal(ratios: np.ndarray):
    value = ratios[-1]
    cauchy = float(np.max(np.abs(ratios[-1] - ratios[-2])))
    return value, cauchy


def recession(
    system: SystemSpec,
    quantity: str,
    probe: RecessionProbe,
    U=None,
    alpha: int = 0
) -> Dict:
    """
    修正回归函数的末端比值估计

    Args:
        system: 系统
        quantity: "A" | "F" | "eta_rel" | "F_rel"
        probe: 射线探针
        U: 内部参考状态 (相对量必需)
        alpha: 通量方向 (F / F_rel)

    Returns:
        {"quantity", "s", "ratios", "value", "cauchy"}; 相对量另含
        "direct", "identity", "discrepancy", "agrees"

    Raises:
        OverflowGuard: η 在不足两个网格点内溢出
        ConfigError: 未知量或相对量缺少 U

    Example:
        >>> probe = RecessionProbe([1.0, 1.0], s_grid=np.logspace(0, 4, 9))
        >>> recession(get_system("euler"), "A", probe)["value"]  # doctest: +SKIP
    """
    if quantity not in QUANTITIES:
        raise ConfigError(f"unknown recession quantity '{quantity}', expected one of {QUANTITIES}")
    if not 0 <= alpha < system.space_dim:
        raise ConfigError(f"alpha={alpha} out of range for d={system.space_dim}")
    relative = quantity in ("eta_rel", "F_rel")
    if relative:
        if U is None:
            raise ConfigError(f"{quantity} needs a reference state U")
        U = np.asarray(U, dtype=float)
        system.domain.require_interior(U, what="U")

    with np.errstate(over="ignore", invalid="ignore"):
        states = probe.states(system)
        eta = system.eta(states)
        A = system.A(states)
        F = system.F[alpha](states)
    finite = np.isfinite(eta) & np.all(np.isfinite(A), axis=-1) & np.all(np.isfinite(F), axis=-1)
    keep = np.cumprod(finite).astype(bool)
    if keep.sum() < 2:
        raise OverflowGuard(f"{system.name}: entropy overflows along the probe ray")
    s, states, eta, A, F = probe.s_grid[keep], states[keep], eta[keep], A[keep], F[keep]

    A_ratios = A / eta[:, None]
    F_ratios = F / eta[:, None]
    if quantity == "A":
        ratios = A_ratios
    elif quantity == "F":
        ratios = F_ratios
    elif quantity == "eta_rel":
        ratios = relative_entropy_unchecked(system, states, U) / eta
        identity = 1.0 - A_ratios @ system.G(U)
    else:
        transfer = transfer_matrices(system, U)
        ratios = relative_flux_with(system, transfer, states, U)[:, alpha] / eta[:, None]
        identity = F_ratios - A_ratios @ transfer[alpha].T

    value, cauchy = _terminal(ratios)
    out = {
        "quantity": quantity,
        "direction": probe.direction.tolist(),
        "s": s,
        "ratios": ratios,
        "value": value,
        "cauchy": cauchy,
        "truncated": int(probe.s_grid.size - s.size),
    }
    if relative:
        identity_value, identity_cauchy = _terminal(identity)
        discrepancy = float(np.max(np.abs(value - identity_value)))
        out.update({
            "direct": value,
            "identity": identity_value,
            "discrepancy": discrepancy,
            "agrees": discrepancy <= cauchy + identity_cauchy + IDENTITY_SLACK,
        })
    logger.debug("%s recession of %s: value=%s cauchy=%.3e", system.name, quantity, np.round(value, 6), cauchy)
    return out


def recession_sweep(
    system: SystemSpec,
    quantity: str,
    directions: np.ndarray,
    U_samples: Optional[np.ndarray] = None,
    s_grid: Optional[Sequence[float]] = None,
    alpha: int = 0
) -> list:
    """
    多个方向 (及参考状态) 上逐个探针求值, 方向间不做插值

    Returns:
        每个探针一个结果 dict, 附 "probe" 序号
    """
    results = []
    for i, beta in enumerate(np.atleast_2d(directions)):
        probe = RecessionProbe(beta) if s_grid is None else RecessionProbe(beta, s_grid=s_grid)
        U = None if U_samples is None else U_samples[i % len(U_samples)]
        res = recession(system, quantity, probe, U=U, alpha=alpha)
        res["probe"] = i
        results.append(res)
    return results
