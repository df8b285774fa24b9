"""
EntroFlux 系统基础模块

定义双曲系统 ∂_t A(u) + ∂_α F_α(u) = 0 的不可变描述 SystemSpec,
以及通用求值入口 evaluate / jacobian / hessian_form / invert_A

约定: 所有可调用对象对前导轴向量化, 状态 u 形状为 (..., n);
雅可比矩阵形状 (..., n, n), 行对应分量, 列对应 ∂/∂u_j;
二阶导数 hess_A 形状 (..., n, n, n), 首轴为分量
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from config import config
from utils.errors import ConfigError, DomainError, VacuumError

logger = logging.getLogger(__name__)

StateFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class StateDomain:
    """
    凸开集 X ⊂ ℝⁿ 的逐坐标描述

    lower: {坐标下标: 下界}, 例如 {0: 0.0} 表示 u₁ > 0; 其余坐标无界
    """

    state_dim: int
    lower: Dict[int, float] = field(default_factory=dict)

    def _slack(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        slack = np.full(u.shape[:-1], np.inf)
        for idx, bound in self.lower.items():
            slack = np.minimum(slack, u[..., idx] - bound)
        return slack

    def contains(self, u: np.ndarray, closed: bool = True) -> np.ndarray:
        """逐状态判断 u ∈ X̄ (closed=True) 或 u ∈ X"""
        u = np.asarray(u, dtype=float)
        finite = np.all(np.isfinite(u), axis=-1)
        slack = self._slack(u)
        inside = slack >= 0.0 if closed else slack > 0.0
        return finite & inside

    def distance_to_boundary(self, u: np.ndarray) -> np.ndarray:
        """到 ∂X 的距离 (无界坐标不计)"""
        return self._slack(u)

    def require(self, u: np.ndarray, closed: bool = True, what: str = "state") -> None:
        """要求全部状态落在 X̄ / X 中, 否则抛出 DomainError"""
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.state_dim:
            raise DomainError(f"{what} has dimension {u.shape[-1]}, expected {self.state_dim}")
        ok = self.contains(u, closed=closed)
        if not np.all(ok):
            bad = np.asarray(u).reshape(-1, self.state_dim)[~np.ravel(ok)][0]
            where = "closure of X" if closed else "X"
            raise DomainError(f"{what} {bad.tolist()} is not in the {where}")

    def require_interior(self, u: np.ndarray, margin: Optional[float] = None, what: str = "state") -> None:
        """要求状态到 ∂X 的距离大于 margin"""
        margin = config.INTERIOR_MARGIN if margin is None else margin
        self.require(u, closed=False, what=what)
        if self.lower and np.min(self.distance_to_boundary(u)) <= margin:
            raise DomainError(f"{what} lies within {margin:g} of the boundary of X")


@dataclass(frozen=True)
class ConstraintSpec:
    """
    约束结构 (H2'): G(u) ∈ Y, L ∈ Y⊥

    designated 指定需要离散无散度的向量场; extract / rebuild
    负责在状态场与这些向量场之间转换, project_Y 去除其梯度部分
    """

    L_description: str
    designated: Tuple[str, ...]
    Lbar: Tuple[StateFn, ...]
    extract: Callable[[np.ndarray], Tuple[np.ndarray, ...]]
    rebuild: Callable[[np.ndarray, Tuple[np.ndarray, ...]], np.ndarray]
    space_dim: int

    def project_Y(self, field_u: np.ndarray) -> np.ndarray:
        """
        将采样状态场投影到指定分量离散无散度的最近场

        Args:
            field_u: 形状 (N,)*d + (n,) 的周期状态场

        Returns:
            投影后的状态场
        """
        from .projection import helmholtz_project

        parts = self.extract(field_u)
        projected = tuple(helmholtz_project(p, self.space_dim) for p in parts)
        return self.rebuild(field_u, projected)

    def Y_predicate(self, field_u: np.ndarray, tol: float = 1e-10) -> bool:
        """指定分量的离散散度最大范数是否不超过 tol"""
        return self.divergence_norm(field_u) <= tol

    def divergence_norm(self, field_u: np.ndarray) -> float:
        """指定分量离散 (中心差分) 散度的最大范数"""
        from .projection import discrete_divergence

        parts = self.extract(field_u)
        return float(max(np.max(np.abs(discrete_divergence(p, self.space_dim))) for p in parts))


@dataclass(frozen=True)
class SystemSpec:
    """
    双曲系统及其熵结构

    Attributes:
        name: 注册名
        state_dim / space_dim: n 与环面维数 d
        domain: X 的描述
        A, F, eta, q, G: 系统量, F 与 q 为长度 d 的元组
        grad_*: 解析雅可比; grad_eta / grad_q 返回形状 (..., n)
        hess_A, hess_eta: 解析二阶导数
        scaling_exponents: 射线指数 α₁..α_n
        constraint: 约束结构, 无约束系统为 None
        invert: 守恒量反演 v ↦ (u, 钳制次数)
        wave_speed: 第 α 方向的波速上界 (仅对有求解器的系统)
        params: 构造参数 (γ, g, ρ_min 等)
    """

    name: str
    state_dim: int
    space_dim: int
    domain: StateDomain
    A: StateFn
    F: Tuple[StateFn, ...]
    eta: StateFn
    q: Tuple[StateFn, ...]
    G: StateFn
    grad_A: StateFn
    grad_F: Tuple[StateFn, ...]
    grad_eta: StateFn
    grad_G: StateFn
    grad_q: Tuple[StateFn, ...]
    hess_A: StateFn
    hess_eta: StateFn
    scaling_exponents: Tuple[float, ...]
    invert: Callable[[np.ndarray, bool], Tuple[np.ndarray, int]]
    constraint: Optional[ConstraintSpec] = None
    wave_speed: Optional[Callable[[np.ndarray, int], np.ndarray]] = None
    params: Dict[str, float] = field(default_factory=dict)

    @property
    def has_solver(self) -> bool:
        return self.wave_speed is not None


_OPEN_SET_QUANTITIES = ("G", "q")


def evaluate(system: SystemSpec, quantity: str, u, alpha: int = 0) -> np.ndarray:
    """
    计算系统量 A, F_α, η, q_α, G

    Args:
        system: 系统描述
        quantity: "A" | "F" | "eta" | "q" | "G"
        u: 状态 (..., n)
        alpha: 通量方向 (仅 F, q)

    Returns:
        向量或标量值

    Example:
        >>> evaluate(get_system("euler"), "eta", [1.0, 0.0])
        0.25
    """
    u = np.asarray(u, dtype=float)
    closed = quantity not in _OPEN_SET_QUANTITIES
    system.domain.require(u, closed=closed)
    if quantity == "A":
        out = system.A(u)
    elif quantity == "F":
        out = system.F[_check_alpha(system, alpha)](u)
    elif quantity == "eta":
        out = system.eta(u)
    elif quantity == "q":
        out = system.q[_check_alpha(system, alpha)](u)
    elif quantity == "G":
        out = system.G(u)
    else:
        raise ConfigError(f"unknown quantity '{quantity}'")
    if np.ndim(out) == 0:
        return float(out)
    return out


def jacobian(system: SystemSpec, quantity: str, u, alpha: int = 0) -> np.ndarray:
    """
    解析雅可比 ∇A, ∇F_α, ∇η, ∇G, ∇q_α

    要求 u 严格位于 X 内部 (与边界距离大于配置的 margin)
    """
    u = np.asarray(u, dtype=float)
    system.domain.require_interior(u)
    table = {
        "A": lambda: system.grad_A(u),
        "F": lambda: system.grad_F[_check_alpha(system, alpha)](u),
        "eta": lambda: system.grad_eta(u),
        "G": lambda: system.grad_G(u),
        "q": lambda: system.grad_q[_check_alpha(system, alpha)](u),
    }
    if quantity not in table:
        raise ConfigError(f"no analytic Jacobian for '{quantity}'")
    return table[quantity]()


def hessian_form(system: SystemSpec, u) -> np.ndarray:
    """
    计算 ∇²η(u) − G(u)·∇²A(u) 并对称化

    Args:
        system: 系统描述
        u: 内部状态 (..., n)

    Returns:
        对称矩阵 (..., n, n)
    """
    u = np.asarray(u, dtype=float)
    system.domain.require_interior(u)
    return hessian_form_unchecked(system, u)


def hessian_form_unchecked(system: SystemSpec, u: np.ndarray) -> np.ndarray:
    """hessian_form 的无域检查版本 (调用方已保证 u ∈ X)"""
    form = system.hess_eta(u) - np.einsum("...k,...kij->...ij", system.G(u), system.hess_A(u))
    return 0.5 * (form + np.swapaxes(form, -1, -2))


def invert_A(system: SystemSpec, v, strict: Optional[bool] = None) -> np.ndarray:
    """
    由守恒量 v = A(u) 反解状态 u

    Args:
        system: 系统描述
        v: 守恒量 (..., n)
        strict: 真空严格模式; None 时取系统参数

    Returns:
        状态 u

    Raises:
        VacuumError: 严格模式下 v₁ < ρ_min
    """
    v = np.asarray(v, dtype=float)
    if strict is None:
        strict = bool(system.params.get("strict_vacuum", config.STRICT_VACUUM))
    u, clamps = system.invert(v, strict)
    if clamps:
        logger.info("%s: clamped %d vacuum state(s) at rho_min", system.name, clamps)
    return u


def _check_alpha(system: SystemSpec, alpha: int) -> int:
    if not 0 <= alpha < system.space_dim:
        raise ConfigError(f"flux direction {alpha} out of range for d={system.space_dim}")
    return alpha


def clamp_density(
    v: np.ndarray,
    rho_min: float,
    strict: bool,
    name: str
) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    守恒密度的真空钳制 (供 Euler 型系统的 invert 使用)

    Returns:
        (钳制后密度, 是否钳制的掩码, 钳制次数)
    """
    rho = v[..., 0]
    low = rho < rho_min
    count = int(np.count_nonzero(low))
    if count and strict:
        raise VacuumError(f"{name}: {count} cell(s) below rho_min={rho_min:g}")
    return np.where(low, rho_min, rho), low, count
