"""
EntroFlux 逐点相对熵模块

η(u|U) = η(u) − η(U) − G(U)·(A(u) − A(U))
F_α(u|U) = F_α(u) − F_α(U) − ∇F_α(U) ∇A(U)⁻¹ (A(u) − A(U))
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import linalg

from config import config
from systems.base import SystemSpec, hessian_form
from utils.errors import SingularError
from utils.helpers import measured_rate


@dataclass
class RelativeQuantities:
    """
    逐点 (或测度平均) 相对量

    Attributes:
        eta_rel: η(u|U) 或 𝓗(ν, U)
        F_rel: 形状 (d, n) 的 F_α(u|U) 或 Z_α(ν, U)
    """
    eta_rel: float
    F_rel: np.ndarray

    def ratio(self) -> float:
        """max_α |F_α(u|U)| / η(u|U)"""
        if self.eta_rel <= 0.0:
            return 0.0
        return float(np.max(np.linalg.norm(self.F_rel, axis=-1)) / self.eta_rel)


def _prepare(system: SystemSpec, u, U):
    u = np.asarray(u, dtype=float)
    U = np.asarray(U, dtype=float)
    system.domain.require(u, closed=True, what="u")
    system.domain.require_interior(U, what="U")
    return u, U


def relative_entropy(system: SystemSpec, u, U) -> np.ndarray:
    """
    相对熵 η(u|U) (对 u, U 的前导轴广播)

    Args:
        system: 系统
        u: X̄ 中的状态
        U: X 内部状态

    Returns:
        标量或数组

    Example:
        >>> relative_entropy(get_system("euler"), [1.0, 0.0], [0.5, 0.0])
        0.25
    """
    u, U = _prepare(system, u, U)
    out = relative_entropy_unchecked(system, u, U)
    return float(out) if np.ndim(out) == 0 else out


def relative_entropy_unchecked(system: SystemSpec, u: np.ndarray, U: np.ndarray) -> np.ndarray:
    diff = system.A(u) - system.A(U)
    return system.eta(u) - system.eta(U) - np.sum(system.G(U) * diff, axis=-1)


def _check_conditioning(grad_A: np.ndarray) -> None:
    cond = np.linalg.cond(grad_A)
    if np.any(~np.isfinite(cond)) or np.max(cond) > config.SINGULAR_COND:
        raise SingularError(f"grad A(U) is numerically singular (cond={np.max(cond):.3e})")


def transfer_matrices(system: SystemSpec, U) -> np.ndarray:
    """
    M_α(U) = ∇F_α(U) ∇A(U)⁻¹, 以线性求解实现

    Args:
        U: 内部状态 (..., n)

    Returns:
        形状 (..., d, n, n)
    """
    U = np.asarray(U, dtype=float)
    grad_A = system.grad_A(U)
    _check_conditioning(grad_A)
    out = []
    for alpha in range(system.space_dim):
        grad_F = system.grad_F[alpha](U)
        # M ∇A = ∇F  ⇔  ∇Aᵀ Mᵀ = ∇Fᵀ
        if U.ndim == 1:
            lu = linalg.lu_factor(grad_A.T)
            m_t = linalg.lu_solve(lu, grad_F.T)
        else:
            m_t = np.linalg.solve(np.swapaxes(grad_A, -1, -2), np.swapaxes(grad_F, -1, -2))
        out.append(np.swapaxes(m_t, -1, -2))
    return np.stack(out, axis=-3)


def relative_flux(system: SystemSpec, alpha: int, u, U) -> np.ndarray:
    """
    相对通量 F_α(u|U)

    对单个 U 使用 LU 分解 (部分选主元), 批量 U 使用 numpy 批量求解;
    从不显式求逆

    Raises:
        SingularError: ∇A(U) 条件数超过 1e12

    Example:
        >>> relative_flux(get_system("euler"), 0, [1.0, 0.0], [0.5, 0.0])
        array([0.  , 0.25])
    """
    u, U = _prepare(system, u, U)
    grad_A = system.grad_A(U)
    _check_conditioning(grad_A)
    diff = system.A(u) - system.A(U)
    if U.ndim == 1:
        lu = linalg.lu_factor(grad_A)
        flat = diff.reshape(-1, system.state_dim)
        step = linalg.lu_solve(lu, flat.T).T.reshape(diff.shape)
    else:
        step = np.linalg.solve(grad_A, diff[..., None])[..., 0]
    correction = np.einsum("...ij,...j->...i", system.grad_F[alpha](U), step)
    return system.F[alpha](u) - system.F[alpha](U) - correction


def relative_flux_with(system: SystemSpec, transfer: np.ndarray, u: np.ndarray, U: np.ndarray) -> np.ndarray:
    """
    用预先计算的 M_α(U) 求全部方向的 F_α(u|U), 返回 (..., d, n)
    """
    diff = system.A(u) - system.A(U)
    fluxes = np.stack([system.F[a](u) - system.F[a](U) for a in range(system.space_dim)], axis=-2)
    return fluxes - np.einsum("...aij,...j->...ai", transfer, diff)


def relative_quantities(system: SystemSpec, u, U) -> RelativeQuantities:
    """单对 (u, U) 的全部相对量"""
    eta_rel = relative_entropy(system, u, U)
    F_rel = np.stack([relative_flux(system, a, u, U) for a in range(system.space_dim)])
    return RelativeQuantities(eta_rel=float(eta_rel), F_rel=F_rel)


def conserved_relative_entropy(system: SystemSpec, u, U, step: Optional[float] = None) -> float:
    """
    守恒变量下的相对熵 H(v|V), H = η∘A⁻¹, v = A(u), V = A(U)

    ∇H(V) 由中心差分给出; 结果应与 relative_entropy 在差分精度内一致
    """
    u, U = _prepare(system, u, U)
    step = config.FD_STEP if step is None else step

    def H(v):
        return float(system.eta(system.invert(np.asarray(v, dtype=float), False)[0]))

    v = system.A(u)
    V = system.A(U)
    grad_H = np.zeros_like(V)
    for j in range(V.size):
        e = np.zeros_like(V)
        e[j] = step * max(1.0, abs(V[j]))
        grad_H[j] = (H(V + e) - H(V - e)) / (2.0 * e[j])
    return H(v) - H(V) - float(grad_H @ (v - V))


def local_quadratic_probe(
    system: SystemSpec,
    U,
    w,
    eps_ladder: Sequence[float] = (1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3)
) -> Dict:
    """
    探测 η(U + εw | U) ≈ ½ ε² wᵀ M(U) w, M 为 hessian_form

    Returns:
        {"eps", "ratios" (η/ε²), "limit", "errors" (|ratio − limit|),
         "order" (η 关于 ε 的对数斜率), "error_order"}
    """
    U = np.asarray(U, dtype=float)
    w = np.asarray(w, dtype=float)
    eps = np.asarray(eps_ladder, dtype=float)
    M = hessian_form(system, U)
    limit = 0.5 * float(w @ M @ w)
    states = U[None, :] + eps[:, None] * w[None, :]
    values = relative_entropy(system, states, np.broadcast_to(U, states.shape))
    ratios = values / eps ** 2
    errors = np.abs(ratios - limit)
    order = measured_rate(eps, values)
    return {
        "eps": eps,
        "ratios": ratios,
        "limit": limit,
        "errors": errors,
        "order": order,
        "error_order": measured_rate(eps, errors),
    }
