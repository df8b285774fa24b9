"""
EntroFlux 可压缩 Euler 模块

变量 u = (ρ, √ρ v) ∈ (0, ∞) × ℝᵈ, γ 律压强 p(ρ) = κ ρ^γ (γ ≥ 1)

熵 η = ½|w|² + P̃(ρ), 其中压力势 P 满足 ρP'' = p', 并加上常数使 min P̃ = 0
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import xlogy

from config import config
from utils.errors import ConfigError

from .base import StateDomain, SystemSpec, clamp_density


@dataclass(frozen=True)
class PressureLaw:
    """
    γ 律压强及其势函数

    Attributes:
        gamma: 绝热指数 (γ = 1 为等温律, P = κ ρ log ρ)
        kappa: 压强系数
    """

    gamma: float = 2.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.gamma < 1.0 or self.kappa <= 0.0:
            raise ConfigError(f"pressure law needs gamma >= 1 and kappa > 0, got {self.gamma}, {self.kappa}")

    @property
    def isothermal(self) -> bool:
        return self.gamma == 1.0

    def p(self, rho):
        return self.kappa * np.power(rho, self.gamma)

    def dp(self, rho):
        if self.isothermal:
            return self.kappa * np.ones_like(rho)
        return self.kappa * self.gamma * np.power(rho, self.gamma - 1.0)

    def P(self, rho):
        """未平移的压力势"""
        if self.isothermal:
            return self.kappa * xlogy(rho, rho)
        g = self.gamma
        return self.kappa * (np.power(rho, g) - rho) / (g - 1.0)

    def dP(self, rho):
        if self.isothermal:
            return self.kappa * (np.log(rho) + 1.0)
        g = self.gamma
        return self.kappa * (g * np.power(rho, g - 1.0) - 1.0) / (g - 1.0)

    def d2P(self, rho):
        return self.kappa * self.gamma * np.power(rho, self.gamma - 2.0)

    @property
    def minimizer(self) -> float:
        """P 的最小点 ρ* (P'(ρ*) = 0)"""
        if self.isothermal:
            return float(np.exp(-1.0))
        return float(self.gamma ** (-1.0 / (self.gamma - 1.0)))

    @property
    def offset(self) -> float:
        """使 min P̃ = 0 的常数; γ = 2 时为 ¼"""
        return float(-self.P(self.minimizer))

    def P_shifted(self, rho):
        return self.P(rho) + self.offset


def _unit(size: int, alpha: int) -> np.ndarray:
    e = np.zeros(size)
    e[alpha] = 1.0
    return e


# ---- √u₁ 缩放的 A(u) = (u₁, √u₁ x), Euler / SW-MHD / 非齐次 Euler 共用 ----

def sqrt_density_A(u: np.ndarray) -> np.ndarray:
    root = np.sqrt(u[..., :1])
    return np.concatenate([u[..., :1], root * u[..., 1:]], axis=-1)


def sqrt_density_grad_A(u: np.ndarray) -> np.ndarray:
    n = u.shape[-1]
    root = np.sqrt(u[..., 0])
    jac = np.zeros(u.shape + (n,))
    jac[..., 0, 0] = 1.0
    jac[..., 1:, 0] = u[..., 1:] / (2.0 * root[..., None])
    jac[..., 1:, 1:] = root[..., None, None] * np.eye(n - 1)
    return jac


def sqrt_density_hess_A(u: np.ndarray) -> np.ndarray:
    n = u.shape[-1]
    u1 = u[..., 0]
    hess = np.zeros(u.shape + (n, n))
    half_inv_root = 0.5 / np.sqrt(u1)
    for k in range(1, n):
        hess[..., k, 0, 0] = -u[..., k] / (4.0 * u1 ** 1.5)
        hess[..., k, 0, k] = half_inv_root
        hess[..., k, k, 0] = half_inv_root
    return hess


def sqrt_density_invert(v: np.ndarray, rho_min: float, strict: bool, name: str) -> Tuple[np.ndarray, int]:
    """
    反解 u = (v₁, v_rest/√v₁); 钳制单元的其余分量置零
    """
    rho, low, count = clamp_density(v, rho_min, strict, name)
    rest = v[..., 1:] / np.sqrt(rho)[..., None]
    rest = np.where(low[..., None], 0.0, rest)
    return np.concatenate([rho[..., None], rest], axis=-1), count


def make_euler(
    d: int = 1,
    gamma: float = 2.0,
    kappa: float = 1.0,
    rho_min: float = None,
    strict_vacuum: bool = None
) -> SystemSpec:
    """
    构造 d 维可压缩 Euler 系统

    Args:
        d: 空间维数
        gamma / kappa: 压强律参数
        rho_min: 真空钳制阈值
        strict_vacuum: 真空时是否报错

    Returns:
        SystemSpec

    Example:
        >>> sys = make_euler(d=1, gamma=2.0)
        >>> sys.G(np.array([1.0, 1.0]))
        array([0.5, 1. ])
    """
    if d < 1:
        raise ConfigError(f"euler needs d >= 1, got {d}")
    law = PressureLaw(gamma=gamma, kappa=kappa)
    rho_min = config.RHO_MIN if rho_min is None else rho_min
    strict = config.STRICT_VACUUM if strict_vacuum is None else strict_vacuum
    n = 1 + d

    def eta(u):
        w = u[..., 1:]
        return 0.5 * np.sum(w * w, axis=-1) + law.P_shifted(u[..., 0])

    def grad_eta(u):
        return np.concatenate([law.dP(u[..., :1]), u[..., 1:]], axis=-1)

    def hess_eta(u):
        hess = np.zeros(u.shape + (n,))
        hess[..., 0, 0] = law.d2P(u[..., 0])
        hess[..., 1:, 1:] = np.eye(d)
        return hess

    def G(u):
        u1 = u[..., :1]
        w = u[..., 1:]
        first = law.dP(u1) - np.sum(w * w, axis=-1, keepdims=True) / (2.0 * u1)
        return np.concatenate([first, w / np.sqrt(u1)], axis=-1)

    def grad_G(u):
        u1 = u[..., 0]
        w = u[..., 1:]
        jac = np.zeros(u.shape + (n,))
        jac[..., 0, 0] = law.d2P(u1) + np.sum(w * w, axis=-1) / (2.0 * u1 ** 2)
        jac[..., 0, 1:] = -w / u1[..., None]
        jac[..., 1:, 0] = -w / (2.0 * u1[..., None] ** 1.5)
        jac[..., 1:, 1:] = np.eye(d) / np.sqrt(u1)[..., None, None]
        return jac

    def make_flux(alpha: int):
        e = _unit(d, alpha)

        def F(u):
            u1 = u[..., :1]
            w = u[..., 1:]
            w_a = w[..., alpha:alpha + 1]
            momentum = w * w_a + law.p(u1) * e
            return np.concatenate([np.sqrt(u1) * w_a, momentum], axis=-1)

        def grad_F(u):
            u1 = u[..., 0]
            w = u[..., 1:]
            w_a = w[..., alpha]
            root = np.sqrt(u1)
            jac = np.zeros(u.shape + (n,))
            jac[..., 0, 0] = w_a / (2.0 * root)
            jac[..., 0, 1 + alpha] = root
            jac[..., 1:, 0] = law.dp(u1)[..., None] * e
            jac[..., 1:, 1:] = w_a[..., None, None] * np.eye(d) + w[..., :, None] * e
            return jac

        def q(u):
            u1 = u[..., 0]
            w = u[..., 1:]
            S = 0.5 * np.sum(w * w, axis=-1) + law.P(u1) + law.p(u1)
            return S * w[..., alpha] / np.sqrt(u1)

        def grad_q(u):
            u1 = u[..., 0]
            w = u[..., 1:]
            root = np.sqrt(u1)
            S = 0.5 * np.sum(w * w, axis=-1) + law.P(u1) + law.p(u1)
            phi = w[..., alpha] / root
            first = (law.dP(u1) + law.dp(u1)) * phi - S * w[..., alpha] / (2.0 * u1 ** 1.5)
            rest = phi[..., None] * w + (S / root)[..., None] * e
            return np.concatenate([first[..., None], rest], axis=-1)

        def wave_speed(u):
            rho = u[..., 0]
            velocity = u[..., 1 + alpha] / np.sqrt(rho)
            return np.abs(velocity) + np.sqrt(law.dp(rho))

        return F, grad_F, q, grad_q, wave_speed

    fluxes = [make_flux(a) for a in range(d)]

    return SystemSpec(
        name="euler",
        state_dim=n,
        space_dim=d,
        domain=StateDomain(state_dim=n, lower={0: 0.0}),
        A=sqrt_density_A,
        F=tuple(f[0] for f in fluxes),
        eta=eta,
        q=tuple(f[2] for f in fluxes),
        G=G,
        grad_A=sqrt_density_grad_A,
        grad_F=tuple(f[1] for f in fluxes),
        grad_eta=grad_eta,
        grad_G=grad_G,
        grad_q=tuple(f[3] for f in fluxes),
        hess_A=sqrt_density_hess_A,
        hess_eta=hess_eta,
        scaling_exponents=(2.0,) + (1.0,) * d,
        invert=lambda v, strict_mode: sqrt_density_invert(v, rho_min, strict_mode, "euler"),
        wave_speed=lambda u, alpha: fluxes[alpha][4](u),
        params={
            "gamma": gamma,
            "kappa": kappa,
            "rho_min": rho_min,
            "strict_vacuum": strict,
            "potential_offset": law.offset,
        },
    )
