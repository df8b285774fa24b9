"""
EntroFlux 浅水磁流体模块

变量 u = (h, √h v, √h b), v, b ∈ ℝ², 空间维数 d ∈ {1, 2}
熵 η = ½|w|² + ½|z|² + ½ g h²; 约束 div(hb) = 0 以 (H2') 形式携带
"""

import numpy as np

from config import config
from utils.errors import ConfigError

from .base import ConstraintSpec, StateDomain, SystemSpec
from .euler import (
    sqrt_density_A,
    sqrt_density_grad_A,
    sqrt_density_hess_A,
    sqrt_density_invert,
)

N_STATE = 5


def _split(u):
    return u[..., 0], u[..., 1:3], u[..., 3:5]


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def make_swmhd(
    d: int = 1,
    g: float = 9.81,
    rho_min: float = None,
    strict_vacuum: bool = None
) -> SystemSpec:
    """
    构造浅水 MHD 系统

    Args:
        d: 空间维数 (1 或 2; 速度与磁场始终为二维)
        g: 重力加速度
        rho_min: 水深钳制阈值
        strict_vacuum: 干底时是否报错

    Returns:
        SystemSpec (带 ConstraintSpec, 指定场为 hb)
    """
    if d not in (1, 2):
        raise ConfigError(f"swmhd supports d in {{1, 2}}, got {d}")
    if g <= 0:
        raise ConfigError(f"gravity must be positive, got {g}")
    rho_min = config.RHO_MIN if rho_min is None else rho_min
    strict = config.STRICT_VACUUM if strict_vacuum is None else strict_vacuum
    eye2 = np.eye(2)

    def eta(u):
        h, w, z = _split(u)
        return 0.5 * _dot(w, w) + 0.5 * _dot(z, z) + 0.5 * g * h ** 2

    def grad_eta(u):
        return np.concatenate([g * u[..., :1], u[..., 1:]], axis=-1)

    def hess_eta(u):
        hess = np.zeros(u.shape + (N_STATE,))
        hess[..., 0, 0] = g
        hess[..., 1:, 1:] = np.eye(4)
        return hess

    def G(u):
        h, w, z = _split(u)
        first = g * h - (_dot(w, w) + _dot(z, z)) / (2.0 * h)
        return np.concatenate([first[..., None], u[..., 1:] / np.sqrt(h)[..., None]], axis=-1)

    def grad_G(u):
        h, w, z = _split(u)
        jac = np.zeros(u.shape + (N_STATE,))
        jac[..., 0, 0] = g + (_dot(w, w) + _dot(z, z)) / (2.0 * h ** 2)
        jac[..., 0, 1:] = -u[..., 1:] / h[..., None]
        jac[..., 1:, 0] = -u[..., 1:] / (2.0 * h[..., None] ** 1.5)
        jac[..., 1:, 1:] = np.eye(4) / np.sqrt(h)[..., None, None]
        return jac

    def make_flux(alpha: int):
        e = eye2[alpha]

        def F(u):
            h, w, z = _split(u)
            w_a = w[..., alpha:alpha + 1]
            z_a = z[..., alpha:alpha + 1]
            mass = np.sqrt(h)[..., None] * w_a
            momentum = w * w_a - z * z_a + 0.5 * g * (h ** 2)[..., None] * e
            induction = z * w_a - w * z_a
            return np.concatenate([mass, momentum, induction], axis=-1)

        def grad_F(u):
            h, w, z = _split(u)
            w_a = w[..., alpha]
            z_a = z[..., alpha]
            root = np.sqrt(h)
            outer_w = w[..., :, None] * e
            outer_z = z[..., :, None] * e
            jac = np.zeros(u.shape + (N_STATE,))
            jac[..., 0, 0] = w_a / (2.0 * root)
            jac[..., 0, 1 + alpha] = root
            jac[..., 1:3, 0] = (g * h)[..., None] * e
            jac[..., 1:3, 1:3] = w_a[..., None, None] * eye2 + outer_w
            jac[..., 1:3, 3:5] = -(z_a[..., None, None] * eye2 + outer_z)
            jac[..., 3:5, 1:3] = outer_z - z_a[..., None, None] * eye2
            jac[..., 3:5, 3:5] = w_a[..., None, None] * eye2 - outer_w
            return jac

        def q(u):
            h, w, z = _split(u)
            S = 0.5 * _dot(w, w) + 0.5 * _dot(z, z) + g * h ** 2
            return (S * w[..., alpha] - _dot(w, z) * z[..., alpha]) / np.sqrt(h)

        def grad_q(u):
            h, w, z = _split(u)
            w_a = w[..., alpha]
            z_a = z[..., alpha]
            root = np.sqrt(h)
            wz = _dot(w, z)
            S = 0.5 * _dot(w, w) + 0.5 * _dot(z, z) + g * h ** 2
            d_h = 2.0 * g * root * w_a - S * w_a / (2.0 * h ** 1.5) + wz * z_a / (2.0 * h ** 1.5)
            d_w = (w_a[..., None] * w + S[..., None] * e - z_a[..., None] * z) / root[..., None]
            d_z = (w_a[..., None] * z - z_a[..., None] * w - wz[..., None] * e) / root[..., None]
            return np.concatenate([d_h[..., None], d_w, d_z], axis=-1)

        def Lbar(u):
            h, w, z = _split(u)
            wz = _dot(w, z)
            out = np.zeros(u.shape)
            out[..., 0] = -wz * z[..., alpha] / (2.0 * h ** 1.5)
            out[..., 3:5] = -(wz / np.sqrt(h))[..., None] * e
            return out

        def wave_speed(u):
            h, w, z = _split(u)
            root = np.sqrt(h)
            velocity = w[..., alpha] / root
            field = z / root[..., None]
            return np.abs(velocity) + np.sqrt(g * h + _dot(field, field))

        return F, grad_F, q, grad_q, Lbar, wave_speed

    fluxes = [make_flux(a) for a in range(d)]

    def extract(field_u):
        hb = np.sqrt(field_u[..., :1]) * field_u[..., 3:5]
        return (hb,)

    def rebuild(field_u, parts):
        out = np.array(field_u, dtype=float, copy=True)
        out[..., 3:5] = parts[0] / np.sqrt(field_u[..., :1])
        return out

    constraint = ConstraintSpec(
        L_description="gradient of the multiplier enforcing div(hb) = 0 enters the induction rows",
        designated=("hb",),
        Lbar=tuple(f[4] for f in fluxes),
        extract=extract,
        rebuild=rebuild,
        space_dim=d,
    )

    return SystemSpec(
        name="swmhd",
        state_dim=N_STATE,
        space_dim=d,
        domain=StateDomain(state_dim=N_STATE, lower={0: 0.0}),
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
        scaling_exponents=(1.0, 1.0, 1.0, 1.0, 1.0),
        invert=lambda v, strict_mode: sqrt_density_invert(v, rho_min, strict_mode, "swmhd"),
        constraint=constraint,
        wave_speed=lambda u, alpha: fluxes[alpha][5](u),
        params={"g": g, "rho_min": rho_min, "strict_vacuum": strict},
    )
