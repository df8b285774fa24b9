"""
EntroFlux 不可压缩系统模块

四个带约束的系统 (H2'): 不可压 Euler, 不可压 MHD,
非齐次不可压 Euler, 非齐次不可压 MHD. 这些系统只做假设检验和
相对熵计算, 不提供求解器 (wave_speed 为 None)
"""

from typing import Tuple

import numpy as np

from config import config
from utils.errors import ConfigError

from .base import ConstraintSpec, StateDomain, SystemSpec, clamp_density
from .euler import (
    sqrt_density_A,
    sqrt_density_grad_A,
    sqrt_density_hess_A,
    sqrt_density_invert,
)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _identity_jacobian(n: int):
    def grad(u):
        return np.broadcast_to(np.eye(n), u.shape + (n,)).copy()
    return grad


def _zero_hessian(n: int):
    def hess(u):
        return np.zeros(u.shape + (n, n))
    return hess


def _identity_invert(v, strict) -> Tuple[np.ndarray, int]:
    return np.array(v, dtype=float, copy=True), 0


def _check_d(name: str, d: int) -> None:
    if d not in (2, 3):
        raise ConfigError(f"{name} supports d in {{2, 3}}, got {d}")


def make_inc_euler(d: int = 2) -> SystemSpec:
    """
    不可压 Euler: A = Id, F_α = v v_α, η = ½|v|², G = v, L̄_α = ½|v|² e_α

    Example:
        >>> make_inc_euler().G(np.array([1.0, 2.0]))
        array([1., 2.])
    """
    _check_d("inc-euler", d)
    eye = np.eye(d)

    def make_flux(alpha):
        e = eye[alpha]

        def F(u):
            return u * u[..., alpha:alpha + 1]

        def grad_F(u):
            return u[..., alpha, None, None] * eye + u[..., :, None] * e

        def q(u):
            return 0.5 * _dot(u, u) * u[..., alpha]

        def grad_q(u):
            return u[..., alpha, None] * u + 0.5 * _dot(u, u)[..., None] * e

        def Lbar(u):
            return 0.5 * _dot(u, u)[..., None] * e

        return F, grad_F, q, grad_q, Lbar

    fluxes = [make_flux(a) for a in range(d)]
    constraint = ConstraintSpec(
        L_description="pressure gradient on the velocity rows",
        designated=("v",),
        Lbar=tuple(f[4] for f in fluxes),
        extract=lambda field_u: (field_u,),
        rebuild=lambda field_u, parts: np.array(parts[0], dtype=float, copy=True),
        space_dim=d,
    )
    return SystemSpec(
        name="inc-euler",
        state_dim=d,
        space_dim=d,
        domain=StateDomain(state_dim=d),
        A=lambda u: np.array(u, dtype=float, copy=True),
        F=tuple(f[0] for f in fluxes),
        eta=lambda u: 0.5 * _dot(u, u),
        q=tuple(f[2] for f in fluxes),
        G=lambda u: np.array(u, dtype=float, copy=True),
        grad_A=_identity_jacobian(d),
        grad_F=tuple(f[1] for f in fluxes),
        grad_eta=lambda u: np.array(u, dtype=float, copy=True),
        grad_G=_identity_jacobian(d),
        grad_q=tuple(f[3] for f in fluxes),
        hess_A=_zero_hessian(d),
        hess_eta=_identity_jacobian(d),
        scaling_exponents=(1.0,) * d,
        invert=_identity_invert,
        constraint=constraint,
        params={},
    )


def make_inc_mhd(d: int = 2) -> SystemSpec:
    """
    不可压 MHD: u = (v, b), F_α = (v v_α − b b_α, b v_α − v b_α),
    L̄_α = (½(|v|² + |b|²) e_α, −(v·b) e_α)
    """
    _check_d("inc-mhd", d)
    n = 2 * d
    eye = np.eye(d)

    def split(u):
        return u[..., :d], u[..., d:]

    def make_flux(alpha):
        e = eye[alpha]

        def F(u):
            v, b = split(u)
            v_a, b_a = v[..., alpha:alpha + 1], b[..., alpha:alpha + 1]
            return np.concatenate([v * v_a - b * b_a, b * v_a - v * b_a], axis=-1)

        def grad_F(u):
            v, b = split(u)
            v_a = v[..., alpha, None, None]
            b_a = b[..., alpha, None, None]
            outer_v = v[..., :, None] * e
            outer_b = b[..., :, None] * e
            jac = np.zeros(u.shape + (n,))
            jac[..., :d, :d] = v_a * eye + outer_v
            jac[..., :d, d:] = -(b_a * eye + outer_b)
            jac[..., d:, :d] = outer_b - b_a * eye
            jac[..., d:, d:] = v_a * eye - outer_v
            return jac

        def q(u):
            v, b = split(u)
            return 0.5 * _dot(u, u) * v[..., alpha] - _dot(v, b) * b[..., alpha]

        def grad_q(u):
            v, b = split(u)
            v_a, b_a = v[..., alpha, None], b[..., alpha, None]
            vb = _dot(v, b)[..., None]
            d_v = v_a * v + 0.5 * _dot(u, u)[..., None] * e - b_a * b
            d_b = v_a * b - b_a * v - vb * e
            return np.concatenate([d_v, d_b], axis=-1)

        def Lbar(u):
            v, b = split(u)
            return np.concatenate([
                0.5 * _dot(u, u)[..., None] * e,
                -_dot(v, b)[..., None] * e,
            ], axis=-1)

        return F, grad_F, q, grad_q, Lbar

    fluxes = [make_flux(a) for a in range(d)]

    def rebuild(field_u, parts):
        return np.concatenate([parts[0], parts[1]], axis=-1)

    constraint = ConstraintSpec(
        L_description="pressure gradient on the velocity rows and magnetic multiplier on the field rows",
        designated=("v", "b"),
        Lbar=tuple(f[4] for f in fluxes),
        extract=lambda field_u: (field_u[..., :d], field_u[..., d:]),
        rebuild=rebuild,
        space_dim=d,
    )
    return SystemSpec(
        name="inc-mhd",
        state_dim=n,
        space_dim=d,
        domain=StateDomain(state_dim=n),
        A=lambda u: np.array(u, dtype=float, copy=True),
        F=tuple(f[0] for f in fluxes),
        eta=lambda u: 0.5 * _dot(u, u),
        q=tuple(f[2] for f in fluxes),
        G=lambda u: np.array(u, dtype=float, copy=True),
        grad_A=_identity_jacobian(n),
        grad_F=tuple(f[1] for f in fluxes),
        grad_eta=lambda u: np.array(u, dtype=float, copy=True),
        grad_G=_identity_jacobian(n),
        grad_q=tuple(f[3] for f in fluxes),
        hess_A=_zero_hessian(n),
        hess_eta=_identity_jacobian(n),
        scaling_exponents=(1.0,) * n,
        invert=_identity_invert,
        constraint=constraint,
        params={},
    )


def make_nonhom_inc_euler(d: int = 2, rho_min: float = None) -> SystemSpec:
    """
    非齐次不可压 Euler: u = (ρ, √ρ v), F_α = (√ρ w_α, w w_α),
    η = ½(|w|² + ρ²), 指定场 v = w/√ρ
    """
    _check_d("nonhom-inc-euler", d)
    n = 1 + d
    eye = np.eye(d)
    rho_min = config.RHO_MIN if rho_min is None else rho_min

    def eta(u):
        w = u[..., 1:]
        return 0.5 * (_dot(w, w) + u[..., 0] ** 2)

    def G(u):
        u1 = u[..., :1]
        w = u[..., 1:]
        first = u1 - _dot(w, w)[..., None] / (2.0 * u1)
        return np.concatenate([first, w / np.sqrt(u1)], axis=-1)

    def grad_G(u):
        u1 = u[..., 0]
        w = u[..., 1:]
        jac = np.zeros(u.shape + (n,))
        jac[..., 0, 0] = 1.0 + _dot(w, w) / (2.0 * u1 ** 2)
        jac[..., 0, 1:] = -w / u1[..., None]
        jac[..., 1:, 0] = -w / (2.0 * u1[..., None] ** 1.5)
        jac[..., 1:, 1:] = eye / np.sqrt(u1)[..., None, None]
        return jac

    def hess_eta(u):
        return np.broadcast_to(np.eye(n), u.shape + (n,)).copy()

    def make_flux(alpha):
        e = eye[alpha]

        def F(u):
            u1 = u[..., :1]
            w = u[..., 1:]
            w_a = w[..., alpha:alpha + 1]
            return np.concatenate([np.sqrt(u1) * w_a, w * w_a], axis=-1)

        def grad_F(u):
            u1 = u[..., 0]
            w = u[..., 1:]
            w_a = w[..., alpha]
            root = np.sqrt(u1)
            jac = np.zeros(u.shape + (n,))
            jac[..., 0, 0] = w_a / (2.0 * root)
            jac[..., 0, 1 + alpha] = root
            jac[..., 1:, 1:] = w_a[..., None, None] * eye + w[..., :, None] * e
            return jac

        def q(u):
            u1 = u[..., 0]
            w = u[..., 1:]
            return 0.5 * (u1 ** 2 + _dot(w, w)) * w[..., alpha] / np.sqrt(u1)

        def grad_q(u):
            u1 = u[..., 0]
            w = u[..., 1:]
            w_a = w[..., alpha]
            root = np.sqrt(u1)
            energy = u1 ** 2 + _dot(w, w)
            d_u1 = root * w_a - energy * w_a / (4.0 * u1 ** 1.5)
            d_w = (w_a / root)[..., None] * w + (0.5 * energy / root)[..., None] * e
            return np.concatenate([d_u1[..., None], d_w], axis=-1)

        def Lbar(u):
            u1 = u[..., 0]
            w = u[..., 1:]
            out = np.zeros(u.shape)
            out[..., 0] = -0.25 * np.sqrt(u1) * w[..., alpha]
            out[..., 1:] = (0.5 * u1 ** 1.5)[..., None] * e
            return out

        return F, grad_F, q, grad_q, Lbar

    fluxes = [make_flux(a) for a in range(d)]

    def extract(field_u):
        return (field_u[..., 1:] / np.sqrt(field_u[..., :1]),)

    def rebuild(field_u, parts):
        out = np.array(field_u, dtype=float, copy=True)
        out[..., 1:] = np.sqrt(field_u[..., :1]) * parts[0]
        return out

    constraint = ConstraintSpec(
        L_description="pressure gradient on the momentum rows",
        designated=("v",),
        Lbar=tuple(f[4] for f in fluxes),
        extract=extract,
        rebuild=rebuild,
        space_dim=d,
    )
    return SystemSpec(
        name="nonhom-inc-euler",
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
        grad_eta=lambda u: np.array(u, dtype=float, copy=True),
        grad_G=grad_G,
        grad_q=tuple(f[3] for f in fluxes),
        hess_A=sqrt_density_hess_A,
        hess_eta=hess_eta,
        scaling_exponents=(1.0,) * n,
        invert=lambda v, strict_mode: sqrt_density_invert(v, rho_min, strict_mode, "nonhom-inc-euler"),
        constraint=constraint,
        params={"rho_min": rho_min},
    )


def make_nonhom_inc_mhd(d: int = 2, rho_min: float = None) -> SystemSpec:
    """
    非齐次不可压 MHD: u = (ρ, v, b), A = (ρ, ρv, b),
    η = ½(ρ² + ρ|v|² + |b|²), G = (ρ − ½|v|², v, b)
    """
    _check_d("nonhom-inc-mhd", d)
    n = 1 + 2 * d
    eye = np.eye(d)
    rho_min = config.RHO_MIN if rho_min is None else rho_min
    W = slice(1, 1 + d)
    Z = slice(1 + d, n)

    def split(u):
        return u[..., 0], u[..., W], u[..., Z]

    def A(u):
        rho, w, z = split(u)
        return np.concatenate([rho[..., None], rho[..., None] * w, z], axis=-1)

    def grad_A(u):
        rho, w, z = split(u)
        jac = np.zeros(u.shape + (n,))
        jac[..., 0, 0] = 1.0
        jac[..., W, 0] = w
        jac[..., W, W] = rho[..., None, None] * eye
        jac[..., Z, Z] = eye
        return jac

    def hess_A(u):
        hess = np.zeros(u.shape + (n, n))
        for j in range(d):
            hess[..., 1 + j, 0, 1 + j] = 1.0
            hess[..., 1 + j, 1 + j, 0] = 1.0
        return hess

    def eta(u):
        rho, w, z = split(u)
        return 0.5 * (rho ** 2 + rho * _dot(w, w) + _dot(z, z))

    def grad_eta(u):
        rho, w, z = split(u)
        first = rho + 0.5 * _dot(w, w)
        return np.concatenate([first[..., None], rho[..., None] * w, z], axis=-1)

    def hess_eta(u):
        rho, w, _ = split(u)
        hess = np.zeros(u.shape + (n,))
        hess[..., 0, 0] = 1.0
        hess[..., 0, W] = w
        hess[..., W, 0] = w
        hess[..., W, W] = rho[..., None, None] * eye
        hess[..., Z, Z] = eye
        return hess

    def G(u):
        rho, w, z = split(u)
        first = rho - 0.5 * _dot(w, w)
        return np.concatenate([first[..., None], w, z], axis=-1)

    def grad_G(u):
        _, w, _ = split(u)
        jac = np.broadcast_to(np.eye(n), u.shape + (n,)).copy()
        jac[..., 0, W] = -w
        return jac

    def make_flux(alpha):
        e = eye[alpha]

        def F(u):
            rho, w, z = split(u)
            w_a = w[..., alpha:alpha + 1]
            z_a = z[..., alpha:alpha + 1]
            return np.concatenate([
                rho[..., None] * w_a,
                rho[..., None] * w * w_a - z * z_a,
                z * w_a - w * z_a,
            ], axis=-1)

        def grad_F(u):
            rho, w, z = split(u)
            w_a = w[..., alpha, None, None]
            z_a = z[..., alpha, None, None]
            outer_w = w[..., :, None] * e
            outer_z = z[..., :, None] * e
            jac = np.zeros(u.shape + (n,))
            jac[..., 0, 0] = w[..., alpha]
            jac[..., 0, W] = rho[..., None] * e
            jac[..., W, 0] = w * w[..., alpha, None]
            jac[..., W, W] = rho[..., None, None] * (w_a * eye + outer_w)
            jac[..., W, Z] = -(z_a * eye + outer_z)
            jac[..., Z, W] = outer_z - z_a * eye
            jac[..., Z, Z] = w_a * eye - outer_w
            return jac

        def q(u):
            _, w, z = split(u)
            return eta(u) * w[..., alpha] - _dot(w, z) * z[..., alpha]

        def grad_q(u):
            rho, w, z = split(u)
            w_a = w[..., alpha, None]
            z_a = z[..., alpha, None]
            energy = eta(u)[..., None]
            d_rho = (rho + 0.5 * _dot(w, w)) * w[..., alpha]
            d_w = rho[..., None] * w_a * w + energy * e - z_a * z
            d_z = w_a * z - z_a * w - _dot(w, z)[..., None] * e
            return np.concatenate([d_rho[..., None], d_w, d_z], axis=-1)

        def Lbar(u):
            rho, w, z = split(u)
            out = np.zeros(u.shape)
            out[..., W] = (0.5 * (rho ** 2 + _dot(z, z)))[..., None] * e
            out[..., Z] = -_dot(w, z)[..., None] * e
            return out

        return F, grad_F, q, grad_q, Lbar

    fluxes = [make_flux(a) for a in range(d)]

    def invert(v, strict):
        rho_c, _, clamps = clamp_density(v, rho_min, strict, "nonhom-inc-mhd")
        out = np.array(v, dtype=float, copy=True)
        out[..., 0] = rho_c
        out[..., W] = v[..., W] / rho_c[..., None]
        return out, clamps

    def rebuild(field_u, parts):
        out = np.array(field_u, dtype=float, copy=True)
        out[..., W] = parts[0]
        out[..., Z] = parts[1]
        return out

    constraint = ConstraintSpec(
        L_description="pressure gradient on the momentum rows and magnetic multiplier on the field rows",
        designated=("v", "b"),
        Lbar=tuple(f[4] for f in fluxes),
        extract=lambda field_u: (field_u[..., W], field_u[..., Z]),
        rebuild=rebuild,
        space_dim=d,
    )
    return SystemSpec(
        name="nonhom-inc-mhd",
        state_dim=n,
        space_dim=d,
        domain=StateDomain(state_dim=n, lower={0: 0.0}),
        A=A,
        F=tuple(f[0] for f in fluxes),
        eta=eta,
        q=tuple(f[2] for f in fluxes),
        G=G,
        grad_A=grad_A,
        grad_F=tuple(f[1] for f in fluxes),
        grad_eta=grad_eta,
        grad_G=grad_G,
        grad_q=tuple(f[3] for f in fluxes),
        hess_A=hess_A,
        hess_eta=hess_eta,
        scaling_exponents=(1.0,) + (0.5,) * d + (1.0,) * d,
        invert=invert,
        constraint=constraint,
        params={"rho_min": rho_min},
    )
