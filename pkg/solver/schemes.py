"""
EntroFlux 有限体积格式模块

周期网格上的守恒型一阶格式: Lax-Friedrichs (默认) 与 Rusanov
"""

import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from config import config
from systems.base import SystemSpec
from utils.errors import BlowupError, ConfigError

from .grid import TorusGrid
from .initial import ConservedField

logger = logging.getLogger(__name__)

FaceFlux = Callable[..., np.ndarray]


def lax_friedrichs_flux(
    F_left: np.ndarray,
    F_right: np.ndarray,
    v_left: np.ndarray,
    v_right: np.ndarray,
    speed_left: np.ndarray,
    speed_right: np.ndarray,
    h: float,
    dt: float,
    d: int
) -> np.ndarray:
    """
    经典 Lax-Friedrichs 界面通量, 粘性系数 h/(2d·dt), dt 取 CFL 步长

    以 CFL 步长推进时即为邻点平均 − dt/(2h)·中心通量差;
    落点用的短步沿用同一粘性
    """
    return 0.5 * (F_left + F_right) - (h / (2.0 * d * dt)) * (v_right - v_left)


def rusanov_flux(
    F_left: np.ndarray,
    F_right: np.ndarray,
    v_left: np.ndarray,
    v_right: np.ndarray,
    speed_left: np.ndarray,
    speed_right: np.ndarray,
    h: float,
    dt: float,
    d: int
) -> np.ndarray:
    """Rusanov (局部 Lax-Friedrichs) 界面通量, 取两侧波速的最大值"""
    s_max = np.maximum(speed_left, speed_right)[..., None]
    return 0.5 * (F_left + F_right) - 0.5 * s_max * (v_right - v_left)


SCHEMES: Dict[str, FaceFlux] = {
    "lax-friedrichs": lax_friedrichs_flux,
    "rusanov": rusanov_flux,
}


def get_scheme(name: str) -> FaceFlux:
    if name not in SCHEMES:
        raise ConfigError(f"unknown scheme '{name}' (known: {', '.join(SCHEMES)})")
    return SCHEMES[name]


def max_wave_speed(system: SystemSpec, u: np.ndarray) -> float:
    """所有方向上单元波速上界的最大值"""
    return float(max(np.max(system.wave_speed(u, a)) for a in range(system.space_dim)))


def stable_dt(system: SystemSpec, field: ConservedField, grid: TorusGrid) -> float:
    """
    dt = CFL·h / (d · 1.2 · max 波速)

    Raises:
        BlowupError: 波速非有限
    """
    speed = max_wave_speed(system, field.u)
    if not np.isfinite(speed):
        raise BlowupError(f"{system.name}: non-finite wave speed at t={field.t:g}")
    speed = max(speed, np.finfo(float).tiny)
    return grid.cfl * grid.h / (grid.d * config.WAVE_SPEED_SAFETY * speed)


def face_fluxes(
    system: SystemSpec,
    field: ConservedField,
    grid: TorusGrid,
    dt: float,
    scheme: str = "lax-friedrichs"
) -> Tuple[np.ndarray, ...]:
    """
    每个方向 α 上界面 i+½ 的数值通量 (与单元 i 同索引)

    Returns:
        长度 d 的元组, 每项形状 (N,)*d + (n,)
    """
    numerical_flux = get_scheme(scheme)
    faces = []
    for a in range(grid.d):
        F = system.F[a](field.u)
        speed = system.wave_speed(field.u, a)
        faces.append(numerical_flux(
            F,
            np.roll(F, -1, axis=a),
            field.v,
            np.roll(field.v, -1, axis=a),
            speed,
            np.roll(speed, -1, axis=a),
            grid.h,
            dt,
            grid.d,
        ))
    return tuple(faces)


def step(
    system: SystemSpec,
    field: ConservedField,
    grid: TorusGrid,
    scheme: str = "lax-friedrichs",
    dt: Optional[float] = None,
    ceiling: Optional[float] = None
) -> ConservedField:
    """
    一步守恒更新 v ← v − dt/h Σ_α (F̂_{i+½} − F̂_{i−½})

    Args:
        system: 带求解器的系统
        field: 当前守恒场
        grid: 网格
        scheme: "lax-friedrichs" 或 "rusanov"
        dt: 时间步长; None 时取 CFL 步长
        ceiling: |v| 上限, 超过即判定爆破

    Returns:
        新的 ConservedField (时间前进 dt)

    Raises:
        BlowupError: |v| 超过上限或出现非有限值
        VacuumError: 严格真空模式下密度低于 ρ_min
    """
    ceiling = config.BLOWUP_CEILING if ceiling is None else ceiling
    dt_cfl = stable_dt(system, field, grid)
    dt = dt_cfl if dt is None else dt
    v = field.v.copy()
    for a, face in enumerate(face_fluxes(system, field, grid, dt_cfl, scheme)):
        v -= (dt / grid.h) * (face - np.roll(face, 1, axis=a))

    peak = float(np.max(np.abs(v)))
    if not np.isfinite(peak) or peak > ceiling:
        raise BlowupError(f"{system.name}: |v| = {peak:.3e} exceeds {ceiling:.1e} at t={field.t + dt:g}")
    u, clamps = system.invert(v, bool(system.params.get("strict_vacuum", False)))
    if clamps:
        logger.info("%s: clamped %d vacuum cell(s) at t=%g", system.name, clamps, field.t + dt)
    return ConservedField(v=v, u=u, t=field.t + dt, clamps=field.clamps + clamps)


def entropy_production(
    system: SystemSpec,
    before: ConservedField,
    after: ConservedField,
    grid: TorusGrid
) -> Dict[str, float]:
    """
    离散熵产生 Q_n: 单元上 (η⁺ − η)/dt + Σ_α (q̂_{i+½} − q̂_{i−½})/h,
    q̂ 为中心平均; 其积分等于总熵的变化率

    Returns:
        {"total_entropy", "production", "residual_l1", "residual_max"}
    """
    dt = after.t - before.t
    eta_before = system.eta(before.u)
    eta_after = system.eta(after.u)
    residual = (eta_after - eta_before) / dt
    for a in range(grid.d):
        q = system.q[a](before.u)
        q_face = 0.5 * (q + np.roll(q, -1, axis=a))
        residual = residual + (q_face - np.roll(q_face, 1, axis=a)) / grid.h
    vol = grid.cell_volume
    return {
        "total_entropy": float(np.sum(eta_after) * vol),
        "production": float((np.sum(eta_after) - np.sum(eta_before)) * vol / dt),
        "residual_l1": float(np.sum(np.abs(residual)) * vol),
        "residual_max": float(np.max(np.abs(residual))),
    }
