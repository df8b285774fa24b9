"""
EntroFlux 参考解模块

细网格上的光滑解替身: 初值跳跃检验 + 梯度监测, 并给出 W^{1,∞} 界
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config import config
from systems.base import SystemSpec
from systems.projection import centered_gradient
from utils.errors import ShockError

from .grid import TorusGrid
from .initial import ConservedField, InitialSpec, init_field
from .trajectory import Trajectory, run

logger = logging.getLogger(__name__)


@dataclass
class ReferenceSolution:
    """
    参考解与其离散梯度界

    Attributes:
        trajectory: 细网格轨迹
        gradient_bound: max(空间梯度界, 时间导数界)
        space_gradient: 全部步上 max |∇_h U|
        time_derivative: 全部步上 max |U^{n+1} − U^n| / dt
    """

    trajectory: Trajectory
    gradient_bound: float
    space_gradient: float
    time_derivative: float


def max_jump(u: np.ndarray, d: int) -> float:
    """相邻单元状态差的最大值 (周期)"""
    return float(max(np.max(np.abs(np.roll(u, -1, axis=a) - u)) for a in range(d)))


def max_space_gradient(u: np.ndarray, d: int) -> float:
    """中心差分梯度的最大范数"""
    return float(np.max(np.abs(centered_gradient(u, d))))


def reference_solution(
    system: SystemSpec,
    grid_fine: TorusGrid,
    spec: InitialSpec,
    scheme: str = "lax-friedrichs",
    jump_tol: Optional[float] = None,
    monitor_factor: Optional[float] = None
) -> ReferenceSolution:
    """
    在细网格上运行光滑初值, 梯度超过初值梯度的 monitor_factor 倍即中止

    Args:
        system: 带求解器的系统
        grid_fine: 细网格
        spec: 光滑初值
        scheme: 数值格式
        jump_tol: 初值相邻单元差的上限 (非 Lipschitz 数据的判据)
        monitor_factor: 梯度监测倍数

    Returns:
        ReferenceSolution

    Raises:
        ShockError: 初值含跳跃, 或梯度监测在 T 之前触发
    """
    jump_tol = config.JUMP_TOL if jump_tol is None else jump_tol
    factor = config.GRADIENT_MONITOR_FACTOR if monitor_factor is None else monitor_factor
    d = grid_fine.d

    initial = init_field(system, grid_fine, spec)
    jump = max_jump(initial.u, d)
    if jump > jump_tol:
        raise ShockError(
            f"{system.name}: initial data jump {jump:.3g} exceeds {jump_tol:g} on N={grid_fine.N} (not Lipschitz)"
        )
    start_gradient = max_space_gradient(initial.u, d)
    limit = factor * start_gradient
    bounds = {"space": start_gradient, "time": 0.0}

    def monitor(before: ConservedField, after: ConservedField) -> None:
        gradient = max_space_gradient(after.u, d)
        if gradient > limit:
            raise ShockError(
                f"{system.name}: gradient monitor tripped at t={after.t:.4g} "
                f"(|grad U| = {gradient:.3g} > {factor:g} x {start_gradient:.3g})"
            )
        bounds["space"] = max(bounds["space"], gradient)
        rate = float(np.max(np.abs(after.u - before.u))) / (after.t - before.t)
        bounds["time"] = max(bounds["time"], rate)

    trajectory = run(system, grid_fine, spec, scheme=scheme, on_step=monitor)
    bound = max(bounds["space"], bounds["time"])
    logger.info(
        "%s reference N=%d: |grad U| <= %.4g, |dU/dt| <= %.4g",
        system.name, grid_fine.N, bounds["space"], bounds["time"],
    )
    return ReferenceSolution(
        trajectory=trajectory,
        gradient_bound=bound,
        space_gradient=bounds["space"],
        time_derivative=bounds["time"],
    )
