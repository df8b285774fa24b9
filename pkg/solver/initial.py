"""
EntroFlux 初值模块

守恒场 ConservedField 与四类初值: constant / riemann / oscillatory / smooth-periodic
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict

import numpy as np

from systems.base import SystemSpec
from utils.errors import ConfigError

from .grid import TorusGrid

logger = logging.getLogger(__name__)

# 每个方向的 Gauss-Legendre 节点数 (光滑初值的单元平均)
QUADRATURE_POINTS = 3


@dataclass
class ConservedField:
    """
    单元守恒量 v = A(u) 与反演得到的状态 u

    Attributes:
        v: 守恒量, 形状 (N,)*d + (n,)
        u: 状态, 与 v 同形状
        t: 时间
        clamps: 累计真空钳制次数
    """

    v: np.ndarray
    u: np.ndarray
    t: float = 0.0
    clamps: int = 0

    def copy(self) -> "ConservedField":
        return ConservedField(v=self.v.copy(), u=self.u.copy(), t=self.t, clamps=self.clamps)


@dataclass
class InitialSpec:
    """
    初值描述

    Attributes:
        kind: constant | riemann | oscillatory | smooth-periodic
        params: 各类型的参数
            - constant: state
            - riemann: left, right, position (默认 0.5), axis (默认 0)
            - oscillatory: state_a, state_b, frequency (默认 1)
            - smooth-periodic: mean, amplitude, wavenumber (默认 1), phase (默认 0)
    """

    kind: str
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ConfigError(f"unknown initial data kind '{self.kind}' (known: {', '.join(INITIAL_KINDS)})")


def _state(system: SystemSpec, value, what: str) -> np.ndarray:
    state = np.asarray(value, dtype=float)
    if state.shape != (system.state_dim,):
        raise ConfigError(f"{what} needs {system.state_dim} components, got shape {state.shape}")
    system.domain.require(state, closed=True, what=what)
    return state


def _fill(grid: TorusGrid, state: np.ndarray) -> np.ndarray:
    return np.broadcast_to(state, grid.shape + state.shape).copy()


def _constant(system: SystemSpec, grid: TorusGrid, params: Dict) -> np.ndarray:
    return system.A(_fill(grid, _state(system, params["state"], "constant state")))


def _riemann(system: SystemSpec, grid: TorusGrid, params: Dict) -> np.ndarray:
    left = _state(system, params["left"], "left state")
    right = _state(system, params["right"], "right state")
    position = float(params.get("position", 0.5))
    axis = int(params.get("axis", 0))
    if not 0 <= axis < grid.d:
        raise ConfigError(f"riemann axis {axis} out of range for d={grid.d}")
    x = grid.centers()[axis]
    u = np.where((x < position)[..., None], left, right)
    return system.A(u)


def _oscillatory(system: SystemSpec, grid: TorusGrid, params: Dict) -> np.ndarray:
    state_a = _state(system, params["state_a"], "oscillation state a")
    state_b = _state(system, params["state_b"], "oscillation state b")
    frequency = int(params.get("frequency", 1))
    if frequency < 1:
        raise ConfigError(f"oscillation frequency must be >= 1, got {frequency}")
    # d = 2 时为棋盘格
    index = sum(np.indices(grid.shape)[k] // frequency for k in range(grid.d))
    u = np.where((index % 2 == 0)[..., None], state_a, state_b)
    return system.A(u)


def smooth_profile(system: SystemSpec, grid: TorusGrid, params: Dict) -> Callable[[np.ndarray], np.ndarray]:
    """
    光滑周期初值 u₀(x) = mean + amplitude·sin(2π k·x + phase)

    Returns:
        x (..., d) ↦ u₀(x) (..., n)
    """
    mean = np.asarray(params["mean"], dtype=float)
    amplitude = np.broadcast_to(np.asarray(params.get("amplitude", 0.0), dtype=float), mean.shape)
    k = np.atleast_1d(np.asarray(params.get("wavenumber", 1), dtype=float))
    k = np.broadcast_to(k, (grid.d,)) if k.size == 1 else k
    if k.shape != (grid.d,):
        raise ConfigError(f"wavenumber needs {grid.d} entries, got {k.size}")
    phase = float(params.get("phase", 0.0))

    def profile(x):
        arg = 2.0 * np.pi * np.tensordot(x, k, axes=1) + phase
        return mean + amplitude * np.sin(arg)[..., None]

    return profile


def _smooth_periodic(system: SystemSpec, grid: TorusGrid, params: Dict) -> np.ndarray:
    mean = _state(system, params["mean"], "mean state")
    amplitude = np.broadcast_to(np.abs(np.asarray(params.get("amplitude", 0.0), dtype=float)), mean.shape)
    # 三角函数取值于 [mean − |amp|, mean + |amp|]
    _state(system, mean - amplitude, "lowest smooth state")
    profile = smooth_profile(system, grid, params)

    nodes, weights = np.polynomial.legendre.leggauss(QUADRATURE_POINTS)
    offsets = 0.5 * grid.h * nodes
    centers = np.stack(grid.centers(), axis=-1)
    total = np.zeros(grid.shape + (system.state_dim,))
    for combo in np.ndindex(*([QUADRATURE_POINTS] * grid.d)):
        shift = np.array([offsets[i] for i in combo])
        weight = np.prod([0.5 * weights[i] for i in combo])
        total += weight * system.A(profile(centers + shift))
    return total


INITIAL_KINDS: Dict[str, Callable[[SystemSpec, TorusGrid, Dict], np.ndarray]] = {
    "constant": _constant,
    "riemann": _riemann,
    "oscillatory": _oscillatory,
    "smooth-periodic": _smooth_periodic,
}


def init_field(system: SystemSpec, grid: TorusGrid, spec: InitialSpec) -> ConservedField:
    """
    构造单元平均初值

    Args:
        system: 系统 (需带求解器)
        grid: 网格
        spec: 初值描述

    Returns:
        t = 0 的 ConservedField, 其 u 为 v 的反演

    Raises:
        DomainError: 指定状态不在 X̄ 中
        ConfigError: 参数缺失或系统无求解器

    Example:
        >>> grid = TorusGrid(d=1, N=8, T=0.1)
        >>> init_field(get_system("euler"), grid, InitialSpec("constant", {"state": [1.0, 0.0]})).v[0]
        array([1., 0.])
    """
    if not system.has_solver:
        raise ConfigError(f"system '{system.name}' has no finite-volume solver")
    if system.space_dim != grid.d:
        raise ConfigError(f"grid has d={grid.d}, system '{system.name}' has d={system.space_dim}")
    try:
        v = INITIAL_KINDS[spec.kind](system, grid, spec.params)
    except KeyError as exc:
        raise ConfigError(f"initial data '{spec.kind}' is missing parameter {exc}") from exc
    u, clamps = system.invert(v, bool(system.params.get("strict_vacuum", False)))
    if clamps:
        logger.info("%s: %d vacuum cell(s) clamped in initial data", system.name, clamps)
    logger.debug("%s: %s initial data on N=%d", system.name, spec.kind, grid.N)
    return ConservedField(v=v, u=u, t=0.0, clamps=clamps)
