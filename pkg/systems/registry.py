"""
EntroFlux 系统注册表模块

按字符串标识符注册全部内置系统及其默认采样盒
"""

import inspect
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from utils.errors import ValidationError

from .base import SystemSpec
from .euler import make_euler
from .incompressible import (
    make_inc_euler,
    make_inc_mhd,
    make_nonhom_inc_euler,
    make_nonhom_inc_mhd,
)
from .swmhd import make_swmhd

Box = Tuple[Tuple[float, float], ...]


@dataclass
class SystemEntry:
    """注册表条目"""
    builder: Callable[..., SystemSpec]
    description: str
    default_d: int
    first_interval: Tuple[float, float]
    rest_interval: Tuple[float, float]


SYSTEMS: Dict[str, SystemEntry] = {
    "euler": SystemEntry(make_euler, "可压缩 Euler (γ 律)", 1, (0.5, 2.0), (-2.0, 2.0)),
    "swmhd": SystemEntry(make_swmhd, "浅水 MHD", 1, (0.5, 2.0), (-1.0, 1.0)),
    "inc-euler": SystemEntry(make_inc_euler, "不可压 Euler", 2, (-2.0, 2.0), (-2.0, 2.0)),
    "inc-mhd": SystemEntry(make_inc_mhd, "不可压 MHD", 2, (-2.0, 2.0), (-2.0, 2.0)),
    "nonhom-inc-euler": SystemEntry(make_nonhom_inc_euler, "非齐次不可压 Euler", 2, (0.5, 2.0), (-2.0, 2.0)),
    "nonhom-inc-mhd": SystemEntry(make_nonhom_inc_mhd, "非齐次不可压 MHD", 2, (0.5, 2.0), (-2.0, 2.0)),
}


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def list_systems() -> List[str]:
    """已注册的系统标识符"""
    return list(SYSTEMS.keys())


def get_system(name: str, d: Optional[int] = None, **params) -> SystemSpec:
    """
    按标识符构造系统

    Args:
        name: 系统标识符
        d: 空间维数 (缺省取注册表默认值)
        **params: 构造参数 (gamma, kappa, g, rho_min, strict_vacuum)

    Returns:
        SystemSpec

    Raises:
        ValidationError: 未知标识符或不被该系统接受的参数
    """
    entry = SYSTEMS.get(name)
    if entry is None:
        raise ValidationError([f"unknown system '{name}'; registered: {', '.join(list_systems())}"])
    accepted = set(inspect.signature(entry.builder).parameters)
    unknown = sorted(set(params) - accepted)
    if unknown:
        raise ValidationError([f"system '{name}' does not accept parameter(s): {', '.join(unknown)}"])
    malformed = [
        f"system '{name}' parameter {key} must be "
        + ("true or false" if key == "strict_vacuum" else "numeric")
        + f", got {value!r}"
        for key, value in sorted(params.items())
        if not (isinstance(value, bool) if key == "strict_vacuum" else _is_number(value))
    ]
    if malformed:
        raise ValidationError(malformed)
    return entry.builder(d=entry.default_d if d is None else d, **params)


def default_box(system: SystemSpec) -> Box:
    """
    系统的默认紧采样盒 (严格位于 X 内部)

    Example:
        >>> default_box(get_system("euler"))
        ((0.5, 2.0), (-2.0, 2.0))
    """
    entry = SYSTEMS[system.name]
    return (entry.first_interval,) + (entry.rest_interval,) * (system.state_dim - 1)
