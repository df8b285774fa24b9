"""
EntroFlux 工具函数模块

提供数值通用工具: 安全除法、收敛阶拟合、格式化输出
"""

from typing import Iterable, Optional, Sequence

import numpy as np


def safe_divide(numerator, denominator, default: float = 0.0):
    """
    安全除法 (支持数组)

    Args:
        numerator: 分子
        denominator: 分母
        default: 分母为零时的默认值

    Returns:
        除法结果; 分母为零处取默认值

    Example:
        >>> safe_divide(1.0, 0.0)
        0.0
        >>> safe_divide(np.array([1.0, 2.0]), np.array([2.0, 0.0]), default=-1.0)
        array([ 0.5, -1. ])
    """
    num = np.asarray(numerator, dtype=float)
    den = np.asarray(denominator, dtype=float)
    out = np.full(np.broadcast(num, den).shape, float(default))
    np.divide(num, den, out=out, where=den != 0)
    if out.ndim == 0:
        return float(out)
    return out


def measured_rate(
    h_values: Sequence[float],
    errors: Sequence[float],
    floor: float = 1e-300
) -> Optional[float]:
    """
    最小二乘拟合 log(error) 对 log(h) 的斜率

    Args:
        h_values: 网格尺寸
        errors: 对应误差 (非负)
        floor: 低于该值的误差视为零

    Returns:
        收敛阶; 全部误差为零时返回 None
    """
    h = np.asarray(h_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = e > floor
    if keep.sum() < 2:
        return None
    slope, _ = np.polyfit(np.log(h[keep]), np.log(e[keep]), 1)
    return float(slope)


def is_nonincreasing(values: Iterable[float], atol: float = 0.0) -> bool:
    """序列是否单调不增 (允许 atol 的抖动)"""
    arr = np.asarray(list(values), dtype=float)
    if arr.size < 2:
        return True
    return bool(np.all(np.diff(arr) <= atol))


def format_scientific(value: float, digits: int = 3) -> str:
    """
    科学计数法格式化

    Example:
        >>> format_scientific(0.000123456)
        '1.235e-04'
    """
    if value is None:
        return "n/a"
    if not np.isfinite(value):
        return str(value)
    return f"{value:.{digits}e}"


def format_verdict(passed: bool) -> str:
    """格式化判定结果"""
    return "PASS" if passed else "FAIL"


def to_builtin(value):
    """
    将 numpy 标量/数组递归转为 JSON 可序列化的内置类型

    非有限浮点数转为字符串 ("inf", "nan"), 以保证 JSON 输出合法
    """
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if not np.isfinite(value):
            return str(value)
        return value
    return value
