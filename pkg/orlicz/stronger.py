"""
EntroFlux "本质更强" 检验模块

数值探测 M₂(λv)/M₁(v) → 0 (对所有 λ > 0) 以及对偶趋势 M₁*(ξ)/M₂*(ξ) → 0
"""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from config import config
from utils.errors import ConfigError

from .conjugate import fenchel_conjugate
from .nfunctions import NFunction

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = (0.5, 1.0, 2.0, 5.0)
DEFAULT_XI = tuple(np.geomspace(1e2, 1e6, 9))


def _strictly_decreasing(row: np.ndarray) -> bool:
    return bool(np.all(np.diff(row) < 0.0))


def essentially_stronger_check(
    M1: NFunction,
    M2: NFunction,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDAS,
    v_grid: Optional[Sequence[float]] = None,
    xi_grid: Sequence[float] = DEFAULT_XI,
    shrink: Optional[float] = None
) -> Dict:
    """
    检查 M₁ 是否本质强于 M₂

    Args:
        M1, M2: N 函数
        lambda_grid: λ 取值
        v_grid: 递增的 v 网格 (默认 10¹..10¹²)
        xi_grid: 对偶检验的 ξ 网格
        shrink: 终值需不超过 shrink × 初值

    Returns:
        {"passed", "primal_passed", "dual_passed", "table", "dual_table"}
        table 为 DataFrame (行 λ, 列 v), dual_table 为 ξ 与 M₁*/M₂* 比值
    """
    shrink = config.STRONGER_SHRINK if shrink is None else shrink
    v = np.geomspace(1e1, 1e12, 12) if v_grid is None else np.asarray(v_grid, dtype=float)
    lambdas = np.asarray(lambda_grid, dtype=float)
    if np.any(np.diff(v) <= 0) or np.any(np.diff(np.asarray(xi_grid, dtype=float)) <= 0):
        raise ConfigError("v_grid and xi_grid must be strictly increasing")

    ratios = M2(lambdas[:, None] * v[None, :]) / M1(v)[None, :]
    table = pd.DataFrame(ratios, index=pd.Index(lambdas, name="lambda"), columns=v)
    row_ok = [
        _strictly_decreasing(row) and row[-1] <= shrink * row[0]
        for row in ratios
    ]
    primal_passed = bool(all(row_ok))

    xi = np.asarray(xi_grid, dtype=float)
    dual_ratio = fenchel_conjugate(M1, xi) / fenchel_conjugate(M2, xi)
    dual_table = pd.DataFrame({"xi": xi, "ratio": dual_ratio})
    dual_passed = _strictly_decreasing(dual_ratio)

    logger.info(
        "%s vs %s: primal %s, dual %s",
        M1.name, M2.name, primal_passed, dual_passed,
    )
    return {
        "passed": primal_passed and dual_passed,
        "primal_passed": primal_passed,
        "dual_passed": dual_passed,
        "rows_passed": dict(zip(lambdas.tolist(), row_ok)),
        "table": table,
        "dual_table": dual_table,
    }
