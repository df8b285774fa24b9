"""
EntroFlux 唯一性探针模块

同一光滑初值下, 沿分辨率阶梯比较粗网格近似与细网格参考解:
终端相对熵、Young 测度方差与集中项应随 h 一起趋于 0;
初值失配的对照组则应保持远离 0
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Sequence

import numpy as np

from config import config
from solver.grid import TorusGrid
from solver.initial import InitialSpec
from solver.reference import reference_solution
from solver.trajectory import run
from systems.base import SystemSpec
from utils.errors import ConfigError, FitError
from utils.helpers import is_nonincreasing, measured_rate, safe_divide

from .series import GronwallFit, GronwallSeries, default_cap, fit_gronwall, relent_trajectory

logger = logging.getLogger(__name__)

METRICS = ("terminal_H", "variance", "concentration")


def mismatched_spec(spec: InitialSpec, mismatch: float) -> InitialSpec:
    """
    对照组初值: 光滑数据的振幅放大 (1 + mismatch) 倍, 其余类型平移均值

    Raises:
        ConfigError: 初值类型无法构造失配版本
    """
    params = dict(spec.params)
    if spec.kind == "smooth-periodic":
        amplitude = np.asarray(params["amplitude"], dtype=float)
        if np.all(amplitude == 0.0):
            params["mean"] = (np.asarray(params["mean"], dtype=float) * (1.0 + mismatch)).tolist()
        else:
            params["amplitude"] = (amplitude * (1.0 + mismatch)).tolist()
    elif spec.kind == "constant":
        params["state"] = (np.asarray(params["state"], dtype=float) * (1.0 + mismatch)).tolist()
    else:
        raise ConfigError(f"no mismatched control for initial data kind '{spec.kind}'")
    return InitialSpec(spec.kind, params)


def _ladder_metrics(series: GronwallSeries) -> Dict:
    return {
        "N": series.N,
        "terminal_H": series.terminal,
        "H0": float(series.values[0]),
        "variance": float(series.variance[-1]),
        "mean_deviation": float(series.mean_deviation[-1]),
        "concentration": float(series.concentration[-1]),
        "concentration_margin": float(np.min(series.concentration_margin)),
        "nonnegative": series.nonnegative,
    }


def _decay(hs: Sequence[float], values: Sequence[float]) -> Dict:
    """单个指标沿阶梯的衰减判定; 全为零视为通过"""
    values = [max(v, 0.0) for v in values]
    if max(values) <= config.ZERO_TOL:
        return {"rate": None, "monotone": True, "passed": True}
    rate = measured_rate(hs, values)
    monotone = is_nonincreasing(values)
    passed = monotone and rate is not None and rate >= config.MIN_RATE
    return {"rate": rate, "monotone": monotone, "passed": passed}


def uniqueness_probe(
    system: SystemSpec,
    spec: InitialSpec,
    N_ladder: Sequence[int],
    T: float,
    N_ref: Optional[int] = None,
    scheme: str = "lax-friedrichs",
    coarsening: Optional[int] = None,
    snapshot_dt: Optional[float] = None,
    control: bool = True,
    data_mismatch: float = 0.0,
    max_workers: Optional[int] = None
) -> Dict:
    """
    沿 N_ladder 的唯一性细化研究

    Args:
        system: 带求解器的系统
        spec: 光滑初值
        N_ladder: 递增的粗网格分辨率 (均整除 N_ref)
        T: 终止时间 (激波之前)
        N_ref: 参考网格; None 时用配置值
        scheme: 数值格式
        coarsening: Young 测度加粗比
        snapshot_dt: 快照间隔; None 时取 T / PROBE_SNAPSHOTS
        control: 是否运行初值失配的对照组
        data_mismatch: 大于 0 时阶梯上的粗网格运行本身使用失配初值 (参考解不变)
        max_workers: 阶梯并发数

    Returns:
        报告 dict, 含 "ladder" (逐 N 指标), "decay" (逐指标速率与单调性),
        "refinement_factor", "control", "verdict" 以及 "series" ({N: GronwallSeries})

    Raises:
        ShockError: 参考解梯度监测触发
        ConfigError: 阶梯非递增
    """
    ladder = [int(N) for N in N_ladder]
    if len(ladder) < 2 or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError(f"N_ladder must be strictly increasing with at least two entries, got {ladder}")
    N_ref = config.PROBE_N_REF if N_ref is None else int(N_ref)
    if snapshot_dt is None:
        snapshot_dt = T / config.PROBE_SNAPSHOTS
    workers = max(1, config.MAX_WORKERS if max_workers is None else max_workers)
    d = system.space_dim
    ref_grid = TorusGrid(d=d, N=N_ref, T=T, snapshot_dt=snapshot_dt)
    reference = reference_solution(system, ref_grid, spec, scheme=scheme)

    def study(N: int, data: InitialSpec) -> GronwallSeries:
        coarse = run(system, ref_grid.refined(N), data, scheme=scheme)
        series = relent_trajectory(coarse, reference, system, coarsening=coarsening)
        try:
            fit_gronwall(series)
        except FitError as exc:
            logger.warning("%s", exc)
            series.fit = GronwallFit(C=np.nan, c=np.nan, c_cap=default_cap(series), delta=np.nan, verdict=False)
        return series

    with ThreadPoolExecutor(max_workers=workers) as pool:
        coarse_spec = mismatched_spec(spec, data_mismatch) if data_mismatch > 0 else spec
        futures = {N: pool.submit(study, N, coarse_spec) for N in ladder}
        series = {N: futures[N].result() for N in ladder}

    rows = [_ladder_metrics(series[N]) for N in ladder]
    hs = [1.0 / N for N in ladder]
    decay = {metric: _decay(hs, [row[metric] for row in rows]) for metric in METRICS}
    terminal = [row["terminal_H"] for row in rows]
    factors = [a / b if b > 0 else np.inf for a, b in zip(terminal, terminal[1:]) if a > config.ZERO_TOL]
    refinement = float(min(factors)) if factors else None
    refinement_ok = refinement is None or refinement >= config.REFINEMENT_FACTOR

    report = {
        "system": system.name,
        "N_ladder": ladder,
        "N_ref": N_ref,
        "T": T,
        "snapshot_dt": snapshot_dt,
        "gradient_bound": reference.gradient_bound,
        "ladder": rows,
        "fits": {N: series[N].fit.to_dict() for N in ladder},
        "decay": decay,
        "refinement_factor": refinement,
        "refinement_ok": refinement_ok,
        "control": None,
        "data_mismatch": data_mismatch,
    }

    passed = all(item["passed"] for item in decay.values()) and refinement_ok
    passed = passed and all(row["concentration_margin"] >= -1e-8 for row in rows)
    passed = passed and all(series[N].fit.verdict for N in ladder)
    if control:
        mismatched = study(ladder[-1], mismatched_spec(spec, config.CONTROL_MISMATCH))
        finest = terminal[-1]
        separation = safe_divide(mismatched.terminal, finest, default=np.inf)
        report["control"] = {
            "N": ladder[-1],
            "mismatch": config.CONTROL_MISMATCH,
            "terminal_H": mismatched.terminal,
            "separation": float(separation),
            "passed": bool(separation >= config.CONTROL_SEPARATION),
        }
        passed = passed and report["control"]["passed"]
    report["verdict"] = bool(passed)
    report["series"] = series
    logger.info("%s uniqueness probe over %s: verdict=%s", system.name, ladder, report["verdict"])
    return report
