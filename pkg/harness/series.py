"""
EntroFlux 相对熵时间序列模块

粗网格轨迹的经验 Young 测度对参考解的相对熵 𝓗(t), 加上集中项
Σ (m_η − m_A·G(U)), 以及 Gronwall 界 H(t) ≤ (H(0) + δ) e^{ct} 的拟合
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import pandas as pd

from config import config
from measures.concentration import partial_masses
from measures.young import empirical_young_measure
from relent.averaged import averaged_H_field
from solver.grid import coarse_average, coarsening_ratio
from solver.reference import ReferenceSolution, max_space_gradient
from solver.schemes import max_wave_speed
from solver.trajectory import Trajectory
from systems.base import SystemSpec
from utils.errors import FitError, GridError

logger = logging.getLogger(__name__)

NEGATIVE_TOL = 1e-10
SERIES_COLUMNS = ["t", "H", "relative_entropy", "concentration", "variance", "mean_deviation"]


@dataclass
class GronwallFit:
    """
    拟合结果: H(t) ≤ C·H(0)·e^{ct}

    H(0) = 0 时 C 记为 1, 界退化为 δ e^{ct}
    """

    C: float
    c: float
    c_cap: float
    delta: float
    verdict: bool

    def to_dict(self) -> dict:
        return {"C": self.C, "c": self.c, "c_cap": self.c_cap, "delta": self.delta, "verdict": self.verdict}


@dataclass
class GronwallSeries:
    """
    一次粗网格运行的相对熵序列

    Attributes:
        N: 粗网格分辨率
        times: 快照时间
        relative_entropy: Σ_cells 𝓗(ν_t, U(t))·h^d
        concentration: 截断水平上的 Σ (m_η^t − m_A^t·G(U))
        variance: Young 测度方差的环面积分
        mean_deviation: |⟨ν, id⟩ − U| 的环面积分
        concentration_margin: 每个时间上逐单元 m_η − m_A·G(U) 的最小值
        gradient_bound: 参考解 ‖∇U‖_∞
        wave_speed: 运行状态范围上的波速上界
    """

    N: int
    times: np.ndarray
    relative_entropy: np.ndarray
    concentration: np.ndarray
    variance: np.ndarray
    mean_deviation: np.ndarray
    concentration_margin: np.ndarray
    gradient_bound: float
    wave_speed: float
    fit: Optional[GronwallFit] = None

    @property
    def values(self) -> np.ndarray:
        return self.relative_entropy + self.concentration

    @property
    def terminal(self) -> float:
        return float(self.values[-1])

    @property
    def nonnegative(self) -> bool:
        return bool(np.all(self.values >= -NEGATIVE_TOL))

    def to_frame(self) -> pd.DataFrame:
        """(t, H, 分项) 表, 供 CSV 输出"""
        return pd.DataFrame({
            "t": self.times,
            "H": self.values,
            "relative_entropy": self.relative_entropy,
            "concentration": self.concentration,
            "variance": self.variance,
            "mean_deviation": self.mean_deviation,
        }, columns=SERIES_COLUMNS)


def relent_trajectory(
    coarse: Trajectory,
    reference: Union[ReferenceSolution, Trajectory],
    system: SystemSpec,
    coarsening: Optional[int] = None,
    k_level: Optional[float] = None
) -> GronwallSeries:
    """
    在粗轨迹的每个快照上组装 𝓗 与集中项

    Young 测度在 N/coarsening 网格上由粗轨迹分箱得到,
    参考解按块平均投影到同一网格再反演为状态

    Args:
        coarse: 粗网格轨迹
        reference: 参考解 (或细网格轨迹)
        system: 系统
        coarsening: 粗轨迹到 Young 测度网格的加粗比 (1 时 ν 为 Dirac)
        k_level: 集中项的截断水平

    Returns:
        GronwallSeries

    Raises:
        GridError: 参考解缺少粗轨迹的快照时间, 或网格不嵌套
    """
    coarsening = config.YOUNG_COARSENING if coarsening is None else int(coarsening)
    k_level = config.CONCENTRATION_LEVEL if k_level is None else k_level
    ref_traj = getattr(reference, "trajectory", reference)
    d = coarse.grid.d
    N = coarse.grid.N
    if coarsening < 1 or N % coarsening:
        raise GridError(f"coarsening {coarsening} does not divide N={N}")
    M = N // coarsening
    ref_ratio = coarsening_ratio(ref_traj.grid.N, M)
    n = system.state_dim

    if isinstance(reference, ReferenceSolution):
        gradient_bound = reference.gradient_bound
    else:
        gradient_bound = max(max_space_gradient(s.u, d) for s in ref_traj.snapshots)

    columns = {key: [] for key in ("H", "conc", "var", "dev", "margin")}
    speed = 0.0
    for snap in coarse.snapshots:
        try:
            ref_snap = ref_traj.at(snap.t)
        except KeyError as exc:
            raise GridError(f"reference has no snapshot aligned with t={snap.t:g}") from exc
        V = coarse_average(ref_snap.v, d, ref_ratio).reshape(-1, n)
        U, _ = system.invert(V, False)
        ym = empirical_young_measure(snap.u, M, d, provenance={"t": snap.t})
        vol = ym.cell_volume

        H_cells = averaged_H_field(system, ym.atoms, ym.weights, U)
        when = np.array([snap.t])
        edges = np.array([snap.t, snap.t])
        m_eta = partial_masses(when, system.eta(snap.u)[None, ..., None], d, M, [k_level], edges)[0, 0, :, 0]
        m_A = partial_masses(when, system.A(snap.u)[None], d, M, [k_level], edges)[0, 0]
        conc_cells = m_eta - np.sum(m_A * system.G(U), axis=-1)

        columns["H"].append(np.sum(H_cells) * vol)
        columns["conc"].append(np.sum(conc_cells))
        columns["var"].append(np.sum(ym.variance()) * vol)
        columns["dev"].append(np.sum(np.linalg.norm(ym.barycenter() - U, axis=-1)) * vol)
        columns["margin"].append(np.min(conc_cells))
        if system.has_solver:
            speed = max(speed, max_wave_speed(system, snap.u))

    series = GronwallSeries(
        N=N,
        times=coarse.times,
        relative_entropy=np.array(columns["H"]),
        concentration=np.array(columns["conc"]),
        variance=np.array(columns["var"]),
        mean_deviation=np.array(columns["dev"]),
        concentration_margin=np.array(columns["margin"]),
        gradient_bound=float(gradient_bound),
        wave_speed=float(speed),
    )
    if not series.nonnegative:
        logger.warning("%s N=%d: relative entropy dips to %.3e", system.name, N, float(np.min(series.values)))
    logger.info("%s N=%d: H(0)=%.3e, H(T)=%.3e", system.name, N, series.values[0], series.terminal)
    return series


def default_cap(series: GronwallSeries) -> float:
    """c_cap = 10·(1 + ‖∇U‖_∞ · max 波速)"""
    return 10.0 * (1.0 + series.gradient_bound * series.wave_speed)


def fit_gronwall(series: GronwallSeries, c_cap: Optional[float] = None) -> GronwallFit:
    """
    网格 [0, c_cap] 上使 H(t) ≤ (H(0) + δ) e^{ct} 对全部快照成立的最小 c

    δ = 1e-10 + 0.01·H(0)

    Args:
        series: relent_trajectory 的结果
        c_cap: 上限; None 时用 default_cap

    Returns:
        GronwallFit (同时写回 series.fit)

    Raises:
        FitError: 上限内无可行 c

    Example:
        >>> fit_gronwall(zero_series).c
        0.0
    """
    c_cap = default_cap(series) if c_cap is None else float(c_cap)
    values = series.values
    times = series.times - series.times[0]
    H0 = max(float(values[0]), 0.0)
    delta = config.FIT_DELTA_ABS + config.FIT_DELTA_REL * H0

    c_grid = np.linspace(0.0, c_cap, config.FIT_GRID_POINTS)
    bounds = (H0 + delta) * np.exp(np.outer(c_grid, times))
    feasible = np.all(values[None, :] <= bounds, axis=1)
    if not feasible.any():
        worst = float(np.max(values / (H0 + delta)))
        raise FitError(
            f"N={series.N}: no c <= {c_cap:.4g} bounds the series (max H/(H(0)+delta) = {worst:.3e})"
        )
    c = float(c_grid[int(np.argmax(feasible))])
    C = (H0 + delta) / H0 if H0 > 0.0 else 1.0
    fit = GronwallFit(C=C, c=c, c_cap=c_cap, delta=delta, verdict=True)
    series.fit = fit
    logger.info("N=%d: Gronwall fit c=%.4g (cap %.4g)", series.N, c, c_cap)
    return fit
