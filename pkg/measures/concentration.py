"""
EntroFlux 集中测度模块

截断上水平集积分 ∫_{cell ∩ {|f| ≥ k}} f, 先取最细 n 再沿 k 外推;
支持时间切片与逐单元的集中关系检验
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from systems.base import SystemSpec
from solver.grid import block_view, coarsening_ratio
from solver.trajectory import Trajectory
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

# (times, values): values 形状 (S_t,) + (N,)*d + (C,)
FieldSeries = Tuple[np.ndarray, np.ndarray]

RELATION_TOL = 1e-8


@dataclass
class ConcentrationField:
    """
    粗网格上的集中质量

    Attributes:
        quantity: 生成量标识 (eta, A, F0, ...)
        k_ladder: 递增截断水平
        coarse_N / d: 粗网格
        slab_edges: 时间切片边界 (S+1,)
        slab_masses: 最细 n 上的部分质量 (S, K, cells, C)
        ladder_totals: {N: (K, C)} 各分辨率的全域部分质量
        nonnegative: 生成量是否非负 (外推时截断到 ≥ 0)
    """

    quantity: str
    k_ladder: np.ndarray
    coarse_N: int
    d: int
    slab_edges: np.ndarray
    slab_masses: np.ndarray
    ladder_totals: Dict[int, np.ndarray] = field(default_factory=dict)
    nonnegative: bool = False

    @property
    def masses(self) -> np.ndarray:
        """时空总部分质量 (K, cells, C)"""
        return self.slab_masses.sum(axis=0)

    @property
    def extrapolated(self) -> np.ndarray:
        """沿 k 外推的质量 (cells, C)"""
        return extrapolate_in_k(self.masses, self.k_ladder, self.nonnegative)

    @property
    def slab_extrapolated(self) -> np.ndarray:
        """逐切片外推质量 (S, cells, C)"""
        return np.stack([extrapolate_in_k(m, self.k_ladder, self.nonnegative) for m in self.slab_masses])

    def total_extrapolated(self) -> np.ndarray:
        return self.extrapolated.sum(axis=0)

    def to_records(self) -> List[Dict]:
        """JSON 友好的 {cell, k, mass} 列表 (分量取最大范数)"""
        masses = self.masses
        records = []
        for ki, k in enumerate(self.k_ladder):
            for cell in range(masses.shape[1]):
                records.append({"cell": cell, "k": float(k), "mass": float(np.max(np.abs(masses[ki, cell])))})
        return records


def extrapolate_in_k(masses: np.ndarray, k_ladder: np.ndarray, nonnegative: bool = False) -> np.ndarray:
    """
    以 m(k) = L + c/k 模型由最后两个截断水平外推 L

    Args:
        masses: (K, ...) 部分质量
        k_ladder: (K,) 递增截断水平

    Returns:
        (...) 外推质量; 非负量截断到 ≥ 0
    """
    if masses.shape[0] == 1:
        out = masses[0].copy()
    else:
        k1, k2 = float(k_ladder[-2]), float(k_ladder[-1])
        r = k2 / k1
        out = (r * masses[-1] - masses[-2]) / (r - 1.0)
    return np.maximum(out, 0.0) if nonnegative else out


def _slab_weights(times: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """
    逐切片的梯形权重 (T, S)

    相邻快照之间的区间按与各切片的重叠长度拆分, 区间的两个端点各得重叠长度的一半;
    首尾切片向外延伸以覆盖边界外的快照. 单一时间点视为纯空间测度 (权重 1).
    """
    S = edges.size - 1
    w = np.zeros((times.size, S))
    if times.size == 1:
        idx = np.clip(np.searchsorted(edges, times, side="right") - 1, 0, S - 1)
        w[0, idx[0]] = 1.0
        return w
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    lo[0], hi[-1] = -np.inf, np.inf
    for j in range(times.size - 1):
        a, b = times[j], times[j + 1]
        overlap = np.clip(np.minimum(b, hi) - np.maximum(a, lo), 0.0, None)
        w[j] += 0.5 * overlap
        w[j + 1] += 0.5 * overlap
    return w


def partial_masses(
    times: np.ndarray,
    values: np.ndarray,
    d: int,
    coarse_N: int,
    k_ladder: Sequence[float],
    slab_edges: np.ndarray
) -> np.ndarray:
    """
    单个分辨率上的部分质量

    截断按分量进行: |g_c| ≥ k 的细单元计入 g_c (即 g⁺, g⁻ 分别截断)

    Returns:
        (S, K, cells, C)
    """
    times = np.asarray(times, dtype=float)
    N = values.shape[1]
    ratio = coarsening_ratio(N, coarse_N)
    C = values.shape[-1]
    S = slab_edges.size - 1
    weights = _slab_weights(times, slab_edges) * (1.0 / N) ** d
    out = np.zeros((S, len(k_ladder), coarse_N ** d, C))
    for j in range(times.size):
        snap = values[j]
        blocks = block_view(snap, d, ratio).reshape(coarse_N ** d, ratio ** d, C)
        for ki, k in enumerate(k_ladder):
            kept = np.where(np.abs(blocks) >= k, blocks, 0.0)
            out[:, ki] += weights[j][:, None, None] * kept.sum(axis=1)[None]
    return out


def quantity_series(trajectory: Trajectory, system: SystemSpec, quantity: str) -> FieldSeries:
    """
    轨迹 → (times, values) 时间序列

    Args:
        quantity: "eta" | "A" | "F<α>"
    """
    if quantity == "eta":
        fn = lambda u: system.eta(u)[..., None]  # noqa: E731
    elif quantity == "A":
        fn = system.A
    elif quantity.startswith("F") and quantity[1:].isdigit() and int(quantity[1:]) < system.space_dim:
        fn = system.F[int(quantity[1:])]
    else:
        raise ConfigError(f"unknown concentration quantity '{quantity}'")
    values = np.stack([fn(s.u) for s in trajectory.snapshots])
    return trajectory.times, values


def concentration_mass(
    family: Mapping[int, FieldSeries],
    k_ladder: Sequence[float],
    coarse_N: int,
    d: int,
    quantity: str = "f",
    slab_edges: Optional[Sequence[float]] = None,
    nonnegative: Optional[bool] = None
) -> ConcentrationField:
    """
    由生成序列估计集中测度

    Args:
        family: {N: (times, values)}, N 为序列指标
        k_ladder: 递增截断水平 (如 10, 10², 10³, 10⁴)
        coarse_N: 报告用粗网格
        d: 空间维数
        quantity: 生成量标识
        slab_edges: 时间切片边界; None 时整个时间区间为一片
        nonnegative: 生成量是否非负; None 时由最细序列的数据判断

    Returns:
        ConcentrationField (最细 n 的各水平部分质量及各 n 的全域总量)

    Raises:
        ConfigError: 序列只有一个成员或 k 阶梯非递增
    """
    if len(family) < 2:
        raise ConfigError("concentration needs a family with at least two members")
    ladder = np.asarray(k_ladder, dtype=float)
    if ladder.size < 1 or np.any(np.diff(ladder) <= 0):
        raise ConfigError("k_ladder must be strictly increasing")

    ordered = sorted(family)
    finest_times, finest_values = family[ordered[-1]]
    finest_times = np.asarray(finest_times, dtype=float)
    if slab_edges is None:
        edges = np.array([finest_times[0], finest_times[-1]])
    else:
        edges = np.asarray(slab_edges, dtype=float)
    if edges.size < 2 or np.any(np.diff(edges) < 0):
        raise ConfigError("slab edges must be nondecreasing with at least two entries")

    totals = {}
    slab_masses = None
    for N in ordered:
        times, values = family[N]
        masses = partial_masses(np.asarray(times, dtype=float), values, d, coarse_N, ladder, edges)
        totals[N] = masses.sum(axis=(0, 2))
        if N == ordered[-1]:
            slab_masses = masses

    if nonnegative is None:
        nonnegative = bool(np.all(np.asarray(finest_values) >= 0))
    conc = ConcentrationField(
        quantity=quantity,
        k_ladder=ladder,
        coarse_N=coarse_N,
        d=d,
        slab_edges=edges,
        slab_masses=slab_masses,
        ladder_totals=totals,
        nonnegative=nonnegative,
    )
    logger.info("concentration %s: extrapolated total %s", quantity, np.round(conc.total_extrapolated(), 12))
    return conc


def family_concentration(
    system: SystemSpec,
    family: Mapping[int, Trajectory],
    quantity: str,
    k_ladder: Sequence[float],
    coarse_N: int,
    slab_edges: Optional[Sequence[float]] = None
) -> ConcentrationField:
    """轨迹族上的集中测度 (quantity ∈ eta / A / F<α>)"""
    series = {N: quantity_series(traj, system, quantity) for N, traj in family.items()}
    return concentration_mass(
        series,
        k_ladder,
        coarse_N,
        system.space_dim,
        quantity=quantity,
        slab_edges=slab_edges,
        nonnegative=(quantity == "eta") or None,
    )


def time_slices(conc: ConcentrationField) -> List[ConcentrationField]:
    """按时间切片拆分; 各片质量之和等于总质量"""
    out = []
    for s in range(conc.slab_masses.shape[0]):
        out.append(ConcentrationField(
            quantity=conc.quantity,
            k_ladder=conc.k_ladder,
            coarse_N=conc.coarse_N,
            d=conc.d,
            slab_edges=conc.slab_edges[s:s + 2].copy(),
            slab_masses=conc.slab_masses[s:s + 1].copy(),
            ladder_totals={},
            nonnegative=conc.nonnegative,
        ))
    return out


def check_domination(m_g: np.ndarray, m_f: np.ndarray, C: float, tol: float = 1e-12) -> Dict:
    """
    |m_g| ≤ C·m_f 逐单元检验 (向量取最大范数)

    Returns:
        {"passed", "worst_ratio" (= |m_g| / (C·m_f) 的最大值), "max_violation"}
    """
    g = np.asarray(m_g, dtype=float)
    g = np.max(np.abs(g.reshape(g.shape[0], -1)), axis=1) if g.ndim > 1 else np.abs(g)
    f = np.asarray(m_f, dtype=float).reshape(g.shape[0], -1)[:, 0]
    bound = C * f
    violation = g - bound
    active = g > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(active, np.where(bound > 0, g / bound, np.inf), 0.0)
    return {
        "passed": bool(np.all(violation <= tol)),
        "worst_ratio": float(np.max(ratios)) if ratios.size else 0.0,
        "max_violation": float(np.max(violation)) if violation.size else 0.0,
    }


def concentration_relations(
    system: SystemSpec,
    m_eta: np.ndarray,
    m_A: np.ndarray,
    m_F: Sequence[np.ndarray],
    U: np.ndarray,
    C: float,
    tol: float = RELATION_TOL
) -> Dict:
    """
    逐单元检验 m_η − m_A·G(U) ≥ 0 与 |m_{F_α}| ≤ C (m_η − m_A·G(U))

    Args:
        m_eta: (cells,) 或 (cells, 1)
        m_A: (cells, n)
        m_F: 每个方向一项 (cells, n)
        U: 粗单元上的参考状态 (cells, n)
        C: (H5) 常数

    Returns:
        {"positive_holds", "positive_margin", "bound_holds", "bound_margin"}
    """
    eta = np.asarray(m_eta, dtype=float).reshape(-1)
    margin = eta - np.sum(np.asarray(m_A) * system.G(np.asarray(U, dtype=float)), axis=-1)
    worst_F = np.zeros_like(margin)
    for m in m_F:
        worst_F = np.maximum(worst_F, np.max(np.abs(np.asarray(m)), axis=-1))
    bound_margin = C * margin - worst_F
    return {
        "positive_holds": bool(np.all(margin >= -tol)),
        "positive_margin": float(np.min(margin)),
        "bound_holds": bool(np.all(bound_margin >= -tol)),
        "bound_margin": float(np.min(bound_margin)),
    }


def family_relations(
    system: SystemSpec,
    family: Mapping[int, Trajectory],
    U_coarse: np.ndarray,
    C: float,
    k_ladder: Sequence[float],
    coarse_N: int
) -> Dict:
    """由轨迹族构造 m_η, m_A, m_{F_α} 并检验集中关系"""
    conc = {
        q: family_concentration(system, family, q, k_ladder, coarse_N)
        for q in ["eta", "A"] + [f"F{a}" for a in range(system.space_dim)]
    }
    report = concentration_relations(
        system,
        conc["eta"].extrapolated,
        conc["A"].extrapolated,
        [conc[f"F{a}"].extrapolated for a in range(system.space_dim)],
        U_coarse,
        C,
    )
    report["totals"] = {q: c.total_extrapolated().tolist() for q, c in conc.items()}
    return report
