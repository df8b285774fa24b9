"""
EntroFlux 轨迹模块

时间推进到 T, 在快照时间上精确落点, 逐步记录离散熵产生
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import config
from systems.base import SystemSpec

from .grid import TIME_EPS, TorusGrid
from .initial import ConservedField, InitialSpec, init_field
from .schemes import entropy_production, get_scheme, stable_dt, step

logger = logging.getLogger(__name__)

PRODUCTION_COLUMNS = ["step", "t", "dt", "total_entropy", "production", "residual_l1", "residual_max"]


@dataclass
class Trajectory:
    """
    有序快照序列

    Attributes:
        system_name: 系统注册名
        scheme: 数值格式名
        grid: 网格
        snapshots: 快照, 时间严格递增且首项 t = 0
        production: 逐步熵产生记录 (pandas DataFrame)
    """

    system_name: str
    scheme: str
    grid: TorusGrid
    snapshots: List[ConservedField] = field(default_factory=list)
    production: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=PRODUCTION_COLUMNS))

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self) -> ConservedField:
        return self.snapshots[-1]

    def at(self, t: float) -> ConservedField:
        """取时间为 t 的快照 (容差 1e-12)"""
        times = self.times
        idx = int(np.argmin(np.abs(times - t)))
        if abs(times[idx] - t) > TIME_EPS * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t:g}")
        return self.snapshots[idx]

    def total(self, system: SystemSpec, quantity: str = "eta") -> np.ndarray:
        """各快照上 ∫η dx (或 ∫A dx) 的时间序列"""
        vol = self.grid.cell_volume
        axes = tuple(range(self.grid.d))
        if quantity == "eta":
            return np.array([np.sum(system.eta(s.u)) * vol for s in self.snapshots])
        return np.array([np.sum(s.v, axis=axes) * vol for s in self.snapshots])


def run(
    system: SystemSpec,
    grid: TorusGrid,
    spec: InitialSpec,
    scheme: str = "lax-friedrichs",
    on_step: Optional[Callable[[ConservedField, ConservedField], None]] = None
) -> Trajectory:
    """
    推进到 T, 返回快照轨迹

    Args:
        system: 带求解器的系统
        grid: 网格 (含 T, CFL 与快照设定)
        spec: 初值描述
        scheme: 数值格式
        on_step: 每步之后的回调 (before, after), 供梯度监测等使用

    Returns:
        Trajectory

    Raises:
        BlowupError / VacuumError: 由 step 传播
    """
    get_scheme(scheme)
    current = init_field(system, grid, spec)
    trajectory = Trajectory(system_name=system.name, scheme=scheme, grid=grid, snapshots=[current])
    targets = grid.snapshot_times()[1:]
    rows = []
    n_step = 0
    for target in targets:
        while target - current.t > TIME_EPS * max(1.0, target):
            dt = min(stable_dt(system, current, grid), target - current.t)
            nxt = step(system, current, grid, scheme=scheme, dt=dt)
            # 落在快照时间上, 避免累计舍入
            if target - nxt.t <= TIME_EPS * max(1.0, target):
                nxt.t = target
            n_step += 1
            rows.append({"step": n_step, "t": nxt.t, "dt": dt, **entropy_production(system, current, nxt, grid)})
            if on_step is not None:
                on_step(current, nxt)
            if grid.store_every_step and nxt.t != target:
                trajectory.snapshots.append(nxt)
            current = nxt
        trajectory.snapshots.append(current)
    trajectory.production = pd.DataFrame(rows, columns=PRODUCTION_COLUMNS)
    logger.info(
        "%s %s N=%d: %d steps to T=%g, %d snapshots",
        system.name, scheme, grid.N, n_step, grid.T, len(trajectory.snapshots),
    )
    return trajectory


def run_family(
    system: SystemSpec,
    grid: TorusGrid,
    spec: InitialSpec,
    N_ladder: Sequence[int],
    scheme: str = "lax-friedrichs",
    max_workers: Optional[int] = None
) -> Dict[int, Trajectory]:
    """
    分辨率阶梯上的一族轨迹 (生成序列), 并发执行

    Returns:
        {N: Trajectory}, 按 N 升序
    """
    workers = config.MAX_WORKERS if max_workers is None else max_workers
    ladder = sorted(int(N) for N in N_ladder)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {N: pool.submit(run, system, grid.refined(N), spec, scheme) for N in ladder}
        return {N: futures[N].result() for N in ladder}
