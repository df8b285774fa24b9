"""
EntroFlux 快照存储模块

每个快照一个二进制文件 (小端 float64, 行主序, 形状 (N,)*d + (n,), 存守恒量 v),
附同名 JSON 边车 {system, N, d, t, scheme, state_dim, shape}
"""

import json
import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from solver.grid import TorusGrid
from solver.initial import ConservedField
from solver.trajectory import Trajectory
from systems.base import SystemSpec
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

DTYPE = "<f8"


def save_trajectory(trajectory: Trajectory, directory: Union[str, Path]) -> List[Path]:
    """
    写出全部快照

    Returns:
        二进制文件路径列表
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    grid = trajectory.grid
    written = []
    for i, snap in enumerate(trajectory.snapshots):
        stem = directory / f"snapshot_{i:04d}"
        values = np.ascontiguousarray(snap.v, dtype=DTYPE)
        values.tofile(stem.with_suffix(".bin"))
        sidecar = {
            "system": trajectory.system_name,
            "scheme": trajectory.scheme,
            "N": grid.N,
            "d": grid.d,
            "T": grid.T,
            "cfl": grid.cfl,
            "snapshot_dt": grid.snapshot_dt,
            "t": float(snap.t),
            "clamps": int(snap.clamps),
            "state_dim": int(values.shape[-1]),
            "shape": list(values.shape),
            "dtype": DTYPE,
        }
        stem.with_suffix(".json").write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        written.append(stem.with_suffix(".bin"))
    logger.info("saved %d snapshots of %s N=%d to %s", len(written), trajectory.system_name, grid.N, directory)
    return written


def load_trajectory(directory: Union[str, Path], system: SystemSpec) -> Trajectory:
    """
    读回轨迹, 状态 u 由 system.invert 重建

    Raises:
        ConfigError: 目录为空或边车与系统不符
    """
    directory = Path(directory)
    sidecars = sorted(directory.glob("snapshot_*.json"))
    if not sidecars:
        raise ConfigError(f"no snapshots found in {directory}")
    snapshots = []
    info = None
    for path in sidecars:
        info = json.loads(path.read_text(encoding="utf-8"))
        if info["system"] != system.name or info["state_dim"] != system.state_dim:
            raise ConfigError(f"{path.name} holds {info['system']} data, not {system.name}")
        v = np.fromfile(path.with_suffix(".bin"), dtype=info["dtype"]).reshape(info["shape"])
        u, _ = system.invert(v, False)
        snapshots.append(ConservedField(v=v, u=u, t=info["t"], clamps=info["clamps"]))
    grid = TorusGrid(d=info["d"], N=info["N"], T=info["T"], cfl=info["cfl"], snapshot_dt=info["snapshot_dt"])
    return Trajectory(system_name=info["system"], scheme=info["scheme"], grid=grid, snapshots=snapshots)
