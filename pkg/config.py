"""
EntroFlux 配置模块

管理全局容差、默认参数与环境变量覆盖 (ENTROFLUX_*)
"""

import os
from dataclasses import dataclass
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()


def _env_float(key: str, default: float) -> float:
    """读取浮点型环境变量"""
    return float(os.getenv(key, str(default)))


def _env_flag(key: str, default: bool = False) -> bool:
    """读取布尔型环境变量 (1/true/yes)"""
    value = os.getenv(key)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


@dataclass
class Config:
    """配置类 - 管理所有配置项"""

    VERSION: str = "0.3.0"
    REPORT_SCHEMA: int = 1

    # 运行环境
    LOG_LEVEL: str = os.getenv("ENTROFLUX_LOG_LEVEL", "WARNING")
    DEFAULT_SEED: int = int(os.getenv("ENTROFLUX_SEED", "20240617"))
    MAX_WORKERS: int = int(os.getenv("ENTROFLUX_THREADS", "1"))

    # 状态空间
    RHO_MIN: float = _env_float("ENTROFLUX_RHO_MIN", 1e-10)
    STRICT_VACUUM: bool = _env_flag("ENTROFLUX_STRICT_VACUUM")
    INTERIOR_MARGIN: float = 1e-6

    # 容差分级 (解析恒等式 / 有限差分)
    ANALYTIC_TOL: float = 1e-8
    FD_TOL: float = 1e-5
    FD_STEP: float = 1e-6
    DET_FLOOR: float = 1e-10
    EIG_FLOOR: float = 1e-10
    SINGULAR_COND: float = 1e12
    WEIGHT_TOL: float = 1e-12

    # H4 / H5 采样
    RATIO_LIMIT_TOL: float = 0.05
    H5_SKIP_TOL: float = 1e-12
    H5_DRIFT_TOL: float = 0.05
    H5_POLISH_STARTS: int = 3
    H2PRIME_TOL_COEFF: float = 10.0
    RESIDUAL_FLOOR: float = 1e-13

    # 求解器
    WAVE_SPEED_SAFETY: float = 1.2
    BLOWUP_CEILING: float = 1e8
    GRADIENT_MONITOR_FACTOR: float = 5.0
    JUMP_TOL: float = 0.1
    CONSERVATION_TOL: float = 1e-10

    # 测度
    ATOM_MERGE_TOL: float = 1e-9
    RN_MASK_TOL: float = 1e-14
    CONCENTRATION_LEVEL: float = 1e3

    # Orlicz / Fenchel
    GOLDEN_ITERATIONS: int = 200
    CONJUGATE_CAP: float = 1e9
    STRONGER_SHRINK: float = 0.5

    # Gronwall 与唯一性探针
    FIT_DELTA_ABS: float = 1e-10
    FIT_DELTA_REL: float = 0.01
    FIT_GRID_POINTS: int = 2001
    REFINEMENT_FACTOR: float = 1.3
    MIN_RATE: float = 0.4
    CONTROL_SEPARATION: float = 10.0
    CONTROL_MISMATCH: float = 0.2
    YOUNG_COARSENING: int = 2
    PROBE_N_REF: int = int(os.getenv("ENTROFLUX_N_REF", "4096"))
    PROBE_SNAPSHOTS: int = 10
    ZERO_TOL: float = 1e-14


# 全局配置实例
config = Config()
