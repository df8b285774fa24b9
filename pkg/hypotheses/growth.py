"""
EntroFlux 增长界检验模块

(H4) |A|, |F_α| 受熵控制 (沿各向异性射线); (H5) |F_α(u|U)| ≤ C η(u|U)
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import optimize

from config import config
from orlicz import M1, fenchel_conjugate
from relent.pointwise import relative_entropy_unchecked, relative_flux_with, transfer_matrices
from systems.base import SystemSpec
from utils.errors import OverflowGuard
from utils.helpers import is_nonincreasing

from .design import (
    SampleDesign,
    ray_states,
    require_box_inside,
    sample_box,
    sample_directions,
    vertices,
)
from .report import HypothesisReport

logger = logging.getLogger(__name__)

TAIL_FRACTION = 3
PAIR_CHUNK = 25


def ray_ratios(system: SystemSpec, directions: np.ndarray, s_grid) -> Dict:
    """
    沿射线的 |A|/η 与 max_α |F_α|/η

    η 非有限的网格点被截去 (所有射线共享截断后的网格)

    Returns:
        {"s", "states", "A_ratio", "F_ratio", "truncated"}

    Raises:
        OverflowGuard: 截断后剩余不足 2 个网格点
    """
    s = np.asarray(s_grid, dtype=float)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    with np.errstate(over="ignore", invalid="ignore"):
        states = ray_states(system, directions, s)
        eta = system.eta(states)
        finite = np.all(np.isfinite(eta) & np.all(np.isfinite(states), axis=-1), axis=0)
    keep = np.cumprod(finite).astype(bool)
    truncated = int(s.size - keep.sum())
    if keep.sum() < 2:
        raise OverflowGuard(f"{system.name}: entropy overflows along rays before s={s[min(2, s.size - 1)]:g}")
    if truncated:
        logger.info("%s: ray grid truncated after s=%g (%d points dropped)", system.name, s[keep][-1], truncated)
    states = states[:, keep]
    eta = eta[:, keep]
    A_norm = np.linalg.norm(system.A(states), axis=-1)
    F_norm = np.max(
        np.stack([np.linalg.norm(system.F[a](states), axis=-1) for a in range(system.space_dim)]),
        axis=0,
    )
    return {
        "s": s[keep],
        "states": states,
        "A_ratio": A_norm / eta,
        "F_ratio": F_norm / eta,
        "truncated": truncated,
    }


def euler_growth_chain(system: SystemSpec, states: np.ndarray) -> Tuple[float, float]:
    """
    Fenchel-Young 链 |A|/η ≤ u₁/P̃ + M₁(√u₁)/P̃ + M₁*(|w|)/(½|w|²)

    P̃ ≤ 0 或 w = 0 的状态跳过

    Returns:
        (最大违背量, 终端界值的最大者)
    """
    u1 = states[..., 0]
    w = np.linalg.norm(states[..., 1:], axis=-1)
    eta = system.eta(states)
    P_shift = eta - 0.5 * w ** 2
    ok = (P_shift > 0.0) & (w > 0.0)
    if not np.any(ok):
        return 0.0, 0.0
    safe_P = np.where(ok, P_shift, 1.0)
    safe_w = np.where(ok, w, 1.0)
    bound = (u1 + M1(np.sqrt(u1))) / safe_P + fenchel_conjugate(M1, safe_w) / (0.5 * safe_w ** 2)
    ratio = np.linalg.norm(system.A(states), axis=-1) / eta
    violation = np.where(ok, ratio - bound, -np.inf)
    terminal = np.where(ok[..., -1], bound[..., -1], 0.0)
    return float(np.max(violation)), float(np.max(terminal))


def check_H4(system: SystemSpec, design: SampleDesign) -> HypothesisReport:
    """
    射线增长界: 报告 |A| ≤ C_A(1 + η), |F| ≤ C_F(1 + η) 的经验常数及 |A|/η → 0 的分类

    判定: 常数有限 (Euler 另需 Fenchel-Young 链违背量 ≤ 1e-8)

    Raises:
        OverflowGuard: η 在网格结束前溢出且剩余点不足
    """
    rng = design.rng()
    directions = sample_directions(system, design.ray_directions, rng)
    rays = ray_ratios(system, directions, design.s_grid)
    A_ratio, F_ratio = rays["A_ratio"], rays["F_ratio"]
    C_A = float(np.max(A_ratio))
    C_F = float(np.max(F_ratio))

    tail = max(2, A_ratio.shape[1] // TAIL_FRACTION)
    terminal = float(np.max(A_ratio[:, -1]))
    tail_decreasing = all(is_nonincreasing(row[-tail:], atol=1e-14) for row in A_ratio)
    limit_holds = terminal <= config.RATIO_LIMIT_TOL and tail_decreasing

    constants = {
        "C_A": C_A,
        "C_F": C_F,
        "terminal_A_ratio": terminal,
        "terminal_F_ratio": float(np.max(F_ratio[:, -1])),
        "ratio_limit_holds": limit_holds,
        "s_max": float(rays["s"][-1]),
    }
    residuals = {}
    verdict = bool(np.isfinite(C_A) and np.isfinite(C_F))
    if system.name == "euler":
        violation, chain_terminal = euler_growth_chain(system, rays["states"])
        residuals["growth_chain_violation"] = max(violation, 0.0)
        constants["growth_chain_terminal"] = chain_terminal
        verdict = verdict and violation <= config.ANALYTIC_TOL

    return HypothesisReport(
        hypothesis="H4",
        verdict=verdict,
        tolerance=config.RATIO_LIMIT_TOL,
        residuals=residuals,
        constants=constants,
        samples={"rays": int(directions.shape[0]), "s_points": int(rays["s"].size), "truncated": rays["truncated"]},
        seed=design.seed,
        notes=[] if limit_holds else ["|A|/eta -> 0 not observed on this grid"],
    )


def _u_samples(system: SystemSpec, design_u: SampleDesign) -> np.ndarray:
    """u 样本: 盒内均匀、盒顶点、真空态与远场射线"""
    box = sample_box(design_u)
    corners = vertices(design_u)
    vacuum = np.zeros((1, system.state_dim))
    for idx, bound in system.domain.lower.items():
        vacuum[0, idx] = bound
    # 独立的方向流: 加倍设计的方向是原方向的超集
    directions = sample_directions(system, design_u.ray_directions, np.random.default_rng([design_u.seed, 1]))
    with np.errstate(over="ignore", invalid="ignore"):
        rays = ray_states(system, directions, design_u.s_grid).reshape(-1, system.state_dim)
        finite = np.isfinite(system.eta(rays)) & np.all(np.isfinite(rays), axis=-1)
    states = np.concatenate([box, corners, vacuum, rays[finite]])
    return states[system.domain.contains(states, closed=True)]


def _pair_ratios(system: SystemSpec, u: np.ndarray, U: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    全部 (u, U) 组合的比值 max_α|F_α(u|U)|/η(u|U) 与相对熵

    Returns:
        (ratio, eta_rel), 形状 (n_u, n_U); 跳过的组合比值为 NaN
    """
    ratios = np.empty((u.shape[0], U.shape[0]))
    etas = np.empty_like(ratios)
    for start in range(0, U.shape[0], PAIR_CHUNK):
        chunk = U[start:start + PAIR_CHUNK]
        transfer = transfer_matrices(system, chunk)
        uu = u[:, None, :]
        UU = chunk[None, :, :]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            eta_rel = relative_entropy_unchecked(system, uu, UU)
            F_rel = relative_flux_with(system, transfer[None], uu, UU)
            F_norm = np.max(np.linalg.norm(F_rel, axis=-1), axis=-1)
            ratio = np.where(eta_rel >= config.H5_SKIP_TOL, F_norm / eta_rel, np.nan)
        ratios[:, start:start + chunk.shape[0]] = ratio
        etas[:, start:start + chunk.shape[0]] = eta_rel
    return ratios, etas


def _polish(system: SystemSpec, start_u, start_U, design_u: SampleDesign, design_U: SampleDesign) -> float:
    """从样本最大点出发, 在两个盒内用 L-BFGS-B 局部最大化比值"""
    n = system.state_dim
    bounds = list(design_u.compact_box) + list(design_U.compact_box)
    for idx, bound in system.domain.lower.items():
        lo, hi = bounds[idx]
        bounds[idx] = (max(lo, bound), hi)

    def objective(x):
        u, U = x[:n], x[n:]
        eta_rel = float(relative_entropy_unchecked(system, u, U))
        if not np.isfinite(eta_rel) or eta_rel < config.H5_SKIP_TOL:
            return 0.0
        transfer = transfer_matrices(system, U)
        F_rel = relative_flux_with(system, transfer, u, U)
        return -float(np.max(np.linalg.norm(F_rel, axis=-1))) / eta_rel

    x0 = np.clip(np.concatenate([start_u, start_U]), [b[0] for b in bounds], [b[1] for b in bounds])
    with np.errstate(all="ignore"):
        result = optimize.minimize(objective, x0, method="L-BFGS-B", bounds=bounds)
    value = -float(result.fun)
    return value if np.isfinite(value) else 0.0


def estimate_H5_constant(system: SystemSpec, design_u: SampleDesign, design_U: SampleDesign) -> Dict:
    """
    单次 H5 常数估计

    Returns:
        {"C", "C_sampled", "pairs", "skipped", "min_eta_rel"}
    """
    u = _u_samples(system, design_u)
    U = sample_box(design_U)
    ratios, etas = _pair_ratios(system, u, U)
    skipped = int(np.count_nonzero(np.isnan(ratios)))
    finite = np.where(np.isnan(ratios), -np.inf, ratios)
    C_sampled = float(np.max(finite))

    in_box = np.all([(u[:, i] >= lo) & (u[:, i] <= hi) for i, (lo, hi) in enumerate(design_u.compact_box)], axis=0)
    candidates = np.where(in_box[:, None], finite, -np.inf).ravel()
    order = np.argsort(candidates)[::-1][:config.H5_POLISH_STARTS]
    polished = [
        _polish(system, u[k // U.shape[0]], U[k % U.shape[0]], design_u, design_U)
        for k in order if np.isfinite(candidates[k])
    ]
    C = max([C_sampled] + polished)
    if skipped:
        logger.debug("%s H5: skipped %d near-diagonal pairs", system.name, skipped)
    return {
        "C": C,
        "C_sampled": C_sampled,
        "pairs": int(ratios.size),
        "skipped": skipped,
        "min_eta_rel": float(np.nanmin(etas)),
    }


def check_H5(
    system: SystemSpec,
    design_u: SampleDesign,
    design_U: SampleDesign,
    drift_tol: Optional[float] = None
) -> HypothesisReport:
    """
    估计 C = max |F_α(u|U)|/η(u|U), 并以样本加倍检验稳定性

    Raises:
        DomainError: U 的采样盒未紧含于 X
    """
    drift_tol = config.H5_DRIFT_TOL if drift_tol is None else drift_tol
    require_box_inside(system, design_U)
    first = estimate_H5_constant(system, design_u, design_U)
    second = estimate_H5_constant(system, design_u.doubled(), design_U.doubled())
    C, C2 = first["C"], second["C"]
    drift = abs(C2 - C) / C if C > 0 else 0.0
    verdict = bool(np.isfinite(C) and np.isfinite(C2) and drift <= drift_tol)
    logger.info("%s H5: C=%.4g, doubled C=%.4g, drift %.2f%%", system.name, C, C2, 100 * drift)
    return HypothesisReport(
        hypothesis="H5",
        verdict=verdict,
        tolerance=drift_tol,
        residuals={"drift": drift},
        constants={"C": C, "C_doubled": C2, "C_sampled": first["C_sampled"]},
        samples={"pairs": first["pairs"], "skipped": first["skipped"], "pairs_doubled": second["pairs"]},
        seed=design_u.seed,
    )
