"""
EntroFlux 结构假设检验模块

(H1) ∇A 非奇异; (H2) 熵相容 ∇η = G∇A, ∇q_α (+ L̄_α) = G∇F_α 及对称性;
(H3) ∇²η − G·∇²A 正定; (H2') 约束系统的 L̄_α·∂_α u 离散积分
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from config import config
from systems.base import SystemSpec, hessian_form_unchecked
from systems.projection import SmoothFieldSampler, centered_gradient
from utils.errors import ConfigError
from utils.helpers import measured_rate

from .derivatives import central_difference, relative_error
from .design import SampleDesign, require_box_inside, sample_box
from .report import HypothesisReport

logger = logging.getLogger(__name__)

H2PRIME_AMPLITUDE = 0.15


def _asymmetry(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - np.swapaxes(matrix, -1, -2))))


def check_H1(system: SystemSpec, design: SampleDesign) -> HypothesisReport:
    """
    ∇A(u) 非奇异: 报告最小 |det| 与最大条件数

    Raises:
        DomainError: 采样盒触及 ∂X
    """
    require_box_inside(system, design)
    u = sample_box(design)
    grad_A = system.grad_A(u)
    det = np.abs(np.linalg.det(grad_A))
    cond = np.linalg.cond(grad_A)
    min_det = float(np.min(det))
    return HypothesisReport(
        hypothesis="H1",
        verdict=min_det > config.DET_FLOOR,
        tolerance=config.DET_FLOOR,
        constants={"min_abs_det": min_det, "max_cond": float(np.max(cond))},
        samples={"states": int(u.shape[0])},
        seed=design.seed,
    )


def check_H2(system: SystemSpec, design: SampleDesign, tol: Optional[float] = None) -> HypothesisReport:
    """
    熵相容性的四族残差 (以及 ∇q 与 q 的差分核对)

    约束系统按 (H2') 形式 G·∇F_α = ∇q_α + L̄_α 计算通量残差;
    其通量对称性只报告, 不计入判定
    """
    tol = config.ANALYTIC_TOL if tol is None else tol
    require_box_inside(system, design)
    u = sample_box(design)
    G = system.G(u)
    grad_A = system.grad_A(u)
    grad_G = system.grad_G(u)

    residuals = {
        "entropy_multiplier": float(np.max(np.abs(system.grad_eta(u) - np.einsum("mi,mij->mj", G, grad_A)))),
        "multiplier_symmetry": _asymmetry(np.einsum("mki,mkj->mij", grad_G, grad_A)),
    }
    flux_res, flux_sym, q_fd = 0.0, 0.0, 0.0
    for a in range(system.space_dim):
        grad_F = system.grad_F[a](u)
        lbar = system.constraint.Lbar[a](u) if system.constraint is not None else 0.0
        mismatch = system.grad_q[a](u) + lbar - np.einsum("mi,mij->mj", G, grad_F)
        flux_res = max(flux_res, float(np.max(np.abs(mismatch))))
        flux_sym = max(flux_sym, _asymmetry(np.einsum("mki,mkj->mij", grad_G, grad_F)))
        q_fd = max(q_fd, relative_error(system.grad_q[a](u), central_difference(system.q[a], u)))
    residuals["entropy_flux"] = flux_res
    residuals["flux_symmetry"] = flux_sym

    counted = ["entropy_multiplier", "entropy_flux", "multiplier_symmetry"]
    notes = []
    if system.constraint is None:
        counted.append("flux_symmetry")
    else:
        notes.append("flux_symmetry reported only: constrained system, L̄ carries the non-symmetric part")
    verdict = all(residuals[k] <= tol for k in counted) and q_fd <= config.FD_TOL

    return HypothesisReport(
        hypothesis="H2",
        verdict=verdict,
        tolerance=tol,
        residuals=residuals,
        constants={"q_consistency": q_fd},
        samples={"states": int(u.shape[0])},
        seed=design.seed,
        notes=notes,
    )


def check_H3(system: SystemSpec, design: SampleDesign) -> HypothesisReport:
    """∇²η − G·∇²A 正定: 样本上最小特征值 > 1e-10"""
    require_box_inside(system, design)
    u = sample_box(design)
    eig = np.linalg.eigvalsh(hessian_form_unchecked(system, u))
    min_eig = float(np.min(eig))
    return HypothesisReport(
        hypothesis="H3",
        verdict=min_eig > config.EIG_FLOOR,
        tolerance=config.EIG_FLOOR,
        min_eigenvalue=min_eig,
        constants={"max_eigenvalue": float(np.max(eig))},
        samples={"states": int(u.shape[0])},
        seed=design.seed,
    )


def constraint_residual(system: SystemSpec, field_u: np.ndarray) -> float:
    """
    Σ_α ∫ L̄_α(u)·∂_α u dx 的中心差分离散 (周期单位环面)
    """
    d = system.space_dim
    N = field_u.shape[0]
    grads = centered_gradient(field_u, d)
    total = 0.0
    for a in range(d):
        total += float(np.sum(system.constraint.Lbar[a](field_u) * grads[a]))
    return total / N ** d


def check_H2prime(
    system: SystemSpec,
    n_fields: int = 4,
    N_ladder: Sequence[int] = (32, 64, 128),
    seed: int = config.DEFAULT_SEED,
    project: bool = True,
    field_factory: Optional[Callable[[int], np.ndarray]] = None,
    tol_coeff: Optional[float] = None
) -> HypothesisReport:
    """
    (H2') 检验: 随机光滑场经 project_Y 投影后, L̄_α·∂_α u 的积分随 h 趋零

    Args:
        system: 带约束的系统
        n_fields: 随机场个数
        N_ladder: 分辨率阶梯
        seed: 随机种子
        project: 是否投影 (关闭即为负对照)
        field_factory: 自定义场 N ↦ 场, 替代随机场
        tol_coeff: 判定阈值 tol_coeff·h

    Returns:
        HypothesisReport, residuals 为各 N 上的最大 |积分|

    Raises:
        ConfigError: 系统无约束结构
    """
    if system.constraint is None:
        raise ConfigError(f"system '{system.name}' has no constraint structure")
    tol_coeff = config.H2PRIME_TOL_COEFF if tol_coeff is None else tol_coeff
    rng = np.random.default_rng(seed)
    base = tuple(1.0 if i in system.domain.lower else 0.0 for i in range(system.state_dim))

    factories = []
    if field_factory is not None:
        factories.append(field_factory)
    else:
        for _ in range(n_fields):
            sampler = SmoothFieldSampler(
                d=system.space_dim,
                n_components=system.state_dim,
                rng=rng,
                base=base,
                amplitude=H2PRIME_AMPLITUDE,
            )
            factories.append(sampler.sample)

    N_values = sorted(int(N) for N in N_ladder)
    worst = []
    for N in N_values:
        per_field = []
        for factory in factories:
            field_u = factory(N)
            if project:
                field_u = system.constraint.project_Y(field_u)
            per_field.append(abs(constraint_residual(system, field_u)))
        worst.append(max(per_field))

    h = 1.0 / np.asarray(N_values, dtype=float)
    verdict = all(r <= tol_coeff * hh for r, hh in zip(worst, h))
    order = measured_rate(h, worst, floor=config.RESIDUAL_FLOOR)
    logger.info("%s (H2'): residuals %s, order %s", system.name, worst, order)
    constants = {"tol_coeff": tol_coeff}
    if order is not None:
        constants["order"] = order
    return HypothesisReport(
        hypothesis="H2prime",
        verdict=verdict,
        tolerance=tol_coeff * float(h[-1]),
        residuals={f"N={N}": r for N, r in zip(N_values, worst)},
        constants=constants,
        samples={"fields": len(factories), "grids": len(N_values)},
        seed=seed,
        notes=[] if project else ["designated fields not projected"],
    )
