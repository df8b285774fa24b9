"""
EntroFlux 测度平均相对熵模块

𝓗(ν,U) = ⟨ν,η⟩ − η(U) − G(U)·(⟨ν,A⟩ − A(U))
Z_α(ν,U) = ⟨ν,F_α⟩ − F_α(U) − ∇F_α(U)∇A(U)⁻¹(⟨ν,A⟩ − A(U))
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config import config
from systems.base import SystemSpec
from utils.errors import MeasureError

from .pointwise import _check_conditioning, transfer_matrices


@dataclass
class AtomicMeasure:
    """
    单个单元上的离散概率测度 Σ wᵢ δ_{uᵢ}

    Attributes:
        atoms: 形状 (k, n)
        weights: 形状 (k,), 和为 1
    """
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        check_weights(self.weights)
        if self.atoms.shape[0] != self.weights.shape[0]:
            raise MeasureError(f"{self.atoms.shape[0]} atoms but {self.weights.shape[0]} weights")

    @classmethod
    def dirac(cls, state) -> "AtomicMeasure":
        return cls(np.atleast_2d(state), np.ones(1))

    def mean(self, fn) -> np.ndarray:
        """⟨ν, f⟩"""
        values = fn(self.atoms)
        return np.tensordot(self.weights, values, axes=(0, 0))


def check_weights(weights: np.ndarray, tol: float = None) -> None:
    """
    权重需非负且 (沿最后一轴) 和为 1

    Raises:
        MeasureError: 权重未归一化或为负
    """
    tol = config.WEIGHT_TOL if tol is None else tol
    if np.any(weights < 0):
        raise MeasureError("negative atom weight")
    total = np.sum(weights, axis=-1)
    if np.any(np.abs(total - 1.0) > tol):
        worst = float(np.max(np.abs(total - 1.0)))
        raise MeasureError(f"atom weights sum to 1 only within {worst:.3e} (> {tol:g})")


def averaged_H(system: SystemSpec, nu: AtomicMeasure, U) -> float:
    """
    测度平均相对熵 𝓗(ν, U)

    Example:
        >>> nu = AtomicMeasure([[1.0, 0.0], [0.5, 0.0]], [0.5, 0.5])
        >>> averaged_H(get_system("euler"), nu, [0.5, 0.0])
        0.125
    """
    U = np.asarray(U, dtype=float)
    system.domain.require(nu.atoms, closed=True, what="atom")
    system.domain.require_interior(U, what="U")
    mean_A = nu.mean(system.A)
    value = nu.mean(system.eta) - system.eta(U) - float(system.G(U) @ (mean_A - system.A(U)))
    return float(value)


def averaged_Z(system: SystemSpec, alpha: int, nu: AtomicMeasure, U) -> Tuple[np.ndarray, float]:
    """
    测度平均相对通量 Z_α(ν, U)

    Returns:
        (Z_α, |Z_α|/𝓗); 𝓗 = 0 时比值记为 0
    """
    U = np.asarray(U, dtype=float)
    H = averaged_H(system, nu, U)
    grad_A = system.grad_A(U)
    _check_conditioning(grad_A)
    step = np.linalg.solve(grad_A, nu.mean(system.A) - system.A(U))
    Z = nu.mean(system.F[alpha]) - system.F[alpha](U) - system.grad_F[alpha](U) @ step
    ratio = float(np.linalg.norm(Z) / H) if H > 0.0 else 0.0
    return Z, ratio


def averaged_H_field(system: SystemSpec, atoms: np.ndarray, weights: np.ndarray, U: np.ndarray) -> np.ndarray:
    """
    逐单元的 𝓗(ν_x, U(x))

    Args:
        atoms: (cells, k, n) 填充后的原子 (填充原子权重为 0)
        weights: (cells, k)
        U: (cells, n) 内部状态

    Returns:
        (cells,)
    """
    check_weights(weights)
    system.domain.require_interior(U, what="U")
    mean_eta = np.sum(weights * system.eta(atoms), axis=-1)
    mean_A = np.einsum("ck,ckn->cn", weights, system.A(atoms))
    return mean_eta - system.eta(U) - np.sum(system.G(U) * (mean_A - system.A(U)), axis=-1)


def averaged_Z_field(system: SystemSpec, atoms: np.ndarray, weights: np.ndarray, U: np.ndarray) -> np.ndarray:
    """逐单元的 Z_α(ν_x, U(x)), 返回 (cells, d, n)"""
    check_weights(weights)
    transfer = transfer_matrices(system, U)
    mean_A = np.einsum("ck,ckn->cn", weights, system.A(atoms))
    diff = mean_A - system.A(U)
    out = []
    for a in range(system.space_dim):
        mean_F = np.einsum("ck,ckn->cn", weights, system.F[a](atoms))
        out.append(mean_F - system.F[a](U) - np.einsum("cij,cj->ci", transfer[:, a], diff))
    return np.stack(out, axis=1)
