"""
EntroFlux 弱形式残差模块

以 Dirac 测度 (轨迹值) 与零集中项离散求值弱形式与熵不等式:

    ∫∫ A(u)·∂_t φ + F_α(u)·∂_α φ dx dt + ∫ A(u₀)·φ(0) dx          (通量检验)
    ∫∫ η(u) ∂_t ζ + q_α(u) ∂_α ζ dx dt + ∫ η(u₀) ζ(0) dx  ≥ 0     (熵检验)

检验函数为截断 Fourier 模态乘以时间截断 χ(t) = ½(1 + cos(πt/T)),
空间积分取单元中点, 时间积分对快照间的分段线性插值精确求积
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from systems.base import SystemSpec
from utils.errors import ConfigError

from .trajectory import Trajectory


@dataclass(frozen=True)
class TestFunction:
    """
    检验函数 φ(t, x) = χ(t)·ψ(x)

    Attributes:
        kind: "flux" (向量 φ) 或 "entropy" (标量 ζ ≥ 0)
        wavevector: 整数波矢 k
        coefficients: flux 时为 n 维系数向量; entropy 时忽略
        amplitude: entropy 时 ψ = 1 + amplitude·cos(2πk·x + phase), |amplitude| ≤ 1
        phase: 相位
    """

    __test__ = False

    kind: str
    wavevector: Tuple[int, ...]
    coefficients: Tuple[float, ...] = ()
    amplitude: float = 0.0
    phase: float = 0.0

    @property
    def name(self) -> str:
        k = ",".join(str(int(x)) for x in self.wavevector)
        if self.kind == "entropy":
            return f"entropy[k=({k}),a={self.amplitude:g}]"
        c = ",".join(f"{x:g}" for x in self.coefficients)
        return f"flux[k=({k}),c=({c})]"

    def spatial(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        ψ 与 ∇ψ 在点 x (..., d) 上的值

        Returns:
            flux: (ψ (..., n), ∇ψ (d, ..., n)); entropy: (ψ (...), ∇ψ (d, ...))
        """
        k = np.asarray(self.wavevector, dtype=float)
        arg = 2.0 * np.pi * np.tensordot(x, k, axes=1) + self.phase
        wave, dwave = np.cos(arg), -np.sin(arg)
        grads = np.stack([2.0 * np.pi * k[a] * dwave for a in range(k.size)])
        if self.kind == "entropy":
            return 1.0 + self.amplitude * wave, self.amplitude * grads
        c = np.asarray(self.coefficients, dtype=float)
        return wave[..., None] * c, grads[..., None] * c


def build_test_bank(system: SystemSpec, max_mode: int = 1, entropy_amplitudes: Sequence[float] = (0.0, 0.5)) -> List[TestFunction]:
    """
    默认检验函数组: 每个分量 × 每个方向的 1..max_mode 模态 (cos 与 sin), 以及熵检验

    Example:
        >>> len(build_test_bank(get_system("euler")))
        6
    """
    d, n = system.space_dim, system.state_dim
    bank = []
    for mode in range(1, max_mode + 1):
        for a in range(d):
            k = tuple(mode if b == a else 0 for b in range(d))
            for c in range(n):
                coef = tuple(1.0 if j == c else 0.0 for j in range(n))
                bank.append(TestFunction("flux", k, coef, phase=0.0))
                bank.append(TestFunction("flux", k, coef, phase=-0.5 * np.pi))
    for amplitude in entropy_amplitudes:
        if abs(amplitude) > 1.0:
            raise ConfigError(f"entropy test amplitude {amplitude} would make the test function negative")
        k = (1,) + (0,) * (d - 1)
        bank.append(TestFunction("entropy", k, amplitude=float(amplitude)))
    return bank


def cutoff_weights(times: np.ndarray, T: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    分段线性 g 的精确求积权重: ∫₀ᵀ χ g dt = Σ w_k g_k, ∫₀ᵀ χ' g dt = Σ w'_k g_k

    χ(t) = ½ + ½cos(ωt), ω = π/T
    """
    times = np.asarray(times, dtype=float)
    omega = np.pi / T
    w = np.zeros_like(times)
    w_prime = np.zeros_like(times)
    for j in range(times.size - 1):
        t0, t1 = times[j], times[j + 1]
        delta = t1 - t0
        s0, s1 = np.sin(omega * t0), np.sin(omega * t1)
        c0, c1 = np.cos(omega * t0), np.cos(omega * t1)
        # ∫ cos(ωt)·(t − t0)/Δ 与 ∫ cos(ωt)·(t1 − t)/Δ
        cos_up = (delta * s1 / omega + (c1 - c0) / omega ** 2) / delta
        cos_down = (s1 - s0) / omega - cos_up
        # ∫ sin(ωt)·(t − t0)/Δ 与 ∫ sin(ωt)·(t1 − t)/Δ
        sin_up = (-delta * c1 / omega + (s1 - s0) / omega ** 2) / delta
        sin_down = (c0 - c1) / omega - sin_up
        w[j] += 0.25 * delta + 0.5 * cos_down
        w[j + 1] += 0.25 * delta + 0.5 * cos_up
        w_prime[j] += -0.5 * omega * sin_down
        w_prime[j + 1] += -0.5 * omega * sin_up
    return w, w_prime


def weak_residual(
    trajectory: Trajectory,
    system: SystemSpec,
    test_bank: Optional[Sequence[TestFunction]] = None
) -> pd.DataFrame:
    """
    每个检验函数一个残差值

    Args:
        trajectory: 轨迹 (逐步存储时时间求积最准确)
        system: 生成轨迹的系统
        test_bank: 检验函数组; None 时用 build_test_bank

    Returns:
        DataFrame[test, kind, residual]; 熵检验的值应非负

    Raises:
        ConfigError: 检验函数组为空
    """
    bank = build_test_bank(system) if test_bank is None else list(test_bank)
    if not bank:
        raise ConfigError("weak_residual needs at least one test function")
    grid = trajectory.grid
    x = np.stack(grid.centers(), axis=-1)
    vol = grid.cell_volume
    times = trajectory.times
    w, w_prime = cutoff_weights(times, grid.T)
    initial = trajectory.snapshots[0]

    rows = []
    for test in bank:
        psi, grad_psi = test.spatial(x)
        time_part = np.zeros(times.size)
        space_part = np.zeros(times.size)
        for j, snap in enumerate(trajectory.snapshots):
            if test.kind == "entropy":
                density = system.eta(snap.u)
                fluxes = [system.q[a](snap.u) for a in range(grid.d)]
            else:
                density = snap.v
                fluxes = [system.F[a](snap.u) for a in range(grid.d)]
            time_part[j] = np.sum(density * psi) * vol
            space_part[j] = sum(np.sum(fluxes[a] * grad_psi[a]) for a in range(grid.d)) * vol
        start = time_part[0] if test.kind == "flux" else np.sum(system.eta(initial.u) * psi) * vol
        value = float(np.dot(w_prime, time_part) + np.dot(w, space_part) + start)
        rows.append({"test": test.name, "kind": test.kind, "residual": value})
    return pd.DataFrame(rows, columns=["test", "kind", "residual"])
