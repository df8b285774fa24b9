"""
EntroFlux 谱投影模块

周期环面上的离散 Helmholtz 投影: 去除向量场的梯度部分,
使其中心差分散度为零; 以及用于 (H2') 检验的光滑随机场采样
"""

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from utils.errors import ConfigError

ZERO_SYMBOL_TOL = 1e-12


def _modified_wavenumbers(shape: Tuple[int, ...]) -> Tuple[np.ndarray, ...]:
    """中心差分对应的修正波数 sin(2πm/N)/h, 按网格广播"""
    axes = []
    for N in shape:
        m = np.fft.fftfreq(N, d=1.0 / N)
        axes.append(np.sin(2.0 * np.pi * m / N) * N)
    return tuple(np.meshgrid(*axes, indexing="ij"))


def helmholtz_project(vector_field: np.ndarray, d: int) -> np.ndarray:
    """
    投影向量场的前 d 个分量到离散无散度子空间

    Args:
        vector_field: 形状 (N,)*d + (c,), c ≥ d
        d: 空间维数

    Returns:
        前 d 个分量被投影后的场 (其余分量不变)
    """
    vector_field = np.asarray(vector_field, dtype=float)
    grid_shape = vector_field.shape[:d]
    if vector_field.ndim != d + 1 or vector_field.shape[-1] < d:
        raise ConfigError(f"expected field of shape (N,)*{d} + (c >= {d},), got {vector_field.shape}")

    k = _modified_wavenumbers(grid_shape)
    k2 = sum(kk * kk for kk in k)
    active = k2 > ZERO_SYMBOL_TOL
    safe_k2 = np.where(active, k2, 1.0)

    axes = tuple(range(d))
    spectra = [np.fft.fftn(vector_field[..., i], axes=axes) for i in range(d)]
    k_dot = sum(k[i] * spectra[i] for i in range(d))
    out = np.array(vector_field, copy=True)
    for i in range(d):
        projected = spectra[i] - np.where(active, k[i] * k_dot / safe_k2, 0.0)
        out[..., i] = np.fft.ifftn(projected, axes=axes).real
    return out


def discrete_divergence(vector_field: np.ndarray, d: int) -> np.ndarray:
    """前 d 个分量的中心差分散度 (周期边界, h = 1/N)"""
    vector_field = np.asarray(vector_field, dtype=float)
    div = np.zeros(vector_field.shape[:d])
    for axis in range(d):
        N = vector_field.shape[axis]
        comp = vector_field[..., axis]
        div += (np.roll(comp, -1, axis=axis) - np.roll(comp, 1, axis=axis)) * (N / 2.0)
    return div


def centered_gradient(values: np.ndarray, d: int) -> np.ndarray:
    """
    中心差分梯度

    Args:
        values: 形状 (N,)*d + (c,)

    Returns:
        形状 (d,) + values.shape, 第 α 项为 ∂_α
    """
    values = np.asarray(values, dtype=float)
    out = []
    for axis in range(d):
        N = values.shape[axis]
        out.append((np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) * (N / 2.0))
    return np.stack(out, axis=0)


def cell_centers(N: int, d: int) -> Tuple[np.ndarray, ...]:
    """单位环面上的单元中心坐标网格"""
    x = (np.arange(N) + 0.5) / N
    return tuple(np.meshgrid(*([x] * d), indexing="ij"))


@dataclass
class SmoothFieldSampler:
    """
    随机低模态三角多项式场, 可在任意分辨率上求值

    同一个采样器在不同 N 上给出同一连续场的采样, 用于加密收敛检验

    Attributes:
        d: 空间维数
        n_components: 分量数
        modes: 最大波数 |k|∞
        base: 各分量的常数均值 (例如密度取正值)
        amplitude: 扰动幅度
    """

    d: int
    n_components: int
    rng: np.random.Generator
    modes: int = 2
    base: Tuple[float, ...] = ()
    amplitude: float = 0.3

    def __post_init__(self):
        grid = np.arange(-self.modes, self.modes + 1)
        waves = np.stack(np.meshgrid(*([grid] * self.d), indexing="ij"), axis=-1).reshape(-1, self.d)
        self.waves = waves[np.any(waves != 0, axis=1)]
        shape = (len(self.waves), self.n_components)
        self.cos_coef = self.rng.normal(size=shape) / len(self.waves) ** 0.5
        self.sin_coef = self.rng.normal(size=shape) / len(self.waves) ** 0.5
        base = np.zeros(self.n_components)
        base[:len(self.base)] = self.base
        self.mean = base

    def sample(self, N: int) -> np.ndarray:
        """在 N^d 网格单元中心求值, 返回 (N,)*d + (n_components,)"""
        x = np.stack(cell_centers(N, self.d), axis=-1)
        phase = 2.0 * np.pi * np.tensordot(x, self.waves.T, axes=1)
        field = np.tensordot(np.cos(phase), self.cos_coef, axes=1) + np.tensordot(np.sin(phase), self.sin_coef, axes=1)
        return self.mean + self.amplitude * field

    def factory(self) -> Callable[[int], np.ndarray]:
        return self.sample
