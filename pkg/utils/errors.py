"""
EntroFlux 异常模块

统一的异常层级; CLI 将 EntroFluxError 映射为退出码 2
"""

from typing import Iterable, List


class EntroFluxError(Exception):
    """所有库内异常的基类"""


class DomainError(EntroFluxError):
    """状态不在 X̄ (或需要开集 X 时不在 X 内部)"""


class VacuumError(DomainError):
    """严格模式下守恒密度低于 ρ_min"""


class SingularError(EntroFluxError):
    """∇A(U) 数值奇异 (条件数过大)"""


class MeasureError(EntroFluxError):
    """离散测度权重未归一化"""


class GridError(EntroFluxError):
    """网格不嵌套或时间网格未对齐"""


class ShockError(EntroFluxError):
    """参考解梯度监视器触发 (数据非 Lipschitz 或激波形成)"""


class BlowupError(EntroFluxError):
    """守恒量超过上限或出现非有限值"""


class OverflowGuard(EntroFluxError):
    """射线探针在网格结束前溢出"""


class MaskedAll(EntroFluxError):
    """Radon-Nikodym 分母处处为零"""


class CapError(EntroFluxError):
    """共轭函数的最大点触及搜索上限"""


class FitError(EntroFluxError):
    """Gronwall 拟合在上限内无解"""


class ConfigError(EntroFluxError):
    """配置或调用参数不合法"""


class ParseError(ConfigError):
    """配置文件无法解析"""


class ValidationError(ConfigError):
    """配置校验失败, 汇总全部错误信息"""

    def __init__(self, errors: Iterable[str]):
        self.errors: List[str] = list(errors)
        super().__init__("; ".join(self.errors))
