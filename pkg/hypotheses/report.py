"""
EntroFlux 假设检验报告模块
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from utils.helpers import format_scientific, format_verdict, to_builtin


@dataclass
class HypothesisReport:
    """
    单个假设的检验结果

    verdict 为真当且仅当所有计入判定的残差都在容差内
    """
    hypothesis: str
    verdict: bool
    tolerance: float
    residuals: Dict[str, float] = field(default_factory=dict)
    constants: Dict[str, float] = field(default_factory=dict)
    samples: Dict[str, int] = field(default_factory=dict)
    seed: Optional[int] = None
    min_eigenvalue: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        payload = asdict(self)
        payload["id"] = payload.pop("hypothesis")
        payload["verdict"] = format_verdict(self.verdict).lower()
        return to_builtin(payload)

    def summary_line(self) -> str:
        """终端摘要行"""
        worst = max(self.residuals.values(), default=0.0)
        parts = [f"{self.hypothesis:<12}", format_verdict(self.verdict), f"max residual {format_scientific(worst)}"]
        if self.min_eigenvalue is not None:
            parts.append(f"min eig {format_scientific(self.min_eigenvalue)}")
        if "C" in self.constants:
            parts.append(f"C {format_scientific(self.constants['C'])}")
        return "  ".join(parts)
