"""
EntroFlux 终端摘要模块
"""

from typing import Dict, List, Mapping

from utils.helpers import format_scientific, format_verdict

# 摘要行中附带显示的数值字段
HIGHLIGHTS = ("worst_ratio", "max_violation", "refinement_factor", "separation", "c", "C")


def is_pass(report: Mapping) -> bool:
    """判定字段可能是布尔值或 "pass"/"fail" 字符串"""
    verdict = report.get("verdict")
    if isinstance(verdict, str):
        return verdict.lower() == "pass"
    return bool(verdict)


def summarize_reports(reports: Mapping[str, Mapping]) -> List[str]:
    """
    每个报告一行: 名称、PASS/FAIL 与若干关键数值

    Example:
        >>> summarize_reports({"H1": {"verdict": "pass"}})
        ['H1            PASS']
    """
    lines = []
    for name, report in reports.items():
        parts = [f"{name:<12}", format_verdict(is_pass(report))]
        for key in HIGHLIGHTS:
            value = report.get(key)
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                parts.append(f"{key} {format_scientific(value)}")
        lines.append("  ".join(parts))
    return lines


def overall_verdict(reports: Mapping[str, Mapping]) -> bool:
    return all(is_pass(r) for r in reports.values())


def verdict_table(reports: Mapping[str, Mapping]) -> Dict[str, str]:
    """{名称: "pass" | "fail"}"""
    return {name: format_verdict(is_pass(r)).lower() for name, r in reports.items()}
