"""
EntroFlux Reporting Package

JSON / CSV 报告、二进制快照与终端摘要
"""

from .artifacts import metadata_header, read_csv, read_json_report, render_json, write_csv, write_json_report
from .snapshots import load_trajectory, save_trajectory
from .summaries import is_pass, overall_verdict, summarize_reports, verdict_table

__all__ = [
    "metadata_header",
    "render_json",
    "write_json_report",
    "read_json_report",
    "write_csv",
    "read_csv",
    "save_trajectory",
    "load_trajectory",
    "summarize_reports",
    "overall_verdict",
    "verdict_table",
    "is_pass",
]
