"""
EntroFlux CLI Package

YAML 运行配置、六个实验子命令的调度与命令行入口
"""

from .app import build_parser, main
from .commands import COMMANDS, EXIT_ERROR, EXIT_FAIL, EXIT_PASS, dispatch
from .runconfig import DEFAULTS, RunConfig, config_hash, parse_config

__all__ = [
    "RunConfig",
    "DEFAULTS",
    "parse_config",
    "config_hash",
    "COMMANDS",
    "EXIT_PASS",
    "EXIT_FAIL",
    "EXIT_ERROR",
    "dispatch",
    "build_parser",
    "main",
]
