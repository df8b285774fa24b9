"""
EntroFlux 运行配置模块

YAML 运行配置的读取、默认值填充、全量校验与配置哈希
"""

import copy
import hashlib
import json
import logging
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from config import config
from measures.recession import QUANTITIES as RECESSION_QUANTITIES
from orlicz import NFUNCTIONS
from solver.initial import INITIAL_KINDS, InitialSpec
from solver.grid import TorusGrid
from solver.schemes import SCHEMES
from systems import get_system, list_systems
from systems.base import SystemSpec
from utils.errors import ConfigError, EntroFluxError, ParseError, ValidationError

logger = logging.getLogger(__name__)

# YAML 1.1 把 "1e4" 读成字符串
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "system": {"name": "euler", "d": None, "params": {}},
    "grid": {
        "N": 64,
        "N_ladder": [16, 32, 64],
        "T": 0.05,
        "cfl": 0.45,
        "snapshot_dt": None,
        "scheme": "lax-friedrichs",
    },
    "initial": {"kind": None, "params": {}},
    "hypotheses": {
        "samples": 1000,
        "reference_samples": 200,
        "ray_directions": 64,
        "s_min": 1e1,
        "s_max": 1e6,
        "s_points": 21,
        "box": None,
        "constraint_ladder": [16, 32, 64],
    },
    "measures": {
        "k_ladder": [1e1, 1e2, 1e3, 1e4],
        "coarse_N": 8,
        "epsilon_ladder": None,
        "slab_edges": None,
        "quantities": ["eta", "A"],
        "recession_quantities": ["A", "eta_rel"],
        "recession_probes": 16,
        "recession_s_max": 1e4,
    },
    "harness": {
        "N_ref": config.PROBE_N_REF,
        "coarsening": config.YOUNG_COARSENING,
        "control": True,
        "data_mismatch": 0.0,
    },
    "orlicz": {"pairs": 100000, "sample_max": 100.0, "functions": ["M1", "M2"]},
    "output": {"dir": "out"},
}
SECTIONS = ("seed",) + tuple(DEFAULTS)


@dataclass
class RunConfig:
    """
    解析并校验后的运行配置

    每个节为一个已填充默认值的 dict; seed 必填
    """

    seed: int
    system: Dict[str, Any] = field(default_factory=dict)
    grid: Dict[str, Any] = field(default_factory=dict)
    initial: Dict[str, Any] = field(default_factory=dict)
    hypotheses: Dict[str, Any] = field(default_factory=dict)
    measures: Dict[str, Any] = field(default_factory=dict)
    harness: Dict[str, Any] = field(default_factory=dict)
    orlicz: Dict[str, Any] = field(default_factory=dict)
    output: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def build_system(self, strict_vacuum: Optional[bool] = None) -> SystemSpec:
        params = dict(self.system["params"])
        if strict_vacuum is not None and self.system["name"] in ("euler", "swmhd"):
            params["strict_vacuum"] = strict_vacuum
        return get_system(self.system["name"], d=self.system["d"], **params)

    def build_grid(self, N: Optional[int] = None, store_every_step: bool = False) -> TorusGrid:
        g = self.grid
        return TorusGrid(
            d=self.space_dim,
            N=int(N if N is not None else g["N"]),
            T=float(g["T"]),
            cfl=float(g["cfl"]),
            snapshot_dt=g["snapshot_dt"],
            store_every_step=store_every_step,
        )

    def build_initial(self) -> InitialSpec:
        if self.initial["kind"] is None:
            raise ConfigError("this command needs an 'initial' section with a kind")
        return InitialSpec(self.initial["kind"], dict(self.initial["params"]))

    @property
    def space_dim(self) -> int:
        return self.build_system().space_dim


def coerce_numbers(value: Any) -> Any:
    """递归把数字样式的字符串转为 float"""
    if isinstance(value, dict):
        return {k: coerce_numbers(v) for k, v in value.items()}
    if isinstance(value, list):
        return [coerce_numbers(v) for v in value]
    if isinstance(value, str) and _NUMBER.match(value.strip()):
        return float(value)
    return value


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_numeric_list(values) -> bool:
    return isinstance(values, list) and all(_is_number(v) for v in values)


def _increasing(values) -> bool:
    return _is_numeric_list(values) and len(values) >= 1 and all(b > a for a, b in zip(values, values[1:]))


def _positive_int(value, minimum: int = 1) -> bool:
    return _is_number(value) and int(value) == value and value >= minimum


def _validate_system(cfg: RunConfig) -> List[str]:
    name = cfg.system["name"]
    if name not in list_systems():
        return [f"system.name '{name}' is not registered; registered ids: {', '.join(list_systems())}"]
    d = cfg.system["d"]
    if d is not None and not _positive_int(d):
        return [f"system.d must be a positive integer, got {d!r}"]
    if not isinstance(cfg.system["params"], dict):
        return ["system.params must be a mapping"]
    try:
        cfg.build_system()
    except EntroFluxError as exc:
        return list(getattr(exc, "errors", [str(exc)]))
    except (TypeError, ValueError) as exc:
        return [f"system.params for '{name}' are malformed: {exc}"]
    return []


def _try_build_system(cfg: RunConfig) -> Optional[SystemSpec]:
    try:
        return cfg.build_system()
    except (EntroFluxError, TypeError, ValueError):
        return None


def _validate_grid(cfg: RunConfig) -> List[str]:
    errors = []
    g = cfg.grid
    if not _positive_int(g["N"], 2):
        errors.append(f"grid.N must be an integer >= 2, got {g['N']!r}")
    if not _is_number(g["cfl"]) or not 0.0 < g["cfl"] < 1.0:
        errors.append(f"grid.cfl must lie in (0, 1) (CFL condition), got {g['cfl']!r}")
    if not _is_number(g["T"]) or not g["T"] > 0:
        errors.append(f"grid.T must be positive, got {g['T']!r}")
    if not _increasing(g["N_ladder"]) or not all(_positive_int(N, 2) for N in g["N_ladder"]):
        errors.append(f"grid.N_ladder must be a strictly increasing list of integers, got {g['N_ladder']!r}")
    if g["scheme"] not in SCHEMES:
        errors.append(f"grid.scheme '{g['scheme']}' unknown; available: {', '.join(SCHEMES)}")
    if g["snapshot_dt"] is not None and not (_is_number(g["snapshot_dt"]) and g["snapshot_dt"] > 0):
        errors.append(f"grid.snapshot_dt must be positive, got {g['snapshot_dt']!r}")
    return errors


def _validate_initial(cfg: RunConfig) -> List[str]:
    errors = []
    kind = cfg.initial["kind"]
    if kind is not None and kind not in INITIAL_KINDS:
        errors.append(f"initial.kind '{kind}' unknown; available: {', '.join(INITIAL_KINDS)}")
    if not isinstance(cfg.initial["params"], dict):
        errors.append("initial.params must be a mapping")
    return errors


def _validate_hypotheses(cfg: RunConfig) -> List[str]:
    errors = []
    h = cfg.hypotheses
    for key in ("samples", "reference_samples", "ray_directions"):
        if not _positive_int(h[key]):
            errors.append(f"hypotheses.{key} must be a positive integer, got {h[key]!r}")
    if not _positive_int(h["s_points"], 2):
        errors.append(f"hypotheses.s_points must be an integer >= 2, got {h['s_points']!r}")
    if not (_is_number(h["s_min"]) and _is_number(h["s_max"]) and 0 < h["s_min"] < h["s_max"]):
        errors.append(f"hypotheses.s_min must satisfy 0 < s_min < s_max, got {h['s_min']!r}, {h['s_max']!r}")
    box = h["box"]
    if box is not None:
        if not isinstance(box, list) or not all(_is_numeric_list(pair) and len(pair) == 2 for pair in box):
            errors.append("hypotheses.box must be a list of [low, high] intervals")
        else:
            system = _try_build_system(cfg)
            if system is not None and len(box) != system.state_dim:
                errors.append(f"hypotheses.box needs {system.state_dim} intervals, got {len(box)}")
    return errors


def _validate_measures(cfg: RunConfig) -> List[str]:
    errors = []
    m = cfg.measures
    if not _increasing(m["k_ladder"]):
        errors.append(f"measures.k_ladder must be strictly increasing, got {m['k_ladder']!r}")
    eps = m["epsilon_ladder"]
    if eps is not None and not (_is_numeric_list(eps) and all(e > 0 for e in eps)):
        errors.append("measures.epsilon_ladder must hold positive radii")
    edges = m["slab_edges"]
    if edges is not None and not (_increasing(edges) and len(edges) >= 2):
        errors.append(f"measures.slab_edges must be a strictly increasing list of >= 2 times, got {edges!r}")
    if not isinstance(m["quantities"], list):
        errors.append("measures.quantities must be a list")
    else:
        for quantity in m["quantities"]:
            if not re.fullmatch(r"eta|A|F\d+", str(quantity)):
                errors.append(f"measures.quantities: unknown quantity '{quantity}' (eta, A or F<direction>)")
    if not isinstance(m["recession_quantities"], list):
        errors.append("measures.recession_quantities must be a list")
    else:
        for quantity in m["recession_quantities"]:
            if quantity not in RECESSION_QUANTITIES:
                errors.append(f"measures.recession_quantities: unknown '{quantity}'; available: {', '.join(RECESSION_QUANTITIES)}")
    if not _positive_int(m["recession_probes"]):
        errors.append(f"measures.recession_probes must be a positive integer, got {m['recession_probes']!r}")
    if not _is_number(m["recession_s_max"]) or m["recession_s_max"] <= 1:
        errors.append(f"measures.recession_s_max must exceed 1, got {m['recession_s_max']!r}")
    if not _positive_int(m["coarse_N"]):
        errors.append(f"measures.coarse_N must be a positive integer, got {m['coarse_N']!r}")
    else:
        g = cfg.grid
        ladder = g["N_ladder"] if _is_numeric_list(g["N_ladder"]) else []
        for N in ([g["N"]] if _is_number(g["N"]) else []) + ladder:
            if N >= 1 and int(N) % int(m["coarse_N"]):
                errors.append(f"measures.coarse_N={m['coarse_N']} does not divide N={N}")
    return errors


def _validate_harness(cfg: RunConfig) -> List[str]:
    errors = []
    hz = cfg.harness
    if not _positive_int(hz["coarsening"]):
        errors.append(f"harness.coarsening must be a positive integer, got {hz['coarsening']!r}")
    if not _is_number(hz["data_mismatch"]) or hz["data_mismatch"] < 0:
        errors.append(f"harness.data_mismatch must be >= 0, got {hz['data_mismatch']!r}")
    if not isinstance(hz["control"], bool):
        errors.append(f"harness.control must be true or false, got {hz['control']!r}")
    if not _positive_int(hz["N_ref"]):
        errors.append(f"harness.N_ref must be a positive integer, got {hz['N_ref']!r}")
    elif _is_numeric_list(cfg.grid["N_ladder"]):
        for N in cfg.grid["N_ladder"]:
            if N >= 1 and int(hz["N_ref"]) % int(N):
                errors.append(f"harness.N_ref={hz['N_ref']} is not a multiple of N={N}")
    return errors


def _validate_orlicz(cfg: RunConfig) -> List[str]:
    errors = []
    o = cfg.orlicz
    if not _positive_int(o["pairs"]):
        errors.append(f"orlicz.pairs must be a positive integer, got {o['pairs']!r}")
    if not _is_number(o["sample_max"]) or o["sample_max"] <= 0:
        errors.append(f"orlicz.sample_max must be positive, got {o['sample_max']!r}")
    if not isinstance(o["functions"], list):
        errors.append("orlicz.functions must be a list")
    else:
        for name in o["functions"]:
            if name not in NFUNCTIONS:
                errors.append(f"orlicz.functions: unknown N-function '{name}'; available: {', '.join(NFUNCTIONS)}")
    return errors


VALIDATORS = {
    "system": _validate_system,
    "grid": _validate_grid,
    "initial": _validate_initial,
    "hypotheses": _validate_hypotheses,
    "measures": _validate_measures,
    "harness": _validate_harness,
    "orlicz": _validate_orlicz,
}


def _validate(cfg: RunConfig) -> List[str]:
    """逐节收集全部校验错误; 某节内部的意外类型错误只记入该节"""
    errors = []
    for section, check in VALIDATORS.items():
        try:
            errors.extend(check(cfg))
        except (TypeError, ValueError) as exc:
            errors.append(f"{section}: malformed value ({exc})")
    return errors


def parse_config(
    path: Optional[Union[str, Path]],
    seed_override: Optional[int] = None,
    system_override: Optional[str] = None
) -> RunConfig:
    """
    读取并校验 YAML 运行配置

    Args:
        path: 配置文件; None 时全部取默认值
        seed_override: 命令行 --seed (优先于文件)
        system_override: 命令行 --system (优先于文件)

    Returns:
        RunConfig

    Raises:
        ParseError: 文件不可读或 YAML 语法错误 (含行列号)
        ValidationError: 全部校验错误的列表

    Example:
        >>> cfg = parse_config("configs/euler_hypotheses.yaml")
        >>> cfg.grid["cfl"]
        0.45
    """
    path = Path(path) if path is not None else None
    try:
        text = path.read_text(encoding="utf-8") if path is not None else ""
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ParseError(f"{path}{where}: {problem}") from exc
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be a mapping of sections")
    raw = coerce_numbers(raw)
    if system_override is not None:
        section = raw.get("system")
        raw["system"] = dict(section if isinstance(section, dict) else {}, name=system_override)

    errors = [f"unknown section '{key}'; allowed: {', '.join(SECTIONS)}" for key in raw if key not in SECTIONS]
    sections = {}
    for name, defaults in DEFAULTS.items():
        given = raw.get(name) or {}
        if not isinstance(given, dict):
            errors.append(f"section '{name}' must be a mapping")
            given = {}
        for key in given:
            if key not in defaults:
                errors.append(f"unknown key '{name}.{key}'; allowed: {', '.join(defaults)}")
        merged = copy.deepcopy(defaults)
        merged.update({k: v for k, v in given.items() if k in defaults})
        sections[name] = merged

    seed = raw.get("seed") if seed_override is None else seed_override
    if seed is None:
        errors.append("seed is required")
        seed = 0
    elif not isinstance(seed, (int, float)) or int(seed) != seed:
        errors.append(f"seed must be an integer, got {seed!r}")
        seed = 0
    for key in ("N", "N_ladder"):
        value = sections["grid"][key]
        if isinstance(value, float) and value.is_integer():
            sections["grid"][key] = int(value)
        elif isinstance(value, list):
            sections["grid"][key] = [int(v) if isinstance(v, float) and v.is_integer() else v for v in value]

    cfg = RunConfig(seed=int(seed), **sections)
    errors.extend(_validate(cfg))
    if errors:
        raise ValidationError(errors)
    logger.info("loaded %s (system %s, seed %d)", path or "defaults", cfg.system["name"], cfg.seed)
    return cfg


def config_hash(cfg: RunConfig) -> str:
    """规范化 (键排序) JSON 的 SHA-256 十六进制摘要"""
    canonical = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
