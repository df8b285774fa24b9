"""
EntroFlux 报告产物模块

JSON 报告与 CSV 序列的写出; 每个产物带 {version, schema, seed, config_hash} 元数据头,
相同输入得到逐字节相同的输出
"""

import json
import logging
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import pandas as pd

from config import config
from utils.helpers import to_builtin

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
CSV_FLOAT_FORMAT = "%.17g"


def metadata_header(seed: Optional[int], config_hash: Optional[str]) -> Dict:
    """
    产物元数据头

    Example:
        >>> metadata_header(1, "ab")["config_hash"]
        'ab'
    """
    return {
        "version": config.VERSION,
        "schema": config.REPORT_SCHEMA,
        "seed": seed,
        "config_hash": config_hash,
    }


def render_json(payload: Dict, meta: Dict) -> str:
    """键排序、缩进 2 的 JSON 文本, 以换行结尾"""
    document = {"meta": to_builtin(meta), **to_builtin(payload)}
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json_report(path: PathLike, payload: Dict, meta: Dict) -> Path:
    """
    写出 JSON 报告

    Args:
        path: 目标文件
        payload: 报告内容 (numpy 值自动转换)
        meta: metadata_header 的结果

    Returns:
        写出的路径
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_json(payload, meta), encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def read_json_report(path: PathLike) -> Dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_csv(path: PathLike, frame: pd.DataFrame, meta: Dict) -> Path:
    """
    写出 CSV 序列, 元数据以开头的 "# key: value" 注释行给出
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = "".join(f"# {key}: {json.dumps(to_builtin(value))}\n" for key, value in sorted(meta.items()))
    body = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(header)
        handle.write(body)
    logger.debug("wrote %s (%d rows)", path, len(frame))
    return path


def read_csv(path: PathLike) -> Tuple[Dict, pd.DataFrame]:
    """读回 (元数据, DataFrame)"""
    meta = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition(": ")
            meta[key] = json.loads(value)
    frame = pd.read_csv(path, comment="#")
    return meta, frame
