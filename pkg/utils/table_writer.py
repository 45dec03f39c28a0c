"""
CSV / JSON 输出工具。

CSV 由 pandas 写出（固定浮点格式，保证重复运行逐字节一致）；
运行摘要 run.json 由 orjson 写出（键排序，不含时间戳）。
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Sequence

import orjson
import pandas as pd

from utils.config import settings

METRICS_COLUMNS = (
    "point",
    "sweep_axis",
    "sweep_value (SI)",
    "z (m)",
    "group_velocity (m/s)",
    "delay (s)",
    "transmission_energy (1)",
    "transmission_peak (1)",
    "fitted_width (s)",
    "adiabaton_depth (1)",
    "transparency_window (rad/s)",
    "max_trace_drift (1)",
)

PULSE_COLUMNS = (
    "tau (s)",
    "re_omega_p (rad/s)",
    "im_omega_p (rad/s)",
    "abs_omega_p (rad/s)",
    "abs_omega_c (rad/s)",
)

FORCE_COLUMNS = (
    "tau (s)",
    "f_rp (N)",
    "f_dip (N)",
)


def write_table(path: Path, columns: Sequence[str], data: Mapping[str, Any], float_format: str = None) -> Path:
    """
    按给定列顺序写出 CSV。

    Args:
        path: 目标文件
        columns: 表头（顺序即输出顺序）
        data: 列名 → 数据
        float_format: 浮点格式，默认取 run.float_format
    """
    missing = [name for name in columns if name not in data]
    if missing:
        raise KeyError(f"缺少列: {missing}")
    frame = pd.DataFrame({name: data[name] for name in columns}, columns=list(columns))
    path = Path(path)
    frame.to_csv(
        path,
        index=False,
        float_format=float_format or settings.FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )
    return path


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    """写出键排序、缩进的 JSON（NaN/inf 记为 null）"""
    path = Path(path)
    path.write_bytes(
        orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)
        + b"\n"
    )
    return path


__all__ = ["METRICS_COLUMNS", "PULSE_COLUMNS", "FORCE_COLUMNS", "write_table", "write_json"]
