# -*- coding: utf-8 -*-
"""
场景：声明式实验描述 → 传播运行 → 表格输出。

场景文件为 UTF-8 的 `key = value` 文本，`#` 起注释。数值语法:
    0.18A, A/3, 80/A, 2pi*5.9e6, -A, 63zeta_p, 3.3e12cm^-3, 普通 SI 数
列表以逗号分隔，布尔值为 true/false。
"""
from __future__ import annotations

import asyncio
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.config import settings
from utils.logger import sim_logger
from utils.table_writer import (
    FORCE_COLUMNS,
    METRICS_COLUMNS,
    PULSE_COLUMNS,
    write_json,
    write_table,
)
from .atomsys import AtomParams, Geometry, LaserParams, SystemVariant, dipole_from_decay
from .constants import (
    C_LIGHT,
    CM3_TO_M3,
    DEFAULT_SLICES_IN_BEER_LENGTHS,
    SODIUM_A,
    SODIUM_LAMBDA,
    SODIUM_MASS,
)
from .diagnostics import (
    ForceSummary,
    PulseMetrics,
    adiabaticity_profile,
    adiabaton_depth,
    force_summary,
    forces,
    nc_projection_trace,
    pulse_metrics,
    transparency_window,
)
from .errors import (
    DiagnosticError,
    GridError,
    ScenarioParseError,
    ScenarioValidationError,
    SolverError,
    SweepPointError,
)
from .maxwell_bloch import Grid, SolverStats, beer_length, propagate
from .memory import monitor_memory
from .presets import PRESETS

__all__ = [
    "Length",
    "GridSpec",
    "Sweep",
    "Scenario",
    "SliceTable",
    "PointRecord",
    "RunRecord",
    "parse_quantity",
    "parse_scenario_text",
    "load_scenario",
    "save_scenario",
    "scenario_to_mapping",
    "preset",
    "run_async",
    "run",
    "emit_csv",
]

SWEEP_AXES = ("density", "omega_c", "pulse_width", "gamma_cp", "delta")
OUTPUT_KINDS = ("pulse", "forces")
MANDATORY_KEYS = ("density", "omega_c", "omega_p_peak", "pulse_width", "z_max")

_RATE_KEYS = {"gamma_c", "gamma_p", "gamma_out", "gamma_cp", "omega_c", "omega_p_peak", "delta_c", "delta_p"}
_TIME_KEYS = {"pulse_width", "pulse_center", "tau_min", "tau_max"}
_PLAIN_KEYS = {"A", "lambda_c", "lambda_p", "mass", "dipole_c", "dipole_p"}
_INT_KEYS = {"n_z", "n_tau", "workers"}
_OTHER_KEYS = {
    "name", "preset", "geometry", "density", "z_max", "variant", "momentum_mode",
    "sweep_axis", "sweep_values", "slices", "outputs",
}
KNOWN_KEYS = _RATE_KEYS | _TIME_KEYS | _PLAIN_KEYS | _INT_KEYS | _OTHER_KEYS

_AXIS_KIND = {"density": "density", "omega_c": "rate", "pulse_width": "time", "gamma_cp": "rate", "delta": "rate"}

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<word>pi|zeta_p|cm\^-3|A)"
    r"|(?P<op>[*/])"
    r"|(?P<space>\s+)"
)


# ---------------------------------------------------------
# 数值语法
# ---------------------------------------------------------
@dataclass(frozen=True)
class Quantity:
    """解析后的数值：value × A^a_power × ζ_p^zeta_power"""

    value: float
    a_power: int = 0
    zeta_power: int = 0


def parse_quantity(text: str) -> Quantity:
    """解析单个数值表达式，失败时抛出 ValueError"""
    source = text.strip()
    sign = 1.0
    if source[:1] in ("+", "-"):
        sign = -1.0 if source[0] == "-" else 1.0
        source = source[1:]
    value, a_power, zeta_power = 1.0, 0, 0
    pending, expect_factor, seen = "*", True, False
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ValueError(f"无法解析 '{source[pos:]}'")
        pos = match.end()
        kind, token = match.lastgroup, match.group()
        if kind == "space":
            continue
        if kind == "op":
            if expect_factor:
                raise ValueError(f"运算符 '{token}' 位置错误")
            pending, expect_factor = token, True
            continue
        factor, da, dz = 1.0, 0, 0
        if kind == "num":
            factor = float(token)
        elif token == "pi":
            factor = math.pi
        elif token == "A":
            da = 1
        elif token == "zeta_p":
            dz = 1
        else:
            factor = CM3_TO_M3
        if pending == "/":
            if factor == 0:
                raise ValueError("除数为零")
            value, a_power, zeta_power = value / factor, a_power - da, zeta_power - dz
        else:
            value, a_power, zeta_power = value * factor, a_power + da, zeta_power + dz
        pending, expect_factor, seen = "*", False, True
    if not seen or expect_factor:
        raise ValueError(f"表达式不完整: '{text.strip()}'")
    if not math.isfinite(value):
        raise ValueError(f"数值溢出: '{text.strip()}'")
    return Quantity(sign * value, a_power, zeta_power)


def _format_float(value: float) -> str:
    return repr(float(value))


# ---------------------------------------------------------
# 场景类型
# ---------------------------------------------------------
@dataclass(frozen=True)
class Length:
    """长度：米或 Beer 长度 ζ_p 的倍数"""

    value: float
    unit: str = "m"

    def resolve(self, zeta_p: float, key: str = "z_max") -> float:
        if self.unit == "m":
            return self.value
        if self.value == 0:
            return 0.0
        if not math.isfinite(zeta_p):
            raise ScenarioValidationError(key, "密度为零时 ζ_p 无定义，请以米为单位给出长度")
        return self.value * zeta_p

    @property
    def label(self) -> str:
        if self.unit == "zeta_p":
            return f"{self.value:g}"
        return f"{self.value * 1e6:g}um"

    def to_text(self) -> str:
        return _format_float(self.value) + ("zeta_p" if self.unit == "zeta_p" else "")


@dataclass(frozen=True)
class GridSpec:
    """网格请求；未给出的项在每个扫描点上由 Grid.auto 决定"""

    z_max: Length
    n_z: Optional[int] = None
    n_tau: Optional[int] = None
    tau_min: Optional[float] = None
    tau_max: Optional[float] = None


@dataclass(frozen=True)
class Sweep:
    axis: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    atoms: AtomParams
    lasers: LaserParams
    grid: GridSpec
    variant: SystemVariant = SystemVariant.OPEN
    momentum_mode: bool = False
    sweep: Optional[Sweep] = None
    outputs: Tuple[str, ...] = OUTPUT_KINDS
    slices: Optional[Tuple[Length, ...]] = None
    seed_label: str = "scenario"
    preset: Optional[str] = None
    workers: Optional[int] = None

    @property
    def zeta_p(self) -> float:
        return beer_length(self.atoms, self.lasers.density)

    def with_sweep_value(self, value: float) -> "Scenario":
        """将扫描轴取值写入参数，返回单点场景"""
        axis = self.sweep.axis if self.sweep else None
        atoms, lasers = self.atoms, self.lasers
        if axis == "density":
            lasers = lasers.with_changes(density=value)
        elif axis == "omega_c":
            lasers = lasers.with_changes(omega_c_rabi=value)
        elif axis == "pulse_width":
            lasers = lasers.with_changes(pulse_width=value)
        elif axis == "gamma_cp":
            atoms = atoms.with_changes(gamma_cp=value)
        elif axis == "delta":
            lasers = lasers.with_changes(delta_c=value, delta_p=value)
        else:
            raise ScenarioValidationError("sweep_axis", f"未知扫描轴 {axis!r}")
        return replace(self, atoms=atoms, lasers=lasers, sweep=None)

    def points(self) -> List[Tuple[int, Optional[float], "Scenario"]]:
        """展开为 (序号, 扫描值, 单点场景) 列表"""
        if self.sweep is None:
            return [(0, None, self)]
        return [(i, value, self.with_sweep_value(value)) for i, value in enumerate(self.sweep.values)]

    def z_max_m(self) -> float:
        return self.grid.z_max.resolve(self.zeta_p, "z_max")

    def resolve_grid(self) -> Grid:
        return Grid.auto(
            self.atoms,
            self.lasers,
            self.z_max_m(),
            momentum_mode=self.momentum_mode,
            n_tau=self.grid.n_tau,
            n_z=self.grid.n_z,
            tau_min=self.grid.tau_min,
            tau_max=self.grid.tau_max,
        )

    def requested_slices(self) -> List[Tuple[str, float]]:
        """输出表格对应的切片 (标签, z/m)，按 z 升序"""
        zeta = self.zeta_p
        z_max = self.z_max_m()
        chosen: List[Tuple[str, float]] = []
        if self.slices is None:
            for value in DEFAULT_SLICES_IN_BEER_LENGTHS:
                length = Length(value, "zeta_p")
                if value == 0 or math.isfinite(zeta):
                    z = length.resolve(zeta, "slices")
                    if z <= z_max * (1.0 + 1e-9):
                        chosen.append((length.label, z))
            chosen.append((self.grid.z_max.label, z_max))
        else:
            for length in self.slices:
                z = length.resolve(zeta, "slices")
                if z < 0 or z > z_max * (1.0 + 1e-9):
                    raise ScenarioValidationError("slices", f"切片 {length.to_text()} 超出 [0, z_max]")
                chosen.append((length.label, min(z, z_max)))
        unique: List[Tuple[str, float]] = []
        for label, z in sorted(chosen, key=lambda item: item[1]):
            if not any(math.isclose(z, other, rel_tol=1e-9, abs_tol=0.0) for _, other in unique):
                unique.append((label, z))
        return unique

    def resolve_slices(self) -> List[float]:
        return [z for _, z in self.requested_slices()]

    def check(self) -> None:
        """逐个扫描点解析网格与切片，网格问题转为校验错误"""
        for index, value, point in self.points():
            try:
                grid = point.resolve_grid()
                grid.validate(point.atoms, point.lasers, momentum_mode=point.momentum_mode)
                point.requested_slices()
            except GridError as exc:
                where = f"（扫描点 #{index}, 取值 {value!r}）" if self.sweep else ""
                raise ScenarioValidationError("grid", f"{exc}{where}") from exc


# ---------------------------------------------------------
# 解析
# ---------------------------------------------------------
RawEntries = Dict[str, Tuple[str, int]]


def _split_lines(text: str) -> RawEntries:
    entries: RawEntries = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ScenarioParseError(number, f"缺少 '=': {line.strip()!r}")
        key, value = (part.strip() for part in content.split("=", 1))
        if not key:
            raise ScenarioParseError(number, "键名为空")
        if key not in KNOWN_KEYS:
            raise ScenarioParseError(number, f"未知键 {key!r}")
        if key in entries:
            raise ScenarioParseError(number, f"重复的键 {key!r}（首次出现于第 {entries[key][1]} 行）")
        if not value:
            raise ScenarioParseError(number, f"键 {key!r} 的值为空")
        entries[key] = (value, number)
    return entries


class _Builder:
    """把原始键值转换为带单位的数值"""

    def __init__(self, entries: RawEntries):
        self.entries = entries
        self.A = SODIUM_A
        if "A" in entries:
            self.A = self._convert("A", "plain", *entries["A"])

    def has(self, key: str) -> bool:
        return key in self.entries

    def _fail(self, key: str, line: int, exc: Exception):
        if line > 0:
            return ScenarioParseError(line, f"{key}: {exc}")
        return ScenarioValidationError(key, str(exc))

    def _convert(self, key: str, kind: str, text: str, line: int) -> Any:
        try:
            q = parse_quantity(text)
            if kind == "length":
                if q.a_power != 0 or q.zeta_power not in (0, 1):
                    raise ValueError("长度须以米或 zeta_p 为单位")
                return Length(q.value, "zeta_p" if q.zeta_power else "m")
            if q.zeta_power != 0:
                raise ValueError("只有长度可以使用 zeta_p")
            if kind == "rate":
                if q.a_power not in (0, 1):
                    raise ValueError("速率须为 rad/s 或 A 的倍数")
                return q.value * self.A ** q.a_power
            if kind == "time":
                if q.a_power not in (0, -1):
                    raise ValueError("时间须为秒或 1/A 的倍数")
                return q.value * self.A ** q.a_power
            if q.a_power != 0:
                raise ValueError("该键不接受 A 单位")
            return q.value
        except ValueError as exc:
            raise self._fail(key, line, exc) from exc

    def number(self, key: str, kind: str, default: Any = None) -> Any:
        if key not in self.entries:
            return default
        return self._convert(key, kind, *self.entries[key])

    def numbers(self, key: str, kind: str) -> Tuple[Any, ...]:
        text, line = self.entries[key]
        items = [item.strip() for item in text.split(",")]
        if any(not item for item in items):
            raise self._fail(key, line, ValueError("列表中存在空项"))
        return tuple(self._convert(key, kind, item, line) for item in items)

    def integer(self, key: str) -> Optional[int]:
        if key not in self.entries:
            return None
        text, line = self.entries[key]
        try:
            value = int(text)
        except ValueError as exc:
            raise self._fail(key, line, ValueError(f"需要整数，实际为 {text!r}")) from exc
        if value < 1:
            raise ScenarioValidationError(key, "必须为正整数")
        return value

    def text(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.entries[key][0] if key in self.entries else default

    def boolean(self, key: str, default: bool = False) -> bool:
        if key not in self.entries:
            return default
        text, line = self.entries[key]
        lowered = text.lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        raise self._fail(key, line, ValueError(f"需要布尔值，实际为 {text!r}"))

    def choice(self, key: str, enum_type, default):
        if key not in self.entries:
            return default
        try:
            return enum_type(self.entries[key][0])
        except ValueError as exc:
            allowed = ", ".join(member.value for member in enum_type)
            raise ScenarioValidationError(key, f"取值须为 {allowed}") from exc


def _decay_rates(builder: _Builder) -> Tuple[float, float, float]:
    keys = ("gamma_c", "gamma_p", "gamma_out")
    given = {key: builder.number(key, "rate") for key in keys if builder.has(key)}
    if not given:
        return builder.A / 3.0, builder.A / 2.0, builder.A / 6.0
    missing = [key for key in keys if key not in given]
    if len(missing) == 1:
        given[missing[0]] = builder.A - sum(given.values())
    elif missing:
        raise ScenarioValidationError(missing[0], "Γ_c、Γ_p、Γ_out 至少需给出其中两个")
    return given["gamma_c"], given["gamma_p"], given["gamma_out"]


def _dipole(builder: _Builder, key: str, rate: float, wavelength: float) -> float:
    if builder.has(key):
        return builder.number(key, "plain")
    if rate <= 0:
        raise ScenarioValidationError(key, "对应分支衰减率为零，必须显式给出偶极矩")
    return dipole_from_decay(rate, 2.0 * math.pi * C_LIGHT / wavelength)


def _build_scenario(entries: RawEntries) -> Scenario:
    merged: RawEntries = {}
    preset_name = entries["preset"][0] if "preset" in entries else None
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ScenarioValidationError("preset", f"未知预设 {preset_name!r}")
        merged.update({key: (value, 0) for key, value in PRESETS[preset_name].items()})
    merged.update(entries)
    for key in MANDATORY_KEYS:
        if key not in merged:
            raise ScenarioValidationError(key, "缺少必填键")

    b = _Builder(merged)
    gamma_c, gamma_p, gamma_out = _decay_rates(b)
    lambda_c = b.number("lambda_c", "plain", SODIUM_LAMBDA)
    lambda_p = b.number("lambda_p", "plain", SODIUM_LAMBDA)
    atoms = AtomParams(
        A=b.A,
        gamma_c=gamma_c,
        gamma_p=gamma_p,
        gamma_out=gamma_out,
        gamma_cp=b.number("gamma_cp", "rate", 0.0),
        mass=b.number("mass", "plain", SODIUM_MASS),
        lambda_c=lambda_c,
        lambda_p=lambda_p,
        dipole_c=_dipole(b, "dipole_c", gamma_c, lambda_c),
        dipole_p=_dipole(b, "dipole_p", gamma_p, lambda_p),
        geometry=b.choice("geometry", Geometry, Geometry.ORTHOGONAL),
    )
    lasers = LaserParams(
        omega_c_rabi=b.number("omega_c", "rate"),
        omega_p_peak=b.number("omega_p_peak", "rate"),
        pulse_width=b.number("pulse_width", "time"),
        density=b.number("density", "plain"),
        delta_c=b.number("delta_c", "rate", 0.0),
        delta_p=b.number("delta_p", "rate", 0.0),
        pulse_center=b.number("pulse_center", "time", 0.0),
    )
    grid = GridSpec(
        z_max=b.number("z_max", "length"),
        n_z=b.integer("n_z"),
        n_tau=b.integer("n_tau"),
        tau_min=b.number("tau_min", "time"),
        tau_max=b.number("tau_max", "time"),
    )
    if grid.z_max.value <= 0:
        raise ScenarioValidationError("z_max", "传播深度必须为正")

    sweep = None
    axis = b.text("sweep_axis")
    if axis is not None:
        if axis not in SWEEP_AXES:
            raise ScenarioValidationError("sweep_axis", f"取值须为 {', '.join(SWEEP_AXES)}")
        if not b.has("sweep_values"):
            raise ScenarioValidationError("sweep_values", "给出 sweep_axis 时必须给出扫描值")
        sweep = Sweep(axis, tuple(float(v) for v in b.numbers("sweep_values", _AXIS_KIND[axis])))
    elif b.has("sweep_values"):
        raise ScenarioValidationError("sweep_axis", "给出 sweep_values 时必须给出扫描轴")

    slices = None
    if b.has("slices"):
        slices = b.numbers("slices", "length")
        if any(length.value < 0 for length in slices):
            raise ScenarioValidationError("slices", "切片位置不能为负")
        if all(length.unit == grid.z_max.unit for length in slices):
            if any(length.value > grid.z_max.value * (1.0 + 1e-9) for length in slices):
                raise ScenarioValidationError("slices", "切片必须位于 [0, z_max] 内")

    outputs: Tuple[str, ...] = OUTPUT_KINDS
    if b.has("outputs"):
        raw = b.text("outputs").strip().lower()
        outputs = () if raw == "none" else tuple(item.strip() for item in raw.split(","))
        unknown = [item for item in outputs if item not in OUTPUT_KINDS]
        if unknown:
            raise ScenarioValidationError("outputs", f"未知输出 {unknown}，可选 {', '.join(OUTPUT_KINDS)}")

    scenario = Scenario(
        atoms=atoms,
        lasers=lasers,
        grid=grid,
        variant=b.choice("variant", SystemVariant, SystemVariant.OPEN),
        momentum_mode=b.boolean("momentum_mode"),
        sweep=sweep,
        outputs=outputs,
        slices=slices,
        seed_label=b.text("name", preset_name or "scenario"),
        preset=preset_name,
        workers=b.integer("workers"),
    )
    return scenario


def parse_scenario_text(text: str) -> Scenario:
    """解析场景文本并完成全部校验"""
    scenario = _build_scenario(_split_lines(text))
    scenario.check()
    return scenario


def preset(name: str) -> Scenario:
    """按名称构造内置预设场景"""
    return parse_scenario_text(f"preset = {name}\n")


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    读取场景文件；若路径不存在但与内置预设同名，则返回该预设。
    """
    target = Path(path)
    if not target.exists() and str(path) in PRESETS:
        return preset(str(path))
    text = target.read_text(encoding="utf-8")
    scenario = parse_scenario_text(text)
    sim_logger.info(f"已加载场景 {scenario.seed_label!r} ({target})")
    return scenario


def scenario_to_mapping(scenario: Scenario) -> Dict[str, str]:
    """规范化的 键 → 文本 映射（save_scenario 与 run.json 共用）"""
    atoms, lasers, grid = scenario.atoms, scenario.lasers, scenario.grid
    mapping: Dict[str, str] = {"name": scenario.seed_label}
    if scenario.preset is not None:
        mapping["preset"] = scenario.preset
    mapping.update({
        "A": _format_float(atoms.A),
        "gamma_c": _format_float(atoms.gamma_c),
        "gamma_p": _format_float(atoms.gamma_p),
        "gamma_out": _format_float(atoms.gamma_out),
        "gamma_cp": _format_float(atoms.gamma_cp),
        "mass": _format_float(atoms.mass),
        "lambda_c": _format_float(atoms.lambda_c),
        "lambda_p": _format_float(atoms.lambda_p),
        "dipole_c": _format_float(atoms.dipole_c),
        "dipole_p": _format_float(atoms.dipole_p),
        "geometry": atoms.geometry.value,
        "density": _format_float(lasers.density),
        "omega_c": _format_float(lasers.omega_c_rabi),
        "omega_p_peak": _format_float(lasers.omega_p_peak),
        "pulse_width": _format_float(lasers.pulse_width),
        "pulse_center": _format_float(lasers.pulse_center),
        "delta_c": _format_float(lasers.delta_c),
        "delta_p": _format_float(lasers.delta_p),
        "z_max": grid.z_max.to_text(),
    })
    for key in ("n_z", "n_tau"):
        if getattr(grid, key) is not None:
            mapping[key] = str(getattr(grid, key))
    for key in ("tau_min", "tau_max"):
        if getattr(grid, key) is not None:
            mapping[key] = _format_float(getattr(grid, key))
    mapping["variant"] = scenario.variant.value
    mapping["momentum_mode"] = "true" if scenario.momentum_mode else "false"
    if scenario.sweep is not None:
        mapping["sweep_axis"] = scenario.sweep.axis
        mapping["sweep_values"] = ", ".join(_format_float(v) for v in scenario.sweep.values)
    if scenario.slices is not None:
        mapping["slices"] = ", ".join(length.to_text() for length in scenario.slices)
    mapping["outputs"] = ", ".join(scenario.outputs) if scenario.outputs else "none"
    if scenario.workers is not None:
        mapping["workers"] = str(scenario.workers)
    return mapping


def save_scenario(scenario: Scenario, path: Union[str, Path]) -> Path:
    """以规范格式写出场景文件（load_scenario 的逆）"""
    target = Path(path)
    lines = ["# slowlight scenario"]
    lines.extend(f"{key} = {value}" for key, value in scenario_to_mapping(scenario).items())
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


# ---------------------------------------------------------
# 运行
# ---------------------------------------------------------
@dataclass(eq=False)
class SliceTable:
    label: str
    z: float
    tau: np.ndarray
    omega_p: Optional[np.ndarray] = None
    omega_c: Optional[np.ndarray] = None
    f_rp: Optional[np.ndarray] = None
    f_dip: Optional[np.ndarray] = None


@dataclass(eq=False)
class PointRecord:
    index: int
    axis: Optional[str]
    value: Optional[float]
    z: float
    zeta_p: float
    metrics: Optional[PulseMetrics]
    transparency_window: float
    adiabaton_depth: float
    adiabaticity_max_ratio: float
    nc_projection_min: float
    forces: List[ForceSummary] = field(default_factory=list)
    tables: List[SliceTable] = field(default_factory=list)
    stats: SolverStats = field(default_factory=SolverStats)
    directory: str = ""

    def summary(self) -> Dict[str, Any]:
        stats = asdict(self.stats)
        stats.pop("wall_time", None)
        return {
            "index": self.index,
            "sweep_axis": self.axis,
            "sweep_value": self.value,
            "z": self.z,
            "zeta_p": self.zeta_p,
            "metrics": asdict(self.metrics) if self.metrics else None,
            "transparency_window": self.transparency_window,
            "adiabaton_depth": self.adiabaton_depth,
            "adiabaticity_max_ratio": self.adiabaticity_max_ratio,
            "nc_projection_min": self.nc_projection_min,
            "forces": [dict(asdict(item), ratio=item.ratio) for item in self.forces],
            "solver": stats,
        }


@dataclass(eq=False)
class RunRecord:
    scenario: Scenario
    points: List[PointRecord]

    @property
    def max_trace_drift(self) -> float:
        return max((p.stats.max_trace_drift for p in self.points), default=0.0)


def _safe(label: str, func: Callable, *args, default: Any = math.nan) -> Any:
    try:
        return func(*args)
    except DiagnosticError as exc:
        sim_logger.warning(f"{label} 无法计算: {exc}")
        return default


def _window(point: Scenario) -> float:
    variant = point.variant
    if point.atoms.gamma_out == 0:
        variant = SystemVariant.CLOSED_REPUMPED
    return transparency_window(point.atoms, point.lasers, point.lasers.pulse_width, variant)


def _run_point(point: Scenario, index: int, axis: Optional[str], value: Optional[float], directory: str) -> PointRecord:
    tag = f"#{index}" + (f" {axis}={value:.6g}" if axis else "")
    sim_logger.info(f"扫描点 {tag} 开始传播")
    result = propagate(point)
    z_end = float(result.z_slices[-1])

    metrics = _safe(f"[{tag}] 脉冲指标", pulse_metrics, result, z_end, default=None)
    profile = _safe(f"[{tag}] 绝热性", adiabaticity_profile, result.slice_fields(0.0), default=None)
    projection = _safe(f"[{tag}] 暗态投影", nc_projection_trace, result, 0.0, default=None)

    record = PointRecord(
        index=index,
        axis=axis,
        value=value,
        z=z_end,
        zeta_p=result.zeta_p,
        metrics=metrics,
        transparency_window=_safe(f"[{tag}] 透明窗", _window, point),
        adiabaton_depth=adiabaton_depth(result, z_end),
        adiabaticity_max_ratio=profile.max_ratio if profile is not None else math.nan,
        nc_projection_min=float(np.min(projection)) if projection is not None else math.nan,
        stats=result.stats,
        directory=directory,
    )

    for label, z in point.requested_slices():
        if not point.outputs:
            break
        fields = result.slice_fields(z)
        table = SliceTable(label=label, z=fields.z, tau=fields.tau)
        if "pulse" in point.outputs:
            table.omega_p = fields.omega_p.copy()
            table.omega_c = fields.omega_c.copy()
        if "forces" in point.outputs:
            trace = forces(result, z)
            table.f_rp, table.f_dip = trace.f_rp, trace.f_dip
            record.forces.append(force_summary(trace))
        record.tables.append(table)

    monitor_memory(tag)
    if metrics is not None:
        sim_logger.info(
            f"扫描点 {tag} 完成: v_g = {metrics.group_velocity:.4g} m/s, "
            f"峰值透射 {metrics.transmission_peak:.4f}, 能量透射 {metrics.transmission_energy:.4f}, "
            f"迹漂移 {result.stats.max_trace_drift:.2e}, 耗时 {result.stats.wall_time:.2f} s"
        )
    else:
        sim_logger.info(f"扫描点 {tag} 完成，耗时 {result.stats.wall_time:.2f} s")
    return record


async def run_async(scenario: Scenario, workers: Optional[int] = None) -> RunRecord:
    """
    在有界线程池中并发运行所有扫描点，结果按扫描序号排列。

    Args:
        scenario: 已校验的场景
        workers: 并发数，默认取场景的 workers 或配置 run.workers
    """
    points = scenario.points()
    axis = scenario.sweep.axis if scenario.sweep else None
    size = workers or scenario.workers or settings.run.workers
    size = max(1, min(int(size), len(points)))
    semaphore = asyncio.Semaphore(size)
    loop = asyncio.get_running_loop()
    sim_logger.info(f"运行场景 {scenario.seed_label!r}: {len(points)} 个扫描点，并发 {size}")

    pool = ThreadPoolExecutor(max_workers=size, thread_name_prefix="slowlight")

    async def _one(index: int, value: Optional[float], point: Scenario) -> PointRecord:
        directory = f"point_{index:02d}" if scenario.sweep else ""
        async with semaphore:
            try:
                return await loop.run_in_executor(pool, _run_point, point, index, axis, value, directory)
            except SolverError as exc:
                raise SweepPointError(index, axis, value, exc) from exc

    try:
        records = await asyncio.gather(*(_one(i, v, p) for i, v, p in points))
    finally:
        pool.shutdown(wait=True, cancel_futures=True)
    return RunRecord(scenario=scenario, points=list(records))


def run(scenario: Scenario, workers: Optional[int] = None) -> RunRecord:
    """run_async 的同步包装"""
    return asyncio.run(run_async(scenario, workers))


def _metrics_table(record: RunRecord) -> Dict[str, List[Any]]:
    columns: Dict[str, List[Any]] = {name: [] for name in METRICS_COLUMNS}
    for point in record.points:
        m = point.metrics
        columns["point"].append(point.index)
        columns["sweep_axis"].append(point.axis or "none")
        columns["sweep_value (SI)"].append(math.nan if point.value is None else float(point.value))
        columns["z (m)"].append(point.z)
        columns["group_velocity (m/s)"].append(m.group_velocity if m else math.nan)
        columns["delay (s)"].append(m.delay if m else math.nan)
        columns["transmission_energy (1)"].append(m.transmission_energy if m else math.nan)
        columns["transmission_peak (1)"].append(m.transmission_peak if m else math.nan)
        columns["fitted_width (s)"].append(m.fitted_width if m else math.nan)
        columns["adiabaton_depth (1)"].append(point.adiabaton_depth)
        columns["transparency_window (rad/s)"].append(point.transparency_window)
        columns["max_trace_drift (1)"].append(point.stats.max_trace_drift)
    return columns


def emit_csv(record: RunRecord, path: Union[str, Path], float_format: Optional[str] = None) -> List[Path]:
    """
    写出 metrics.csv、各切片的 pulse_z*.csv / forces_z*.csv、scenario.cfg 与 run.json。

    Returns:
        List[Path]: 写出的文件（不含 run.json）
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    written: List[Path] = [write_table(root / "metrics.csv", METRICS_COLUMNS, _metrics_table(record), float_format)]

    for point in record.points:
        target = root / point.directory if point.directory else root
        target.mkdir(parents=True, exist_ok=True)
        for table in point.tables:
            if table.omega_p is not None:
                data = {
                    "tau (s)": table.tau,
                    "re_omega_p (rad/s)": table.omega_p.real,
                    "im_omega_p (rad/s)": table.omega_p.imag,
                    "abs_omega_p (rad/s)": np.abs(table.omega_p),
                    "abs_omega_c (rad/s)": np.abs(table.omega_c),
                }
                written.append(write_table(target / f"pulse_z{table.label}.csv", PULSE_COLUMNS, data, float_format))
            if table.f_rp is not None:
                data = {"tau (s)": table.tau, "f_rp (N)": table.f_rp, "f_dip (N)": table.f_dip}
                written.append(write_table(target / f"forces_z{table.label}.csv", FORCE_COLUMNS, data, float_format))

    written.append(save_scenario(record.scenario, root / "scenario.cfg"))
    payload = {
        "scenario": scenario_to_mapping(record.scenario),
        "points": [point.summary() for point in record.points],
        "files": [p.relative_to(root).as_posix() for p in written],
    }
    write_json(root / "run.json", payload)
    sim_logger.info(f"已写出 {len(written) + 1} 个文件到 {root}")
    return written
