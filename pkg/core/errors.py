# -*- coding: utf-8 -*-
"""
slowlight 的异常层次。

- ScenarioError   场景文件解析/校验失败（退出码 2）
- SolverError     传播求解失败（退出码 3）
- DiagnosticError 诊断量无法计算（运行中降级为 NaN + 警告）
"""
from __future__ import annotations

from typing import Any, Optional


class SlowLightError(Exception):
    pass


# ---------- 场景 ----------
class ScenarioError(SlowLightError):
    pass


class ScenarioParseError(ScenarioError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"第 {line} 行: {message}")


class ScenarioValidationError(ScenarioError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


# ---------- 求解器 ----------
class SolverError(SlowLightError):
    pass


class NumericalDomainError(SolverError):
    """输入含 NaN/Inf 等非有限值"""


class IntegrationFailureError(SolverError):
    """扩展迹漂移超过容差"""

    def __init__(self, drift: float, tolerance: float, z: Optional[float] = None):
        self.drift = drift
        self.tolerance = tolerance
        self.z = z
        where = f" (z = {z:.6e} m)" if z is not None else ""
        super().__init__(
            f"迹漂移 {drift:.3e} 超过容差 {tolerance:.1e}{where}，请加密 τ 网格 (n_tau) 后重试"
        )


class InstabilityError(SolverError):
    """场振幅非物理增长"""


class GridError(SolverError):
    pass


class SweepPointError(SolverError):
    def __init__(self, index: int, axis: Optional[str], value: Any, cause: BaseException):
        self.index = index
        self.axis = axis
        self.value = value
        label = f"{axis} = {value!r}" if axis else "单点"
        super().__init__(f"扫描点 #{index} ({label}) 失败: {cause}")


# ---------- 诊断 ----------
class DiagnosticError(SlowLightError):
    pass


class DegenerateFieldError(DiagnosticError):
    """总 Rabi 频率 Ω = 0，比值无定义"""


class UndefinedDelayError(DiagnosticError):
    """探测脉冲能量为零"""


class SliceNotStoredError(DiagnosticError):
    def __init__(self, z: float, stored: Any = None):
        self.z = z
        self.stored = stored
        super().__init__(f"z = {z:.6e} m 不在已保存的切片中")


class WindowDomainError(DiagnosticError):
    """开放系统透明窗公式超出定义域"""


def describe_error(error: BaseException) -> str:
    """格式化错误信息，供命令行日志使用"""
    if isinstance(error, ScenarioError):
        return f"场景错误: {error}"
    if isinstance(error, SolverError):
        return f"求解失败: {error}"
    if isinstance(error, DiagnosticError):
        return f"诊断失败: {error}"
    if isinstance(error, OSError):
        return f"I/O 错误: {error}"
    return f"未知错误 ({type(error).__name__}): {error}"


__all__ = [
    "SlowLightError",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SolverError",
    "NumericalDomainError",
    "IntegrationFailureError",
    "InstabilityError",
    "GridError",
    "SweepPointError",
    "DiagnosticError",
    "DegenerateFieldError",
    "UndefinedDelayError",
    "SliceNotStoredError",
    "WindowDomainError",
    "describe_error",
]
