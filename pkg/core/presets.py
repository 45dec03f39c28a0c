# -*- coding: utf-8 -*-
"""
内置场景预设。

每个预设都以场景文件的键值语法书写，由 scenarios 模块统一解析；
PRESET_SOURCES 记录每个数值的来源，供出处测试检查。
"""
from __future__ import annotations

from typing import Dict

from .constants import SODIUM_MASS

__all__ = ["PRESETS", "PRESET_SOURCES", "PRESET_DESCRIPTIONS", "list_presets"]

_HAU = "Hau 等, Nature 397, 594 (1999) 钠冷原子慢光实验条件"
_SODIUM = "钠 D2 线原子数据"
_BRANCHING = "开放 Λ 系统分支比 Γ_c = A/3, Γ_p = A/2, Γ_out = A/6（对应上述实验能级结构）"
_EIT_RUN = "慢光基准传播：Ω_c = 0.18A, T = 80/A, 传播深度 63ζ_p，输出切片 30ζ_p 与 63ζ_p"
_PROBE = "探测峰值约为 A 的十分之一（假设值 0.1A）"

_SODIUM_ATOMS: Dict[str, str] = {
    "A": "2pi*5.9e6",
    "lambda_c": "589.0e-9",
    "lambda_p": "589.0e-9",
    "mass": repr(SODIUM_MASS),
    "gamma_c": "A/3",
    "gamma_p": "A/2",
    "gamma_out": "A/6",
    "gamma_cp": "0",
    "geometry": "orthogonal",
}

_SODIUM_SOURCES: Dict[str, str] = {
    "A": _SODIUM,
    "lambda_c": _SODIUM,
    "lambda_p": _SODIUM,
    "mass": _SODIUM,
    "gamma_c": _BRANCHING,
    "gamma_p": _BRANCHING,
    "gamma_out": _BRANCHING,
    "gamma_cp": "理想情形：基态相干无衰减",
    "geometry": _HAU + "：耦合光与探测光正交",
}

_DENSITY_SWEEP = "0.5e12cm^-3, 1e12cm^-3, 2e12cm^-3, 3e12cm^-3, 4e12cm^-3, 5e12cm^-3"

PRESETS: Dict[str, Dict[str, str]] = {
    "fig2": {
        **_SODIUM_ATOMS,
        "name": "fig2",
        "density": "3.3e12cm^-3",
        "omega_c": "0.18A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "z_max": "63zeta_p",
        "slices": "0, 30zeta_p, 63zeta_p",
    },
    "fig2_gamma": {
        **_SODIUM_ATOMS,
        "name": "fig2_gamma",
        "gamma_cp": "1e4",
        "density": "3.3e12cm^-3",
        "omega_c": "0.18A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "z_max": "63zeta_p",
        "slices": "0, 30zeta_p, 63zeta_p",
    },
    "fig2_closed": {
        **_SODIUM_ATOMS,
        "name": "fig2_closed",
        "variant": "closed_repumped",
        "density": "3.3e12cm^-3",
        "omega_c": "0.18A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "z_max": "63zeta_p",
        "slices": "0, 30zeta_p, 63zeta_p",
    },
    "fig3a": {
        **_SODIUM_ATOMS,
        "name": "fig3a",
        "density": "3.3e12cm^-3",
        "omega_c": "0.56A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "z_max": "63zeta_p",
        "sweep_axis": "density",
        "sweep_values": _DENSITY_SWEEP,
        "outputs": "none",
    },
    "fig3b": {
        **_SODIUM_ATOMS,
        "name": "fig3b",
        "density": "3.3e12cm^-3",
        "omega_c": "0.18A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "z_max": "63zeta_p",
        "sweep_axis": "density",
        "sweep_values": _DENSITY_SWEEP,
        "outputs": "none",
    },
    "fig4": {
        **_SODIUM_ATOMS,
        "name": "fig4",
        "density": "3.3e12cm^-3",
        "omega_c": "0.18A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "z_max": "63zeta_p",
        "sweep_axis": "pulse_width",
        "sweep_values": "40/A, 80/A, 160/A",
        "outputs": "pulse",
    },
    "fig5": {
        **_SODIUM_ATOMS,
        "name": "fig5",
        "density": "3.3e12cm^-3",
        "omega_c": "0.18A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "delta_c": "-A",
        "delta_p": "-A",
        "z_max": "63zeta_p",
        "slices": "0, 30zeta_p, 63zeta_p",
        "outputs": "pulse",
    },
    "fig6": {
        **_SODIUM_ATOMS,
        "name": "fig6",
        "density": "3.3e12cm^-3",
        "omega_c": "0.18A",
        "omega_p_peak": "0.1A",
        "pulse_width": "80/A",
        "delta_c": "-A",
        "delta_p": "-A",
        "z_max": "63zeta_p",
        "slices": "0",
        "outputs": "forces",
    },
    "beer": {
        **_SODIUM_ATOMS,
        "name": "beer",
        "density": "3.3e12cm^-3",
        "omega_c": "0",
        "omega_p_peak": "1e-3A",
        "pulse_width": "50/A",
        "z_max": "4zeta_p",
        "outputs": "pulse",
    },
}

_RUN_SOURCES: Dict[str, str] = {
    "name": "预设名",
    "density": _HAU + "：N = 3.3×10¹² cm⁻³",
    "omega_c": _EIT_RUN,
    "omega_p_peak": _PROBE,
    "pulse_width": _EIT_RUN,
    "z_max": _EIT_RUN,
    "slices": _EIT_RUN,
}

_DETUNED = "失谐传播：δ_c = δ_p = −A，保持双光子共振 δ_R = 0"

PRESET_SOURCES: Dict[str, Dict[str, str]] = {
    "fig2": {**_SODIUM_SOURCES, **_RUN_SOURCES},
    "fig2_gamma": {
        **_SODIUM_SOURCES,
        **_RUN_SOURCES,
        "gamma_cp": "γ_cp = 10⁴ s⁻¹，与正交几何下动量去相干率 γ_k 同量级",
    },
    "fig2_closed": {
        **_SODIUM_SOURCES,
        **_RUN_SOURCES,
        "variant": "重泵浦闭合系统：Γ'_e = Γ_c + Γ_p",
    },
    "fig3a": {
        **_SODIUM_SOURCES,
        **_RUN_SOURCES,
        "omega_c": "群速度-密度曲线的较强耦合光 Ω_c = 0.56A",
        "sweep_axis": "群速度随 1/N 线性变化",
        "sweep_values": "密度扫描区间 (0.5–5)×10¹² cm⁻³，覆盖几 m/s 到约 100 m/s 的群速度",
        "outputs": "仅输出汇总表",
    },
    "fig3b": {
        **_SODIUM_SOURCES,
        **_RUN_SOURCES,
        "sweep_axis": "群速度随 1/N 线性变化",
        "sweep_values": "密度扫描区间 (0.5–5)×10¹² cm⁻³，覆盖几 m/s 到约 100 m/s 的群速度",
        "outputs": "仅输出汇总表",
    },
    "fig4": {
        **_SODIUM_SOURCES,
        **_RUN_SOURCES,
        "sweep_axis": "透射率随脉宽 T 增大",
        "sweep_values": "T ∈ {40, 80, 160}/A",
        "outputs": "各脉宽的输出脉冲",
    },
    "fig5": {
        **_SODIUM_SOURCES,
        **_RUN_SOURCES,
        "delta_c": _DETUNED,
        "delta_p": _DETUNED,
        "outputs": "|Ω_p| 与 Re/Im 分量",
    },
    "fig6": {
        **_SODIUM_SOURCES,
        **_RUN_SOURCES,
        "delta_c": _DETUNED,
        "delta_p": _DETUNED,
        "slices": "光力在 z = 0 处评估",
        "outputs": "辐射压力与偶极力",
    },
    "beer": {
        **_SODIUM_SOURCES,
        "name": "预设名",
        "density": _HAU + "：N = 3.3×10¹² cm⁻³",
        "omega_c": "无耦合光：Beer 定律吸收",
        "omega_p_peak": "弱探测线性响应 Ω_op = 10⁻³A",
        "pulse_width": "窄带长脉冲 T = 50/A ≫ 1/A",
        "z_max": "四个 Beer 长度，足够拟合衰减长度",
        "outputs": "各切片输出脉冲",
    },
}

PRESET_DESCRIPTIONS: Dict[str, str] = {
    "fig2": "钠样品中的慢光脉冲传播 (γ_cp = 0)",
    "fig2_gamma": "同上，γ_cp = 10⁴ s⁻¹",
    "fig2_closed": "同上，重泵浦闭合系统",
    "fig3a": "群速度 vs 1/N，Ω_c = 0.56A",
    "fig3b": "群速度 vs 1/N，Ω_c = 0.18A",
    "fig4": "脉宽扫描 T ∈ {40, 80, 160}/A",
    "fig5": "失谐传播 δ_c = δ_p = −A",
    "fig6": "失谐情形 z = 0 处的光力",
    "beer": "无耦合光的 Beer 定律吸收",
}


def list_presets() -> Dict[str, str]:
    """返回 预设名 → 说明"""
    return dict(PRESET_DESCRIPTIONS)
