# -*- coding: utf-8 -*-
"""
从 PropagationResult 提取可观测量：延迟、群速度、透射率、绝热性、
透明窗、EIT 吸收长度、adiabaton 深度、光力与暗态投影。

所有函数均为纯函数，可在多个线程中并发调用。
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import curve_fit

from .atomsys import AtomParams, BlochState, LaserParams, SystemVariant, weak_probe_susceptibility
from .constants import C_LIGHT, HBAR
from .errors import DegenerateFieldError, DiagnosticError, UndefinedDelayError, WindowDomainError
from .maxwell_bloch import PropagationResult, SliceFields, propagation_constants

__all__ = [
    "PulseMetrics",
    "ForceTrace",
    "ForceSummary",
    "AdiabaticityProfile",
    "StirapConditions",
    "pulse_delay",
    "group_velocity",
    "pulse_metrics",
    "adiabaticity_profile",
    "transparency_window",
    "fourier_product",
    "stirap_conditions",
    "eit_absorption_length",
    "fit_decay_length",
    "weak_probe_group_velocity",
    "adiabaton_depth",
    "forces",
    "force_summary",
    "nc_projection",
    "nc_projection_trace",
    "velocity_vs_inverse_density",
]


@dataclass(frozen=True)
class PulseMetrics:
    z: float
    delay: float
    group_velocity: float
    transmission_energy: float
    transmission_peak: float
    fitted_width: float
    fit_residual: float


@dataclass(frozen=True, eq=False)
class ForceTrace:
    z: float
    tau: np.ndarray
    f_rp: np.ndarray
    f_dip: np.ndarray
    impulse_rp: float
    impulse_dip: float


@dataclass(frozen=True)
class ForceSummary:
    z: float
    max_rp: float
    max_dip: float
    impulse_rp: float
    impulse_dip: float
    asymmetry_rp: float

    @property
    def ratio(self) -> float:
        """max|F_rp| / max|F_dip|，偶极力为零时为 inf"""
        return math.inf if self.max_dip == 0 else self.max_rp / self.max_dip


@dataclass(frozen=True, eq=False)
class AdiabaticityProfile:
    tau: np.ndarray
    omega_minus: np.ndarray
    omega_total: np.ndarray
    max_ratio: float
    max_omega_minus: float


@dataclass(frozen=True)
class StirapConditions:
    coupling_strong: bool   # Ω_c ≥ A
    probe_strong: bool      # Ω_op ≥ A
    coupling_long: bool     # T ≥ 1/Ω_c
    probe_long: bool        # T ≥ 1/Ω_op

    @property
    def satisfied(self) -> bool:
        return self.coupling_strong and self.probe_strong and self.coupling_long and self.probe_long


# ---------------------------------------------------------
# 延迟与群速度
# ---------------------------------------------------------
def _energy(tau: np.ndarray, omega: np.ndarray) -> float:
    return float(trapezoid(np.abs(omega) ** 2, tau))


def pulse_delay(result: PropagationResult, z: float) -> float:
    """τ_d(z) = ∫τ|Ω_p|²dτ / ∫|Ω_p|²dτ（梯形积分）"""
    fields = result.slice_fields(z)
    weight = np.abs(fields.omega_p) ** 2
    energy = float(trapezoid(weight, fields.tau))
    if energy <= 0:
        raise UndefinedDelayError(f"z = {z:.6e} m 处探测脉冲能量为零")
    return float(trapezoid(fields.tau * weight, fields.tau)) / energy


def _relative_delay(result: PropagationResult, z: float) -> float:
    return pulse_delay(result, z) - pulse_delay(result, 0.0)


def group_velocity(result: PropagationResult, z: float) -> float:
    """v_g = c / (1 + cτ_d/z)，τ_d 相对输入脉冲质心计算"""
    if z <= 0:
        raise DiagnosticError("z = 0 处群速度无定义")
    delay = _relative_delay(result, z)
    return C_LIGHT / (1.0 + C_LIGHT * delay / z)


def _gaussian(tau, amplitude, center, width):
    return amplitude * np.exp(-0.5 * ((tau - center) / width) ** 2)


def _fit_gaussian(tau: np.ndarray, magnitude: np.ndarray) -> Tuple[float, float]:
    peak = float(np.max(magnitude))
    if peak <= 0:
        return math.nan, math.nan
    weight = magnitude ** 2
    center = float(trapezoid(tau * weight, tau) / trapezoid(weight, tau))
    spread = float(np.sqrt(trapezoid((tau - center) ** 2 * weight, tau) / trapezoid(weight, tau)))
    guess = (peak, center, max(spread * math.sqrt(2.0), tau[1] - tau[0]))
    try:
        params, _ = curve_fit(_gaussian, tau, magnitude, p0=guess, maxfev=5000)
    except (RuntimeError, ValueError):
        return math.nan, math.nan
    residual = float(np.max(np.abs(_gaussian(tau, *params) - magnitude))) / peak
    return abs(float(params[2])), residual


def pulse_metrics(result: PropagationResult, z: float) -> PulseMetrics:
    """z 处的延迟、群速度、透射率与高斯拟合宽度"""
    fields = result.slice_fields(z)
    tau = fields.tau
    incoming = result.input_probe
    energy_in = _energy(tau, incoming)
    if energy_in <= 0:
        raise UndefinedDelayError("输入探测脉冲能量为零")
    magnitude = np.abs(fields.omega_p)
    width, residual = _fit_gaussian(tau, magnitude)
    delay = _relative_delay(result, z)
    return PulseMetrics(
        z=fields.z,
        delay=delay,
        group_velocity=group_velocity(result, z) if fields.z > 0 else C_LIGHT,
        transmission_energy=_energy(tau, fields.omega_p) / energy_in,
        transmission_peak=float(np.max(magnitude) / np.max(np.abs(incoming))),
        fitted_width=width,
        fit_residual=residual,
    )


# ---------------------------------------------------------
# 绝热性与透明窗
# ---------------------------------------------------------
def adiabaticity_profile(fields: SliceFields) -> AdiabaticityProfile:
    """
    Ω₋ = (Ω̇_c Ω_p − Ω̇_p Ω_c)/Ω²（幅值，中心差分），绝热性指标为 max_τ |Ω₋|/Ω。
    """
    tau = np.asarray(fields.tau, dtype=float)
    wc = np.abs(fields.omega_c)
    wp = np.abs(fields.omega_p)
    w2 = wc ** 2 + wp ** 2
    if np.any(w2 == 0):
        raise DegenerateFieldError("窗口内存在 Ω = 0 的时刻，Ω₋ 无定义")
    dwc = np.gradient(wc, tau)
    dwp = np.gradient(wp, tau)
    omega_minus = (dwc * wp - dwp * wc) / w2
    omega_total = np.sqrt(w2)
    return AdiabaticityProfile(
        tau=tau,
        omega_minus=omega_minus,
        omega_total=omega_total,
        max_ratio=float(np.max(np.abs(omega_minus) / omega_total)),
        max_omega_minus=float(np.max(np.abs(omega_minus))),
    )


def transparency_window(
    atoms: AtomParams,
    lasers: LaserParams,
    interaction_time: float,
    variant: SystemVariant = SystemVariant.OPEN,
) -> float:
    """
    EIT 透明窗宽度 (rad/s)。

    闭合系统: Δω = Ω²/A + 1/Θ
    开放系统: Δω = Ω²/(2√(AΘ)) · √((1+Γ_p/Γ_out)/Ω_p² + (1+Γ_c/Γ_out)/Ω_c²)
    """
    if interaction_time <= 0:
        raise WindowDomainError("相互作用时间 Θ 必须为正")
    wc, wp = lasers.omega_c_rabi, lasers.omega_p_peak
    w2 = wc ** 2 + wp ** 2
    if SystemVariant(variant) is SystemVariant.CLOSED_REPUMPED:
        return w2 / atoms.A + 1.0 / interaction_time
    if atoms.gamma_out <= 0:
        raise WindowDomainError("开放系统透明窗要求 Γ_out > 0")
    if wc <= 0 or wp <= 0:
        raise WindowDomainError("开放系统透明窗要求 Ω_c、Ω_p 均为正")
    bracket = (1.0 + atoms.gamma_p / atoms.gamma_out) / wp ** 2 + (1.0 + atoms.gamma_c / atoms.gamma_out) / wc ** 2
    return w2 / (2.0 * math.sqrt(atoms.A * interaction_time)) * math.sqrt(bracket)


def fourier_product(atoms: AtomParams, lasers: LaserParams, variant: SystemVariant = SystemVariant.OPEN) -> float:
    """Δω·T（取 Θ = T），成形传播要求远大于 1"""
    return transparency_window(atoms, lasers, lasers.pulse_width, variant) * lasers.pulse_width


def stirap_conditions(lasers: LaserParams, atoms: AtomParams) -> StirapConditions:
    wc, wp, width = lasers.omega_c_rabi, lasers.omega_p_peak, lasers.pulse_width
    return StirapConditions(
        coupling_strong=wc >= atoms.A,
        probe_strong=wp >= atoms.A,
        coupling_long=wc > 0 and width >= 1.0 / wc,
        probe_long=wp > 0 and width >= 1.0 / wp,
    )


# ---------------------------------------------------------
# 吸收长度
# ---------------------------------------------------------
def eit_absorption_length(atoms: AtomParams, lasers: LaserParams) -> float:
    """ζ_p^EIT = (A/κ_p)[Ω_c²/(2γ_cp A) + 1]；γ_cp = 0 时返回 inf（无衰减）"""
    _, kappa_p = propagation_constants(atoms, lasers.density)
    if kappa_p == 0 or atoms.gamma_cp == 0:
        return math.inf
    return atoms.A / kappa_p * (lasers.omega_c_rabi ** 2 / (2.0 * atoms.gamma_cp * atoms.A) + 1.0)


def fit_decay_length(result: PropagationResult, z_min: float = 0.0) -> float:
    """
    对 z ≥ z_min 的已保存切片，拟合 ln√E(z) 随 z 的斜率，返回振幅 1/e 长度。
    """
    z = result.z_slices
    mask = z >= z_min - 0.5 * result.grid.dz
    if np.count_nonzero(mask) < 2:
        raise DiagnosticError("拟合衰减长度至少需要两个切片")
    energies = np.array([_energy(result.tau, result.fields.omega_p[k]) for k in np.flatnonzero(mask)])
    if np.any(energies <= 0):
        raise UndefinedDelayError("切片中存在零能量脉冲")
    slope, _ = np.polyfit(z[mask], 0.5 * np.log(energies), 1)
    if slope >= 0:
        return math.inf
    return -1.0 / float(slope)


def weak_probe_group_velocity(atoms: AtomParams, lasers: LaserParams) -> float:
    """1/v_g = 1/c + κ_p dReχ/dδ，δ 导数在载波处中心差分"""
    _, kappa_p = propagation_constants(atoms, lasers.density)
    scales = [1.0 / lasers.pulse_width, atoms.A]
    if lasers.omega_c_rabi > 0:
        scales.append((lasers.omega_c_rabi ** 2 + atoms.gamma_cp * atoms.A) / atoms.A)
    h = 1e-4 * min(scales)
    chi = weak_probe_susceptibility(atoms, lasers, np.array([-h, h]))
    slope = (chi[1].real - chi[0].real) / (2.0 * h)
    return 1.0 / (1.0 / C_LIGHT + kappa_p * slope)


# ---------------------------------------------------------
# Adiabaton 与光力
# ---------------------------------------------------------
def adiabaton_depth(result: PropagationResult, z: float) -> float:
    """max_τ | |Ω_c(z,τ)|² − |Ω_c(0)|² | / |Ω_c(0)|²"""
    reference = float(np.max(np.abs(result.input_coupling)) ** 2)
    if reference == 0:
        return 0.0
    intensity = np.abs(result.slice_fields(z).omega_c) ** 2
    return float(np.max(np.abs(intensity - reference)) / reference)


def forces(result: PropagationResult, z: float, atoms: Optional[AtomParams] = None) -> ForceTrace:
    """
    纵向光力:
        F_rp  = −i(ħ/2)k_p Ω_p ρ*_pe + c.c. = ħ k_p Im(Ω_p ρ̃_ep)
        F_dip = (ħ/2)(∂Ω_p/∂z) ρ*_pe + c.c. = ħ Re(iκ_p ρ̃_ep²)
    ∂Ω_p/∂z 直接取波动方程右端 iκ_p ρ̃_ep。
    """
    atoms = atoms or result.atoms
    fields = result.slice_fields(z)
    rho_ep = result.bloch_at(z)[:, 4]
    f_rp = HBAR * atoms.k_p * np.imag(fields.omega_p * rho_ep)
    dz_omega = 1j * result.kappa_p * rho_ep
    f_dip = HBAR * np.real(dz_omega * rho_ep)
    return ForceTrace(
        z=fields.z,
        tau=fields.tau,
        f_rp=f_rp,
        f_dip=f_dip,
        impulse_rp=float(trapezoid(f_rp, fields.tau)),
        impulse_dip=float(trapezoid(f_dip, fields.tau)),
    )


def force_summary(trace: ForceTrace) -> ForceSummary:
    total_rp = float(trapezoid(np.abs(trace.f_rp), trace.tau))
    return ForceSummary(
        z=trace.z,
        max_rp=float(np.max(np.abs(trace.f_rp))),
        max_dip=float(np.max(np.abs(trace.f_dip))),
        impulse_rp=trace.impulse_rp,
        impulse_dip=trace.impulse_dip,
        asymmetry_rp=abs(trace.impulse_rp) / total_rp if total_rp > 0 else 0.0,
    )


# ---------------------------------------------------------
# 暗态投影
# ---------------------------------------------------------
def nc_projection(state: BlochState, omega_c: complex, omega_p: complex) -> float:
    """⟨NC|ρ|NC⟩ = (|Ω_p|²ρ_cc + |Ω_c|²ρ_pp − 2Re(Ω_p* Ω_c ρ̃_cp))/Ω²"""
    w2 = abs(omega_c) ** 2 + abs(omega_p) ** 2
    if w2 == 0:
        raise DegenerateFieldError("Ω = 0 时暗态投影无定义")
    cross = (complex(omega_p).conjugate() * complex(omega_c) * state.rho_cp).real
    return (abs(omega_p) ** 2 * state.rho_cc + abs(omega_c) ** 2 * state.rho_pp - 2.0 * cross) / w2


def nc_projection_trace(result: PropagationResult, z: float) -> np.ndarray:
    """z 切片上暗态投影随 τ 的变化"""
    fields = result.slice_fields(z)
    rho = result.bloch_at(z)
    wc, wp = fields.omega_c, fields.omega_p
    w2 = np.abs(wc) ** 2 + np.abs(wp) ** 2
    if np.any(w2 == 0):
        raise DegenerateFieldError("窗口内存在 Ω = 0 的时刻")
    cross = np.real(np.conj(wp) * wc * rho[:, 6])
    return (np.abs(wp) ** 2 * rho[:, 1].real + np.abs(wc) ** 2 * rho[:, 0].real - 2.0 * cross) / w2


# ---------------------------------------------------------
# 扫描拟合
# ---------------------------------------------------------
def velocity_vs_inverse_density(points: Iterable[Tuple[float, float]]) -> Tuple[float, float, float]:
    """
    对 (N, v_g) 序列拟合 v_g = a·(1/N) + b。

    Returns:
        (slope, intercept, R²)
    """
    data: Sequence[Tuple[float, float]] = [(n, v) for n, v in points if n > 0 and math.isfinite(v)]
    if len(data) < 2:
        raise DiagnosticError("线性拟合至少需要两个有效点")
    inverse = np.array([1.0 / n for n, _ in data])
    velocity = np.array([v for _, v in data])
    slope, intercept = np.polyfit(inverse, velocity, 1)
    fitted = slope * inverse + intercept
    ss_res = float(np.sum((velocity - fitted) ** 2))
    ss_tot = float(np.sum((velocity - velocity.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r_squared
