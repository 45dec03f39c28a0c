# -*- coding: utf-8 -*-
"""
开放 Λ 原子系统：物理参数类型与旋转坐标系下的光学 Bloch 方程。

能级约定（旋转坐标系, 以 ħ 为单位）:
    H_pp = 0, H_cc = δ_R, H_ee = −δ_p
    耦合项 −(1/2)(Ω_p|e⟩⟨p| + Ω_c|e⟩⟨c| + h.c.)
在该约定下暗态 |NC⟩ = (Ω_p|c⟩ − Ω_c|p⟩)/Ω 对任意复场都是稳态。
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from .constants import (
    C_LIGHT,
    DECAY_SUM_RTOL,
    EPSILON_0,
    HBAR,
    POSITIVITY_TOL,
    SODIUM_A,
    SODIUM_LAMBDA,
    SODIUM_MASS,
)
from .errors import DegenerateFieldError, NumericalDomainError, ScenarioValidationError
from .obe_kernels import RATE_SIZE, STATE_SIZE, obe_derivative

__all__ = [
    "Geometry",
    "SystemVariant",
    "AtomParams",
    "LaserParams",
    "BlochState",
    "obe_rhs",
    "rate_vector",
    "rabi_from_field",
    "field_from_rabi",
    "dipole_from_decay",
    "gamma_k",
    "recoil_frequency",
    "kinetic_prefactor",
    "weak_probe_susceptibility",
]


class Geometry(str, Enum):
    COPROPAGATING = "copropagating"
    COUNTERPROPAGATING = "counterpropagating"
    ORTHOGONAL = "orthogonal"


class SystemVariant(str, Enum):
    OPEN = "open"
    CLOSED_REPUMPED = "closed_repumped"


def _require_finite(**values: float) -> None:
    for key, value in values.items():
        if not math.isfinite(value):
            raise ScenarioValidationError(key, f"必须为有限值，实际为 {value!r}")


def _require(condition: bool, key: str, message: str) -> None:
    if not condition:
        raise ScenarioValidationError(key, message)


# ---------------------------------------------------------
# 参数类型
# ---------------------------------------------------------
@dataclass(frozen=True)
class AtomParams:
    """
    Λ 原子参数。速率单位 rad/s，质量 kg，波长 m，偶极矩 C·m。

    约束: Γ_c + Γ_p + Γ_out = A
    """

    A: float
    gamma_c: float
    gamma_p: float
    gamma_out: float
    gamma_cp: float
    mass: float
    lambda_c: float
    lambda_p: float
    dipole_c: float
    dipole_p: float
    geometry: Geometry = Geometry.ORTHOGONAL

    def __post_init__(self):
        _require_finite(
            A=self.A, gamma_c=self.gamma_c, gamma_p=self.gamma_p, gamma_out=self.gamma_out,
            gamma_cp=self.gamma_cp, mass=self.mass, lambda_c=self.lambda_c, lambda_p=self.lambda_p,
            dipole_c=self.dipole_c, dipole_p=self.dipole_p,
        )
        _require(self.A > 0, "A", "激发态总衰减率必须为正")
        for key in ("gamma_c", "gamma_p", "gamma_out", "gamma_cp"):
            _require(getattr(self, key) >= 0, key, "衰减率不能为负")
        _require(self.mass > 0, "mass", "质量必须为正")
        _require(self.lambda_c > 0, "lambda_c", "波长必须为正")
        _require(self.lambda_p > 0, "lambda_p", "波长必须为正")
        _require(self.dipole_c > 0, "dipole_c", "偶极矩必须为正")
        _require(self.dipole_p > 0, "dipole_p", "偶极矩必须为正")
        total = self.gamma_c + self.gamma_p + self.gamma_out
        _require(
            math.isclose(total, self.A, rel_tol=DECAY_SUM_RTOL),
            "gamma_out",
            f"Γ_c + Γ_p + Γ_out = {total!r} 与 A = {self.A!r} 不一致",
        )
        object.__setattr__(self, "geometry", Geometry(self.geometry))

    @classmethod
    def sodium_d2(
        cls,
        gamma_c: Optional[float] = None,
        gamma_p: Optional[float] = None,
        gamma_out: Optional[float] = None,
        gamma_cp: float = 0.0,
        geometry: Geometry = Geometry.ORTHOGONAL,
    ) -> "AtomParams":
        """钠 D2 线；默认分支比 Γ_c = A/3, Γ_p = A/2, Γ_out = A/6"""
        a = SODIUM_A
        gamma_c = a / 3.0 if gamma_c is None else gamma_c
        gamma_p = a / 2.0 if gamma_p is None else gamma_p
        gamma_out = a / 6.0 if gamma_out is None else gamma_out
        omega = 2.0 * math.pi * C_LIGHT / SODIUM_LAMBDA
        return cls(
            A=a,
            gamma_c=gamma_c,
            gamma_p=gamma_p,
            gamma_out=gamma_out,
            gamma_cp=gamma_cp,
            mass=SODIUM_MASS,
            lambda_c=SODIUM_LAMBDA,
            lambda_p=SODIUM_LAMBDA,
            dipole_c=dipole_from_decay(gamma_c, omega),
            dipole_p=dipole_from_decay(gamma_p, omega),
            geometry=geometry,
        )

    @property
    def k_c(self) -> float:
        return 2.0 * math.pi / self.lambda_c

    @property
    def k_p(self) -> float:
        return 2.0 * math.pi / self.lambda_p

    @property
    def omega_c_transition(self) -> float:
        return C_LIGHT * self.k_c

    @property
    def omega_p_transition(self) -> float:
        return C_LIGHT * self.k_p

    def decay_rates(self, variant: SystemVariant) -> Tuple[float, float, float, float]:
        """
        Returns:
            (Γ_e, 馈入 c, 馈入 p, 馈入 out)
        """
        if SystemVariant(variant) is SystemVariant.CLOSED_REPUMPED:
            # Γ'_e = Γ_c + Γ_p，分支比按 Γ_c/Γ'_e、Γ_p/Γ'_e 重新归一
            return self.gamma_c + self.gamma_p, self.gamma_c, self.gamma_p, 0.0
        return self.gamma_c + self.gamma_p + self.gamma_out, self.gamma_c, self.gamma_p, self.gamma_out

    def with_changes(self, **changes) -> "AtomParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class LaserParams:
    """
    激光与样品参数。

    Attributes:
        omega_c_rabi: 耦合光 Rabi 频率 Ω_c (rad/s)
        omega_p_peak: 探测脉冲峰值 Ω_op (rad/s)
        pulse_width: 高斯宽度 T (s)
        density: 原子数密度 N (m^-3)
        delta_c, delta_p: 单光子失谐 (rad/s)
        pulse_center: 输入脉冲中心 (s)
    """

    omega_c_rabi: float
    omega_p_peak: float
    pulse_width: float
    density: float
    delta_c: float = 0.0
    delta_p: float = 0.0
    pulse_center: float = 0.0

    def __post_init__(self):
        _require_finite(
            omega_c_rabi=self.omega_c_rabi, omega_p_peak=self.omega_p_peak,
            pulse_width=self.pulse_width, density=self.density, delta_c=self.delta_c,
            delta_p=self.delta_p, pulse_center=self.pulse_center,
        )
        _require(self.pulse_width > 0, "pulse_width", "脉宽必须为正")
        _require(self.density >= 0, "density", "原子密度不能为负")
        _require(self.omega_p_peak >= 0, "omega_p_peak", "探测峰值 Rabi 频率不能为负")
        _require(self.omega_c_rabi >= 0, "omega_c", "耦合 Rabi 频率不能为负")

    @property
    def delta_R(self) -> float:
        return self.delta_c - self.delta_p

    def probe_input(self, tau: np.ndarray) -> np.ndarray:
        """z = 0 处的高斯探测包络 Ω_op exp(−(τ−t₀)²/2T²)"""
        shifted = (np.asarray(tau, dtype=float) - self.pulse_center) / self.pulse_width
        return (self.omega_p_peak * np.exp(-0.5 * shifted * shifted)).astype(np.complex128)

    def coupling_input(self, tau: np.ndarray) -> np.ndarray:
        """z = 0 处的耦合包络：整个窗口内恒定（反直觉时序）"""
        return np.full(np.shape(tau), self.omega_c_rabi, dtype=np.complex128)

    def with_changes(self, **changes) -> "LaserParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class BlochState:
    """开放 Λ 系统在单个网格点上的密度矩阵（4 个布居 + 3 个相干项）。"""

    rho_pp: float = 0.0
    rho_cc: float = 0.0
    rho_ee: float = 0.0
    rho_out: float = 0.0
    rho_ep: complex = 0j
    rho_ec: complex = 0j
    rho_cp: complex = 0j

    @classmethod
    def ground_p(cls) -> "BlochState":
        return cls(rho_pp=1.0)

    @classmethod
    def dark_state(cls, omega_c: complex, omega_p: complex) -> "BlochState":
        """|NC⟩⟨NC|，其中 |NC⟩ = (Ω_p|c⟩ − Ω_c|p⟩)/Ω"""
        w2 = abs(omega_c) ** 2 + abs(omega_p) ** 2
        if w2 == 0:
            raise DegenerateFieldError("Ω = 0 时暗态无定义")
        return cls(
            rho_pp=abs(omega_c) ** 2 / w2,
            rho_cc=abs(omega_p) ** 2 / w2,
            rho_cp=-complex(omega_p) * complex(omega_c).conjugate() / w2,
        )

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "BlochState":
        v = np.asarray(vector)
        return cls(
            rho_pp=float(v[0].real),
            rho_cc=float(v[1].real),
            rho_ee=float(v[2].real),
            rho_out=float(v[3].real),
            rho_ep=complex(v[4]),
            rho_ec=complex(v[5]),
            rho_cp=complex(v[6]),
        )

    def to_vector(self) -> np.ndarray:
        return np.array(
            [self.rho_pp, self.rho_cc, self.rho_ee, self.rho_out, self.rho_ep, self.rho_ec, self.rho_cp],
            dtype=np.complex128,
        )

    def trace(self) -> float:
        """扩展迹（含 |out⟩）"""
        return self.rho_pp + self.rho_cc + self.rho_ee + self.rho_out

    def is_consistent(self, tol: float = POSITIVITY_TOL) -> bool:
        """布居在 [0, 1] 内，且相干项满足 |ρ_ij|² ≤ ρ_ii ρ_jj + tol"""
        pops = (self.rho_pp, self.rho_cc, self.rho_ee, self.rho_out)
        if any(p < -tol or p > 1 + tol for p in pops):
            return False
        if abs(self.trace() - 1.0) > tol:
            return False
        return (
            abs(self.rho_ep) ** 2 <= self.rho_ee * self.rho_pp + tol
            and abs(self.rho_ec) ** 2 <= self.rho_ee * self.rho_cc + tol
            and abs(self.rho_cp) ** 2 <= self.rho_cc * self.rho_pp + tol
        )


# ---------------------------------------------------------
# OBE
# ---------------------------------------------------------
def rate_vector(
    atoms: AtomParams,
    lasers: LaserParams,
    variant: SystemVariant = SystemVariant.OPEN,
    momentum_mode: bool = False,
) -> np.ndarray:
    """打包内核使用的速率向量；动量模式下附带 γ_k 的几何前因子。"""
    gamma_e, feed_c, feed_p, feed_out = atoms.decay_rates(variant)
    rates = np.zeros(RATE_SIZE, dtype=np.float64)
    rates[0] = lasers.delta_c
    rates[1] = lasers.delta_p
    rates[2] = gamma_e
    rates[3] = feed_c
    rates[4] = feed_p
    rates[5] = feed_out
    rates[6] = 0.5 * atoms.A
    rates[7] = atoms.gamma_cp
    rates[8] = kinetic_prefactor(atoms) if momentum_mode else 0.0
    return rates


def obe_rhs(
    state: BlochState,
    omega_c: complex,
    omega_p: complex,
    atoms: AtomParams,
    lasers: LaserParams,
    variant: SystemVariant = SystemVariant.OPEN,
    momentum_mode: bool = False,
) -> BlochState:
    """
    计算 dρ/dt（旋转坐标系）。

    Returns:
        BlochState: 各分量为对应的时间导数
    """
    vector = state.to_vector()
    if not (np.all(np.isfinite(vector)) and np.isfinite(omega_c) and np.isfinite(omega_p)):
        raise NumericalDomainError("OBE 输入含非有限值")
    dy = np.zeros(STATE_SIZE, dtype=np.complex128)
    obe_derivative(
        vector,
        np.complex128(omega_p),
        np.complex128(omega_c),
        rate_vector(atoms, lasers, variant, momentum_mode),
        dy,
    )
    return BlochState.from_vector(dy)


# ---------------------------------------------------------
# 偶极矩与 Rabi 频率
# ---------------------------------------------------------
def rabi_from_field(field_amplitude: float, dipole: float) -> float:
    """Ω = D·E/ħ"""
    if not (math.isfinite(field_amplitude) and math.isfinite(dipole)):
        raise NumericalDomainError("场强或偶极矩为非有限值")
    return dipole * field_amplitude / HBAR


def field_from_rabi(rabi: float, dipole: float) -> float:
    """E = ħΩ/D"""
    if not (math.isfinite(rabi) and math.isfinite(dipole)) or dipole <= 0:
        raise NumericalDomainError("Rabi 频率或偶极矩无效")
    return HBAR * rabi / dipole


def dipole_from_decay(partial_rate: float, omega: float) -> float:
    """由分支衰减率得到偶极矩: D² = 3π ε₀ ħ c³ Γ / ω³"""
    if partial_rate <= 0 or omega <= 0:
        raise ScenarioValidationError("dipole", "分支衰减率与跃迁频率必须为正")
    return math.sqrt(3.0 * math.pi * EPSILON_0 * HBAR * C_LIGHT ** 3 * partial_rate / omega ** 3)


# ---------------------------------------------------------
# 原子动量
# ---------------------------------------------------------
def recoil_frequency(atoms: AtomParams) -> float:
    """ω_R = ħk_p²/2M"""
    return HBAR * atoms.k_p ** 2 / (2.0 * atoms.mass)


def kinetic_prefactor(atoms: AtomParams) -> float:
    """ħ|k_c − k_p|²/2M，由两束光的几何关系决定"""
    k_c, k_p = atoms.k_c, atoms.k_p
    if atoms.geometry is Geometry.COPROPAGATING:
        dk2 = (k_c - k_p) ** 2
    elif atoms.geometry is Geometry.COUNTERPROPAGATING:
        dk2 = (k_c + k_p) ** 2
    else:
        dk2 = k_c ** 2 + k_p ** 2
    return HBAR * dk2 / (2.0 * atoms.mass)


def gamma_k(omega_p: complex, omega_c: complex, atoms: AtomParams) -> float:
    """动能去相干率 γ_k = ħ|k_c − k_p|²/2M · |Ω_p|²/Ω²"""
    wp2 = abs(omega_p) ** 2
    w2 = wp2 + abs(omega_c) ** 2
    if w2 == 0:
        raise DegenerateFieldError("Ω = 0 时 γ_k 的比值无定义")
    return kinetic_prefactor(atoms) * wp2 / w2


# ---------------------------------------------------------
# 弱探测线性响应
# ---------------------------------------------------------
def weak_probe_susceptibility(
    atoms: AtomParams,
    lasers: LaserParams,
    detuning_shift: Union[float, np.ndarray] = 0.0,
) -> Union[complex, np.ndarray]:
    """
    一阶稳态响应 χ(δ) = ρ̃_ep/Ω_p（ρ_pp = 1），δ 为探测频率相对载波的偏移。

    2×2 线性方程组:
        (i(δ_p+δ) − A/2) ρ_ep + (i/2)Ω_c ρ_cp = −i/2
        (i/2)Ω_c* ρ_ep + (−i(δ_R−δ) − γ_cp) ρ_cp = 0

    Args:
        detuning_shift: 标量或数组

    Returns:
        与 detuning_shift 同形的复数 χ
    """
    shift = np.asarray(detuning_shift, dtype=float)
    omega_c = complex(lasers.omega_c_rabi)
    if omega_c == 0:
        # 无耦合光时 ρ_cp 解耦，退化为二能级响应
        chi = -0.5j / (1j * (lasers.delta_p + shift) - 0.5 * atoms.A)
        return complex(chi) if np.ndim(chi) == 0 else chi
    matrix = np.empty(shift.shape + (2, 2), dtype=np.complex128)
    matrix[..., 0, 0] = 1j * (lasers.delta_p + shift) - 0.5 * atoms.A
    matrix[..., 0, 1] = 0.5j * omega_c
    matrix[..., 1, 0] = 0.5j * omega_c.conjugate()
    matrix[..., 1, 1] = -1j * (lasers.delta_R - shift) - atoms.gamma_cp
    rhs = np.zeros(shift.shape + (2, 1), dtype=np.complex128)
    rhs[..., 0, 0] = -0.5j
    solution = np.linalg.solve(matrix, rhs)
    chi = solution[..., 0, 0]
    if chi.ndim == 0:
        return complex(chi)
    return chi
