# -*- coding: utf-8 -*-
"""
Maxwell–Bloch 传播求解器。

在共动坐标 (z, τ = t − z/c) 中交替进行:
1. 固定 z 切片上沿 τ 的 RK4 积分（numba 内核）
2. 约化波动方程 ∂Ω_α/∂z = iκ_α ρ̃_eα 的预估-校正推进
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Tuple

import numpy as np

from utils.config import settings
from utils.logger import sim_logger
from .atomsys import (
    AtomParams,
    BlochState,
    LaserParams,
    SystemVariant,
    kinetic_prefactor,
    rate_vector,
    weak_probe_susceptibility,
)
from .constants import C_LIGHT, EPSILON_0, HBAR, RK4_STABILITY_LIMIT
from .errors import (
    GridError,
    InstabilityError,
    IntegrationFailureError,
    NumericalDomainError,
    ScenarioValidationError,
    SliceNotStoredError,
)
from .obe_kernels import HAS_NUMBA, STATE_SIZE, integrate_obe_slice

if TYPE_CHECKING:
    from .scenarios import Scenario

__all__ = [
    "Grid",
    "SliceFields",
    "FieldEnvelope",
    "SolverStats",
    "PropagationResult",
    "propagation_constants",
    "beer_length",
    "fastest_rate",
    "estimate_delay_and_width",
    "integrate_slice",
    "propagate_fields",
    "propagate",
]


# ---------------------------------------------------------
# 介质常数
# ---------------------------------------------------------
def propagation_constants(atoms: AtomParams, density: float) -> Tuple[float, float]:
    """κ_α = ω_α N D²_eα / (c ε₀ ħ)，单位 1/(m·s)"""
    scale = density / (C_LIGHT * EPSILON_0 * HBAR)
    kappa_c = atoms.omega_c_transition * atoms.dipole_c ** 2 * scale
    kappa_p = atoms.omega_p_transition * atoms.dipole_p ** 2 * scale
    return kappa_c, kappa_p


def beer_length(atoms: AtomParams, density: float) -> float:
    """ζ_p = A/κ_p；真空中为 inf"""
    _, kappa_p = propagation_constants(atoms, density)
    if kappa_p == 0:
        return math.inf
    return atoms.A / kappa_p


def fastest_rate(atoms: AtomParams, lasers: LaserParams, momentum_mode: bool = False) -> float:
    """OBE 中最快的速率，用于 Δτ 的稳定性约束"""
    kinetic = kinetic_prefactor(atoms) if momentum_mode else 0.0
    return max(
        atoms.A,
        0.5 * atoms.A + abs(lasers.delta_p),
        0.5 * atoms.A + abs(lasers.delta_c),
        abs(lasers.delta_R) + atoms.gamma_cp + kinetic,
        math.hypot(lasers.omega_c_rabi, lasers.omega_p_peak),
    )


def estimate_delay_and_width(atoms: AtomParams, lasers: LaserParams, z: float) -> Tuple[float, float]:
    """
    由弱探测极化率估计 z 处的脉冲延迟与展宽后的宽度。

    Returns:
        (delay, T_eff): delay = zκ_p dReχ/dδ；T_eff² = T² + 2κ_p z · (½ d²Imχ/dδ²)
    """
    _, kappa_p = propagation_constants(atoms, lasers.density)
    width = lasers.pulse_width
    if kappa_p == 0 or z == 0:
        return 0.0, width
    scales = [1.0 / width, atoms.A]
    if lasers.omega_c_rabi > 0:
        scales.append((lasers.omega_c_rabi ** 2 + atoms.gamma_cp * atoms.A) / atoms.A)
    h = 1e-3 * min(scales)
    chi = weak_probe_susceptibility(atoms, lasers, np.array([-h, 0.0, h]))
    slope = (chi[2].real - chi[0].real) / (2.0 * h)
    curvature = 0.5 * (chi[2].imag - 2.0 * chi[1].imag + chi[0].imag) / (h * h)
    delay = z * kappa_p * slope
    t_eff_sq = width * width + 2.0 * kappa_p * z * curvature
    return delay, math.sqrt(max(t_eff_sq, width * width))


# ---------------------------------------------------------
# 网格
# ---------------------------------------------------------
@dataclass(frozen=True)
class Grid:
    tau_min: float
    tau_max: float
    n_tau: int
    z_max: float
    n_z: int

    def __post_init__(self):
        for name in ("tau_min", "tau_max", "z_max"):
            if not math.isfinite(getattr(self, name)):
                raise GridError(f"{name} 必须为有限值")
        if self.tau_max <= self.tau_min:
            raise GridError("tau_max 必须大于 tau_min")
        if self.n_tau < 4:
            raise GridError("n_tau 至少为 4")
        if self.z_max <= 0:
            raise GridError("z_max 必须为正")
        if self.n_z < 1:
            raise GridError("n_z 至少为 1")

    @property
    def tau(self) -> np.ndarray:
        return np.linspace(self.tau_min, self.tau_max, self.n_tau)

    @property
    def dtau(self) -> float:
        return (self.tau_max - self.tau_min) / (self.n_tau - 1)

    @property
    def dz(self) -> float:
        return self.z_max / self.n_z

    def z_at(self, index: int) -> float:
        return self.z_max * index / self.n_z

    @classmethod
    def auto(
        cls,
        atoms: AtomParams,
        lasers: LaserParams,
        z_max: float,
        *,
        momentum_mode: bool = False,
        n_tau: Optional[int] = None,
        n_z: Optional[int] = None,
        tau_min: Optional[float] = None,
        tau_max: Optional[float] = None,
        points_per_width: Optional[int] = None,
        steps_per_beer_length: Optional[int] = None,
        step_stiffness: Optional[float] = None,
        window_safety: Optional[float] = None,
    ) -> "Grid":
        """
        按脉宽、最快速率与弱探测延迟估计自动确定网格。

        Δτ = min(T/points_per_width, step_stiffness/最快速率)
        窗口 [t₀ − 4T, t₀ + safety·delay + 4T_eff]
        n_z = ceil(steps_per_beer_length · z_max/ζ_p)
        """
        solver = settings.solver
        ppw = points_per_width or solver.points_per_width
        steps = steps_per_beer_length or solver.steps_per_beer_length
        stiffness = step_stiffness or solver.step_stiffness
        safety = window_safety or solver.window_safety

        width = lasers.pulse_width
        center = lasers.pulse_center
        delay, t_eff = estimate_delay_and_width(atoms, lasers, z_max)
        dtau = min(width / ppw, stiffness / fastest_rate(atoms, lasers, momentum_mode))

        lo = center - 4.0 * width if tau_min is None else tau_min
        hi = center + safety * max(delay, 0.0) + 4.0 * t_eff if tau_max is None else tau_max
        if n_tau is None:
            n_tau = int(math.ceil((hi - lo) / dtau)) + 1
        if n_z is None:
            zeta = beer_length(atoms, lasers.density)
            # z_max 常以 ζ_p 的整数倍给出，消去舍入误差后再取整
            n_z = steps if math.isinf(zeta) else max(1, int(math.ceil(steps * z_max / zeta * (1.0 - 1e-12))))

        grid = cls(tau_min=lo, tau_max=hi, n_tau=int(n_tau), z_max=z_max, n_z=int(n_z))
        sim_logger.debug(
            f"自动网格: τ∈[{lo:.4e}, {hi:.4e}] s, n_tau={grid.n_tau}, Δτ·A={grid.dtau * atoms.A:.3f}, "
            f"n_z={grid.n_z}, 预估延迟={delay:.4e} s, T_eff={t_eff:.4e} s"
        )
        return grid

    def validate(
        self,
        atoms: AtomParams,
        lasers: LaserParams,
        *,
        momentum_mode: bool = False,
        points_per_width: Optional[int] = None,
        steps_per_beer_length: Optional[int] = None,
        window_safety: Optional[float] = None,
    ) -> None:
        """检查窗口、分辨率与 RK4 稳定性，违反时抛出 GridError"""
        solver = settings.solver
        ppw = points_per_width or solver.points_per_width
        steps = steps_per_beer_length or solver.steps_per_beer_length
        safety = window_safety or solver.window_safety

        width = lasers.pulse_width
        center = lasers.pulse_center
        delay, _ = estimate_delay_and_width(atoms, lasers, self.z_max)
        if not self.tau_min < center - 3.0 * width:
            raise GridError(f"tau_min = {self.tau_min:.4e} s 必须早于 t₀ − 3T = {center - 3.0 * width:.4e} s")
        need = center + 3.0 * width + safety * max(delay, 0.0)
        if not self.tau_max > need:
            raise GridError(f"tau_max = {self.tau_max:.4e} s 不足以容纳延迟脉冲（至少 {need:.4e} s）")
        if self.dtau > width / ppw * (1.0 + 1e-9):
            raise GridError(f"τ 分辨率不足：每个脉宽至少 {ppw} 个点")
        rate = fastest_rate(atoms, lasers, momentum_mode)
        if self.dtau * rate > RK4_STABILITY_LIMIT:
            raise GridError(f"Δτ × 最快速率 = {self.dtau * rate:.3f} 超过 RK4 稳定极限 {RK4_STABILITY_LIMIT}")
        zeta = beer_length(atoms, lasers.density)
        if math.isfinite(zeta) and self.n_z < steps * self.z_max / zeta * (1.0 - 1e-9):
            raise GridError(f"z 分辨率不足：每个 Beer 长度至少 {steps} 步")


# ---------------------------------------------------------
# 结果类型
# ---------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SliceFields:
    """单个 z 切片上的场包络"""

    z: float
    tau: np.ndarray
    omega_c: np.ndarray
    omega_p: np.ndarray


@dataclass(frozen=True, eq=False)
class FieldEnvelope:
    """已保存切片上的 Ω_c(z, τ), Ω_p(z, τ)，形状 (n_slices, n_tau)"""

    z: np.ndarray
    tau: np.ndarray
    omega_c: np.ndarray
    omega_p: np.ndarray

    def at(self, index: int) -> SliceFields:
        return SliceFields(
            z=float(self.z[index]),
            tau=self.tau,
            omega_c=self.omega_c[index],
            omega_p=self.omega_p[index],
        )


@dataclass
class SolverStats:
    rk4_steps: int = 0
    slice_integrations: int = 0
    z_steps: int = 0
    max_trace_drift: float = 0.0
    wall_time: float = 0.0


@dataclass(eq=False)
class PropagationResult:
    atoms: AtomParams
    lasers: LaserParams
    variant: SystemVariant
    momentum_mode: bool
    grid: Grid
    fields: FieldEnvelope
    bloch: np.ndarray  # (n_slices, n_tau, 7)
    kappa_c: float
    kappa_p: float
    zeta_p: float
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def tau(self) -> np.ndarray:
        return self.fields.tau

    @property
    def z_slices(self) -> np.ndarray:
        return self.fields.z

    @property
    def input_probe(self) -> np.ndarray:
        return self.fields.omega_p[0]

    @property
    def input_coupling(self) -> np.ndarray:
        return self.fields.omega_c[0]

    def slice_index(self, z: float) -> int:
        """返回与 z 最近的已保存切片序号（容差 Δz/2）"""
        index = int(np.argmin(np.abs(self.fields.z - z)))
        if abs(self.fields.z[index] - z) > 0.5 * self.grid.dz * (1.0 + 1e-9):
            raise SliceNotStoredError(z, self.fields.z)
        return index

    def slice_fields(self, z: float) -> SliceFields:
        return self.fields.at(self.slice_index(z))

    def bloch_at(self, z: float) -> np.ndarray:
        return self.bloch[self.slice_index(z)]

    def state_at(self, z: float, tau_index: int) -> BlochState:
        return BlochState.from_vector(self.bloch_at(z)[tau_index])


# ---------------------------------------------------------
# 时间积分
# ---------------------------------------------------------
def _integrate(
    y0: np.ndarray,
    omega_p: np.ndarray,
    omega_c: np.ndarray,
    dtau: float,
    rates: np.ndarray,
    out: np.ndarray,
    tolerance: float,
    z: Optional[float] = None,
) -> float:
    drift = integrate_obe_slice(y0, omega_p, omega_c, dtau, rates, out)
    if not math.isfinite(drift) or drift > tolerance:
        raise IntegrationFailureError(drift, tolerance, z)
    return drift


def integrate_slice(
    initial: Optional[BlochState],
    fields_at_z: SliceFields,
    atoms: AtomParams,
    lasers: LaserParams,
    variant: SystemVariant = SystemVariant.OPEN,
    momentum_mode: bool = False,
    trace_tolerance: Optional[float] = None,
) -> np.ndarray:
    """
    在固定 z 处沿 τ 网格积分 OBE。

    Args:
        initial: τ_min 处的初态，None 表示 |p⟩
        fields_at_z: 该切片上的场（τ 须等间距）

    Returns:
        np.ndarray: (n_tau, 7) 状态向量历史
    """
    tau = np.asarray(fields_at_z.tau, dtype=float)
    omega_p = np.ascontiguousarray(fields_at_z.omega_p, dtype=np.complex128)
    omega_c = np.ascontiguousarray(fields_at_z.omega_c, dtype=np.complex128)
    if not (np.all(np.isfinite(omega_p)) and np.all(np.isfinite(omega_c))):
        raise NumericalDomainError("切片场包络含非有限值")
    state = initial if initial is not None else BlochState.ground_p()
    out = np.empty((tau.size, STATE_SIZE), dtype=np.complex128)
    _integrate(
        state.to_vector(),
        omega_p,
        omega_c,
        float(tau[1] - tau[0]),
        rate_vector(atoms, lasers, variant, momentum_mode),
        out,
        trace_tolerance if trace_tolerance is not None else settings.TRACE_TOLERANCE,
        fields_at_z.z,
    )
    return out


# ---------------------------------------------------------
# z 推进
# ---------------------------------------------------------
def _stored_indices(grid: Grid, slices: Iterable[float], n_even: int) -> List[int]:
    indices = {0, grid.n_z}
    for z in slices:
        if z < 0 or z > grid.z_max * (1.0 + 1e-9):
            raise GridError(f"切片 z = {z:.6e} m 超出 [0, z_max = {grid.z_max:.6e} m]")
        indices.add(min(grid.n_z, int(round(z / grid.dz))))
    if n_even > 0:
        indices.update(int(round(i)) for i in np.linspace(0, grid.n_z, n_even))
    return sorted(indices)


def propagate_fields(
    atoms: AtomParams,
    lasers: LaserParams,
    grid: Grid,
    variant: SystemVariant = SystemVariant.OPEN,
    momentum_mode: bool = False,
    slices: Iterable[float] = (),
    *,
    trace_tolerance: Optional[float] = None,
    blowup_factor: Optional[float] = None,
    stored_slices: Optional[int] = None,
    validate: bool = True,
) -> PropagationResult:
    """
    交替进行切片积分与 z 方向预估-校正推进。

    每一步:
        预估 Ω* = Ω + iκΔz·ρ(z)，以 Ω* 积分得 ρ*
        校正 Ω(z+Δz) = Ω + iκΔz/2·(ρ(z) + ρ*)，再积分得 ρ(z+Δz)
    """
    started = time.perf_counter()
    solver = settings.solver
    tolerance = trace_tolerance if trace_tolerance is not None else solver.trace_tolerance
    factor = blowup_factor if blowup_factor is not None else solver.blowup_factor
    n_even = stored_slices if stored_slices is not None else solver.stored_slices
    if validate:
        grid.validate(atoms, lasers, momentum_mode=momentum_mode)

    tau = grid.tau
    dtau, dz = grid.dtau, grid.dz
    kappa_c, kappa_p = propagation_constants(atoms, lasers.density)
    zeta_p = beer_length(atoms, lasers.density)
    rates = rate_vector(atoms, lasers, variant, momentum_mode)
    y0 = BlochState.ground_p().to_vector()

    omega_p = lasers.probe_input(tau)
    omega_c = lasers.coupling_input(tau)
    peak = max(float(np.max(np.abs(omega_p))), float(np.max(np.abs(omega_c))))
    limit = factor * peak if peak > 0 else math.inf

    stored = _stored_indices(grid, slices, n_even)
    slot: Dict[int, int] = {index: k for k, index in enumerate(stored)}
    n_slices = len(stored)
    z_values = np.array([grid.z_at(index) for index in stored])
    hist_c = np.empty((n_slices, grid.n_tau), dtype=np.complex128)
    hist_p = np.empty((n_slices, grid.n_tau), dtype=np.complex128)
    hist_rho = np.empty((n_slices, grid.n_tau, STATE_SIZE), dtype=np.complex128)

    stats = SolverStats()
    current = np.empty((grid.n_tau, STATE_SIZE), dtype=np.complex128)
    predicted = np.empty_like(current)

    def run_slice(wp: np.ndarray, wc: np.ndarray, out: np.ndarray, z: float) -> None:
        drift = _integrate(y0, wp, wc, dtau, rates, out, tolerance, z)
        stats.slice_integrations += 1
        stats.rk4_steps += grid.n_tau - 1
        stats.max_trace_drift = max(stats.max_trace_drift, drift)

    sim_logger.debug(
        f"开始传播: κ_p={kappa_p:.4e} 1/(m·s), ζ_p={zeta_p:.4e} m, "
        f"网格 {grid.n_tau}×{grid.n_z}, 保存 {n_slices} 个切片, "
        f"内核 {'numba' if HAS_NUMBA else '纯 Python'}"
    )
    run_slice(omega_p, omega_c, current, 0.0)
    hist_p[0], hist_c[0], hist_rho[0] = omega_p, omega_c, current

    step_p = 1j * kappa_p * dz
    step_c = 1j * kappa_c * dz
    report_every = max(1, grid.n_z // 10)
    for step in range(1, grid.n_z + 1):
        z = grid.z_at(step)
        source_p = current[:, 4].copy()
        source_c = current[:, 5].copy()

        run_slice(omega_p + step_p * source_p, omega_c + step_c * source_c, predicted, z)
        omega_p = omega_p + 0.5 * step_p * (source_p + predicted[:, 4])
        omega_c = omega_c + 0.5 * step_c * (source_c + predicted[:, 5])
        run_slice(omega_p, omega_c, current, z)
        stats.z_steps = step

        largest = max(float(np.max(np.abs(omega_p))), float(np.max(np.abs(omega_c))))
        if not math.isfinite(largest) or largest > limit:
            raise InstabilityError(
                f"z = {z:.6e} m 处 |Ω| = {largest:.4e} rad/s 超过输入峰值的 {factor:g} 倍"
            )

        if step in slot:
            k = slot[step]
            hist_p[k], hist_c[k], hist_rho[k] = omega_p, omega_c, current
        if step % report_every == 0:
            sim_logger.debug(
                f"传播进度 {100 * step / grid.n_z:.0f}% (z = {z:.4e} m)，迹漂移 {stats.max_trace_drift:.2e}"
            )

    stats.wall_time = time.perf_counter() - started
    return PropagationResult(
        atoms=atoms,
        lasers=lasers,
        variant=SystemVariant(variant),
        momentum_mode=momentum_mode,
        grid=grid,
        fields=FieldEnvelope(z=z_values, tau=tau, omega_c=hist_c, omega_p=hist_p),
        bloch=hist_rho,
        kappa_c=kappa_c,
        kappa_p=kappa_p,
        zeta_p=zeta_p,
        stats=stats,
    )


def propagate(scenario: "Scenario") -> PropagationResult:
    """传播单点场景；扫描场景需先用 Scenario.points() 展开"""
    if scenario.sweep is not None:
        raise ScenarioValidationError("sweep_axis", "propagate 只接受单点场景，请先展开扫描")
    grid = scenario.resolve_grid()
    return propagate_fields(
        scenario.atoms,
        scenario.lasers,
        grid,
        scenario.variant,
        scenario.momentum_mode,
        scenario.resolve_slices(),
    )
