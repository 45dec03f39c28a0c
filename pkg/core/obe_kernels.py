# -*- coding: utf-8 -*-
"""
光学 Bloch 方程的 numba 内核。

状态向量布局 (complex128, 长度 7):
    [ρ_pp, ρ_cc, ρ_ee, ρ_out, ρ̃_ep, ρ̃_ec, ρ̃_cp]

速率向量布局 (float64, 长度 9):
    [δ_c, δ_p, Γ_e, Γ_c 馈入, Γ_p 馈入, Γ_out 馈入, A/2, γ_cp, 动能前因子]

未安装 numba 时退化为纯 Python（结果相同，仅速度慢）。
"""
from __future__ import annotations

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover
    nb = None

__all__ = [
    "STATE_SIZE",
    "RATE_SIZE",
    "HAS_NUMBA",
    "obe_derivative",
    "integrate_obe_slice",
]

STATE_SIZE = 7
RATE_SIZE = 9
HAS_NUMBA = nb is not None


def _jit(**options):
    if nb is None:
        return lambda func: func
    return nb.njit(**options)


@_jit(cache=True, nogil=True)
def obe_derivative(y, omega_p, omega_c, rates, dy):
    """旋转坐标系下的开放 Λ 系统 OBE 右端项，结果写入 dy。"""
    pp = y[0].real
    cc = y[1].real
    ee = y[2].real
    ep = y[4]
    ec = y[5]
    cp = y[6]

    delta_c = rates[0]
    delta_p = rates[1]
    gamma_e = rates[2]
    half_a = rates[6]
    gamma = rates[7]
    if rates[8] != 0.0:
        wp2 = omega_p.real * omega_p.real + omega_p.imag * omega_p.imag
        w2 = wp2 + omega_c.real * omega_c.real + omega_c.imag * omega_c.imag
        if w2 > 0.0:
            gamma += rates[8] * wp2 / w2

    pump_p = (np.conj(omega_p) * ep).imag
    pump_c = (np.conj(omega_c) * ec).imag

    dy[0] = -pump_p + rates[4] * ee
    dy[1] = -pump_c + rates[3] * ee
    dy[2] = pump_p + pump_c - gamma_e * ee
    dy[3] = rates[5] * ee
    dy[4] = (1j * delta_p - half_a) * ep + 0.5j * omega_p * (pp - ee) + 0.5j * omega_c * cp
    dy[5] = (1j * delta_c - half_a) * ec + 0.5j * omega_c * (cc - ee) + 0.5j * omega_p * np.conj(cp)
    dy[6] = (-1j * (delta_c - delta_p) - gamma) * cp + 0.5j * (np.conj(omega_c) * ep - omega_p * np.conj(ec))


@_jit(cache=True, nogil=True)
def _midpoint(f, i, n):
    # 区间 [i, i+1] 中点的插值：内部四点三次，边界三点二次，过短时线性
    if n < 4:
        return 0.5 * (f[i] + f[i + 1])
    if i == 0:
        return (3.0 * f[0] + 6.0 * f[1] - f[2]) / 8.0
    if i == n - 2:
        return (-f[n - 3] + 6.0 * f[n - 2] + 3.0 * f[n - 1]) / 8.0
    return (-f[i - 1] + 9.0 * f[i] + 9.0 * f[i + 1] - f[i + 2]) / 16.0


@_jit(cache=True, nogil=True)
def integrate_obe_slice(y0, omega_p, omega_c, dtau, rates, out):
    """
    固定步长 RK4 沿 τ 网格积分一个 z 切片。

    Args:
        y0: 初始状态向量
        omega_p, omega_c: τ 网格上的复包络
        dtau: 时间步长
        rates: 速率向量
        out: (n_tau, 7) 输出数组

    Returns:
        float: 扩展迹相对初值的最大漂移（出现非有限值时返回 inf）
    """
    n = omega_p.shape[0]
    size = y0.shape[0]
    k1 = np.empty(size, dtype=np.complex128)
    k2 = np.empty(size, dtype=np.complex128)
    k3 = np.empty(size, dtype=np.complex128)
    k4 = np.empty(size, dtype=np.complex128)
    tmp = np.empty(size, dtype=np.complex128)
    y = np.empty(size, dtype=np.complex128)
    for j in range(size):
        y[j] = y0[j]
        out[0, j] = y0[j]

    trace0 = y[0].real + y[1].real + y[2].real + y[3].real
    drift = 0.0
    half = 0.5 * dtau
    for i in range(n - 1):
        wp0 = omega_p[i]
        wc0 = omega_c[i]
        wp1 = omega_p[i + 1]
        wc1 = omega_c[i + 1]
        wpm = _midpoint(omega_p, i, n)
        wcm = _midpoint(omega_c, i, n)

        obe_derivative(y, wp0, wc0, rates, k1)
        for j in range(size):
            tmp[j] = y[j] + half * k1[j]
        obe_derivative(tmp, wpm, wcm, rates, k2)
        for j in range(size):
            tmp[j] = y[j] + half * k2[j]
        obe_derivative(tmp, wpm, wcm, rates, k3)
        for j in range(size):
            tmp[j] = y[j] + dtau * k3[j]
        obe_derivative(tmp, wp1, wc1, rates, k4)
        for j in range(size):
            y[j] = y[j] + dtau / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            out[i + 1, j] = y[j]

        trace = y[0].real + y[1].real + y[2].real + y[3].real
        d = abs(trace - trace0)
        if not np.isfinite(d):
            return np.inf
        if d > drift:
            drift = d
    return drift
