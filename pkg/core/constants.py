# -*- coding: utf-8 -*-
"""
集中放置物理常数、钠原子参数、数值容差与退出码枚举，方便统一调整。
"""
import math
from enum import IntEnum

from scipy import constants as _sc

# ========= 物理常数 (CODATA, 来自 scipy.constants) =========
HBAR = _sc.hbar
C_LIGHT = _sc.c
EPSILON_0 = _sc.epsilon_0
ATOMIC_MASS = _sc.atomic_mass

# ========= 钠 D2 线 =========
SODIUM_LAMBDA = 589.0e-9                      # m
SODIUM_A = 2.0 * math.pi * 5.9e6              # rad/s，激发态总衰减率
SODIUM_MASS = 22.98976928 * ATOMIC_MASS       # kg
CM3_TO_M3 = 1.0e6                             # 1 cm^-3 = 1e6 m^-3

# ========= 数值容差 =========
RK4_STABILITY_LIMIT = 2.0                     # Δτ × 最快速率上限（校验用）
DECAY_SUM_RTOL = 1e-9                         # Γ_c+Γ_p+Γ_out = A 的相对容差
POSITIVITY_TOL = 1e-9                         # |ρ_ij|² ≤ ρ_ii ρ_jj + tol

# ========= 通用资源阈值 =========
MEMORY_THRESHOLD = 2 * 1024 * 1024 * 1024     # 2 GB

# ========= 其它 =========
DEFAULT_SLICES_IN_BEER_LENGTHS = (0.0, 30.0, 63.0)


# ========= 命令行退出码 =========
class ExitCode(IntEnum):
    OK = 0
    IO = 1
    VALIDATION = 2
    SOLVER = 3
