# -*- coding: utf-8 -*-
"""
测试公共夹具。

真空场景（density = 0）不改变场包络，传播只需几毫秒，用于输出与并发测试；
需要介质的物理测试各自构造缩短的场景。
"""
from typing import Dict

import pytest

from core.atomsys import AtomParams, LaserParams
from core.constants import SODIUM_A
from core.scenarios import Scenario, parse_scenario_text

A = SODIUM_A

VACUUM: Dict[str, str] = {
    "name": "vacuum",
    "density": "0",
    "omega_c": "0.18A",
    "omega_p_peak": "0.1A",
    "pulse_width": "10/A",
    "z_max": "1e-3",
}


def scenario_text(base: Dict[str, str], **overrides: str) -> str:
    entries = {**base, **overrides}
    return "".join(f"{key} = {value}\n" for key, value in entries.items())


def build_scenario(base: Dict[str, str], **overrides: str) -> Scenario:
    return parse_scenario_text(scenario_text(base, **overrides))


@pytest.fixture
def sodium() -> AtomParams:
    return AtomParams.sodium_d2()


@pytest.fixture
def fig2_lasers() -> LaserParams:
    return LaserParams(
        omega_c_rabi=0.18 * A,
        omega_p_peak=0.1 * A,
        pulse_width=80.0 / A,
        density=3.3e18,
    )


@pytest.fixture
def vacuum_scenario() -> Scenario:
    return build_scenario(VACUUM)
