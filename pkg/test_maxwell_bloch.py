# -*- coding: utf-8 -*-
"""
传播求解器测试。

介质测试使用弱探测或缩短的传播深度，数值参考均来自解析的线性响应。
"""
import math

import numpy as np
import pytest

from conftest import A, VACUUM, build_scenario
from core.atomsys import BlochState, LaserParams, SystemVariant, kinetic_prefactor
from core.diagnostics import (
    eit_absorption_length,
    fit_decay_length,
    group_velocity,
    nc_projection,
    pulse_metrics,
    weak_probe_group_velocity,
)
from core.errors import (
    GridError,
    InstabilityError,
    IntegrationFailureError,
    ScenarioValidationError,
    SliceNotStoredError,
)
from core.maxwell_bloch import (
    Grid,
    SliceFields,
    beer_length,
    estimate_delay_and_width,
    fastest_rate,
    integrate_slice,
    propagate,
    propagate_fields,
    propagation_constants,
)


@pytest.fixture
def beer_lasers() -> LaserParams:
    return LaserParams(omega_c_rabi=0.0, omega_p_peak=1e-3 * A, pulse_width=50.0 / A, density=3.3e18)


def _constant_slice(tau, omega_c, omega_p) -> SliceFields:
    return SliceFields(
        z=0.0,
        tau=tau,
        omega_c=np.full(tau.size, omega_c, dtype=np.complex128),
        omega_p=np.full(tau.size, omega_p, dtype=np.complex128),
    )


# ---------- 介质常数 ----------
def test_propagation_constants_for_sodium(sodium):
    kappa_c, kappa_p = propagation_constants(sodium, 3.3e18)
    assert kappa_p == pytest.approx(5.07e12, rel=0.01)
    assert kappa_c / kappa_p == pytest.approx(sodium.gamma_c / sodium.gamma_p, rel=1e-12)
    assert beer_length(sodium, 3.3e18) == pytest.approx(7.32e-6, rel=0.01)


def test_beer_length_in_vacuum_is_infinite(sodium):
    assert math.isinf(beer_length(sodium, 0.0))


def test_fastest_rate_includes_kinetic_term(sodium, fig2_lasers):
    base = fastest_rate(sodium, fig2_lasers)
    assert base == A
    atoms = sodium.with_changes(gamma_cp=0.5 * A)
    assert fastest_rate(atoms, fig2_lasers, momentum_mode=True) == pytest.approx(
        max(A, 0.5 * A + kinetic_prefactor(atoms))
    )


def test_delay_estimate_in_vacuum(sodium, fig2_lasers):
    lasers = fig2_lasers.with_changes(density=0.0)
    assert estimate_delay_and_width(sodium, lasers, 1e-3) == (0.0, lasers.pulse_width)


# ---------- 网格 ----------
@pytest.mark.parametrize(
    "kwargs",
    [
        dict(tau_min=1.0, tau_max=0.0, n_tau=100, z_max=1.0, n_z=10),
        dict(tau_min=0.0, tau_max=1.0, n_tau=3, z_max=1.0, n_z=10),
        dict(tau_min=0.0, tau_max=1.0, n_tau=100, z_max=0.0, n_z=10),
        dict(tau_min=0.0, tau_max=1.0, n_tau=100, z_max=1.0, n_z=0),
        dict(tau_min=0.0, tau_max=math.inf, n_tau=100, z_max=1.0, n_z=10),
    ],
)
def test_grid_rejects_bad_parameters(kwargs):
    with pytest.raises(GridError):
        Grid(**kwargs)


def test_auto_grid_passes_validation(sodium, fig2_lasers):
    zeta = beer_length(sodium, fig2_lasers.density)
    grid = Grid.auto(sodium, fig2_lasers, 63 * zeta)
    grid.validate(sodium, fig2_lasers)
    assert grid.n_z == 252
    assert grid.dtau * A <= 1.0
    assert grid.tau_min == pytest.approx(-4 * fig2_lasers.pulse_width)


def test_validation_rejects_coarse_tau(sodium, fig2_lasers):
    zeta = beer_length(sodium, fig2_lasers.density)
    good = Grid.auto(sodium, fig2_lasers, 10 * zeta)
    coarse = Grid(good.tau_min, good.tau_max, good.n_tau // 4, good.z_max, good.n_z)
    with pytest.raises(GridError):
        coarse.validate(sodium, fig2_lasers)


def test_validation_rejects_short_window(sodium, fig2_lasers):
    zeta = beer_length(sodium, fig2_lasers.density)
    good = Grid.auto(sodium, fig2_lasers, 10 * zeta)
    short = Grid(good.tau_min, 2 * fig2_lasers.pulse_width, good.n_tau, good.z_max, good.n_z)
    with pytest.raises(GridError):
        short.validate(sodium, fig2_lasers)


# ---------- 切片积分 ----------
def test_two_level_slice_reaches_steady_state(sodium, beer_lasers):
    tau = np.linspace(0.0, 50.0 / A, 501)
    omega_p = 1e-3 * A
    history = integrate_slice(None, _constant_slice(tau, 0.0, omega_p), sodium, beer_lasers)
    assert history.shape == (501, 7)
    assert history[-1, 4] == pytest.approx(1j * omega_p / A, rel=1e-3)


def test_dark_state_survives_slice_integration(sodium, fig2_lasers):
    tau = np.linspace(0.0, 200.0 / A, 801)
    wc, wp = 0.18 * A, 0.1 * A * np.exp(0.4j)
    initial = BlochState.dark_state(wc, wp)
    history = integrate_slice(initial, _constant_slice(tau, wc, wp), sodium, fig2_lasers)
    final = BlochState.from_vector(history[-1])
    assert nc_projection(final, wc, wp) == pytest.approx(1.0, abs=1e-9)
    assert final.rho_out == pytest.approx(0.0, abs=1e-12)


def test_trace_tolerance_breach_is_reported(sodium, fig2_lasers):
    tau = np.linspace(0.0, 50.0 / A, 101)
    with pytest.raises(IntegrationFailureError) as info:
        integrate_slice(None, _constant_slice(tau, 0.18 * A, 0.1 * A), sodium, fig2_lasers, trace_tolerance=-1.0)
    assert "n_tau" in str(info.value)


# ---------- 传播 ----------
def test_vacuum_leaves_fields_unchanged(vacuum_scenario):
    result = propagate(vacuum_scenario)
    assert np.array_equal(result.fields.omega_p[-1], result.input_probe)
    assert np.array_equal(result.fields.omega_c[-1], result.input_coupling)
    assert result.stats.z_steps == result.grid.n_z
    assert result.stats.max_trace_drift <= 1e-6


def test_beer_law_decay_length(sodium, beer_lasers):
    zeta = beer_length(sodium, beer_lasers.density)
    grid = Grid.auto(sodium, beer_lasers, 4 * zeta)
    result = propagate_fields(sodium, beer_lasers, grid)
    assert fit_decay_length(result) == pytest.approx(zeta, rel=0.05)


def test_requested_slices_are_stored(sodium, beer_lasers):
    zeta = beer_length(sodium, beer_lasers.density)
    grid = Grid.auto(sodium, beer_lasers, 4 * zeta)
    result = propagate_fields(sodium, beer_lasers, grid, slices=[zeta], stored_slices=0)
    assert result.z_slices == pytest.approx([0.0, zeta, 4 * zeta])
    assert result.slice_fields(zeta).z == pytest.approx(zeta)
    with pytest.raises(SliceNotStoredError):
        result.slice_fields(2 * zeta)


def test_slice_outside_medium_is_rejected(sodium, beer_lasers):
    zeta = beer_length(sodium, beer_lasers.density)
    grid = Grid.auto(sodium, beer_lasers, 4 * zeta)
    with pytest.raises(GridError):
        propagate_fields(sodium, beer_lasers, grid, slices=[5 * zeta])


def test_field_growth_is_refused(sodium, beer_lasers):
    zeta = beer_length(sodium, beer_lasers.density)
    grid = Grid.auto(sodium, beer_lasers, zeta)
    with pytest.raises(InstabilityError):
        propagate_fields(sodium, beer_lasers, grid, blowup_factor=0.5)


def test_propagate_requires_single_point():
    sweep = build_scenario(VACUUM, sweep_axis="omega_c", sweep_values="0.1A, 0.2A")
    with pytest.raises(ScenarioValidationError):
        propagate(sweep)


def test_group_velocity_matches_weak_field_limit(sodium):
    lasers = LaserParams(omega_c_rabi=0.56 * A, omega_p_peak=0.01 * A, pulse_width=80.0 / A, density=3.3e18)
    z = 20 * beer_length(sodium, lasers.density)
    result = propagate_fields(sodium, lasers, Grid.auto(sodium, lasers, z), slices=[z])
    expected = weak_probe_group_velocity(sodium, lasers)
    assert group_velocity(result, z) == pytest.approx(expected, rel=0.15)
    assert expected == pytest.approx(lasers.omega_c_rabi ** 2 / (2 * result.kappa_p), rel=0.01)


def test_eit_absorption_length_with_ground_decoherence(sodium):
    atoms = sodium.with_changes(gamma_cp=1e-2 * A)
    lasers = LaserParams(omega_c_rabi=0.18 * A, omega_p_peak=1e-3 * A, pulse_width=2000.0 / A, density=3.3e18)
    zeta = beer_length(atoms, lasers.density)
    result = propagate_fields(atoms, lasers, Grid.auto(atoms, lasers, 8 * zeta))
    assert fit_decay_length(result) == pytest.approx(eit_absorption_length(atoms, lasers), rel=0.1)


def test_closed_variant_keeps_population_in_lambda_system(sodium, fig2_lasers):
    z = 2 * beer_length(sodium, fig2_lasers.density)
    grid = Grid.auto(sodium, fig2_lasers, z)
    closed = propagate_fields(sodium, fig2_lasers, grid, SystemVariant.CLOSED_REPUMPED)
    rho = closed.bloch_at(z)
    assert np.max(np.abs(rho[:, 3])) == 0.0
    assert np.max(np.abs(rho[:, 0].real + rho[:, 1].real + rho[:, 2].real - 1.0)) <= 1e-6
    opened = propagate_fields(sodium, fig2_lasers, grid)
    assert opened.state_at(z, grid.n_tau - 1).rho_out > 0.0


def test_grid_halving_leaves_fig2_metrics_unchanged(sodium, fig2_lasers):
    z = 63 * beer_length(sodium, fig2_lasers.density)
    coarse = Grid.auto(sodium, fig2_lasers, z)
    fine = Grid(coarse.tau_min, coarse.tau_max, 2 * coarse.n_tau - 1, coarse.z_max, 2 * coarse.n_z)
    before = pulse_metrics(propagate_fields(sodium, fig2_lasers, coarse), z)
    after = pulse_metrics(propagate_fields(sodium, fig2_lasers, fine), z)
    assert after.group_velocity == pytest.approx(before.group_velocity, rel=5e-3)
    assert after.transmission_peak == pytest.approx(before.transmission_peak, rel=5e-3)
    assert after.transmission_energy == pytest.approx(before.transmission_energy, rel=5e-3)
