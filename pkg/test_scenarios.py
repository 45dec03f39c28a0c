# -*- coding: utf-8 -*-
"""
场景测试：数值语法、解析与校验、预设、保存/读取、运行与表格输出。
"""
import math

import orjson
import pytest

from conftest import A, VACUUM, build_scenario, scenario_text
from core.constants import SODIUM_A
from core.errors import ScenarioParseError, ScenarioValidationError, SweepPointError
from core.presets import PRESET_SOURCES, PRESETS, list_presets
from core.scenarios import (
    Length,
    emit_csv,
    load_scenario,
    parse_quantity,
    parse_scenario_text,
    preset,
    run,
    run_async,
    save_scenario,
)
from utils.config import settings
from utils.table_writer import METRICS_COLUMNS, PULSE_COLUMNS


# ---------- 数值语法 ----------
@pytest.mark.parametrize(
    "text, value, a_power, zeta_power",
    [
        ("0.18A", 0.18, 1, 0),
        ("A/3", 1.0 / 3.0, 1, 0),
        ("80/A", 80.0, -1, 0),
        ("2pi*5.9e6", 2.0 * math.pi * 5.9e6, 0, 0),
        ("-A", -1.0, 1, 0),
        ("1e-3A", 1e-3, 1, 0),
        ("63zeta_p", 63.0, 0, 1),
        ("3.3e12cm^-3", 3.3e18, 0, 0),
        (" 1.5 ", 1.5, 0, 0),
    ],
)
def test_parse_quantity(text, value, a_power, zeta_power):
    q = parse_quantity(text)
    assert q.value == pytest.approx(value, rel=1e-12)
    assert (q.a_power, q.zeta_power) == (a_power, zeta_power)


@pytest.mark.parametrize("text", ["", "A*", "*A", "0.18B", "1/0", "1e400"])
def test_parse_quantity_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_quantity(text)


# ---------- 解析与校验 ----------
def test_vacuum_scenario_defaults(vacuum_scenario):
    atoms, lasers = vacuum_scenario.atoms, vacuum_scenario.lasers
    assert atoms.A == SODIUM_A
    assert atoms.gamma_c == pytest.approx(A / 3)
    assert atoms.gamma_out == pytest.approx(A / 6)
    assert lasers.omega_c_rabi == pytest.approx(0.18 * A)
    assert lasers.pulse_width == pytest.approx(10.0 / A)
    assert vacuum_scenario.grid.z_max == Length(1e-3, "m")
    assert vacuum_scenario.seed_label == "vacuum"
    assert vacuum_scenario.outputs == ("pulse", "forces")


def test_unknown_key_reports_line():
    text = "# header\n" + scenario_text(VACUUM) + "colour = blue\n"
    with pytest.raises(ScenarioParseError) as info:
        parse_scenario_text(text)
    assert info.value.line == len(VACUUM) + 2


def test_duplicate_key_reports_line():
    text = scenario_text(VACUUM) + "density = 1e12cm^-3\n"
    with pytest.raises(ScenarioParseError) as info:
        parse_scenario_text(text)
    assert info.value.line == len(VACUUM) + 1


def test_line_without_equals_sign():
    with pytest.raises(ScenarioParseError) as info:
        parse_scenario_text("density 0\n")
    assert info.value.line == 1


def test_unit_mismatch_is_a_parse_error():
    with pytest.raises(ScenarioParseError):
        build_scenario(VACUUM, omega_c="80/A")
    with pytest.raises(ScenarioParseError):
        build_scenario(VACUUM, pulse_width="0.1A")
    with pytest.raises(ScenarioParseError):
        build_scenario(VACUUM, n_tau="many")


@pytest.mark.parametrize("key", ["density", "omega_c", "omega_p_peak", "pulse_width", "z_max"])
def test_missing_mandatory_key(key):
    base = {k: v for k, v in VACUUM.items() if k != key}
    with pytest.raises(ScenarioValidationError) as info:
        build_scenario(base)
    assert info.value.key == key


def test_missing_decay_rate_is_the_complement():
    scenario = build_scenario(VACUUM, gamma_c="0.4A", gamma_p="0.5A")
    assert scenario.atoms.gamma_out == pytest.approx(0.1 * A)


def test_single_decay_rate_is_not_enough():
    with pytest.raises(ScenarioValidationError):
        build_scenario(VACUUM, gamma_c="0.4A")


def test_zero_branch_needs_explicit_dipole():
    with pytest.raises(ScenarioValidationError) as info:
        build_scenario(VACUUM, gamma_c="A", gamma_p="0")
    assert info.value.key == "dipole_p"
    scenario = build_scenario(VACUUM, gamma_c="A", gamma_p="0", dipole_p="2.5e-29")
    assert scenario.atoms.dipole_p == 2.5e-29


def test_beer_units_need_a_medium():
    with pytest.raises(ScenarioValidationError) as info:
        build_scenario(VACUUM, z_max="10zeta_p")
    assert info.value.key == "z_max"


def test_slices_must_lie_inside_the_medium():
    with pytest.raises(ScenarioValidationError) as info:
        build_scenario(VACUUM, slices="0, 2e-3")
    assert info.value.key == "slices"


def test_outputs_selection():
    assert build_scenario(VACUUM, outputs="none").outputs == ()
    assert build_scenario(VACUUM, outputs="forces").outputs == ("forces",)
    with pytest.raises(ScenarioValidationError):
        build_scenario(VACUUM, outputs="pulse, movie")


def test_enum_and_bool_keys():
    scenario = build_scenario(VACUUM, variant="closed_repumped", geometry="copropagating", momentum_mode="yes")
    assert scenario.variant.value == "closed_repumped"
    assert scenario.atoms.geometry.value == "copropagating"
    assert scenario.momentum_mode is True
    with pytest.raises(ScenarioValidationError):
        build_scenario(VACUUM, variant="half_open")


# ---------- 扫描 ----------
def test_sweep_expands_into_points():
    scenario = build_scenario(VACUUM, sweep_axis="delta", sweep_values="-A, 0, A")
    points = scenario.points()
    assert [index for index, _, _ in points] == [0, 1, 2]
    _, value, first = points[0]
    assert value == pytest.approx(-A)
    assert first.lasers.delta_c == first.lasers.delta_p == pytest.approx(-A)
    assert first.sweep is None


@pytest.mark.parametrize(
    "overrides, key",
    [
        ({"sweep_axis": "density"}, "sweep_values"),
        ({"sweep_values": "1, 2"}, "sweep_axis"),
        ({"sweep_axis": "colour", "sweep_values": "1, 2"}, "sweep_axis"),
    ],
)
def test_incomplete_sweep(overrides, key):
    with pytest.raises(ScenarioValidationError) as info:
        build_scenario(VACUUM, **overrides)
    assert info.value.key == key


def test_sweep_values_are_validated():
    with pytest.raises(ScenarioValidationError):
        build_scenario(VACUUM, sweep_axis="pulse_width", sweep_values="10/A, -10/A")


# ---------- 预设 ----------
def test_preset_with_override():
    scenario = parse_scenario_text("preset = fig2\nomega_c = 0.56A\nname = strong\n")
    assert scenario.lasers.omega_c_rabi == pytest.approx(0.56 * A)
    assert scenario.lasers.density == pytest.approx(3.3e18)
    assert scenario.preset == "fig2"
    assert scenario.seed_label == "strong"


def test_unknown_preset():
    with pytest.raises(ScenarioValidationError) as info:
        parse_scenario_text("preset = fig9\n")
    assert info.value.key == "preset"


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_every_preset_is_valid_and_sourced(name):
    scenario = preset(name)
    assert scenario.seed_label == name
    sources = PRESET_SOURCES[name]
    for key in PRESETS[name]:
        assert sources.get(key), f"{name}.{key} 缺少出处"
    assert name in list_presets()


def test_default_slices_follow_medium_depth():
    labels = [label for label, _ in preset("fig3b").points()[0][2].requested_slices()]
    assert labels == ["0", "30", "63"]
    shorter = parse_scenario_text("preset = beer\nz_max = 40zeta_p\n")
    assert [label for label, _ in shorter.requested_slices()] == ["0", "30", "40"]


def test_load_falls_back_to_preset_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert load_scenario("fig5") == preset("fig5")


# ---------- 保存/读取 ----------
@pytest.mark.parametrize("name", ["fig2", "fig4", "fig6"])
def test_saved_presets_load_back_identically(tmp_path, name):
    original = preset(name)
    path = save_scenario(original, tmp_path / f"{name}.cfg")
    assert load_scenario(path) == original


def test_saved_custom_scenario_loads_back_identically(tmp_path):
    original = build_scenario(
        VACUUM,
        gamma_cp="1e4",
        delta_c="0.01A",
        pulse_center="5/A",
        n_z="7",
        momentum_mode="true",
        sweep_axis="omega_c",
        sweep_values="0.1A, 0.2A",
        slices="0, 5e-4",
        workers="2",
    )
    path = save_scenario(original, tmp_path / "custom.cfg")
    assert load_scenario(path) == original


# ---------- 运行与输出 ----------
def test_emit_writes_tables(tmp_path, vacuum_scenario):
    record = run(vacuum_scenario, workers=1)
    files = emit_csv(record, tmp_path)
    names = sorted(p.name for p in files)
    assert names == [
        "forces_z0.csv",
        "forces_z1000um.csv",
        "metrics.csv",
        "pulse_z0.csv",
        "pulse_z1000um.csv",
        "scenario.cfg",
    ]
    header = (tmp_path / "metrics.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == ",".join(METRICS_COLUMNS)
    pulse = (tmp_path / "pulse_z0.csv").read_text(encoding="utf-8").splitlines()
    assert pulse[0] == ",".join(PULSE_COLUMNS)
    assert len(pulse) == record.points[0].tables[0].tau.size + 1

    summary = orjson.loads((tmp_path / "run.json").read_bytes())
    assert summary["scenario"]["name"] == "vacuum"
    assert "wall_time" not in summary["points"][0]["solver"]
    assert summary["points"][0]["metrics"]["transmission_energy"] == 1.0


def test_reruns_are_byte_identical(tmp_path, vacuum_scenario):
    first, second = tmp_path / "a", tmp_path / "b"
    emit_csv(run(vacuum_scenario, workers=1), first)
    emit_csv(run(vacuum_scenario, workers=1), second)
    produced = sorted(p.relative_to(first) for p in first.rglob("*") if p.is_file())
    assert produced
    for relative in produced:
        assert (first / relative).read_bytes() == (second / relative).read_bytes()


def test_sweep_points_get_their_own_directories(tmp_path):
    scenario = build_scenario(VACUUM, sweep_axis="omega_c", sweep_values="0.1A, 0.2A", outputs="pulse")
    emit_csv(run(scenario, workers=2), tmp_path)
    assert (tmp_path / "point_00" / "pulse_z0.csv").is_file()
    assert (tmp_path / "point_01" / "pulse_z1000um.csv").is_file()
    assert not (tmp_path / "point_00" / "forces_z0.csv").exists()
    rows = (tmp_path / "metrics.csv").read_text(encoding="utf-8").splitlines()
    assert len(rows) == 3
    assert rows[1].split(",")[1] == "omega_c"


def test_missing_diagnostics_degrade_to_nan(tmp_path):
    record = run(build_scenario(VACUUM, omega_p_peak="0", outputs="none"), workers=1)
    point = record.points[0]
    assert point.metrics is None
    assert math.isnan(point.transparency_window)
    emit_csv(record, tmp_path)
    row = (tmp_path / "metrics.csv").read_text(encoding="utf-8").splitlines()[1].split(",")
    assert row[METRICS_COLUMNS.index("group_velocity (m/s)")] == ""


@pytest.mark.asyncio
async def test_run_async_keeps_sweep_order():
    scenario = build_scenario(VACUUM, sweep_axis="omega_c", sweep_values="0.3A, 0.1A, 0.2A", outputs="none")
    record = await run_async(scenario, workers=3)
    assert [p.index for p in record.points] == [0, 1, 2]
    assert [p.value for p in record.points] == pytest.approx([0.3 * A, 0.1 * A, 0.2 * A])
    assert all(p.directory == f"point_{p.index:02d}" for p in record.points)


def test_solver_failure_names_the_sweep_point(monkeypatch):
    monkeypatch.setattr(settings, "TRACE_TOLERANCE", -1.0)
    scenario = build_scenario(VACUUM, sweep_axis="omega_c", sweep_values="0.1A, 0.2A", outputs="none")
    with pytest.raises(SweepPointError) as info:
        run(scenario, workers=1)
    assert info.value.axis == "omega_c"
    assert info.value.index in (0, 1)
