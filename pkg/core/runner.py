# -*- coding: utf-8 -*-
"""
命令行启动器 (runner)

子命令:
* run      运行场景文件或内置预设，写出 CSV/JSON
* presets  列出内置预设

退出码见 core.constants.ExitCode。
"""
from __future__ import annotations

import argparse
from pathlib import Path
from typing import List, Optional, Sequence

from utils.config import settings
from utils.logger import sim_logger
from core.constants import ExitCode
from core.errors import ScenarioError, ScenarioValidationError, SolverError, describe_error
from core.presets import list_presets
from core.scenarios import emit_csv, load_scenario, preset, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slowlight", description="冷原子慢光 Maxwell–Bloch 传播模拟")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="运行场景并写出结果表")
    run_parser.add_argument("scenario", nargs="?", help="场景文件路径（或预设名）")
    run_parser.add_argument("--preset", help="内置预设名，与 scenario 二选一")
    run_parser.add_argument("--out", help="输出目录，默认 <run.output_dir>/<name>")
    run_parser.add_argument("--workers", type=int, help="并发扫描点数，覆盖配置")

    commands.add_parser("presets", help="列出内置预设")
    return parser


def _print_presets() -> int:
    for name, description in list_presets().items():
        print(f"{name:<12} {description}")
    return ExitCode.OK


def _run(args: argparse.Namespace) -> int:
    if bool(args.scenario) == bool(args.preset):
        raise ScenarioValidationError("scenario", "请给出场景文件或 --preset 之一")
    if args.workers is not None and args.workers < 1:
        raise ScenarioValidationError("workers", "必须为正整数")

    scenario = preset(args.preset) if args.preset else load_scenario(args.scenario)
    out = Path(args.out) if args.out else Path(settings.run.output_dir) / scenario.seed_label
    record = run(scenario, workers=args.workers)
    files = emit_csv(record, out)
    sim_logger.info(f"场景 {scenario.seed_label!r} 完成，最大迹漂移 {record.max_trace_drift:.2e}，共 {len(files)} 个表格")
    return ExitCode.OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    同步入口：解析参数、运行、把异常映射为退出码。
    """
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    try:
        if args.command == "presets":
            return _print_presets()
        return _run(args)
    except ScenarioError as exc:
        sim_logger.error(describe_error(exc))
        return ExitCode.VALIDATION
    except SolverError as exc:
        sim_logger.error(describe_error(exc))
        return ExitCode.SOLVER
    except OSError as exc:
        sim_logger.error(describe_error(exc))
        return ExitCode.IO
    except KeyboardInterrupt:
        sim_logger.info("收到 KeyboardInterrupt – 准备退出")
        return ExitCode.SOLVER


__all__: List[str] = ["build_parser", "main"]
