# -*- coding: utf-8 -*-
"""
丰富的 Traceback 支持。若环境已安装 `rich` 则启用彩色堆栈信息；否则静默降级。

数值数组很大，因此不展示局部变量，并隐去 numpy / numba 内部帧。
外部只需在程序入口处调用 `install_pretty_traceback()` 一次。
"""
from __future__ import annotations

from utils.logger import sim_logger


def install_pretty_traceback() -> bool:
    """尝试启用 rich traceback，返回是否成功。"""
    try:
        from rich.traceback import install as _install
    except ImportError:
        sim_logger.debug("未安装 rich，使用默认 traceback")
        return False

    suppress = []
    for name in ("numpy", "numba"):
        try:
            suppress.append(__import__(name))
        except ImportError:
            continue

    _install(
        width=120,
        extra_lines=1,
        show_locals=False,
        max_frames=40,
        suppress=suppress,
    )
    return True
