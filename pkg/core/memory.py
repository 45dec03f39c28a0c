# -*- coding: utf-8 -*-
"""
内存跟踪：每个扫描点结束后采样进程 RSS，超阈值时强制 GC。
"""
from __future__ import annotations

import gc

import psutil

from utils.logger import sim_logger
from .constants import MEMORY_THRESHOLD

__all__ = ["monitor_memory"]


def monitor_memory(label: str = "") -> int:
    """返回当前 RSS（字节），并在超阈值时强制 GC。"""
    rss = psutil.Process().memory_info().rss
    prefix = f"[{label}] " if label else ""
    if rss > MEMORY_THRESHOLD:
        sim_logger.warning(f"{prefix}内存超过阈值: {rss/1024/1024:.2f} MB，执行 GC")
        gc.collect(2)
    else:
        sim_logger.debug(f"{prefix}当前内存: {rss/1024/1024:.2f} MB")
    return rss
