"""
基于 loguru 的日志模块。

长时间的传播计算会在多个工作线程中并发写日志，所有 sink 均开启 enqueue。
"""

import sys
from pathlib import Path
from datetime import time

from loguru import logger

# --- 配置 ---
LOG_DIR = Path("logs")
LOG_ROTATION = time(0, 0, 0)  # 每天午夜轮转
LOG_RETENTION = "7 days"       # 保留7天的日志
LOG_ENCODING = "utf-8"
PROJECT_ROOT = Path(__file__).resolve().parent.parent

CONSOLE_FORMAT = (
    "<green>{time:MM-DD HH:mm:ss}</green> | <level>{level.name}</level> | "
    "<cyan>{extra[file_path]}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:MM-DD HH:mm:ss} | {level.name} | {extra[file_path]}:{line} - {message}"


def _path_patcher(record):
    """将日志记录中的绝对路径转换为相对于项目根目录的路径字符串。"""
    try:
        record["extra"]["file_path"] = str(Path(record["file"].path).relative_to(PROJECT_ROOT))
    except (ValueError, TypeError):
        record["extra"]["file_path"] = record["file"].name


# --- 全局日志记录器实例 ---
sim_logger = logger.patch(_path_patcher)


def print_banner():
    """打印启动时的ASCII横幅。"""
    banner = r"""
==================================================
      _                 _ _       _     _
  ___| | _____      __ | (_) __ _| |__ | |_
 / __| |/ _ \ \ /\ / / | | |/ _` | '_ \| __|
 \__ \ | (_) \ V  V /  | | | (_| | | | | |_
 |___/_|\___/ \_/\_/   |_|_|\__, |_| |_|\__|
                            |___/
   open Λ atoms · Maxwell–Bloch · EIT
=================================================="""
    print(banner)


# --- 初始化 ---
def initialize_logging(log_level="INFO", log_dir=None):
    """
    配置loguru日志记录器。

    Args:
        log_level: 控制台输出级别
        log_dir: 日志目录，默认 logs/
    """
    directory = Path(log_dir) if log_dir else LOG_DIR
    directory.mkdir(parents=True, exist_ok=True)

    # 移除所有默认处理器，以完全控制配置
    logger.remove()

    logger.add(
        sys.stdout,
        level=log_level,
        format=CONSOLE_FORMAT,
        colorize=True,
        enqueue=True,
        backtrace=True,
        diagnose=False,
    )

    logger.add(
        directory / "slowlight.log",
        level="DEBUG",
        format=FILE_FORMAT,
        rotation=LOG_ROTATION,
        retention=LOG_RETENTION,
        compression="gz",
        encoding=LOG_ENCODING,
        enqueue=True,
        backtrace=True,
        diagnose=False,
    )

    # 错误日志单独保存，包含诊断信息
    logger.add(
        directory / "error.log",
        level="ERROR",
        format=FILE_FORMAT,
        rotation="10 MB",
        retention="30 days",
        compression="zip",
        encoding=LOG_ENCODING,
        enqueue=True,
        backtrace=True,
        diagnose=True,
    )

    sim_logger.info("日志系统初始化完成。")


def close_logging():
    """
    在程序关闭时安全地关闭日志系统（等待队列中的消息写完）。
    """
    sim_logger.info("正在关闭日志系统...")
    logger.complete()
    logger.remove()


__all__ = ["sim_logger", "initialize_logging", "close_logging", "print_banner"]
