# -*- coding: utf-8 -*-
"""
慢光模拟主入口
"""
import sys

from utils.logger import close_logging, initialize_logging, print_banner
from utils.config import settings
from core.debug import install_pretty_traceback
from core.runner import main as run_cli


def main() -> int:
    print_banner()
    # 使用 config/config.yaml
    initialize_logging(log_level=settings.logging.level, log_dir=settings.LOG_DIR)
    install_pretty_traceback()
    try:
        return run_cli()
    finally:
        close_logging()


if __name__ == "__main__":
    sys.exit(main())
