import os
import yaml

# 获取配置文件路径，可通过环境变量 SLOWLIGHT_CONFIG 覆盖
config_path = os.environ.get(
    "SLOWLIGHT_CONFIG",
    os.path.join(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')), "config", "config.yaml"),
)

# 读取配置文件；缺失时使用内置默认值
if os.path.exists(config_path):
    with open(config_path, "r", encoding="utf-8") as f:
        _config = yaml.safe_load(f) or {}
else:
    _config = {}


class DotAccessibleDict(dict):
    """一个允许通过点符号访问其键的字典类"""
    def __getattr__(self, key):
        try:
            value = self[key]
            if isinstance(value, dict):
                return DotAccessibleDict(value)
            return value
        except KeyError:
            raise AttributeError(f"'DotAccessibleDict' object has no attribute '{key}'")

    def __setattr__(self, key, value):
        self[key] = value


class Settings:
    # 日志配置
    LOG_LEVEL = _config.get("logging", {}).get("level", "INFO")
    LOG_DIR = _config.get("logging", {}).get("dir", "logs")
    DEBUG_ENABLED = _config.get("logging", {}).get("debug", False)

    # 求解器配置
    STEP_STIFFNESS = float(_config.get("solver", {}).get("step_stiffness", 1.0))  # Δτ × 最快速率上限
    POINTS_PER_WIDTH = int(_config.get("solver", {}).get("points_per_width", 16))  # 每个脉宽 T 的最少采样点
    STEPS_PER_BEER_LENGTH = int(_config.get("solver", {}).get("steps_per_beer_length", 4))
    TRACE_TOLERANCE = float(_config.get("solver", {}).get("trace_tolerance", 1e-6))
    BLOWUP_FACTOR = float(_config.get("solver", {}).get("blowup_factor", 1e3))
    WINDOW_SAFETY = float(_config.get("solver", {}).get("window_safety", 1.5))
    STORED_SLICES = int(_config.get("solver", {}).get("stored_slices", 16))

    # 运行配置
    WORKERS = int(_config.get("run", {}).get("workers", 0))  # 0 表示使用全部 CPU
    OUTPUT_DIR = _config.get("run", {}).get("output_dir", "output")
    FLOAT_FORMAT = _config.get("run", {}).get("float_format", "%.12e")

    @property
    def solver(self) -> DotAccessibleDict:
        """返回求解器配置"""
        return DotAccessibleDict({
            "step_stiffness": self.STEP_STIFFNESS,
            "points_per_width": self.POINTS_PER_WIDTH,
            "steps_per_beer_length": self.STEPS_PER_BEER_LENGTH,
            "trace_tolerance": self.TRACE_TOLERANCE,
            "blowup_factor": self.BLOWUP_FACTOR,
            "window_safety": self.WINDOW_SAFETY,
            "stored_slices": self.STORED_SLICES,
        })

    @property
    def run(self) -> DotAccessibleDict:
        """返回运行配置"""
        return DotAccessibleDict({
            "workers": self.WORKERS or (os.cpu_count() or 1),
            "output_dir": self.OUTPUT_DIR,
            "float_format": self.FLOAT_FORMAT,
        })

    @property
    def logging(self) -> DotAccessibleDict:
        """返回日志配置"""
        return DotAccessibleDict({
            "level": "DEBUG" if self.DEBUG_ENABLED else self.LOG_LEVEL,
            "dir": self.LOG_DIR,
        })


settings = Settings()
