import json
import logging
import os

logger = logging.getLogger(__name__)


class ConfigManager:
    """配置管理器，负责加载实验默认参数"""

    def __init__(self, config_file: str = "config.json"):
        """
        初始化配置管理器

        Args:
            config_file: 配置文件路径，默认为 config.json
        """
        self.config_file = config_file
        self.default_config = {
            "pop_size": 50,
            "eval_budget": 100000,
            "runs": 50,
            "trace_interval": 1000,
            "max_table_bytes": 2 * 1024 ** 3,
            "alpha": 0.05,
            "jobs": 1,
            "log_level": "INFO",
        }

    def _fill_defaults(self, config: dict) -> dict:
        """
        补齐缺失的配置项

        Args:
            config: 从文件读出的配置字典

        Returns:
            dict: 补齐后的配置字典（未知的键原样保留）
        """
        for key, value in self.default_config.items():
            if key not in config:
                config[key] = value
        return config

    def load_config(self) -> dict:
        """
        加载配置文件

        Returns:
            dict: 配置字典，如果文件不存在或无法解析则返回默认配置
        """
        if not os.path.exists(self.config_file):
            return self.default_config.copy()
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                config = json.load(f)
        except (json.JSONDecodeError, UnicodeDecodeError, IOError) as e:
            logger.warning("加载配置失败: %s，使用默认配置", e)
            return self.default_config.copy()
        if not isinstance(config, dict):
            logger.warning("配置文件 %s 顶层必须是对象，使用默认配置", self.config_file)
            return self.default_config.copy()
        return self._fill_defaults(config)
