# -*- coding: utf-8 -*-
"""
errors.py - 统一的异常定义

每个异常类携带 exit_code，命令行入口据此返回进程退出码：
- 2 参数错误（含维度错误、配置错误、文件格式错误）
- 3 资源错误（内存上限、穷举上限）
"""

from typing import Optional


class GceaError(Exception):
    """所有业务异常的基类。"""
    exit_code = 1


class ParameterError(GceaError, ValueError):
    """自定义异常：参数不合法。"""
    exit_code = 2


class DimensionError(ParameterError):
    """自定义异常：长度 / 下标 / 数量不匹配。"""


class ConfigurationError(ParameterError):
    """自定义异常：运行配置自相矛盾（例如预算不足以完成初始化）。"""


class FormatError(ParameterError):
    """
    自定义异常：文件内容格式错误。

    :param field: 出错的字段名，便于定位文件中的问题
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(message)
        self.field = field


class ResourceError(GceaError):
    """自定义异常：所需内存或计算量超过上限。"""
    exit_code = 3
