# -*- coding: utf-8 -*-
"""
benchmarks.py - 实数编码的最小化测试函数

负责：
- 可分离函数 sphere、rastrigin，部分重叠函数 rosenbrock、dixon_price
- 方向适配 to_fitness：引擎永远最大化一个标量

搜索域固定为 [-1, 1]^n，与实数变异的取值范围一致。
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from gcea.errors import DimensionError, ParameterError


class Direction(str, enum.Enum):
    """优化方向"""
    MINIMISE = "minimise"
    MAXIMISE = "maximise"


def _as_vector(x, min_length: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < min_length:
        raise DimensionError(f"输入向量长度至少为 {min_length}，当前形状 {x.shape}")
    return x


def sphere(x) -> float:
    x = _as_vector(x)
    return float(np.sum(x * x))


def rastrigin(x) -> float:
    x = _as_vector(x)
    # 逐项加 10，保证每项非负
    return float(np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0))


def rosenbrock(x) -> float:
    x = _as_vector(x, min_length=2)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def dixon_price(x) -> float:
    x = _as_vector(x, min_length=2)
    i = np.arange(2, x.shape[0] + 1, dtype=np.float64)
    return float((x[0] - 1.0) ** 2 + np.sum(i * (2.0 * x[1:] ** 2 - x[:-1]) ** 2))


FUNCTIONS: Dict[str, Callable[[np.ndarray], float]] = {
    "sphere": sphere,
    "rastrigin": rastrigin,
    "rosenbrock": rosenbrock,
    "dixon_price": dixon_price,
}

# 函数要求的最小维度
MIN_DIMENSION = {"sphere": 1, "rastrigin": 1, "rosenbrock": 2, "dixon_price": 2}


@dataclass(frozen=True)
class ObjectiveFunction:
    """一个带名字、维度和方向的目标函数。"""
    name: str
    n: int
    direction: Direction = Direction.MINIMISE

    def __post_init__(self) -> None:
        if self.name not in FUNCTIONS:
            raise ParameterError(
                f"未知的测试函数 {self.name!r}，可选: {', '.join(sorted(FUNCTIONS))}"
            )
        if self.n < MIN_DIMENSION[self.name]:
            raise DimensionError(f"{self.name} 至少需要 n >= {MIN_DIMENSION[self.name]}，当前 n={self.n}")

    def __call__(self, x) -> float:
        x = _as_vector(x)
        if x.shape[0] != self.n:
            raise DimensionError(f"{self.name} 期望长度 {self.n}，实际为 {x.shape[0]}")
        return FUNCTIONS[self.name](x)


def to_fitness(f_value: float, direction: Direction) -> float:
    """
    将原始目标值转换为“越大越好”的适应度。

    最大化时原样返回，最小化时取负。
    """
    if Direction(direction) is Direction.MINIMISE:
        return -f_value
    return f_value
