# -*- coding: utf-8 -*-
"""
objective.py - 目标函数适配与评估计数

负责：
- 把 NK 景观（最大化）和实数测试函数（最小化）包装成统一接口
- Evaluator：每次调用目标函数都从共享预算中扣 1，记录历史最优完整基因组和收敛轨迹
"""

from __future__ import annotations

import functools
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from gcea import nk_landscape
from gcea.benchmarks import Direction, ObjectiveFunction, to_fitness
from gcea.errors import ConfigurationError
from gcea.genome import Representation

logger = logging.getLogger(__name__)


class Objective:
    """目标函数的统一接口"""

    name: str = ""
    n: int = 0
    direction: Direction = Direction.MAXIMISE
    representation: Representation = Representation.BINARY

    def value(self, genome: np.ndarray) -> float:
        """返回原始目标值（不取负）。"""
        raise NotImplementedError


class NkObjective(Objective):
    """NK 景观目标，最大化，二进制基因组"""

    def __init__(self, landscape: nk_landscape.NkLandscape):
        self.landscape = landscape
        self.name = "nk"
        self.n = landscape.n
        self.direction = Direction.MAXIMISE
        self.representation = Representation.BINARY

    def value(self, genome: np.ndarray) -> float:
        return nk_landscape.evaluate(self.landscape, genome)


class BenchmarkObjective(Objective):
    """实数测试函数目标，最小化，基因取值 [-1, 1]"""

    def __init__(self, name: str, n: int):
        self.function = ObjectiveFunction(name=name, n=n)
        self.name = name
        self.n = n
        self.direction = Direction.MINIMISE
        self.representation = Representation.REAL

    def value(self, genome: np.ndarray) -> float:
        return self.function(genome)


class Evaluator:
    """
    带预算的评估器。

    所有算法都只通过 evaluate 调用目标函数，因此 used 就是实际消耗的评估次数。
    """

    def __init__(self, objective: Objective, budget: int, trace_interval: int = 1000):
        """
        Args:
            objective: 目标函数
            budget: 评估预算
            trace_interval: 每隔多少次评估记录一次历史最优
        """
        self.objective = objective
        self.budget = budget
        self.trace_interval = trace_interval
        self.used = 0
        self.best_fitness = -math.inf
        self.best_raw = math.nan
        self.best_genome: Optional[np.ndarray] = None
        self.trace: List[Tuple[int, float]] = []

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def evaluate(self, genome: np.ndarray) -> float:
        """
        评估一个完整基因组，返回“越大越好”的适应度。

        Raises:
            ConfigurationError: 预算已经用完
        """
        if self.used >= self.budget:
            raise ConfigurationError(f"评估预算 {self.budget} 已用完")
        raw = self.objective.value(genome)
        fitness = to_fitness(raw, self.objective.direction)
        self.used += 1
        if fitness > self.best_fitness:
            self.best_fitness = fitness
            self.best_raw = raw
            self.best_genome = np.array(genome, copy=True)
        if self.used % self.trace_interval == 0:
            self.trace.append((self.used, self.best_raw))
            logger.debug("评估 %d 次，当前最优 %r", self.used, self.best_raw)
        return fitness

    def finish(self) -> None:
        """补上最后一次评估的轨迹点。"""
        if self.used and (not self.trace or self.trace[-1][0] != self.used):
            self.trace.append((self.used, self.best_raw))


# ------------ 构造 ------------

@functools.lru_cache(maxsize=4)
def _generated_landscape(n: int, k: int, seed: int, max_table_bytes: int) -> nk_landscape.NkLandscape:
    return nk_landscape.generate(n, k, seed, max_table_bytes)


@functools.lru_cache(maxsize=4)
def _loaded_landscape(path: str) -> nk_landscape.NkLandscape:
    return nk_landscape.load(path)


def build_objective(function: str, n: int, k: int = 0, landscape_seed: int = 0,
                    landscape_path: Optional[str] = None,
                    max_table_bytes: int = nk_landscape.DEFAULT_MAX_TABLE_BYTES) -> Objective:
    """
    按名字构造目标函数。

    Args:
        function: "nk" 或测试函数名
        n: 维度
        k: NK 的 K（其他函数忽略）
        landscape_seed: 生成 NK 景观的种子
        landscape_path: 给定时从文件加载景观，忽略 k 与 landscape_seed

    Returns:
        Objective: 同一进程内相同参数的景观只生成一次
    """
    if function == "nk":
        if landscape_path is not None:
            return NkObjective(_loaded_landscape(landscape_path))
        return NkObjective(_generated_landscape(n, k, landscape_seed, max_table_bytes))
    return BenchmarkObjective(function, n)
