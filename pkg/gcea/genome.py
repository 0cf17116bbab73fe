# -*- coding: utf-8 -*-
"""
genome.py - 基因组表示与遗传算子

负责：
- 二进制 / 实数（[-1, 1]）两种基因组表示
- 单基因变异（确定性的 1/N 变异率）
- 单点交叉、k 点交叉
- 全局交叉：环形随机切点（每个后代重新抽取）与等间距固定切点

全局交叉的语义：切点升序排列后，第 s 段覆盖环上从 points[s] 到下一个更大切点
（不含）的位置，最后一段从末尾切点绕回 points[0]。第 s 段的基因全部来自第 s 个父代。
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from gcea.errors import DimensionError, ParameterError

REAL_LOW = -1.0
REAL_HIGH = 1.0


class Representation(str, enum.Enum):
    """基因组表示标签"""
    BINARY = "binary"
    REAL = "real"


def representation_of(genome: np.ndarray) -> Representation:
    """根据 dtype 判断表示：浮点为实数，其余为二进制。"""
    if np.issubdtype(genome.dtype, np.floating):
        return Representation.REAL
    return Representation.BINARY


def random_genomes(rng: np.random.Generator, count: int, n: int,
                   representation: Representation) -> np.ndarray:
    """
    生成 count 个随机基因组，返回形状 (count, n) 的矩阵。

    二进制为 uint8 的 0/1，实数为 [-1, 1] 上的均匀分布。
    """
    if representation is Representation.BINARY:
        return rng.integers(0, 2, size=(count, n), dtype=np.uint8)
    return rng.uniform(REAL_LOW, REAL_HIGH, size=(count, n))


@dataclass(frozen=True)
class CrossoverPlan:
    """
    一次全局交叉的方案。

    points: 升序切点（可能重复）
    segment_parents: 每段对应的父代标识（通常是种群下标）
    """
    points: np.ndarray
    segment_parents: np.ndarray


def mutate_one_gene(genome: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    均匀随机选一个位置变异，返回新数组。

    二进制：翻转该位；实数：用 [-1, 1] 上的均匀抽样替换该位。
    """
    if genome.shape[0] == 0:
        raise DimensionError("不能对空基因组做变异")
    child = genome.copy()
    position = int(rng.integers(genome.shape[0]))
    if representation_of(genome) is Representation.REAL:
        child[position] = rng.uniform(REAL_LOW, REAL_HIGH)
    else:
        child[position] = 1 - child[position]
    return child


def _check_same_length(p1: np.ndarray, p2: np.ndarray) -> None:
    if p1.shape != p2.shape:
        raise DimensionError(f"父代长度不一致: {p1.shape} vs {p2.shape}")


def one_point_crossover(p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator,
                        cut: Optional[int] = None) -> np.ndarray:
    """
    单点交叉，只产生一个后代：切点之前取 p1，之后取 p2。

    Args:
        p1: 第一个被选中的父代（提供头部）
        p2: 第二个父代
        rng: 随机源
        cut: 指定切点，None 时在 {1..n-1} 中均匀抽取
    """
    _check_same_length(p1, p2)
    n = p1.shape[0]
    if n < 2:
        raise DimensionError(f"单点交叉要求 n >= 2，当前 n={n}")
    if cut is None:
        cut = int(rng.integers(1, n))
    elif not 1 <= cut <= n - 1:
        raise ParameterError(f"切点 {cut} 越界 [1, {n - 1}]")
    return np.concatenate([p1[:cut], p2[cut:]])


def kpoint_owners(n: int, cuts: Sequence[int]) -> np.ndarray:
    """k 点交叉中每个位置来自哪个父代（0 / 1 交替，从 0 开始）。"""
    cuts = np.sort(np.asarray(cuts, dtype=np.int64))
    return (np.searchsorted(cuts, np.arange(n), side="right") % 2).astype(np.int64)


def kpoint_crossover(p1: np.ndarray, p2: np.ndarray, points: int, rng: np.random.Generator,
                     cuts: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    两父代 k 点交叉：在 {1..n-1} 中无放回抽 points 个切点，各块在两父代间交替。

    头部来自 p1。
    """
    _check_same_length(p1, p2)
    n = p1.shape[0]
    if not 1 <= points <= n - 1:
        raise ParameterError(f"交叉点数必须满足 1 <= points <= n-1，当前 n={n}, points={points}")
    if cuts is None:
        cuts = rng.choice(np.arange(1, n), size=points, replace=False)
    owners = kpoint_owners(n, cuts)
    return np.where(owners == 0, p1, p2)


def make_random_plan(n: int, s: int, rng: np.random.Generator) -> np.ndarray:
    """
    随机环形切点：在 {0..n-1} 中独立抽 s 次（允许重复）后升序排列。

    每产生一个后代都要重新调用。
    """
    if not 1 <= s <= n:
        raise ParameterError(f"切点数必须满足 1 <= s <= n，当前 n={n}, s={s}")
    return np.sort(rng.integers(0, n, size=s))


def make_fixed_plan(n: int, s: int) -> np.ndarray:
    """
    等间距固定切点：0, n/s, 2n/s, ..., (s-1)n/s。

    s 必须整除 n，不做隐式取整。
    """
    if s < 1 or s > n:
        raise ParameterError(f"切点数必须满足 1 <= s <= n，当前 n={n}, s={s}")
    if n % s != 0:
        raise ParameterError(f"固定切点要求 s 整除 n，当前 n={n}, s={s}")
    return np.arange(0, n, n // s, dtype=np.int64)


def segment_owners(points: np.ndarray, n: int) -> np.ndarray:
    """
    环形分段：返回长度 n 的数组，第 j 个元素为覆盖位置 j 的段号。

    重复切点会使靠前的段长度为 0。
    """
    points = np.asarray(points, dtype=np.int64)
    owners = np.searchsorted(points, np.arange(n), side="right") - 1
    # points[0] 之前的位置属于从最后一个切点绕回来的段
    owners[owners < 0] = points.shape[0] - 1
    return owners


def literal_segment_owners(points: np.ndarray, n: int) -> np.ndarray:
    """
    按写入步数切换父代的变体：循环前先选一个父代，写入位置从 points[0] 开始绕环，
    当切点等于循环计数 g 时换父代。

    返回的段号取值 0..S，共需要 S+1 个父代。
    """
    points = np.asarray(points, dtype=np.int64)
    steps = np.arange(n)
    # 第 g 步使用的父代序号 = 不大于 g 的切点个数
    parent_at_step = np.searchsorted(points, steps, side="right")
    owners = np.empty(n, dtype=np.int64)
    owners[(points[0] + steps) % n] = parent_at_step
    return owners


def global_crossover(
    plan_points: np.ndarray,
    parents: Sequence[np.ndarray],
    owners: Optional[np.ndarray] = None,
    parent_rows: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """
    全局交叉：第 s 段的基因复制自第 s 个父代的同位置基因。

    Args:
        plan_points: 升序切点，长度 S
        parents: 等长父代列表；给出 parent_rows 时为整个种群矩阵
        owners: 每个位置所属的段号，缺省按 segment_owners 由切点计算
        parent_rows: 每段父代在种群矩阵中的行号（上游每段各做一次选择）

    Returns:
        np.ndarray: 后代基因组
    """
    plan_points = np.asarray(plan_points, dtype=np.int64)
    if parent_rows is None:
        if len({np.asarray(p).shape for p in parents}) > 1:
            raise DimensionError("全局交叉的父代长度必须一致")
        rows = np.arange(len(parents))
        matrix = np.stack([np.asarray(p) for p in parents]) if len(parents) else np.empty((0, 0))
    else:
        rows = np.asarray(parent_rows, dtype=np.int64)
        matrix = np.asarray(parents)
        if matrix.ndim != 2 or (rows.size and (rows.min() < 0 or rows.max() >= matrix.shape[0])):
            raise DimensionError("父代行号越界")
    if rows.size == 0:
        raise DimensionError("全局交叉至少需要一个父代")
    n = matrix.shape[1]
    if plan_points.size and (plan_points.min() < 0 or plan_points.max() >= n):
        raise DimensionError(f"切点越界 [0, {n})")

    if owners is None:
        if rows.size != plan_points.shape[0]:
            raise DimensionError(f"父代数 {rows.size} 与切点数 {plan_points.shape[0]} 不一致")
        owners = segment_owners(plan_points, n)
    else:
        # literal 模式下段数可以比切点多一个
        owners = np.asarray(owners, dtype=np.int64)
        if owners.shape != (n,) or owners.min() < 0 or owners.max() >= rows.size:
            raise DimensionError(f"段号必须是长度 {n}、取值 [0, {rows.size}) 的数组")
    return matrix[rows[owners], np.arange(n)]
