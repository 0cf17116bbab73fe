# -*- coding: utf-8 -*-
"""
stats.py - 多次运行结果的汇总与显著性检验

负责：
- 样本汇总（均值、n-1 分母的标准差）
- Welch 不等方差 t 检验（双侧 p 值）
- 两组结果的比较行：均值、标准差、t、p、是否显著、哪一组更好
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special

from gcea.benchmarks import Direction
from gcea.errors import ParameterError

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class SampleSummary:
    count: int
    mean: float
    std: float


@dataclass(frozen=True)
class ResultSet:
    """一组同一目标函数上的原始目标值"""
    label: str
    values: Tuple[float, ...]
    direction: Direction


@dataclass(frozen=True)
class ComparisonRow:
    label_a: str
    label_b: str
    summary_a: SampleSummary
    summary_b: SampleSummary
    t: float
    p: float
    significant: bool
    better: str

    def as_record(self) -> dict:
        return {
            "label_a": self.label_a,
            "label_b": self.label_b,
            "count_a": self.summary_a.count,
            "mean_a": self.summary_a.mean,
            "std_a": self.summary_a.std,
            "count_b": self.summary_b.count,
            "mean_b": self.summary_b.mean,
            "std_b": self.summary_b.std,
            "t": self.t,
            "p": self.p,
            "significant": self.significant,
            "better": self.better,
        }


def summarize(values: Sequence[float]) -> SampleSummary:
    """
    汇总样本。

    Raises:
        ParameterError: 样本为空
    """
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise ParameterError("不能汇总空样本")
    if np.all(data == data[0]):
        return SampleSummary(count=int(data.size), mean=float(data[0]), std=0.0)
    mean = math.fsum(data) / data.size
    std = math.sqrt(math.fsum((data - mean) ** 2) / (data.size - 1))
    return SampleSummary(count=int(data.size), mean=mean, std=std)


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float]:
    """
    Welch t 检验。

    自由度用 Welch–Satterthwaite 公式，双侧 p 值由 t 分布（不完全 beta 函数）计算。
    两组方差都为 0 时：均值相等返回 (0, 1)，均值不同返回 (±inf, 0)。

    Returns:
        (t, p)
    """
    sa, sb = summarize(a), summarize(b)
    if sa.count < 2 or sb.count < 2:
        raise ParameterError(f"每组至少需要 2 个样本，当前 {sa.count} / {sb.count}")
    va = sa.std ** 2 / sa.count
    vb = sb.std ** 2 / sb.count
    diff = sa.mean - sb.mean
    if va + vb == 0.0:
        if diff == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, diff), 0.0
    t = diff / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (sa.count - 1) + vb ** 2 / (sb.count - 1))
    # 双侧 p = I_{df/(df+t^2)}(df/2, 1/2)
    p = float(special.betainc(df / 2.0, 0.5, df / (df + t * t)))
    return t, min(max(p, 0.0), 1.0)


def compare(a: ResultSet, b: ResultSet, alpha: float = DEFAULT_ALPHA) -> ComparisonRow:
    """
    比较两组结果。

    better 为均值更优的一组的标签（按目标方向），均值相同时为空字符串。

    Raises:
        ParameterError: 两组的优化方向不同
    """
    if Direction(a.direction) is not Direction(b.direction):
        raise ParameterError(f"{a.label} 与 {b.label} 的优化方向不同，不能比较")
    summary_a, summary_b = summarize(a.values), summarize(b.values)
    t, p = welch_t_test(a.values, b.values)
    if summary_a.mean == summary_b.mean:
        better = ""
    elif (summary_a.mean > summary_b.mean) == (Direction(a.direction) is Direction.MAXIMISE):
        better = a.label
    else:
        better = b.label
    return ComparisonRow(
        label_a=a.label,
        label_b=b.label,
        summary_a=summary_a,
        summary_b=summary_b,
        t=t,
        p=p,
        significant=p < alpha,
        better=better,
    )


def pairwise(result_sets: Sequence[ResultSet], alpha: float = DEFAULT_ALPHA) -> List[ComparisonRow]:
    """按输入顺序两两比较。"""
    return [compare(a, b, alpha) for a, b in combinations(result_sets, 2)]


def comparison_frame(rows: Sequence[ComparisonRow]) -> pd.DataFrame:
    """比较结果转为表格，列顺序固定。"""
    columns = [
        "label_a", "label_b", "count_a", "mean_a", "std_a",
        "count_b", "mean_b", "std_b", "t", "p", "significant", "better",
    ]
    return pd.DataFrame([row.as_record() for row in rows], columns=columns)
