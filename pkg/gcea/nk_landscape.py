# -*- coding: utf-8 -*-
"""
nk_landscape.py - NK 适应度景观

负责：
- 按 (n, k, seed) 生成景观：每个基因随机选 k 个邻居，并生成 2^(k+1) 项的适应度表
- 计算单个基因的贡献值以及整条基因组的适应度（贡献值之和除以 N）
- 小规模实例的穷举最优解（仅供测试作为参照）
- 以 JSON 保存 / 加载景观

查表下标的位序：基因自身的等位基因为最高位，随后按存储顺序排列各邻居。
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from gcea.errors import DimensionError, FormatError, ParameterError, ResourceError

logger = logging.getLogger(__name__)

# 表项按 float64 存储
TABLE_ENTRY_BYTES = 8
DEFAULT_MAX_TABLE_BYTES = 2 * 1024 ** 3
# 穷举上限
BRUTE_FORCE_MAX_N = 20
# 与最大值相差在此范围内的候选者，会用 evaluate 重新精确比较
_TIE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class NkLandscape:
    """
    一个 NK 景观实例，生成后不可变，可以被多个运行同时只读使用。

    neighbors 形状为 (n, k)，tables 形状为 (n, 2^(k+1))。
    """
    n: int
    k: int
    neighbors: np.ndarray
    tables: np.ndarray
    seed: int
    # 预计算：每行为 [i, 邻居...]，与查表位序一致
    _links: np.ndarray = field(init=False, repr=False)
    _powers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        links = np.column_stack([np.arange(self.n, dtype=np.int64), self.neighbors.astype(np.int64)])
        powers = np.left_shift(1, np.arange(self.k, -1, -1, dtype=np.int64))
        object.__setattr__(self, "_links", links)
        object.__setattr__(self, "_powers", powers)
        self.neighbors.setflags(write=False)
        self.tables.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NkLandscape):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and self.seed == other.seed
            and np.array_equal(self.neighbors, other.neighbors)
            and np.array_equal(self.tables, other.tables)
        )

    __hash__ = None  # type: ignore[assignment]

    def table_indices(self, genome: np.ndarray) -> np.ndarray:
        """每个基因在自己表中的下标。"""
        return genome[self._links] @ self._powers


def check_parameters(n: int, k: int, max_table_bytes: int = DEFAULT_MAX_TABLE_BYTES) -> None:
    """
    校验 NK 参数，不分配任何内存。

    Raises:
        ParameterError: n < 1 或 k 不满足 0 <= k <= n-1
        ResourceError: 表的总内存超过 max_table_bytes
    """
    if n < 1:
        raise ParameterError(f"n 必须为正整数，当前 n={n}")
    if k < 0 or k > n - 1:
        raise ParameterError(f"k 必须满足 0 <= k <= n-1，当前 n={n}, k={k}")
    needed = n * (2 ** (k + 1)) * TABLE_ENTRY_BYTES
    if needed > max_table_bytes:
        raise ResourceError(
            f"NK 表需要 {needed} 字节，超过上限 {max_table_bytes} 字节（k={k} 过大）"
        )


def generate(n: int, k: int, seed: int, max_table_bytes: int = DEFAULT_MAX_TABLE_BYTES) -> NkLandscape:
    """
    生成 NK 景观。

    Args:
        n: 基因组长度 N
        k: 每个基因的上位性邻居数 K
        seed: 64 位生成种子
        max_table_bytes: 表内存上限

    Returns:
        NkLandscape: 对相同 (n, k, seed) 结果完全相同
    """
    check_parameters(n, k, max_table_bytes)
    if not 0 <= seed < 2 ** 64:
        raise ParameterError(f"种子必须是 64 位无符号整数: {seed}")
    rng = np.random.default_rng(seed)
    neighbors = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        # 从除自身以外的基因中无放回均匀抽取 k 个
        others = np.delete(np.arange(n), i)
        neighbors[i] = rng.choice(others, size=k, replace=False)
    tables = rng.uniform(0.0, 1.0, size=(n, 2 ** (k + 1)))
    logger.debug("生成 NK 景观 n=%d k=%d seed=%d", n, k, seed)
    return NkLandscape(n=n, k=k, neighbors=neighbors, tables=tables, seed=int(seed))


def _check_genome(landscape: NkLandscape, genome: np.ndarray) -> np.ndarray:
    genome = np.asarray(genome)
    if genome.ndim != 1 or genome.shape[0] != landscape.n:
        raise DimensionError(
            f"基因组长度 {genome.shape} 与景观 n={landscape.n} 不一致"
        )
    if genome.size and (genome.min() < 0 or genome.max() > 1):
        raise DimensionError("NK 基因组只能包含 0 / 1")
    return genome.astype(np.int64, copy=False)


def evaluate(landscape: NkLandscape, genome: np.ndarray) -> float:
    """
    计算基因组的适应度：(1/N) * sum_i table_i[index(i)]，结果在 [0, 1]。

    求和使用 math.fsum（精确舍入），结果与求和顺序无关。
    """
    genome = _check_genome(landscape, genome)
    values = landscape.tables[np.arange(landscape.n), landscape.table_indices(genome)]
    return math.fsum(values) / landscape.n


def contribution(landscape: NkLandscape, gene_index: int, genome: np.ndarray) -> float:
    """
    单个基因的贡献值（一次查表）。

    Raises:
        DimensionError: gene_index 越界或基因组长度不符
    """
    genome = _check_genome(landscape, genome)
    if not 0 <= gene_index < landscape.n:
        raise DimensionError(f"基因下标 {gene_index} 越界 [0, {landscape.n})")
    bits = genome[landscape._links[gene_index]]
    return float(landscape.tables[gene_index, int(bits @ landscape._powers)])


def code_to_genome(code: int, n: int) -> np.ndarray:
    """整数编码转基因组，基因 0 为最高位。"""
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((code >> shifts) & 1).astype(np.uint8)


def brute_force_optimum(landscape: NkLandscape) -> Tuple[np.ndarray, float]:
    """
    穷举全部 2^n 个基因组求最优，平局取整数编码最小者。

    Returns:
        (基因组, 适应度)

    Raises:
        ResourceError: n > 20
    """
    n = landscape.n
    if n > BRUTE_FORCE_MAX_N:
        raise ResourceError(f"穷举只支持 n <= {BRUTE_FORCE_MAX_N}，当前 n={n}")
    codes = np.arange(2 ** n, dtype=np.int64)
    # bits[:, j] 为基因 j 的取值
    bits = np.empty((codes.shape[0], n), dtype=np.uint8)
    for j in range(n):
        bits[:, j] = (codes >> (n - 1 - j)) & 1
    totals = np.zeros(codes.shape[0], dtype=np.float64)
    for i in range(n):
        index = bits[:, landscape._links[i]] @ landscape._powers
        totals += landscape.tables[i, index]
    totals /= n

    # 浮点累加顺序与 evaluate 不同，近似平局的候选者逐个精确复核
    candidates = np.flatnonzero(totals >= totals.max() - _TIE_TOLERANCE)
    best_code = -1
    best_value = -math.inf
    for code in candidates:
        value = evaluate(landscape, bits[code])
        if value > best_value:
            best_code, best_value = int(code), value
    return code_to_genome(best_code, n), best_value


# ------------ 持久化 ------------

def to_dict(landscape: NkLandscape) -> dict:
    return {
        "n": landscape.n,
        "k": landscape.k,
        "seed": landscape.seed,
        "neighbors": landscape.neighbors.tolist(),
        "tables": landscape.tables.tolist(),
    }


def save(landscape: NkLandscape, path: str) -> None:
    """
    将景观写入 JSON 文件。

    浮点数按 repr 写出，load 后逐位一致。
    """
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(to_dict(landscape), f, separators=(",", ":"))
            f.write("\n")
    except OSError as exc:
        raise ParameterError(f"无法写入景观文件 {path}: {exc}") from exc


def _require_int(data: dict, name: str) -> int:
    value = data.get(name)
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"字段 {name} 必须是整数，当前为 {value!r}", field=name)
    return value


def from_dict(data: dict) -> NkLandscape:
    """
    从字典还原景观并校验全部不变量。

    Raises:
        FormatError: 字段缺失、类型错误或违反不变量，异常中带有出错字段名
    """
    if not isinstance(data, dict):
        raise FormatError("景观文件顶层必须是对象", field="<root>")
    n = _require_int(data, "n")
    k = _require_int(data, "k")
    seed = _require_int(data, "seed")
    if n < 1 or k < 0 or k > n - 1:
        raise FormatError(f"n={n}, k={k} 不满足 0 <= k <= n-1", field="k")

    neighbors: List = data.get("neighbors")
    if not isinstance(neighbors, list) or len(neighbors) != n:
        raise FormatError(f"neighbors 必须是长度为 {n} 的数组", field="neighbors")
    for i, row in enumerate(neighbors):
        if not isinstance(row, list) or len(row) != k:
            raise FormatError(f"neighbors[{i}] 必须包含 {k} 个下标", field="neighbors")
        if any(isinstance(j, bool) or not isinstance(j, int) or not 0 <= j < n or j == i for j in row):
            raise FormatError(f"neighbors[{i}] 含非法下标: {row}", field="neighbors")
        if len(set(row)) != k:
            raise FormatError(f"neighbors[{i}] 含重复下标: {row}", field="neighbors")

    tables: List = data.get("tables")
    width = 2 ** (k + 1)
    if not isinstance(tables, list) or len(tables) != n:
        raise FormatError(f"tables 必须是长度为 {n} 的数组", field="tables")
    for i, row in enumerate(tables):
        if not isinstance(row, list) or len(row) != width:
            raise FormatError(f"tables[{i}] 必须包含 {width} 项", field="tables")
        for value in row:
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                raise FormatError(f"tables[{i}] 含越界数值 {value!r}，必须在 [0, 1]", field="tables")

    return NkLandscape(
        n=n,
        k=k,
        neighbors=np.array(neighbors, dtype=np.int64).reshape(n, k),
        tables=np.array(tables, dtype=np.float64).reshape(n, width),
        seed=seed,
    )


def load(path: str) -> NkLandscape:
    """从 JSON 文件加载景观。"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"景观文件 {path} 不是合法 JSON: {exc}", field="<root>") from exc
    except OSError as exc:
        raise ParameterError(f"无法读取景观文件 {path}: {exc}") from exc
    return from_dict(data)
