# -*- coding: utf-8 -*-
"""
engine.py - 稳态进化主循环与各算法变体

负责：
- 二元锦标赛选择、带精英保护的随机替换
- 标准 EA（单点交叉）、k 点交叉 EA
- 全局交叉 EA：GCEA（环形随机切点）、GCEA-0（等间距固定切点）、按写入步数切换父代的变体
- 合作协同进化 CCEA-1（最优伙伴）、CCEA-2（最优伙伴与随机伙伴取较好者）

所有算法共用一个 Evaluator，预算按完整目标函数调用次数计，初始化也计入。
"""

from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from gcea import nk_landscape
from gcea.benchmarks import FUNCTIONS, MIN_DIMENSION
from gcea.errors import ConfigurationError, DimensionError, ParameterError
from gcea.genome import (
    CrossoverPlan,
    global_crossover,
    kpoint_crossover,
    literal_segment_owners,
    make_fixed_plan,
    make_random_plan,
    mutate_one_gene,
    one_point_crossover,
    random_genomes,
    segment_owners,
)
from gcea.objective import Evaluator, Objective, build_objective

logger = logging.getLogger(__name__)

ALGORITHMS = ("ea", "gcea", "gcea0", "gcea_literal", "ccea1", "ccea2", "ea_kpoint")
NK_FUNCTION = "nk"
# 景观种子派生时使用的标签，与运行种子的 cell_key 区分开
_LANDSCAPE_TAG = 0x4E4B


# ------------ 数据结构 ------------

@dataclass
class Individual:
    """基因组及其最近一次记录的适应度（最大化尺度）"""
    genome: np.ndarray
    fitness: float


class Population:
    """
    固定大小的种群，基因组按行存放在矩阵中。

    best_index 为记录适应度最高的成员下标，平局取最小下标。
    """

    def __init__(self, genomes: np.ndarray, fitness: np.ndarray):
        if genomes.shape[0] == 0 or genomes.shape[0] != fitness.shape[0]:
            raise DimensionError(f"种群基因组数 {genomes.shape[0]} 与适应度数 {fitness.shape[0]} 不一致")
        self.genomes = genomes
        self.fitness = np.asarray(fitness, dtype=np.float64)
        self.best_index = 0
        self.update_best()

    @property
    def size(self) -> int:
        return self.genomes.shape[0]

    def update_best(self) -> int:
        self.best_index = int(np.argmax(self.fitness))
        return self.best_index

    def member(self, index: int) -> Individual:
        return Individual(genome=self.genomes[index], fitness=float(self.fitness[index]))

    def best(self) -> Individual:
        return self.member(self.best_index)


@dataclass(frozen=True)
class RunConfig:
    """一次运行的完整参数"""
    algorithm: str
    function: str
    n: int
    k: int = 0
    s: int = 2
    pop_size: int = 50
    eval_budget: int = 100000
    seed: int = 0
    run_index: int = 0
    trace_interval: int = 1000
    landscape_path: Optional[str] = None
    max_table_bytes: int = nk_landscape.DEFAULT_MAX_TABLE_BYTES

    @property
    def cell_key(self) -> int:
        """同一实验格（除 run_index 外参数相同）共享的整数键。"""
        text = (
            f"{self.algorithm}|{self.function}|{self.n}|{self.k}|{self.s}"
            f"|{self.pop_size}|{self.eval_budget}"
        )
        return zlib.crc32(text.encode("utf-8"))

    @property
    def run_seed(self) -> int:
        """由 (主种子, cell_key, run_index) 派生的运行种子。"""
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.cell_key, self.run_index))
        return int(sequence.generate_state(1, dtype=np.uint64)[0])

    @property
    def landscape_seed(self) -> int:
        """
        NK 景观种子，只取决于 (主种子, n, k, run_index)。

        同一批次中第 i 次运行的所有算法面对同一个景观。
        """
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(_LANDSCAPE_TAG, self.n, self.k, self.run_index)
        )
        return int(sequence.generate_state(1, dtype=np.uint64)[0])

    @property
    def is_ccea(self) -> bool:
        return self.algorithm in ("ccea1", "ccea2")

    def validate(self) -> None:
        """
        校验参数组合，任何评估开始前调用。

        Raises:
            ParameterError: 参数取值非法或不满足整除要求
            ConfigurationError: 种群 / 预算设置无法运行
            ResourceError: NK 表内存超过上限
        """
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"未知算法 {self.algorithm!r}，可选: {', '.join(ALGORITHMS)}")
        if self.function != NK_FUNCTION and self.function not in FUNCTIONS:
            raise ParameterError(
                f"未知目标函数 {self.function!r}，可选: nk, {', '.join(sorted(FUNCTIONS))}"
            )
        if self.seed < 0 or self.run_index < 0:
            raise ParameterError(f"种子和运行序号必须非负，当前 seed={self.seed}, run_index={self.run_index}")
        if self.n < 1:
            raise ParameterError(f"n 必须为正整数，当前 n={self.n}")
        if self.function == NK_FUNCTION:
            if self.landscape_path is None:
                nk_landscape.check_parameters(self.n, self.k, self.max_table_bytes)
        elif self.n < MIN_DIMENSION[self.function]:
            raise ParameterError(f"{self.function} 至少需要 n >= {MIN_DIMENSION[self.function]}，当前 n={self.n}")
        if self.pop_size < 2:
            raise ConfigurationError(f"精英保护替换要求 pop_size >= 2，当前 pop_size={self.pop_size}")
        if self.trace_interval < 1:
            raise ParameterError(f"trace_interval 必须为正整数，当前为 {self.trace_interval}")
        if self.s < 1:
            raise ParameterError(f"s 必须 >= 1，当前 s={self.s}")

        if self.algorithm == "ea" and self.n < 2:
            raise ParameterError(f"单点交叉要求 n >= 2，当前 n={self.n}")
        if self.algorithm == "ea_kpoint" and not 1 <= self.s <= self.n - 1:
            raise ParameterError(f"ea_kpoint 的交叉点数 s 必须满足 1 <= s <= n-1，当前 n={self.n}, s={self.s}")
        if self.algorithm in ("gcea", "gcea_literal", "gcea0") and self.s > self.n:
            raise ParameterError(f"全局交叉要求 s <= n，当前 n={self.n}, s={self.s}")
        if self.algorithm == "gcea0" or self.is_ccea:
            if self.n % self.s != 0:
                raise ParameterError(f"{self.algorithm} 要求 s 整除 n，当前 n={self.n}, s={self.s}")
        if self.is_ccea:
            if self.s < 2:
                raise ParameterError(f"{self.algorithm} 要求 s >= 2，当前 s={self.s}")
            if self.s * self.pop_size >= self.eval_budget:
                raise ConfigurationError(
                    f"初始评估需要 s*pop_size={self.s * self.pop_size} 次，"
                    f"不小于预算 eval_budget={self.eval_budget}"
                )
        elif self.eval_budget < self.pop_size:
            raise ConfigurationError(
                f"预算 eval_budget={self.eval_budget} 小于种群规模 pop_size={self.pop_size}"
            )

    def build_objective(self) -> Objective:
        return build_objective(
            self.function,
            self.n,
            k=self.k,
            landscape_seed=self.landscape_seed,
            landscape_path=self.landscape_path,
            max_table_bytes=self.max_table_bytes,
        )


@dataclass
class RunResult:
    """一次运行的最优记录"""
    config: RunConfig
    seed: int
    best_fitness: float
    best_genome: np.ndarray
    evaluations_used: int
    offspring: int
    selections: int
    trace: List[Tuple[int, float]] = field(default_factory=list)


@dataclass
class CceaState:
    """
    合作协同进化的状态：S 个子种群，子种群 b 负责变量 [b*N/S, (b+1)*N/S)。
    """
    subpops: List[Population]
    block_size: int

    @property
    def s(self) -> int:
        return len(self.subpops)

    def block_slice(self, block_index: int) -> slice:
        start = block_index * self.block_size
        return slice(start, start + self.block_size)


# ------------ 选择与替换 ------------

def tournament_indices(fitness: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    一次做 count 场二元锦标赛，返回胜者下标。

    每场有放回地均匀抽两个成员，适应度高者胜，完全相等时随机决定。
    """
    candidates = rng.integers(0, fitness.shape[0], size=(count, 2))
    first, second = candidates[:, 0], candidates[:, 1]
    coin = rng.random(count) < 0.5
    f1, f2 = fitness[first], fitness[second]
    tie_winner = np.where(coin, first, second)
    return np.where(f1 > f2, first, np.where(f2 > f1, second, tie_winner))


def tournament_select(pop: Population, rng: np.random.Generator) -> Individual:
    """二元锦标赛选出一个个体。"""
    return pop.member(int(tournament_indices(pop.fitness, 1, rng)[0]))


def replace_random_elitist(pop: Population, genome: np.ndarray, fitness: float,
                           rng: np.random.Generator) -> int:
    """
    从除当前最优外的成员中均匀选一个，无条件用后代替换。

    Returns:
        int: 被替换的下标

    Raises:
        ConfigurationError: 种群只有 1 个成员，没有可替换的位置
    """
    if pop.size < 2:
        raise ConfigurationError("种群只有 1 个成员时精英保护下无可替换位置")
    victim = int(rng.integers(pop.size - 1))
    if victim >= pop.best_index:
        victim += 1
    pop.genomes[victim] = genome
    pop.fitness[victim] = fitness
    pop.update_best()
    return victim


# ------------ 后代生成 ------------

class Breeder:
    """从种群产生一个未变异后代的策略，selections 统计选择调用次数"""

    def __init__(self):
        self.selections = 0

    def _select(self, pop: Population, count: int, rng: np.random.Generator) -> np.ndarray:
        self.selections += count
        return tournament_indices(pop.fitness, count, rng)

    def breed(self, pop: Population, rng: np.random.Generator) -> Tuple[np.ndarray, Optional[CrossoverPlan]]:
        raise NotImplementedError


class OnePointBreeder(Breeder):
    """两次选择 + 单点交叉；长度为 1 的子基因组直接复制第一个父代"""

    def breed(self, pop, rng):
        first, second = self._select(pop, 2, rng)
        p1, p2 = pop.genomes[first], pop.genomes[second]
        if p1.shape[0] < 2:
            return p1.copy(), None
        return one_point_crossover(p1, p2, rng), None


class KPointBreeder(Breeder):
    """两次选择 + k 点交叉"""

    def __init__(self, points: int):
        super().__init__()
        self.points = points

    def breed(self, pop, rng):
        first, second = self._select(pop, 2, rng)
        return kpoint_crossover(pop.genomes[first], pop.genomes[second], self.points, rng), None


class GlobalCrossoverBreeder(Breeder):
    """
    全局交叉：每段各做一次锦标赛选择。

    mode:
        random_ring  每个后代重新抽取环形切点（GCEA）
        fixed        等间距固定切点（GCEA-0）
        literal      按写入步数切换父代，需要 S+1 次选择
    """

    MODES = ("random_ring", "fixed", "literal")

    def __init__(self, n: int, s: int, mode: str = "random_ring"):
        super().__init__()
        if mode not in self.MODES:
            raise ParameterError(f"未知全局交叉模式 {mode!r}，可选: {', '.join(self.MODES)}")
        self.n = n
        self.s = s
        self.mode = mode
        self._fixed_points = make_fixed_plan(n, s) if mode == "fixed" else None
        self._fixed_owners = segment_owners(self._fixed_points, n) if mode == "fixed" else None

    def plan_owners(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """返回 (切点, 每个位置所属的段号)。"""
        if self.mode == "fixed":
            return self._fixed_points, self._fixed_owners
        points = make_random_plan(self.n, self.s, rng)
        if self.mode == "literal":
            return points, literal_segment_owners(points, self.n)
        return points, segment_owners(points, self.n)

    def breed(self, pop, rng):
        points, owners = self.plan_owners(rng)
        parent_count = self.s + 1 if self.mode == "literal" else self.s
        chosen = self._select(pop, parent_count, rng)
        child = global_crossover(points, pop.genomes, owners=owners, parent_rows=chosen)
        return child, CrossoverPlan(points=points, segment_parents=chosen)


# ------------ 主循环 ------------

class SteadyStateEngine:
    """单一种群的稳态进化：每步产生、评估并插入一个后代"""

    def __init__(self, config: RunConfig, objective: Objective, breeder: Breeder):
        self.config = config
        self.objective = objective
        self.breeder = breeder
        self.seed = config.run_seed
        self.rng = np.random.default_rng(self.seed)
        self.evaluator = Evaluator(objective, config.eval_budget, config.trace_interval)
        self.population: Optional[Population] = None
        self.offspring = 0

    def initialise(self) -> Population:
        genomes = random_genomes(self.rng, self.config.pop_size, self.objective.n,
                                 self.objective.representation)
        fitness = np.array([self.evaluator.evaluate(g) for g in genomes])
        self.population = Population(genomes, fitness)
        return self.population

    def step(self) -> Optional[CrossoverPlan]:
        """产生一个后代：交叉、变异、评估、替换。"""
        child, plan = self.breeder.breed(self.population, self.rng)
        child = mutate_one_gene(child, self.rng)
        fitness = self.evaluator.evaluate(child)
        replace_random_elitist(self.population, child, fitness, self.rng)
        self.offspring += 1
        return plan

    def run(self) -> RunResult:
        self.initialise()
        while self.evaluator.remaining > 0:
            self.step()
        return _finish(self.config, self.seed, self.evaluator, self.offspring, self.breeder.selections)


def compose(state: CceaState, block_index: int, sub_genome: np.ndarray, partner_rule: str,
            rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    把子基因组补全为完整基因组。

    Args:
        state: CCEA 状态
        block_index: sub_genome 所在的块
        sub_genome: 长度为 N/S 的子基因组
        partner_rule: best 取其他子种群的最优成员，random 取均匀随机成员
        rng: partner_rule 为 random 时必需

    Returns:
        np.ndarray: 按块顺序拼接的完整基因组
    """
    if not 0 <= block_index < state.s:
        raise DimensionError(f"块下标 {block_index} 越界 [0, {state.s})")
    if sub_genome.shape[0] != state.block_size:
        raise DimensionError(f"子基因组长度 {sub_genome.shape[0]} 与块长度 {state.block_size} 不一致")
    if partner_rule not in ("best", "random"):
        raise ParameterError(f"未知伙伴规则 {partner_rule!r}")
    parts = []
    for b, pop in enumerate(state.subpops):
        if b == block_index:
            parts.append(sub_genome)
        elif partner_rule == "best":
            parts.append(pop.genomes[pop.best_index])
        else:
            parts.append(pop.genomes[int(rng.integers(pop.size))])
    return np.concatenate(parts)


class CooperativeEngine:
    """
    轮转式合作协同进化。

    variant:
        ccea1  后代与其他子种群的最优成员组合评估（每个后代 1 次评估）
        ccea2  分别与最优成员、随机成员组合评估，取较好者（每个后代 2 次评估）
    """

    def __init__(self, config: RunConfig, objective: Objective, variant: str):
        if variant not in ("ccea1", "ccea2"):
            raise ParameterError(f"未知 CCEA 变体 {variant!r}")
        self.config = config
        self.objective = objective
        self.variant = variant
        self.debit = 2 if variant == "ccea2" else 1
        self.seed = config.run_seed
        self.rng = np.random.default_rng(self.seed)
        self.evaluator = Evaluator(objective, config.eval_budget, config.trace_interval)
        self.breeder = OnePointBreeder()
        self.state: Optional[CceaState] = None
        self.offspring = 0

    def initialise(self) -> CceaState:
        s = self.config.s
        block_size = self.objective.n // s
        pop_size = self.config.pop_size
        subpops = [
            Population(
                random_genomes(self.rng, pop_size, block_size, self.objective.representation),
                np.full(pop_size, -math.inf),
            )
            for _ in range(s)
        ]
        self.state = CceaState(subpops=subpops, block_size=block_size)
        # 初始评估：与其他子种群的随机成员组合
        for b, pop in enumerate(subpops):
            for j in range(pop_size):
                full = compose(self.state, b, pop.genomes[j], "random", self.rng)
                pop.fitness[j] = self.evaluator.evaluate(full)
            pop.update_best()
        return self.state

    def breed_block(self, block_index: int) -> None:
        """子种群 block_index 产生并评估一个后代。"""
        pop = self.state.subpops[block_index]
        child, _ = self.breeder.breed(pop, self.rng)
        child = mutate_one_gene(child, self.rng)
        fitness = self.evaluator.evaluate(compose(self.state, block_index, child, "best"))
        if self.variant == "ccea2":
            random_fitness = self.evaluator.evaluate(
                compose(self.state, block_index, child, "random", self.rng)
            )
            fitness = max(fitness, random_fitness)
        replace_random_elitist(pop, child, fitness, self.rng)
        self.offspring += 1

    def run(self) -> RunResult:
        self.initialise()
        while True:
            for b in range(self.state.s):
                if self.evaluator.remaining < self.debit:
                    return _finish(self.config, self.seed, self.evaluator, self.offspring,
                                   self.breeder.selections)
                self.breed_block(b)


def _finish(config: RunConfig, seed: int, evaluator: Evaluator, offspring: int, selections: int) -> RunResult:
    evaluator.finish()
    logger.info(
        "%s 第 %d 次运行结束: 最优 %r，评估 %d 次",
        config.algorithm, config.run_index, evaluator.best_raw, evaluator.used,
    )
    return RunResult(
        config=config,
        seed=seed,
        best_fitness=evaluator.best_raw,
        best_genome=evaluator.best_genome,
        evaluations_used=evaluator.used,
        offspring=offspring,
        selections=selections,
        trace=list(evaluator.trace),
    )


# ------------ 各算法入口 ------------

def _prepare(config: RunConfig, objective: Optional[Objective]) -> Objective:
    config.validate()
    if objective is None:
        objective = config.build_objective()
    if objective.n != config.n:
        raise DimensionError(f"目标函数维度 {objective.n} 与配置 n={config.n} 不一致")
    logger.info(
        "开始运行 %s: function=%s n=%d k=%d s=%d run=%d",
        config.algorithm, config.function, config.n, config.k, config.s, config.run_index,
    )
    return objective


def run_ea(config: RunConfig, objective: Optional[Objective] = None) -> RunResult:
    """标准稳态 EA：两次锦标赛 + 单点交叉。"""
    objective = _prepare(config, objective)
    return SteadyStateEngine(config, objective, OnePointBreeder()).run()


def run_gcea(config: RunConfig, mode: str = "random_ring",
             objective: Optional[Objective] = None) -> RunResult:
    """全局交叉 EA，mode 为 random_ring（GCEA）、fixed（GCEA-0）或 literal。"""
    objective = _prepare(config, objective)
    breeder = GlobalCrossoverBreeder(objective.n, config.s, mode)
    return SteadyStateEngine(config, objective, breeder).run()


def run_ea_kpoint(config: RunConfig, points: Optional[int] = None,
                  objective: Optional[Objective] = None) -> RunResult:
    """两父代 k 点交叉 EA，默认 points = s（与 GCEA 的切点数相同）。"""
    objective = _prepare(config, objective)
    points = config.s if points is None else points
    if not 1 <= points <= objective.n - 1:
        raise ParameterError(f"交叉点数必须满足 1 <= points <= n-1，当前 n={objective.n}, points={points}")
    return SteadyStateEngine(config, objective, KPointBreeder(points)).run()


def run_ccea(config: RunConfig, variant: str = "ccea1",
             objective: Optional[Objective] = None) -> RunResult:
    """轮转式合作协同进化。"""
    objective = _prepare(config, objective)
    return CooperativeEngine(config, objective, variant).run()


def run(config: RunConfig, objective: Optional[Objective] = None) -> RunResult:
    """按 config.algorithm 分派到具体算法。"""
    algorithm = config.algorithm
    if algorithm == "ea":
        return run_ea(config, objective)
    if algorithm == "gcea":
        return run_gcea(config, "random_ring", objective)
    if algorithm == "gcea0":
        return run_gcea(config, "fixed", objective)
    if algorithm == "gcea_literal":
        return run_gcea(config, "literal", objective)
    if algorithm == "ea_kpoint":
        return run_ea_kpoint(config, None, objective)
    if algorithm in ("ccea1", "ccea2"):
        return run_ccea(config, algorithm, objective)
    raise ParameterError(f"未知算法 {algorithm!r}，可选: {', '.join(ALGORITHMS)}")
