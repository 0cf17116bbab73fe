# -*- coding: utf-8 -*-
"""
experiment.py - 可复现实验的后端

负责：
- 解析 sweep 规格文件，展开为 (算法 × 函数 × n × k × s) 的实验格
- 在任何评估开始前校验全部实验格
- SweepRunner：可并发执行各次运行，由单一收集者按 (实验格, 运行序号) 顺序写文件
- 结果 / 轨迹 CSV 的读写，以及从结果文件做两两比较
"""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from gcea import engine
from gcea.benchmarks import Direction
from gcea.engine import NK_FUNCTION, RunConfig, RunResult
from gcea.errors import FormatError, GceaError, ParameterError
from gcea.stats import ResultSet, comparison_frame, pairwise, summarize

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "algorithm", "function", "n", "k", "s", "pop_size", "eval_budget",
    "run_index", "seed", "best_fitness", "evaluations_used", "offspring",
]
TRACE_COLUMNS = ["evaluations", "best_fitness"]
SUMMARY_COLUMNS = [
    "cell_id", "algorithm", "function", "n", "k", "s", "pop_size", "eval_budget",
    "runs", "completed", "mean", "std", "status", "error",
]
# 分组比较时区分实验格的列
_CELL_COLUMNS = ["algorithm", "function", "n", "k", "s", "pop_size", "eval_budget"]


def direction_of(function: str) -> Direction:
    return Direction.MAXIMISE if function == NK_FUNCTION else Direction.MINIMISE


# ------------ 实验格与规格 ------------

@dataclass(frozen=True)
class Cell:
    """一个实验格：同一组参数的 runs 次独立运行"""
    cell_id: int
    template: RunConfig
    runs: int
    first_run: int = 0

    @property
    def configs(self) -> List[RunConfig]:
        return [replace(self.template, run_index=self.first_run + r) for r in range(self.runs)]


@dataclass
class ExperimentSpec:
    algorithms: List[str]
    functions: List[str]
    n: List[int]
    k: List[int]
    s: List[int]
    runs: int
    seed: int
    pop_size: int
    eval_budget: int
    output_dir: str
    trace_interval: int = 1000
    max_table_bytes: int = 2 * 1024 ** 3

    def expand(self) -> List[Cell]:
        """
        展开网格，顺序为 algorithm、function、n、k、s 的字典序。

        k 只对 nk 生效，其他函数只展开 k=0 一次。
        """
        cells: List[Cell] = []
        for algorithm, function, n in itertools.product(self.algorithms, self.functions, self.n):
            ks = self.k if function == NK_FUNCTION else [0]
            for k, s in itertools.product(ks, self.s):
                template = RunConfig(
                    algorithm=algorithm,
                    function=function,
                    n=n,
                    k=k,
                    s=s,
                    pop_size=self.pop_size,
                    eval_budget=self.eval_budget,
                    seed=self.seed,
                    trace_interval=self.trace_interval,
                    max_table_bytes=self.max_table_bytes,
                )
                cells.append(Cell(cell_id=len(cells), template=template, runs=self.runs))
        return cells


def _int_list(data: dict, name: str, default: Optional[List[int]] = None) -> List[int]:
    value = data.get(name, default)
    if isinstance(value, int) and not isinstance(value, bool):
        value = [value]
    if (
        not isinstance(value, list)
        or not value
        or any(isinstance(v, bool) or not isinstance(v, int) for v in value)
    ):
        raise FormatError(f"字段 {name} 必须是非空整数数组，当前为 {value!r}", field=name)
    return value


def _str_list(data: dict, name: str) -> List[str]:
    value = data.get(name)
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not value or any(not isinstance(v, str) for v in value):
        raise FormatError(f"字段 {name} 必须是非空字符串数组，当前为 {value!r}", field=name)
    return value


def _int_field(data: dict, name: str, default: int) -> int:
    value = data.get(name, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"字段 {name} 必须是整数，当前为 {value!r}", field=name)
    return value


def spec_from_dict(data: dict, defaults: dict, output_dir: Optional[str] = None) -> ExperimentSpec:
    """
    由字典构造实验规格，缺失的可选项取自配置。

    Args:
        data: 规格文件内容
        defaults: ConfigManager 加载的配置
        output_dir: 命令行指定的输出目录，优先于文件中的 output_dir
    """
    if not isinstance(data, dict):
        raise FormatError("规格文件顶层必须是对象", field="<root>")
    functions = _str_list(data, "functions")
    k_default = None if NK_FUNCTION in functions else [0]
    out = output_dir or data.get("output_dir")
    if not isinstance(out, str) or not out:
        raise FormatError("缺少输出目录 output_dir", field="output_dir")
    return ExperimentSpec(
        algorithms=_str_list(data, "algorithms"),
        functions=functions,
        n=_int_list(data, "n"),
        k=_int_list(data, "k", k_default),
        s=_int_list(data, "s"),
        runs=_int_field(data, "runs", defaults["runs"]),
        seed=_int_field(data, "seed", 0),
        pop_size=_int_field(data, "pop_size", defaults["pop_size"]),
        eval_budget=_int_field(data, "eval_budget", defaults["eval_budget"]),
        output_dir=out,
        trace_interval=_int_field(data, "trace_interval", defaults["trace_interval"]),
        max_table_bytes=_int_field(data, "max_table_bytes", defaults["max_table_bytes"]),
    )


def load_spec(path: str, defaults: dict, output_dir: Optional[str] = None) -> ExperimentSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"规格文件 {path} 不是合法 JSON: {exc}", field="<root>") from exc
    except OSError as exc:
        raise ParameterError(f"无法读取规格文件 {path}: {exc}") from exc
    return spec_from_dict(data, defaults, output_dir)


def validate_cells(cells: Sequence[Cell]) -> None:
    """逐格校验；任何一格非法都会在评估开始前抛出异常。"""
    for cell in cells:
        if cell.runs < 1:
            raise ParameterError(f"runs 必须 >= 1，当前 runs={cell.runs}")
        cell.template.validate()


# ------------ CSV ------------

def result_record(result: RunResult) -> dict:
    config = result.config
    return {
        "algorithm": config.algorithm,
        "function": config.function,
        "n": config.n,
        "k": config.k,
        "s": config.s,
        "pop_size": config.pop_size,
        "eval_budget": config.eval_budget,
        "run_index": config.run_index,
        "seed": result.seed,
        "best_fitness": result.best_fitness,
        "evaluations_used": result.evaluations_used,
        "offspring": result.offspring,
    }


def write_frame(frame: pd.DataFrame, path: Path) -> None:
    """UTF-8、LF 换行、带表头。"""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    except OSError as exc:
        raise ParameterError(f"无法写入 {path}: {exc}") from exc


def write_results(results: Sequence[RunResult], path: Path) -> None:
    write_frame(pd.DataFrame([result_record(r) for r in results], columns=RESULT_COLUMNS), path)


def write_trace(result: RunResult, path: Path) -> None:
    write_frame(pd.DataFrame(result.trace, columns=TRACE_COLUMNS), path)


def read_results(path: str) -> pd.DataFrame:
    """
    读取结果 CSV，校验表头以及每一行的运行参数。

    Raises:
        ParameterError: 文件无法读取
        FormatError: 不是 CSV、缺少必需的列，或某行参数组合非法
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise FormatError(f"结果文件 {path} 不是合法 CSV: {exc}", field="<root>") from exc
    except OSError as exc:
        raise ParameterError(f"无法读取结果文件 {path}: {exc}") from exc
    missing = [c for c in RESULT_COLUMNS if c not in frame.columns]
    if missing:
        raise FormatError(f"结果文件 {path} 缺少列: {', '.join(missing)}", field=missing[0])
    for row_number, row in enumerate(frame.itertuples(index=False), start=2):
        try:
            _check_row(row)
        except (GceaError, TypeError, ValueError) as exc:
            raise FormatError(f"结果文件 {path} 第 {row_number} 行非法: {exc}", field="row") from exc
    return frame


def _check_row(row) -> None:
    RunConfig(
        algorithm=str(row.algorithm),
        function=str(row.function),
        n=int(row.n),
        k=int(row.k),
        s=int(row.s),
        pop_size=int(row.pop_size),
        eval_budget=int(row.eval_budget),
        run_index=int(row.run_index),
    ).validate()
    if not 0 <= int(row.evaluations_used) <= int(row.eval_budget):
        raise ParameterError(
            f"evaluations_used={row.evaluations_used} 超出 eval_budget={row.eval_budget}"
        )


# ------------ 运行 ------------

def execute(config: RunConfig) -> Tuple[Optional[RunResult], Optional[str]]:
    """
    执行一次运行（可在子进程中调用）。

    Returns:
        (结果, None) 或 (None, 错误信息)
    """
    try:
        return engine.run(config), None
    except Exception as exc:  # pylint: disable=broad-except
        logger.warning("运行失败 %s 第 %d 次: %s", config.algorithm, config.run_index, exc)
        return None, f"{type(exc).__name__}: {exc}"


@dataclass
class CellOutcome:
    cell: Cell
    results: List[RunResult] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SweepReport:
    outcomes: List[CellOutcome]
    results_path: Optional[Path] = None
    summary_path: Optional[Path] = None

    @property
    def failed_cells(self) -> List[int]:
        return [o.cell.cell_id for o in self.outcomes if o.failed]


class SweepRunner:
    """实验运行器，负责执行实验格（可并发）并按确定的顺序收集结果"""

    def __init__(self, jobs: int = 1):
        """
        初始化运行器

        Args:
            jobs: 并发进程数，1 表示在当前进程中顺序执行
        """
        if jobs < 1:
            raise ParameterError(f"jobs 必须 >= 1，当前 jobs={jobs}")
        self.jobs = jobs

    def _run_all(self, configs: List[Tuple[Tuple[int, int], RunConfig]]) -> Dict[Tuple[int, int], tuple]:
        if self.jobs == 1:
            return {key: execute(config) for key, config in configs}

        outcomes: Dict[Tuple[int, int], tuple] = {}
        with ProcessPoolExecutor(max_workers=self.jobs) as executor:
            futures = {executor.submit(execute, config): key for key, config in configs}
            for future in as_completed(futures):
                outcomes[futures[future]] = future.result()
        return outcomes

    def execute_cells(self, cells: Sequence[Cell]) -> List[CellOutcome]:
        """
        执行全部实验格。

        某次运行失败只会把所在实验格标记为失败，不会中断其他实验格。
        """
        validate_cells(cells)
        configs = [((cell.cell_id, c.run_index), c) for cell in cells for c in cell.configs]
        outcomes = self._run_all(configs)

        collected: List[CellOutcome] = []
        for cell in cells:
            outcome = CellOutcome(cell=cell)
            for config in cell.configs:
                result, error = outcomes[(cell.cell_id, config.run_index)]
                if error is not None:
                    outcome.error = outcome.error or f"run {config.run_index}: {error}"
                else:
                    outcome.results.append(result)
            collected.append(outcome)
            logger.info("实验格 %d/%d %s", cell.cell_id + 1, len(cells), "失败" if outcome.failed else "完成")
        return collected


def _summary_record(outcome: CellOutcome) -> dict:
    config = outcome.cell.template
    record = {
        "cell_id": outcome.cell.cell_id,
        "algorithm": config.algorithm,
        "function": config.function,
        "n": config.n,
        "k": config.k,
        "s": config.s,
        "pop_size": config.pop_size,
        "eval_budget": config.eval_budget,
        "runs": outcome.cell.runs,
        "completed": len(outcome.results),
        "mean": None,
        "std": None,
        "status": "failed" if outcome.failed else "ok",
        "error": outcome.error or "",
    }
    if outcome.results:
        summary = summarize([r.best_fitness for r in outcome.results])
        record["mean"] = summary.mean
        record["std"] = summary.std
    return record


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> SweepReport:
    """
    执行整个 sweep 并写出：
    - cells/cell_XXX.csv    每个实验格的结果
    - traces/cell_XXX_run_YYY.csv
    - results.csv           全部结果，按实验格、运行序号排序
    - summary.csv           每个实验格的均值 / 标准差 / 状态
    """
    cells = spec.expand()
    outcomes = SweepRunner(jobs).execute_cells(cells)

    root = Path(spec.output_dir)
    all_results: List[RunResult] = []
    for outcome in outcomes:
        cell_id = outcome.cell.cell_id
        write_results(outcome.results, root / "cells" / f"cell_{cell_id:03d}.csv")
        for result in outcome.results:
            write_trace(result, root / "traces" / f"cell_{cell_id:03d}_run_{result.config.run_index:03d}.csv")
        all_results.extend(outcome.results)

    results_path = root / "results.csv"
    summary_path = root / "summary.csv"
    write_results(all_results, results_path)
    write_frame(pd.DataFrame([_summary_record(o) for o in outcomes], columns=SUMMARY_COLUMNS), summary_path)
    report = SweepReport(outcomes=outcomes, results_path=results_path, summary_path=summary_path)
    if report.failed_cells:
        logger.warning("%d 个实验格失败: %s", len(report.failed_cells), report.failed_cells)
    return report


def run_batch(template: RunConfig, runs: int, out_path: str, jobs: int = 1,
              first_run: int = 0) -> CellOutcome:
    """
    同一组参数运行 runs 次，写出结果 CSV 和 <out>_traces/run_XXX.csv。

    参数非法时在运行前抛出异常；运行中的失败记录在返回值的 error 中。
    """
    cell = Cell(cell_id=0, template=template, runs=runs, first_run=first_run)
    outcome = SweepRunner(jobs).execute_cells([cell])[0]
    out = Path(out_path)
    write_results(outcome.results, out)
    trace_dir = out.with_name(f"{out.stem}_traces")
    for result in outcome.results:
        write_trace(result, trace_dir / f"run_{result.config.run_index:03d}.csv")
    return outcome


# ------------ 比较 ------------

def load_result_sets(paths: Sequence[str]) -> List[ResultSet]:
    """
    读取结果文件，每个文件按实验格拆分为若干组。

    Raises:
        ParameterError: 各组的目标函数 (function, n, k) 不一致，或总组数少于 2
    """
    result_sets: List[ResultSet] = []
    objectives = set()
    for path in paths:
        frame = read_results(path)
        for key, group in frame.groupby(_CELL_COLUMNS, sort=False):
            cell = dict(zip(_CELL_COLUMNS, key))
            objectives.add((cell["function"], int(cell["n"]), int(cell["k"])))
            label = f"{Path(path).stem}:{cell['algorithm']}/s={cell['s']}"
            result_sets.append(ResultSet(
                label=label,
                values=tuple(float(v) for v in group["best_fitness"]),
                direction=direction_of(cell["function"]),
            ))
    if len(objectives) > 1:
        raise ParameterError(f"结果文件的目标函数不一致: {sorted(objectives)}")
    if len(result_sets) < 2:
        raise ParameterError("至少需要两组结果才能比较")
    return result_sets


def compare_files(paths: Sequence[str], alpha: float) -> pd.DataFrame:
    return comparison_frame(pairwise(load_result_sets(paths), alpha))
