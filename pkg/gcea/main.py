import argparse
import logging
import os
import sys
from pathlib import Path

# 添加项目根目录到 Python 路径
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from gcea import experiment, nk_landscape
from gcea.benchmarks import FUNCTIONS
from gcea.config import ConfigManager
from gcea.engine import ALGORITHMS, NK_FUNCTION, RunConfig
from gcea.errors import GceaError, ParameterError
from gcea.stats import summarize

# 退出码：有运行失败（run 的任一次运行或 sweep 的任一实验格）
PARTIAL_FAILURE_EXIT = 4


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="gcea",
        description="全局交叉 EA 与合作协同进化 EA 的实验工具",
    )
    parser.add_argument("--config", default="config.json", help="配置文件路径")
    parser.add_argument("--log-level", default=None, help="日志级别，覆盖配置文件")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-landscape", help="生成 NK 景观文件")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=cmd_gen_landscape)

    run = sub.add_parser("run", help="同一组参数运行多次")
    run.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    target = run.add_mutually_exclusive_group(required=True)
    target.add_argument("--function", choices=(NK_FUNCTION,) + tuple(sorted(FUNCTIONS)))
    target.add_argument("--landscape", help="NK 景观文件，所有运行共用")
    run.add_argument("--n", type=int)
    run.add_argument("--k", type=int, default=0)
    run.add_argument("--s", type=int, default=2)
    run.add_argument("--pop-size", type=int)
    run.add_argument("--evals", type=int)
    run.add_argument("--runs", type=int)
    run.add_argument("--run-index", type=int, default=0, help="第一次运行的序号")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--jobs", type=int)
    run.add_argument("--out", default="results.csv")
    run.set_defaults(handler=cmd_run)

    sweep = sub.add_parser("sweep", help="按规格文件运行整个实验网格")
    sweep.add_argument("spec")
    sweep.add_argument("--jobs", type=int)
    sweep.add_argument("--out", help="输出目录，覆盖规格文件中的 output_dir")
    sweep.set_defaults(handler=cmd_sweep)

    compare = sub.add_parser("compare", help="对结果文件做两两 Welch t 检验")
    compare.add_argument("files", nargs="+")
    compare.add_argument("--alpha", type=float)
    compare.add_argument("--out", help="同时把比较表写成 CSV")
    compare.set_defaults(handler=cmd_compare)
    return parser


def cmd_gen_landscape(args, config: dict) -> int:
    landscape = nk_landscape.generate(args.n, args.k, args.seed, config["max_table_bytes"])
    nk_landscape.save(landscape, args.out)
    print(f"已写入景观 {args.out} (n={landscape.n}, k={landscape.k})")
    return 0


def cmd_run(args, config: dict) -> int:
    landscape_path = None
    if args.landscape:
        landscape = nk_landscape.load(args.landscape)
        if args.n is not None and args.n != landscape.n:
            raise ParameterError(f"--n {args.n} 与景观文件中的 n={landscape.n} 不一致")
        function, n, k = NK_FUNCTION, landscape.n, landscape.k
        landscape_path = args.landscape
    else:
        if args.n is None:
            raise ParameterError("使用 --function 时必须给出 --n")
        function, n = args.function, args.n
        k = args.k if function == NK_FUNCTION else 0

    runs = args.runs if args.runs is not None else config["runs"]
    if runs < 1:
        raise ParameterError(f"--runs 必须 >= 1，当前为 {runs}")
    template = RunConfig(
        algorithm=args.algorithm,
        function=function,
        n=n,
        k=k,
        s=args.s,
        pop_size=args.pop_size if args.pop_size is not None else config["pop_size"],
        eval_budget=args.evals if args.evals is not None else config["eval_budget"],
        seed=args.seed,
        trace_interval=config["trace_interval"],
        landscape_path=landscape_path,
        max_table_bytes=config["max_table_bytes"],
    )
    jobs = args.jobs if args.jobs is not None else config["jobs"]
    outcome = experiment.run_batch(template, runs, args.out, jobs=jobs, first_run=args.run_index)
    if outcome.failed:
        print(f"运行失败: {outcome.error}", file=sys.stderr)
        return PARTIAL_FAILURE_EXIT
    summary = summarize([r.best_fitness for r in outcome.results])
    print(f"{args.algorithm}: {summary.count} 次运行，均值 {summary.mean!r}，标准差 {summary.std!r} -> {args.out}")
    return 0


def cmd_sweep(args, config: dict) -> int:
    spec = experiment.load_spec(args.spec, config, args.out)
    jobs = args.jobs if args.jobs is not None else config["jobs"]
    report = experiment.run_sweep(spec, jobs)
    print(f"汇总已写入 {report.summary_path}")
    if report.failed_cells:
        print(f"失败的实验格: {report.failed_cells}", file=sys.stderr)
        return PARTIAL_FAILURE_EXIT
    return 0


def cmd_compare(args, config: dict) -> int:
    alpha = args.alpha if args.alpha is not None else config["alpha"]
    frame = experiment.compare_files(args.files, alpha)
    print(frame.to_string(index=False))
    if args.out:
        experiment.write_frame(frame, Path(args.out))
    return 0


def main(argv=None) -> int:
    """程序入口"""
    args = build_parser().parse_args(argv)
    config = ConfigManager(args.config).load_config()
    level = (args.log_level or config["log_level"]).upper()
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args, config)
    except GceaError as e:
        print(f"错误: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
