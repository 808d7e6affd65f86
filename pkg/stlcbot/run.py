"""
Command line driver.
"""

import argparse
import logging
import os

from stlcbot import logger
from stlcbot.base.errors import STLcBOTError
from stlcbot.bench.figures import emit_trajectory_svg, plot_metrics
from stlcbot.bench.harness import ARMS, ENVS, BenchConfig, run_arm, run_matrix
from stlcbot.bench.report import emit_summary, format_summary, load_records, write_summary
from stlcbot.model.environments import make_scenario
from stlcbot.parser.scenario import load_scenario, save_scenario


def process_args(argv=None):
    """
    Parse command-line arguments.
    """

    parser = argparse.ArgumentParser(prog="pystlcbot")
    parser.add_argument("-v", action="store_true", help="Log planner detail")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    bench = commands.add_parser("bench", help="Benchmark matrix, plots and scenarios")
    bench_commands = bench.add_subparsers(dest="bench_command")
    bench_commands.required = True

    run = bench_commands.add_parser("run", help="Run a benchmark matrix")
    run.add_argument("--config", required=True, metavar="<config file>")
    run.add_argument("--out", required=True, metavar="<directory>")
    run.add_argument("--workers", type=int, default=1, metavar="<n>")

    plot = bench_commands.add_parser("plot", help="Plot recorded trials")
    plot.add_argument("--records", required=True, metavar="<records.csv>")
    plot.add_argument("--out", required=True, metavar="<directory>")

    scenario = bench_commands.add_parser("scenario", help="Write a default scenario")
    scenario.add_argument("--env", required=True, choices=ENVS)
    scenario.add_argument("--robots", required=True, type=int, metavar="N")
    scenario.add_argument("--seed", type=int, default=0, metavar="S")
    scenario.add_argument("--out", required=True, metavar="<scenario file>")

    plan = commands.add_parser("plan", help="Plan one scenario")
    plan.add_argument("--scenario", required=True, metavar="<scenario file>")
    plan.add_argument("--arm", default="STLcBOT", choices=sorted(ARMS))
    plan.add_argument("--seed", type=int, default=0, metavar="S")
    plan.add_argument("--svg", metavar="<svg file>", help="Write the trajectories as SVG")
    plan.add_argument("--time-budget", type=float, default=60.0, metavar="<seconds>")

    return parser.parse_args(argv)


def bench_run(args):
    config = BenchConfig.load(args.config)
    records = run_matrix(config, args.out, args.workers)
    rows = emit_summary(records)
    write_summary(rows, os.path.join(args.out, "summary.csv"))
    logger.info("\n" + format_summary(rows))


def bench_plot(args):
    rows = emit_summary(load_records(args.records))
    for path in plot_metrics(rows, args.out):
        logger.info("Wrote {0}".format(path))


def bench_scenario(args):
    save_scenario(make_scenario(args.env, args.robots, args.seed), args.out)
    logger.info("Wrote {0}".format(args.out))


def plan(args):
    scenario = load_scenario(args.scenario)
    result = run_arm(scenario, args.arm, args.seed, time_budget=args.time_budget)
    logger.info(str(result))
    for p in result.plans:
        if p is not None:
            logger.info("  " + str(p))
    if args.svg:
        emit_trajectory_svg(result, scenario.environment, args.svg, scenario.robots)
        logger.info("Wrote {0}".format(args.svg))
    return result


def main(args=None):
    """
    Program entry point.

    :return: Exit status: 0 on completion, 1 on configuration or I/O errors.
    """

    if args is None or isinstance(args, list):
        args = process_args(args)

    logging.basicConfig(
        level=logging.DEBUG if args.v else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )

    try:
        if args.command == "plan":
            plan(args)
        elif args.bench_command == "run":
            bench_run(args)
        elif args.bench_command == "plot":
            bench_plot(args)
        else:
            bench_scenario(args)
    except STLcBOTError as e:
        logger.error(str(e))
        return 1
    return 0
