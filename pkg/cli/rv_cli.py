#!/usr/bin/env python3
"""
rv - Relaxed-Voronoi terminal clustering experiments.

Every run prints a JSON report (config, deterministic payload, timings) to
stdout or to --json; summaries go to stderr.

Usage:
    rv spr-tree --gen btree:6 --terminals leaves
    rv m0e --gen grid:32 --terminals random:16 --ddim 2 --trials 200
    rv connected-m0e --input graph.txt --trials 100
    rv gen --family tree:200 --terminals random:20 --output tree.txt
    rv bench --family tree --sizes 250000,500000,1000000
    rv ddim --gen grid:16 --terminals random:4
    rv rerun report.json

Exit codes: 0 success, 2 input error, 3 invariant or distortion bound violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import Callable, Optional, Sequence

from pydantic import ValidationError

from cli.config import (
    BENCH_BTREE_HEIGHTS,
    BENCH_REPEATS,
    BENCH_TREE_SIZES,
    CONNECTED_M0E_ORDERING,
    JSON_INDENT,
    M0E_ORDERING,
    TOP_PAIRS_SHOWN,
)
from cli.ui import (
    StatusDisplay,
    print_bench,
    print_ddim,
    print_error,
    print_header,
    print_spr,
    print_stretch,
    print_success,
)
from relaxed_voronoi.clustering import graphic_relaxed_voronoi, metric_relaxed_voronoi, partition_payload
from relaxed_voronoi.config import (
    DEFAULT_C,
    DEFAULT_PAIR_SAMPLE,
    DEFAULT_PAIR_SEED,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    DISTANCE_TOLERANCE,
    TREE_SPR_MAGNITUDE,
    VALIDATION_LEVEL,
)
from relaxed_voronoi.errors import InputError, InvariantViolation, RelaxedVoronoiError
from relaxed_voronoi.evaluation import EngineConfig, expected_stretch, minor_distortion
from relaxed_voronoi.formats import format_instance, read_instance, write_instance
from relaxed_voronoi.generators import (
    GeneratorSpec,
    complete_binary_tree,
    estimate_ddim,
    generate,
    generate_family,
    random_tree,
)
from relaxed_voronoi.graph import MetricSpace, TerminalInstance, TerminalSet, WeightedGraph, metric_from_graph
from relaxed_voronoi.logger import get_logger
from relaxed_voronoi.magnitudes import MagnitudePolicy, derive_seed, make_magnitudes
from relaxed_voronoi.orderings import OrderingPolicy, order_terminals
from relaxed_voronoi.schemas import (
    BenchRow,
    DdimPayload,
    DistortionPayload,
    PartitionPayload,
    Report,
    RunConfig,
    SprPayload,
    StretchPayload,
)
from relaxed_voronoi.tree_fast import RootedTree, TouchCounter, spr_tree

logger = get_logger(__name__)


# =============================================================================
# INPUT
# =============================================================================

def load_instance(config: RunConfig) -> TerminalInstance:
    """Read ``config.input`` or build ``config.gen``."""
    if config.input is not None:
        graph, terminals = read_instance(config.input)
        return TerminalInstance(terminals, graph=graph)
    assert config.gen is not None
    return generate(GeneratorSpec.parse(config.gen, config.terminals, config.seed))


def _require_graph(instance: TerminalInstance, command: str) -> WeightedGraph:
    if instance.graph is None:
        raise InputError(f"{command} needs a graph input, got a metric")
    return instance.graph


def _metric_of(instance: TerminalInstance) -> MetricSpace:
    if instance.metric is not None:
        return instance.metric
    assert instance.graph is not None
    return metric_from_graph(instance.graph)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_spr_tree(config: RunConfig) -> Report:
    """Tree Steiner point removal plus its exact distortion."""
    instance = load_instance(config)
    graph = _require_graph(instance, "spr-tree")
    policy = MagnitudePolicy.parse(config.magnitude or f"const:{TREE_SPR_MAGNITUDE:g}", config.seed)
    if not policy.is_deterministic:
        raise InputError("spr-tree takes a constant magnitude, const:<R>")

    started = time.perf_counter()
    tree = RootedTree.from_graph(graph, config.root)
    result = spr_tree(tree, instance.terminals, policy.R)
    elapsed = time.perf_counter() - started

    distortion = minor_distortion(graph, result.order, result.minor)
    R = policy.R
    payload = SprPayload(
        order=list(result.order),
        magnitude=R,
        partition=PartitionPayload.model_validate(partition_payload(result.partition, result.minor)),
        distortion=DistortionPayload.from_report(distortion),
        bound=(R + 1) ** 2 / (R - 1) if R > 1 else None,
        edge_touches=result.edge_touches,
        root_in_first_cluster=result.root_in_first_cluster,
    )
    return Report(config=config, payload=payload, timings={"spr_tree": elapsed})


def _doubling_policy(config: RunConfig, metric: MetricSpace) -> MagnitudePolicy:
    if config.magnitude:
        return MagnitudePolicy.parse(config.magnitude, config.seed)
    ddim = config.ddim
    if ddim is None:
        if not config.estimate_ddim:
            raise InputError("m0e needs --ddim, --estimate-ddim or an explicit --magnitude")
        ddim = estimate_ddim(metric)
        logger.info(f"estimated ddim {ddim:.3f}")
    return MagnitudePolicy.doubling_exp(config.c or DEFAULT_C, ddim, config.seed)


def cmd_m0e(config: RunConfig) -> Report:
    """Metric 0-extension: Gonzalez order with 2e^Z magnitudes by default."""
    instance = load_instance(config)
    metric = _metric_of(instance)
    ordering = OrderingPolicy.parse(config.ordering)
    order = order_terminals(ordering, instance.terminals, graph=instance.graph, metric=metric)
    policy = _doubling_policy(config, metric)

    started = time.perf_counter()
    with StatusDisplay(f"m0e: {config.trials} trials"):
        report = expected_stretch(
            TerminalInstance(order, metric=metric),
            EngineConfig("metric", OrderingPolicy.given(), policy),
            pair_sample=config.pair_sample,
            trials=config.trials,
            seed=config.seed,
            workers=config.workers,
            pair_seed=config.pair_seed,
        )
    elapsed = time.perf_counter() - started

    retraction = None
    if policy.is_deterministic:
        f = metric_relaxed_voronoi(metric, order, make_magnitudes(policy, order.k))
        retraction = f.assignment.tolist()
    payload = StretchPayload.from_report("metric", list(order), report, retraction)
    return Report(config=config, payload=payload, timings={"expected_stretch": elapsed})


def cmd_connected_m0e(config: RunConfig) -> Report:
    """Connected 0-extension: e^Z magnitudes, every trial's partition validated."""
    instance = load_instance(config)
    graph = _require_graph(instance, "connected-m0e")
    ordering = OrderingPolicy.parse(config.ordering)
    order = order_terminals(ordering, instance.terminals, graph=graph)
    if config.magnitude:
        policy = MagnitudePolicy.parse(config.magnitude, config.seed)
    else:
        policy = MagnitudePolicy.log_k_exp(config.c or DEFAULT_C, config.seed)

    started = time.perf_counter()
    with StatusDisplay(f"connected-m0e: {config.trials} trials"):
        report = expected_stretch(
            TerminalInstance(order, graph=graph),
            EngineConfig("graphic", OrderingPolicy.given(), policy),
            pair_sample=config.pair_sample,
            trials=config.trials,
            seed=config.seed,
            workers=config.workers,
            pair_seed=config.pair_seed,
        )
    elapsed = time.perf_counter() - started

    retraction = None
    if policy.is_deterministic:
        partition = graphic_relaxed_voronoi(graph, order, make_magnitudes(policy, order.k), validate=True)
        retraction = partition.to_retraction().assignment.tolist()
    payload = StretchPayload.from_report("graphic", list(order), report, retraction)
    return Report(config=config, payload=payload, timings={"expected_stretch": elapsed})


def cmd_bench(config: RunConfig) -> Report:
    """Time spr-tree over a size sweep, with leaves as terminals."""
    family = config.gen or "tree"
    if family not in ("tree", "btree"):
        raise InputError(f"bench family must be tree or btree, got {family!r}")
    sizes = config.sizes or (BENCH_TREE_SIZES if family == "tree" else BENCH_BTREE_HEIGHTS)

    rows: list[BenchRow] = []
    timings: dict[str, float] = {}
    previous: Optional[float] = None
    for size in sizes:
        if family == "btree":
            tree = complete_binary_tree(size)
        else:
            tree = RootedTree.from_graph(random_tree(size, seed=derive_seed(config.seed, "bench", size)), 0)
        terminals = TerminalSet(tree.leaves())

        seconds = []
        touches = 0
        for _ in range(config.repeats):
            counter = TouchCounter()
            started = time.perf_counter()
            spr_tree(tree, terminals, counter=counter, validate=False)
            seconds.append(time.perf_counter() - started)
            touches = counter.count

        n = tree.n
        if touches > 4 * n:
            raise InvariantViolation("linear-work", f"{touches} edge touches for n={n} (limit {4 * n})")
        rows.append(BenchRow(family=family, n=n, k=terminals.k, edge_touches=touches, touch_ratio=touches / n))
        mean = sum(seconds) / len(seconds)
        timings[f"n={n}"] = mean
        if previous:
            timings[f"ratio:n={n}"] = mean / previous
        previous = mean
        logger.info(f"bench {family} n={n}: {mean:.3f}s, {touches} touches")

    return Report(config=config, payload=rows, timings=timings)


def cmd_ddim(config: RunConfig) -> Report:
    """Suggest a --ddim value for an instance."""
    if config.gen is not None:
        family = generate_family(GeneratorSpec.parse(config.gen, config.terminals, config.seed))
        if family.graph is not None:
            metric = metric_from_graph(family.graph)
        else:
            assert family.metric is not None
            metric = family.metric
    else:
        metric = _metric_of(load_instance(config))
    started = time.perf_counter()
    payload = DdimPayload(n=metric.n, estimate=estimate_ddim(metric))
    return Report(config=config, payload=payload, timings={"estimate_ddim": time.perf_counter() - started})


COMMANDS: dict[str, Callable[[RunConfig], Report]] = {
    "spr-tree": cmd_spr_tree,
    "m0e": cmd_m0e,
    "connected-m0e": cmd_connected_m0e,
    "bench": cmd_bench,
    "ddim": cmd_ddim,
}


def run_config(config: RunConfig) -> Report:
    """Dispatch a config to its command."""
    return COMMANDS[config.subcommand](config)


def check_report(report: Report) -> None:
    """
    Raise if a report breaks a guaranteed bound.

    Raises:
        InvariantViolation: If tree distortion exceeds (R+1)^2/(R-1).
    """
    payload = report.payload
    if isinstance(payload, SprPayload) and payload.bound is not None:
        worst = payload.distortion.max_distortion
        if worst > payload.bound + DISTANCE_TOLERANCE:
            raise InvariantViolation(
                "distortion-bound",
                f"max distortion {worst} exceeds {payload.bound:g} on pair {payload.distortion.argmax_pair}",
            )


# =============================================================================
# OUTPUT
# =============================================================================

def write_stretch_csv(path: str | Path, payload: StretchPayload) -> None:
    """Per-pair stretch table as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["x", "y", "distance", "mean", "variance"])
        writer.writeheader()
        for pair in payload.pairs:
            writer.writerow(pair.model_dump())


def emit(report: Report, args: argparse.Namespace) -> None:
    """Write the JSON report and optional CSV, then summarize on stderr."""
    text = report.model_dump_json(indent=JSON_INDENT)
    if args.json:
        Path(args.json).parent.mkdir(parents=True, exist_ok=True)
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")

    payload = report.payload
    csv_path = getattr(args, "csv", None)
    if csv_path and isinstance(payload, StretchPayload):
        write_stretch_csv(csv_path, payload)

    if args.quiet:
        return
    print_header(report.config.subcommand, report.config.input or report.config.gen or "")
    if isinstance(payload, SprPayload):
        print_spr(payload, report.timings.get("spr_tree", 0.0))
    elif isinstance(payload, StretchPayload):
        print_stretch(payload, TOP_PAIRS_SHOWN)
    elif isinstance(payload, DdimPayload):
        print_ddim(payload)
    else:
        print_bench(payload, report.timings)
    if args.json:
        print_success(f"report written to {args.json}")


# =============================================================================
# MAIN CLI
# =============================================================================

def _input_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    source = parent.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="instance file (n m k / terminals / u v w lines)")
    source.add_argument("--gen", help="generator family: btree:<h>, tree:<n>, graph:<n>,<m>, grid:<side>[,<p>]")
    parent.add_argument(
        "--terminals",
        default="leaves",
        help="terminal rule for --gen: leaves, random:<k>, ids:<a>,<b>,... (default: leaves)",
    )
    return parent


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"base seed (default: {DEFAULT_SEED})")
    parent.add_argument("--json", help="write the report here instead of stdout")
    parent.add_argument("--quiet", action="store_true", help="no summary on stderr")
    return parent


def _trials_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help=f"engine runs (default: {DEFAULT_TRIALS})")
    parent.add_argument(
        "--pairs",
        type=int,
        default=DEFAULT_PAIR_SAMPLE,
        help=f"pair sample size for large n (default: {DEFAULT_PAIR_SAMPLE})",
    )
    parent.add_argument(
        "--pair-seed",
        type=int,
        default=DEFAULT_PAIR_SEED,
        help=f"seed of the pair sample, independent of --seed (default: {DEFAULT_PAIR_SEED})",
    )
    parent.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="threads for trials")
    parent.add_argument("--magnitude", help="const:<R>, dexp:<c>,<ddim>[,rate] or klog:<c>[,rate]")
    parent.add_argument("--c", type=float, help=f"magnitude constant c (default: {DEFAULT_C:g})")
    parent.add_argument("--csv", help="per-pair stretch table")
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    parser = argparse.ArgumentParser(
        prog="rv",
        description="Relaxed-Voronoi terminal clustering: Steiner point removal and 0-extension",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)
    inputs, common, trials = _input_parent(), _common_parent(), _trials_parent()

    spr = commands.add_parser("spr-tree", parents=[inputs, common], help="Steiner point removal on a tree")
    spr.add_argument("--root", type=int, default=0, help="root vertex fixing the ordering (default: 0)")
    spr.add_argument("--magnitude", help=f"const:<R> (default: const:{TREE_SPR_MAGNITUDE:g})")

    m0e = commands.add_parser("m0e", parents=[inputs, common, trials], help="metric 0-extension")
    m0e.add_argument(
        "--order", default=M0E_ORDERING, help=f"given, root:<id>, gonzalez[:<id>] (default: {M0E_ORDERING})"
    )
    m0e.add_argument("--ddim", type=float, help="doubling dimension for dexp magnitudes")
    m0e.add_argument("--estimate-ddim", action="store_true", help="estimate --ddim from the metric when missing")

    connected = commands.add_parser("connected-m0e", parents=[inputs, common, trials], help="connected 0-extension")
    connected.add_argument(
        "--order",
        default=CONNECTED_M0E_ORDERING,
        help=f"given, root:<id>, gonzalez[:<id>] (default: {CONNECTED_M0E_ORDERING})",
    )

    commands.add_parser("ddim", parents=[inputs, common], help="suggest --ddim for an instance")

    bench = commands.add_parser("bench", parents=[common], help="time spr-tree over a size sweep")
    bench.add_argument("--family", choices=["tree", "btree"], default="tree")
    bench.add_argument("--sizes", help="comma-separated n (tree) or heights (btree)")
    bench.add_argument("--repeats", type=int, default=BENCH_REPEATS)

    gen = commands.add_parser("gen", help="write a generated instance")
    gen.add_argument("--family", required=True, help="btree:<h>, tree:<n>, graph:<n>,<m>, grid:<side>")
    gen.add_argument("--terminals", default="leaves", help="leaves, random:<k>, ids:<a>,<b>,...")
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--output", help="file to write (default: stdout)")

    rerun = commands.add_parser("rerun", help="re-run a report's config and compare payloads")
    rerun.add_argument("report", help="JSON report written by an earlier run")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into the RunConfig embedded in the report."""
    fields = {
        "subcommand": args.command,
        "input": getattr(args, "input", None),
        "gen": args.family if args.command == "bench" else getattr(args, "gen", None),
        "terminals": getattr(args, "terminals", "leaves"),
        "ordering": getattr(args, "order", "given"),
        "magnitude": getattr(args, "magnitude", None),
        "root": getattr(args, "root", 0),
        "seed": args.seed,
        "trials": getattr(args, "trials", 1),
        "pair_sample": getattr(args, "pairs", 1),
        "pair_seed": getattr(args, "pair_seed", DEFAULT_PAIR_SEED),
        "ddim": getattr(args, "ddim", None),
        "estimate_ddim": getattr(args, "estimate_ddim", False),
        "c": getattr(args, "c", None),
        "workers": getattr(args, "workers", 1),
        "repeats": getattr(args, "repeats", 1),
        "validation": VALIDATION_LEVEL,
    }
    sizes = getattr(args, "sizes", None)
    try:
        if sizes:
            fields["sizes"] = [int(s) for s in sizes.split(",")]
        return RunConfig(**fields)
    except (ValueError, ValidationError) as e:
        raise InputError(f"invalid arguments: {e}") from e


def run_gen(args: argparse.Namespace) -> int:
    instance = generate(GeneratorSpec.parse(args.family, args.terminals, args.seed))
    if instance.graph is None:
        raise InputError("only graph families can be written; grid with p != 1 is a metric")
    comment = f"rv gen --family {args.family} --terminals {args.terminals} --seed {args.seed}"
    if args.output:
        write_instance(args.output, instance.graph, instance.terminals, comment)
        print_success(f"wrote n={instance.graph.n}, m={instance.graph.m}, k={instance.terminals.k} to {args.output}")
    else:
        sys.stdout.write(format_instance(instance.graph, instance.terminals, comment))
    return 0


def run_rerun(args: argparse.Namespace) -> int:
    path = Path(args.report)
    if not path.exists():
        raise InputError(f"report not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        config = RunConfig.model_validate(data["config"])
    except (ValueError, KeyError, ValidationError) as e:
        raise InputError(f"not a report file: {path}") from e

    fresh = json.loads(run_config(config).model_dump_json())["payload"]
    if fresh != data.get("payload"):
        print_error("payload differs from the recorded report", str(path))
        return InvariantViolation.exit_code
    print_success(f"payload reproduced from {path}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return run_gen(args)
        if args.command == "rerun":
            return run_rerun(args)

        report = run_config(config_from_args(args))
        emit(report, args)
        check_report(report)
    except RelaxedVoronoiError as e:
        logger.error(f"{args.command} failed: {e}")
        print_error(str(e))
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
