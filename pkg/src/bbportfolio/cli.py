"""Command-line front end: ``run``, ``ert`` and ``ecdf`` subcommands."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .experiment import ExperimentConfig, run_experiment
from .optimizers import REGISTRY
from .portfolio import StrategyConfig
from .records import STANDARD_LADDER, read_records


class CliError(Exception):
    """I/O or data problem; maps to exit status 1."""


def parse_int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError("empty list")
    return sorted(set(out))


def ladder_subset(n: int) -> list[float]:
    """``n`` targets picked evenly from the 50-step standard ladder; ``n = 1`` gives the hardest."""
    if not 1 <= n <= len(STANDARD_LADDER):
        raise ValueError(f"number of targets must be in 1..{len(STANDARD_LADDER)}")
    if n == 1:
        return [STANDARD_LADDER[-1]]
    idx = np.round(np.linspace(0, len(STANDARD_LADDER) - 1, n)).astype(int)
    return [STANDARD_LADDER[i] for i in idx]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbportfolio", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a solver or a portfolio over the benchmark suite")
    run.add_argument("--solver", choices=sorted(REGISTRY))
    run.add_argument("--portfolio", help="comma-separated optimizer names")
    run.add_argument("--strategy", choices=["unif", "eg"])
    run.add_argument("--eps", type=float)
    run.add_argument("--functions", default="1-10")
    run.add_argument("--dims", default="2,3,5,10,20")
    run.add_argument("--instances", type=int, default=5)
    run.add_argument("--maxfev", type=int, default=10000)
    run.add_argument("--maxfev-per-dim", action="store_true",
                     help="treat --maxfev as evaluations per dimension")
    run.add_argument("--final-delta", type=float, default=1e-8)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="results")
    run.add_argument("--shortname", default="")
    run.add_argument("--comments", default="")
    run.add_argument("--jobs", type=int, default=1)

    ert = sub.add_parser("ert", help="expected running time table from a run directory")
    ert.add_argument("--in", dest="inputs", action="append", required=True, metavar="DIR")
    group = ert.add_mutually_exclusive_group(required=True)
    group.add_argument("--delta", type=float, action="append")
    group.add_argument("--ladder", type=int)
    ert.add_argument("--out", help="output directory (default: first --in)")

    ecdf = sub.add_parser("ecdf", help="bootstrapped ECDF tables per function group and dimension")
    ecdf.add_argument("--in", dest="inputs", action="append", required=True, metavar="DIR")
    ecdf.add_argument("--targets", type=int, default=50)
    ecdf.add_argument("--samples", type=int, default=100)
    ecdf.add_argument("--seed", type=int, default=0)
    ecdf.add_argument("--out", help="output directory (default: first --in)")
    return parser


def _config_from_args(args, parser) -> ExperimentConfig:
    if (args.solver is None) == (args.portfolio is None):
        parser.error("give exactly one of --solver or --portfolio")
    strategy = None
    if args.portfolio is not None:
        if args.strategy is None:
            parser.error("--portfolio needs --strategy")
        if args.strategy == "unif":
            if args.eps is not None:
                parser.error("--eps only applies to --strategy eg")
            strategy = StrategyConfig("UNIF")
        else:
            eps = 0.5 if args.eps is None else args.eps
            if not 0.0 <= eps <= 1.0:
                parser.error(f"--eps must be in [0, 1], got {eps}")
            strategy = StrategyConfig("EpsilonGreedy", eps)
    elif args.strategy is not None or args.eps is not None:
        parser.error("--strategy/--eps need --portfolio")
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return ExperimentConfig(
            functions=parse_int_list(args.functions),
            dims=parse_int_list(args.dims),
            instances=args.instances,
            maxfev=args.maxfev,
            maxfev_per_dim=args.maxfev_per_dim,
            solver=args.solver,
            portfolio=[p.strip() for p in args.portfolio.split(",")] if args.portfolio else None,
            strategy=strategy,
            final_delta=args.final_delta,
            master_seed=args.seed,
            output_dir=args.out,
            shortname=args.shortname,
            comments=args.comments,
            jobs=args.jobs,
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_run(args, parser) -> int:
    config = _config_from_args(args, parser)
    try:
        summary = run_experiment(config)
    except OSError as exc:
        raise CliError(f"cannot write results: {exc}") from exc
    print(f"{summary['trials']} trials, {summary['successes']} reached delta <= {config.final_delta:g}")
    return 0


def _load(inputs) -> list:
    records = []
    for d in inputs:
        path = Path(d) / "records.csv"
        try:
            records.extend(read_records(path))
        except (OSError, ValueError, KeyError) as exc:
            raise CliError(f"cannot read {path}: {exc}") from exc
    if not records:
        raise CliError("no trial records found")
    return records


def _out_dir(args) -> Path:
    out = Path(args.out or args.inputs[0])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ert(args, parser) -> int:
    records = _load(args.inputs)
    try:
        deltas = args.delta if args.delta else ladder_subset(args.ladder)
        rows = metrics.ert_table(records, deltas)
    except (KeyError, ValueError) as exc:
        parser.error(str(exc).strip("'\""))
    try:
        metrics.write_ert_csv(_out_dir(args) / "ert.csv", rows)
    except OSError as exc:
        raise CliError(f"cannot write ert.csv: {exc}") from exc
    for r in rows:
        print(f"function={r['function']},dim={r['dim']},solver={r['solver']},delta_f={r['delta_f']:.3e},"
              f"ert={r['ert']:g},n_success={r['n_success']},n_trials={r['n_trials']}")
    return 0


def cmd_ecdf(args, parser) -> int:
    if args.samples < 1:
        parser.error("--samples must be at least 1")
    try:
        targets = ladder_subset(args.targets)
    except ValueError as exc:
        parser.error(str(exc))
    records = _load(args.inputs)
    tables = metrics.ecdf_tables(records, targets, samples_per_pair=args.samples, seed=args.seed)
    out = _out_dir(args)
    try:
        for (group, dim), curves in tables.items():
            path = out / metrics.ecdf_filename(group, dim)
            metrics.write_ecdf_csv(path, curves)
            final = ", ".join(f"{s}={c.proportion[-1]:.3f}" for s, c in sorted(curves.items()))
            print(f"{path.name}: {final}")
    except OSError as exc:
        raise CliError(f"cannot write ECDF tables: {exc}") from exc
    return 0


COMMANDS = {"run": cmd_run, "ert": cmd_ert, "ecdf": cmd_ecdf}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        return COMMANDS[args.command](args, sub)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
