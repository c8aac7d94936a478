"""Command-line entry point: ``ldp-entropy <task> [flags]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .experiments import (
    ConfigError,
    ExperimentConfig,
    emit_plot_data,
    rows_to_csv,
    run_experiment,
    run_verify,
)

EXPERIMENT_TASKS = ("shannon-tree", "shannon-chain", "shannon-star", "gini", "collision", "fig1a", "fig1b", "chow-liu")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _alpha(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldp-entropy", description="Locally private entropy estimation experiments")
    sub = parser.add_subparsers(dest="task", required=True)

    for task in EXPERIMENT_TASKS:
        p = sub.add_parser(task)
        p.add_argument("--config", type=Path, help="JSON config; flags override its keys")
        p.add_argument("--seed", type=_u64)
        p.add_argument("--out", help="CSV output path (stdout when omitted)")
        p.add_argument("--trials", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--audit", help="write one JSON audit record per trial to this path")
        p.add_argument("--plot", help="write aggregated plot data to this path")
        p.add_argument("--epsilon", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--alpha", type=_alpha)
        if task in ("shannon-tree", "shannon-chain", "shannon-star", "chow-liu"):
            p.add_argument("--d", type=int)
        if task == "shannon-chain":
            p.add_argument("--flip", type=float)
        if task in ("gini", "collision", "fig1b"):
            p.add_argument("--k", type=int)
        if task in ("gini", "collision"):
            p.add_argument("--n", type=int)
            p.add_argument("--b", type=int)
            p.add_argument("--hash-seed", dest="hash_seed", type=_u64)
            p.add_argument("--distribution", choices=("exponential", "uniform"))
        if task == "fig1a":
            p.add_argument("--d-grid", dest="d_grid", type=_int_list)
        if task == "fig1b":
            p.add_argument("--bit-grid", dest="bit_grid", type=_int_list)

    v = sub.add_parser("verify", help="run the exact identity and privacy checks")
    v.add_argument("--seed", type=_u64, default=0)
    v.add_argument("--out")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    overrides = {k: v for k, v in vars(args).items() if k not in ("task", "config")}
    if args.config is not None:
        return ExperimentConfig.from_json(args.config.read_text(), task=args.task, overrides=overrides)
    return ExperimentConfig.build(args.task, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.task == "verify":
        results = run_verify(args.seed)
        lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        sys.stdout.write(text)
        return 0 if all(ok for _, ok, _ in results) else 1

    try:
        cfg = _config_from_args(args)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    rows, audits = run_experiment(cfg)
    text = rows_to_csv(rows)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if cfg.audit:
        with open(cfg.audit, "w", encoding="utf-8") as fh:
            for rec in audits:
                fh.write(json.dumps(rec, sort_keys=True, default=str) + "\n")
    if cfg.plot:
        emit_plot_data(rows, cfg.plot)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
