"""Command-line entry point.

Subcommands: train, eval, bench, overhead, inspect-net.  Exit codes:
0 success, 2 config/usage error, 3 numerical failure, 4 storage error.
Completed run directories are immutable; each contains exactly manifest.json,
curve.csv and policy.ckpt.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench, envs, ppo
from .checkpoint import load_checkpoint, save_checkpoint
from .defaults import (
    DEFAULT_BUDGET,
    DEFAULT_INTUITION_COEF,
    DEFAULT_NET,
    EVAL_EPISODES,
    shipped_net_path,
)
from .errors import ConfigError, ShireError, StorageError
from .intuition import infer_action_posterior, intuitive_action, load_net, marginal
from .reports import write_curve_csv, write_manifest, write_summary_csv

RUN_FILES = ("manifest.json", "curve.csv", "policy.ckpt")


def resolve_net_path(name_or_path: str | None, env_name: str | None = None) -> Path:
    """Resolve --net: an existing path wins; otherwise search the directories
    in SHIRE_NET_PATH, then the shipped configs.  Without --net, the
    environment's default shipped net is used."""
    if name_or_path is None:
        if env_name is None:
            raise ConfigError("--net is required here")
        name_or_path = DEFAULT_NET[env_name]
    p = Path(name_or_path)
    if p.is_file():
        return p
    stem = name_or_path if name_or_path.endswith(".net") else name_or_path + ".net"
    for d in os.environ.get("SHIRE_NET_PATH", "").split(os.pathsep):
        if d and (Path(d) / stem).is_file():
            return Path(d) / stem
    shipped = shipped_net_path(stem.removesuffix(".net"))
    if shipped.is_file():
        return Path(str(shipped))
    raise ConfigError(f"cannot find intuition net '{name_or_path}'")


def _make_run_dir(out_root: str, env_name: str, seed: int, label: str = "") -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    tag = f"-{label}" if label else ""
    run_dir = Path(out_root) / f"{env_name}{tag}-{stamp}-seed{seed}"
    if run_dir.exists():
        raise StorageError(f"run directory {run_dir} already exists; runs are immutable")
    run_dir.mkdir(parents=True)
    return run_dir


def _write_run(run_dir: Path, params, report) -> None:
    write_manifest(report, run_dir / "manifest.json")
    write_curve_csv(report.curve, run_dir / "curve.csv")
    save_checkpoint(params, run_dir / "policy.ckpt")


def _build_config(args, env_name: str) -> ppo.PPOConfig:
    cfg = ppo.PPOConfig(seed=args.seed)
    cfg = replace(
        cfg,
        intuition_enabled=bool(getattr(args, "shire", False)),
        intuition_coef=(
            args.intuition_coef if args.intuition_coef is not None
            else DEFAULT_INTUITION_COEF[env_name]
        ),
        target_mode=args.target_mode,
    )
    return cfg


def cmd_train(args) -> int:
    env_name = args.env
    envs.get_spec(env_name)  # validates the name
    config = _build_config(args, env_name)
    net = None
    if args.shire:
        net = load_net(resolve_net_path(args.net, env_name))
    total_steps = args.steps if args.steps is not None else DEFAULT_BUDGET[env_name]
    criterion = bench.solve_criterion_for(env_name)
    threshold = criterion.threshold if not args.no_solve_stop else None

    params, report = ppo.train(
        env_name, config, total_steps, net=net,
        solve_threshold=threshold, eval_episodes=args.eval_episodes,
    )
    run_dir = _make_run_dir(args.out, env_name, args.seed,
                            label="shire" if args.shire else "base")
    _write_run(run_dir, params, report)
    if report.solved:
        print(f"solved at {report.steps_to_solve} steps "
              f"({report.wall_clock_seconds / 60.0:.2f} min)")
    else:
        print(f"not solved within {report.total_steps} steps")
    if report.final_eval_mean is not None:
        print(f"final eval: {report.final_eval_mean:.2f} +- {report.final_eval_std:.2f}")
    print(f"run directory: {run_dir}")
    return 0


def cmd_eval(args) -> int:
    params = load_checkpoint(args.checkpoint)
    spec = envs.get_spec(args.env)
    if params.obs_dim != spec.obs_dim or params.n_actions != spec.n_actions:
        raise ConfigError(
            f"checkpoint dims ({params.obs_dim} obs, {params.n_actions} actions) do not "
            f"match '{args.env}' ({spec.obs_dim} obs, {spec.n_actions} actions)"
        )
    mean, std = bench.evaluate(params, args.env, args.episodes, args.seed)
    print(f"{mean:.3f} +- {std:.3f} over {args.episodes} episodes")
    return 0


def cmd_bench(args) -> int:
    env_name = args.env
    envs.get_spec(env_name)
    seeds = [int(s) for s in args.seeds.split(",") if s]
    if not seeds:
        raise ConfigError("--seeds must list at least one integer")
    config = _build_config(args, env_name)
    net = load_net(resolve_net_path(args.net, env_name))
    total_steps = args.steps if args.steps is not None else DEFAULT_BUDGET[env_name]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    comparisons, aggregate = bench.compare(
        env_name, net, config, seeds, total_steps, args.eval_episodes
    )
    write_summary_csv(comparisons, out / "summary.csv")
    (out / "comparisons.json").write_text(json.dumps(
        {"aggregate": aggregate, "per_seed": [c.to_dict() for c in comparisons]},
        indent=2) + "\n")
    for c in comparisons:
        base = c.baseline.steps_to_solve if c.baseline.solved else "unsolved"
        sh = c.shire.steps_to_solve if c.shire.solved else "unsolved"
        gain = f"{c.sample_gain_pct:.2f}%" if c.sample_gain_pct is not None else (c.flag or "n/a")
        print(f"seed {c.seed}: baseline {base}, shire {sh}, gain {gain}")
    med = aggregate["median_sample_gain_pct"]
    print(f"median sample-efficiency gain: "
          f"{med:.2f}%" if med is not None else "median sample-efficiency gain: n/a")
    print(f"reports written to {out}")
    return 0


def cmd_overhead(args) -> int:
    net = load_net(resolve_net_path(args.net, args.env))
    us = bench.measure_overhead(args.env, net, n_samples=args.samples)
    print(f"{net.name} ({net.size} nodes): {us:.2f} us/sample over {args.samples} samples")
    return 0


def cmd_inspect_net(args) -> int:
    net = load_net(resolve_net_path(args.net))
    print(f"net {net.name!r} for environment {net.env_name!r} ({net.size} nodes)")
    for name, node in net.nodes.items():
        role = "action" if node.is_action else "parent"
        parents = f" <- {', '.join(node.parents)}" if node.parents else ""
        print(f"  {role} node {name}: states [{', '.join(node.states)}]{parents}")
    for name in net.action_nodes:
        node = net.nodes[name]
        print(f"  cpt {name}:")
        sizes = [net.nodes[p].states for p in node.parents]
        import itertools
        for row, combo in enumerate(itertools.product(*sizes)):
            cond = ", ".join(f"{p}={s}" for p, s in zip(node.parents, combo))
            probs = ", ".join(f"{v:g}" for v in net.cpts[name][row])
            print(f"    {cond} -> [{probs}]")
    if args.given:
        assignment = {}
        for part in args.given.split(","):
            if "=" not in part:
                raise ConfigError(f"--given entries must be node=state, got {part!r}")
            k, v = part.split("=", 1)
            assignment[k.strip()] = v.strip()
        posterior = infer_action_posterior(net, assignment)
        print(f"posterior given {assignment}:")
        for idx, p in enumerate(posterior):
            labels = net.config_labels(idx)
            cfg = ", ".join(f"{k}={v}" for k, v in labels.items())
            print(f"  ({cfg}): {p:.6g}")
        action = intuitive_action(net, posterior, mode="map")
        print(f"map action: {net.env_action_names[action]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shire",
        description="PPO training with optional intuition-net hinge loss, "
                    "plus evaluation and benchmarking tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_train_flags(p):
        p.add_argument("--env", required=True, choices=sorted(envs.ENVS),
                       help="environment name")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--steps", type=int, default=None,
                       help="total interaction budget (default: per-env)")
        p.add_argument("--net", default=None,
                       help="intuition net file or shipped-net name")
        p.add_argument("--intuition-coef", type=float, default=None,
                       help="intuition loss scaling (default: per-env)")
        p.add_argument("--target-mode", choices=("map", "sample"), default="map")
        p.add_argument("--eval-episodes", type=int, default=EVAL_EPISODES)

    p = sub.add_parser("train", help="train one policy and write a run directory")
    add_common_train_flags(p)
    p.add_argument("--shire", action="store_true", help="enable the intuition loss")
    p.add_argument("--out", default="runs", help="parent directory for the run")
    p.add_argument("--no-solve-stop", action="store_true",
                   help="run the full budget even after solving")
    p.add_argument("--resume", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint with greedy actions")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--env", required=True, choices=sorted(envs.ENVS))
    p.add_argument("--episodes", type=int, default=EVAL_EPISODES)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("bench", help="matched-seed baseline-vs-SHIRE comparison")
    add_common_train_flags(p)
    p.add_argument("--seeds", required=True, help="comma-separated seed list")
    p.add_argument("--out", default="bench-out")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("overhead", help="time the intuition pipeline per sample")
    p.add_argument("--env", required=True, choices=sorted(envs.ENVS))
    p.add_argument("--net", default=None)
    p.add_argument("--samples", type=int, default=20_000)
    p.set_defaults(fn=cmd_overhead)

    p = sub.add_parser("inspect-net", help="print a parsed net, its CPTs, and posteriors")
    p.add_argument("--net", required=True)
    p.add_argument("--given", default=None,
                   help="parent assignment, e.g. accel=positive,tilt=q2")
    p.set_defaults(fn=cmd_inspect_net)
    return parser


def run_command(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "resume", False):
        raise ConfigError("completed runs are immutable; --resume is not supported")
    return args.fn(args)


def main(argv=None) -> int:
    try:
        return run_command(sys.argv[1:] if argv is None else argv)
    except ShireError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
