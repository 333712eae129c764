"""Solve detection, matched-seed baseline-vs-SHIRE comparisons, and
intuition-pipeline overhead measurement."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from . import envs, ppo
from .defaults import DEFAULT_BUDGET, EVAL_EPISODES, PREFERRED_BBR_THRESHOLD
from .errors import ConfigError, UsageError
from .intuition import compute_targets, get_encoder, intuition_loss
from .ppo import evaluate  # re-exported: greedy-argmax evaluation lives with the trainer
from .reports import ComparisonReport, RunReport, gain_percent

__all__ = [
    "SolveCriterion", "evaluate", "steps_to_solve", "compare",
    "measure_overhead", "solve_criterion_for",
]


@dataclass(frozen=True)
class SolveCriterion:
    kind: str                  # "ssr" (fixed threshold) | "bbr" (best-baseline proxy)
    threshold: float | None    # None for bbr until the baseline fixes it
    eval_episodes: int = EVAL_EPISODES

    def __post_init__(self):
        if self.kind not in ("ssr", "bbr"):
            raise ConfigError(f"solve criterion kind must be 'ssr' or 'bbr', got {self.kind!r}")
        if self.eval_episodes < 1:
            raise ConfigError("eval_episodes must be >= 1")


def solve_criterion_for(env_name: str) -> SolveCriterion:
    spec = envs.get_spec(env_name)
    if spec.ssr is not None:
        return SolveCriterion("ssr", spec.ssr)
    return SolveCriterion("bbr", None)


def steps_to_solve(curve, criterion: SolveCriterion):
    """First cumulative step count whose eval mean reaches the threshold, or
    None when the curve never crosses it."""
    if not curve:
        raise UsageError("steps_to_solve: empty learning curve")
    if criterion.threshold is None:
        raise UsageError("steps_to_solve: criterion has no threshold yet")
    for point in curve:
        if point.mean_eval_reward >= criterion.threshold:
            return point.step
    return None


def _bbr_threshold(env_name: str, baseline: RunReport) -> float:
    best = baseline.best_eval_mean()
    if best is None:
        raise UsageError("baseline run has an empty curve; cannot fix a BBR threshold")
    preferred = PREFERRED_BBR_THRESHOLD.get(env_name)
    if preferred is not None and best >= preferred:
        return preferred
    return best


def compare_one_seed(env_name: str, net, config: ppo.PPOConfig, seed: int,
                     total_steps: int | None = None,
                     eval_episodes: int = EVAL_EPISODES) -> ComparisonReport:
    """Train baseline and SHIRE arms with identical seed/config (apart from
    the intuition flag) and report sample/time gains."""
    if total_steps is None:
        total_steps = DEFAULT_BUDGET[env_name]
    criterion = solve_criterion_for(env_name)

    base_cfg = replace(config, seed=seed, intuition_enabled=False)
    shire_cfg = replace(config, seed=seed, intuition_enabled=True)

    if criterion.kind == "ssr":
        threshold = criterion.threshold
        _, base_report = ppo.train(env_name, base_cfg, total_steps,
                                   solve_threshold=threshold, eval_episodes=eval_episodes)
        _, shire_report = ppo.train(env_name, shire_cfg, total_steps, net=net,
                                    solve_threshold=threshold, eval_episodes=eval_episodes)
    else:
        # Baseline runs the full budget to fix the threshold, read back from
        # its curve; the SHIRE arm may then stop early at that threshold.
        _, base_report = ppo.train(env_name, base_cfg, total_steps,
                                   eval_episodes=eval_episodes)
        threshold = _bbr_threshold(env_name, base_report)
        criterion = SolveCriterion("bbr", threshold, criterion.eval_episodes)
        base_report.steps_to_solve = steps_to_solve(base_report.curve, criterion)
        _, shire_report = ppo.train(env_name, shire_cfg, total_steps, net=net,
                                    solve_threshold=threshold, eval_episodes=eval_episodes)

    report = ComparisonReport(
        env_name=env_name,
        seed=seed,
        threshold=threshold,
        criterion_kind=criterion.kind,
        baseline=base_report,
        shire=shire_report,
    )
    if base_report.solved and shire_report.solved:
        report.sample_gain_pct = gain_percent(base_report.steps_to_solve,
                                              shire_report.steps_to_solve)
        report.time_gain_pct = gain_percent(base_report.wall_clock_seconds,
                                            shire_report.wall_clock_seconds)
    elif not base_report.solved and not shire_report.solved:
        report.flag = "inconclusive: neither arm solved within budget"
    elif base_report.solved:
        report.flag = "shire did not solve within budget"
    else:
        report.flag = "baseline did not solve within budget"
    return report


def compare(env_name: str, net, config: ppo.PPOConfig, seeds,
            total_steps: int | None = None,
            eval_episodes: int = EVAL_EPISODES):
    """Per-seed comparisons plus a median aggregate.

    Returns (list of ComparisonReport, aggregate dict)."""
    if not seeds:
        raise ConfigError("compare needs at least one seed")
    comparisons = [
        compare_one_seed(env_name, net, config, seed, total_steps, eval_episodes)
        for seed in seeds
    ]
    sample_gains = [c.sample_gain_pct for c in comparisons if c.sample_gain_pct is not None]
    time_gains = [c.time_gain_pct for c in comparisons if c.time_gain_pct is not None]
    aggregate = {
        "env_name": env_name,
        "seeds": list(seeds),
        "n_comparable": len(sample_gains),
        "median_sample_gain_pct": float(np.median(sample_gains)) if sample_gains else None,
        "median_time_gain_pct": float(np.median(time_gains)) if time_gains else None,
        "flags": {c.seed: c.flag for c in comparisons if c.flag},
    }
    return comparisons, aggregate


def _collect_observations(env_name: str, n_samples: int, seed: int = 12345) -> np.ndarray:
    """Raw observations from random-action rollouts, for overhead timing."""
    env = envs.ENVS[env_name]()
    rng = np.random.default_rng(seed)
    obs = env.reset(seed=int(rng.integers(2**63)))
    out = np.zeros((n_samples, env.spec.raw_obs_dim))
    for i in range(n_samples):
        out[i] = obs
        result = env.step(int(rng.integers(env.spec.n_actions)))
        obs = env.reset() if (result.terminated or result.truncated) else result.obs
    return out


def measure_overhead(env_name: str, net, n_samples: int = 20_000,
                     repeats: int = 5, seed: int = 12345) -> float:
    """Microseconds per sample for the full intuition pipeline: abstract
    encoding -> inference -> target and hinge-loss evaluation.

    Environment stepping and PPO update time are excluded; the median over
    `repeats` timed passes is reported, after one untimed warmup pass.
    """
    if n_samples < 10_000:
        raise ConfigError("overhead measurement needs n_samples >= 10000 for timer stability")
    encoder = get_encoder(env_name)
    obs = _collect_observations(env_name, n_samples, seed)
    spec = envs.get_spec(env_name)
    logits = np.random.default_rng(seed).normal(size=(n_samples, spec.n_actions))

    def pipeline():
        targets = compute_targets(net, encoder, obs, mode="map")
        return intuition_loss(logits, targets)

    pipeline()  # warmup
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        pipeline()
        times.append(time.perf_counter() - t0)
    return float(np.median(times) / n_samples * 1e6)
