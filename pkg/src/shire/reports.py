"""Run and comparison reports plus their on-disk formats (JSON manifest,
curve CSV, Table-style summary CSV)."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

CURVE_COLUMNS = (
    "step", "mean_eval_reward", "loss_policy", "loss_value",
    "loss_entropy", "loss_intuition", "agreement_rate",
)


@dataclass
class CurvePoint:
    step: int
    mean_eval_reward: float
    loss_policy: float = 0.0
    loss_value: float = 0.0
    loss_entropy: float = 0.0
    loss_intuition: float = 0.0
    agreement_rate: float | None = None


@dataclass
class RunReport:
    env_name: str
    seed: int
    config: dict
    net_hash: str | None = None
    steps_to_solve: int | None = None
    total_steps: int = 0
    wall_clock_seconds: float = 0.0
    overhead_us_per_sample: float | None = None
    curve: list = field(default_factory=list)
    final_eval_mean: float | None = None
    final_eval_std: float | None = None

    @property
    def solved(self) -> bool:
        return self.steps_to_solve is not None

    def best_eval_mean(self) -> float | None:
        if not self.curve:
            return None
        return max(p.mean_eval_reward for p in self.curve)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["curve"] = [asdict(p) for p in self.curve]
        return d


def gain_percent(baseline: float, shire: float) -> float:
    return 100.0 * (baseline - shire) / baseline


@dataclass
class ComparisonReport:
    env_name: str
    seed: int
    threshold: float
    criterion_kind: str          # "ssr" | "bbr"
    baseline: RunReport
    shire: RunReport
    sample_gain_pct: float | None = None
    time_gain_pct: float | None = None
    flag: str | None = None      # set when gains are not computable

    def to_dict(self) -> dict:
        return {
            "env_name": self.env_name,
            "seed": self.seed,
            "threshold": self.threshold,
            "criterion_kind": self.criterion_kind,
            "sample_gain_pct": self.sample_gain_pct,
            "time_gain_pct": self.time_gain_pct,
            "flag": self.flag,
            "baseline": self.baseline.to_dict(),
            "shire": self.shire.to_dict(),
        }


def write_manifest(report: RunReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")


def write_curve_csv(curve, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CURVE_COLUMNS)
        for p in curve:
            w.writerow([
                p.step,
                repr(p.mean_eval_reward),
                repr(p.loss_policy),
                repr(p.loss_value),
                repr(p.loss_entropy),
                repr(p.loss_intuition),
                "" if p.agreement_rate is None else repr(p.agreement_rate),
            ])


def read_curve_csv(path):
    out = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            out.append(CurvePoint(
                step=int(row["step"]),
                mean_eval_reward=float(row["mean_eval_reward"]),
                loss_policy=float(row["loss_policy"]),
                loss_value=float(row["loss_value"]),
                loss_entropy=float(row["loss_entropy"]),
                loss_intuition=float(row["loss_intuition"]),
                agreement_rate=float(row["agreement_rate"]) if row["agreement_rate"] else None,
            ))
    return out


SUMMARY_COLUMNS = (
    "environment", "seed", "threshold", "criterion",
    "baseline_steps", "shire_steps", "sample_gain_pct",
    "baseline_minutes", "shire_minutes", "time_gain_pct", "flag",
)


def write_summary_csv(comparisons, path) -> None:
    """Table-style summary, one row per seed comparison."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SUMMARY_COLUMNS)
        for c in comparisons:
            w.writerow([
                c.env_name,
                c.seed,
                c.threshold,
                c.criterion_kind,
                c.baseline.steps_to_solve if c.baseline.solved else "unsolved",
                c.shire.steps_to_solve if c.shire.solved else "unsolved",
                "" if c.sample_gain_pct is None else f"{c.sample_gain_pct:.2f}",
                f"{c.baseline.wall_clock_seconds / 60.0:.2f}",
                f"{c.shire.wall_clock_seconds / 60.0:.2f}",
                "" if c.time_gain_pct is None else f"{c.time_gain_pct:.2f}",
                c.flag or "",
            ])
