"""Per-phase runtime measurements over a grid of areas, step counts and biomes."""

from __future__ import annotations

import csv
import logging
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .pipeline import PHASES, generate

log = logging.getLogger(__name__)

CSV_COLUMNS = ("area", "steps", "biome", "seed", "analysis", "blueprint", "tree_removal", "placement",
               "total", "outlier_flag")
OUTLIER_SIGMA = 3.0


@dataclass
class PhaseTiming:
    area: int
    steps: int
    biome: str
    seed: int
    analysis: float = 0.0
    blueprint: float = 0.0       # includes differentiation
    tree_removal: float = 0.0
    placement: float = 0.0
    failed: str | None = None
    outlier: bool = False

    @property
    def key(self) -> tuple:
        return (self.area, self.steps, self.biome)

    @property
    def total(self) -> float:
        return self.analysis + self.blueprint + self.tree_removal + self.placement


@dataclass
class Aggregate:
    n: int
    mean: dict
    std: dict
    mean_total_excl: float
    n_outliers: int


@dataclass
class BenchReport:
    runs: list = field(default_factory=list)

    def ok_runs(self, key=None) -> list[PhaseTiming]:
        return [r for r in self.runs if r.failed is None and (key is None or r.key == key)]

    def flag_outliers(self, sigma: float = OUTLIER_SIGMA) -> None:
        """Leave-one-out rule: a run is an outlier when its total lies more than
        ``sigma`` standard deviations from the mean of the other runs of its group."""
        for key in {r.key for r in self.ok_runs()}:
            group = self.ok_runs(key)
            for r in group:
                others = [o.total for o in group if o is not r]
                if len(others) < 2:
                    r.outlier = False
                    continue
                mu, sd = statistics.fmean(others), statistics.stdev(others)
                r.outlier = sd > 0 and abs(r.total - mu) > sigma * sd

    def aggregates(self) -> dict[tuple, Aggregate]:
        out = {}
        for key in sorted({r.key for r in self.ok_runs()}):
            group = self.ok_runs(key)
            cols = PHASES + ("total",)
            values = {c: [getattr(r, c) for r in group] for c in cols}
            kept = [r.total for r in group if not r.outlier] or values["total"]
            out[key] = Aggregate(
                len(group),
                {c: statistics.fmean(v) for c, v in values.items()},
                {c: statistics.pstdev(v) for c, v in values.items()},
                statistics.fmean(kept),
                sum(r.outlier for r in group),
            )
        return out

    def mean(self, phase: str, **where) -> float:
        vals = [getattr(r, phase) for r in self.ok_runs()
                if all(getattr(r, k) == v for k, v in where.items())]
        if not vals:
            raise ValueError(f"no successful runs match {where}")
        return statistics.fmean(vals)


def run_matrix(areas, steps, biomes, repeats: int, seed_base: int = 1, *, world_height: int = 96,
               progress=None) -> BenchReport:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    report = BenchReport()
    for biome in biomes:
        for area in areas:
            for n in steps:
                for seed in range(seed_base, seed_base + repeats):
                    t = PhaseTiming(int(area), int(n), str(biome), seed)
                    cfg = RunConfig(seed=seed, area=(area, area), biome=biome, steps=n,
                                    world_height=world_height, snapshot_every=0)
                    try:
                        res = generate(cfg)
                        for p in PHASES:
                            setattr(t, p, res.timings[p])
                    except Exception as exc:  # recorded, then left out of the aggregates
                        log.warning("bench run %s seed %d failed: %s", t.key, seed, exc)
                        t.failed = f"{type(exc).__name__}: {exc}"
                    report.runs.append(t)
                    if progress:
                        progress(t)
    report.flag_outliers()
    return report


def report_to_csv(report: BenchReport, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report.runs:
            if r.failed is not None:
                w.writerow([f"{r.area}x{r.area}", r.steps, r.biome, r.seed, "", "", "", "", "",
                            "failed"])
                continue
            w.writerow([f"{r.area}x{r.area}", r.steps, r.biome, r.seed,
                        *(f"{getattr(r, c):.6f}" for c in PHASES + ("total",)), int(r.outlier)])
    return path


def format_summary(report: BenchReport) -> str:
    """Whitespace-separated table (gnuplot friendly) of the per-group means."""
    lines = ["# area steps biome n analysis blueprint tree_removal placement total total_sd "
             "total_excl_outliers outliers"]
    for (area, steps, biome), a in report.aggregates().items():
        lines.append(" ".join([str(area), str(steps), biome, str(a.n),
                               *(f"{a.mean[c]:.4f}" for c in PHASES + ("total",)),
                               f"{a.std['total']:.4f}", f"{a.mean_total_excl:.4f}",
                               str(a.n_outliers)]))
    return "\n".join(lines) + "\n"
