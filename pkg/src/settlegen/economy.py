"""Differentiation of generic civilian plots through a toy economy.

Three converters (residential, industrial, commercial) take turns. Each one
checks whether the economy allows another building of its type and, if so,
converts the generic plot whose typed neighbourhood it likes best.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .blueprint import Blueprint, Plot, PlotKind

R, C, I = PlotKind.RESIDENTIAL, PlotKind.COMMERCIAL, PlotKind.INDUSTRIAL
CONVERSION_ORDER = (R, I, C)
DEFAULT_RADIUS = 25.0


@dataclass
class Economy:
    workers: int = 0
    employed: int = 0
    goods: float = 0.0
    income: float = 0.0
    unemployment_threshold: float = 0.3
    workers_per_house: int = 4
    workers_per_industry: int = 3
    goods_per_industry: float = 4.0
    income_per_industry: float = 3.0
    workers_per_commerce: int = 2
    goods_cost: float = 2.0
    money_cost: float = 1.0

    @property
    def unemployed(self) -> int:
        return self.workers - self.employed

    @property
    def unemployment(self) -> float:
        return self.unemployed / max(self.workers, 1)

    def check(self) -> None:
        if not (0 <= self.employed <= self.workers):
            raise AssertionError(f"employment out of range: {self.employed}/{self.workers}")
        if self.goods < 0 or self.income < 0:
            raise AssertionError(f"negative stock: goods={self.goods} income={self.income}")


def residential_can_convert(econ: Economy) -> bool:
    return econ.unemployment < econ.unemployment_threshold


def industrial_can_convert(econ: Economy) -> bool:
    return econ.unemployed >= econ.workers_per_industry


def commercial_can_convert(econ: Economy) -> bool:
    return (econ.unemployed >= econ.workers_per_commerce and econ.goods >= econ.goods_cost
            and econ.income >= econ.money_cost)


CAN_CONVERT = {R: residential_can_convert, I: industrial_can_convert, C: commercial_can_convert}


def apply_conversion(econ: Economy, kind: PlotKind) -> None:
    if kind == R:
        econ.workers += econ.workers_per_house
    elif kind == I:
        econ.employed += econ.workers_per_industry
        econ.goods += econ.goods_per_industry
        econ.income += econ.income_per_industry
    elif kind == C:
        econ.employed += econ.workers_per_commerce
        econ.goods -= econ.goods_cost
        econ.income -= econ.money_cost
    else:
        raise ValueError(f"not a civilian type: {kind}")


@dataclass(frozen=True)
class AffinityMatrix:
    """``weights[a][b]``: how much a type-a building likes a type-b neighbour."""

    weights: dict = field(default_factory=lambda: {
        R: {R: 0.5, C: 0.3, I: -0.8},
        C: {R: 0.5, C: 1.0, I: -1.0},
        I: {R: -0.5, C: -0.3, I: 0.8},
    }, hash=False)

    def __post_init__(self):
        w = self.weights
        if not (w[C][R] > 0 and w[C][C] > 0 and w[C][I] < 0):
            raise ValueError("commercial must like residential and commercial and dislike industry")

    def __getitem__(self, kind) -> dict:
        return self.weights[PlotKind(kind)]

    def to_dict(self) -> dict:
        return {a.value: {b.value: v for b, v in row.items()} for a, row in self.weights.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "AffinityMatrix":
        return cls({PlotKind(a): {PlotKind(b): float(v) for b, v in row.items()} for a, row in d.items()})


def _center_distance(a: Plot, b: Plot) -> float:
    (ax, az), (bx, bz) = a.rect.center, b.rect.center
    return math.hypot(ax - bx, az - bz)


def type_fitness(bp: Blueprint, kind: PlotKind, plot: Plot, affinity: AffinityMatrix,
                 radius: float = DEFAULT_RADIUS) -> float:
    row = affinity[kind]
    score = 0.0
    for other in bp.plots.values():
        if other.kind not in row or other.id == plot.id:
            continue
        dist = _center_distance(plot, other)
        if dist <= radius:
            score += row[other.kind] / (1.0 + dist)
    return score


@dataclass(frozen=True)
class TraceRecord:
    step: int
    kind: str
    plot_id: int
    workers: int
    employed: int
    goods: float
    income: float

    def to_line(self) -> str:
        return (f"{self.step}\t{self.kind}\t{self.plot_id}\t{self.workers}\t{self.employed}"
                f"\t{self.goods:g}\t{self.income:g}")


def _record(trace, step: int, kind: PlotKind, plot_id: int, econ: Economy) -> None:
    if trace is not None:
        trace.append(TraceRecord(step, kind.value, plot_id, econ.workers, econ.employed,
                                 econ.goods, econ.income))


def differentiate(bp: Blueprint, econ: Economy | None = None, affinity: AffinityMatrix | None = None,
                  *, radius: float = DEFAULT_RADIUS, trace: list | None = None) -> Blueprint:
    """Convert every generic civilian plot into a typed one, in place."""
    econ = econ if econ is not None else Economy()
    affinity = affinity if affinity is not None else AffinityMatrix()
    step = 0
    while True:
        generics = sorted(bp.plots_of(PlotKind.CIVILIAN_GENERIC), key=lambda p: p.id)
        if not generics:
            break
        converted = False
        for kind in CONVERSION_ORDER:
            if not generics or not CAN_CONVERT[kind](econ):
                continue
            best = max(generics, key=lambda p: type_fitness(bp, kind, p, affinity, radius))
            bp.convert_plot(best.id, kind, f"economy_{kind.value}")
            apply_conversion(econ, kind)
            econ.check()
            _record(trace, step, kind, best.id, econ)
            generics.remove(best)
            converted = True
        step += 1
        if not converted:
            break
    for plot in sorted(bp.plots_of(PlotKind.CIVILIAN_GENERIC), key=lambda p: p.id):
        bp.convert_plot(plot.id, R, "economy_fallback")
        apply_conversion(econ, R)
        _record(trace, step, R, plot.id, econ)
    return bp


def write_trace(records, path) -> Path:
    path = Path(path)
    path.write_text("".join(r.to_line() + "\n" for r in records), encoding="utf-8")
    return path


def economy_config(econ: Economy) -> dict:
    return asdict(econ)


# ------------------------------------------------------------- clustering

def same_type_nn_fraction(plots, kind: PlotKind, labels=None) -> float | None:
    """Share of ``kind`` plots whose nearest civilian neighbour has the same type.

    ``labels`` optionally overrides the plot types (same order as ``plots``).
    """
    plots = list(plots)
    if labels is None:
        labels = [p.kind for p in plots]
    idx = [i for i, k in enumerate(labels) if k == kind]
    if not idx or len(plots) < 2:
        return None
    centers = np.array([p.rect.center for p in plots])
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    nearest = dist.argmin(axis=1)
    return float(np.mean([labels[nearest[i]] == kind for i in idx]))


def random_baseline(plots, kind: PlotKind, rng, trials: int = 200) -> float | None:
    """Mean :func:`same_type_nn_fraction` when the same type counts are shuffled at random."""
    plots = list(plots)
    labels = [p.kind for p in plots]
    values = []
    for _ in range(trials):
        shuffled = labels[:]
        rng.shuffle(shuffled)
        v = same_type_nn_fraction(plots, kind, shuffled)
        if v is not None:
            values.append(v)
    return float(np.mean(values)) if values else None
