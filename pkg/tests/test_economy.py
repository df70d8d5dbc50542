import pytest

from conftest import checked_run
from settlegen.blueprint import PlotKind
from settlegen.economy import (AffinityMatrix, Economy, apply_conversion, commercial_can_convert,
                               differentiate, industrial_can_convert, residential_can_convert,
                               same_type_nn_fraction, write_trace)
from settlegen.geometry import Rect

R, C, I = PlotKind.RESIDENTIAL, PlotKind.COMMERCIAL, PlotKind.INDUSTRIAL


def test_conversion_rules():
    e = Economy()
    assert residential_can_convert(e)
    assert not industrial_can_convert(e) and not commercial_can_convert(e)
    apply_conversion(e, R)
    assert (e.workers, e.employed) == (4, 0)
    assert industrial_can_convert(e) and not residential_can_convert(e)
    apply_conversion(e, I)
    assert (e.employed, e.goods, e.income) == (3, 4.0, 3.0)
    assert not commercial_can_convert(e)   # one worker left
    apply_conversion(e, R)
    assert commercial_can_convert(e)
    apply_conversion(e, C)
    assert (e.employed, e.goods, e.income) == (5, 2.0, 2.0)
    e.check()


def test_check_catches_negative_stock():
    e = Economy(workers=2, employed=0, goods=0.0, income=0.0)
    apply_conversion(e, C)
    with pytest.raises(AssertionError):
        e.check()


def test_affinity_sign_constraint():
    d = AffinityMatrix().to_dict()
    assert AffinityMatrix.from_dict(d) == AffinityMatrix()
    d["commercial"]["industrial"] = 0.5
    with pytest.raises(ValueError):
        AffinityMatrix.from_dict(d)


def test_differentiate_leaves_no_generics(tmp_path):
    bp = checked_run(3).bp.copy()
    n = len(bp.plots_of(PlotKind.CIVILIAN_GENERIC))
    trace = []
    differentiate(bp, trace=trace)
    assert not bp.plots_of(PlotKind.CIVILIAN_GENERIC)
    assert len(trace) == n
    path = write_trace(trace, tmp_path / "economy.tsv")
    assert len(path.read_text().splitlines()) == n
    bp.check_invariants()


def test_differentiate_is_deterministic():
    a, b = checked_run(5).bp.copy(), checked_run(5).bp.copy()
    differentiate(a)
    differentiate(b)
    assert {p.id: p.kind for p in a.plots.values()} == {p.id: p.kind for p in b.plots.values()}


class _P:
    def __init__(self, x, z, kind):
        self.rect, self.kind = Rect(x, z, 1, 1), kind


def test_same_type_fraction():
    plots = [_P(0, 0, C), _P(1, 0, C), _P(10, 0, R), _P(11, 0, R)]
    assert same_type_nn_fraction(plots, C) == 1.0
    assert same_type_nn_fraction(plots, I) is None
