import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import checked_run, fresh_world, terrain_for
from settlegen.blueprint import Plot, PlotKind
from settlegen.economy import differentiate
from settlegen.geometry import Rect
from settlegen.placement import place_all
from settlegen.placement.canvas import Canvas
from settlegen.placement.cells import (CellLayout, ModelFormatError, build_cell_structure,
                                       generate_layout, load_library, parse_model, select_models)
from settlegen.placement.farms import fence_rings, FarmRegion
from settlegen.placement.materials import style_for
from settlegen.placement.trees import remove_trees
from settlegen.placement.wall import lipschitz_raise, tower_indices
from settlegen.rng import SplitMix64
from settlegen.analysis import analyze
from settlegen.world import BlockClass, BuildArea, synthesize_terrain

MINI = """# tiny
id: mini
size: 2
height: 2
sockets: north=wall
legend: S=stone .=air
layer 0
SS
..
layer 1
S.
.S
"""


def test_parse_and_rotate_model():
    m = parse_model(MINI)
    assert m.voxels.shape == (2, 2, 2)
    assert m.voxels[0, 0, 0] == "stone" and m.voxels[0, 0, 1] == "air"
    r = m.rotated(1)
    assert r.sockets["east"] == "wall" and r.sockets["north"] == "none"
    assert np.array_equal(m.rotated(4).voxels, m.voxels)
    assert np.array_equal(r.rotated(3).voxels, m.voxels)


@pytest.mark.parametrize("bad", [
    MINI.replace("S=stone", "S=lava"),
    MINI.replace("layer 1", "layer 3"),
    MINI.replace("SS\n..", "SSS\n..."),
    MINI.replace("id: mini\n", ""),
], ids=["unknown-role", "layer-gap", "wrong-width", "no-id"])
def test_malformed_models_rejected(bad):
    with pytest.raises(ModelFormatError):
        parse_model(bad)


def test_library_shares_one_size():
    lib = load_library()
    assert {"floor", "wall", "open", "tower_side", "roof"} <= set(lib)
    assert len({(m.size, m.height) for m in lib.values()}) == 1


def test_layout_must_be_connected():
    with pytest.raises(ValueError):
        CellLayout(np.array([[1, 0, 1]]))
    rng = SplitMix64(3)
    for kind in ("residential", "commercial", "church"):
        for _ in range(20):
            generate_layout(kind, (3, 2), rng)    # validated on construction


def test_face_rules():
    # a 2-high cell next to a 1-high cell, and a lone tower
    layout = CellLayout(np.array([[2, 1], [0, 0]]))
    choices = {(c.cell, c.level): c for c in select_models(layout)}
    low = choices[((0, 1), 0)]
    assert "open" in low.faces and low.roof
    tall0 = choices[((0, 0), 0)]
    assert tall0.faces.count("open") == 1 and not tall0.roof
    tower = CellLayout(np.array([[5, 1]]))
    top = [c for c in select_models(tower) if c.cell == (0, 0) and c.level == 4][0]
    assert top.faces.count("tower-side") == 4 and top.roof


def test_cell_structure_stays_in_plot():
    world = synthesize_terrain(1, (40, 48, 40), "plains")
    area = BuildArea(0, 0, 40, 40)
    canvas = Canvas(world, area)
    before = world.blocks.copy()
    plot = Plot(1, PlotKind.RESIDENTIAL, Rect(5, 6, 15, 14), 20, 0, road_access=(12, 5))
    n, layout = build_cell_structure(canvas, plot, load_library(), SplitMix64(2),
                                     style_for("residential", "oak"), kind="residential")
    changed = np.argwhere((world.blocks != before).any(axis=1))
    assert n > 0 and len(changed)
    assert changed[:, 0].min() >= 5 and changed[:, 0].max() < 20
    assert changed[:, 1].min() >= 6 and changed[:, 1].max() < 20


def test_canvas_clips_to_world():
    world = synthesize_terrain(1, (20, 20, 20), "plains")
    c = Canvas(world, BuildArea(0, 0, 20, 20))
    assert c.fill(-5, 3, 18, 30, 0, 2, "stone") == 3 * 2 * 2
    assert c.set(0, 25, 0, "stone") == 0


@given(st.lists(st.integers(0, 30), min_size=2, max_size=40))
def test_lipschitz_raise_is_minimal_and_walkable(tops):
    out = lipschitz_raise(tops)
    assert (out >= np.array(tops)).all()
    assert (np.abs(np.diff(np.append(out, out[0]))) <= 1).all()
    # lowering any raised entry breaks the bound
    for i in np.flatnonzero(out > np.array(tops)):
        trial = out.copy()
        trial[i] -= 1
        assert (np.abs(np.diff(np.append(trial, trial[0]))) > 1).any()


def test_tower_spacing():
    assert tower_indices(100) == [14, 42, 70]
    assert tower_indices(20) == []


def test_tree_removal_counts_foliage():
    world = synthesize_terrain(2, (48, 64, 48), "jungle")
    area = BuildArea(0, 0, 48, 48)
    maps, _ = analyze(world, area)
    n = remove_trees(world, area, maps.tree)
    assert n > 0
    cls = world.class_table()[world.blocks]
    foliage_cols = np.isin(cls, (BlockClass.FOLIAGE_LOG, BlockClass.FOLIAGE_LEAF)).any(axis=1)
    assert not foliage_cols[maps.tree].any()


def test_separate_farms_get_separate_fences():
    a = np.zeros((20, 20), bool)
    b = np.zeros((20, 20), bool)
    a[2:5, 2:5] = True
    b[10:14, 10:14] = True
    h = np.zeros((20, 20), int)
    rings = fence_rings([FarmRegion(1, "wheat", a, h, a), FarmRegion(2, "wheat", b, h, b)], (20, 20))
    assert len(rings) == 2
    assert rings[0].sum() == 16 and rings[1].sum() == 20


def test_place_all_reports_phases():
    bp = checked_run(2).bp.copy()
    differentiate(bp)
    world, area = fresh_world(2)
    report = place_all(bp, world, terrain_for(2)[3], 2, area=area)
    assert not report.failures
    assert {"tree_removal", "roads", "wall", "structures", "farms", "placement", "total"} <= set(report.timings)
    assert report.blocks.get("wall", 0) > 0 and report.blocks.get("roads", 0) > 0
    assert report.towers and report.gates >= 1
