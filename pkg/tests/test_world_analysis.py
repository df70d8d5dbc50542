import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from settlegen.analysis import analyze, dump_maps, flattest_spot, read_pgm, slope_of
from settlegen.rng import SplitMix64, derive_seed, stream
from settlegen.world import (Biome, BoundsError, BuildArea, CorruptHeaderError, TruncatedError,
                             VoxelWorld, export_world, import_world, synthesize_terrain,
                             world_from_bytes)


def test_streams_are_reproducible_and_independent():
    a = [stream(7, "terrain").random() for _ in range(3)]
    assert a == [stream(7, "terrain").random() for _ in range(3)]
    assert derive_seed(7, "terrain") != derive_seed(7, "blueprint")
    r = SplitMix64(1)
    assert 0.0 <= r.random() < 1.0
    assert r.randint(3, 5) in (3, 4, 5)


def test_world_round_trip(tmp_path, flat_world):
    flat_world.set_block(3, 9, 4, "oak_planks")
    path = tmp_path / "w.sfw"
    export_world(flat_world, path)
    back = import_world(path)
    assert back == flat_world
    assert back.get_block(3, 9, 4).name == "oak_planks"


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.data())
def test_world_round_trip_random(sx, sy, sz, data):
    names = ["air", "stone", "water", "oak_log", "glass"]
    w = VoxelWorld.empty((sx, sy, sz))
    idx = [w.index(n) for n in names]
    flat = data.draw(st.lists(st.sampled_from(idx), min_size=sx * sy * sz, max_size=sx * sy * sz))
    w.blocks[:] = np.array(flat, np.uint16).reshape(sx, sy, sz)
    assert world_from_bytes(w.to_bytes()) == w


def test_corrupt_and_truncated_files_are_rejected(flat_world):
    data = flat_world.to_bytes()
    with pytest.raises(CorruptHeaderError):
        world_from_bytes(b"XXXX" + data[4:])
    with pytest.raises(TruncatedError):
        world_from_bytes(data[: len(data) // 2])


def test_out_of_bounds_access(flat_world):
    with pytest.raises(BoundsError):
        flat_world.get_block(32, 0, 0)
    with pytest.raises(BoundsError):
        BuildArea.centered(flat_world, 40, 8)


def test_synthesis_is_deterministic():
    a = synthesize_terrain(3, (32, 48, 32), "jungle")
    b = synthesize_terrain(3, (32, 48, 32), "jungle")
    assert a.digest() == b.digest()
    assert a.digest() != synthesize_terrain(4, (32, 48, 32), "jungle").digest()
    with pytest.raises(ValueError):
        Biome.parse("mars")


def test_flat_world_has_zero_slope(flat_world, tmp_path):
    maps, feats = analyze(flat_world, BuildArea(0, 0, 32, 32))
    assert (maps.height == 5).all() and (maps.slope == 0).all()
    dump_maps(maps, tmp_path)
    assert (read_pgm(tmp_path / "slope.pgm") == 0).all()
    assert feats.dominant_biome == Biome.PLAINS


def test_lake_columns_are_water_exactly(flat_world, tmp_path):
    lake = np.zeros((32, 32), bool)
    lake[10:15, 8:20] = True
    for x, z in np.argwhere(lake):
        flat_world.set_block(int(x), 5, int(z), "water")
        flat_world.set_block(int(x), 4, int(z), "sand")
    maps, _ = analyze(flat_world, BuildArea(0, 0, 32, 32))
    assert np.array_equal(maps.water, lake)
    assert (maps.water_surface[lake] == 5).all()
    dump_maps(maps, tmp_path)
    assert np.array_equal(read_pgm(tmp_path / "water.pgm") > 0, lake)


def test_trees_are_mapped_and_see_through(flat_world):
    flat_world.set_block(4, 6, 4, "birch_log")
    flat_world.set_block(4, 7, 4, "birch_leaves")
    maps, feats = analyze(flat_world, BuildArea(0, 0, 32, 32))
    assert maps.tree[4, 4] and maps.tree.sum() == 1
    assert maps.height[4, 4] == 5
    assert "birch" in feats.wood_types


def test_slope_examples():
    h = np.array([[0, 0, 0], [0, 3, 0], [0, 0, 0]])
    s = slope_of(h)
    assert s[1, 1] == 3 and s[0, 0] == 3 and s.min() == 3
    assert slope_of(np.array([[7]]))[0, 0] == 0


def test_flattest_spot_prefers_flat_window():
    world = synthesize_terrain(5, (48, 48, 48), "plains", roughness=0.6)
    maps, _ = analyze(world, BuildArea(0, 0, 48, 48))
    x, z = flattest_spot(maps, 9)
    assert 4 <= x < 44 and 4 <= z < 44
