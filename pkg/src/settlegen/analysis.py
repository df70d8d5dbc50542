"""Terrain analysis: the terrain-related feature maps every later phase reads.

All maps are numpy arrays of shape ``(area.width, area.depth)`` indexed
``[x, z]`` relative to the build area origin.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .world import Biome, BlockClass, BuildArea, VoxelWorld


class NoBuildableLandError(Exception):
    """Raised when no window of the build area can host the seed road."""


DEFAULT_WOOD = "oak"
DEFAULT_WINDOW = 9


@dataclass
class TerrainMaps:
    area: BuildArea
    height: np.ndarray      # int, y of the topmost ground/built block (trees ignored)
    slope: np.ndarray       # float
    water: np.ndarray       # bool, water or lava on top
    structure: np.ndarray   # bool, pre-existing built block on top
    tree: np.ndarray        # bool, foliage on top
    water_surface: np.ndarray | None = None  # int, top y of water/lava columns, else height

    def __post_init__(self):
        if self.water_surface is None:
            self.water_surface = self.height.copy()

    @property
    def size(self) -> tuple[int, int]:
        return self.height.shape


@dataclass(frozen=True)
class QualitativeFeatures:
    wood_types: frozenset
    dominant_biome: Biome


def _top_index(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(topmost y where mask holds, whether any) along axis 1 of an (x, y, z) mask."""
    sy = mask.shape[1]
    any_ = mask.any(axis=1)
    top = sy - 1 - np.argmax(mask[:, ::-1, :], axis=1)
    return np.where(any_, top, 0), any_


def analyze(world: VoxelWorld, area: BuildArea) -> tuple[TerrainMaps, QualitativeFeatures]:
    area.check_inside(world)
    sub = world.blocks[area.x:area.x + area.width, :, area.z:area.z + area.depth]
    table = world.class_table()
    cls = table[sub]

    solid = (cls == BlockClass.GROUND) | (cls == BlockClass.BUILT)
    height, _ = _top_index(solid)

    nonair = cls != BlockClass.AIR
    top_y, has_top = _top_index(nonair)
    top_cls = np.take_along_axis(cls, top_y[:, None, :], axis=1)[:, 0, :]
    top_cls = np.where(has_top, top_cls, BlockClass.AIR)
    tree = np.isin(top_cls, (BlockClass.FOLIAGE_LOG, BlockClass.FOLIAGE_LEAF))

    # water/structure are judged on the surface once foliage is chopped off
    nonfoliage = nonair & ~np.isin(cls, (BlockClass.FOLIAGE_LOG, BlockClass.FOLIAGE_LEAF))
    surf_y, has_surf = _top_index(nonfoliage)
    surf_cls = np.take_along_axis(cls, surf_y[:, None, :], axis=1)[:, 0, :]
    surf_cls = np.where(has_surf, surf_cls, BlockClass.AIR)
    water = (surf_cls == BlockClass.WATER) | (surf_cls == BlockClass.LAVA)
    structure = surf_cls == BlockClass.BUILT

    height = height.astype(np.int64)
    water_surface = np.where(water, surf_y, height).astype(np.int64)
    maps = TerrainMaps(area, height, slope_of(height), water, structure, tree, water_surface)

    log_idx = [i for i, b in enumerate(world.palette) if b.cls == BlockClass.FOLIAGE_LOG]
    present = np.unique(sub[np.isin(sub, log_idx)]) if log_idx else []
    woods = {world.palette[int(i)].name.removesuffix("_log") for i in present}
    biomes = Counter(world.biome_map[area.x:area.x + area.width,
                                     area.z:area.z + area.depth].ravel().tolist())
    dominant = Biome(min(biomes, key=lambda b: (-biomes[b], b)))
    return maps, QualitativeFeatures(frozenset(woods or {DEFAULT_WOOD}), dominant)


def slope_of(height: np.ndarray) -> np.ndarray:
    """Max absolute height difference to the 8 neighbours; borders use what exists."""
    h = np.asarray(height, dtype=np.float64)
    w, d = h.shape
    out = np.zeros_like(h)
    for dx in (-1, 0, 1):
        for dz in (-1, 0, 1):
            if dx == dz == 0:
                continue
            xs = slice(max(0, -dx), w - max(0, dx))
            zs = slice(max(0, -dz), d - max(0, dz))
            xn = slice(max(0, dx), w - max(0, -dx))
            zn = slice(max(0, dz), d - max(0, -dz))
            np.maximum(out[xs, zs], np.abs(h[xn, zn] - h[xs, zs]), out=out[xs, zs])
    return out


def window_sum(arr: np.ndarray, w: int, d: int) -> np.ndarray:
    """Sum of every w x d window, indexed by the window's low corner."""
    a = np.asarray(arr, dtype=np.float64)
    ii = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    ii[1:, 1:] = a.cumsum(0).cumsum(1)
    return ii[w:, d:] - ii[:-w, d:] - ii[w:, :-d] + ii[:-w, :-d]


def flattest_spot(maps: TerrainMaps, window: int = DEFAULT_WINDOW) -> tuple[int, int]:
    """Centre of the dry window with the smallest summed slope."""
    W, D = maps.size
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    if window > min(W, D):
        raise ValueError(f"window {window} larger than area {W}x{D}")
    cost = window_sum(maps.slope, window, window)
    blocked = window_sum(maps.water | maps.structure, window, window) > 0
    if blocked.all():
        raise NoBuildableLandError("no buildable land: every window contains water or structures")
    cost = np.where(blocked, np.inf, cost)
    x, z = np.unravel_index(int(np.argmin(cost)), cost.shape)
    return int(x) + window // 2, int(z) + window // 2


def dump_maps(maps: TerrainMaps, out_dir) -> list[Path]:
    """Write each terrain map as an 8-bit binary PGM."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in ("height", "slope", "water", "structure", "tree"):
        arr = getattr(maps, name)
        if arr.dtype == bool:
            img = arr.astype(np.uint8) * 255
        else:
            lo, hi = float(arr.min()), float(arr.max())
            img = np.zeros(arr.shape, np.uint8) if hi == lo else \
                np.rint((arr - lo) * 255.0 / (hi - lo)).astype(np.uint8)
        written.append(write_pgm(out_dir / f"{name}.pgm", img))
    return written


def write_pgm(path, img: np.ndarray) -> Path:
    path = Path(path)
    # rows are z, columns are x
    rows = np.ascontiguousarray(img.T.astype(np.uint8))
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (rows.shape[1], rows.shape[0]))
        f.write(rows.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    """Inverse of :func:`write_pgm`; returns an ``[x, z]`` array."""
    data = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise ValueError("not a binary PGM")
    w, h = int(m.group(1)), int(m.group(2))
    return np.frombuffer(data, np.uint8, count=w * h, offset=m.end()).reshape(h, w).T.copy()
