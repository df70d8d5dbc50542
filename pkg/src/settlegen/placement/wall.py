"""City wall: smoothed walkable top, battlements, periodic towers, open gates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..blueprint import WallBand
from ..geometry import moving_average_circular, savgol_circular
from .canvas import Canvas
from .materials import WALL_BLOCK, WALL_TOP

WALL_HEIGHT = 6
SG_WINDOW = 11
SG_ORDER = 3
TOWER_PERIOD = 28
TOWER_RADIUS = 2
TOWER_EXTRA = 4
MIN_CLEARANCE = 2


def lipschitz_raise(tops) -> np.ndarray:
    """Smallest pointwise raise of a closed loop so neighbours differ by at most one."""
    t = np.asarray(tops, dtype=np.int64).copy()
    n = len(t)
    if n < 2:
        return t
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if t[i - 1] - 1 > t[i]:
                t[i] = t[i - 1] - 1
                changed = True
        for i in range(n - 1, -1, -1):
            j = (i + 1) % n
            if t[j] - 1 > t[i]:
                t[i] = t[j] - 1
                changed = True
    return t


def plan_wall_heights(band: WallBand, height_map: np.ndarray, *, wall_height: int = WALL_HEIGHT,
                      window: int = SG_WINDOW, order: int = SG_ORDER) -> np.ndarray:
    """Top y for every path index of the band.

    The terrain profile along the loop is Savitzky-Golay smoothed, lifted by the
    wall height, kept at least ``MIN_CLEARANCE`` above the ground and finally
    raised where needed so consecutive tops differ by at most one block.
    """
    ground = np.array([height_map[c] for c in band.path], dtype=np.float64)
    if len(ground) >= window:
        smooth = savgol_circular(ground, window, order)
    elif len(ground) >= 3:
        smooth = moving_average_circular(ground, 3)
    else:
        smooth = ground
    tops = np.rint(smooth).astype(np.int64) + wall_height
    tops = np.maximum(tops, ground.astype(np.int64) + MIN_CLEARANCE)
    return lipschitz_raise(tops)


def tower_indices(length: int, period: int = TOWER_PERIOD) -> list[int]:
    return [i * period + period // 2 for i in range(length // period)]


@dataclass
class WallBuild:
    blocks: int = 0
    towers: list = field(default_factory=list)
    gates: int = 0


def build_wall(canvas: Canvas, band: WallBand, tops: np.ndarray, ground: np.ndarray,
               road_map: np.ndarray, plot_map: np.ndarray, *, period: int = TOWER_PERIOD) -> WallBuild:
    W, D = ground.shape
    out = WallBuild()
    band_mask = np.zeros((W, D), bool)
    for c in band.cells:
        band_mask[c] = True
    inside = ndimage.binary_fill_holes(band_mask)
    edge = band_mask & ndimage.binary_dilation(~inside, np.ones((3, 3), bool))
    for c in sorted(band.cells):
        if road_map[c]:
            continue
        x, z = c
        i = band.path_index[c]
        top = int(tops[i])
        out.blocks += canvas.column(x, z, int(ground[c]) + 1, top, WALL_BLOCK)
        out.blocks += canvas.set(x, top, z, WALL_BLOCK)
        if edge[c] and i % 2 == 0:
            out.blocks += canvas.set(x, top + 1, z, WALL_TOP)
    for i in tower_indices(len(band.path), period):
        px, pz = band.path[i]
        top = int(tops[i]) + TOWER_EXTRA
        for x in range(px - TOWER_RADIUS, px + TOWER_RADIUS + 1):
            for z in range(pz - TOWER_RADIUS, pz + TOWER_RADIUS + 1):
                if not (0 <= x < W and 0 <= z < D) or road_map[x, z] or plot_map[x, z]:
                    continue
                out.blocks += canvas.column(x, z, int(ground[x, z]) + 1, top + 1, WALL_BLOCK)
                rim = max(abs(x - px), abs(z - pz)) == TOWER_RADIUS
                if rim and (x + z) % 2 == 0:
                    out.blocks += canvas.set(x, top + 1, z, WALL_TOP)
        out.towers.append(i)
    _, out.gates = ndimage.label(band_mask & road_map)
    return out
