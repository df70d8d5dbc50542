"""Roads: three-wide path strips on the terrain, decks over water."""

from __future__ import annotations

import numpy as np

from ..blueprint import Blueprint
from .canvas import Canvas
from .materials import AIR, BRIDGE_DECK, ROAD_BLOCK, ROAD_STEP

CLEARANCE = 3


def road_levels(bp: Blueprint) -> np.ndarray:
    """Surface y per road cell: terrain height on land, one above the water on bridges."""
    t = bp.terrain
    return np.where(t.water, t.water_surface + 1, t.height)


def build_roads(canvas: Canvas, bp: Blueprint, fence: str = "oak_fence") -> int:
    t = bp.terrain
    W, D = bp.size
    level = road_levels(bp)
    placed = 0
    centre = bp.road_map
    for x, z in map(tuple, np.argwhere(centre).tolist()):
        y = int(level[x, z])
        block = BRIDGE_DECK if t.water[x, z] else ROAD_BLOCK
        placed += canvas.set(x, y, z, block)
        placed += canvas.column(x, z, y + 1, y + 1 + CLEARANCE, AIR)
    # side strips: free dry neighbours within one block of the centre height
    blocked = centre | bp.plot_map | bp.wall_map | t.water | t.structure
    for x, z in map(tuple, np.argwhere(centre & ~t.water).tolist()):
        y = int(level[x, z])
        for dx in (-1, 0, 1):
            for dz in (-1, 0, 1):
                nx, nz = x + dx, z + dz
                if (dx or dz) and 0 <= nx < W and 0 <= nz < D and not blocked[nx, nz] \
                        and abs(int(t.height[nx, nz]) - y) <= 1:
                    ny = int(t.height[nx, nz])
                    placed += canvas.set(nx, ny, nz, ROAD_BLOCK)
                    placed += canvas.column(nx, nz, ny + 1, ny + 1 + CLEARANCE, AIR)
                    blocked[nx, nz] = True
    # stairs on the lower cell of every one-block step along a polyline
    for road in bp.roads.segments:
        for (ax, az), (bx, bz) in zip(road.cells, road.cells[1:]):
            ha, hb = int(level[ax, az]), int(level[bx, bz])
            if abs(ha - hb) == 1 and not (t.water[ax, az] or t.water[bx, bz]):
                lx, lz, ly = (ax, az, ha) if ha < hb else (bx, bz, hb)
                placed += canvas.set(lx, ly + 1, lz, ROAD_STEP)
        if road.bridge:
            for x, z in road.cells:
                if not t.water[x, z]:
                    continue
                for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    nx, nz = x + dx, z + dz
                    if 0 <= nx < W and 0 <= nz < D and t.water[nx, nz] and not centre[nx, nz]:
                        placed += canvas.set(nx, int(level[x, z]) + 1, nz, fence)
    return placed
