"""Everything that is not a cell structure: workshops, towers, props, boats, trees."""

from __future__ import annotations

import numpy as np

from ..blueprint import Plot
from ..geometry import Rect
from .canvas import Canvas
from .materials import AIR, FOUNDATION, Materials


def level_footprint(canvas: Canvas, rect: Rect, anchor: int, heights: np.ndarray) -> int:
    """Fill dips up to ``anchor`` and cut bumps down to it, inside ``rect`` only."""
    n = 0
    for x in range(rect.x, rect.x1):
        for z in range(rect.z, rect.z1):
            h = int(heights[x, z])
            if h < anchor:
                n += canvas.column(x, z, h + 1, anchor + 1, FOUNDATION)
            elif h > anchor:
                n += canvas.column(x, z, anchor + 1, h + 1, AIR)
    return n


def _box_shell(canvas: Canvas, r: Rect, y0: int, y1: int, block: str) -> int:
    n = canvas.fill(r.x, r.x1, y0, y1, r.z, r.z1, block)
    if r.w > 2 and r.d > 2:
        n += canvas.fill(r.x + 1, r.x1 - 1, y0, y1, r.z + 1, r.z1 - 1, AIR)
    return n


def build_industrial(canvas: Canvas, plot: Plot, m: Materials, rng) -> int:
    """Stone workshop with a flat roof and a chimney."""
    r = plot.rect.expanded(-1) if min(plot.rect.w, plot.rect.d) > 4 else plot.rect
    base = plot.anchor_height + 1
    wall_h = rng.randint(4, 5)
    n = canvas.fill(r.x, r.x1, base - 1, base, r.z, r.z1, m.floor)
    n += _box_shell(canvas, r, base, base + wall_h, m.planks)
    n += canvas.fill(r.x, r.x1, base + wall_h, base + wall_h + 1, r.z, r.z1, m.roof)
    cx, cz = r.x1 - 1, r.z
    n += canvas.column(cx, cz, base, base + wall_h + 4, "bricks")
    mid = r.x + r.w // 2
    n += canvas.set(mid, base, r.z1 - 1, m.door) + canvas.set(mid, base + 1, r.z1 - 1, m.door)
    n += canvas.set(r.x + 1, base, r.z + 1, "furnace") + canvas.set(r.x + 2, base, r.z + 1, "anvil")
    return n


def build_watchtower(canvas: Canvas, plot: Plot, m: Materials, rng) -> int:
    r = plot.rect
    base = plot.anchor_height + 1
    top = base + rng.randint(9, 12)
    n = 0
    for x, z in r.corners():
        n += canvas.column(x, z, base, top, m.frame)
    n += canvas.fill(r.x, r.x1, top, top + 1, r.z, r.z1, m.planks)
    for x in range(r.x, r.x1):
        for z in range(r.z, r.z1):
            if x in (r.x, r.x1 - 1) or z in (r.z, r.z1 - 1):
                n += canvas.set(x, top + 1, z, m.fence)
    cx, cz = r.x + r.w // 2, r.z + r.d // 2
    n += canvas.column(cx, cz, base, top, "ladder")
    n += canvas.set(cx, top + 1, cz, "lantern")
    return n


# variant -> (column, dy, block); footprint cells cycle through the columns
DECORATION_SHAPES = {
    "bench": [(0, 0, "{wood}_stairs")],
    "wheelbarrow": [(0, 0, "{wood}_trapdoor"), (1, 0, "composter")],
    "well": [(0, 0, "cobblestone_wall"), (1, 0, "water_cauldron")],
    "lamp_post": [(0, 0, "{wood}_fence"), (0, 1, "{wood}_fence"), (0, 2, "lantern")],
    "fountain": [(0, 0, "stone_brick_wall"), (1, 0, "water")],
    "market_stall": [(0, 0, "{wood}_fence"), (0, 1, "{wood}_fence"), (0, 2, "red_wool"),
                     (1, 0, "barrel"), (1, 2, "red_wool")],
    "hay_bale": [(0, 0, "hay_block")],
    "barrel_stack": [(0, 0, "barrel"), (0, 1, "barrel")],
    "flower_bed": [(0, 0, "poppy"), (1, 0, "dandelion")],
    "signpost": [(0, 0, "{wood}_sign")],
    "crate_pile": [(0, 0, "chest"), (1, 0, "barrel"), (1, 1, "barrel")],
}


def build_decoration(canvas: Canvas, plot: Plot, wood: str) -> int:
    r = plot.rect
    base = plot.anchor_height + 1
    shape = DECORATION_SHAPES.get(plot.variant or "", [(0, 0, "{wood}_fence")])
    columns = sorted({col for col, _, _ in shape})
    n = 0
    for i, (x, z) in enumerate(r.cells()):
        col = columns[i % len(columns)]
        for c, dy, name in shape:
            if c == col:
                n += canvas.set(x, base + dy, z, name.format(wood=wood))
    return n


def build_boat(canvas: Canvas, plot: Plot, m: Materials, surface: int) -> int:
    """Open hull floating on the water; large boats get a mast and sail."""
    r = plot.rect
    n = canvas.fill(r.x, r.x1, surface, surface + 1, r.z, r.z1, m.planks)
    for x in range(r.x, r.x1):
        for z in range(r.z, r.z1):
            if x in (r.x, r.x1 - 1) or z in (r.z, r.z1 - 1):
                n += canvas.set(x, surface + 1, z, m.planks)
    if plot.variant == "large":
        cx, cz = r.x + r.w // 2, r.z + r.d // 2
        n += canvas.column(cx, cz, surface + 1, surface + 8, m.frame)
        long_x = r.w >= r.d
        for k in range(-1, 2):
            for dy in range(3, 7):
                x, z = (cx, cz + k) if long_x else (cx + k, cz)
                if (x, z) != (cx, cz):
                    n += canvas.set(x, surface + dy, z, "white_wool")
    return n


def build_fishing_platform(canvas: Canvas, plot: Plot, m: Materials, surface: int,
                           ground: np.ndarray) -> int:
    r = plot.rect
    deck = surface + 1
    n = 0
    for x, z in r.corners():
        n += canvas.column(x, z, int(ground[x, z]) + 1, deck, m.frame)
    n += canvas.fill(r.x, r.x1, deck, deck + 1, r.z, r.z1, m.planks)
    for x in range(r.x, r.x1):
        n += canvas.set(x, deck + 1, r.z, m.fence)
    n += canvas.set(r.x + r.w // 2, deck + 1, r.z1 - 1, "barrel")
    return n


def plant_tree(canvas: Canvas, plot: Plot, wood: str, ground: int, rng, *, tall: bool = False) -> int:
    r = plot.rect
    cx, cz = r.x + r.w // 2, r.z + r.d // 2
    trunk = rng.randint(7, 10) if tall else rng.randint(4, 6)
    base = ground + 1
    n = canvas.column(cx, cz, base, base + trunk, f"{wood}_log")
    radius = max(1, min(r.w, r.d) // 2)
    for dy in range(-2, 2):
        rad = radius if dy < 1 else radius - 1
        for x in range(cx - rad, cx + rad + 1):
            for z in range(cz - rad, cz + rad + 1):
                if (x, z) == (cx, cz) and dy < 1:
                    continue
                if r.x <= x < r.x1 and r.z <= z < r.z1:
                    n += canvas.set(x, base + trunk + dy, z, f"{wood}_leaves")
    return n
