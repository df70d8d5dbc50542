"""Cell structures: houses and churches tiled from equal-sized prefab models.

A :class:`CellLayout` is a small height grid (0 = no cell). For every cell
and storey the neighbour heights decide which model goes on each face: a
face touching an absent or lower neighbour gets a wall, a face shared with a
neighbour at least as tall stays open, and storeys of a tall column that
rise above all its neighbours get tower faces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import ndimage

from ..blueprint import Plot
from .canvas import Canvas
from .materials import FURNITURE, Materials

MODEL_DIR = Path(__file__).with_name("models")
SIDES = ("north", "east", "south", "west")
SIDE_STEP = {"north": (0, -1), "east": (1, 0), "south": (0, 1), "west": (-1, 0)}
FACE_MODEL = {"wall": "wall", "open": "open", "tower-side": "tower_side"}
TOWER_MIN_HEIGHT = 4
CHURCH_TOWER_HEIGHT = 8
ROLE_NAMES = {"floor", "planks", "frame", "glass", "stone", "roof", "air", "keep"}


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CellModel:
    id: str
    size: int
    height: int
    sockets: dict = field(hash=False)
    voxels: np.ndarray = field(hash=False, compare=False)  # role names, indexed [x, y, z]

    def rotated(self, quarter_turns: int) -> "CellModel":
        """Rotate about the vertical axis; one turn maps the north face onto the east face."""
        k = quarter_turns % 4
        if k == 0:
            return self
        vox = np.rot90(self.voxels, k, axes=(0, 2))
        sockets = {s: v for s, v in self.sockets.items() if s not in SIDES}
        for i, side in enumerate(SIDES):
            src = SIDES[(i - k) % 4]
            sockets[side] = self.sockets.get(src, "none")
        return CellModel(self.id, self.size, self.height, sockets, np.ascontiguousarray(vox))


def parse_model(text: str) -> CellModel:
    """Parse the plain-text model format (header lines, then bottom-up layers of rows)."""
    header: dict[str, str] = {}
    layers: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = re.fullmatch(r"layer (\d+)", line.strip())
        if m:
            if int(m.group(1)) != len(layers):
                raise ModelFormatError(f"layers out of order at {line!r}")
            layers.append([])
        elif layers:
            layers[-1].append(line)
        else:
            key, sep, value = line.partition(":")
            if not sep:
                raise ModelFormatError(f"bad header line {line!r}")
            header[key.strip()] = value.strip()
    try:
        mid, size, height = header["id"], int(header["size"]), int(header["height"])
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"incomplete header: {exc}") from exc
    legend = dict(tok.split("=", 1) for tok in header.get("legend", "").split())
    bad = set(legend.values()) - ROLE_NAMES
    if bad:
        raise ModelFormatError(f"unknown roles {sorted(bad)}")
    sockets = dict(tok.split("=", 1) for tok in header.get("sockets", "").split())
    if not 1 <= len(layers) <= height:
        raise ModelFormatError(f"{mid}: expected up to {height} layers, got {len(layers)}")
    vox = np.full((size, height, size), "keep", dtype="<U6")
    for y, rows in enumerate(layers):
        if len(rows) != size or any(len(r) != size for r in rows):
            raise ModelFormatError(f"{mid}: layer {y} is not {size}x{size}")
        for z, row in enumerate(rows):
            for x, ch in enumerate(row):
                if ch not in legend:
                    raise ModelFormatError(f"{mid}: character {ch!r} not in legend")
                vox[x, y, z] = legend[ch]
    return CellModel(mid, size, height, sockets, vox)


def load_model(path) -> CellModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=4)
def _load_library(directory: str) -> dict[str, CellModel]:
    models = {}
    for path in sorted(Path(directory).glob("*.txt")):
        m = load_model(path)
        models[m.id] = m
    if not models:
        raise ModelFormatError(f"no models in {directory}")
    if len({(m.size, m.height) for m in models.values()}) != 1:
        raise ModelFormatError("all cell models must share one size")
    return models


def load_library(directory=None) -> dict[str, CellModel]:
    return _load_library(str(directory or MODEL_DIR))


# ------------------------------------------------------------------ layouts

@dataclass
class CellLayout:
    grid: np.ndarray  # int heights [i, j], 0 = no cell

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.int64)
        if (self.grid < 0).any():
            raise ValueError("negative cell height")
        _, n = ndimage.label(self.grid > 0)
        if n != 1:
            raise ValueError(f"layout must be one connected shape, got {n} parts")

    def height(self, i: int, j: int) -> int:
        gi, gj = self.grid.shape
        return int(self.grid[i, j]) if 0 <= i < gi and 0 <= j < gj else 0

    def neighbour_heights(self, i: int, j: int) -> list[int]:
        return [self.height(i + di, j + dj) for di, dj in (SIDE_STEP[s] for s in SIDES)]


def _connected(mask: np.ndarray) -> bool:
    _, n = ndimage.label(mask)
    return n == 1


def generate_layout(kind: str, shape: tuple[int, int], rng) -> CellLayout:
    """Random connected height grid in the style of ``kind``."""
    gi, gj = shape
    if kind == "church":
        if gi * gj == 1:
            return CellLayout(np.array([[3]]))
        grid = np.array([[rng.choice((2, 2, 3)) for _ in range(gj)] for _ in range(gi)])
        corners = [(0, 0), (gi - 1, 0), (0, gj - 1), (gi - 1, gj - 1)]
        ti, tj = rng.choice(sorted(set(corners)))
        grid[ti, tj] = CHURCH_TOWER_HEIGHT
        return CellLayout(grid)
    tall = 0.5 if kind == "commercial" else 0.35
    grid = np.array([[2 if rng.random() < tall else 1 for _ in range(gj)] for _ in range(gi)])
    if kind == "residential" and gi * gj > 1:
        cells = [(i, j) for i in range(gi) for j in range(gj)]
        rng.shuffle(cells)
        for i, j in cells:
            if rng.random() < 0.25:
                trial = grid.copy()
                trial[i, j] = 0
                if (trial > 0).any() and _connected(trial > 0):
                    grid = trial
    return CellLayout(grid)


@dataclass(frozen=True)
class CellChoice:
    cell: tuple[int, int]
    level: int
    faces: tuple[str, str, str, str]  # north, east, south, west
    roof: bool


def select_models(layout: CellLayout) -> list[CellChoice]:
    """Socket choice for every built storey, in (i, j, level) order."""
    out = []
    gi, gj = layout.grid.shape
    for i in range(gi):
        for j in range(gj):
            h = layout.height(i, j)
            if h == 0:
                continue
            nbrs = layout.neighbour_heights(i, j)
            top_nbr = max(nbrs)
            tower = h >= TOWER_MIN_HEIGHT and h > top_nbr
            for level in range(h):
                faces = []
                for nh in nbrs:
                    if nh > level:
                        faces.append("open")
                    elif tower and level >= top_nbr:
                        faces.append("tower-side")
                    else:
                        faces.append("wall")
                out.append(CellChoice((i, j), level, tuple(faces), level == h - 1))
    return out


# ------------------------------------------------------------------ building

def cell_origin(plot: Plot, shape, size: int) -> tuple[int, int]:
    gi, gj = shape
    r = plot.rect
    return r.x + max(0, (r.w - gi * size) // 2), r.z + max(0, (r.d - gj * size) // 2)


def layout_shape(plot: Plot, size: int) -> tuple[int, int]:
    return max(1, plot.rect.w // size), max(1, plot.rect.d // size)


def build_cell_structure(canvas: Canvas, plot: Plot, library: dict, rng, materials: Materials, *,
                         kind: str | None = None, layout: CellLayout | None = None,
                         furnish: bool = True) -> tuple[int, CellLayout]:
    """Stack models for every storey of a (generated) layout on the plot. Returns (blocks, layout)."""
    floor = library["floor"]
    S, H = floor.size, floor.height
    shape = layout_shape(plot, S)
    if min(plot.rect.w, plot.rect.d) < S:
        # too small for even one cell: shrink the cell models into the plot by clipping
        shape = (1, 1)
    if layout is None:
        layout = generate_layout(kind or plot.kind.value, shape, rng)
    ox, oz = cell_origin(plot, layout.grid.shape, S)
    base = plot.anchor_height + 1
    roles = {"floor": materials.floor, "planks": materials.planks, "frame": materials.frame,
             "glass": materials.glass, "stone": materials.stone, "roof": materials.roof, "air": "air"}
    limit = (plot.rect.x1, plot.rect.z1)
    placed = 0
    choices = select_models(layout)
    for ch in choices:
        i, j = ch.cell
        x0, z0, y0 = ox + i * S, oz + j * S, base + ch.level * H
        placed += _stamp(canvas, x0, y0, z0, floor.voxels, roles, limit)
        for k, tag in enumerate(ch.faces):
            model = library[FACE_MODEL[tag]].rotated(k)
            placed += _stamp(canvas, x0, y0, z0, model.voxels, roles, limit)
        if ch.roof:
            placed += _stamp(canvas, x0, y0 + H, z0, library["roof"].voxels, roles, limit)
    placed += _door(canvas, plot, choices, ox, oz, base, S, materials, limit)
    if furnish:
        placed += _furnish(canvas, choices, ox, oz, base, S, H, rng, limit)
    return placed, layout


def _stamp(canvas: Canvas, x0, y0, z0, vox: np.ndarray, roles: dict, limit) -> int:
    n = 0
    lx, lz = limit
    for role, name in roles.items():
        for dx, dy, dz in np.argwhere(vox == role):
            x, z = x0 + int(dx), z0 + int(dz)
            if x < lx and z < lz:
                n += canvas.set(x, y0 + int(dy), z, name)
    return n


def _face_center(x0: int, z0: int, side: str, S: int) -> tuple[int, int]:
    mid = S // 2
    return {"north": (x0 + mid, z0), "south": (x0 + mid, z0 + S - 1),
            "west": (x0, z0 + mid), "east": (x0 + S - 1, z0 + mid)}[side]


def _door(canvas, plot, choices, ox, oz, base, S, materials, limit) -> int:
    target = plot.road_access or (plot.rect.x + plot.rect.w // 2, plot.rect.z1)
    best = None
    for ch in choices:
        if ch.level:
            continue
        for side, tag in zip(SIDES, ch.faces):
            if tag == "open":
                continue
            x, z = _face_center(ox + ch.cell[0] * S, oz + ch.cell[1] * S, side, S)
            if x >= limit[0] or z >= limit[1]:
                continue
            d = abs(x - target[0]) + abs(z - target[1])
            if best is None or d < best[0]:
                best = (d, x, z)
    if best is None:
        return 0
    _, x, z = best
    return canvas.set(x, base + 1, z, materials.door) + canvas.set(x, base + 2, z, materials.door)


def _furnish(canvas, choices, ox, oz, base, S, H, rng, limit) -> int:
    """A few distinct furniture items per room, along the inner walls."""
    spots = [(x, z) for x in range(1, S - 1) for z in range(1, S - 1)
             if x in (1, S - 2) or z in (1, S - 2)]
    mid = S // 2
    spots = [s for s in spots if s[0] != mid and s[1] != mid]  # keep door axes clear
    n = 0
    for ch in choices:
        k = rng.randint(1, 3)
        items = rng.sample(FURNITURE, k)
        where = rng.sample(spots, k)
        x0, z0 = ox + ch.cell[0] * S, oz + ch.cell[1] * S
        for item, (dx, dz) in zip(items, where):
            x, z = x0 + dx, z0 + dz
            if x < limit[0] and z < limit[1]:
                n += canvas.set(x, base + ch.level * H + 1, z, item)
    return n
