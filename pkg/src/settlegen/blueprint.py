"""The in-memory city plan and its anytime step loop.

A :class:`Blueprint` owns the blueprint-related feature maps (road, plot,
wall, walled-in) and keeps them equal to the rasterization of its structured
data after every mutation. Agents only mutate it through the methods here.
"""

from __future__ import annotations

import copy
import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
from scipy import ndimage

from .analysis import NoBuildableLandError, TerrainMaps, flattest_spot, window_sum
from .geometry import Rect
from .rng import SplitMix64, derive_seed

log = logging.getLogger(__name__)

SEED_ROAD_LENGTH = 9
NO_ROAD_DISTANCE = 10**6


class BlueprintError(Exception):
    pass


class InvariantError(BlueprintError):
    pass


class BulldozePermissionError(BlueprintError, PermissionError):
    pass


class PlotKind(str, enum.Enum):
    CIVILIAN_GENERIC = "civilian_generic"
    RESIDENTIAL = "residential"
    COMMERCIAL = "commercial"
    INDUSTRIAL = "industrial"
    CHURCH = "church"
    WATCHTOWER = "watchtower"
    FARM = "farm"
    TREE = "tree"
    BOAT = "boat"
    FISHING_PLATFORM = "fishing_platform"
    DECORATION = "decoration"


CIVILIAN_TYPES = (PlotKind.RESIDENTIAL, PlotKind.COMMERCIAL, PlotKind.INDUSTRIAL)
WATER_KINDS = (PlotKind.BOAT, PlotKind.FISHING_PLATFORM)


@dataclass
class Plot:
    id: int
    kind: PlotKind
    rect: Rect
    anchor_height: int
    created_step: int
    road_access: tuple[int, int] | None = None
    variant: str | None = None
    agent: str = ""


@dataclass
class Road:
    id: int
    cells: list[tuple[int, int]]
    created_step: int
    bridge: bool = False


@dataclass
class RoadGraph:
    segments: list[Road] = field(default_factory=list)

    @property
    def bridges(self) -> list[Road]:
        return [r for r in self.segments if r.bridge]

    def cells(self) -> set[tuple[int, int]]:
        return {c for r in self.segments for c in r.cells}

    def by_id(self, rid: int) -> Road:
        for r in self.segments:
            if r.id == rid:
                return r
        raise KeyError(rid)


@dataclass
class WallBand:
    """Closed wall loop: ``path`` is the simple centre line, ``cells`` the widened band."""

    path: list[tuple[int, int]]
    cells: list[tuple[int, int]]
    width: int
    placed_step: int | None = None
    # index into ``path`` of the nearest centre-line cell, per band cell
    path_index: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Event:
    step: int
    agent: str
    action: str
    obj_id: int
    rect: Rect | None

    def to_line(self) -> str:
        return f"{self.step}\t{self.agent}\t{self.action}\t{self.obj_id}\t{self.rect or '-'}"

    @classmethod
    def from_line(cls, line: str) -> "Event":
        step, agent, action, obj, rect = line.rstrip("\n").split("\t")
        return cls(int(step), agent, action, int(obj), None if rect == "-" else Rect.parse(rect))


@dataclass
class AgentOutcome:
    agent: str
    status: str          # success | skip | inactive | error
    detail: str = ""


@dataclass
class StepReport:
    step: int
    outcomes: list[AgentOutcome]

    def count(self, status: str) -> int:
        return sum(o.status == status for o in self.outcomes)


class Blueprint:
    def __init__(self, terrain: TerrainMaps, seed: int = 0):
        self.terrain = terrain
        W, D = terrain.size
        self.size = (W, D)
        self.road_map = np.zeros((W, D), bool)
        self.plot_ids = np.full((W, D), -1, np.int64)
        self.wall_map = np.zeros((W, D), bool)
        self.walled_in_map = np.zeros((W, D), bool)
        self.plots: dict[int, Plot] = {}
        self.roads = RoadGraph()
        self.wall: WallBand | None = None
        self.step = 0
        self.seed = seed
        self.rng = SplitMix64(derive_seed(seed, "blueprint"))
        self.event_log: list[Event] = []
        self.extra_agents: list = []
        self.next_id = 1
        self.version = 0
        self._cache: dict = {}

    # ---------------------------------------------------------------- views
    @property
    def plot_map(self) -> np.ndarray:
        return self.plot_ids >= 0

    def plots_of(self, kind: PlotKind, variant: str | None = None) -> list[Plot]:
        return [p for p in self.plots.values()
                if p.kind == kind and (variant is None or p.variant == variant)]

    def in_area(self, x: int, z: int) -> bool:
        return 0 <= x < self.size[0] and 0 <= z < self.size[1]

    def _cached(self, key, fn):
        hit = self._cache.get(key)
        if hit is not None and hit[0] == self.version:
            return hit[1]
        val = fn()
        self._cache[key] = (self.version, val)
        return val

    def road_distance(self) -> np.ndarray:
        """Taxicab distance of every cell to the nearest road cell."""
        def compute():
            if not self.road_map.any():
                return np.full(self.size, NO_ROAD_DISTANCE, np.int64)
            return ndimage.distance_transform_cdt(~self.road_map, metric="taxicab").astype(np.int64)
        return self._cached("road_distance", compute)

    def slope_integral(self) -> np.ndarray:
        if "slope_ii" not in self._cache:
            s = self.terrain.slope
            ii = np.zeros((s.shape[0] + 1, s.shape[1] + 1))
            ii[1:, 1:] = s.cumsum(0).cumsum(1)
            self._cache["slope_ii"] = ii
        return self._cache["slope_ii"]

    def mean_slope(self, rect: Rect) -> float:
        ii = self.slope_integral()
        s = ii[rect.x1, rect.z1] - ii[rect.x, rect.z1] - ii[rect.x1, rect.z] + ii[rect.x, rect.z]
        return float(s) / rect.area

    def city_center(self) -> tuple[float, float]:
        cells = np.argwhere(self.road_map | self.plot_map)
        if len(cells) == 0:
            return (self.size[0] / 2, self.size[1] / 2)
        c = cells.mean(axis=0)
        return (float(c[0]), float(c[1]))

    # ------------------------------------------------------------ mutation
    def _log(self, agent: str, action: str, obj_id: int, rect: Rect | None) -> None:
        self.event_log.append(Event(self.step, agent, action, obj_id, rect))

    def _new_id(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def rect_is_free(self, rect: Rect, *, water_ok: bool = False) -> bool:
        W, D = self.size
        if rect.x < 0 or rect.z < 0 or rect.x1 > W or rect.z1 > D or rect.w < 1 or rect.d < 1:
            return False
        sl = rect.slices()
        if self.plot_map[sl].any() or self.road_map[sl].any() or self.wall_map[sl].any():
            return False
        return water_ok or not self.terrain.water[sl].any()

    def add_plot(self, kind: PlotKind, rect: Rect, agent: str, *, variant: str | None = None,
                 road_access=None, anchor_height: int | None = None) -> Plot:
        water_plot = kind in WATER_KINDS
        if not self.rect_is_free(rect, water_ok=water_plot):
            raise BlueprintError(f"{kind.value} plot {rect} collides")
        sl = rect.slices()
        if water_plot and not self.terrain.water[sl].all():
            raise BlueprintError(f"water plot {rect} not entirely on water")
        if anchor_height is None:
            anchor_height = int(np.median(self.terrain.height[sl]))
        plot = Plot(self._new_id(), PlotKind(kind), rect, int(anchor_height), self.step,
                    road_access, variant, agent)
        self.plots[plot.id] = plot
        self.plot_ids[sl] = plot.id
        self.version += 1
        self._log(agent, "place", plot.id, rect)
        return plot

    def convert_plot(self, plot_id: int, kind: PlotKind, agent: str) -> Plot:
        plot = self.plots[plot_id]
        if plot.kind != PlotKind.CIVILIAN_GENERIC or kind not in CIVILIAN_TYPES:
            raise BlueprintError(f"cannot convert {plot.kind.value} plot to {kind.value}")
        plot.kind = kind
        self._log(agent, "convert", plot_id, plot.rect)
        return plot

    def _check_road_cells(self, cells, bridge: bool) -> None:
        for x, z in cells:
            if not self.in_area(x, z):
                raise BlueprintError(f"road cell {(x, z)} outside area")
            if self.plot_ids[x, z] >= 0:
                raise BlueprintError(f"road cell {(x, z)} on a plot")
            if self.terrain.water[x, z] and not bridge:
                raise BlueprintError(f"non-bridge road cell {(x, z)} on water")
        for (ax, az), (bx, bz) in zip(cells, cells[1:]):
            if abs(ax - bx) + abs(az - bz) != 1:
                raise BlueprintError("road polyline is not 4-connected")

    def add_road(self, cells, agent: str, *, bridge: bool = False) -> Road:
        cells = [tuple(map(int, c)) for c in cells]
        if not cells:
            raise BlueprintError("empty road")
        self._check_road_cells(cells, bridge)
        if self.roads.segments and not any(self.road_map[c] for c in cells) and not any(
                self.road_map[nx, nz] for x, z in cells for nx, nz in _n4(x, z) if self.in_area(nx, nz)):
            raise BlueprintError("road does not touch the existing network")
        road = Road(self._new_id(), cells, self.step, bridge)
        self.roads.segments.append(road)
        for c in cells:
            self.road_map[c] = True
        self.version += 1
        self._log(agent, "bridge" if bridge else "road", road.id, _bbox(cells))
        return road

    def extend_road(self, road: Road, cells, agent: str, *, at_end: bool = True) -> None:
        cells = [tuple(map(int, c)) for c in cells]
        self._check_road_cells(cells, road.bridge)
        tip = road.cells[-1] if at_end else road.cells[0]
        if cells and abs(cells[0][0] - tip[0]) + abs(cells[0][1] - tip[1]) != 1:
            raise BlueprintError("extension does not continue from the road end")
        if at_end:
            road.cells.extend(cells)
        else:
            road.cells[:0] = cells[::-1]
        for c in cells:
            self.road_map[c] = True
        self.version += 1
        self._log(agent, "extend", road.id, _bbox(cells))

    def place_wall(self, band: WallBand, agent: str) -> None:
        if self.wall is not None:
            raise BlueprintError("wall already placed")
        band.placed_step = self.step
        mask = np.zeros(self.size, bool)
        for c in band.cells:
            mask[c] = True
        if (mask & self.plot_map).any():
            raise BlueprintError("wall band overlaps plots")
        self.wall = band
        self.wall_map = mask
        self.walled_in_map = enclosed_interior(mask)
        self.version += 1
        self._log(agent, "wall", 0, _bbox(band.cells))

    def _remove_plot(self, pid: int, agent: str) -> None:
        plot = self.plots.pop(pid)
        self.plot_ids[self.plot_ids == pid] = -1
        self.version += 1
        self._log(agent, "remove", pid, plot.rect)

    def bulldoze(self, rect: Rect, agent) -> list[int]:
        """Remove every plot intersecting ``rect``. Roads and the wall are never touched."""
        if not getattr(agent, "critically_important", False):
            raise BulldozePermissionError(f"agent {getattr(agent, 'name', agent)!r} may not bulldoze")
        name = getattr(agent, "name", str(agent))
        clipped = rect.clipped(*self.size)
        ids = sorted({int(i) for i in np.unique(self.plot_ids[clipped.slices()]) if i >= 0})
        for pid in ids:
            self._remove_plot(pid, name)
        return ids

    # ---------------------------------------------------------- consistency
    def rasterize(self) -> dict[str, np.ndarray]:
        """Recompute every blueprint map from the structured data."""
        W, D = self.size
        road = np.zeros((W, D), bool)
        for r in self.roads.segments:
            for c in r.cells:
                road[c] = True
        plot = np.zeros((W, D), bool)
        for p in self.plots.values():
            plot[p.rect.slices()] = True
        wall = np.zeros((W, D), bool)
        if self.wall is not None:
            for c in self.wall.cells:
                wall[c] = True
        walled = enclosed_interior(wall) if self.wall is not None else np.zeros((W, D), bool)
        return {"road_map": road, "plot_map": plot, "wall_map": wall, "walled_in_map": walled}

    def check_invariants(self) -> None:
        fresh = self.rasterize()
        for name, arr in fresh.items():
            if not np.array_equal(arr, getattr(self, name)):
                raise InvariantError(f"{name} drifted from structured data")
        count = np.zeros(self.size, np.int64)
        for p in self.plots.values():
            if p.created_step > self.step:
                raise InvariantError(f"plot {p.id} created in the future")
            count[p.rect.slices()] += 1
            expect = p.id
            if not (self.plot_ids[p.rect.slices()] == expect).all():
                raise InvariantError(f"plot {p.id} id raster mismatch")
            sl = p.rect.slices()
            if p.kind in WATER_KINDS:
                if not self.terrain.water[sl].all():
                    raise InvariantError(f"water plot {p.id} touches land")
            elif self.terrain.water[sl].any():
                raise InvariantError(f"land plot {p.id} touches water")
        if (count > 1).any():
            raise InvariantError("plots overlap")
        plot = count > 0
        if (plot & self.road_map).any() or (plot & self.wall_map).any():
            raise InvariantError("plot overlaps road or wall")
        if self.road_map.any():
            from .pathfind import is_4connected
            if not is_4connected(self.road_map):
                raise InvariantError("road network not 4-connected")

    def copy(self) -> "Blueprint":
        return copy.deepcopy(self)

    # -------------------------------------------------------------- exports
    def write_event_log(self, path) -> None:
        Path(path).write_text("".join(e.to_line() + "\n" for e in self.event_log), encoding="utf-8")

    def snapshot(self, path) -> Path:
        return write_ppm(path, render(self))


def _n4(x, z):
    return ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1))


def _bbox(cells) -> Rect:
    xs = [c[0] for c in cells]
    zs = [c[1] for c in cells]
    return Rect(min(xs), min(zs), max(xs) - min(xs) + 1, max(zs) - min(zs) + 1)


def enclosed_interior(wall: np.ndarray) -> np.ndarray:
    """Cells not reachable from the area border without crossing the wall (4-connected)."""
    free = ~wall
    labels, _ = ndimage.label(free)
    border = np.unique(np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]))
    outside = np.isin(labels, border[border > 0])
    return free & ~outside


# ------------------------------------------------------------------ lifecycle

def _crop_maps(t: TerrainMaps, m: int) -> TerrainMaps:
    sl = (slice(m, t.size[0] - m), slice(m, t.size[1] - m))
    return TerrainMaps(t.area, t.height[sl], t.slope[sl], t.water[sl], t.structure[sl], t.tree[sl],
                       t.water_surface[sl])


def init_blueprint(terrain: TerrainMaps, seed: int, *, road_length: int = SEED_ROAD_LENGTH,
                   window: int | None = None, edge_margin: int | None = None) -> Blueprint:
    """Blueprint at step 0 holding one straight seed road on the flattest spot.

    The spot is searched away from a border strip of ``edge_margin`` cells
    (default: an eighth of the shorter side) so the town has room to grow and
    be walled; if that interior holds no buildable window the whole area is used.
    """
    window = window or max(road_length, 1) | 1
    W, D = terrain.size
    if edge_margin is None:
        edge_margin = min(W, D) // 8
    cx = cz = None
    if edge_margin > 0 and min(W, D) - 2 * edge_margin >= window:
        inner = _crop_maps(terrain, edge_margin)
        try:
            cx, cz = flattest_spot(inner, window)
            cx, cz = cx + edge_margin, cz + edge_margin
        except NoBuildableLandError:
            pass
    if cx is None:
        cx, cz = flattest_spot(terrain, window)
    bp = Blueprint(terrain, seed)
    half = road_length // 2
    h = terrain.height.astype(np.float64)
    # the flatter axis has the smaller summed height change across the window
    ax = np.abs(np.diff(h[cx - half:cx + half + 1, cz])).sum()
    az = np.abs(np.diff(h[cx, cz - half:cz + half + 1])).sum()
    if ax <= az:
        cells = [(x, cz) for x in range(cx - half, cx - half + road_length)]
    else:
        cells = [(cx, z) for z in range(cz - half, cz - half + road_length)]
    bp.add_road(cells, "seed")
    return bp


def ordered_agents(roster, extras) -> list:
    """Roster order, with the dynamic agents slotted in after the leading road agents."""
    roster = list(roster)
    k = 0
    while k < len(roster) and getattr(roster[k], "is_road_agent", False):
        k += 1
    return roster[:k] + list(extras) + roster[k:]


def step(bp: Blueprint, roster) -> StepReport:
    """Run one tick: every active agent gets exactly one action, in roster order."""
    t = bp.step
    outcomes = []
    for agent in ordered_agents(roster, bp.extra_agents):
        if not agent.is_active(bp, t):
            outcomes.append(AgentOutcome(agent.name, "inactive"))
            continue
        try:
            ok = agent.act(bp)
        except Exception as exc:  # agent isolation: a crash is a skipped turn
            log.warning("agent %s failed at step %d: %s", agent.name, t, exc)
            outcomes.append(AgentOutcome(agent.name, "error", f"{type(exc).__name__}: {exc}"))
            continue
        outcomes.append(AgentOutcome(agent.name, "success" if ok else "skip"))
    bp.extra_agents = [a for a in bp.extra_agents if not getattr(a, "retired", False)]
    bp.step += 1
    return StepReport(t, outcomes)


def run(bp: Blueprint, roster, n_steps: int, *,
        on_step: Callable[[Blueprint, StepReport], None] | None = None) -> Blueprint:
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    for _ in range(n_steps):
        report = step(bp, roster)
        if on_step is not None:
            on_step(bp, report)
    return bp


# ------------------------------------------------------- candidate placement

@dataclass(frozen=True)
class ConstraintSet:
    footprint: tuple[int, int]
    max_slope: float | None = None
    water_only: bool = False
    inside_wall_only: bool = False
    outside_wall_only: bool = False
    max_distance_from_roads: int | None = None
    own_kind: tuple | None = None        # (kind, variant)
    own_kind_min: int | None = None      # minimum rect gap to plots of own kind
    own_kind_max: int | None = None      # maximum rect gap to the nearest own-kind plot
    ignore_plots: bool = False
    avoid: np.ndarray | None = field(default=None, compare=False)  # extra blocked cells

    def __post_init__(self):
        if self.inside_wall_only and self.outside_wall_only:
            raise ValueError("inside_wall_only and outside_wall_only are exclusive")
        if min(self.footprint) < 1:
            raise ValueError("footprint must be at least 1x1")


class Candidates:
    """Valid anchors for one footprint; indexable as :class:`Rect`."""

    def __init__(self, anchors: np.ndarray, footprint: tuple[int, int]):
        self.anchors = anchors
        self.footprint = footprint

    def __len__(self) -> int:
        return len(self.anchors)

    def __getitem__(self, i: int) -> Rect:
        x, z = self.anchors[i]
        return Rect(int(x), int(z), *self.footprint)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def _window_extreme(arr: np.ndarray, w: int, d: int, fn) -> np.ndarray:
    from numpy.lib.stride_tricks import sliding_window_view
    a = fn(sliding_window_view(arr, w, axis=0), axis=-1)
    return fn(sliding_window_view(a, d, axis=1), axis=-1)


def find_candidates(bp: Blueprint, c: ConstraintSet) -> Candidates:
    """Every anchor whose footprint satisfies all constraints of ``c``."""
    W, D = bp.size
    w, d = c.footprint
    if w > W or d > D:
        return Candidates(np.zeros((0, 2), np.int64), (w, d))
    t = bp.terrain
    blocked = bp.road_map | bp.wall_map | t.structure
    if not c.ignore_plots:
        blocked = blocked | bp.plot_map
    if c.avoid is not None:
        blocked = blocked | c.avoid
    blocked = blocked | (~t.water if c.water_only else t.water)
    ok = window_sum(blocked, w, d) == 0
    if c.inside_wall_only:
        ok &= window_sum(bp.walled_in_map, w, d) == w * d
    if c.outside_wall_only:
        ok &= window_sum(bp.walled_in_map, w, d) == 0
    if c.max_slope is not None:
        ok &= _window_extreme(t.slope, w, d, np.max) <= c.max_slope
    if c.max_distance_from_roads is not None:
        ok &= _window_extreme(bp.road_distance(), w, d, np.min) <= c.max_distance_from_roads
    if c.own_kind is not None and (c.own_kind_min or c.own_kind_max is not None):
        own = bp.plots_of(*c.own_kind)
        if c.own_kind_min:
            near = np.zeros((W, D), bool)
            for p in own:
                near[p.rect.expanded(c.own_kind_min - 1).clipped(W, D).slices()] = True
            ok &= window_sum(near, w, d) == 0
        if c.own_kind_max is not None and own:
            near = np.zeros((W, D), bool)
            for p in own:
                near[p.rect.expanded(c.own_kind_max).clipped(W, D).slices()] = True
            ok &= window_sum(near, w, d) > 0
    return Candidates(np.argwhere(ok), (w, d))


def select_placement(bp: Blueprint, candidates, fitness: Callable[[Blueprint, Rect], float],
                     sample_size: int):
    """Evaluate a random sample of ``candidates`` and return the fittest (first drawn wins ties)."""
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    n = len(candidates)
    if n == 0:
        return None
    drawn = bp.rng.sample(range(n), min(sample_size, n))
    best, best_score = None, -np.inf
    for i in drawn:
        cand = candidates[i]
        score = fitness(bp, cand)
        if best is None or score > best_score:
            best, best_score = cand, score
    return best


def nearest_road_cell(bp: Blueprint, rect: Rect, max_distance: int | None = None):
    """Closest road cell to ``rect`` (ties: smallest x, then z), or ``None``."""
    if not bp.road_map.any():
        return None
    W, D = bp.size
    limit = max_distance if max_distance is not None else max(W, D)
    for r in range(1, limit + 1):
        box = rect.expanded(r).clipped(W, D)
        sub = bp.road_map[box.slices()]
        if sub.any():
            best = None
            for ox, oz in np.argwhere(sub):
                cell = (box.x + int(ox), box.z + int(oz))
                dist = max(rect.x - cell[0], cell[0] - (rect.x1 - 1), 0) + \
                    max(rect.z - cell[1], cell[1] - (rect.z1 - 1), 0)
                if best is None or dist < best[0]:
                    best = (dist, cell)
            return best[1]
    return None


# ---------------------------------------------------------------- rendering

TERRAIN_GRAY = (100, 250)
ROAD_RGB = (60, 60, 60)
WATER_RGB = (40, 90, 210)
WALL_RGB = (0, 0, 0)
PLOT_RGB = {
    PlotKind.CIVILIAN_GENERIC: (230, 200, 120),
    PlotKind.RESIDENTIAL: (230, 150, 60),
    PlotKind.COMMERCIAL: (60, 130, 230),
    PlotKind.INDUSTRIAL: (170, 60, 170),
    PlotKind.CHURCH: (240, 240, 60),
    PlotKind.WATCHTOWER: (200, 40, 40),
    PlotKind.FARM: (160, 210, 60),
    PlotKind.TREE: (20, 130, 40),
    PlotKind.BOAT: (140, 90, 40),
    PlotKind.FISHING_PLATFORM: (200, 140, 90),
    PlotKind.DECORATION: (250, 120, 180),
}


def render(bp: Blueprint) -> np.ndarray:
    """RGB raster ``[x, z, 3]`` of the blueprint over its terrain."""
    t = bp.terrain
    h = t.height.astype(np.float64)
    lo, hi = h.min(), h.max()
    g0, g1 = TERRAIN_GRAY
    gray = np.full(h.shape, (g0 + g1) / 2) if hi == lo else g0 + (g1 - g0) * (h - lo) / (hi - lo)
    img = np.repeat(np.rint(gray).astype(np.uint8)[..., None], 3, axis=2)
    img[t.water] = WATER_RGB
    for p in bp.plots.values():
        img[p.rect.slices()] = PLOT_RGB[p.kind]
    img[bp.road_map] = ROAD_RGB
    img[bp.wall_map & ~bp.road_map] = WALL_RGB
    return img


def non_terrain_pixels(bp: Blueprint) -> int:
    return int((bp.road_map | bp.plot_map | bp.wall_map).sum())


def write_ppm(path, img: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.ascontiguousarray(img.transpose(1, 0, 2).astype(np.uint8))
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (rows.shape[1], rows.shape[0]))
        f.write(rows.tobytes())
    return path


def read_ppm(path) -> np.ndarray:
    import re
    data = Path(path).read_bytes()
    m = re.match(rb"P6\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise ValueError("not a binary PPM")
    w, h = int(m.group(1)), int(m.group(2))
    arr = np.frombuffer(data, np.uint8, count=w * h * 3, offset=m.end()).reshape(h, w, 3)
    return arr.transpose(1, 0, 2).copy()


def load_event_log(path) -> list[Event]:
    return [Event.from_line(line) for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip()]


def removal_violations(bp: Blueprint, roster) -> list[Event]:
    """Removal events logged by agents that are not flagged critically important."""
    critical = {a.name for a in list(roster) + list(bp.extra_agents) if a.critically_important}
    return [e for e in bp.event_log if e.action == "remove" and e.agent not in critical]


def events_by_action(events: Iterable[Event], action: str) -> list[Event]:
    return [e for e in events if e.action == action]
