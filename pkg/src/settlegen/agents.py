"""Planning agents: declarative plot agents plus the road, wall and church specialists.

An :class:`AgentSpec` is an immutable policy. The step loop asks it whether
it is active and then calls :meth:`AgentSpec.act`, which dispatches on
``behavior`` to one of the ``*_act`` functions below. Each act either mutates
the blueprint and returns ``True`` or leaves it untouched and returns ``False``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import ndimage

from .blueprint import (Blueprint, BlueprintError, ConstraintSet, PlotKind, WallBand,
                        enclosed_interior, find_candidates, nearest_road_cell, select_placement)
from .geometry import Rect, convex_hull
from .pathfind import astar, bfs_distance

INF = math.inf
DEFAULT_WALL_STEP = 20
ROAD_STEP_WEIGHT = 4.0
ROAD_MAX_STEP = 2
WALL_EDGE_MARGIN = 6


@dataclass(frozen=True)
class OwnKindDistance:
    """Either a hard gap cut-off (min/max, in cells) or a signed weight on distance."""

    min_cells: int | None = None
    max_cells: int | None = None
    weight: float = 0.0


@dataclass(frozen=True)
class AgentSpec:
    name: str
    behavior: str = "plot"
    kind: str | None = None
    variant: str | None = None
    activation_step: int = 0
    activation_interval: int = 1
    inside_wall_only: bool = False
    outside_wall_only: bool = False
    max_plots: int | None = None
    max_distance_from_roads: int | None = None
    water_only: bool = False
    critically_important: bool = False
    own_kind_distance: OwnKindDistance | None = None
    max_slope: float | None = None
    slope_weight: float = 1.0
    custom_fitness: str | None = None
    footprint: tuple[int, int] = (3, 3)
    footprint_max: tuple[int, int] | None = None
    sample_size: int = 30
    params: dict = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        if self.activation_interval < 1:
            raise ValueError(f"{self.name}: activation_interval must be >= 1")
        if self.inside_wall_only and self.outside_wall_only:
            raise ValueError(f"{self.name}: inside_wall_only and outside_wall_only are exclusive")
        if self.behavior not in BEHAVIORS:
            raise ValueError(f"{self.name}: unknown behavior {self.behavior!r}")
        if self.behavior in PLOT_BEHAVIORS:
            PlotKind(self.kind)

    @property
    def is_road_agent(self) -> bool:
        return self.behavior in ROAD_BEHAVIORS

    def live_plots(self, bp: Blueprint) -> int:
        if self.kind is None:
            return 0
        return len(bp.plots_of(PlotKind(self.kind), self.variant))

    def is_active(self, bp: Blueprint, t: int) -> bool:
        if t < self.activation_step or (t - self.activation_step) % self.activation_interval:
            return False
        return self.max_plots is None or self.live_plots(bp) < self.max_plots

    def act(self, bp: Blueprint) -> bool:
        return BEHAVIORS[self.behavior](self, bp)

    # --------------------------------------------------------- config I/O
    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["footprint"] = list(self.footprint)
        d["footprint_max"] = list(self.footprint_max) if self.footprint_max else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AgentSpec":
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown agent fields: {sorted(unknown)}")
        if d.get("own_kind_distance") is not None:
            d["own_kind_distance"] = OwnKindDistance(**d["own_kind_distance"])
        if d.get("footprint") is not None:
            d["footprint"] = tuple(d["footprint"])
        if d.get("footprint_max") is not None:
            d["footprint_max"] = tuple(d["footprint_max"])
        return cls(**d)


def save_roster(roster, path) -> None:
    Path(path).write_text(json.dumps({"agents": [a.to_dict() for a in roster]}, indent=2) + "\n",
                          encoding="utf-8")


def load_roster(path) -> list[AgentSpec]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [AgentSpec.from_dict(a) for a in data["agents"]]


# ------------------------------------------------------------------ fitness

def _diag(bp: Blueprint) -> float:
    return math.hypot(*bp.size)


def _min_center_distance(rect: Rect, others) -> float | None:
    cx, cz = rect.center
    best = None
    for p in others:
        ox, oz = p.rect.center
        dist = math.hypot(cx - ox, cz - oz)
        if best is None or dist < best:
            best = dist
    return best


def watchtower_fitness(bp: Blueprint, candidate: Rect, alpha: float = 1.0, beta: float = 1.0) -> float:
    """High terrain and distance from the other watchtowers, both normalized to [0, 1]."""
    h = bp.terrain.height
    lo, hi = float(h.min()), float(h.max())
    mean_h = float(h[candidate.slices()].mean())
    height_term = 0.0 if hi == lo else (mean_h - lo) / (hi - lo)
    dist = _min_center_distance(candidate, bp.plots_of(PlotKind.WATCHTOWER))
    dist_term = 1.0 if dist is None else min(dist / _diag(bp), 1.0)
    return alpha * height_term + beta * dist_term


def central_fitness(bp: Blueprint, rect: Rect) -> float:
    cx, cz = bp.city_center()
    rx, rz = rect.center
    return -math.hypot(rx - cx, rz - cz) / _diag(bp)


def shore_fitness(bp: Blueprint, rect: Rect) -> float:
    W, D = bp.size
    ring = rect.expanded(2).clipped(W, D)
    land = ~bp.terrain.water[ring.slices()]
    return float(land.sum()) / max(ring.area - rect.area, 1)


def road_proximity_fitness(bp: Blueprint, rect: Rect) -> float:
    return -float(bp.road_distance()[rect.slices()].min()) / 16.0


CUSTOM_FITNESS = {
    "watchtower": watchtower_fitness,
    "central": central_fitness,
    "shore": shore_fitness,
    "road_proximity": road_proximity_fitness,
}


def plot_fitness(spec: AgentSpec, bp: Blueprint, rect: Rect) -> float:
    score = -spec.slope_weight * bp.mean_slope(rect)
    okd = spec.own_kind_distance
    if okd is not None and okd.weight:
        dist = _min_center_distance(rect, bp.plots_of(PlotKind(spec.kind), spec.variant))
        score += okd.weight * (1.0 if dist is None else min(dist / _diag(bp), 1.0))
    if spec.custom_fitness:
        score += CUSTOM_FITNESS[spec.custom_fitness](bp, rect)
    return score


# --------------------------------------------------------------- plot agents

def _footprint(spec: AgentSpec, bp: Blueprint) -> tuple[int, int]:
    if spec.footprint_max is None:
        return spec.footprint
    (w0, d0), (w1, d1) = spec.footprint, spec.footprint_max
    return bp.rng.randint(w0, w1), bp.rng.randint(d0, d1)


def constraints_for(spec: AgentSpec, footprint, **overrides) -> ConstraintSet:
    okd = spec.own_kind_distance
    c = ConstraintSet(
        footprint=tuple(footprint),
        max_slope=spec.max_slope,
        water_only=spec.water_only,
        inside_wall_only=spec.inside_wall_only,
        outside_wall_only=spec.outside_wall_only,
        max_distance_from_roads=spec.max_distance_from_roads,
        own_kind=(PlotKind(spec.kind), spec.variant) if okd else None,
        own_kind_min=okd.min_cells if okd else None,
        own_kind_max=okd.max_cells if okd else None,
    )
    return replace(c, **overrides) if overrides else c


def _place(spec: AgentSpec, bp: Blueprint, rect: Rect) -> None:
    access = None
    if spec.max_distance_from_roads is not None:
        access = nearest_road_cell(bp, rect, spec.max_distance_from_roads)
    anchor = None
    if spec.water_only:
        anchor = int(np.max(bp.terrain.water_surface[rect.slices()]))
    bp.add_plot(PlotKind(spec.kind), rect, spec.name, variant=spec.variant,
                road_access=access, anchor_height=anchor)


def tip_reserve(bp: Blueprint, reach: int = 6, half_width: int = 2) -> np.ndarray | None:
    """Cells just ahead of every open road end, kept clear so roads can keep growing."""
    W, D = bp.size
    mask = None
    for agent in bp.extra_agents:
        if not isinstance(agent, RoadExtendAgent) or agent.retired:
            continue
        road = bp.roads.by_id(agent.road_id)
        if len(road.cells) < 2:
            continue
        for end in agent.fails:
            tip, prev = (road.cells[-1], road.cells[-2]) if end == "end" else (road.cells[0], road.cells[1])
            dx, dz = tip[0] - prev[0], tip[1] - prev[1]
            ax, az = tip[0] + dx, tip[1] + dz
            bx, bz = tip[0] + dx * reach, tip[1] + dz * reach
            x0, x1 = sorted((ax, bx))
            z0, z1 = sorted((az, bz))
            if dx == 0:
                x0, x1 = x0 - half_width, x1 + half_width
            else:
                z0, z1 = z0 - half_width, z1 + half_width
            box = Rect(x0, z0, x1 - x0 + 1, z1 - z0 + 1).clipped(W, D)
            if box.area:
                if mask is None:
                    mask = np.zeros((W, D), bool)
                mask[box.slices()] = True
    return mask


def edge_reserve(bp: Blueprint, margin: int = WALL_EDGE_MARGIN) -> np.ndarray | None:
    """Border strip kept free until the wall stands, so the wall can pass outside every plot."""
    if bp.wall is not None or margin <= 0:
        return None
    mask = np.zeros(bp.size, bool)
    mask[:margin, :] = mask[-margin:, :] = True
    mask[:, :margin] = mask[:, -margin:] = True
    return mask


def _avoid(bp: Blueprint) -> np.ndarray | None:
    masks = [m for m in (tip_reserve(bp), edge_reserve(bp)) if m is not None]
    if not masks:
        return None
    return np.logical_or.reduce(masks)


def generic_plot_agent_act(spec: AgentSpec, bp: Blueprint) -> bool:
    fp = _footprint(spec, bp)
    cands = find_candidates(bp, constraints_for(spec, fp, avoid=_avoid(bp)))
    best = select_placement(bp, cands, lambda b, r: plot_fitness(spec, b, r), spec.sample_size)
    if best is None:
        return False
    _place(spec, bp, best)
    return True


def church_agent_act(spec: AgentSpec, bp: Blueprint) -> bool:
    """Central church; clears other plots out of the way when nothing fits."""
    if bp.plots_of(PlotKind(spec.kind)):
        return False
    fp = _footprint(spec, bp)
    if bp.wall is not None:
        c = constraints_for(spec, fp, inside_wall_only=True, max_distance_from_roads=None)
    else:
        c = constraints_for(spec, fp, avoid=edge_reserve(bp))
    fitness = lambda b, r: plot_fitness(spec, b, r)  # noqa: E731
    best = select_placement(bp, find_candidates(bp, c), fitness, spec.sample_size)
    if best is None:
        if not spec.critically_important:
            return False
        best = select_placement(bp, find_candidates(bp, replace(c, ignore_plots=True)),
                                fitness, spec.sample_size)
        if best is None:
            return False
        bp.bulldoze(best, spec)
    _place(spec, bp, best)
    return True


# -------------------------------------------------------------------- roads

def road_cost(bp: Blueprint, *, spacing: int = 0, near=None, near_radius: int = 3,
              allow_roads: bool = False, wall_cost: float = 4.0) -> np.ndarray:
    """Entry cost for new road cells (inf where a road may not go).

    Cells within ``spacing`` of an existing road are blocked unless they lie
    within ``near_radius`` (Chebyshev) of ``near``.
    """
    t = bp.terrain
    cost = np.ones(bp.size)
    cost[bp.wall_map] = wall_cost
    blocked = bp.plot_map | t.water | t.structure
    if not allow_roads:
        blocked = blocked | bp.road_map
    if spacing > 0:
        crowded = (bp.road_distance() <= spacing) & ~bp.road_map
        if near is not None:
            x, z = near
            keep = np.zeros(bp.size, bool)
            keep[max(0, x - near_radius):x + near_radius + 1,
                 max(0, z - near_radius):z + near_radius + 1] = True
            crowded &= ~keep
        blocked = blocked | crowded
    cost[blocked] = INF
    return cost


def _road_path(bp: Blueprint, cost, start, goal, max_len: int):
    return astar(cost, start, goal, height=bp.terrain.height, step_weight=ROAD_STEP_WEIGHT,
                 max_step=ROAD_MAX_STEP, max_cost=max_len * (1 + ROAD_STEP_WEIGHT))


def _clamp(bp: Blueprint, x: int, z: int, margin: int = 2) -> tuple[int, int]:
    W, D = bp.size
    return min(max(x, margin), W - 1 - margin), min(max(z, margin), D - 1 - margin)


class RoadExtendAgent:
    """Grows one particular road from its open ends; retires once every end is stuck."""

    critically_important = False

    def __init__(self, road_id: int, ends=("end",), *, activation_step: int = 0,
                 activation_interval: int = 1, step_length=(6, 12), spacing: int = 2,
                 target_spacing: int = 6, max_fails: int = 3):
        self.road_id = road_id
        self.name = f"road_extend_{road_id}"
        self.fails = {e: 0 for e in ends}
        self.activation_step = activation_step
        self.activation_interval = activation_interval
        self.step_length = tuple(step_length)
        self.spacing = spacing
        self.target_spacing = target_spacing
        self.max_fails = max_fails
        self.retired = False

    def is_active(self, bp: Blueprint, t: int) -> bool:
        return (not self.retired and t >= self.activation_step
                and (t - self.activation_step) % self.activation_interval == 0)

    def act(self, bp: Blueprint) -> bool:
        road = bp.roads.by_id(self.road_id)
        ends = sorted(self.fails)
        if not ends or len(road.cells) < 2:
            self.retired = True
            return False
        end = bp.rng.choice(ends)
        ok = self._try(bp, road, end == "end")
        if ok:
            self.fails[end] = 0
        else:
            self.fails[end] += 1
            if self.fails[end] >= self.max_fails:
                del self.fails[end]
                if not self.fails:
                    self.retired = True
        return ok

    def _try(self, bp: Blueprint, road, at_end: bool) -> bool:
        tip, prev = (road.cells[-1], road.cells[-2]) if at_end else (road.cells[0], road.cells[1])
        dx, dz = tip[0] - prev[0], tip[1] - prev[1]
        length = bp.rng.randint(*self.step_length)
        jitter = bp.rng.randint(-(length // 3), length // 3)
        tx, tz = _clamp(bp, tip[0] + dx * length - dz * jitter, tip[1] + dz * length + dx * jitter)
        if abs(tx - tip[0]) + abs(tz - tip[1]) < self.step_length[0] // 2:
            return False
        if bp.road_distance()[tx, tz] < self.target_spacing:
            return False
        cost = road_cost(bp, spacing=self.spacing, near=tip)
        path = _road_path(bp, cost, tip, (tx, tz), 2 * length)
        if path is None or len(path) < 2:
            return False
        bp.extend_road(road, path[1:], self.name, at_end=at_end)
        return True


def _register_extender(bp: Blueprint, road, ends, spec: AgentSpec | None = None) -> None:
    p = spec.params if spec is not None else {}
    bp.extra_agents.append(RoadExtendAgent(
        road.id, ends, activation_step=bp.step + 1,
        activation_interval=p.get("extend_interval", 1),
        step_length=p.get("extend_length", (6, 12)),
        spacing=p.get("extend_spacing", 2),
        target_spacing=p.get("extend_target_spacing", 6),
        max_fails=p.get("extend_max_fails", 3)))


def _straight_dir(road, i: int):
    """Axis of the polyline around index i, or None at corners and ends."""
    if i <= 0 or i >= len(road.cells) - 1:
        return None
    (ax, az), (bx, bz) = road.cells[i - 1], road.cells[i + 1]
    if az == bz and abs(ax - bx) == 2:
        return (1, 0)
    if ax == bx and abs(az - bz) == 2:
        return (0, 1)
    return None


def road_split_act(spec: AgentSpec, bp: Blueprint) -> bool:
    """Grow a perpendicular branch off a random road cell."""
    p = spec.params
    min_len = p.get("min_branch_length", 5)
    max_len = p.get("max_branch_length", 18)
    spacing = p.get("spacing", 2)
    target_spacing = p.get("target_spacing", 7)
    roads = [r for r in bp.roads.segments if not r.bridge and len(r.cells) >= 2 * min_len]
    if not roads:
        return False
    road = bp.rng.choice(roads)
    i = bp.rng.randrange(min_len, len(road.cells) - min_len + 1) if len(road.cells) > 2 * min_len \
        else len(road.cells) // 2
    axis = _straight_dir(road, i)
    if axis is None:
        return False
    cell = road.cells[i]
    perp = (axis[1], axis[0])
    sides = [1, -1]
    bp.rng.shuffle(sides)
    for s in sides:
        dx, dz = perp[0] * s, perp[1] * s
        first = (cell[0] + dx, cell[1] + dz)
        if not bp.in_area(*first):
            continue
        length = bp.rng.randint(min_len * 2, max_len)
        target = _clamp(bp, cell[0] + dx * length, cell[1] + dz * length)
        if bp.road_distance()[target] < target_spacing:
            continue
        cost = road_cost(bp, spacing=spacing, near=cell)
        if not math.isfinite(cost[first]):
            continue
        path = _road_path(bp, cost, first, target, 2 * length)
        if path is None or len(path) < min_len:
            continue
        road_new = bp.add_road(path, spec.name)
        _register_extender(bp, road_new, ("end",), spec)
        return True
    return False


def road_connect_act(spec: AgentSpec, bp: Blueprint) -> bool:
    """Add a shortcut between two road cells when it cuts travel distance enough."""
    p = spec.params
    n_pairs = p.get("n_pairs", 3)
    threshold = p.get("threshold", 1.5)
    min_sep = p.get("min_separation", 10)
    cells = sorted(map(tuple, np.argwhere(bp.road_map).tolist()))
    if len(cells) < 2:
        return False
    cost = road_cost(bp, allow_roads=True)
    best = None
    for _ in range(n_pairs):
        a, b = bp.rng.sample(cells, 2)
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) < min_sep:
            continue
        net = bfs_distance(bp.road_map, a, b)
        if net is None:
            continue
        limit = net / threshold
        path = astar(cost, a, b, height=bp.terrain.height, step_weight=ROAD_STEP_WEIGHT,
                     max_step=ROAD_MAX_STEP, max_cost=limit * (1 + ROAD_STEP_WEIGHT))
        if path is None or len(path) < 3:
            continue
        new_len = len(path) - 1
        ratio = net / new_len
        if ratio >= threshold and (best is None or ratio > best[0]):
            best = (ratio, path)
    if best is None:
        return False
    interior = [c for c in best[1][1:-1]]
    if all(bp.road_map[c] for c in interior):
        return False
    bp.add_road(interior, spec.name)
    return True


def bridge_act(spec: AgentSpec, bp: Blueprint) -> bool:
    """Bridge from the road network to the nearest opposite shore."""
    p = spec.params
    max_len = p.get("max_length", 24)
    approach = p.get("approach", 4)
    landing_spacing = p.get("landing_spacing", 8)
    t = bp.terrain
    if not t.water.any() or not bp.road_map.any():
        return False
    water_dist = ndimage.distance_transform_cdt(~t.water, metric="taxicab")
    near = bp.road_map & (water_dist <= approach + 1)
    blocked = bp.plot_map | bp.wall_map | t.structure
    W, D = bp.size
    road_dist = bp.road_distance()
    best = None
    for x, z in sorted(map(tuple, np.argwhere(near).tolist())):
        for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            k, land, span = 1, 0, 0
            cells = []
            while True:
                cx, cz = x + dx * k, z + dz * k
                if not (0 <= cx < W and 0 <= cz < D) or blocked[cx, cz]:
                    cells = None
                    break
                if t.water[cx, cz]:
                    span += 1
                    if span > max_len:
                        cells = None
                        break
                elif span == 0:
                    land += 1
                    if land > approach or bp.road_map[cx, cz]:
                        cells = None
                        break
                else:
                    cells.append((cx, cz))
                    break
                cells.append((cx, cz))
                k += 1
            if cells is None or span == 0:
                continue
            landing = cells[-1]
            if road_dist[landing] < landing_spacing:
                continue
            key = (span, len(cells))
            if best is None or key < best[0]:
                best = (key, cells)
    if best is None:
        return False
    road = bp.add_road(best[1], spec.name, bridge=True)
    _register_extender(bp, road, ("end",), spec)
    return True


# --------------------------------------------------------------------- wall

def _push_out(hull, margin: float, size) -> list[tuple[int, int]]:
    W, D = size
    cx = sum(p[0] for p in hull) / len(hull)
    cz = sum(p[1] for p in hull) / len(hull)
    out = []
    for x, z in hull:
        vx, vz = x - cx, z - cz
        n = math.hypot(vx, vz) or 1.0
        px = int(round(x + margin * vx / n))
        pz = int(round(z + margin * vz / n))
        pt = (min(max(px, 1), W - 2), min(max(pz, 1), D - 2))
        if not out or out[-1] != pt:
            out.append(pt)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _bbox_loop(plots, margin: int, size) -> list[tuple[int, int]]:
    W, D = size
    x0 = min(p.rect.x for p in plots) - margin
    z0 = min(p.rect.z for p in plots) - margin
    x1 = max(p.rect.x1 - 1 for p in plots) + margin
    z1 = max(p.rect.z1 - 1 for p in plots) + margin
    x0, z0 = max(x0, 1), max(z0, 1)
    x1, z1 = min(x1, W - 2), min(z1, D - 2)
    return [(x0, z0), (x1, z0), (x1, z1), (x0, z1)]


def loop_erase(walk) -> list[tuple[int, int]]:
    """Remove the cycles of a walk so that every cell appears once."""
    path: list = []
    where: dict = {}
    for c in walk:
        if c in where:
            i = where[c]
            for gone in path[i + 1:]:
                del where[gone]
            del path[i + 1:]
        else:
            where[c] = len(path)
            path.append(c)
    return path


def _rotate_walk(walk) -> list[tuple[int, int]]:
    """Start a closed walk at its outermost once-visited cell.

    Loop erasure from an arbitrary start would cut the whole ring whenever the
    closing leg re-enters cells of the first leg.
    """
    counts = Counter(walk)
    cx = sum(c[0] for c in walk) / len(walk)
    cz = sum(c[1] for c in walk) / len(walk)
    once = [i for i, c in enumerate(walk) if counts[c] == 1]
    if not once:
        return list(walk)
    k = max(once, key=lambda i: ((walk[i][0] - cx) ** 2 + (walk[i][1] - cz) ** 2, -i))
    return list(walk[k:]) + list(walk[:k])


def trace_wall(bp: Blueprint, vertices, width: int, *, slope_penalty: float = 4.0,
               water_cost: float = 30.0) -> WallBand | None:
    """Connect the vertices into a closed band with weighted A*, or ``None``."""
    t = bp.terrain
    W, D = bp.size
    half = (width - 1) // 2
    cost = np.ones((W, D))
    cost[t.water] = water_cost
    keep_out = bp.plot_map.copy()
    if half:
        keep_out = ndimage.binary_dilation(keep_out, np.ones((2 * half + 3, 2 * half + 3), bool))
    else:
        keep_out = ndimage.binary_dilation(keep_out, np.ones((3, 3), bool))
    cost[keep_out | t.structure] = INF
    cost[0, :] = cost[-1, :] = cost[:, 0] = cost[:, -1] = INF
    walk = [vertices[0]]
    for a, b in zip(vertices, vertices[1:] + vertices[:1]):
        leg = astar(cost, a, b, height=t.height, step_weight=slope_penalty)
        if leg is None:
            return None
        walk.extend(leg[1:])
    path = loop_erase(_rotate_walk(walk[:-1]))
    if len(path) < 4:
        return None
    (ax, az), (bx, bz) = path[0], path[-1]
    if abs(ax - bx) + abs(az - bz) != 1:
        return None
    centre = np.zeros((W, D), bool)
    for c in path:
        centre[c] = True
    band = ndimage.binary_dilation(centre, np.ones((2 * half + 1, 2 * half + 1), bool)) if half \
        else centre
    band &= ~bp.plot_map
    index_of = {c: i for i, c in enumerate(path)}
    _, (ix, iz) = ndimage.distance_transform_edt(~centre, return_indices=True)
    cells = [tuple(c) for c in np.argwhere(band).tolist()]
    path_index = {c: index_of[(int(ix[c]), int(iz[c]))] for c in cells}
    return WallBand(path=path, cells=cells, width=width, path_index=path_index)


def _encloses_all(bp: Blueprint, band: WallBand) -> bool:
    mask = np.zeros(bp.size, bool)
    for c in band.cells:
        mask[c] = True
    inside = enclosed_interior(mask)
    return bool(inside[bp.plot_map].all())


def wall_agent_act(spec: AgentSpec, bp: Blueprint) -> bool:
    """One-shot city wall around every plot that exists right now."""
    if bp.wall is not None:
        return False
    p = spec.params
    margin = p.get("margin", 6)
    width = p.get("width", 3)
    plots = list(bp.plots.values())
    if len(plots) < p.get("min_plots", 3):
        return False
    corners = [c for pl in plots for c in pl.rect.corners()]
    hull = convex_hull(corners)
    attempts = []
    if len(hull) >= 3:
        attempts += [_push_out(hull, margin, bp.size), _push_out(hull, 2 * margin, bp.size)]
    attempts += [_bbox_loop(plots, margin, bp.size), _bbox_loop(plots, 2 * margin, bp.size)]
    for verts in attempts:
        if len(verts) < 3:
            continue
        band = trace_wall(bp, verts, width, slope_penalty=p.get("slope_penalty", 4.0))
        if band is not None and _encloses_all(bp, band):
            try:
                bp.place_wall(band, spec.name)
            except BlueprintError:
                continue
            return True
    return False


# ------------------------------------------------------------------ roster

PLOT_BEHAVIORS = {"plot", "church"}
ROAD_BEHAVIORS = {"road_split", "road_connect", "bridge"}
BEHAVIORS = {
    "plot": generic_plot_agent_act,
    "church": church_agent_act,
    "road_split": road_split_act,
    "road_connect": road_connect_act,
    "bridge": bridge_act,
    "wall": wall_agent_act,
}

FARM_CROPS = ("wheat", "potatoes", "carrots", "beetroots", "melon")
DECORATIONS = (
    # name, footprint, footprint_max, wall rule
    ("bench", (1, 2), None, None),
    ("wheelbarrow", (1, 2), None, None),
    ("well", (2, 2), None, None),
    ("lamp_post", (1, 1), None, None),
    ("fountain", (2, 2), None, "inside"),
    ("market_stall", (2, 2), None, "inside"),
    ("hay_bale", (1, 1), (2, 2), "outside"),
    ("barrel_stack", (1, 1), (2, 2), None),
    ("flower_bed", (1, 2), (2, 2), None),
    ("signpost", (1, 1), None, None),
    ("crate_pile", (1, 1), (2, 2), None),
)


def default_roster(wall_step: int = DEFAULT_WALL_STEP) -> list[AgentSpec]:
    """The standard roster; the wall agent goes last so it sees every plot of its step."""
    after_wall = wall_step + 1
    roster = [
        AgentSpec("road_split", "road_split", activation_interval=2,
                  params={"min_branch_length": 5, "max_branch_length": 18}),
        AgentSpec("road_connect", "road_connect", activation_step=6, activation_interval=3,
                  params={"n_pairs": 3, "threshold": 1.5}),
        AgentSpec("bridge", "bridge", activation_step=4, activation_interval=5,
                  params={"max_length": 24}),
    ]
    for i in range(3):
        roster.append(AgentSpec(
            f"civilian_{i}", kind="civilian_generic", footprint=(6, 6), footprint_max=(11, 11),
            max_distance_from_roads=1, max_slope=3, slope_weight=1.0, sample_size=30))
    for crop in FARM_CROPS:
        roster.append(AgentSpec(
            f"farm_{crop}", kind="farm", variant=crop, activation_step=after_wall,
            activation_interval=2, outside_wall_only=True, max_plots=8, footprint=(6, 6),
            footprint_max=(10, 10), max_slope=3, custom_fitness="road_proximity",
            own_kind_distance=OwnKindDistance(weight=-0.5), sample_size=25))
    for i in range(9):
        roster.append(AgentSpec(
            f"tree_{i}", kind="tree", activation_step=after_wall, max_plots=120,
            footprint=(3, 3), max_slope=4, slope_weight=0.2,
            own_kind_distance=OwnKindDistance(min_cells=2), sample_size=8))
    roster += [
        AgentSpec("boat_small", kind="boat", variant="small", water_only=True,
                  activation_step=after_wall, activation_interval=3, max_plots=3,
                  footprint=(3, 6), custom_fitness="shore", slope_weight=0.0,
                  own_kind_distance=OwnKindDistance(min_cells=3)),
        AgentSpec("boat_large", kind="boat", variant="large", water_only=True,
                  activation_step=after_wall, activation_interval=3, max_plots=1,
                  footprint=(5, 11), custom_fitness="shore", slope_weight=0.0),
        AgentSpec("fishing_platform", kind="fishing_platform", water_only=True,
                  activation_step=after_wall, activation_interval=3, max_plots=3,
                  footprint=(3, 3), custom_fitness="shore", slope_weight=0.0,
                  own_kind_distance=OwnKindDistance(min_cells=6)),
    ]
    for name, fp, fp_max, rule in DECORATIONS:
        roster.append(AgentSpec(
            f"deco_{name}", kind="decoration", variant=name,
            activation_step=after_wall if rule else 2, activation_interval=3, max_plots=3,
            inside_wall_only=rule == "inside", outside_wall_only=rule == "outside",
            max_distance_from_roads=1 if rule != "outside" else 4, footprint=fp,
            footprint_max=fp_max, max_slope=2, sample_size=15,
            own_kind_distance=OwnKindDistance(min_cells=4)))
    roster += [
        AgentSpec("watchtower", kind="watchtower", activation_step=after_wall,
                  activation_interval=6, max_plots=4, footprint=(5, 5), max_slope=4,
                  slope_weight=0.1, custom_fitness="watchtower",
                  own_kind_distance=OwnKindDistance(min_cells=20), sample_size=40),
        AgentSpec("church", "church", kind="church", activation_step=10, max_plots=1,
                  critically_important=True, footprint=(14, 14), footprint_max=(21, 21),
                  max_distance_from_roads=2, max_slope=3, slope_weight=0.5,
                  custom_fitness="central", sample_size=40),
        AgentSpec("wall", "wall", activation_step=wall_step,
                  params={"margin": 6, "width": 3, "slope_penalty": 4.0, "min_plots": 3}),
    ]
    return roster


def register_seed_road(bp: Blueprint) -> None:
    """Give the seed road its own extend agent, growing from both ends."""
    if bp.roads.segments and not bp.extra_agents:
        _register_extender(bp, bp.roads.segments[0], ("end", "start"))
        bp.extra_agents[-1].activation_step = bp.step
