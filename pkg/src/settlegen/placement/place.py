"""Realize a differentiated blueprint in the voxel world, one structure at a time."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..analysis import QualitativeFeatures
from ..blueprint import Blueprint, Plot, PlotKind
from ..rng import stream
from ..world import Biome, BuildArea, VoxelWorld
from .buildings import (build_boat, build_decoration, build_fishing_platform, build_industrial,
                        build_watchtower, level_footprint, plant_tree)
from .canvas import Canvas
from .cells import build_cell_structure, load_library
from .farms import expand_farms, finalize_farm_borders, plant_crops, reserved_mask
from .materials import style_for, wood_materials
from .roads import build_roads
from .trees import remove_trees
from .wall import build_wall, plan_wall_heights

log = logging.getLogger(__name__)

CATEGORY_ORDER = (PlotKind.CHURCH, PlotKind.RESIDENTIAL, PlotKind.COMMERCIAL, PlotKind.INDUSTRIAL,
                  PlotKind.CIVILIAN_GENERIC, PlotKind.WATCHTOWER, PlotKind.DECORATION,
                  PlotKind.BOAT, PlotKind.FISHING_PLATFORM, PlotKind.TREE)


@dataclass
class PlacementReport:
    blocks: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    trees_removed: int = 0
    failures: list = field(default_factory=list)
    farm_regions: list = field(default_factory=list)
    fence_rings: list = field(default_factory=list)
    wall_tops: np.ndarray | None = None
    towers: list = field(default_factory=list)
    gates: int = 0
    layouts: dict = field(default_factory=dict)

    @property
    def total_blocks(self) -> int:
        return sum(self.blocks.values())


def _wood(features: QualitativeFeatures, rng) -> str:
    return rng.choice(sorted(features.wood_types))


def _build_plot(canvas: Canvas, bp: Blueprint, plot: Plot, features, seed: int, library, report) -> None:
    t = bp.terrain
    rng = stream(seed, f"plot/{plot.id}")
    wood = _wood(features, rng)
    kind = plot.kind
    if kind == PlotKind.TREE:
        x, z = plot.rect.x + plot.rect.w // 2, plot.rect.z + plot.rect.d // 2
        plant_tree(canvas, plot, wood, int(t.height[x, z]), rng,
                   tall=features.dominant_biome == Biome.JUNGLE)
        return
    if kind == PlotKind.BOAT:
        build_boat(canvas, plot, wood_materials(wood), plot.anchor_height)
        return
    if kind == PlotKind.FISHING_PLATFORM:
        build_fishing_platform(canvas, plot, wood_materials(wood), plot.anchor_height, t.height)
        return
    level_footprint(canvas, plot.rect, plot.anchor_height, t.height)
    if kind in (PlotKind.CHURCH, PlotKind.RESIDENTIAL, PlotKind.COMMERCIAL, PlotKind.CIVILIAN_GENERIC):
        style = kind.value if kind != PlotKind.CIVILIAN_GENERIC else "residential"
        _, layout = build_cell_structure(canvas, plot, library, rng, style_for(style, wood), kind=style)
        report.layouts[plot.id] = layout
    elif kind == PlotKind.INDUSTRIAL:
        build_industrial(canvas, plot, style_for("industrial", wood), rng)
    elif kind == PlotKind.WATCHTOWER:
        build_watchtower(canvas, plot, wood_materials(wood), rng)
    elif kind == PlotKind.DECORATION:
        build_decoration(canvas, plot, wood)
    else:
        raise ValueError(f"no builder for {kind.value}")


def place_all(bp: Blueprint, world: VoxelWorld, features: QualitativeFeatures, seed: int, *,
              area: BuildArea | None = None, library=None, clear_trees: bool = True) -> PlacementReport:
    area = area or bp.terrain.area
    canvas = Canvas(world, area)
    report = PlacementReport()
    library = library or load_library()
    t = bp.terrain
    start = time.perf_counter()

    tick = time.perf_counter()
    if clear_trees:
        with canvas.as_category("tree_removal"):
            report.trees_removed = remove_trees(world, area, t.tree)
            canvas.counts["tree_removal"] += report.trees_removed
    report.timings["tree_removal"] = time.perf_counter() - tick

    tick = time.perf_counter()
    with canvas.as_category("roads"):
        build_roads(canvas, bp)
    report.timings["roads"] = time.perf_counter() - tick

    tick = time.perf_counter()
    if bp.wall is not None:
        ground = np.where(t.water, t.water_surface, t.height)
        tops = plan_wall_heights(bp.wall, ground)
        with canvas.as_category("wall"):
            built = build_wall(canvas, bp.wall, tops, t.height, bp.road_map, bp.plot_map)
        report.wall_tops, report.towers, report.gates = tops, built.towers, built.gates
    report.timings["wall"] = time.perf_counter() - tick

    tick = time.perf_counter()
    order = {k: i for i, k in enumerate(CATEGORY_ORDER)}
    plots = sorted((p for p in bp.plots.values() if p.kind != PlotKind.FARM),
                   key=lambda p: (order[p.kind], p.created_step, p.id))
    for plot in plots:
        with canvas.as_category(plot.kind.value):
            try:
                _build_plot(canvas, bp, plot, features, seed, library, report)
            except Exception as exc:  # one broken structure must not stop the rest
                log.warning("structure %d (%s) failed: %s", plot.id, plot.kind.value, exc)
                report.failures.append((plot.id, f"{type(exc).__name__}: {exc}"))
    report.timings["structures"] = time.perf_counter() - tick

    tick = time.perf_counter()
    farms = bp.plots_of(PlotKind.FARM)
    if farms:
        regions = expand_farms(bp, farms, stream(seed, "farms"))
        fence = wood_materials(_wood(features, stream(seed, "fences"))).fence
        with canvas.as_category("farm"):
            plant_crops(canvas, regions)
            union = np.zeros(bp.size, bool)
            for r in regions:
                union |= r.mask
            blocked = (reserved_mask(bp) & ~union) | bp.wall_map
            _, rings = finalize_farm_borders(canvas, regions, t.height, blocked, fence)
        report.farm_regions, report.fence_rings = regions, rings
    report.timings["farms"] = time.perf_counter() - tick

    report.timings["placement"] = time.perf_counter() - start - report.timings["tree_removal"]
    report.timings["total"] = time.perf_counter() - start
    report.blocks = dict(canvas.counts)
    return report
