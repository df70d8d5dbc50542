"""Farms that spill out of their plots along terrain contours, then get fenced together."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..blueprint import Blueprint, Plot
from .canvas import Canvas
from .materials import AIR, CROP_BLOCKS, FARMLAND

CROSS = ndimage.generate_binary_structure(2, 1)
DEFAULT_ROUNDS = 12
WATER_SPACING = 9


@dataclass
class FarmRegion:
    plot_id: int
    crop: str
    mask: np.ndarray          # bool [x, z]
    heights: np.ndarray       # terrain height map the region was grown on
    seed_mask: np.ndarray     # the initial blobs

    @property
    def cells(self) -> set[tuple[int, int]]:
        return {tuple(c) for c in np.argwhere(self.mask).tolist()}

    def height_of(self, cell) -> int:
        return int(self.heights[cell])


def grow_region(region: np.ndarray, heights: np.ndarray, allowed: np.ndarray,
                rounds: int = DEFAULT_ROUNDS) -> np.ndarray:
    """Per-level 4-neighbour dilation: cells at height h only grow onto allowed cells at h."""
    region = region.copy()
    for _ in range(rounds):
        grown = region.copy()
        for h in np.unique(heights[region]):
            level = heights == h
            grown |= ndimage.binary_dilation(region & level, CROSS) & level & allowed
        if np.array_equal(grown, region):
            break
        region = grown
    return region


def seed_blobs(plot: Plot, shape, rng) -> np.ndarray:
    """Two to four random disks (radius 2-3) clipped to the plot."""
    r = plot.rect
    xs, zs = np.ogrid[:shape[0], :shape[1]]
    mask = np.zeros(shape, bool)
    for _ in range(rng.randint(2, 4)):
        cx, cz = rng.randrange(r.x, r.x1), rng.randrange(r.z, r.z1)
        rad = rng.randint(2, 3)
        mask |= (xs - cx) ** 2 + (zs - cz) ** 2 <= rad * rad
    own = np.zeros(shape, bool)
    own[r.slices()] = True
    return mask & own


def reserved_mask(bp: Blueprint) -> np.ndarray:
    t = bp.terrain
    return bp.plot_map | bp.road_map | bp.wall_map | t.water | t.structure


def expand_farms(bp: Blueprint, farm_plots, rng, *, rounds: int = DEFAULT_ROUNDS) -> list[FarmRegion]:
    """Grow every farm in id order; later farms cannot take cells of earlier ones."""
    heights = bp.terrain.height
    reserved = reserved_mask(bp)
    taken = np.zeros(bp.size, bool)
    regions = []
    for plot in sorted(farm_plots, key=lambda p: p.id):
        own = np.zeros(bp.size, bool)
        own[plot.rect.slices()] = True
        allowed = ((~reserved) | own) & ~taken & ~bp.terrain.water
        seeds = seed_blobs(plot, bp.size, rng) & allowed
        # growth is at most one cell per round, so a window around the plot suffices
        sl = plot.rect.expanded(rounds + 1).clipped(*bp.size).slices()
        mask = np.zeros(bp.size, bool)
        mask[sl] = grow_region(seeds[sl], heights[sl], allowed[sl], rounds)
        taken |= mask
        regions.append(FarmRegion(plot.id, plot.variant or "wheat", mask, heights, seeds))
    return regions


def fence_rings(regions, shape) -> list[np.ndarray]:
    """One ring per connected component of the union of all regions."""
    union = np.zeros(shape, bool)
    for r in regions:
        union |= r.mask
    labels, n = ndimage.label(union, CROSS)
    rings = []
    for k in range(1, n + 1):
        comp = labels == k
        rings.append(ndimage.binary_dilation(comp, np.ones((3, 3), bool)) & ~union)
    return rings


def plant_crops(canvas: Canvas, regions) -> int:
    placed = 0
    for r in regions:
        crop = CROP_BLOCKS.get(r.crop, "wheat")
        for x, z in map(tuple, np.argwhere(r.mask).tolist()):
            y = int(r.heights[x, z])
            if x % WATER_SPACING == WATER_SPACING // 2 and z % WATER_SPACING == WATER_SPACING // 2:
                placed += canvas.set(x, y, z, "water") + canvas.set(x, y + 1, z, AIR)
                continue
            placed += canvas.set(x, y, z, FARMLAND) + canvas.set(x, y + 1, z, crop)
    return placed


def finalize_farm_borders(canvas: Canvas, regions, heights: np.ndarray, blocked: np.ndarray,
                          fence: str = "oak_fence") -> tuple[int, list[np.ndarray]]:
    """Fence the union of all regions; touching farms share one border."""
    rings = fence_rings(regions, heights.shape)
    placed = 0
    for ring in rings:
        for x, z in map(tuple, np.argwhere(ring & ~blocked).tolist()):
            placed += canvas.set(x, int(heights[x, z]) + 1, z, fence)
    return placed, rings
