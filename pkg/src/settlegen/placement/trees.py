"""Clearing foliage before anything is built."""

from __future__ import annotations

import numpy as np

from ..world import AIR, FOLIAGE, BuildArea, VoxelWorld


def remove_trees(world: VoxelWorld, area: BuildArea, tree_map: np.ndarray,
                 footprint: np.ndarray | None = None) -> int:
    """Turn every foliage block of the tree-topped columns into air; returns the count.

    Only columns flagged in ``tree_map`` (and in ``footprint`` when given) are
    visited, so the cost grows with the number of trees rather than the area.
    """
    mask = tree_map if footprint is None else tree_map & footprint
    cols = np.argwhere(mask)
    if len(cols) == 0:
        return 0
    xs, zs = cols[:, 0] + area.x, cols[:, 1] + area.z
    sub = world.blocks[xs, :, zs]
    foliage = np.isin(world.class_table()[sub], FOLIAGE)
    n = int(foliage.sum())
    if n:
        sub[foliage] = world.index(AIR)
        world.blocks[xs, :, zs] = sub
    return n
