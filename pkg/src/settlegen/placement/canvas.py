"""Block writes in build-area coordinates, with per-category counting."""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager

import numpy as np

from ..world import BuildArea, VoxelWorld


class Canvas:
    """Writes blocks at ``(x, y, z)`` relative to the build area origin.

    Writes above the world top or outside the area are clipped silently; every
    written block is counted under the current category.
    """

    def __init__(self, world: VoxelWorld, area: BuildArea):
        self.world = world
        self.area = area
        self.height = world.dims[1]
        self.counts: Counter = Counter()
        self.category = "misc"
        self._idx: dict[str, int] = {}

    @contextmanager
    def as_category(self, name: str):
        prev, self.category = self.category, name
        try:
            yield self
        finally:
            self.category = prev

    def idx(self, name: str) -> int:
        i = self._idx.get(name)
        if i is None:
            i = self._idx[name] = self.world.index(name)
        return i

    def inside(self, x: int, z: int) -> bool:
        return 0 <= x < self.area.width and 0 <= z < self.area.depth

    def fill(self, x0: int, x1: int, y0: int, y1: int, z0: int, z1: int, name: str) -> int:
        """Fill the half-open box ``[x0, x1) x [y0, y1) x [z0, z1)``."""
        x0, x1 = max(x0, 0), min(x1, self.area.width)
        z0, z1 = max(z0, 0), min(z1, self.area.depth)
        y0, y1 = max(y0, 0), min(y1, self.height)
        if x0 >= x1 or y0 >= y1 or z0 >= z1:
            return 0
        ax, az = self.area.x, self.area.z
        self.world.blocks[ax + x0:ax + x1, y0:y1, az + z0:az + z1] = self.idx(name)
        n = (x1 - x0) * (y1 - y0) * (z1 - z0)
        self.counts[self.category] += n
        return n

    def set(self, x: int, y: int, z: int, name: str) -> int:
        return self.fill(x, x + 1, y, y + 1, z, z + 1, name)

    def column(self, x: int, z: int, y0: int, y1: int, name: str) -> int:
        return self.fill(x, x + 1, y0, y1, z, z + 1, name)

    def get(self, x: int, y: int, z: int) -> str:
        return self.world.palette[int(self.world.blocks[self.area.x + x, y, self.area.z + z])].name

    def stamp(self, x0: int, y0: int, z0: int, roles: np.ndarray, materials: dict) -> int:
        """Write a role array ``[x, y, z]``; roles missing from ``materials`` are left untouched."""
        n = 0
        for role, name in materials.items():
            hits = np.argwhere(roles == role)
            for dx, dy, dz in hits:
                n += self.set(x0 + int(dx), y0 + int(dy), z0 + int(dz), name)
        return n
