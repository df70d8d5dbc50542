"""4-connected grid search: weighted A* for new paths, BFS along existing ones."""

from __future__ import annotations

import heapq
import math
from collections import deque

import numpy as np

NEIGHBOURS4 = ((1, 0), (-1, 0), (0, 1), (0, -1))


def astar(cost: np.ndarray, start, goal, *, height: np.ndarray | None = None,
          step_weight: float = 0.0, max_step: float | None = None,
          max_cost: float = math.inf, max_expansions: int | None = None):
    """Cheapest 4-connected path from ``start`` to ``goal`` as a list of cells.

    Entering cell ``c`` from ``p`` costs ``cost[c] + step_weight * |height[c] - height[p]|``;
    ``inf`` cells and steps higher than ``max_step`` are impassable. Entry costs
    must be >= 1 for the Manhattan heuristic to stay admissible. The start cell's
    own cost is ignored. Returns ``None`` if no path within ``max_cost`` exists.
    """
    W, D = cost.shape
    sx, sz = start
    gx, gz = goal
    if not (0 <= sx < W and 0 <= sz < D and 0 <= gx < W and 0 <= gz < D):
        return None
    if not math.isfinite(cost[gx, gz]):
        return None
    if (sx, sz) == (gx, gz):
        return [(sx, sz)]
    c = cost.ravel().tolist()
    h = height.ravel().tolist() if height is not None else None
    s, g = sx * D + sz, gx * D + gz
    best = {s: 0.0}
    parent = {s: -1}
    heap = [(abs(sx - gx) + abs(sz - gz), 0.0, s)]
    expanded = 0
    closed = set()
    inf = math.inf
    while heap:
        f, gcost, cur = heapq.heappop(heap)
        if cur in closed:
            continue
        if cur == g:
            path = []
            while cur != -1:
                path.append(divmod(cur, D))
                cur = parent[cur]
            return path[::-1]
        closed.add(cur)
        expanded += 1
        if max_expansions is not None and expanded > max_expansions:
            return None
        x, z = divmod(cur, D)
        for dx, dz in NEIGHBOURS4:
            nx, nz = x + dx, z + dz
            if nx < 0 or nx >= W or nz < 0 or nz >= D:
                continue
            n = nx * D + nz
            step = c[n]
            if step == inf or n in closed:
                continue
            if h is not None:
                dh = abs(h[n] - h[cur])
                if max_step is not None and dh > max_step:
                    continue
                step += step_weight * dh
            ng = gcost + step
            if ng >= best.get(n, inf):
                continue
            nf = ng + abs(nx - gx) + abs(nz - gz)
            if nf > max_cost:
                continue
            best[n] = ng
            parent[n] = cur
            heapq.heappush(heap, (nf, ng, n))
    return None


def path_cost(cost: np.ndarray, path, *, height=None, step_weight=0.0) -> float:
    total = 0.0
    for (px, pz), (x, z) in zip(path, path[1:]):
        total += float(cost[x, z])
        if height is not None:
            total += step_weight * abs(float(height[x, z]) - float(height[px, pz]))
    return total


def bfs_distance(passable: np.ndarray, start, goal=None):
    """Hop distance along ``passable`` cells from ``start``.

    With ``goal`` given returns that distance (or ``None``); otherwise returns
    the full distance array with -1 for unreachable cells.
    """
    W, D = passable.shape
    dist = np.full((W, D), -1, dtype=np.int64)
    if not passable[start]:
        return None if goal is not None else dist
    dist[start] = 0
    q = deque([start])
    while q:
        x, z = q.popleft()
        if goal is not None and (x, z) == tuple(goal):
            return int(dist[x, z])
        for dx, dz in NEIGHBOURS4:
            nx, nz = x + dx, z + dz
            if 0 <= nx < W and 0 <= nz < D and passable[nx, nz] and dist[nx, nz] < 0:
                dist[nx, nz] = dist[x, z] + 1
                q.append((nx, nz))
    if goal is not None:
        return None
    return dist


def bfs_cells(cells: set, start, goal):
    """Hop distance between two cells of a cell set, or ``None``."""
    if start not in cells or goal not in cells:
        return None
    seen = {start: 0}
    q = deque([start])
    while q:
        cur = q.popleft()
        if cur == goal:
            return seen[cur]
        x, z = cur
        for dx, dz in NEIGHBOURS4:
            n = (x + dx, z + dz)
            if n in cells and n not in seen:
                seen[n] = seen[cur] + 1
                q.append(n)
    return None


def is_4connected(mask: np.ndarray) -> bool:
    """True when the set cells of ``mask`` form at most one 4-connected component."""
    from scipy import ndimage

    _, n = ndimage.label(mask)
    return n <= 1
