"""Planar helpers: convex hull, point-in-polygon, rectangle maths, Savitzky-Golay smoothing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Rect:
    x: int
    z: int
    w: int
    d: int

    @property
    def x1(self) -> int:
        return self.x + self.w

    @property
    def z1(self) -> int:
        return self.z + self.d

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + (self.w - 1) / 2, self.z + (self.d - 1) / 2)

    @property
    def area(self) -> int:
        return self.w * self.d

    def slices(self) -> tuple[slice, slice]:
        return slice(self.x, self.x1), slice(self.z, self.z1)

    def corners(self) -> list[tuple[int, int]]:
        return [(self.x, self.z), (self.x1 - 1, self.z), (self.x, self.z1 - 1),
                (self.x1 - 1, self.z1 - 1)]

    def cells(self):
        for x in range(self.x, self.x1):
            for z in range(self.z, self.z1):
                yield (x, z)

    def intersects(self, other: "Rect") -> bool:
        return self.x < other.x1 and other.x < self.x1 and self.z < other.z1 and other.z < self.z1

    def expanded(self, r: int) -> "Rect":
        return Rect(self.x - r, self.z - r, self.w + 2 * r, self.d + 2 * r)

    def clipped(self, width: int, depth: int) -> "Rect":
        x0, z0 = max(self.x, 0), max(self.z, 0)
        x1, z1 = min(self.x1, width), min(self.z1, depth)
        return Rect(x0, z0, max(0, x1 - x0), max(0, z1 - z0))

    def gap(self, other: "Rect") -> int:
        """Chebyshev distance between the nearest cells of two rects (0 if overlapping)."""
        dx = max(other.x - (self.x1 - 1), self.x - (other.x1 - 1), 0)
        dz = max(other.z - (self.z1 - 1), self.z - (other.z1 - 1), 0)
        return max(dx, dz)

    def __str__(self) -> str:
        return f"{self.x},{self.z},{self.w},{self.d}"

    @classmethod
    def parse(cls, text: str) -> "Rect":
        return cls(*(int(v) for v in text.split(",")))


def cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[tuple[int, int]]:
    """Counter-clockwise hull vertices (monotone chain), collinear points dropped."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def polygon_area2(poly) -> int:
    """Twice the signed area."""
    return sum(poly[i][0] * poly[(i + 1) % len(poly)][1] - poly[(i + 1) % len(poly)][0] * poly[i][1]
               for i in range(len(poly)))


def point_in_polygon(pt, poly) -> bool:
    """Even-odd ray cast; points exactly on an edge count as inside."""
    x, y = pt
    n = len(poly)
    inside = False
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if cross((x1, y1), (x2, y2), (x, y)) == 0 and min(x1, x2) <= x <= max(x1, x2) \
                and min(y1, y2) <= y <= max(y1, y2):
            return True
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


def savgol_coeffs(window: int, order: int) -> np.ndarray:
    """Smoothing weights of a centred Savitzky-Golay filter.

    Least-squares fit of a degree-``order`` polynomial over ``window`` samples,
    evaluated at the centre sample.
    """
    if window % 2 == 0 or window < 1:
        raise ValueError("window must be a positive odd integer")
    if order >= window:
        raise ValueError("order must be less than window")
    half = window // 2
    # positions scaled to [-1, 1] keep the Vandermonde matrix well conditioned;
    # the value at the centre does not depend on the scale
    t = np.arange(-half, half + 1, dtype=np.float64) / max(half, 1)
    vander = np.vander(t, order + 1, increasing=True)
    # row 0 of the pseudo-inverse evaluates the fitted polynomial at t = 0
    return np.linalg.pinv(vander)[0]


def savgol_circular(values, window: int = 11, order: int = 3) -> np.ndarray:
    """Savitzky-Golay smoothing of a closed loop (wrap-around boundary)."""
    v = np.asarray(values, dtype=np.float64)
    n = len(v)
    if n < window:
        raise ValueError(f"signal of length {n} shorter than window {window}")
    coeffs = savgol_coeffs(window, order)
    half = window // 2
    padded = np.concatenate([v[-half:], v, v[:half]])
    return np.correlate(padded, coeffs, mode="valid")


def moving_average_circular(values, window: int = 3) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    half = window // 2
    idx = (np.arange(len(v))[:, None] + np.arange(-half, half + 1)[None, :]) % len(v)
    return v[idx].mean(axis=1)
