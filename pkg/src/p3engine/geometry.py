"""Pure geometric kernel.

Convex hulls of opponent positions, point-vs-polygon classification
(with an explicit boundary band), the valid pass-origin zone, polygon
areas, and rasterized Voronoi ownership grids. Everything here is a
pure function; the Voronoi rasterization dispatches to the compiled
kernel when available.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from p3engine import kernels
from p3engine.pitch import PITCH_LENGTH, PITCH_WIDTH, round_half_up

Point = tuple[float, float]

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"

# Absolute tolerance of the point-to-edge distance test that defines the
# boundary band.
BOUNDARY_TOL = 1e-9

# Owner value for grid cells clipped out of the visible area.
NO_OWNER = -1

_INSIDE_CODE = 1
_BOUNDARY_CODE = 0
_OUTSIDE_CODE = -1
_CODE_NAMES = {_INSIDE_CODE: INSIDE, _BOUNDARY_CODE: BOUNDARY, _OUTSIDE_CODE: OUTSIDE}


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, counter-clockwise, no repeated endpoint.

    The first vertex is the lexicographically smallest (x, then y), so
    equal point sets always produce the identical vertex sequence.
    Hulls additionally carry no collinear triples (strictly convex).
    """

    vertices: tuple[Point, ...]

    @staticmethod
    def from_raw(points: Iterable[Sequence[float]]) -> "Polygon":
        """Canonicalize a raw vertex loop (e.g. a parsed visible area).

        Drops a repeated closing vertex and consecutive duplicates,
        enforces counter-clockwise order, and rotates to the canonical
        start. Raises ValueError for fewer than 3 distinct vertices or
        zero signed area.
        """
        pts = [(float(p[0]), float(p[1])) for p in points]
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts = pts[:-1]
        deduped: list[Point] = []
        for p in pts:
            if not deduped or p != deduped[-1]:
                deduped.append(p)
        if len(deduped) < 3:
            raise ValueError("polygon needs at least 3 distinct vertices")
        if _signed_area(deduped) == 0.0:
            raise ValueError("polygon has zero area")
        if _signed_area(deduped) < 0.0:
            deduped.reverse()
        start = min(range(len(deduped)), key=lambda i: deduped[i])
        return Polygon(tuple(deduped[start:] + deduped[:start]))


def _signed_area(vertices: Sequence[Point]) -> float:
    acc = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return 0.5 * acc


def polygon_area(poly: Polygon) -> float:
    """Shoelace area, positive."""
    return abs(_signed_area(poly.vertices))


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[float]]) -> Polygon | None:
    """Monotone-chain convex hull.

    Collinear points interior to an edge are dropped, so the result is
    strictly convex. Returns None when fewer than 3 distinct
    non-collinear points exist (the degenerate marker).
    """
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) < 3:
        return None
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return None
    return Polygon(tuple(hull))


def classify_points(xs: np.ndarray, ys: np.ndarray, poly: Polygon) -> np.ndarray:
    """Classify many points against a polygon in one pass.

    Returns an int8 array: 1 inside, 0 boundary, -1 outside. Boundary
    means within BOUNDARY_TOL of some edge segment; off that band the
    even-odd ray cast is exact.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    verts = poly.vertices
    n = len(verts)
    on_edge = np.zeros(xs.shape, dtype=bool)
    inside = np.zeros(xs.shape, dtype=bool)
    tol2 = BOUNDARY_TOL * BOUNDARY_TOL
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        vx, vy = bx - ax, by - ay
        wx, wy = xs - ax, ys - ay
        seg2 = vx * vx + vy * vy
        if seg2 == 0.0:  # edge shorter than float underflow: treat as a point
            on_edge |= wx * wx + wy * wy <= tol2
        else:
            t = np.clip((wx * vx + wy * vy) / seg2, 0.0, 1.0)
            dx = wx - t * vx
            dy = wy - t * vy
            on_edge |= dx * dx + dy * dy <= tol2
        # Even-odd ray cast toward +x; the half-open vertical test keeps
        # shared vertices from double-counting. The multiply-only form of
        # "xs left of the edge crossing" avoids overflow on slivers;
        # horizontal edges never cross (ay > ys equals by > ys).
        crosses = (ay > ys) != (by > ys)
        lhs = (xs - ax) * vy
        rhs = (ys - ay) * vx
        inside ^= crosses & np.where(vy > 0.0, lhs < rhs, lhs > rhs)
    out = np.full(xs.shape, _OUTSIDE_CODE, dtype=np.int8)
    out[inside] = _INSIDE_CODE
    out[on_edge] = _BOUNDARY_CODE
    return out


def point_in_polygon(p: Sequence[float], poly: Polygon) -> str:
    """Classify one point: returns "inside", "boundary", or "outside"."""
    code = classify_points(np.array([p[0]]), np.array([p[1]]), poly)[0]
    return _CODE_NAMES[int(code)]


def point_in_or_on(p: Sequence[float], poly: Polygon) -> bool:
    return point_in_polygon(p, poly) != OUTSIDE


def zone_contains(x: float, pitch_length: float = PITCH_LENGTH) -> bool:
    """True iff the pass origin lies in the valid band, both ends inclusive:
    beyond the defensive third and short of the final quarter."""
    return pitch_length / 3.0 <= x <= pitch_length * 3.0 / 4.0


@dataclass(frozen=True)
class PitchGrid:
    """Mapping between pitch coordinates and a raster grid.

    Pitch x runs bottom-to-top over image rows (the attack points up)
    and pitch y runs left-to-right over columns. Pixel mapping rounds
    half-up so the raster is bit-stable across implementations.
    """

    width: int
    height: int
    pitch_length: float = PITCH_LENGTH
    pitch_width: float = PITCH_WIDTH

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise ValueError("grid must be at least 2x2")

    def to_pixel(self, x: float, y: float) -> tuple[int, int]:
        """Pitch coordinates to (row, col)."""
        row = (self.height - 1) - round_half_up(x / self.pitch_length * (self.height - 1))
        col = round_half_up(y / self.pitch_width * (self.width - 1))
        return row, col

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Pitch coordinates of every pixel center as two (H, W) arrays."""
        rows = np.arange(self.height, dtype=np.float64)[:, None]
        cols = np.arange(self.width, dtype=np.float64)[None, :]
        px = (self.height - 1 - rows) / (self.height - 1) * self.pitch_length
        py = cols / (self.width - 1) * self.pitch_width
        shape = (self.height, self.width)
        return (
            np.ascontiguousarray(np.broadcast_to(px, shape)),
            np.ascontiguousarray(np.broadcast_to(py, shape)),
        )


@dataclass
class OwnerGrid:
    """Row-major grid of Voronoi seed indices; NO_OWNER marks clipped cells."""

    width: int
    height: int
    owners: np.ndarray  # (height, width) int32

    def owner_at(self, row: int, col: int) -> int:
        return int(self.owners[row, col])


def voronoi_owner_grid(
    seeds: Sequence[Sequence[float]],
    grid: PitchGrid,
    clip: Polygon | None = None,
) -> OwnerGrid:
    """Assign every pixel to its nearest seed (squared Euclidean metric).

    Exact distance ties go to the lowest seed index. When a clip polygon
    is given, pixels whose centers fall strictly outside it get NO_OWNER.
    """
    arr = np.asarray([(float(s[0]), float(s[1])) for s in seeds], dtype=np.float64)
    if arr.size == 0:
        raise ValueError("voronoi grid needs at least one seed")
    px, py = grid.pixel_centers()
    owners = kernels.voronoi_owners(px, py, arr)
    if clip is not None:
        codes = classify_points(px, py, clip)
        owners[codes == _OUTSIDE_CODE] = NO_OWNER
    return OwnerGrid(grid.width, grid.height, owners)
