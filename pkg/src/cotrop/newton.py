"""Newton polytopes and regular subdivisions from lower hulls of lifted supports.

All computations are exact.  Lifted heights are Fractions, and the hull
tests scale them to integers by a common denominator so the inner loops
stay in integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from .errors import EmptyTruncation, InvalidInput, UnsupportedDimension
from .puiseux import as_fraction, fraction_str

Point = tuple[int, ...]
Lift = Mapping[Point, Fraction]

PERTURBATION_BOUND = Fraction(1, 2**20)


def _as_points(support: Iterable) -> list[Point]:
    pts = sorted({tuple(int(k) for k in p) for p in support})
    if not pts:
        raise InvalidInput("support must be nonempty")
    if len({len(p) for p in pts}) != 1:
        raise InvalidInput("all support points must have the same dimension")
    return pts


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _cross2(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _rank(vectors: Sequence[Sequence]) -> int:
    """Rank of a list of rational vectors by exact Gaussian elimination."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def affine_dimension(points: Sequence[Point]) -> int:
    if len(points) <= 1:
        return 0
    return _rank([_sub(p, points[0]) for p in points[1:]])


def _injective_coordinates(points: Sequence[Point], k: int) -> tuple[int, ...]:
    """Coordinates on which projecting the affine span stays injective."""
    diffs = [_sub(p, points[0]) for p in points[1:]]
    for cols in itertools.combinations(range(len(points[0])), k):
        if _rank([[d[c] for c in cols] for d in diffs]) == k:
            return cols
    raise AssertionError("affine span has no injective coordinate projection")


def hull_2d(points: Sequence[Point]) -> list[Point]:
    """Extreme points of a planar set in counterclockwise order, starting lexicographically lowest.

    Collinear boundary points are dropped.  Degenerate inputs give one or
    two points.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return hull


def _extreme_points_3d(pts: Sequence[Point]) -> set[Point]:
    extreme: set[Point] = set()
    for a, b, c in itertools.combinations(pts, 3):
        normal = _cross3(_sub(b, a), _sub(c, a))
        if normal == (0, 0, 0):
            continue
        side = [_dot(normal, _sub(p, a)) for p in pts]
        if all(s >= 0 for s in side) or all(s <= 0 for s in side):
            on_plane = [p for p, s in zip(pts, side) if s == 0]
            extreme.update(_extreme_points(on_plane))
    return extreme


def _cross3(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _extreme_points(pts: Sequence[Point]) -> set[Point]:
    k = affine_dimension(pts)
    if k == 0:
        return {pts[0]}
    n = len(pts[0])
    if k < n:
        cols = _injective_coordinates(pts, k)
        image = {tuple(p[c] for c in cols): p for p in pts}
        return {image[q] for q in _extreme_points(sorted(image))}
    if n == 1:
        return {min(pts), max(pts)}
    if n == 2:
        return set(hull_2d(pts))
    return _extreme_points_3d(pts)


@dataclass(frozen=True)
class NewtonPolytope:
    support: tuple[Point, ...]
    vertices: tuple[Point, ...]
    dimension: int

    @property
    def nvars(self) -> int:
        return len(self.support[0])

    def boundary(self) -> list[Point]:
        """Counterclockwise vertex cycle (planar polytopes only)."""
        if self.nvars != 2:
            raise UnsupportedDimension("boundary cycle is only defined in the plane")
        return hull_2d(self.vertices)

    def area(self) -> Fraction:
        if self.nvars != 2 or self.dimension < 2:
            return Fraction(0)
        return polygon_area(self.boundary())

    def contains(self, point) -> bool:
        return point_in_polygon(point, self.support)


def convex_hull(support: Iterable) -> NewtonPolytope:
    pts = _as_points(support)
    n = len(pts[0])
    if n not in (1, 2, 3):
        raise UnsupportedDimension(f"convex hulls are supported for n = 1, 2, 3, not {n}")
    return NewtonPolytope(tuple(pts), tuple(sorted(_extreme_points(pts))), affine_dimension(pts))


def polygon_area(cycle: Sequence[Point]) -> Fraction:
    """Exact shoelace area of a counterclockwise polygon."""
    twice = sum(
        cycle[i][0] * cycle[(i + 1) % len(cycle)][1] - cycle[(i + 1) % len(cycle)][0] * cycle[i][1]
        for i in range(len(cycle))
    )
    return Fraction(abs(twice), 2)


def point_in_polygon(point, points: Sequence[Point]) -> bool:
    """Closed membership of ``point`` in the convex hull of planar ``points``."""
    point = tuple(point)
    hull = hull_2d(points)
    if len(hull) == 1:
        return point == hull[0]
    if len(hull) == 2:
        a, b = hull
        if _cross2(a, b, point) != 0:
            return False
        return min(a, b) <= point <= max(a, b)
    return all(_cross2(hull[i], hull[(i + 1) % len(hull)], point) >= 0 for i in range(len(hull)))


def lattice_length(a: Point, b: Point) -> int:
    return reduce(math.gcd, (abs(x) for x in _sub(b, a)), 0)


# -- subdivisions ------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    """A cell of a regular subdivision.

    ``vertices`` are the geometric vertices (counterclockwise in the plane),
    ``points`` every support point whose lift lies on the supporting
    hyperplane ``h(alpha) = <alpha, v> + r``.
    """

    vertices: tuple[Point, ...]
    points: tuple[Point, ...]
    v: tuple[Fraction, ...]
    r: Fraction

    @property
    def dimension(self) -> int:
        return affine_dimension(self.vertices)

    @property
    def is_simplex(self) -> bool:
        return len(self.vertices) == self.dimension + 1

    def height(self, alpha) -> Fraction:
        return _dot(alpha, self.v) + self.r

    def area(self) -> Fraction:
        if len(self.vertices) < 3:
            return Fraction(0)
        return polygon_area(self.vertices)

    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        if len(vs) == 2:
            return [tuple(sorted(vs))]
        if len(vs) < 2:
            return []
        return [tuple(sorted((vs[i], vs[(i + 1) % len(vs)]))) for i in range(len(vs))]

    def contains(self, alpha) -> bool:
        if len(alpha) == 1:
            lo, hi = min(self.vertices), max(self.vertices)
            return lo <= tuple(alpha) <= hi
        return point_in_polygon(alpha, self.vertices)


@dataclass(frozen=True)
class RegularSubdivision:
    lift: tuple[tuple[Point, Fraction], ...]
    cells: tuple[Cell, ...]
    edges: tuple[tuple[Point, Point], ...]
    dimension: int
    edge_cells: dict = field(compare=False, hash=False, repr=False, default_factory=dict)

    @property
    def points(self) -> tuple[Point, ...]:
        return tuple(p for p, _ in self.lift)

    @property
    def heights(self) -> dict[Point, Fraction]:
        return dict(self.lift)

    @property
    def is_triangulation(self) -> bool:
        return is_triangulation(self)

    def full_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.dimension == self.dimension]

    def inner_edges(self) -> list[tuple[Point, Point]]:
        return [e for e in self.edges if len(self.edge_cells.get(e, ())) == 2]

    def boundary_edges(self) -> list[tuple[Point, Point]]:
        return [e for e in self.edges if len(self.edge_cells.get(e, ())) == 1]

    def total_area(self) -> Fraction:
        return sum((c.area() for c in self.cells), Fraction(0))


def _normalize_lift(lift: Lift) -> list[tuple[Point, Fraction]]:
    if not lift:
        raise InvalidInput("lift must have at least one point")
    items = sorted((tuple(int(k) for k in p), as_fraction(h)) for p, h in lift.items())
    if len({len(p) for p, _ in items}) != 1:
        raise InvalidInput("all support points must have the same dimension")
    return items


def _integer_heights(items) -> tuple[list[int], int]:
    denom = reduce(lambda a, b: a * b // math.gcd(a, b), (h.denominator for _, h in items), 1)
    return [int(h * denom) for _, h in items], denom


def _lower_hull_1d(params: list[Fraction], heights: list[Fraction]) -> list[list[int]]:
    """Index groups of the lower hull segments of (param, height) points, left to right."""
    order_ = sorted(range(len(params)), key=lambda i: params[i])
    chain: list[int] = []
    for i in order_:
        while len(chain) >= 2:
            a, b = chain[-2], chain[-1]
            # drop b if it lies on or above the segment a..i
            lhs = (heights[b] - heights[a]) * (params[i] - params[a])
            rhs = (heights[i] - heights[a]) * (params[b] - params[a])
            if lhs >= rhs:
                chain.pop()
            else:
                break
        chain.append(i)
    groups = []
    for a, b in zip(chain, chain[1:]):
        members = [
            i for i in order_
            if params[a] <= params[i] <= params[b]
            and (heights[i] - heights[a]) * (params[b] - params[a]) == (heights[b] - heights[a]) * (params[i] - params[a])
        ]
        groups.append(members)
    return groups


def _subdivision_1d(items) -> RegularSubdivision:
    pts = [p for p, _ in items]
    hs = [h for _, h in items]
    base = pts[0]
    n = len(base)
    if len(pts) == 1:
        cell = Cell((base,), (base,), tuple(Fraction(0) for _ in range(n)), hs[0])
        return RegularSubdivision(tuple(items), (cell,), (), 0, {})
    diff = next(_sub(p, base) for p in pts[1:] if p != base)
    g = reduce(math.gcd, (abs(x) for x in diff), 0)
    direction = tuple(x // g for x in diff)
    dd = _dot(direction, direction)
    params = [Fraction(_dot(_sub(p, base), direction), dd) for p in pts]
    cells = []
    edges = []
    edge_cells = {}
    for group in _lower_hull_1d(params, hs):
        a, b = group[0], group[-1]
        slope = (hs[b] - hs[a]) / (params[b] - params[a])
        v = tuple(slope * x / dd for x in direction)
        r = hs[a] - _dot(pts[a], v)
        members = tuple(sorted(pts[i] for i in group))
        cell = Cell((pts[a], pts[b]), members, v, r)
        cells.append(cell)
        e = tuple(sorted((pts[a], pts[b])))
        edges.append(e)
        edge_cells[e] = (len(cells) - 1,)
    return RegularSubdivision(tuple(items), tuple(cells), tuple(sorted(edges)), 1, edge_cells)


def lower_hull_subdivision(lift: Lift) -> RegularSubdivision:
    """Project the lower facets of ``conv{(alpha, lift[alpha])}`` to the support.

    Ties are kept: several points on one lower facet give a single
    non-simplex cell.  Collinear planar supports give a 1-dimensional
    subdivision.
    """
    items = _normalize_lift(lift)
    n = len(items[0][0])
    if n not in (1, 2):
        raise UnsupportedDimension(f"subdivisions are supported for n = 1, 2, not {n}")
    pts = [p for p, _ in items]
    if n == 1 or affine_dimension(pts) < 2:
        return _subdivision_1d(items)

    H, denom = _integer_heights(items)
    N = len(pts)
    seen = set()
    cells = []
    for i, j, k in itertools.combinations(range(N), 3):
        area2 = _cross2(pts[i], pts[j], pts[k])
        if area2 == 0:
            continue
        if area2 < 0:
            j, k = k, j
            area2 = -area2
        # plane through the three lifted points: a*x + b*y + c*h = d with c > 0
        (x0, y0), (x1, y1), (x2, y2) = pts[i], pts[j], pts[k]
        u = (x1 - x0, y1 - y0, H[j] - H[i])
        w = (x2 - x0, y2 - y0, H[k] - H[i])
        a, b, c = _cross3(u, w)
        d = a * x0 + b * y0 + c * H[i]
        key = None
        ok = True
        on = []
        for m in range(N):
            s = a * pts[m][0] + b * pts[m][1] + c * H[m] - d
            if s < 0:
                ok = False
                break
            if s == 0:
                on.append(m)
        if not ok:
            continue
        key = tuple(on)
        if key in seen:
            continue
        seen.add(key)
        # h = <alpha, v> + r in original height units
        v = (Fraction(-a, c * denom), Fraction(-b, c * denom))
        r = Fraction(d, c * denom)
        members = tuple(pts[m] for m in on)
        cells.append(Cell(tuple(hull_2d(members)), members, v, r))

    cells.sort(key=lambda c: c.vertices)
    edge_cells: dict = {}
    for idx, cell in enumerate(cells):
        for e in cell.edges():
            edge_cells.setdefault(e, []).append(idx)
    edge_cells = {e: tuple(v) for e, v in edge_cells.items()}
    return RegularSubdivision(tuple(items), tuple(cells), tuple(sorted(edge_cells)), 2, edge_cells)


def is_triangulation(sub: RegularSubdivision) -> bool:
    """Every full-dimensional cell is a simplex using only its vertices."""
    return all(
        c.is_simplex and len(c.points) == len(c.vertices)
        for c in sub.cells
        if c.dimension == sub.dimension
    )


def perturb_to_triangulation(lift: Lift, seed: int = 0) -> dict[Point, Fraction]:
    """Generic rational perturbation (each height moves by at most 2**-20).

    Returns the input unchanged when it already induces a triangulation.
    """
    items = _normalize_lift(lift)
    if is_triangulation(lower_hull_subdivision(dict(items))):
        return dict(items)
    rng = random.Random(seed)
    scale = 2**40
    while True:
        candidate = {
            p: h + PERTURBATION_BOUND * Fraction(rng.randrange(scale + 1), scale)
            for p, h in items
        }
        if is_triangulation(lower_hull_subdivision(candidate)):
            return candidate


def truncate(poly, cell):
    """Terms of ``poly`` whose exponents lie in ``cell`` (a Cell or a point collection)."""
    if isinstance(cell, Cell):
        inside = cell.contains
    else:
        region = [tuple(p) for p in cell]
        if not region:
            raise EmptyTruncation("empty cell")
        if len(region[0]) == 1:
            lo, hi = min(region), max(region)
            inside = lambda a: lo <= tuple(a) <= hi  # noqa: E731
        else:
            inside = lambda a: point_in_polygon(a, region)  # noqa: E731
    keep = [e for e in poly.support if inside(e)]
    if not keep:
        raise EmptyTruncation("no term of the polynomial lies in the cell")
    return poly.restricted(keep)


# -- JSON ---------------------------------------------------------------------

def subdivision_to_dict(sub: RegularSubdivision) -> dict:
    index = {p: i for i, p in enumerate(sub.points)}
    return {
        "kind": "subdivision",
        "points": [list(p) for p in sub.points],
        "heights": [fraction_str(h) for _, h in sub.lift],
        "dimension": sub.dimension,
        "is_triangulation": sub.is_triangulation,
        "cells": [
            {
                "vertices": [index[p] for p in c.vertices],
                "points": [index[p] for p in c.points],
                "v": [fraction_str(x) for x in c.v],
                "r": fraction_str(c.r),
            }
            for c in sub.cells
        ],
        "edges": [[index[a], index[b]] for a, b in sub.edges],
    }


def subdivision_from_dict(doc: dict) -> RegularSubdivision:
    """Rebuild a subdivision by recomputing it from the stored lift."""
    points = [tuple(p) for p in doc["points"]]
    heights = [as_fraction(h) for h in doc["heights"]]
    return lower_hull_subdivision(dict(zip(points, heights)))
