"""Tropical polynomials and plane tropical curves.

``f_trop(x) = max_alpha <x, alpha> + c_alpha`` with ``c_alpha = -nu(alpha)``.
The corner locus is built by dualizing the regular subdivision of the lift
``nu``: a vertex per 2-cell, a bounded edge per inner edge and a ray per
boundary edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence

from .errors import EmptyCurve, InvalidInput, UnsupportedDimension
from .newton import RegularSubdivision, lattice_length, lower_hull_subdivision
from .puiseux import as_fraction, fraction_str

Point = tuple[int, ...]


@dataclass(frozen=True)
class TropicalPolynomial:
    terms: tuple[tuple[Point, Fraction], ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidInput("a tropical polynomial needs at least one term")
        exps = [e for e, _ in self.terms]
        if len(set(exps)) != len(exps):
            raise InvalidInput("tropical exponents must be distinct")

    @classmethod
    def from_coefficients(cls, coefficients: Mapping) -> "TropicalPolynomial":
        return cls(tuple(sorted((tuple(int(k) for k in e), as_fraction(c)) for e, c in coefficients.items())))

    @classmethod
    def from_lift(cls, lift: Mapping) -> "TropicalPolynomial":
        return cls.from_coefficients({e: -as_fraction(h) for e, h in lift.items()})

    @classmethod
    def from_polynomial(cls, poly) -> "TropicalPolynomial":
        return cls.from_lift(poly.lift())

    @property
    def nvars(self) -> int:
        return len(self.terms[0][0])

    @property
    def coefficients(self) -> dict[Point, Fraction]:
        return dict(self.terms)

    def lift(self) -> dict[Point, Fraction]:
        return {e: -c for e, c in self.terms}

    def __call__(self, x):
        return eval_tropical(self, x)


def _values(p: TropicalPolynomial, x):
    if len(x) != p.nvars:
        raise InvalidInput(f"point has {len(x)} coordinates, polynomial has {p.nvars} variables")
    return [(sum(a * xi for a, xi in zip(e, x)) + c, e) for e, c in p.terms]


def eval_tropical(p: TropicalPolynomial, x) -> Fraction:
    return max(v for v, _ in _values(p, [as_fraction(t) for t in x]))


def maximizer_set(p: TropicalPolynomial, x) -> set[Point]:
    vals = _values(p, [as_fraction(t) for t in x])
    best = max(v for v, _ in vals)
    return {e for v, e in vals if v == best}


def primitive(vector: Sequence) -> tuple[int, ...]:
    """Primitive integer vector along a nonzero rational vector."""
    fr = [as_fraction(x) for x in vector]
    denom = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fr), 1)
    ints = [int(f * denom) for f in fr]
    g = reduce(math.gcd, (abs(k) for k in ints), 0)
    if g == 0:
        raise InvalidInput("zero vector has no primitive direction")
    return tuple(k // g for k in ints)


@dataclass(frozen=True)
class TropicalCurve:
    """Plane tropical curve with its duality to a subdivision.

    ``edges`` are ``(i, j, weight)``, ``rays`` are ``(i, direction, weight)``.
    ``dual_vertices[k]`` is the subdivision cell index of vertex ``k``;
    ``dual_edges`` and ``dual_rays`` give the dual subdivision edge of each
    edge and ray.  A one-dimensional support yields no vertices and a list
    of parallel ``lines`` ``(normal, offset, weight)`` meaning
    ``<x, normal> = offset``.
    """

    vertices: tuple[tuple[Fraction, Fraction], ...]
    edges: tuple[tuple[int, int, int], ...]
    rays: tuple[tuple[int, tuple[int, int], int], ...]
    dual_vertices: tuple[int, ...] = ()
    dual_edges: tuple[tuple[Point, Point], ...] = ()
    dual_rays: tuple[tuple[Point, Point], ...] = ()
    lines: tuple[tuple[tuple[int, int], Fraction, int], ...] = ()
    dual_lines: tuple[tuple[Point, Point], ...] = ()
    subdivision: RegularSubdivision | None = field(default=None, compare=False, repr=False)

    @property
    def is_degenerate(self) -> bool:
        return not self.vertices and bool(self.lines)


def corner_locus_2d(p: TropicalPolynomial) -> TropicalCurve:
    if p.nvars != 2:
        raise UnsupportedDimension("corner locus is computed for plane curves only")
    if len(p.terms) < 2:
        raise EmptyCurve("a single tropical monomial has no corner locus")
    lift = p.lift()
    sub = lower_hull_subdivision(lift)

    if sub.dimension < 2:
        lines, duals = [], []
        for a, b in sub.edges:
            g = lattice_length(a, b)
            normal = tuple((y - x) // g for x, y in zip(a, b))
            # <x, a> - nu(a) = <x, b> - nu(b)
            offset = (lift[b] - lift[a]) / g
            lines.append((normal, offset, g))
            duals.append((a, b))
        return TropicalCurve((), (), (), lines=tuple(lines), dual_lines=tuple(duals), subdivision=sub)

    cell_ids = [k for k, c in enumerate(sub.cells) if c.dimension == 2]
    vertex_of = {k: i for i, k in enumerate(cell_ids)}
    vertices = tuple(tuple(sub.cells[k].v) for k in cell_ids)
    edges, dual_edges, rays, dual_rays = [], [], [], []
    for e in sub.edges:
        owners = sub.edge_cells[e]
        w = lattice_length(*e)
        if len(owners) == 2:
            i, j = sorted(vertex_of[k] for k in owners)
            edges.append((i, j, w))
            dual_edges.append(e)
        else:
            k = owners[0]
            a, b = e
            cell = sub.cells[k]
            d = (b[1] - a[1], a[0] - b[0])
            # orient away from the cell
            inner = next(q for q in cell.vertices if q not in e)
            if d[0] * (inner[0] - a[0]) + d[1] * (inner[1] - a[1]) > 0:
                d = (-d[0], -d[1])
            rays.append((vertex_of[k], primitive(d), w))
            dual_rays.append(e)
    return TropicalCurve(
        vertices, tuple(edges), tuple(rays), tuple(cell_ids), tuple(dual_edges), tuple(dual_rays),
        subdivision=sub,
    )


def duality_check(curve: TropicalCurve, sub: RegularSubdivision) -> bool:
    """Counts match and every curve 1-cell is orthogonal to its dual edge."""
    sub_edges = set(sub.edges)
    if curve.is_degenerate or sub.dimension < 2:
        if len(curve.lines) != len(sub.edges) or curve.vertices:
            return False
        for (normal, _, w), e in zip(curve.lines, curve.dual_lines):
            if e not in sub_edges or lattice_length(*e) != w:
                return False
            if primitive([y - x for x, y in zip(*e)]) not in (normal, tuple(-k for k in normal)):
                return False
        return True

    two_cells = [c for c in sub.cells if c.dimension == 2]
    if len(curve.vertices) != len(two_cells):
        return False
    if len(curve.edges) + len(curve.rays) != len(sub.edges):
        return False
    if sorted(curve.vertices) != sorted(tuple(c.v) for c in two_cells):
        return False
    used = set()
    for (i, j, w), (a, b) in zip(curve.edges, curve.dual_edges):
        direction = [y - x for x, y in zip(curve.vertices[i], curve.vertices[j])]
        if (a, b) not in sub_edges or lattice_length(a, b) != w:
            return False
        if sum((x - y) * d for x, y, d in zip(a, b, direction)) != 0:
            return False
        used.add((a, b))
    for (i, d, w), (a, b) in zip(curve.rays, curve.dual_rays):
        if (a, b) not in sub_edges or lattice_length(a, b) != w:
            return False
        if sum((x - y) * k for x, y, k in zip(a, b, d)) != 0:
            return False
        used.add((a, b))
    return len(used) == len(sub_edges)


def balancing_check(curve: TropicalCurve) -> bool:
    """Weighted primitive outgoing directions sum to zero at every vertex."""
    totals = [[0, 0] for _ in curve.vertices]
    for i, j, w in curve.edges:
        d = primitive([y - x for x, y in zip(curve.vertices[i], curve.vertices[j])])
        totals[i][0] += w * d[0]
        totals[i][1] += w * d[1]
        totals[j][0] -= w * d[0]
        totals[j][1] -= w * d[1]
    for i, d, w in curve.rays:
        totals[i][0] += w * d[0]
        totals[i][1] += w * d[1]
    return all(t == [0, 0] for t in totals)


def curve_points(curve: TropicalCurve, ray_length=1) -> list[tuple[Fraction, ...]]:
    """Sample points on the curve: vertices, edge midpoints and one point per ray."""
    out = list(curve.vertices)
    for i, j, _ in curve.edges:
        out.append(tuple((x + y) / 2 for x, y in zip(curve.vertices[i], curve.vertices[j])))
    for i, d, _ in curve.rays:
        out.append(tuple(x + ray_length * k for x, k in zip(curve.vertices[i], d)))
    return out


def curve_to_dict(curve: TropicalCurve) -> dict:
    return {
        "kind": "tropical_curve",
        "vertices": [[fraction_str(x) for x in v] for v in curve.vertices],
        "edges": [{"from": i, "to": j, "weight": w, "dual": [list(a), list(b)]}
                  for (i, j, w), (a, b) in zip(curve.edges, curve.dual_edges)],
        "rays": [{"from": i, "direction": list(d), "weight": w, "dual": [list(a), list(b)]}
                 for (i, d, w), (a, b) in zip(curve.rays, curve.dual_rays)],
        "lines": [{"normal": list(nrm), "offset": fraction_str(c), "weight": w, "dual": [list(a), list(b)]}
                  for (nrm, c, w), (a, b) in zip(curve.lines, curve.dual_lines)],
        "dual_vertices": list(curve.dual_vertices),
    }


def curve_from_dict(doc: dict) -> TropicalCurve:
    return TropicalCurve(
        vertices=tuple(tuple(as_fraction(x) for x in v) for v in doc["vertices"]),
        edges=tuple((e["from"], e["to"], e["weight"]) for e in doc["edges"]),
        rays=tuple((r["from"], tuple(r["direction"]), r["weight"]) for r in doc["rays"]),
        dual_vertices=tuple(doc.get("dual_vertices", ())),
        dual_edges=tuple(tuple(tuple(p) for p in e["dual"]) for e in doc["edges"]),
        dual_rays=tuple(tuple(tuple(p) for p in r["dual"]) for r in doc["rays"]),
        lines=tuple((tuple(x["normal"]), as_fraction(x["offset"]), x["weight"]) for x in doc.get("lines", [])),
        dual_lines=tuple(tuple(tuple(p) for p in x["dual"]) for x in doc.get("lines", [])),
    )
