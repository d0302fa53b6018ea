"""Coamoebas of complex tropical curves.

The only analytic primitive is the coamoeba of the line ``1 + z_1 + ... + z_n``.
A maximally sparse simplex polynomial is a monomial change of coordinates of
that line, so its coamoeba is the preimage of the line coamoeba under the
torus homomorphism ``theta -> M theta + phases``.  A triangulated polynomial
is modelled by one such piece per cell plus the codual lines of the edges.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import (
    IllegalResolution, InvalidEdge, NotMaximallySparse, NotTriangulation,
    UnsupportedCell, UnsupportedDimension,
)
from .newton import RegularSubdivision, affine_dimension, is_triangulation, truncate
from .puiseux import TWO_PI, normalize_angle

EPS_ANGLE = 1e-9
MIN_RESOLUTION = 256


def wrap_pi(x):
    """Reduce angles to (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.where(y <= -math.pi, y + TWO_PI, y)


def torus_distance(a, b):
    """Flat-torus distance between angle vectors (last axis)."""
    d = np.abs(wrap_pi(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    return np.sqrt(np.sum(d * d, axis=-1))


# -- the line coamoeba -------------------------------------------------------

def _membership_2d(theta: np.ndarray, closed: bool) -> np.ndarray:
    phi = wrap_pi(theta - math.pi)
    p1, p2 = phi[..., 0], phi[..., 1]
    total = np.abs(p1) + np.abs(p2)
    if closed:
        return (p1 * p2 <= EPS_ANGLE) & (total <= math.pi + EPS_ANGLE)
    return (
        (p1 * p2 < 0) & (np.abs(p1) > EPS_ANGLE) & (np.abs(p2) > EPS_ANGLE)
        & (total < math.pi - EPS_ANGLE)
    )


def _membership_lp(theta: Sequence[float], closed: bool) -> bool:
    c, s = np.cos(theta), np.sin(theta)
    n = len(theta)
    if closed:
        # 0 in conv{1, e^{i theta_j}}
        a_eq = np.vstack([np.r_[1.0, c], np.r_[0.0, s], np.ones(n + 1)])
        res = linprog(np.zeros(n + 1), A_eq=a_eq, b_eq=[0.0, 0.0, 1.0],
                      bounds=[(0, None)] * (n + 1), method="highs")
        return res.status == 0
    # maximize m subject to r_j >= m, sum r_j e^{i theta_j} = -1, m <= 1
    cost = np.r_[np.zeros(n), -1.0]
    a_eq = np.vstack([np.r_[c, 0.0], np.r_[s, 0.0]])
    a_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=[-1.0, 0.0],
                  bounds=[(0, None)] * n + [(None, 1.0)], method="highs")
    return res.status == 0 and -res.fun > 1e-9


def line_coamoeba_membership(theta, closed: bool = False):
    """Is ``theta`` in the coamoeba of ``1 + z_1 + ... + z_n``?

    Accepts one point or an array of points along the last axis.  The open
    set needs strictly positive moduli; the closed set is its closure.
    """
    arr = np.asarray(theta, dtype=float)
    n = arr.shape[-1]
    if n < 2:
        raise UnsupportedDimension("the line coamoeba needs n >= 2")
    if n == 2:
        out = _membership_2d(arr, closed)
    else:
        flat = arr.reshape(-1, n)
        out = np.array([_membership_lp(p, closed) for p in flat]).reshape(arr.shape[:-1])
    return bool(out) if arr.ndim == 1 else out


def line_coamoeba_polygons() -> list[np.ndarray]:
    pi = math.pi
    return [
        np.array([[pi, 0.0], [pi, pi], [2 * pi, pi]]),
        np.array([[0.0, pi], [pi, pi], [pi, 2 * pi]]),
    ]


# -- simplex pieces ------------------------------------------------------------

@dataclass(frozen=True)
class SimplexCoamoeba:
    """Coamoeba of ``1 + sum_k a_k z^{L e_k}``: preimage of the line coamoeba under ``theta -> M theta + phases``.

    ``matrix`` is ``M`` (the transpose of ``L``), ``base`` the vertex divided
    out, ``vertices`` the remaining vertices in row order.
    """

    matrix: tuple[tuple[int, ...], ...]
    phases: tuple[float, ...]
    determinant: int
    base: tuple[int, ...] = ()
    vertices: tuple[tuple[int, ...], ...] = ()

    @property
    def n(self) -> int:
        return len(self.matrix)

    def transform(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return theta @ np.array(self.matrix, dtype=float).T + np.array(self.phases)

    def membership(self, theta, closed: bool = False):
        return line_coamoeba_membership(self.transform(theta), closed)


def _det(m) -> int:
    return round(np.linalg.det(np.array(m, dtype=float))) if len(m) > 3 else _det_exact(m)


def _det_exact(m) -> int:
    if len(m) == 1:
        return m[0][0]
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return sum((-1) ** j * m[0][j] * _det_exact([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))


def simplex_from_phases(vertices: Sequence[Sequence[int]], phases: dict) -> SimplexCoamoeba:
    """Build the piece from the vertex set and the argument of each coefficient."""
    verts = sorted(tuple(v) for v in vertices)
    n = len(verts[0])
    if len(verts) != n + 1 or affine_dimension(verts) != n:
        raise NotMaximallySparse("support must be the n + 1 vertices of a full-dimensional simplex")
    base, rest = verts[0], verts[1:]
    if n >= 2:
        rows = [tuple(a - b for a, b in zip(v, base)) for v in rest]
        if _det(rows) < 0:
            rest[-1], rest[-2] = rest[-2], rest[-1]
    rows = tuple(tuple(a - b for a, b in zip(v, base)) for v in rest)
    det = _det(rows)
    if n == 1 and det < 0:
        det = -det
    ph = tuple(normalize_angle(phases[v] - phases[base]) for v in rest)
    return SimplexCoamoeba(rows, ph, det, base, tuple(rest))


def simplex_coamoeba(poly, cell=None) -> SimplexCoamoeba:
    """Piece for a maximally sparse simplex polynomial, or for its truncation to ``cell``."""
    if cell is not None:
        poly = truncate(poly, cell)
        verts = cell.vertices if hasattr(cell, "vertices") else cell
        if sorted(map(tuple, verts)) != poly.support:
            raise NotMaximallySparse("the cell contains support points besides its vertices")
    return simplex_from_phases(poly.support, {e: poly.phase(e) for e in poly.support})


def _residues(m: np.ndarray, d: int) -> list[tuple[int, int]]:
    """Representatives of Z^2 / M Z^2."""
    adj = np.array([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]], dtype=np.int64)
    reps, seen = [], set()
    for k in itertools.product(range(d), repeat=2):
        key = tuple(int(x) % d for x in adj @ np.array(k))
        if key not in seen:
            seen.add(key)
            reps.append(k)
    return reps


def simplex_coamoeba_polygons_2d(piece: SimplexCoamoeba) -> list[np.ndarray]:
    """The ``2 det`` preimage triangles, each translated so its centroid is in [0, 2pi)^2."""
    if piece.n != 2:
        raise UnsupportedDimension("polygons are produced for n = 2 only")
    m = np.array(piece.matrix, dtype=float)
    inv = np.linalg.inv(m)
    ph = np.array(piece.phases)
    out = []
    for k in _residues(piece.matrix, piece.determinant):
        shift = TWO_PI * np.array(k, dtype=float)
        for tri in line_coamoeba_polygons():
            pre = (tri - ph + shift) @ inv.T
            centroid = pre.mean(axis=0)
            pre = pre - TWO_PI * np.floor(centroid / TWO_PI)
            out.append(pre)
    return out


def _clip_halfplane(poly: list, axis: int, bound: float, keep_below: bool) -> list:
    out = []
    if not poly:
        return out

    def inside(p):
        return p[axis] <= bound if keep_below else p[axis] >= bound

    for i, cur in enumerate(poly):
        prev = poly[i - 1]
        if inside(cur):
            if not inside(prev):
                out.append(_cross_point(prev, cur, axis, bound))
            out.append(cur)
        elif inside(prev):
            out.append(_cross_point(prev, cur, axis, bound))
    return out


def _cross_point(a, b, axis, bound):
    t = (bound - a[axis]) / (b[axis] - a[axis])
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def clip_to_domain(polygon) -> list[np.ndarray]:
    """Cut a convex polygon into its pieces inside [0, 2pi]^2 after torus translations."""
    pts = np.asarray(polygon, dtype=float)
    lo = np.floor(pts.min(axis=0) / TWO_PI).astype(int)
    hi = np.floor(pts.max(axis=0) / TWO_PI).astype(int)
    pieces = []
    for i in range(lo[0], hi[0] + 1):
        for j in range(lo[1], hi[1] + 1):
            poly = [tuple(p) for p in pts - TWO_PI * np.array([i, j])]
            for axis in (0, 1):
                poly = _clip_halfplane(poly, axis, 0.0, keep_below=False)
                poly = _clip_halfplane(poly, axis, TWO_PI, keep_below=True)
            if len(poly) >= 3 and polygon_area(np.array(poly)) > 1e-15:
                pieces.append(np.array(poly))
    return pieces


def polygon_area(poly) -> float:
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


# -- codual lines ----------------------------------------------------------------

@dataclass(frozen=True)
class CodualHyperplane:
    """``<normal, x> = offset (mod 2pi)`` with ``normal = alpha - beta``."""

    normal: tuple[int, ...]
    offset: float
    edge: tuple[tuple[int, ...], tuple[int, ...]]
    external: bool

    @property
    def multiplicity(self) -> int:
        """Number of parallel closed geodesics making up the line on the torus."""
        return math.gcd(*map(abs, self.normal))

    def residual(self, theta):
        theta = np.asarray(theta, dtype=float)
        return wrap_pi(theta @ np.array(self.normal, dtype=float) - self.offset)

    def contains(self, theta, eps: float = EPS_ANGLE):
        r = np.abs(self.residual(theta)) <= eps
        return bool(r) if np.ndim(r) == 0 else r

    def components(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """``(base point, direction)`` of each closed geodesic; ``base + s * direction``, s in [0, 2pi)."""
        if len(self.normal) != 2:
            raise UnsupportedDimension("geodesic components are computed for n = 2 only")
        g = self.multiplicity
        p, q = (k // g for k in self.normal)
        a, b = _bezout(p, q)
        direction = np.array([-q, p], dtype=float)
        out = []
        for j in range(g):
            c = (self.offset + TWO_PI * j) / g
            out.append((np.mod(c * np.array([a, b], dtype=float), TWO_PI), direction))
        return out


def _bezout(p: int, q: int) -> tuple[int, int]:
    """Integers a, b with a p + b q = 1 for coprime p, q."""
    old_r, r, old_s, s, old_t, t = p, q, 1, 0, 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def codual_hyperplane(poly, alpha, beta, external: bool = False) -> CodualHyperplane:
    alpha, beta = tuple(alpha), tuple(beta)
    if alpha == beta:
        raise InvalidEdge("an edge needs two distinct endpoints")
    normal = tuple(a - b for a, b in zip(alpha, beta))
    offset = normalize_angle(math.pi - poly.phase(alpha) + poly.phase(beta))
    return CodualHyperplane(normal, offset, (alpha, beta), external)


def codual_hyperplanes(poly, sub: RegularSubdivision) -> list[CodualHyperplane]:
    boundary = set(sub.boundary_edges())
    return [codual_hyperplane(poly, a, b, (a, b) in boundary) for a, b in sub.edges]


def line_intersections(h1: CodualHyperplane, h2: CodualHyperplane) -> list[np.ndarray]:
    """Intersection points of two codual lines in [0, 2pi)^2 (empty when parallel)."""
    n = [list(h1.normal), list(h2.normal)]
    d = _det_exact(n)
    if d == 0:
        return []
    inv = np.linalg.inv(np.array(n, dtype=float))
    c = np.array([h1.offset, h2.offset])
    pts = []
    for k in _residues(n, abs(d)):
        pts.append(np.mod((c + TWO_PI * np.array(k, dtype=float)) @ inv.T, TWO_PI))
    return pts


# -- gluing ------------------------------------------------------------------------

@dataclass
class CoamoebaModel:
    pieces: list[SimplexCoamoeba]
    codual_lines: list[CodualHyperplane]
    dimension: int = 2
    cells: list = field(default_factory=list, compare=False)

    def membership(self, theta, closed: bool = False):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape[:-1], dtype=bool)
        for piece in self.pieces:
            out |= np.asarray(piece.membership(theta, closed), dtype=bool)
        return bool(out) if theta.ndim == 1 else out

    def triangles(self) -> list[np.ndarray]:
        return [t for p in self.pieces for t in simplex_coamoeba_polygons_2d(p)]

    def intersections(self) -> list[np.ndarray]:
        pts = []
        for h1, h2 in itertools.combinations(self.codual_lines, 2):
            pts.extend(line_intersections(h1, h2))
        return pts


def glue_coamoeba(poly, sub: RegularSubdivision) -> CoamoebaModel:
    if sub.dimension != 2:
        raise UnsupportedDimension("gluing needs a two-dimensional subdivision")
    if not is_triangulation(sub):
        raise NotTriangulation("the subdivision must be a triangulation")
    pieces = []
    for cell in sub.cells:
        local = truncate(poly, cell)
        if local.support != sorted(cell.vertices):
            raise UnsupportedCell(f"cell {cell.vertices} carries support points besides its vertices")
        pieces.append(simplex_from_phases(cell.vertices, {e: poly.phase(e) for e in cell.vertices}))
    return CoamoebaModel(pieces, codual_hyperplanes(poly, sub), 2, list(sub.cells))


# -- localization ---------------------------------------------------------------------

class Localization(str, Enum):
    FULL_DIM = "FULL_DIM"
    DISCRETE = "DISCRETE"


@dataclass(frozen=True)
class LocalizedComponent:
    label: Localization
    component: int
    start: float
    end: float
    center: tuple[float, float]


def _two_sided(model: CoamoebaModel, points: np.ndarray, normal: np.ndarray,
               tangent: np.ndarray, rho: float) -> np.ndarray:
    hits = []
    for side in (1.0, -1.0):
        probes = [
            points + side * a * normal + b * tangent
            for a in (rho / 4, rho / 2, rho)
            for b in (-rho, -rho / 2, 0.0, rho / 2, rho)
        ]
        inside = np.zeros(len(points), dtype=bool)
        for p in probes:
            inside |= model.membership(p)
        hits.append(inside)
    return hits[0] & hits[1]


def classify_localization(model: CoamoebaModel, line: CodualHyperplane,
                          resolution: int = 1024) -> list[LocalizedComponent]:
    """Label the parts of a codual line where the coamoeba touches it from both sides.

    Each geodesic component is sampled at ``resolution`` points.  A sample
    counts when small probes on both sides of the line meet the open
    coamoeba.  Cyclic runs of such samples longer than four probe radii are
    ``FULL_DIM``; shorter runs are ``DISCRETE`` and reported by their center.
    """
    if model.dimension != 2:
        raise UnsupportedDimension("localization is classified for n = 2 only")
    if resolution < MIN_RESOLUTION:
        raise IllegalResolution(f"resolution must be at least {MIN_RESOLUTION}, got {resolution}")
    rho = 2.0 * TWO_PI / resolution
    out = []
    for idx, (base, direction) in enumerate(line.components()):
        length = float(np.linalg.norm(direction))
        tangent = direction / length
        normal = np.array(line.normal, dtype=float)
        normal = normal / np.linalg.norm(normal)
        s = TWO_PI * (np.arange(resolution) + 0.5) / resolution
        pts = base + s[:, None] * direction
        good = _two_sided(model, pts, normal, tangent, rho)
        step = TWO_PI * length / resolution
        for start, stop in _cyclic_runs(good):
            count = stop - start
            extent = count * step
            mid = (start + stop - 1) / 2.0
            s_mid = TWO_PI * ((mid % resolution) + 0.5) / resolution
            center = np.mod(base + s_mid * direction, TWO_PI)
            label = Localization.FULL_DIM if extent > 4 * rho else Localization.DISCRETE
            s0 = TWO_PI * ((start % resolution) + 0.5) / resolution
            s1 = TWO_PI * (((stop - 1) % resolution) + 0.5) / resolution
            out.append(LocalizedComponent(label, idx, s0, s1, (float(center[0]), float(center[1]))))
    return out


def _cyclic_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True as ``(start, stop)`` indices, merging across the wrap.

    ``stop`` may exceed ``len(mask)`` for a run that wraps.
    """
    n = len(mask)
    if mask.all():
        return [(0, n)]
    if not mask.any():
        return []
    first_false = int(np.argmin(mask))
    rolled = np.roll(mask, -first_false)
    runs = []
    i = 0
    while i < n:
        if rolled[i]:
            j = i
            while j < n and rolled[j]:
                j += 1
            runs.append((i + first_false, j + first_false))
            i = j
        else:
            i += 1
    return runs


# -- JSON -------------------------------------------------------------------------------

def model_to_dict(model: CoamoebaModel) -> dict:
    return {
        "kind": "coamoeba_model",
        "dimension": model.dimension,
        "pieces": [
            {
                "matrix": [list(r) for r in p.matrix],
                "phases": list(p.phases),
                "determinant": p.determinant,
                "base": list(p.base),
                "vertices": [list(v) for v in p.vertices],
                "triangles": [t.tolist() for t in simplex_coamoeba_polygons_2d(p)] if p.n == 2 else [],
            }
            for p in model.pieces
        ],
        "codual_lines": [
            {"normal": list(h.normal), "offset": h.offset, "edge": [list(h.edge[0]), list(h.edge[1])],
             "external": h.external}
            for h in model.codual_lines
        ],
    }


def model_from_dict(doc: dict) -> CoamoebaModel:
    pieces = [
        SimplexCoamoeba(tuple(tuple(r) for r in p["matrix"]), tuple(p["phases"]), p["determinant"],
                        tuple(p.get("base", ())), tuple(tuple(v) for v in p.get("vertices", ())))
        for p in doc["pieces"]
    ]
    lines = [
        CodualHyperplane(tuple(h["normal"]), float(h["offset"]), (tuple(h["edge"][0]), tuple(h["edge"][1])),
                         bool(h["external"]))
        for h in doc["codual_lines"]
    ]
    return CoamoebaModel(pieces, lines, doc.get("dimension", 2))
