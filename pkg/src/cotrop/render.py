"""Deterministic SVG figures.

Numbers are written with 9 significant digits and elements are emitted in
a fixed order, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from xml.sax.saxutils import escape

import numpy as np

from .coamoeba import CoamoebaModel, simplex_coamoeba_polygons_2d
from .errors import OutOfRange, TargetMismatch
from .newton import RegularSubdivision, hull_2d
from .puiseux import TWO_PI
from .sampler import TorusRaster
from .tropical import TropicalCurve

TARGETS = ("newton", "tropical_curve", "coamoeba_model", "raster")

PALETTE = {
    "background": "#ffffff",
    "piece": "#7fa7d9",
    "piece_stroke": "#2b5c9e",
    "codual": "#c0392b",
    "codual_external": "#e67e22",
    "curve": "#222222",
    "vertex": "#111111",
    "cell": "#dfe8f5",
    "cell_stroke": "#34495e",
    "point": "#34495e",
    "unused": "#bbbbbb",
    "raster": "#1f3b63",
    "frame": "#888888",
}


@dataclass(frozen=True)
class RenderSpec:
    target: str
    width: int = 512
    height: int = 512
    domains: int = 1
    stroke: float = 1.5
    dot: float = 3.0

    def __post_init__(self):
        if self.target not in TARGETS:
            raise TargetMismatch(f"unknown render target {self.target!r}")
        if not (64 <= self.width <= 4096 and 64 <= self.height <= 4096):
            raise OutOfRange("viewport sides must lie in [64, 4096]")
        if not (1 <= self.domains <= 4):
            raise OutOfRange("domains must lie in [1, 4]")


def fmt(x) -> str:
    s = f"{float(x):.9g}"
    return "0" if s in ("-0", "0") else s


def _points(pts) -> str:
    return " ".join(f"{fmt(x)},{fmt(y)}" for x, y in pts)


class _Doc:
    def __init__(self, spec: RenderSpec):
        self.spec = spec
        self.defs: list[str] = []
        self.body: list[str] = []

    def text(self) -> str:
        w, h = self.spec.width, self.spec.height
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
            f'version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
            f'<rect x="0" y="0" width="{w}" height="{h}" fill="{PALETTE["background"]}"/>',
        ]
        defs = ["<defs>"] + self.defs + ["</defs>"] if self.defs else []
        return "\n".join(head + defs + self.body + ["</svg>"]) + "\n"


# -- torus figures ------------------------------------------------------------------

class _TorusFrame:
    """Maps angles in [0, 2pi k]^2 to pixels with ``theta_2`` pointing up."""

    def __init__(self, spec: RenderSpec):
        self.k = spec.domains
        self.sx = spec.width / (TWO_PI * self.k)
        self.sy = spec.height / (TWO_PI * self.k)
        self.h = spec.height

    def __call__(self, p):
        return (p[0] * self.sx, self.h - p[1] * self.sy)

    def shift(self, i, j):
        return (TWO_PI * i * self.sx, -TWO_PI * j * self.sy)


def _domain_grid(doc: _Doc, frame: _TorusFrame):
    spec = doc.spec
    doc.defs.append(f'<clipPath id="viewport"><rect x="0" y="0" width="{spec.width}" height="{spec.height}"/></clipPath>')
    for i in range(1, frame.k):
        x = fmt(TWO_PI * i * frame.sx)
        y = fmt(frame.h - TWO_PI * i * frame.sy)
        doc.body.append(f'<line class="domain" x1="{x}" y1="0" x2="{x}" y2="{spec.height}" stroke="{PALETTE["frame"]}" stroke-dasharray="4 3"/>')
        doc.body.append(f'<line class="domain" x1="0" y1="{y}" x2="{spec.width}" y2="{y}" stroke="{PALETTE["frame"]}" stroke-dasharray="4 3"/>')


def _line_segments(normal, offset, k: int):
    """Segments of ``<normal, x> = offset mod 2pi`` inside [0, 2pi k]^2."""
    n1, n2 = float(normal[0]), float(normal[1])
    size = TWO_PI * k
    reach = int(abs(normal[0]) + abs(normal[1])) * k + 1
    segs = []
    for m in range(-reach, reach + 1):
        c = offset + TWO_PI * m
        pts = []
        if n2 != 0:
            for x in (0.0, size):
                y = (c - n1 * x) / n2
                if -1e-12 <= y <= size + 1e-12:
                    pts.append((x, min(max(y, 0.0), size)))
        if n1 != 0:
            for y in (0.0, size):
                x = (c - n2 * y) / n1
                if -1e-12 <= x <= size + 1e-12:
                    pts.append((min(max(x, 0.0), size), y))
        pts = sorted(set((round(x, 12), round(y, 12)) for x, y in pts))
        if len(pts) >= 2 and pts[0] != pts[-1]:
            segs.append((pts[0], pts[-1]))
    return segs


def _render_model(model: CoamoebaModel, doc: _Doc):
    frame = _TorusFrame(doc.spec)
    _domain_grid(doc, frame)
    tri_id = 0
    uses = []
    for p_idx, piece in enumerate(model.pieces):
        for tri in simplex_coamoeba_polygons_2d(piece):
            pid = f"t{tri_id}"
            doc.defs.append(
                f'<polygon id="{pid}" class="piece piece-{p_idx}" points="{_points(frame(q) for q in tri)}" '
                f'fill="{PALETTE["piece"]}" fill-opacity="0.75" stroke="{PALETTE["piece_stroke"]}" stroke-width="0.5"/>'
            )
            lo = np.floor(tri.min(axis=0) / TWO_PI).astype(int)
            hi = np.floor(tri.max(axis=0) / TWO_PI).astype(int)
            for i in range(-hi[0], frame.k - lo[0]):
                for j in range(-hi[1], frame.k - lo[1]):
                    dx, dy = frame.shift(i, j)
                    uses.append(f'<use xlink:href="#{pid}" x="{fmt(dx)}" y="{fmt(dy)}"/>')
            tri_id += 1
    doc.body.append('<g class="pieces" clip-path="url(#viewport)">')
    doc.body.extend(uses)
    doc.body.append("</g>")
    for h in model.codual_lines:
        segs = _line_segments(h.normal, h.offset, frame.k)
        d = " ".join(f"M{fmt(frame(a)[0])},{fmt(frame(a)[1])} L{fmt(frame(b)[0])},{fmt(frame(b)[1])}" for a, b in segs)
        color = PALETTE["codual_external"] if h.external else PALETTE["codual"]
        kind = "external" if h.external else "inner"
        doc.body.append(
            f'<path class="codual {kind}" d="{d}" fill="none" stroke="{color}" stroke-width="{fmt(doc.spec.stroke)}"/>'
        )


def _render_raster(raster: TorusRaster, doc: _Doc):
    frame = _TorusFrame(doc.spec)
    _domain_grid(doc, frame)
    r = raster.size
    cw = TWO_PI / r * frame.sx
    ch = TWO_PI / r * frame.sy
    rects = []
    occ = raster.occupancy
    for j in range(r):
        col = occ[:, j]
        if not col.any():
            continue
        padded = np.concatenate([[False], col, [False]])
        edges = np.flatnonzero(padded[1:] != padded[:-1])
        for start, stop in zip(edges[::2], edges[1::2]):
            rects.append(
                f'<rect x="{fmt(start * cw)}" y="{fmt(frame.h - (j + 1) * ch)}" '
                f'width="{fmt((stop - start) * cw)}" height="{fmt(ch)}"/>'
            )
    doc.defs.append('<g id="raster">' + "".join(rects) + "</g>")
    doc.body.append(f'<g class="raster" fill="{PALETTE["raster"]}" shape-rendering="crispEdges">')
    for i in range(frame.k):
        for j in range(frame.k):
            dx, dy = frame.shift(i, j)
            doc.body.append(f'<use xlink:href="#raster" x="{fmt(dx)}" y="{fmt(dy)}"/>')
    doc.body.append("</g>")


# -- planar figures ----------------------------------------------------------------------

class _Box:
    def __init__(self, pts, spec: RenderSpec, pad=0.15):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = np.maximum(hi - lo, 1.0)
        self.lo = lo - pad * span
        self.hi = hi + pad * span
        scale = min(spec.width / (self.hi[0] - self.lo[0]), spec.height / (self.hi[1] - self.lo[1]))
        self.scale = scale
        self.ox = (spec.width - scale * (self.hi[0] - self.lo[0])) / 2
        self.oy = (spec.height - scale * (self.hi[1] - self.lo[1])) / 2
        self.h = spec.height

    def __call__(self, p):
        x = self.ox + (float(p[0]) - self.lo[0]) * self.scale
        y = self.h - (self.oy + (float(p[1]) - self.lo[1]) * self.scale)
        return (x, y)

    def exit_point(self, p, d):
        """Where the ray ``p + s d`` leaves the padded box."""
        p = np.array([float(p[0]), float(p[1])])
        d = np.array([float(d[0]), float(d[1])])
        best = math.inf
        for axis in (0, 1):
            if d[axis] > 0:
                best = min(best, (self.hi[axis] - p[axis]) / d[axis])
            elif d[axis] < 0:
                best = min(best, (self.lo[axis] - p[axis]) / d[axis])
        return p + max(best, 0.0) * d


def _render_curve(curve: TropicalCurve, doc: _Doc):
    spec = doc.spec
    doc.defs.append(
        '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto">'
        f'<path d="M0,0 L10,5 L0,10 z" fill="{PALETTE["curve"]}"/></marker>'
    )
    if curve.vertices:
        box = _Box([[float(x) for x in v] for v in curve.vertices], spec, pad=0.6)
    else:
        anchors = []
        for normal, offset, _ in curve.lines:
            nn = normal[0] ** 2 + normal[1] ** 2
            anchors.append([float(offset) * normal[0] / nn, float(offset) * normal[1] / nn])
        box = _Box(anchors, spec, pad=2.0)
    for i, j, w in curve.edges:
        a, b = box(curve.vertices[i]), box(curve.vertices[j])
        doc.body.append(
            f'<line class="edge" x1="{fmt(a[0])}" y1="{fmt(a[1])}" x2="{fmt(b[0])}" y2="{fmt(b[1])}" '
            f'stroke="{PALETTE["curve"]}" stroke-width="{fmt(spec.stroke * w)}" data-weight="{w}"/>'
        )
    for i, d, w in curve.rays:
        a = box(curve.vertices[i])
        b = box(box.exit_point(curve.vertices[i], d))
        doc.body.append(
            f'<line class="ray" x1="{fmt(a[0])}" y1="{fmt(a[1])}" x2="{fmt(b[0])}" y2="{fmt(b[1])}" '
            f'stroke="{PALETTE["curve"]}" stroke-width="{fmt(spec.stroke * w)}" marker-end="url(#arrow)" data-weight="{w}"/>'
        )
    for normal, offset, w in curve.lines:
        nn = normal[0] ** 2 + normal[1] ** 2
        p = (float(offset) * normal[0] / nn, float(offset) * normal[1] / nn)
        d = (-normal[1], normal[0])
        a = box(box.exit_point(p, (-d[0], -d[1])))
        b = box(box.exit_point(p, d))
        doc.body.append(
            f'<line class="line" x1="{fmt(a[0])}" y1="{fmt(a[1])}" x2="{fmt(b[0])}" y2="{fmt(b[1])}" '
            f'stroke="{PALETTE["curve"]}" stroke-width="{fmt(spec.stroke * w)}" data-weight="{w}"/>'
        )
    for v in curve.vertices:
        c = box(v)
        doc.body.append(f'<circle class="vertex" cx="{fmt(c[0])}" cy="{fmt(c[1])}" r="{fmt(spec.dot)}" fill="{PALETTE["vertex"]}"/>')


def _render_newton(sub: RegularSubdivision, doc: _Doc):
    spec = doc.spec
    pts = sub.points
    box = _Box([list(p) for p in pts], spec)
    used = {p for c in sub.cells for p in c.points}
    outline = hull_2d(pts)
    if len(outline) >= 3:
        doc.body.append(
            f'<polygon class="polytope" points="{_points(box(p) for p in outline)}" fill="{PALETTE["cell"]}" stroke="none"/>'
        )
    for c in sub.cells:
        if len(c.vertices) >= 3:
            doc.body.append(
                f'<polygon class="cell" points="{_points(box(p) for p in c.vertices)}" fill="none" '
                f'stroke="{PALETTE["cell_stroke"]}" stroke-width="{fmt(spec.stroke)}" '
                f'data-v="{escape(",".join(str(Fraction(x)) for x in c.v))}" data-r="{c.r}"/>'
            )
        elif len(c.vertices) == 2:
            a, b = box(c.vertices[0]), box(c.vertices[1])
            doc.body.append(
                f'<line class="cell" x1="{fmt(a[0])}" y1="{fmt(a[1])}" x2="{fmt(b[0])}" y2="{fmt(b[1])}" '
                f'stroke="{PALETTE["cell_stroke"]}" stroke-width="{fmt(spec.stroke)}"/>'
            )
    for p in pts:
        c = box(p)
        color = PALETTE["point"] if p in used else PALETTE["unused"]
        cls = "point" if p in used else "point unused"
        doc.body.append(f'<circle class="{cls}" cx="{fmt(c[0])}" cy="{fmt(c[1])}" r="{fmt(spec.dot)}" fill="{color}"/>')


def render_svg(data, spec: RenderSpec) -> str:
    expected = {
        "newton": RegularSubdivision,
        "tropical_curve": TropicalCurve,
        "coamoeba_model": CoamoebaModel,
        "raster": TorusRaster,
    }[spec.target]
    if not isinstance(data, expected):
        raise TargetMismatch(f"target {spec.target!r} needs a {expected.__name__}, got {type(data).__name__}")
    if spec.target == "newton" and len(data.points[0]) != 2:
        raise TargetMismatch("only planar subdivisions can be drawn")
    doc = _Doc(spec)
    {
        "newton": _render_newton,
        "tropical_curve": _render_curve,
        "coamoeba_model": _render_model,
        "raster": _render_raster,
    }[spec.target](data, doc)
    return doc.text()
