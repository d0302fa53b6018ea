"""Sampled coamoebas of complex plane curves on a torus raster.

``z`` runs over a grid in (log-modulus, argument); for each node the roots
in ``w`` come from companion-matrix eigenvalues, polished by Newton steps
and kept when their backward error is small.  Neighbouring nodes are
joined into small triangles whose argument images are filled on the
raster, which keeps the picture connected where ``arg w`` moves quickly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import (
    EmptyCurve, EmptyInput, InvalidInput, NotMaximallySparse, OutOfRange, SchemaError,
    SizeMismatch, UnsupportedDimension,
)
from .newton import convex_hull
from .polynomial import ComplexPolynomial, PolynomialOverSeries
from .puiseux import TWO_PI

# triangles longer than this many cells are treated as jumps between sheets
MAX_FILL_EDGE = 8.0
# arcs of arg w along constant arg z are filled when shorter than this
MAX_ARC = math.pi / 2
NEWTON_STEPS = 2


@dataclass(frozen=True)
class SampleConfig:
    m_range: tuple[float, float] = (-8.0, 8.0)
    m_count: int = 512
    k_count: int = 512
    raster_size: int = 512
    root_tolerance: float = 1e-8
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.m_count < 16 or self.k_count < 16:
            raise OutOfRange("grid counts must be at least 16")
        if self.raster_size < 128:
            raise OutOfRange("raster size must be at least 128")
        if not (0 < self.root_tolerance <= 1e-6):
            raise OutOfRange("root tolerance must lie in (0, 1e-6]")
        if not self.m_range[0] < self.m_range[1]:
            raise OutOfRange("log-modulus range must be increasing")
        if self.threads < 1:
            raise OutOfRange("threads must be positive")


@dataclass
class TorusRaster:
    """Boolean grid over [0, 2pi)^2; cell ``[i, j]`` has center ``(2pi(i+1/2)/R, 2pi(j+1/2)/R)``.

    The first index is ``arg z``, the second ``arg w``.
    """

    occupancy: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=bool)
        if occ.ndim != 2 or occ.shape[0] != occ.shape[1]:
            raise InvalidInput("a torus raster must be a square 2D array")
        self.occupancy = occ

    @property
    def size(self) -> int:
        return self.occupancy.shape[0]

    @property
    def fraction(self) -> float:
        return float(self.occupancy.mean())

    def centers(self) -> np.ndarray:
        return (np.argwhere(self.occupancy) + 0.5) * (TWO_PI / self.size)

    def to_pgm(self) -> bytes:
        """Binary PGM; image row 0 is the top (largest ``arg w``), columns follow ``arg z``."""
        img = np.where(self.occupancy.T[::-1], 255, 0).astype(np.uint8)
        return f"P5\n{self.size} {self.size}\n255\n".encode() + img.tobytes()

    @classmethod
    def from_pgm(cls, data: bytes) -> "TorusRaster":
        tokens, pos = [], 0
        while len(tokens) < 4:
            while data[pos:pos + 1].isspace():
                pos += 1
            if data[pos:pos + 1] == b"#":
                pos = data.index(b"\n", pos) + 1
                continue
            end = pos
            while not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
        if tokens[0] != b"P5":
            raise SchemaError("not a binary PGM")
        w, h, maxval = (int(t) for t in tokens[1:])
        if w != h or maxval != 255:
            raise SchemaError("expected a square 8-bit PGM")
        pos += 1
        img = np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)
        return cls(img[::-1].T > 127)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_pgm())

    @classmethod
    def load(cls, path) -> "TorusRaster":
        with open(path, "rb") as fh:
            return cls.from_pgm(fh.read())

    def summary(self) -> dict:
        return {"size": self.size, "fraction": self.fraction, "components": complement_components(self)}


# -- polynomial preparation ----------------------------------------------------

def specialize(poly: PolynomialOverSeries, t: float) -> ComplexPolynomial:
    """Evaluate every series coefficient at a numeric ``t``."""
    return ComplexPolynomial({e: a.evaluate(t) for e, a in poly.terms.items()})


def _coefficient_table(poly: ComplexPolynomial, swap: bool):
    """Rows ``(a, b, coefficient)`` with nonnegative exponents, ``b`` the solved variable."""
    rows = [((e[1], e[0]) if swap else e, c) for e, c in poly.terms.items()]
    amin = min(e[0] for e, _ in rows)
    bmin = min(e[1] for e, _ in rows)
    return [(e[0] - amin, e[1] - bmin, c) for e, c in rows]


def _roots_rows(table, degree: int, m: np.ndarray, phi: np.ndarray, tol: float):
    """Roots ``w`` for every ``z = exp(m + i phi)``; rejected roots are NaN."""
    z = np.exp(m[:, None] + 1j * phi[None, :])
    coef = np.zeros((degree + 1,) + z.shape, dtype=complex)
    absz = np.abs(z)
    for a, b, c in table:
        coef[b] += c * z ** a
    flat = coef.reshape(degree + 1, -1)
    n = flat.shape[1]
    with np.errstate(all="ignore"):
        comp = np.zeros((n, degree, degree), dtype=complex)
        comp[:, 0, :] = -(flat[::-1][1:] / flat[degree]).T
        if degree > 1:
            comp[:, np.arange(1, degree), np.arange(degree - 1)] = 1.0
        bad = ~np.isfinite(comp).all(axis=(1, 2)) | (flat[degree] == 0)
        comp[bad] = np.eye(degree)
        w = np.linalg.eigvals(comp)
        for _ in range(NEWTON_STEPS):
            p = np.zeros_like(w)
            dp = np.zeros_like(w)
            for k in range(degree, -1, -1):
                dp = dp * w + p
                p = p * w + flat[k][:, None]
            step = np.where(dp != 0, p / dp, 0)
            w = np.where(np.isfinite(step), w - step, w)
        # backward error: |f| relative to sum of |terms|
        scale = np.zeros(w.shape)
        absw = np.abs(w)
        absz_flat = absz.reshape(-1)[:, None]
        for a, b, c in table:
            scale += abs(c) * absz_flat ** a * absw ** b
        p = np.zeros_like(w)
        for k in range(degree, -1, -1):
            p = p * w + flat[k][:, None]
        ok = np.isfinite(w) & (w != 0) & (np.abs(p) <= tol * scale) & ~bad[:, None]
    w = np.where(ok, w, np.nan)
    return z, w.reshape(z.shape + (degree,))


def _wrap(x):
    return (x + math.pi) % TWO_PI - math.pi


def _match(wp: np.ndarray, wq: np.ndarray) -> np.ndarray:
    """For each root in ``wp`` the index of the closest root in ``wq`` (relative distance)."""
    with np.errstate(invalid="ignore"):
        d = np.abs(wp[..., :, None] - wq[..., None, :]) / (np.abs(wp[..., :, None]) + np.abs(wq[..., None, :]))
    d = np.where(np.isnan(d), np.inf, d)
    return np.argmin(d, axis=-1)


class _Painter:
    def __init__(self, size: int):
        self.size = size
        self.cell = TWO_PI / size
        self.occ = np.zeros((size, size), dtype=bool)

    def mark(self, x, y):
        x = np.asarray(x).ravel()
        y = np.asarray(y).ravel()
        ok = np.isfinite(x) & np.isfinite(y)
        i = np.floor(x[ok] / self.cell).astype(np.int64) % self.size
        j = np.floor(y[ok] / self.cell).astype(np.int64) % self.size
        self.occ[i, j] = True

    def fill(self, x0, y0, dx1, dy1, dx2, dy2, edge):
        """Barycentric supersampling of triangles ``p0, p0 + d1, p0 + d2``."""
        k = np.ceil(2 * edge).astype(np.int64)
        for kk in np.unique(k):
            sel = k == kk
            if kk == 0:
                self.mark(x0[sel], y0[sel])
                continue
            ii, jj = np.meshgrid(np.arange(kk + 1), np.arange(kk + 1), indexing="ij")
            keep = ii + jj <= kk
            u = ii[keep] / kk
            v = jj[keep] / kk
            self.mark(x0[sel, None] + u * dx1[sel, None] + v * dx2[sel, None],
                      y0[sel, None] + u * dy1[sel, None] + v * dy2[sel, None])


def _paint_chunk(table, degree, m_nodes, phi, cfg: SampleConfig) -> np.ndarray:
    z, w = _roots_rows(table, degree, m_nodes, phi, cfg.root_tolerance)
    painter = _Painter(cfg.raster_size)
    cell = painter.cell
    tz = np.angle(z) % TWO_PI
    with np.errstate(invalid="ignore"):
        tw = np.angle(w) % TWO_PI
    rows, cols = z.shape
    painter.mark(np.broadcast_to(tz[..., None], tw.shape), tw)
    if rows < 2:
        return painter.occ

    a = np.arange(rows - 1)[:, None]
    b = np.arange(cols)[None, :]
    bn = (b + 1) % cols

    # arcs of arg w along m-edges (arg z constant)
    idx = _match(w[:-1], w[1:])
    for r in range(degree):
        y0 = tw[:-1, :, r]
        y1 = np.take_along_axis(tw[1:], idx[..., r:r + 1], -1)[..., 0]
        dy = _wrap(y1 - y0)
        with np.errstate(invalid="ignore"):
            ok = np.abs(dy) <= MAX_ARC
        x0 = np.broadcast_to(tz[:-1], y0.shape)[ok]
        zero = np.zeros(x0.shape)
        painter.fill(x0, y0[ok], zero, dy[ok], zero, zero, np.abs(dy[ok]) / cell)

    triangles = [((a, b), (a + 1, b), (a, bn)), ((a + 1, bn), (a + 1, b), (a, bn))]
    for p0, p1, p2 in triangles:
        i1 = _match(w[p0], w[p1])
        i2 = _match(w[p0], w[p2])
        x0 = np.broadcast_to(tz[p0], i1.shape[:2])
        x1 = np.broadcast_to(tz[p1], i1.shape[:2])
        x2 = np.broadcast_to(tz[p2], i1.shape[:2])
        for r in range(degree):
            y0 = tw[p0][..., r]
            y1 = np.take_along_axis(tw[p1], i1[..., r:r + 1], -1)[..., 0]
            y2 = np.take_along_axis(tw[p2], i2[..., r:r + 1], -1)[..., 0]
            dx1, dy1 = _wrap(x1 - x0), _wrap(y1 - y0)
            dx2, dy2 = _wrap(x2 - x0), _wrap(y2 - y0)
            edge = np.maximum.reduce([
                np.hypot(dx1, dy1), np.hypot(dx2, dy2), np.hypot(dx2 - dx1, dy2 - dy1),
            ]) / cell
            with np.errstate(invalid="ignore"):
                ok = (edge <= MAX_FILL_EDGE).ravel()

            def pick(arr):
                return np.ascontiguousarray(arr).ravel()[ok]

            painter.fill(pick(x0), pick(y0), pick(dx1), pick(dy1), pick(dx2), pick(dy2), pick(edge))
    return painter.occ


def sample_coamoeba(poly, cfg: SampleConfig | None = None) -> TorusRaster:
    """Raster of the argument image of ``{f = 0}`` in the torus.

    Deterministic for a given config; the thread count only changes how
    the rows of the ``z`` grid are split.
    """
    cfg = cfg or SampleConfig()
    if isinstance(poly, PolynomialOverSeries):
        raise InvalidInput("specialize a series polynomial to a numeric t before sampling")
    if poly.nvars != 2:
        raise UnsupportedDimension("sampling is implemented for plane curves")
    if len(poly.terms) < 2:
        raise EmptyCurve("a monomial has no zeros in the torus")
    bdeg = {e[1] for e in poly.terms}
    swap = len(bdeg) == 1
    table = _coefficient_table(poly, swap)
    degree = max(b for _, b, _ in table)

    rng = np.random.default_rng(cfg.seed)
    m0, m1 = cfg.m_range
    step = (m1 - m0) / cfg.m_count
    m_nodes = m0 + step * (np.arange(cfg.m_count) + rng.uniform(0.0, 1.0))
    phi = TWO_PI * (np.arange(cfg.k_count) + 0.5) / cfg.k_count

    nchunks = min(cfg.threads * 4 if cfg.threads > 1 else 1, cfg.m_count - 1)
    bounds = np.linspace(0, cfg.m_count - 1, nchunks + 1).astype(int)
    # consecutive chunks share their boundary row so every grid cell is painted once
    jobs = [m_nodes[bounds[i]:bounds[i + 1] + 1] for i in range(nchunks)]
    if cfg.threads == 1:
        parts = [_paint_chunk(table, degree, j, phi, cfg) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(lambda j: _paint_chunk(table, degree, j, phi, cfg), jobs))
    occ = np.logical_or.reduce(parts)
    if swap:
        occ = occ.T
    return TorusRaster(occ, {"grid": [cfg.m_count, cfg.k_count], "seed": cfg.seed})


# -- rescaling and the f_t family ----------------------------------------------------

def _check_t(t: float) -> float:
    t = float(t)
    if not (0 < t <= math.exp(-1) + 1e-15):
        raise OutOfRange(f"t must lie in (0, 1/e], got {t}")
    return t


def ht_rescale(point, t: float) -> tuple[complex, ...]:
    """``|z| -> |z|^(-1/log t)`` coordinate-wise, arguments unchanged."""
    t = _check_t(t)
    power = -1.0 / math.log(t)
    out = []
    for z in point:
        z = complex(z)
        if z == 0:
            raise InvalidInput("coordinates must be nonzero")
        out.append(abs(z) ** power * (z / abs(z)))
    return tuple(out)


def ft_family(poly: ComplexPolynomial, t: float) -> ComplexPolynomial:
    """``a -> a (e t)^(-log|a|)`` for a maximally sparse polynomial."""
    t = _check_t(t)
    hull = convex_hull(poly.support)
    if sorted(hull.vertices) != poly.support:
        raise NotMaximallySparse("the support must equal the vertex set of the Newton polytope")
    base = math.e * t
    return ComplexPolynomial({e: c * base ** (-math.log(abs(c))) for e, c in poly.terms.items()})


# -- topology and distances -------------------------------------------------------------

def _dilate(occ: np.ndarray) -> np.ndarray:
    out = np.zeros_like(occ)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            out |= np.roll(occ, (di, dj), axis=(0, 1))
    return out


def _erode(occ: np.ndarray) -> np.ndarray:
    out = np.ones_like(occ)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            out &= np.roll(occ, (di, dj), axis=(0, 1))
    return out


def torus_closing(occ: np.ndarray) -> np.ndarray:
    """3x3 morphological closing with wraparound."""
    return _erode(_dilate(np.asarray(occ, dtype=bool)))


def complement_components(raster: TorusRaster, closing: bool = True) -> int:
    """Connected components of unmarked cells (4-adjacency, torus wraparound)."""
    occ = torus_closing(raster.occupancy) if closing else raster.occupancy
    labels, n = ndimage.label(~occ)
    if n == 0:
        return 0
    pairs = [(labels[0, :], labels[-1, :]), (labels[:, 0], labels[:, -1])]
    src, dst = [], []
    for p, q in pairs:
        keep = (p > 0) & (q > 0)
        src.append(p[keep] - 1)
        dst.append(q[keep] - 1)
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    count, _ = connected_components(graph, directed=False)
    return int(count)


def raster_hausdorff(a: TorusRaster, b: TorusRaster) -> float:
    """Hausdorff distance between marked cell centers in the flat torus metric."""
    if a.size != b.size:
        raise SizeMismatch(f"raster sizes differ: {a.size} vs {b.size}")
    pa, pb = a.centers(), b.centers()
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyInput("Hausdorff distance needs two nonempty rasters")
    pa = np.mod(pa, TWO_PI)
    pb = np.mod(pb, TWO_PI)
    ta = cKDTree(pa, boxsize=TWO_PI)
    tb = cKDTree(pb, boxsize=TWO_PI)
    return float(max(tb.query(pa)[0].max(), ta.query(pb)[0].max()))


def predicate_raster(predicate, size: int) -> TorusRaster:
    """Evaluate a vectorized membership predicate at cell centers."""
    c = TWO_PI * (np.arange(size) + 0.5) / size
    grid = np.stack(np.meshgrid(c, c, indexing="ij"), axis=-1)
    return TorusRaster(np.asarray(predicate(grid), dtype=bool))


def model_raster(model, size: int, closed: bool = True) -> TorusRaster:
    """Raster of a glued coamoeba model (closed membership by default)."""
    return predicate_raster(lambda g: model.membership(g, closed), size)


def cell_agreement(a: TorusRaster, b: TorusRaster) -> float:
    if a.size != b.size:
        raise SizeMismatch(f"raster sizes differ: {a.size} vs {b.size}")
    return float((a.occupancy == b.occupancy).mean())


def reflect_second(raster: TorusRaster) -> TorusRaster:
    """Image under ``(t1, t2) -> (t1, 2pi - t2)`` on cell centers."""
    occ = raster.occupancy
    return TorusRaster(occ[:, ::-1].copy())
