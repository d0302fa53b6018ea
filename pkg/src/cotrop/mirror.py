"""The deformation family ``f_u`` and the tropical mirror of ``f_u``.

The vertices of the Newton simplex keep their coefficients.  Each
remaining support point ``beta`` (monomial coefficient ``xi t**nu``) gets
the coefficient ``xi t**e(u)`` where ``e`` moves from ``nu`` at ``u = 1`` to
the vertex plane at ``u = 0`` and then above it, to infinity as ``u -> -1``.
The mirror polynomial negates exponents in both ``z`` and ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInput, NotMonomial, NotNormalized, OutOfRange, UnsupportedCell
from .newton import affine_dimension, convex_hull
from .polynomial import PolynomialOverSeries
from .puiseux import PuiseuxSeries, as_fraction, order
from .tropical import TropicalCurve, TropicalPolynomial, corner_locus_2d

CLAMP_MARGIN = Fraction(1, 2**20)


@dataclass(frozen=True)
class DeformationContext:
    """Schedule data for one non-vertex exponent ``beta``.

    ``support_value`` is ``<beta, v> + r`` for the plane through the lifted
    vertices of the Newton simplex, after the global shift that makes every
    support value nonnegative.
    """

    beta: tuple[int, ...]
    xi_beta: complex
    nu_beta: Fraction
    support_value: Fraction

    @property
    def is_essential(self) -> bool:
        """True when ``beta`` is lifted strictly below the vertex plane."""
        return self.nu_beta < self.support_value


def _as_parameter(u) -> Fraction:
    try:
        return as_fraction(u)
    except InvalidInput as exc:
        raise OutOfRange(str(exc)) from exc


def deform_exponent(ctx: DeformationContext, u) -> Fraction:
    u = _as_parameter(u)
    if not (-1 < u <= 1):
        raise OutOfRange(f"deformation parameter must lie in (-1, 1], got {u}")
    s = ctx.support_value
    if u >= 0:
        return u * ctx.nu_beta + (1 - u) * s
    return (1 - u) * s - u / (u + 1)


def vertex_plane(poly: PolynomialOverSeries) -> tuple[tuple[Fraction, ...], Fraction, list]:
    """Plane ``h = <alpha, v> + r`` through the lifted vertices of a simplex Newton polytope."""
    hull = convex_hull(poly.support)
    verts = list(hull.vertices)
    n = poly.nvars
    if len(verts) != hull.dimension + 1 or hull.dimension != n:
        raise UnsupportedCell("the Newton polytope must be a full-dimensional simplex")
    lift = poly.lift()
    # solve [alpha 1] [v; r] = h exactly
    rows = [[Fraction(x) for x in a] + [Fraction(1), lift[a]] for a in verts]
    m = n + 1
    for col in range(m):
        piv = next(i for i in range(col, m) if rows[i][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        for i in range(m):
            if i != col and rows[i][col] != 0:
                f = rows[i][col] / rows[col][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    sol = [rows[i][m] / rows[i][i] for i in range(m)]
    return tuple(sol[:n]), sol[n], verts


def deformation_contexts(poly: PolynomialOverSeries) -> tuple[list[DeformationContext], Fraction]:
    """Contexts for every non-vertex exponent, and the power of ``t`` applied to ``f``.

    The shift is the smallest nonnegative rational making every support
    value nonnegative.  Each ``beta`` follows its own schedule.
    """
    v, r, verts = vertex_plane(poly)
    raw = []
    for beta in poly.support:
        if beta in verts:
            continue
        a = poly.terms[beta]
        if not a.is_monomial:
            raise NotMonomial(f"coefficient at {beta} must be a monomial series")
        nu, xi = a.leading()
        raw.append((beta, xi, nu, sum(b * x for b, x in zip(beta, v)) + r))
    shift = max([Fraction(0)] + [-s for *_, s in raw])
    return [DeformationContext(b, xi, nu + shift, s + shift) for b, xi, nu, s in raw], shift


def deform(poly: PolynomialOverSeries, u) -> PolynomialOverSeries:
    """The member ``f_u`` of the deformation family (already multiplied by the shift)."""
    contexts, shift = deformation_contexts(poly)
    terms = {e: a.shifted(shift) for e, a in poly.terms.items()}
    for ctx in contexts:
        terms[ctx.beta] = PuiseuxSeries.monomial(ctx.xi_beta, deform_exponent(ctx, u))
    return PolynomialOverSeries(terms)


def mirror_polynomial(poly: PolynomialOverSeries) -> PolynomialOverSeries:
    """Negate every exponent of ``z`` and of ``t``."""
    return PolynomialOverSeries(
        {tuple(-k for k in e): a.inverted_parameter() for e, a in poly.terms.items()}
    )


def tropicalize(poly) -> TropicalPolynomial:
    return TropicalPolynomial.from_polynomial(poly)


def tropical_mirror(poly: PolynomialOverSeries, u) -> TropicalCurve:
    """Corner locus of the tropicalized mirror of ``f_u`` for ``u`` in (-1, 0]."""
    u = _as_parameter(u)
    if not (-1 < u <= 0):
        raise OutOfRange(f"the tropical mirror is defined for u in (-1, 0], got {u}")
    return corner_locus_2d(tropicalize(mirror_polynomial(deform(poly, u))))


def symmetry_parameter(poly: PolynomialOverSeries, beta=None) -> tuple[Fraction, bool]:
    """``s = -nu(beta)`` clamped into (-1, 0], with a flag telling whether clamping happened.

    Requires every vertex coefficient to have order 0.
    """
    hull = convex_hull(poly.support)
    for a in hull.vertices:
        if order(poly.terms[a]) != 0:
            raise NotNormalized(f"vertex coefficient at {a} has order {order(poly.terms[a])}, expected 0")
    others = [e for e in poly.support if e not in hull.vertices]
    if beta is None:
        if len(others) != 1:
            raise InvalidInput("pass beta explicitly when there is not exactly one non-vertex exponent")
        beta = others[0]
    beta = tuple(beta)
    if beta not in poly.terms:
        raise InvalidInput(f"{beta} is not in the support")
    a = poly.terms[beta]
    if not a.is_monomial:
        raise NotMonomial(f"coefficient at {beta} must be a monomial series")
    s = -order(a)
    if s > 0:
        return Fraction(0), True
    if s <= -1:
        return Fraction(-1) + CLAMP_MARGIN, True
    return s, False


def reflect_curve(curve: TropicalCurve) -> TropicalCurve:
    """Point reflection ``x -> -x`` of a tropical curve."""
    return TropicalCurve(
        vertices=tuple(tuple(-x for x in v) for v in curve.vertices),
        edges=curve.edges,
        rays=tuple((i, tuple(-k for k in d), w) for i, d, w in curve.rays),
        dual_vertices=curve.dual_vertices,
        dual_edges=tuple(tuple(tuple(-k for k in p) for p in e) for e in curve.dual_edges),
        dual_rays=tuple(tuple(tuple(-k for k in p) for p in e) for e in curve.dual_rays),
        lines=tuple((nrm, -c, w) for nrm, c, w in curve.lines),
    )


def is_simplex_support(support) -> bool:
    hull = convex_hull(support)
    return len(hull.vertices) == hull.dimension + 1 and affine_dimension(hull.vertices) == len(hull.vertices[0])

