from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import planar_lifts
from oracles import kapranov_violations
from cotrop.errors import EmptyCurve, UnsupportedDimension
from cotrop.newton import lower_hull_subdivision
from cotrop.tropical import (
    TropicalCurve, TropicalPolynomial, balancing_check, corner_locus_2d, curve_from_dict,
    curve_to_dict, duality_check, eval_tropical, maximizer_set, primitive,
)

LINE = TropicalPolynomial.from_coefficients({(0, 0): 0, (1, 0): 0, (0, 1): 0})
SQUARE = TropicalPolynomial.from_coefficients({(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): -1})


def tropical_polys(max_terms=12):
    return planar_lifts(max_points=max_terms, box=6).map(TropicalPolynomial.from_lift)


def test_eval_and_maximizers():
    assert eval_tropical(LINE, (1, -2)) == 1
    assert maximizer_set(LINE, (0, 0)) == {(0, 0), (1, 0), (0, 1)}
    assert maximizer_set(SQUARE, (Fraction(1, 2), Fraction(1, 2))) == {(1, 0), (0, 1)}


def test_tropical_line():
    curve = corner_locus_2d(LINE)
    assert curve.vertices == ((0, 0),)
    assert sorted(d for _, d, _ in curve.rays) == [(-1, 0), (0, -1), (1, 1)]
    assert all(w == 1 for *_, w in curve.rays)
    assert duality_check(curve, lower_hull_subdivision(LINE.lift()))
    assert balancing_check(curve)


def test_square_curve():
    curve = corner_locus_2d(SQUARE)
    assert sorted(curve.vertices) == [(0, 0), (1, 1)]
    assert len(curve.edges) == 1 and len(curve.rays) == 4
    assert duality_check(curve, lower_hull_subdivision(SQUARE.lift()))
    assert balancing_check(curve)


def test_square_vertices_by_brute_force_scan():
    # exact scan on a grid of step 1/4: triple maximizers occur exactly at the vertices
    grid = [Fraction(k, 4) for k in range(-8, 13)]
    triple = sorted((x, y) for x in grid for y in grid if len(maximizer_set(SQUARE, (x, y))) >= 3)
    assert triple == [(0, 0), (1, 1)]


def test_single_term_and_dimension():
    with pytest.raises(EmptyCurve):
        corner_locus_2d(TropicalPolynomial.from_coefficients({(1, 1): 0}))
    with pytest.raises(UnsupportedDimension):
        corner_locus_2d(TropicalPolynomial.from_coefficients({(0, 0, 0): 0, (1, 0, 0): 0}))


def test_degenerate_support_gives_lines():
    p = TropicalPolynomial.from_coefficients({(0, 0): 0, (1, 1): 0, (2, 2): -3})
    curve = corner_locus_2d(p)
    assert curve.is_degenerate and not curve.vertices
    assert [(n, c) for n, c, _ in curve.lines] == [((1, 1), 0), ((1, 1), 3)]
    assert duality_check(curve, lower_hull_subdivision(p.lift()))
    assert kapranov_violations(p, curve) == 0


def test_mismatched_subdivision_and_dropped_ray():
    curve = corner_locus_2d(SQUARE)
    assert not duality_check(curve, lower_hull_subdivision(LINE.lift()))
    flipped = TropicalPolynomial.from_coefficients({(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 1})
    assert not duality_check(curve, lower_hull_subdivision(flipped.lift()))
    line = corner_locus_2d(LINE)
    dropped = TropicalCurve(line.vertices, line.edges, line.rays[:-1], line.dual_vertices,
                            line.dual_edges, line.dual_rays[:-1])
    assert not balancing_check(dropped)
    assert not duality_check(dropped, lower_hull_subdivision(LINE.lift()))


def test_primitive():
    assert primitive([4, -6]) == (2, -3)
    assert primitive([Fraction(1, 2), Fraction(1, 3)]) == (3, 2)


def test_json_round_trip():
    curve = corner_locus_2d(TropicalPolynomial.from_coefficients(
        {(0, 0): 0, (2, 0): Fraction(1, 3), (0, 2): 0, (1, 1): 1, (2, 1): -2}))
    assert curve_from_dict(curve_to_dict(curve)) == curve


@given(tropical_polys())
def test_kapranov_grid(p):
    curve = corner_locus_2d(p)
    assert kapranov_violations(p, curve, n=41) == 0


@given(tropical_polys())
def test_duality_and_balancing(p):
    curve = corner_locus_2d(p)
    assert duality_check(curve, curve.subdivision)
    assert balancing_check(curve)


@given(tropical_polys(), st.lists(st.fractions(-5, 5, max_denominator=3), min_size=4, max_size=4))
def test_convexity(p, coords):
    a, b = coords[:2], coords[2:]
    mid = [(x + y) / 2 for x, y in zip(a, b)]
    assert eval_tropical(p, mid) <= (eval_tropical(p, a) + eval_tropical(p, b)) / 2


@given(tropical_polys(), st.integers(-3, 3), st.integers(-3, 3), st.fractions(max_denominator=4))
def test_translation(p, d1, d2, const):
    # c_alpha + <alpha, d> + const moves the curve by -d
    moved = TropicalPolynomial.from_coefficients(
        {e: c + e[0] * d1 + e[1] * d2 + const for e, c in p.terms})
    before, after = corner_locus_2d(p), corner_locus_2d(moved)
    assert sorted(after.vertices) == sorted((x - d1, y - d2) for x, y in before.vertices)
    assert sorted(d for _, d, _ in after.rays) == sorted(d for _, d, _ in before.rays)
