from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import ConvexHull

from conftest import planar_lifts
from cotrop.errors import EmptyTruncation, InvalidInput
from cotrop.newton import (
    PERTURBATION_BOUND, convex_hull, is_triangulation, lower_hull_subdivision,
    perturb_to_triangulation, subdivision_from_dict, subdivision_to_dict, truncate,
)
from cotrop.polynomial import PolynomialOverSeries
from cotrop.puiseux import PuiseuxSeries

SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def cells_of(sub):
    return sorted(sorted(c.vertices) for c in sub.full_cells())


def test_convex_hull_examples():
    hull = convex_hull([(0, 0), (3, 0), (0, 3), (1, 1), (3, 2), (2, 3)])
    assert len(hull.vertices) == 5
    assert hull.dimension == 2
    assert len(convex_hull([(0, 0), (1, 0), (2, 0)]).vertices) == 2
    tet = convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0), (1, 1, 1)][:-1] + [(1, 1, 1)])
    assert tet.dimension == 3 and len(tet.vertices) == 5


def test_hull_of_example_curve():
    # w^3 z^2 + w z^3 + 1 style supports with an interior point
    hull = convex_hull([(0, 0), (3, 1), (2, 3), (1, 1), (2, 2)])
    assert sorted(hull.vertices) == [(0, 0), (2, 3), (3, 1)]


def test_square_heights():
    lift = dict(zip(SQUARE, [0, 0, 0, -1]))
    assert cells_of(lower_hull_subdivision(lift)) == [
        [(0, 0), (0, 1), (1, 1)], [(0, 0), (1, 0), (1, 1)],
    ]
    lift = dict(zip(SQUARE, [0, 0, 0, 1]))
    sub = lower_hull_subdivision(lift)
    assert cells_of(sub) == [[(0, 0), (0, 1), (1, 0)], [(0, 1), (1, 0), (1, 1)]]
    assert sub.is_triangulation and len(sub.edges) == 5 and len(sub.inner_edges()) == 1


def test_ties_and_triangulation_flags():
    sub = lower_hull_subdivision(dict.fromkeys(SQUARE, 0))
    assert len(sub.full_cells()) == 1 and not is_triangulation(sub)
    assert is_triangulation(lower_hull_subdivision({(0, 0): 0, (1, 0): 0, (0, 1): 0}))
    # a lattice point on the unique cell keeps it from being a triangulation
    sub = lower_hull_subdivision({(0, 0): 0, (2, 0): 0, (0, 2): 0, (1, 0): 0})
    assert not sub.is_triangulation


def test_lower_hull_errors():
    with pytest.raises(InvalidInput):
        lower_hull_subdivision({})
    with pytest.raises(InvalidInput):
        lower_hull_subdivision({(0, 0): 0, (1,): 0})


def test_collinear_support_is_one_dimensional():
    sub = lower_hull_subdivision({(0, 0): 0, (1, 1): 1, (2, 2): 0})
    assert sub.dimension == 1
    assert sub.edges == (((0, 0), (2, 2)),)


def test_perturbation_examples():
    flat = dict.fromkeys(SQUARE, Fraction(0))
    out = perturb_to_triangulation(flat, seed=3)
    assert lower_hull_subdivision(out).is_triangulation
    assert all(abs(out[p] - flat[p]) <= PERTURBATION_BOUND for p in flat)
    assert out == perturb_to_triangulation(flat, seed=3)
    good = dict(zip(SQUARE, map(Fraction, [0, 0, 0, 1])))
    assert perturb_to_triangulation(good, seed=1) == good


def test_truncate_examples():
    one = PuiseuxSeries.monomial(1)
    f = PolynomialOverSeries(dict.fromkeys(SQUARE, one))
    g = truncate(f, [(0, 0), (1, 0), (1, 1)])
    assert sorted(g.support) == [(0, 0), (1, 0), (1, 1)]
    assert truncate(f, SQUARE) == f
    with pytest.raises(EmptyTruncation):
        truncate(f, [(3, 3), (4, 3), (4, 4)])
    sub = lower_hull_subdivision(dict(zip(SQUARE, [0, 0, 0, -1])))
    assert sorted(truncate(f, sub.full_cells()[0]).support) == sorted(sub.full_cells()[0].vertices)


def test_json_round_trip():
    sub = lower_hull_subdivision({(0, 0): 0, (2, 0): Fraction(1, 3), (0, 2): 0, (1, 1): -1, (2, 2): 5})
    doc = subdivision_to_dict(sub)
    assert subdivision_from_dict(doc) == sub
    assert all(Fraction(c["r"]) == cell.r for c, cell in zip(doc["cells"], sub.cells))


@given(planar_lifts())
def test_areas_sum_to_polytope(lift):
    sub = lower_hull_subdivision(lift)
    assert sub.total_area() == convex_hull(list(lift)).area()


@given(planar_lifts())
def test_supporting_planes(lift):
    sub = lower_hull_subdivision(lift)
    for cell in sub.full_cells():
        on = {a for a, h in lift.items() if cell.height(a) == h}
        assert all(cell.height(a) <= h for a, h in lift.items())
        assert on == set(cell.points)


@given(planar_lifts(), st.integers(-3, 3), st.integers(-3, 3), st.fractions(max_denominator=5))
def test_affine_invariance(lift, c1, c2, d):
    shifted = {a: h + a[0] * c1 + a[1] * c2 + d for a, h in lift.items()}
    assert cells_of(lower_hull_subdivision(shifted)) == cells_of(lower_hull_subdivision(lift))


@given(planar_lifts(max_points=8), st.integers(0, 5))
def test_perturbation_triangulates(lift, seed):
    out = perturb_to_triangulation(lift, seed)
    assert is_triangulation(lower_hull_subdivision(out))
    assert all(abs(out[p] - lift[p]) <= PERTURBATION_BOUND for p in lift)


@given(planar_lifts(max_points=9), st.integers(0, 3))
def test_matches_qhull_on_generic_lifts(lift, seed):
    # independent oracle: lower facets of the lifted points from qhull
    lift = perturb_to_triangulation(lift, seed)
    pts = list(lift)
    generic = {p: float(h) for p, h in lift.items()}
    if len({round(v, 12) for v in generic.values()}) < len(generic):
        return
    if len(pts) == 3:
        assert cells_of(lower_hull_subdivision(lift)) == [sorted(pts)]
        return
    xyz = np.array([[p[0], p[1], float(lift[p])] for p in pts])
    hull = ConvexHull(xyz)
    lower = sorted(
        sorted(pts[i] for i in simplex)
        for simplex, eq in zip(hull.simplices, hull.equations)
        if eq[2] < -1e-9
    )
    assert lower == cells_of(lower_hull_subdivision(lift))
