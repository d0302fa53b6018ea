import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cotrop.coamoeba import (
    EPS_ANGLE, CoamoebaModel, Localization, SimplexCoamoeba, classify_localization, clip_to_domain,
    codual_hyperplane, glue_coamoeba, line_coamoeba_membership, line_coamoeba_polygons,
    line_intersections, model_from_dict, model_to_dict, polygon_area, simplex_coamoeba,
    simplex_coamoeba_polygons_2d, simplex_from_phases, torus_distance,
)
from cotrop.errors import (
    IllegalResolution, InvalidEdge, NotMaximallySparse, NotTriangulation, UnsupportedCell,
    UnsupportedDimension,
)
from cotrop.newton import lower_hull_subdivision
from cotrop.polynomial import ComplexPolynomial

PI = math.pi
TWO_PI = 2 * PI
LINE = ComplexPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1})
F1 = ComplexPolynomial({(2, 3): 1, (3, 1): 1, (0, 0): 1})
F2 = ComplexPolynomial({(2, 2): 1, (1, 0): 1, (0, 1): 1})
SQUARE_NEG = ComplexPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): -math.e})
SQUARE_POS = ComplexPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): math.e})


def model_of(poly):
    return glue_coamoeba(poly, lower_hull_subdivision(poly.lift()))


def in_open_triangle(p, tri, eps=1e-12):
    a, b, c = tri
    def side(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])
    s = [side(a, b, p), side(b, c, p), side(c, a, p)]
    return all(x > eps for x in s) or all(x < -eps for x in s)


def in_triangles(p, triangles):
    for tri in triangles:
        lo = np.floor((tri.min(axis=0) - p) / TWO_PI).astype(int)
        hi = np.ceil((tri.max(axis=0) - p) / TWO_PI).astype(int)
        for i in range(lo[0], hi[0] + 1):
            for j in range(lo[1], hi[1] + 1):
                if in_open_triangle(p + TWO_PI * np.array([i, j]), tri):
                    return True
    return False


def test_membership_examples():
    assert line_coamoeba_membership((2 * PI / 3, 4 * PI / 3))
    assert not line_coamoeba_membership((0, 0))
    assert not line_coamoeba_membership((PI, PI / 3))
    assert line_coamoeba_membership((PI, PI / 3), closed=True)
    with pytest.raises(UnsupportedDimension):
        line_coamoeba_membership((1.0,))


def test_membership_in_three_variables():
    assert line_coamoeba_membership((PI / 2, PI, 3 * PI / 2))
    assert not line_coamoeba_membership((0.1, 0.2, 0.3))
    assert line_coamoeba_membership((PI, 0, 0))
    # the imaginary parts cannot cancel unless r2 = r3 = 0
    assert not line_coamoeba_membership((PI, PI / 2, PI / 2))
    assert line_coamoeba_membership((PI, PI / 2, PI / 2), closed=True)


def test_membership_boundary_by_residual_search():
    # oracle: minimize |1 + r1 e^{i a} + r2 e^{i b}| over a dense grid of r1
    a, b = PI, PI / 3
    best = min(
        abs(1 + r1 * np.exp(1j * a) + r2 * np.exp(1j * b))
        for r1 in np.linspace(0.01, 3, 300) for r2 in np.linspace(1e-6, 0.05, 20)
    )
    assert best < 0.02
    assert line_coamoeba_membership((a, b), closed=True) and not line_coamoeba_membership((a, b))


def test_line_polygons_match_predicate():
    tris = line_coamoeba_polygons()
    assert len(tris) == 2
    assert sum(polygon_area(t) for t in tris) == pytest.approx(PI**2)
    rng = np.random.default_rng(7)
    pts = rng.uniform(0, TWO_PI, (10_000, 2))
    assert np.array_equal(line_coamoeba_membership(pts), [in_triangles(p, tris) for p in pts])
    assert not line_coamoeba_membership((1.3, 1.3))


def test_simplex_examples():
    piece = simplex_coamoeba(LINE)
    assert piece.matrix == ((1, 0), (0, 1)) and piece.phases == (0, 0)
    p2, p1 = simplex_coamoeba(F2), simplex_coamoeba(F1)
    assert p2.matrix == ((1, -1), (2, 1)) and p2.determinant == 3
    assert np.allclose(np.linalg.inv(p2.matrix), np.array([[1, 1], [-2, 1]]) / 3)
    assert p1.determinant == 7
    assert np.allclose(np.linalg.inv(p1.matrix) * 7, np.round(np.linalg.inv(p1.matrix) * 7))
    assert len(simplex_coamoeba_polygons_2d(p2)) == 6
    assert len(simplex_coamoeba_polygons_2d(p1)) == 14
    with pytest.raises(NotMaximallySparse):
        simplex_coamoeba(ComplexPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}))


def covered_area(piece):
    return sum(polygon_area(q) for t in simplex_coamoeba_polygons_2d(piece) for q in clip_to_domain(t))


def test_f1_f2_areas():
    for poly in (F1, F2, LINE):
        assert covered_area(simplex_coamoeba(poly)) == pytest.approx(PI**2, abs=1e-6)


matrices = st.tuples(*[st.integers(-4, 4)] * 4).filter(
    lambda m: 1 <= abs(m[0] * m[3] - m[1] * m[2]) <= 10)
angles = st.floats(0, TWO_PI, exclude_max=True)


def piece_of(m, phases):
    rows = ((m[0], m[1]), (m[2], m[3]))
    det = m[0] * m[3] - m[1] * m[2]
    if det < 0:
        rows, det = rows[::-1], -det
    return SimplexCoamoeba(rows, tuple(phases), det)


@given(matrices, st.tuples(angles, angles))
def test_covering_count_and_area(m, phases):
    piece = piece_of(m, phases)
    tris = simplex_coamoeba_polygons_2d(piece)
    assert len(tris) == 2 * piece.determinant
    # each triangle has area pi^2 / (2 d); the covering preserves total area pi^2
    assert covered_area(piece) == pytest.approx(PI**2, abs=1e-6)


@given(matrices, st.tuples(angles, angles), st.integers(0, 2**16))
def test_pieces_match_predicate(m, phases, seed):
    piece = piece_of(m, phases)
    tris = simplex_coamoeba_polygons_2d(piece)
    pts = np.random.default_rng(seed).uniform(0, TWO_PI, (200, 2))
    assert np.array_equal(piece.membership(pts), [in_triangles(p, tris) for p in pts])


vertex_sets = st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=3, max_size=3, unique=True).filter(
    lambda v: (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) != (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]))


@given(vertex_sets, st.lists(angles, min_size=3, max_size=3))
def test_triangle_vertices_on_two_codual_lines(verts, phases):
    poly = ComplexPolynomial({v: np.exp(1j * p) for v, p in zip(verts, phases)})
    piece = simplex_coamoeba(poly)
    lines = [codual_hyperplane(poly, a, b, True) for a, b in [(verts[0], verts[1]), (verts[1], verts[2]), (verts[0], verts[2])]]
    for tri in simplex_coamoeba_polygons_2d(piece):
        for p in tri:
            assert sum(h.contains(p, 1e-7) for h in lines) >= 2


@given(st.tuples(angles, angles), st.integers(0, 2**16))
def test_phase_equivariance(c, seed):
    before = model_of(SQUARE_NEG)
    rotated = ComplexPolynomial({a: v * np.exp(1j * (a[0] * c[0] + a[1] * c[1])) for a, v in SQUARE_NEG.terms.items()})
    after = model_of(rotated)
    pts = np.random.default_rng(seed).uniform(0, TWO_PI, (500, 2))
    assert np.array_equal(before.membership(pts), after.membership(np.mod(pts - np.array(c), TWO_PI)))


@given(st.floats(0.01, 100), vertex_sets)
def test_modulus_scaling(lam, verts):
    poly = ComplexPolynomial({v: np.exp(1j * k) for k, v in enumerate(verts)})
    scaled = ComplexPolynomial({v: (lam if k else 1) * a for k, (v, a) in enumerate(poly.terms.items())})
    a, b = simplex_coamoeba(poly), simplex_coamoeba(scaled)
    assert a.matrix == b.matrix and np.allclose(a.phases, b.phases)


def test_codual_examples():
    h = codual_hyperplane(LINE, (1, 0), (0, 0))
    assert h.normal == (1, 0) and h.offset == pytest.approx(PI)
    g = ComplexPolynomial({(0, 0): 1, (1, 0): 1j, (0, 1): 1})
    assert codual_hyperplane(g, (1, 0), (0, 0)).offset == pytest.approx(PI / 2)
    with pytest.raises(InvalidEdge):
        codual_hyperplane(LINE, (0, 0), (0, 0))


def test_codual_components_and_intersections():
    h = codual_hyperplane(F1, (2, 3), (0, 0))
    assert h.multiplicity == 1
    k = codual_hyperplane(ComplexPolynomial({(0, 0): 1, (2, 2): 1}), (2, 2), (0, 0))
    assert k.multiplicity == 2
    for base, direction in k.components():
        for s in np.linspace(0, TWO_PI, 7):
            assert k.contains(base + s * direction)
    a = codual_hyperplane(LINE, (1, 0), (0, 0))
    b = codual_hyperplane(LINE, (0, 1), (0, 0))
    assert [tuple(np.round(p, 9)) for p in line_intersections(a, b)] == [(round(PI, 9), round(PI, 9))]
    assert line_intersections(a, a) == []
    assert len(line_intersections(codual_hyperplane(F2, (2, 2), (1, 0)), codual_hyperplane(F2, (2, 2), (0, 1)))) == 3


def test_glue_counts():
    model = model_of(LINE)
    assert len(model.pieces) == 1 and len(model.codual_lines) == 3
    assert all(h.external for h in model.codual_lines)
    model = model_of(SQUARE_NEG)
    assert len(model.pieces) == 2 and len(model.codual_lines) == 5
    assert sum(not h.external for h in model.codual_lines) == 1


def test_glue_errors():
    flat = ComplexPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    with pytest.raises(NotTriangulation):
        model_of(flat)
    hidden = ComplexPolynomial({(0, 0): 1, (2, 0): 1, (0, 2): 1, (1, 0): 1e-3})
    with pytest.raises(UnsupportedCell):
        model_of(hidden)


def test_model_json_round_trip():
    model = model_of(SQUARE_NEG)
    doc = json.loads(json.dumps(model_to_dict(model)))
    assert model_from_dict(doc) == model
    assert len(doc["pieces"][0]["triangles"]) == 2


def test_localization_inner_line_full_dim():
    model = model_of(SQUARE_NEG)
    inner = next(h for h in model.codual_lines if not h.external)
    comps = classify_localization(model, inner, 1024)
    assert comps and all(c.label is Localization.FULL_DIM for c in comps)


def test_localization_positive_square_is_a_fold():
    # with all coefficients positive the inner line is touched from one side only
    model = model_of(SQUARE_POS)
    inner = next(h for h in model.codual_lines if not h.external)
    assert all(c.label is Localization.DISCRETE for c in classify_localization(model, inner, 1024))


def test_localization_lone_simplex():
    model = model_of(LINE)
    cell = TWO_PI / 1024
    crossings = model.intersections()
    for h in model.codual_lines:
        comps = classify_localization(model, h, 1024)
        assert comps and all(c.label is Localization.DISCRETE for c in comps)
        for c in comps:
            assert min(torus_distance(np.array(c.center), p) for p in crossings) <= 2 * cell


def test_illegal_resolution():
    model = model_of(LINE)
    with pytest.raises(IllegalResolution):
        classify_localization(model, model.codual_lines[0], 16)


def test_eps_angle_is_small():
    assert 0 < EPS_ANGLE < 1e-6
    assert isinstance(model_of(LINE), CoamoebaModel)
    assert simplex_from_phases([(0, 0), (0, 1), (1, 0)], {(0, 0): 0, (0, 1): 0, (1, 0): 0}).determinant == 1
