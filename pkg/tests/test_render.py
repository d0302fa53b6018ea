import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from cotrop.coamoeba import glue_coamoeba
from cotrop.errors import OutOfRange, TargetMismatch
from cotrop.newton import lower_hull_subdivision
from cotrop.polynomial import ComplexPolynomial
from cotrop.render import RenderSpec, fmt, render_svg
from cotrop.sampler import TorusRaster
from cotrop.tropical import TropicalPolynomial, corner_locus_2d

NS = "{http://www.w3.org/2000/svg}"
LINE = ComplexPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1})
F1 = ComplexPolynomial({(2, 3): 1, (3, 1): 1, (0, 0): 1})
SQUARE = ComplexPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): -math.e})


def model_of(poly):
    return glue_coamoeba(poly, lower_hull_subdivision(poly.lift()))


def parse(svg):
    return ET.fromstring(svg)


def count(root, tag, cls=None):
    return sum(1 for el in root.iter(NS + tag) if cls is None or cls in el.get("class", "").split())


def test_line_model():
    root = parse(render_svg(model_of(LINE), RenderSpec("coamoeba_model")))
    assert count(root, "polygon") == 2
    assert count(root, "path", "codual") == 3
    assert root.get("width") == "512"


def test_f1_model_and_domains():
    model = model_of(F1)
    assert count(parse(render_svg(model, RenderSpec("coamoeba_model"))), "polygon") == 14
    root = parse(render_svg(model, RenderSpec("coamoeba_model", domains=2)))
    assert count(root, "polygon") == len(model.triangles()) == 14


@pytest.mark.parametrize("poly", [LINE, F1, SQUARE])
def test_polygon_count_matches_triangles(poly):
    model = model_of(poly)
    assert count(parse(render_svg(model, RenderSpec("coamoeba_model"))), "polygon") == len(model.triangles())


def test_tropical_line_figure():
    curve = corner_locus_2d(TropicalPolynomial.from_coefficients({(0, 0): 0, (1, 0): 0, (0, 1): 0}))
    root = parse(render_svg(curve, RenderSpec("tropical_curve")))
    assert count(root, "circle", "vertex") == 1
    assert count(root, "line", "ray") == 3
    assert count(root, "marker") == 1


def test_newton_and_raster_figures():
    sub = lower_hull_subdivision({(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): -1, (2, 2): 5})
    root = parse(render_svg(sub, RenderSpec("newton")))
    assert count(root, "polygon", "cell") == len(sub.full_cells()) == 4
    assert count(root, "circle", "unused") == 0
    sub = lower_hull_subdivision({(0, 0): 0, (2, 0): 0, (0, 2): 0, (1, 0): 5})
    root = parse(render_svg(sub, RenderSpec("newton")))
    assert count(root, "polygon", "cell") == 1
    assert count(root, "circle", "unused") == 1
    occ = np.zeros((128, 128), dtype=bool)
    occ[10:20, 5] = True
    root = parse(render_svg(TorusRaster(occ), RenderSpec("raster", domains=3)))
    raster = next(g for g in root.iter(NS + "g") if g.get("id") == "raster")
    assert len(list(raster)) == 1
    assert count(root, "use") == 9


def test_deterministic_output():
    spec = RenderSpec("coamoeba_model", 300, 200, 2)
    assert render_svg(model_of(F1), spec) == render_svg(model_of(F1), spec)


def test_errors():
    with pytest.raises(TargetMismatch):
        render_svg(model_of(LINE), RenderSpec("raster"))
    with pytest.raises(TargetMismatch):
        RenderSpec("bitmap")
    for bad in (dict(width=10), dict(height=5000), dict(domains=0), dict(domains=5)):
        with pytest.raises(OutOfRange):
            RenderSpec("newton", **bad)


def test_fmt():
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(-0.0) == "0"
    assert fmt(2) == "2"
