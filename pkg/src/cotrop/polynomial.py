"""Laurent polynomials over the complex numbers and over Puiseux series.

Both classes map integer exponent tuples to nonzero coefficients and share
the small interface the geometric modules need: ``support``, ``nvars``,
``phase`` (argument of the leading coefficient) and ``height`` (the order
used to lift the support point).
"""

from __future__ import annotations

import cmath
import json
import math
from fractions import Fraction
from typing import Mapping, Union

from .errors import InvalidInput, SchemaError
from .puiseux import PuiseuxSeries, arg_map, normalize_angle, order

Exponent = tuple[int, ...]

# precision used when turning -log|a| into an exact rational height
HEIGHT_DENOMINATOR = 10**6


def _check_exponents(terms: Mapping) -> int:
    if not terms:
        raise InvalidInput("a polynomial needs at least one term")
    lengths = {len(e) for e in terms}
    if len(lengths) != 1:
        raise InvalidInput("all exponents must have the same length")
    n = lengths.pop()
    if n < 1:
        raise InvalidInput("exponents must have at least one coordinate")
    for e in terms:
        if not all(isinstance(k, int) and not isinstance(k, bool) for k in e):
            raise InvalidInput(f"exponent {e!r} is not an integer vector")
    return n


class ComplexPolynomial:
    """Laurent polynomial with nonzero complex coefficients."""

    field = "complex"

    def __init__(self, terms: Mapping[Exponent, complex]):
        self.terms: dict[Exponent, complex] = {}
        for e, c in terms.items():
            c = complex(c)
            if c == 0 or not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise InvalidInput(f"coefficient of {e} must be finite and nonzero")
            self.terms[tuple(int(k) for k in e)] = c
        self.nvars = _check_exponents(self.terms)

    @property
    def support(self) -> list[Exponent]:
        return sorted(self.terms)

    def phase(self, alpha: Exponent) -> float:
        return normalize_angle(cmath.phase(self.terms[tuple(alpha)]))

    def height(self, alpha: Exponent) -> Fraction:
        """``-log|a_alpha|`` as a rational (denominator at most 10**6)."""
        h = -math.log(abs(self.terms[tuple(alpha)]))
        return Fraction(h).limit_denominator(HEIGHT_DENOMINATOR)

    def lift(self) -> dict[Exponent, Fraction]:
        return {e: self.height(e) for e in self.support}

    def restricted(self, exponents) -> "ComplexPolynomial":
        keep = {tuple(e) for e in exponents}
        return ComplexPolynomial({e: c for e, c in self.terms.items() if e in keep})

    def evaluate(self, point) -> complex:
        total = 0j
        for e, c in self.terms.items():
            m = c
            for x, k in zip(point, e):
                m *= complex(x) ** k
            total += m
        return total

    def __eq__(self, other):
        return isinstance(other, ComplexPolynomial) and self.terms == other.terms

    def __repr__(self):
        return f"ComplexPolynomial({self.terms!r})"


class PolynomialOverSeries:
    """Laurent polynomial whose coefficients are nonzero truncated Puiseux series."""

    field = "puiseux"

    def __init__(self, terms: Mapping[Exponent, PuiseuxSeries]):
        self.terms: dict[Exponent, PuiseuxSeries] = {}
        for e, a in terms.items():
            if not isinstance(a, PuiseuxSeries):
                raise InvalidInput("coefficients must be PuiseuxSeries")
            if a.is_zero:
                raise InvalidInput(f"coefficient of {e} is the zero series")
            self.terms[tuple(int(k) for k in e)] = a
        self.nvars = _check_exponents(self.terms)

    @property
    def support(self) -> list[Exponent]:
        return sorted(self.terms)

    def phase(self, alpha: Exponent) -> float:
        return arg_map(self.terms[tuple(alpha)])

    def height(self, alpha: Exponent) -> Fraction:
        return order(self.terms[tuple(alpha)])

    def lift(self) -> dict[Exponent, Fraction]:
        return {e: order(a) for e, a in sorted(self.terms.items())}

    def restricted(self, exponents) -> "PolynomialOverSeries":
        keep = {tuple(e) for e in exponents}
        return PolynomialOverSeries({e: a for e, a in self.terms.items() if e in keep})

    def times_t(self, k) -> "PolynomialOverSeries":
        return PolynomialOverSeries({e: a.shifted(k) for e, a in self.terms.items()})

    def leading_complex(self) -> ComplexPolynomial:
        """Keep only the leading coefficient of each term."""
        return ComplexPolynomial({e: a.leading()[1] for e, a in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, PolynomialOverSeries) and self.terms == other.terms

    def __repr__(self):
        return f"PolynomialOverSeries({self.terms!r})"


Polynomial = Union[ComplexPolynomial, PolynomialOverSeries]


# -- JSON documents --------------------------------------------------------

def polynomial_from_dict(doc, parameters: Mapping[str, float] | None = None) -> Polynomial:
    """Build a polynomial from a document.

    Layout::

        {"variables": 2, "field": "complex" | "puiseux",
         "terms": [{"exponent": [1, 0], "coefficient": [re, im]}, ...]}

    For ``"puiseux"`` the coefficient is an array of ``{"exp", "re", "im"}``.
    A term may carry ``"phase": "<name>"``; its coefficient is then
    multiplied by ``exp(i * value)`` where the value comes from
    ``parameters``, falling back to the document's ``"parameters"`` object
    and finally to 0.
    """
    if not isinstance(doc, dict):
        raise SchemaError("polynomial document must be a JSON object")
    field = doc.get("field", "complex")
    if field not in ("complex", "puiseux"):
        raise SchemaError(f"unknown field {field!r}")
    terms = doc.get("terms")
    if not isinstance(terms, list) or not terms:
        raise SchemaError("'terms' must be a nonempty array")
    n = doc.get("variables")
    params = dict(doc.get("parameters", {}) or {})
    params.update(parameters or {})
    out = {}
    for term in terms:
        if not isinstance(term, dict) or "exponent" not in term or "coefficient" not in term:
            raise SchemaError(f"bad term {term!r}")
        exponent = term["exponent"]
        if not isinstance(exponent, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in exponent):
            raise SchemaError(f"exponent must be an integer array, got {exponent!r}")
        if n is not None and len(exponent) != n:
            raise SchemaError(f"exponent {exponent} does not have {n} entries")
        key = tuple(exponent)
        if key in out:
            raise SchemaError(f"duplicate exponent {exponent}")
        rotation = 1.0 + 0j
        if "phase" in term:
            name = term["phase"]
            rotation = cmath.exp(1j * float(params.get(name, 0.0)))
        raw = term["coefficient"]
        try:
            if field == "complex":
                if not (isinstance(raw, list) and len(raw) == 2):
                    raise SchemaError(f"complex coefficient must be [re, im], got {raw!r}")
                out[key] = complex(float(raw[0]), float(raw[1])) * rotation
            else:
                series = PuiseuxSeries.from_json(raw)
                out[key] = PuiseuxSeries(tuple((e, c * rotation) for e, c in series.terms))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"bad coefficient {raw!r}: {exc}") from exc
    try:
        return ComplexPolynomial(out) if field == "complex" else PolynomialOverSeries(out)
    except InvalidInput as exc:
        raise SchemaError(str(exc)) from exc


def polynomial_to_dict(poly: Polynomial) -> dict:
    terms = []
    for e in poly.support:
        c = poly.terms[e]
        coefficient = [c.real, c.imag] if isinstance(poly, ComplexPolynomial) else c.to_json()
        terms.append({"exponent": list(e), "coefficient": coefficient})
    return {"kind": "polynomial", "variables": poly.nvars, "field": poly.field, "terms": terms}


def load_polynomial(path, parameters=None) -> Polynomial:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    return polynomial_from_dict(doc, parameters)
