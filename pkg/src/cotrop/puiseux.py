"""Truncated Puiseux series with rational exponents.

A series is a finite sum ``sum xi_r * t**r`` with ``r`` rational and
``xi_r`` nonzero complex.  The order is the least exponent and the
valuation is its negative, so that ``val(ab) = val(a) + val(b)`` and
``val(a + b) <= max(val(a), val(b))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInput, ZeroSeries

TWO_PI = 2.0 * math.pi


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings; floats are taken exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInput(f"not a rational number: {value!r}")
    if isinstance(value, (int, float, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"not a rational number: {value!r}") from exc
    raise InvalidInput(f"not a rational number: {value!r}")


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def normalize_angle(x: float) -> float:
    """Reduce an angle to [0, 2pi)."""
    y = math.fmod(x, TWO_PI)
    if y < 0.0:
        y += TWO_PI
    # fmod can return exactly 2pi after the shift for tiny negative inputs
    return 0.0 if y >= TWO_PI else y


@dataclass(frozen=True)
class PuiseuxSeries:
    """Immutable truncated series; ``terms`` sorted by strictly increasing exponent.

    The empty tuple is the zero series.  It can be built and added to, but
    every map into the torus rejects it.
    """

    terms: tuple[tuple[Fraction, complex], ...] = ()

    def __post_init__(self):
        previous = None
        for exponent, coefficient in self.terms:
            if not isinstance(exponent, Fraction):
                raise InvalidInput("series exponents must be Fractions")
            c = complex(coefficient)
            if c == 0 or not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise InvalidInput(f"series coefficients must be finite and nonzero, got {coefficient!r}")
            if previous is not None and exponent <= previous:
                raise InvalidInput("series exponents must be strictly increasing")
            previous = exponent

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[object, complex]]) -> "PuiseuxSeries":
        """Collect like powers, drop cancelled terms, sort."""
        acc: dict[Fraction, complex] = {}
        for exponent, coefficient in pairs:
            q = as_fraction(exponent)
            acc[q] = acc.get(q, 0j) + complex(coefficient)
        return cls(tuple((q, c) for q, c in sorted(acc.items()) if c != 0))

    @classmethod
    def monomial(cls, coefficient: complex, exponent=0) -> "PuiseuxSeries":
        return cls(((as_fraction(exponent), complex(coefficient)),))

    @classmethod
    def zero(cls) -> "PuiseuxSeries":
        return cls(())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def leading(self) -> tuple[Fraction, complex]:
        if not self.terms:
            raise ZeroSeries()
        return self.terms[0]

    def __add__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return PuiseuxSeries.from_terms(self.terms + other.terms)

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(tuple((q, -c) for q, c in self.terms))

    def __sub__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return self + (-other)

    def __mul__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return PuiseuxSeries.from_terms(
            (p + q, a * b) for p, a in self.terms for q, b in other.terms
        )

    def truncated(self, max_exponent) -> "PuiseuxSeries":
        """Drop every term with exponent above ``max_exponent``."""
        bound = as_fraction(max_exponent)
        return PuiseuxSeries(tuple(term for term in self.terms if term[0] <= bound))

    def shifted(self, k) -> "PuiseuxSeries":
        """Multiply by ``t**k``."""
        q = as_fraction(k)
        return PuiseuxSeries(tuple((e + q, c) for e, c in self.terms))

    def inverted_parameter(self) -> "PuiseuxSeries":
        """Substitute ``t -> 1/t`` (negate every exponent)."""
        return PuiseuxSeries(tuple((-e, c) for e, c in reversed(self.terms)))

    def evaluate(self, t: float) -> complex:
        return sum((c * t ** float(e) for e, c in self.terms), 0j)

    def to_json(self) -> list[dict]:
        return [{"exp": fraction_str(e), "re": c.real, "im": c.imag} for e, c in self.terms]

    @classmethod
    def from_json(cls, data) -> "PuiseuxSeries":
        if not isinstance(data, list):
            raise InvalidInput("a Puiseux series must be a JSON array of terms")
        pairs = []
        for item in data:
            if not isinstance(item, dict) or "exp" not in item:
                raise InvalidInput(f"bad Puiseux term {item!r}")
            pairs.append((as_fraction(item["exp"]), complex(float(item.get("re", 0.0)), float(item.get("im", 0.0)))))
        pairs.sort(key=lambda p: p[0])
        return cls(tuple(pairs))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c:g})t^({e})" for e, c in self.terms)


def order(a: PuiseuxSeries) -> Fraction:
    """Least exponent of ``a``."""
    return a.leading()[0]


def valuation(a: PuiseuxSeries) -> Fraction:
    return -order(a)


def arg_map(a: PuiseuxSeries) -> float:
    """Argument of the leading coefficient, in [0, 2pi)."""
    return normalize_angle(cmath.phase(a.leading()[1]))


def w_map(a: PuiseuxSeries) -> complex:
    """Complexified valuation: modulus ``exp(val a)``, argument of the leading coefficient."""
    exponent, coefficient = a.leading()
    return cmath.rect(math.exp(float(-exponent)), cmath.phase(coefficient))


def W_map(point: Sequence[PuiseuxSeries]) -> tuple[complex, ...]:
    """Apply :func:`w_map` coordinate-wise; a zero coordinate is reported by 1-based position."""
    out = []
    for i, a in enumerate(point):
        if a.is_zero:
            raise ZeroSeries(index=i + 1)
        out.append(w_map(a))
    return tuple(out)
