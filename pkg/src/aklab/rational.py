"""Exact rationals backed by GMP.

Every measure, probability and ratio in the package is an ``mpq``.  Python
``Fraction`` and ``int`` inputs are accepted and converted; floats are not,
since they would silently break exactness.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational as _RationalABC

from gmpy2 import mpq

Rational = type(mpq(0))

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


def as_rational(x) -> Rational:
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction) or isinstance(x, _RationalABC):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def parse_rational(text: str) -> Rational:
    """Parse ``a/b``.  Decimal notation is rejected on purpose."""
    m = _RAT_RE.match(text)
    if not m:
        raise DomainError(f"expected a rational of the form a/b, got {text!r}")
    num, den = int(m.group(1)), int(m.group(2))
    if den == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return mpq(num, den)


def format_rational(x) -> str:
    x = as_rational(x)
    return f"{x.numerator}/{x.denominator}"


def decimal17(x) -> str:
    """17 significant digits; enough to round-trip a binary64."""
    return f"{float(x):.17g}"


def check_probability(p) -> Rational:
    p = as_rational(p)
    if not 0 < p < 1:
        raise DomainError(f"p must lie strictly between 0 and 1, got {format_rational(p)}")
    return p


def to_fraction(x) -> Fraction:
    x = as_rational(x)
    return Fraction(int(x.numerator), int(x.denominator))
