"""Exact edge lengths in the Q-span of {1, sqrt2, sqrt3, sqrt5}.

Decimal literals are read as exact rationals, so every length the
library handles is an element of this span and comparisons never need a
tolerance.  The four generators are linearly independent over Q, which
makes the zero test a coefficient test; signs of non-zero values are
settled by evaluating with increasing decimal precision.
"""

from __future__ import annotations

import decimal
import math
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Union

RADICANDS = (1, 2, 3, 5)
_KEYS = ("q0", "q1", "q2", "q3")
_SQRT_FLOAT = tuple(math.sqrt(r) for r in RADICANDS)

Number = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a length coefficient")
    if isinstance(value, (int, str, decimal.Decimal)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite length coefficient")
        # repr gives the shortest decimal that round-trips
        return Fraction(repr(value))
    raise TypeError(f"cannot read {value!r} as a rational")


@total_ordering
class ExactLength:
    """``q0 + q1*sqrt(2) + q2*sqrt(3) + q3*sqrt(5)`` with rational ``q``."""

    __slots__ = ("coeffs", "_float", "_hash")

    def __init__(self, q0=0, q1=0, q2=0, q3=0):
        self.coeffs = tuple(_as_fraction(q) for q in (q0, q1, q2, q3))
        self._float = math.fsum(float(q) * s for q, s in zip(self.coeffs, _SQRT_FLOAT))
        self._hash = hash(self.coeffs)

    @classmethod
    def parse(cls, value) -> "ExactLength":
        """Read a decimal literal, a number, or a ``{q0..q3}`` mapping."""
        if isinstance(value, ExactLength):
            return value
        if isinstance(value, dict):
            unknown = set(value) - set(_KEYS)
            if unknown:
                raise ValueError(f"unknown symbolic length keys: {sorted(unknown)}")
            return cls(*(value.get(k, 0) for k in _KEYS))
        return cls(value)

    def to_json(self):
        if not any(self.coeffs[1:]):
            q = self.coeffs[0]
            return str(q.numerator) if q.denominator == 1 else str(q)
        return {k: str(q) for k, q in zip(_KEYS, self.coeffs) if q}

    @property
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __float__(self) -> float:
        return self._float

    def __repr__(self) -> str:
        terms = []
        for q, r in zip(self.coeffs, RADICANDS):
            if q:
                terms.append(str(q) if r == 1 else f"{q}*sqrt{r}")
        return "ExactLength(" + (" + ".join(terms) or "0") + ")"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactLength(other)
        if not isinstance(other, ExactLength):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other) -> "ExactLength":
        if isinstance(other, (int, Fraction)):
            other = ExactLength(other)
        if not isinstance(other, ExactLength):
            return NotImplemented
        return ExactLength(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "ExactLength":
        return ExactLength(*(-a for a in self.coeffs))

    def __sub__(self, other) -> "ExactLength":
        if isinstance(other, (int, Fraction)):
            other = ExactLength(other)
        return self + (-other)

    def __mul__(self, k) -> "ExactLength":
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return ExactLength(*(a * k for a in self.coeffs))

    __rmul__ = __mul__

    def sign(self) -> int:
        if not any(self.coeffs):
            return 0
        scale = sum(abs(float(q)) for q in self.coeffs) * 3.0
        if abs(self._float) > 1e-9 * scale:
            return 1 if self._float > 0 else -1
        digits = 40
        while True:
            value = self.to_decimal(digits)
            bound = decimal.Decimal(scale) * decimal.Decimal(10) ** (3 - digits)
            if abs(value) > bound:
                return 1 if value > 0 else -1
            digits *= 2

    def to_decimal(self, digits: int) -> decimal.Decimal:
        with decimal.localcontext() as ctx:
            ctx.prec = digits
            total = decimal.Decimal(0)
            for q, r in zip(self.coeffs, RADICANDS):
                if not q:
                    continue
                term = decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator)
                if r != 1:
                    term *= decimal.Decimal(r).sqrt()
                total += term
            return +total

    def __lt__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactLength(other)
        if isinstance(other, float):
            other = ExactLength(other)
        if not isinstance(other, ExactLength):
            return NotImplemented
        return (self - other).sign() < 0

    def ratio_if_commensurable(self, other: "ExactLength") -> Fraction | None:
        """Return ``self/other`` when it is rational, else ``None``."""
        ratio = None
        for a, b in zip(self.coeffs, other.coeffs):
            if b == 0:
                if a != 0:
                    return None
                continue
            r = a / b
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
        return ratio


def combine(counts: Iterable[int], lengths: Iterable[ExactLength]) -> ExactLength:
    total = ExactLength()
    for c, length in zip(counts, lengths):
        if c:
            total = total + length * c
    return total
