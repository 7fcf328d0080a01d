"""Exact rationals and depth-truncated profinite integers.

A profinite integer is stored as a single residue modulo ``depth!``.  The
factorials are cofinal in the divisibility order, so one residue determines
the image of the element in every ``Z/nZ`` with ``n | depth!``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Union

Rational = Fraction

DEFAULT_DEPTH = 6


class DepthError(ValueError):
    """Raised when two truncations at different depths are combined."""


@lru_cache(maxsize=None)
def factorial(k: int) -> int:
    return math.factorial(k)


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"a/b"``, ``"a"`` or an int into a reduced fraction.

    Floats are rejected: a character index must be given exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"rational must be given exactly, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read a rational from {value!r}")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ProfiniteInt:
    """Truncation of an element of the profinite integers at ``depth``."""

    depth: int
    residue: int

    def __post_init__(self) -> None:
        if not isinstance(self.depth, int) or self.depth < 1:
            raise ValueError(f"depth must be a positive integer, got {self.depth!r}")
        # Euclidean reduction also normalizes negative inputs.
        object.__setattr__(self, "residue", int(self.residue) % factorial(self.depth))

    @property
    def modulus(self) -> int:
        return factorial(self.depth)

    def __add__(self, other: ProfiniteInt) -> ProfiniteInt:
        return profinite_add(self, other)

    def __neg__(self) -> ProfiniteInt:
        return ProfiniteInt(self.depth, -self.residue)

    def __sub__(self, other: ProfiniteInt) -> ProfiniteInt:
        return profinite_add(self, -other)

    def mod(self, n: int) -> int:
        """Residue modulo ``n``; ``n`` must divide ``depth!``."""
        if self.modulus % n:
            raise ValueError(f"{n} does not divide {self.depth}! at this depth")
        return self.residue % n

    def to_json(self) -> dict[str, Any]:
        return {"depth": self.depth, "residue": str(self.residue)}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> ProfiniteInt:
        return cls(int(data["depth"]), int(str(data["residue"])))


def profinite_add(a: ProfiniteInt, b: ProfiniteInt) -> ProfiniteInt:
    if a.depth != b.depth:
        raise DepthError("incompatible truncation depths")
    return ProfiniteInt(a.depth, a.residue + b.residue)


def profinite_project(a: ProfiniteInt, j: int) -> ProfiniteInt:
    """Canonical projection to depth ``j`` (``j <= a.depth``)."""
    if j < 1:
        raise ValueError("projection depth must be positive")
    if j > a.depth:
        raise DepthError("cannot refine a truncation")
    return ProfiniteInt(j, a.residue % factorial(j))


def is_monothetic_generator(a: ProfiniteInt) -> bool:
    """True when ``a`` generates ``Z/nZ`` for every ``n`` dividing ``depth!``.

    This only certifies generation up to the truncation depth: the answer
    means "irrational up to depth K".  Being a unit mod ``K!`` is the same as
    being nonzero mod every prime ``p <= K``.
    """
    return math.gcd(a.residue, a.modulus) == 1


# Every finite double is an integer multiple of 2**-1074.
_SCALE_BITS = 1074


def float_to_scaled(v: float) -> int:
    """Exact integer ``v * 2**1074`` for a finite double ``v``."""
    num, den = v.as_integer_ratio()
    return num << (_SCALE_BITS - den.bit_length() + 1)


def scaled_to_float(acc: int, divisor: int = 1) -> float:
    """Correctly rounded ``acc / (divisor * 2**1074)``."""
    return acc / (divisor << _SCALE_BITS)


class ExactSum:
    """Running sum of doubles kept exactly; read back correctly rounded.

    Used for leafwise displacement totals so that constant displacements
    produce bit-exact averages.
    """

    __slots__ = ("acc", "count")

    def __init__(self) -> None:
        self.acc = 0
        self.count = 0

    def add(self, v: float) -> None:
        num, den = v.as_integer_ratio()
        self.acc += num << (_SCALE_BITS - den.bit_length() + 1)
        self.count += 1

    def value(self) -> float:
        return self.acc / (1 << _SCALE_BITS)

    def mean(self) -> float:
        if not self.count:
            raise ZeroDivisionError("mean of an empty sum")
        return self.acc / (self.count << _SCALE_BITS)

    def exact(self) -> Fraction:
        return Fraction(self.acc, 1 << _SCALE_BITS)
