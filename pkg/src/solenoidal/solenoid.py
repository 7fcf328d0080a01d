"""The universal solenoid ``(R x Zhat)/Z`` as a value type.

A point is stored by its canonical representative ``(x, t)`` with the leaf
coordinate ``x`` in ``[0, 1)`` and ``t`` a profinite integer truncated at the
working depth.  The integer action is ``g.(x, t) = (x + g, t - g)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from .core_numbers import (
    DEFAULT_DEPTH,
    DepthError,
    ProfiniteInt,
    factorial,
    format_rational,
    parse_rational,
)

CHARACTER_TOLERANCE = 1e-9


class UnresolvableCharacter(ValueError):
    """The character's denominator does not divide ``depth!``."""


def _canonical_raw(x: float, t: int, modulus: int) -> tuple[float, int]:
    fl = math.floor(x)
    x -= fl
    if x >= 1.0:  # x - floor(x) can round up to 1.0 for tiny negative x
        x = 0.0
        fl += 1
    return x, (t + fl) % modulus


@dataclass(frozen=True)
class SolenoidPoint:
    x: float
    t: ProfiniteInt

    def __post_init__(self) -> None:
        if not (0.0 <= self.x < 1.0):
            raise ValueError(f"leaf coordinate must lie in [0, 1), got {self.x!r}; use canonicalize()")

    @property
    def depth(self) -> int:
        return self.t.depth

    def __add__(self, other: SolenoidPoint) -> SolenoidPoint:
        return add(self, other)

    def __neg__(self) -> SolenoidPoint:
        return neg(self)

    def __sub__(self, other: SolenoidPoint) -> SolenoidPoint:
        return add(self, neg(other))

    def to_json(self) -> dict[str, Any]:
        return {"x": self.x, "t": self.t.to_json()}

    @classmethod
    def from_json(cls, data: dict[str, Any], depth: Optional[int] = None) -> SolenoidPoint:
        t = data.get("t", 0)
        if isinstance(t, dict):
            pt = ProfiniteInt.from_json(t)
            if depth is not None and pt.depth != depth:
                raise DepthError("incompatible truncation depths")
        else:
            pt = ProfiniteInt(depth or DEFAULT_DEPTH, int(t))
        return canonicalize(float(data["x"]), pt)


@dataclass(frozen=True)
class Character:
    """The character of S with leafwise frequency ``q``."""

    q: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", parse_rational(self.q))

    def resolvable_at(self, depth: int) -> bool:
        return factorial(depth) % self.q.denominator == 0

    def __str__(self) -> str:
        return format_rational(self.q)


def canonicalize(x: float, t: ProfiniteInt) -> SolenoidPoint:
    """Move ``(x, t)`` along its integer orbit so that ``0 <= x < 1``."""
    if not math.isfinite(x):
        raise ValueError(f"leaf coordinate must be finite, got {x!r}")
    cx, ct = _canonical_raw(float(x), t.residue, t.modulus)
    return SolenoidPoint(cx, ProfiniteInt(t.depth, ct))


def zero(depth: int = DEFAULT_DEPTH) -> SolenoidPoint:
    return SolenoidPoint(0.0, ProfiniteInt(depth, 0))


def point(x: float, t: int = 0, depth: int = DEFAULT_DEPTH) -> SolenoidPoint:
    """Shorthand: canonical point from a raw leaf coordinate and integer fiber."""
    return canonicalize(x, ProfiniteInt(depth, t))


def add(z: SolenoidPoint, w: SolenoidPoint) -> SolenoidPoint:
    if z.depth != w.depth:
        raise DepthError("incompatible truncation depths")
    return canonicalize(z.x + w.x, z.t + w.t)


def neg(z: SolenoidPoint) -> SolenoidPoint:
    return canonicalize(-z.x, -z.t)


def base_leaf(r: float, depth: int = DEFAULT_DEPTH) -> SolenoidPoint:
    """The embedding of the reals onto the dense leaf through 0."""
    return canonicalize(r, ProfiniteInt(depth, 0))


def _check_resolvable(q: Fraction, depth: int) -> None:
    if factorial(depth) % q.denominator:
        raise UnresolvableCharacter(
            f"character not resolvable at this depth: denominator {q.denominator} does not divide {depth}!"
        )


def _as_q(chi: Union[Character, Fraction, int, str]) -> Fraction:
    return chi.q if isinstance(chi, Character) else parse_rational(chi)


def char_phase(chi: Union[Character, Fraction, int, str], z: SolenoidPoint) -> Fraction:
    """Exact angle of ``chi(z)`` in turns, reduced to ``[0, 1)``.

    For ``q = a/b`` the angle is ``q*x + a*(t mod b)/b``.  This is the unique
    lift of the leafwise character ``r -> exp(2 pi i q r)`` that is trivial on
    the integer action.
    """
    q = _as_q(chi)
    _check_resolvable(q, z.depth)
    a, b = q.numerator, q.denominator
    return (q * Fraction(z.x) + Fraction(a * (z.t.residue % b), b)) % 1


def char_angle(q: Fraction, x: float, t: int) -> float:
    """Float angle ``q*x + a*(t mod b)/b`` from raw coordinates (no checks)."""
    a, b = q.numerator, q.denominator
    return (a * x + (a * (t % b)) % b) / b


def char_eval(chi: Union[Character, Fraction, int, str], z: SolenoidPoint) -> complex:
    phase = char_phase(chi, z)
    if phase == 0:
        return 1 + 0j
    return cmath.exp(2j * math.pi * float(phase))


def _d_profinite(u: int, depth: int) -> float:
    modulus = factorial(depth)
    u %= modulus
    if u == 0:
        return 0.0
    j = 1
    while j < depth and u % factorial(j + 1) == 0:
        j += 1
    return 2.0 ** (-j)


def metric(z: SolenoidPoint, w: SolenoidPoint) -> float:
    """Translation-invariant distance: leaf distance plus profinite ultrametric.

    Minimizing over the three integer shifts is enough because both leaf
    coordinates are canonical.
    """
    if z.depth != w.depth:
        raise DepthError("incompatible truncation depths")
    dx = z.x - w.x
    dt = z.t.residue - w.t.residue
    return min(abs(dx + g) + _d_profinite(dt - g, z.depth) for g in (-1, 0, 1))


def level_project(z: SolenoidPoint, j: int) -> float:
    """Coordinate of ``z`` on the covering circle ``R / j! Z``."""
    if j < 1:
        raise ValueError("level must be positive")
    if j > z.depth:
        raise DepthError(f"level {j} exceeds working depth {z.depth}")
    m = factorial(j)
    return math.fmod(z.x + (z.t.residue % m), m)


@dataclass(frozen=True)
class IrrationalityReport:
    irrational: bool
    witness: Optional[Fraction]
    denominator_bound: int
    depth: int

    def __bool__(self) -> bool:
        return self.irrational

    def to_json(self) -> dict[str, Any]:
        return {
            "irrational": self.irrational,
            "witness": None if self.witness is None else format_rational(self.witness),
            "D": self.denominator_bound,
            "K": self.depth,
        }


def candidate_frequencies(denominator_bound: int):
    """Positive frequencies ``a/b`` in lowest terms with ``b <= D`` and ``a/b <= D``.

    Negative frequencies are skipped: ``chi_{-q}`` is the conjugate of ``chi_q``.
    """
    for b in range(1, denominator_bound + 1):
        for a in range(1, b * denominator_bound + 1):
            if math.gcd(a, b) == 1:
                yield Fraction(a, b)


def is_irrational(
    z: SolenoidPoint, denominator_bound: int, tol: float = CHARACTER_TOLERANCE
) -> IrrationalityReport:
    """Check that no character ``chi_q`` with ``q`` in the candidate set kills ``z``.

    The answer is certified only up to the denominator bound and the working
    depth, both of which are carried in the report.
    """
    if denominator_bound < 1:
        raise ValueError("denominator bound must be positive")
    modulus = factorial(z.depth)
    for b in range(1, denominator_bound + 1):
        if modulus % b:
            raise UnresolvableCharacter(
                f"character not resolvable at this depth: {b} does not divide {z.depth}!"
            )
    for q in candidate_frequencies(denominator_bound):
        phase = char_phase(q, z)
        if phase == 0 or abs(cmath.exp(2j * math.pi * float(phase)) - 1) < tol:
            return IrrationalityReport(False, q, denominator_bound, z.depth)
    return IrrationalityReport(True, None, denominator_bound, z.depth)
