"""Suspension flow of a solenoid map, its characters and 1-cocycles.

Points of the mapping torus are pairs ``(z, s)`` with ``0 <= s < 1``; the
class ``(z, 1)`` is identified with ``(f(z), 0)``.  Only forward time is
supported for cocycles.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from .core_numbers import ExactSum, ProfiniteInt, factorial, format_rational, parse_rational
from .dynamics import (
    AnyMap,
    CharacterPolynomial,
    HaarNotInvariant,
    RotationEstimate,
    SolenoidMap,
    apply,
    rotation_element_birkhoff,
    rotation_element_exact_haar,
)
from .solenoid import (
    SolenoidPoint,
    UnresolvableCharacter,
    char_angle,
    char_eval,
    metric,
)


@dataclass(frozen=True)
class SuspensionPoint:
    z: SolenoidPoint
    s: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.s < 1.0):
            raise ValueError(f"suspension height must lie in [0, 1), got {self.s!r}")


@dataclass(frozen=True)
class SuspensionCharacter:
    """``chi_{q,n}(z, s) = chi_q(z) * exp(2 pi i n s)``."""

    q: Fraction
    n: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", parse_rational(self.q))
        if int(self.n) != self.n:
            raise ValueError("circle frequency must be an integer")
        object.__setattr__(self, "n", int(self.n))

    def __add__(self, other: SuspensionCharacter) -> SuspensionCharacter:
        return SuspensionCharacter(self.q + other.q, self.n + other.n)

    def __call__(self, p: SuspensionPoint) -> complex:
        return char_eval(self.q, p.z) * cmath.exp(2j * math.pi * self.n * p.s)


def _orbit(f: AnyMap, z: SolenoidPoint, m: int) -> tuple[SolenoidPoint, ExactSum]:
    x, t = z.x, z.t.residue
    acc = ExactSum()
    for _ in range(m):
        x, t, d = f.step(x, t)
        acc.add(d)
    return SolenoidPoint(x, ProfiniteInt(z.depth, t)), acc


def flow(f: AnyMap, p: SuspensionPoint, t: float) -> SuspensionPoint:
    """Suspension flow: ``(f^m(z), t + s - m)`` with ``m = floor(t + s)``."""
    total = t + p.s
    m = math.floor(total)
    s = total - m
    if s >= 1.0:
        s, m = 0.0, m + 1
    if m >= 0:
        z, _ = _orbit(f, p.z, m)
    else:
        if not hasattr(f, "invert"):
            raise ValueError("backward flow needs an invertible map")
        z = p.z
        for _ in range(-m):
            z = f.invert(z)
    return SuspensionPoint(z, s)


def _alpha_angle(f: AnyMap, q: Fraction) -> float:
    return char_angle(q, f.alpha.x, f.alpha.t.residue)


def cocycle(f: AnyMap, chi: SuspensionCharacter, t: float, p: SuspensionPoint) -> float:
    """``C(t, (z, s)) = q (f^m(z) - z) + n t``.

    ``f^m(z) - z`` is ``m*alpha + sigma(D_m)``; for maps isotopic to the
    identity the first part vanishes and this is ``q D_m + n t``.  For a
    nonzero translation part ``q * m*alpha`` is read as ``m`` times the angle
    of ``chi_q(alpha)``.
    """
    m = math.floor(t + p.s)
    if m < 0:
        raise ValueError("backward cocycles are not supported (negative m)")
    if factorial(p.z.depth) % chi.q.denominator:
        raise UnresolvableCharacter("character not resolvable at this depth")
    _, acc = _orbit(f, p.z, m)
    q = chi.q
    out = float(q) * acc.value() + chi.n * t
    if not f.isotopic_to_identity:
        out += m * _alpha_angle(f, q)
    return out


def cocycle_identity_check(
    f: AnyMap, chi: SuspensionCharacter, t: float, u: float, p: SuspensionPoint
) -> float:
    """``|C(t+u, p) - C(u, flow(p, t)) - C(t, p)|``."""
    return abs(cocycle(f, chi, t + u, p) - cocycle(f, chi, u, flow(f, p, t)) - cocycle(f, chi, t, p))


def character_cocycle_consistency(
    f: AnyMap, chi: SuspensionCharacter, t: float, p: SuspensionPoint
) -> float:
    """``|chi(flow(p, t)) - exp(2 pi i C(t, p)) chi(p)|``."""
    lhs = chi(flow(f, p, t))
    phase = cocycle(f, chi, t, p) % 1.0
    rhs = cmath.exp(2j * math.pi * phase) * chi(p)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# measures and H


@dataclass(frozen=True)
class Birkhoff:
    seed: SolenoidPoint
    n: int


@dataclass(frozen=True)
class Dirac:
    point: SolenoidPoint
    tolerance: float = 1e-9


@dataclass(frozen=True)
class Haar:
    pass


MeasureSpec = Union[Birkhoff, Dirac, Haar]


class InvalidMeasure(ValueError):
    pass


def _leaf_rotation(f: AnyMap, mu: MeasureSpec) -> RotationEstimate:
    if isinstance(mu, Birkhoff):
        return rotation_element_birkhoff(f, mu.seed, mu.n)
    if isinstance(mu, Dirac):
        if not f.isotopic_to_identity:
            raise InvalidMeasure("Dirac measure needs a map isotopic to the identity")
        image = apply(f, mu.point)
        if metric(image, mu.point) > mu.tolerance:
            raise InvalidMeasure("Dirac measure must sit on a fixed point")
        return rotation_element_birkhoff(f, mu.point, 1)
    if isinstance(mu, Haar):
        try:
            return rotation_element_exact_haar(f)
        except HaarNotInvariant as exc:
            raise InvalidMeasure(str(exc)) from exc
    raise InvalidMeasure(f"unknown measure spec {mu!r}")


def H_hom(f: AnyMap, mu: MeasureSpec, chi: SuspensionCharacter) -> Fraction:
    """``H_{f,mu}(chi_{q,n}) = q * integral(phi dmu) + n``, kept as an exact rational.

    The integral is the double returned by the rotation estimate, which is a
    dyadic rational, so additivity in ``chi`` holds exactly.
    """
    est = _leaf_rotation(f, mu)
    return _H_from_r(est, chi)


def _H_from_r(est: RotationEstimate, chi: SuspensionCharacter) -> Fraction:
    r = est.exact if est.exact is not None else Fraction(est.r)
    return chi.q * r + chi.n


@dataclass(frozen=True)
class DualRotation:
    """The rotation element as a character on ``Char(S)``: ``q -> exp(2 pi i H(chi_q))``."""

    estimate: RotationEstimate

    def __call__(self, chi: SuspensionCharacter) -> complex:
        # the integer part of H drops out exactly
        phase = _H_from_r(self.estimate, chi) % 1
        return cmath.exp(2j * math.pi * float(phase))


def rotation_element_from_H(f: AnyMap, mu: MeasureSpec) -> RotationEstimate:
    """Recover the leaf part of the rotation element from ``H``.

    Evaluates ``H`` on ``chi_{1,n}``; the result must not depend on ``n``.
    """
    est = _leaf_rotation(f, mu)
    base = _H_from_r(est, SuspensionCharacter(Fraction(1), 0))
    for n in range(-2, 3):
        shifted = _H_from_r(est, SuspensionCharacter(Fraction(1), n))
        assert (shifted - n) == base and shifted % 1 == base % 1
    r = float(base)
    assert r == est.r
    return est


# ---------------------------------------------------------------------------
# metric on the mapping torus


def _power(f: AnyMap, z: SolenoidPoint, k: int) -> SolenoidPoint:
    if k >= 0:
        for _ in range(k):
            z = apply(f, z)
        return z
    for _ in range(-k):
        z = f.invert(z)
    return z


def suspension_metric(f: AnyMap, p: SuspensionPoint, p2: SuspensionPoint) -> float:
    """Quotient distance: ``min_k d(z, f^k z') + |s - s' + k|``.

    ``(z', s')`` is the same point as ``(f^k z', s' - k)``.  Solenoid
    distances are at most 1, so ``|k| <= 3`` already attains the minimum.
    """
    best = math.inf
    for k in range(-3, 4):
        cand = abs(p.s - p2.s + k)
        if cand >= best:
            continue
        cand += metric(p.z, _power(f, p2.z, k))
        best = min(best, cand)
    return best


def isometry_defect(f: SolenoidMap, p: SuspensionPoint, p2: SuspensionPoint, t: float) -> float:
    """``|d(flow(p, t), flow(p', t)) - d(p, p')|``; translations only."""
    if not (isinstance(f, SolenoidMap) and f.is_translation):
        raise ValueError("isometry check requires a translation")
    before = suspension_metric(f, p, p2)
    after = suspension_metric(f, flow(f, p, t), flow(f, p2, t))
    return abs(after - before)


# ---------------------------------------------------------------------------
# property suites


def random_point(rng: random.Random, depth: int) -> SolenoidPoint:
    return SolenoidPoint(rng.random(), ProfiniteInt(depth, rng.randrange(factorial(depth))))


def random_frequency(rng: random.Random, depth: int, max_num: int = 3) -> Fraction:
    divisors = [b for b in range(1, depth + 1) if factorial(depth) % b == 0]
    b = rng.choice(divisors)
    a = rng.randint(-max_num * b, max_num * b)
    return Fraction(a, b)


def random_map(
    rng: random.Random, depth: int, max_terms: int = 3, margin: float = 0.9, translation: bool = False
) -> SolenoidMap:
    """Random character-polynomial map whose monotonicity margin is ``< margin``."""
    from .solenoid import zero

    alpha = zero(depth) if rng.random() < 0.5 else random_point(rng, depth)
    c = rng.uniform(-1.0, 1.0)
    if translation:
        return SolenoidMap(alpha, CharacterPolynomial(c))
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        q = random_frequency(rng, depth)
        if q == 0:
            continue
        terms.append((q, rng.uniform(-1, 1), rng.uniform(-1, 1)))
    lip = sum(2 * math.pi * abs(float(q)) * (abs(a) + abs(b)) for q, a, b in terms)
    scale = margin * rng.random() / lip if lip else 0.0
    terms = [(q, a * scale, b * scale) for q, a, b in terms]
    return SolenoidMap(alpha, CharacterPolynomial(c, tuple(terms)))


@dataclass(frozen=True)
class PropertyReport:
    check: str
    samples: int
    max_defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_defect < self.tolerance

    def to_json(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "samples": self.samples,
            "max_defect": self.max_defect,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def cocycle_suite(
    rng: random.Random,
    depth: int = 6,
    samples: int = 1000,
    tolerance: float = 1e-9,
    max_time: float = 4.0,
    f: Optional[AnyMap] = None,
) -> list[PropertyReport]:
    """Cocycle identity and character/cocycle consistency on random samples.

    A fresh random map is drawn per sample unless ``f`` is given.
    """
    worst_id = worst_char = 0.0
    for _ in range(samples):
        g = f if f is not None else random_map(rng, depth, translation=False)
        q = random_frequency(rng, depth)
        chi = SuspensionCharacter(q, rng.randint(-3, 3))
        p = SuspensionPoint(random_point(rng, depth), rng.random())
        t = rng.uniform(0.0, max_time)
        u = rng.uniform(0.0, max_time)
        worst_id = max(worst_id, cocycle_identity_check(g, chi, t, u, p))
        worst_char = max(worst_char, character_cocycle_consistency(g, chi, t, p))
    return [
        PropertyReport("cocycle_identity", samples, worst_id, tolerance),
        PropertyReport("character_cocycle_consistency", samples, worst_char, tolerance),
    ]


def isometry_suite(
    rng: random.Random, depth: int = 6, samples: int = 100, tolerance: float = 1e-9,
    f: Optional[SolenoidMap] = None,
) -> PropertyReport:
    worst = 0.0
    for _ in range(samples):
        g = f if f is not None else random_map(rng, depth, translation=True)
        p = SuspensionPoint(random_point(rng, depth), rng.random())
        p2 = SuspensionPoint(random_point(rng, depth), rng.random())
        worst = max(worst, isometry_defect(g, p, p2, rng.uniform(0.0, 3.0)))
    return PropertyReport("suspension_isometry", samples, worst, tolerance)
