"""Solenoid homeomorphisms ``f = R_alpha o (id + phi)`` and their rotation theory.

The displacement ``phi`` moves each point along its own leaf and is evaluated
before the translation.  Orbits are generated on raw ``(x, t)`` pairs; the
leafwise displacement totals are accumulated exactly (see
:class:`~solenoidal.core_numbers.ExactSum`) so that constant displacements give
bit-exact averages.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

from .core_numbers import (
    ExactSum,
    ProfiniteInt,
    factorial,
    float_to_scaled,
    format_rational,
    parse_rational,
)
from .solenoid import (
    IrrationalityReport,
    SolenoidPoint,
    UnresolvableCharacter,
    _canonical_raw,
    add,
    base_leaf,
    canonicalize,
    char_angle,
    is_irrational,
    metric,
    zero,
)

TWO_PI = 2.0 * math.pi


class InvalidMap(ValueError):
    """The displacement does not define a leafwise homeomorphism."""


class HaarNotInvariant(ValueError):
    pass


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _level_for_modulus(m: int) -> int:
    j = 1
    while factorial(j) % m:
        j += 1
    return j


# ---------------------------------------------------------------------------
# displacement functions


@dataclass(frozen=True)
class CharacterPolynomial:
    """``phi(z) = c + sum_j A_j cos(2 pi theta_j(z)) + B_j sin(2 pi theta_j(z))``.

    ``theta_j`` is the angle of the character ``chi_{q_j}`` at ``z``.
    ``c`` may be a :class:`~fractions.Fraction` to keep an exact constant.
    """

    c: Union[float, Fraction] = 0.0
    terms: tuple[tuple[Fraction, float, float], ...] = ()

    def __post_init__(self) -> None:
        terms = tuple((parse_rational(q), float(a), float(b)) for q, a, b in self.terms)
        object.__setattr__(self, "terms", terms)
        if not isinstance(self.c, Fraction):
            object.__setattr__(self, "c", float(self.c))
        if not math.isfinite(float(self.c)):
            raise InvalidMap("constant term must be finite")
        # hot-path copies
        object.__setattr__(self, "_c", float(self.c))
        object.__setattr__(
            self, "_terms", tuple((q.numerator, q.denominator, a, b) for q, a, b in terms if a or b)
        )

    kind = "poly"

    @property
    def is_constant(self) -> bool:
        return not self._terms

    @property
    def modulus(self) -> int:
        """Fiber period: ``phi`` depends on ``t`` only through ``t mod modulus``."""
        return _lcm(q.denominator for q, _, _ in self.terms)

    @property
    def level(self) -> int:
        return _level_for_modulus(self.modulus)

    def lipschitz_bound(self) -> float:
        return sum(TWO_PI * abs(float(q)) * (abs(a) + abs(b)) for q, a, b in self.terms)

    def sup_bound(self) -> float:
        return abs(self._c) + sum(abs(a) + abs(b) for _, a, b in self.terms)

    def validate(self, depth: int) -> None:
        for q, _, _ in self.terms:
            if factorial(depth) % q.denominator:
                raise UnresolvableCharacter(
                    f"character not resolvable at this depth: {format_rational(q)} at depth {depth}"
                )
        if self.lipschitz_bound() >= 1.0:
            raise InvalidMap(
                "leaf map not guaranteed monotone: sum 2*pi*|q|*(|A|+|B|) must be < 1"
            )

    def value(self, x: float, t: int) -> float:
        v = self._c
        for a, b, ca, cb in self._terms:
            ang = TWO_PI * (((a * x + (a * (t % b)) % b) / b) % 1.0)
            v += ca * math.cos(ang) + cb * math.sin(ang)
        return v

    def derivative(self, x: float, t: int) -> float:
        """Derivative along the leaf."""
        v = 0.0
        for a, b, ca, cb in self._terms:
            ang = TWO_PI * (((a * x + (a * (t % b)) % b) / b) % 1.0)
            v += TWO_PI * a / b * (cb * math.cos(ang) - ca * math.sin(ang))
        return v

    def to_json(self) -> dict[str, Any]:
        c: Any = format_rational(self.c) if isinstance(self.c, Fraction) else self.c
        return {
            "kind": "poly",
            "c": c,
            "terms": [{"q": format_rational(q), "A": a, "B": b} for q, a, b in self.terms],
        }


@dataclass(frozen=True, eq=False)
class LevelPeriodicTable:
    """``phi(z) = psi(level_project(z, level) / level!)`` for a 1-periodic ``psi``.

    ``values`` samples ``psi`` at ``nodes`` (uniform on ``[0, 1]`` by default,
    both endpoints included) and is interpolated linearly.
    """

    level: int
    values: tuple[float, ...]
    nodes: Optional[tuple[float, ...]] = None

    kind = "table"

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise InvalidMap("a table needs at least two samples")
        if self.level < 1:
            raise InvalidMap("table level must be positive")
        if abs(vals[0] - vals[-1]) > 1e-12:
            raise InvalidMap("table endpoints must match: psi(0) = psi(1)")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidMap("table values must be finite")
        object.__setattr__(self, "values", vals)
        if self.nodes is not None:
            nodes = tuple(float(u) for u in self.nodes)
            if len(nodes) != len(vals):
                raise InvalidMap("nodes and values differ in length")
            if nodes[0] != 0.0 or nodes[-1] != 1.0:
                raise InvalidMap("nodes must run from 0 to 1")
            if any(b <= a for a, b in zip(nodes, nodes[1:])):
                raise InvalidMap("nodes must be strictly increasing")
            object.__setattr__(self, "nodes", nodes)
            slopes = tuple(
                (v1 - v0) / (u1 - u0) for u0, u1, v0, v1 in zip(nodes, nodes[1:], vals, vals[1:])
            )
        else:
            step = 1.0 / (len(vals) - 1)
            slopes = tuple((v1 - v0) / step for v0, v1 in zip(vals, vals[1:]))
        object.__setattr__(self, "_slopes", slopes)
        object.__setattr__(self, "_period", factorial(self.level))

    @property
    def is_constant(self) -> bool:
        return all(v == self.values[0] for v in self.values)

    @property
    def modulus(self) -> int:
        return self._period

    def lipschitz_bound(self) -> float:
        return max(abs(s) for s in self._slopes) / self._period

    def sup_bound(self) -> float:
        return max(abs(v) for v in self.values)

    def min_leaf_slope(self) -> float:
        return 1.0 + min(self._slopes) / self._period

    def validate(self, depth: int) -> None:
        if self.level > depth:
            raise UnresolvableCharacter(f"table level {self.level} exceeds working depth {depth}")
        if self.min_leaf_slope() <= 0.0:
            raise InvalidMap("leaf map not monotone: min slope of 1 + psi' must be > 0")

    def _locate(self, x: float, t: int) -> tuple[int, float]:
        p = self._period
        u = ((x + t % p) % p) / p
        if u >= 1.0:
            u = 0.0
        if self.nodes is None:
            m = len(self.values) - 1
            pos = u * m
            i = min(int(pos), m - 1)
            return i, u - i / m
        i = bisect.bisect_right(self.nodes, u) - 1
        i = min(max(i, 0), len(self.values) - 2)
        return i, u - self.nodes[i]

    def value(self, x: float, t: int) -> float:
        i, du = self._locate(x, t)
        return self.values[i] + self._slopes[i] * du

    def derivative(self, x: float, t: int) -> float:
        i, _ = self._locate(x, t)
        return self._slopes[i] / self._period

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": "table", "level": self.level, "values": list(self.values)}
        if self.nodes is not None:
            out["nodes"] = list(self.nodes)
        return out


DisplacementSpec = Union[CharacterPolynomial, LevelPeriodicTable]


def displacement_from_json(data: dict[str, Any]) -> DisplacementSpec:
    kind = data.get("kind")
    if kind == "poly":
        c = data.get("c", 0.0)
        c = parse_rational(c) if isinstance(c, str) else float(c)
        terms = tuple(
            (parse_rational(term["q"]), float(term.get("A", 0.0)), float(term.get("B", 0.0)))
            for term in data.get("terms", [])
        )
        return CharacterPolynomial(c, terms)
    if kind == "table":
        nodes = data.get("nodes")
        return LevelPeriodicTable(
            int(data["level"]), tuple(data["values"]), None if nodes is None else tuple(nodes)
        )
    raise ValueError(f"unknown displacement kind {kind!r}")


# ---------------------------------------------------------------------------
# maps


def leaf_inverse_offset(phi: DisplacementSpec, x: float, t: int) -> float:
    """Solve ``s + phi(x + s, t) = 0``: the leaf offset undoing ``id + phi``."""
    s = -phi.value(x, t)
    for _ in range(60):
        g = s + phi.value(x + s, t)
        if g == 0.0:
            return s
        dg = 1.0 + phi.derivative(x + s, t)
        step = g / dg
        s_new = s - step
        if abs(step) <= 1e-15 * max(1.0, abs(s)):
            return s_new
        s = s_new
    # Newton stalled (kinks in a table): fall back to bisection on the monotone map.
    bound = phi.sup_bound() + 1e-12
    lo, hi = -bound, bound
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid + phi.value(x + mid, t) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class SolenoidMap:
    """Homeomorphism ``f = R_alpha o (id + phi)``."""

    alpha: SolenoidPoint
    phi: DisplacementSpec

    def __post_init__(self) -> None:
        self.phi.validate(self.alpha.depth)
        object.__setattr__(self, "_ax", self.alpha.x)
        object.__setattr__(self, "_at", self.alpha.t.residue)
        object.__setattr__(self, "_mod", self.alpha.t.modulus)

    @property
    def depth(self) -> int:
        return self.alpha.depth

    @property
    def isotopic_to_identity(self) -> bool:
        return self.alpha.x == 0.0 and self.alpha.t.residue == 0

    @property
    def is_translation(self) -> bool:
        """True when ``phi`` is constant, so ``f`` is the translation by ``alpha + sigma(c)``."""
        return self.phi.is_constant

    @property
    def level(self) -> int:
        """Smallest covering level through which ``phi`` factors."""
        return self.phi.level

    def displacement(self, z: SolenoidPoint) -> float:
        return self.phi.value(z.x, z.t.residue)

    def step(self, x: float, t: int) -> tuple[float, int, float]:
        d = self.phi.value(x, t)
        nx, nt = _canonical_raw(x + self._ax + d, t + self._at, self._mod)
        return nx, nt, d

    def __call__(self, z: SolenoidPoint) -> SolenoidPoint:
        return apply(self, z)

    def invert(self, z: SolenoidPoint) -> SolenoidPoint:
        """``f^{-1}(z)``: undo the translation, then solve along the leaf."""
        w = add(z, -self.alpha)
        s = leaf_inverse_offset(self.phi, w.x, w.t.residue)
        return canonicalize(w.x + s, w.t)

    def to_json(self) -> dict[str, Any]:
        return {"alpha": self.alpha.to_json(), "phi": self.phi.to_json()}

    @classmethod
    def from_json(cls, data: dict[str, Any], depth: Optional[int] = None) -> SolenoidMap:
        alpha_data = data.get("alpha")
        if alpha_data is None:
            from .core_numbers import DEFAULT_DEPTH

            alpha = zero(depth or DEFAULT_DEPTH)
        else:
            alpha = SolenoidPoint.from_json(alpha_data, depth)
        return cls(alpha, displacement_from_json(data["phi"]))


@dataclass(frozen=True, eq=False)
class ConjugatedMap:
    """``g = h o f o h^{-1}`` with ``h = id + psi`` isotopic to the identity.

    ``h^{-1}`` is computed by solving along leaves, so ``g`` carries no closed
    form for its displacement; it only supports stepping.
    """

    f: SolenoidMap
    h: SolenoidMap

    def __post_init__(self) -> None:
        if not self.h.isotopic_to_identity:
            raise InvalidMap("conjugating map must be isotopic to the identity")
        if self.h.depth != self.f.depth:
            raise InvalidMap("incompatible truncation depths")

    @property
    def depth(self) -> int:
        return self.f.depth

    @property
    def alpha(self) -> SolenoidPoint:
        return self.f.alpha

    @property
    def isotopic_to_identity(self) -> bool:
        return self.f.isotopic_to_identity

    def step(self, x: float, t: int) -> tuple[float, int, float]:
        f = self.f
        s = leaf_inverse_offset(self.h.phi, x, t)
        ux = x + s
        d1 = f.phi.value(ux, t)
        fx = ux + f._ax + d1
        ft = (t + f._at) % f._mod
        d2 = self.h.phi.value(fx, ft)
        nx, nt = _canonical_raw(fx + d2, ft, f._mod)
        return nx, nt, s + d1 + d2

    def __call__(self, z: SolenoidPoint) -> SolenoidPoint:
        return apply(self, z)


AnyMap = Union[SolenoidMap, ConjugatedMap]


def rotation_map(c: Union[float, Fraction, str], depth: int, alpha: Optional[SolenoidPoint] = None) -> SolenoidMap:
    """The leaf rotation ``R_{sigma(c)}`` written as a constant displacement."""
    if isinstance(c, str):
        c = parse_rational(c)
    return SolenoidMap(alpha if alpha is not None else zero(depth), CharacterPolynomial(c))


def identity_map(depth: int) -> SolenoidMap:
    return rotation_map(0.0, depth)


def apply(f: AnyMap, z: SolenoidPoint) -> SolenoidPoint:
    if z.depth != f.depth:
        raise ValueError("incompatible truncation depths")
    nx, nt, _ = f.step(z.x, z.t.residue)
    return SolenoidPoint(nx, ProfiniteInt(z.depth, nt))


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitRecord:
    """Orbit ``z, f(z), ..., f^n(z)`` with leafwise displacement partial sums.

    ``x`` and ``t`` hold the canonical coordinates of each point;
    ``leaf_displacement[m]`` is ``D_m = sum_{j<m} phi(f^j z)``.
    """

    depth: int
    x: np.ndarray
    t: list
    leaf_displacement: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    @property
    def points(self) -> list[SolenoidPoint]:
        return [SolenoidPoint(float(x), ProfiniteInt(self.depth, t)) for x, t in zip(self.x, self.t)]

    def point(self, m: int) -> SolenoidPoint:
        return SolenoidPoint(float(self.x[m]), ProfiniteInt(self.depth, self.t[m]))

    def to_csv_rows(self) -> Iterable[tuple]:
        for m, (x, t, d) in enumerate(zip(self.x, self.t, self.leaf_displacement)):
            yield m, repr(float(x)), t, repr(float(d))


@dataclass(frozen=True)
class OrbitSummary:
    """Streaming result: only the endpoint and the exact running total."""

    final: SolenoidPoint
    n: int
    total: ExactSum

    @property
    def leaf_displacement(self) -> float:
        return self.total.value()


def iterate(f: AnyMap, z0: SolenoidPoint, n: int, streaming: bool = False):
    """Orbit of ``z0`` under ``f`` for ``n`` steps.

    With ``streaming=True`` only running sums are kept and an
    :class:`OrbitSummary` is returned.
    """
    if n < 0:
        raise ValueError("number of iterates must be non-negative")
    if z0.depth != f.depth:
        raise ValueError("incompatible truncation depths")
    step = f.step
    x, t = z0.x, z0.t.residue
    acc = ExactSum()
    if streaming:
        for _ in range(n):
            x, t, d = step(x, t)
            acc.add(d)
        return OrbitSummary(SolenoidPoint(x, ProfiniteInt(z0.depth, t)), n, acc)
    xs = np.empty(n + 1)
    ts = [t]
    ds = np.empty(n + 1)
    xs[0] = x
    ds[0] = 0.0
    for m in range(1, n + 1):
        x, t, d = step(x, t)
        acc.add(d)
        xs[m] = x
        ts.append(t)
        ds[m] = acc.value()
    return OrbitRecord(z0.depth, xs, ts, ds)


# ---------------------------------------------------------------------------
# rotation element


@dataclass(frozen=True)
class RotationEstimate:
    """Rotation element ``rho = alpha + sigma(r)``.

    ``ci_halfwidth`` is the largest deviation of the partial averages
    ``D_m/m`` from ``r`` over the last tenth of the run.
    """

    r: float
    alpha_fiber: SolenoidPoint
    n_iterates: int
    ci_halfwidth: float
    exact: Optional[Fraction] = None
    method: str = "birkhoff"

    @property
    def element(self) -> SolenoidPoint:
        return add(self.alpha_fiber, base_leaf(self.r, self.alpha_fiber.depth))

    def to_json(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "alpha": self.alpha_fiber.to_json(),
            "n": self.n_iterates,
            "ci_halfwidth": self.ci_halfwidth,
            "exact": None if self.exact is None else format_rational(self.exact),
            "method": self.method,
        }


def rotation_element_birkhoff(f: AnyMap, z0: SolenoidPoint, n: int) -> RotationEstimate:
    """Birkhoff average of the leaf displacement along the orbit of ``z0``."""
    if n < 1:
        raise ValueError("need at least one iterate")
    step = f.step
    x, t = z0.x, z0.t.residue
    acc = ExactSum()
    m0 = max(1, math.ceil(0.9 * n))
    tail = []
    for m in range(1, n + 1):
        x, t, d = step(x, t)
        acc.add(d)
        if m >= m0:
            tail.append(acc.mean())
    r = tail[-1]
    ci = max(abs(v - r) for v in tail)
    return RotationEstimate(r, f.alpha, n, ci)


def rotation_element_exact_haar(f: SolenoidMap) -> RotationEstimate:
    """Rotation element against Haar measure; only for translations."""
    if not (isinstance(f, SolenoidMap) and f.is_translation):
        raise HaarNotInvariant("Haar invariance not guaranteed; use Birkhoff estimator")
    phi = f.phi
    c = phi.c if isinstance(phi, CharacterPolynomial) else phi.values[0]
    exact = c if isinstance(c, Fraction) else Fraction(c)
    return RotationEstimate(float(c), f.alpha, 0, 0.0, exact=exact, method="haar")


def default_denominator_bound(depth: int) -> int:
    """Largest ``D`` with every ``b <= D`` dividing ``depth!``."""
    m = factorial(depth)
    d = 1
    while m % (d + 1) == 0:
        d += 1
    return d


@dataclass(frozen=True)
class RotationInterval:
    r_min: float
    r_max: float
    estimates: tuple[RotationEstimate, ...]
    is_pseudo_irrational: bool
    irrationality: Optional[IrrationalityReport]
    tolerance: float

    @property
    def width(self) -> float:
        return self.r_max - self.r_min

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.r_min + self.r_max)

    def contains(self, r: float, slack: float = 0.0) -> bool:
        return self.r_min - slack <= r <= self.r_max + slack

    def to_json(self) -> dict[str, Any]:
        return {
            "r_min": self.r_min,
            "r_max": self.r_max,
            "pseudo_irrational": self.is_pseudo_irrational,
            "irrationality": None if self.irrationality is None else self.irrationality.to_json(),
            "tolerance": self.tolerance,
            "estimates": [e.to_json() for e in self.estimates],
        }


def rotation_interval(
    f: AnyMap,
    seeds: Sequence[SolenoidPoint],
    n: int,
    denominator_bound: Optional[int] = None,
    tolerance: float = 1e-6,
) -> RotationInterval:
    if not seeds:
        raise ValueError("need at least one seed")
    ests = tuple(rotation_element_birkhoff(f, z, n) for z in seeds)
    rs = [e.r for e in ests]
    r_min, r_max = min(rs), max(rs)
    report = None
    pseudo = False
    if r_max - r_min < tolerance:
        d = denominator_bound or default_denominator_bound(f.depth)
        report = is_irrational(add(f.alpha, base_leaf(r_min, f.depth)), d)
        pseudo = report.irrational
    return RotationInterval(r_min, r_max, ests, pseudo, report, tolerance)


# ---------------------------------------------------------------------------
# bounded mean variation and the semiconjugacy


@dataclass(frozen=True)
class BMVReport:
    tau: float
    deviations: np.ndarray  # e_m for m = 1..n
    sup: float

    @property
    def n(self) -> int:
        return len(self.deviations)

    def growth_slope(self, start: int = 1) -> float:
        """Least-squares slope of ``e_m`` against ``m`` for ``m >= start``."""
        m = np.arange(1, self.n + 1, dtype=float)[start - 1 :]
        e = self.deviations[start - 1 :]
        return float(np.polyfit(m, e, 1)[0])

    def running_sup(self, checkpoints: Sequence[int]) -> list[float]:
        a = np.abs(self.deviations)
        return [float(a[:k].max()) for k in checkpoints]


def _deviation_run(f: AnyMap, z0: SolenoidPoint, tau: float, n: int) -> list[int]:
    """Exact scaled deviations ``(D_m - m*tau) * 2**1074`` for ``m = 0..n``."""
    step = f.step
    x, t = z0.x, z0.t.residue
    tau_s = float_to_scaled(float(tau))
    acc = ExactSum()
    out = [0]
    for m in range(1, n + 1):
        x, t, d = step(x, t)
        acc.add(d)
        out.append(acc.acc - m * tau_s)
    return out


def bmv_deviations(f: AnyMap, z0: SolenoidPoint, tau: float, n: int) -> BMVReport:
    """Deviations ``e_m = D_m - m*tau`` along the orbit of ``z0``.

    Boundedness is judged by the caller from how ``sup|e_m|`` behaves as ``n``
    grows; this only reports the sequence.
    """
    if n < 1:
        raise ValueError("need at least one iterate")
    scale = 1 << 1074
    devs = np.array([v / scale for v in _deviation_run(f, z0, tau, n)[1:]])
    return BMVReport(float(tau), devs, float(np.abs(devs).max()))


@dataclass(frozen=True)
class SemiconjugacyPoint:
    point: SolenoidPoint
    shift: float
    shift_half: float
    N: int

    @property
    def stability(self) -> float:
        """``|H_N - H_{N/2}|`` along the leaf."""
        return abs(self.shift - self.shift_half)


def semiconjugacy_sup(f: AnyMap, tau: float, z: SolenoidPoint, N: int) -> SemiconjugacyPoint:
    """Approximate ``h(z)`` from ``H(z) = sup_n (F^n(z) - n*tau)`` over ``0 <= n <= N``.

    ``H`` only moves points along their leaf, so the fiber coordinate of ``z``
    is kept and the leaf coordinate shifted by the running maximum.
    """
    if N < 1:
        raise ValueError("N must be positive")
    devs = _deviation_run(f, z, tau, N)
    scale = 1 << 1074
    best = max(devs)
    best_half = max(devs[: N // 2 + 1])
    shift = best / scale
    return SemiconjugacyPoint(canonicalize(z.x + shift, z.t), shift, best_half / scale, N)


def conjugacy_defect(f: AnyMap, tau: float, z: SolenoidPoint, N: int) -> float:
    """``d(h(f(z)), h(z) + alpha + sigma(tau))`` for the truncated sup construction."""
    hz = semiconjugacy_sup(f, tau, z, N).point
    hfz = semiconjugacy_sup(f, tau, apply(f, z), N).point
    target = add(add(hz, f.alpha), base_leaf(float(tau), z.depth))
    return metric(hfz, target)


# ---------------------------------------------------------------------------
# fixed points


def find_fixed_point(
    f: SolenoidMap, resolution: int = 1024, tolerance: float = 1e-10
) -> Optional[SolenoidPoint]:
    """Scan leaf bins and fiber residues for a zero of ``phi``; refine by bisection.

    Returns ``None`` when no zero is found at this resolution.
    """
    if not f.isotopic_to_identity:
        raise ValueError("fixed-point search needs a map isotopic to the identity (alpha = 0)")
    phi = f.phi
    depth = f.depth
    period = phi.modulus
    xs = [i / resolution for i in range(resolution)]
    best: Optional[tuple[float, float, int]] = None
    for t in range(period):
        vals = [phi.value(x, t) for x in xs]
        for i, v in enumerate(vals):
            if v == 0.0:
                return SolenoidPoint(xs[i], ProfiniteInt(depth, t))
            if best is None or abs(v) < best[0]:
                best = (abs(v), xs[i], t)
        for i in range(resolution):
            v0, v1 = vals[i], vals[(i + 1) % resolution]
            if (v0 < 0.0) != (v1 < 0.0):
                lo, hi = xs[i], xs[i] + 1.0 / resolution
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    vm = phi.value(mid, t)
                    if vm == 0.0 or hi - lo < 1e-16:
                        break
                    if (vm < 0.0) == (v0 < 0.0):
                        lo = mid
                    else:
                        hi = mid
                root = 0.5 * (lo + hi)
                if abs(phi.value(root, t)) < tolerance:
                    return canonicalize(root, ProfiniteInt(depth, t))
    if best is None:
        return None
    # tangential zero between grid points: polish the best grid candidate
    from scipy.optimize import minimize_scalar

    _, x0, t0 = best
    h = 1.0 / resolution
    res = minimize_scalar(
        lambda x: phi.value(x, t0) ** 2, bounds=(x0 - h, x0 + h), method="bounded",
        options={"xatol": 1e-14},
    )
    if abs(phi.value(res.x, t0)) < tolerance:
        return canonicalize(float(res.x), ProfiniteInt(depth, t0))
    return None


def order_preserved(f: AnyMap, z: SolenoidPoint, offsets: Sequence[float]) -> bool:
    """Check that lifted images of leaf points ``z + sigma(u)`` stay ordered in ``u``."""
    us = sorted(offsets)
    images = []
    for u in us:
        _, _, d = f.step(z.x + u, z.t.residue)
        images.append(u + d)
    return all(b > a for a, b in zip(images, images[1:]))
