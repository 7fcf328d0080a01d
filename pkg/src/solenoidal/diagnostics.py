"""Empirical probes: orbit-closure coverage, Weyl sums, circle-level oracle."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

from .core_numbers import factorial, parse_rational
from .dynamics import (
    AnyMap,
    CharacterPolynomial,
    LevelPeriodicTable,
    SolenoidMap,
)
from .solenoid import SolenoidPoint, add, base_leaf, char_angle, char_eval, level_project

FULL = "FullSolenoid"
CANTOR = "CantorLike"
TRAPPED = "FixedOrTrapped"
INCONCLUSIVE = "Inconclusive"


@dataclass
class CoverageGrid:
    """``x_bins`` leaf bins times ``fiber_depth!`` fiber residues."""

    x_bins: int
    fiber_depth: int
    visited: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.visited = np.zeros((factorial(self.fiber_depth), self.x_bins), dtype=bool)

    @property
    def fill_fraction(self) -> float:
        return float(self.visited.sum()) / self.visited.size

    @property
    def fiber_marginal(self) -> np.ndarray:
        return self.visited.any(axis=1)

    @property
    def leaf_marginal(self) -> np.ndarray:
        return self.visited.any(axis=0)


@dataclass(frozen=True)
class MinimalityVerdict:
    verdict: str
    fill_curve: tuple[tuple[int, float], ...]
    diameter_curve: tuple[tuple[int, float], ...]
    fiber_coverage: float
    params: dict
    grid: CoverageGrid = field(repr=False, compare=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "fill_curve": [list(p) for p in self.fill_curve],
            "diameter_curve": [list(p) for p in self.diameter_curve],
            "fiber_coverage": self.fiber_coverage,
            "params": self.params,
        }


def minimality_classify(
    f: AnyMap,
    z0: SolenoidPoint,
    n_schedule: Sequence[int],
    B: int = 256,
    j: int = 3,
    full_threshold: Optional[float] = None,
    plateau_tol: Optional[float] = None,
    period_tol: float = 1e-9,
) -> MinimalityVerdict:
    """Classify the orbit closure of ``z0`` from its cell coverage.

    * ``FixedOrTrapped``: the lifted orbit spans less than one leaf bin, or
      the orbit returns to ``z0`` (within ``period_tol`` on the leaf), so its
      closure is a finite periodic orbit.
    * ``FullSolenoid``: coverage reaches ``full_threshold`` (default
      ``1 - 2/B``) and grew at every schedule entry until saturating.
    * ``CantorLike``: coverage plateaus below the threshold (growth under
      ``plateau_tol``, default ``1/B``) over the last two entries while every
      fiber residue is visited.  A plateau with missing fibers counts as
      trapped.
    * ``Inconclusive`` otherwise.

    Minimality is not decidable from a finite orbit; all thresholds are
    reported in ``params``.
    """
    sched = [int(n) for n in n_schedule]
    if not sched or any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 1:
        raise ValueError("n_schedule must be positive and increasing")
    if j > f.depth:
        raise ValueError(f"fiber depth {j} exceeds working depth {f.depth}")
    full_threshold = 1.0 - 2.0 / B if full_threshold is None else full_threshold
    plateau_tol = 1.0 / B if plateau_tol is None else plateau_tol
    grid = CoverageGrid(B, j)
    visited = grid.visited
    fibers = factorial(j)
    # lifted level-j displacement of the translation part
    a_lift = level_project(f.alpha, j)
    step = f.step
    x, t = z0.x, z0.t.residue
    x0, t0 = x, t
    period = None
    lift = 0.0
    lo = hi = 0.0
    visited[t % fibers, min(int(x * B), B - 1)] = True
    fill_curve = []
    diam_curve = []
    done = 0
    for target in sched:
        for m in range(done + 1, target + 1):
            x, t, d = step(x, t)
            lift += a_lift + d
            if lift < lo:
                lo = lift
            elif lift > hi:
                hi = lift
            visited[t % fibers, min(int(x * B), B - 1)] = True
            if period is None and t == t0 and min(abs(x - x0), 1.0 - abs(x - x0)) < period_tol:
                period = m
        done = target
        fill_curve.append((target, grid.fill_fraction))
        diam_curve.append((target, hi - lo))
    fills = [v for _, v in fill_curve]
    fiber_cov = float(grid.fiber_marginal.mean())
    cell = 1.0 / B
    if diam_curve[-1][1] < cell or period is not None:
        verdict = TRAPPED
    elif fills[-1] >= full_threshold and all(
        b > a or a >= full_threshold for a, b in zip(fills, fills[1:])
    ):
        verdict = FULL
    elif len(fills) >= 2 and fills[-1] - fills[-2] <= plateau_tol and fills[-1] < full_threshold:
        verdict = CANTOR if fiber_cov == 1.0 else TRAPPED
    else:
        verdict = INCONCLUSIVE
    params = {
        "B": B,
        "j": j,
        "n_schedule": sched,
        "full_threshold": full_threshold,
        "plateau_tol": plateau_tol,
        "K": f.depth,
        "period_tol": period_tol,
        "period": period,
    }
    return MinimalityVerdict(verdict, tuple(fill_curve), tuple(diam_curve), fiber_cov, params, grid)


@dataclass(frozen=True)
class WeylResult:
    average: complex
    N: int
    bound: Optional[float]  # geometric-series bound, pure rotations only

    @property
    def modulus(self) -> float:
        return abs(self.average)


def weyl_sum(
    f: AnyMap,
    q: Union[Fraction, int, str],
    N: int,
    z0: Optional[SolenoidPoint] = None,
) -> WeylResult:
    """``(1/N) sum_{j<N} chi_q(f^j z0)``.

    For a translation the modulus is at most ``2 / (N |1 - chi_q(rho)|)``,
    which is returned as ``bound``.
    """
    q = parse_rational(q)
    if N < 1:
        raise ValueError("N must be positive")
    depth = f.depth
    if factorial(depth) % q.denominator:
        from .solenoid import UnresolvableCharacter

        raise UnresolvableCharacter("character not resolvable at this depth")
    if z0 is None:
        from .solenoid import zero

        z0 = zero(depth)
    x, t = z0.x, z0.t.residue
    re = im = 0.0
    step = f.step
    for k in range(N):
        ang = 2.0 * math.pi * (char_angle(q, x, t) % 1.0)
        re += math.cos(ang)
        im += math.sin(ang)
        if k + 1 < N:
            x, t, _ = step(x, t)
    avg = complex(re / N, im / N)
    bound = None
    if isinstance(f, SolenoidMap) and f.is_translation:
        c = float(f.phi.c) if isinstance(f.phi, CharacterPolynomial) else f.phi.values[0]
        rho = add(f.alpha, base_leaf(c, depth))
        w = char_eval(q, rho)
        if abs(1 - w) > 0:
            bound = 2.0 / (N * abs(1 - w))
    return WeylResult(avg, N, bound)


class NotLevelFactoring(ValueError):
    pass


def induced_circle_lift(f: SolenoidMap, j: Optional[int] = None) -> tuple[Callable[[float], float], int]:
    """Lift ``X -> X + A + phi(X)`` of the map induced on ``R / j! Z``.

    Written directly from the displacement coefficients, without solenoid
    points, so that it can serve as an independent check.
    """
    if not isinstance(f, SolenoidMap):
        raise NotLevelFactoring("only explicit solenoid maps induce a circle map")
    phi = f.phi
    level = phi.level
    j = level if j is None else j
    if j < level or j > f.depth:
        raise NotLevelFactoring(f"map does not factor through level {j}")
    period = factorial(j)
    shift = f.alpha.x + (f.alpha.t.residue % period)
    if isinstance(phi, CharacterPolynomial):
        c = float(phi.c)
        freqs = np.array([2.0 * math.pi * float(q) for q, _, _ in phi.terms])
        amp_a = np.array([a for _, a, _ in phi.terms])
        amp_b = np.array([b for _, _, b in phi.terms])

        def lift(X: float) -> float:
            return X + shift + c + float(amp_a @ np.cos(freqs * X) + amp_b @ np.sin(freqs * X))

    elif isinstance(phi, LevelPeriodicTable):
        p = factorial(phi.level)
        vals = np.asarray(phi.values)
        nodes = np.linspace(0.0, 1.0, len(vals)) if phi.nodes is None else np.asarray(phi.nodes)

        def lift(X: float) -> float:
            return X + shift + float(np.interp((X % p) / p, nodes, vals))

    else:
        raise NotLevelFactoring(f"unsupported displacement {type(phi).__name__}")
    return lift, j


def circle_oracle_rotation_number(
    f: SolenoidMap, x0: float = 0.0, n: int = 100_000, j: Optional[int] = None
) -> float:
    """Classical rotation number ``(F^n(x0) - x0) / (n j!)`` of the level-``j`` circle map.

    The value is in turns of the circle ``R / j! Z``; multiply by ``j!`` for
    leaf units.
    """
    lift, j = induced_circle_lift(f, j)
    X = float(x0)
    for _ in range(n):
        X = lift(X)
    return (X - x0) / (n * factorial(j))
