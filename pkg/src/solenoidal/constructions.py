"""Denjoy-type circle homeomorphisms lifted to the solenoid.

The circle map is built the classical way: blow up the orbit
``theta_n = x0 + n*alpha`` of an irrational rotation into intervals of length
``l_n`` and map each interval affinely onto the next one.  Gap lengths decay
geometrically in ``|n|`` and are dropped once they fall below ``min_gap``.
With finitely many gaps the map is exactly piecewise linear, so it is stored
as a level table with non-uniform nodes.  Above the truncation scale it
behaves as a Denjoy counterexample: the gaps wander and the orbit closure of
a Cantor point is a Cantor set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core_numbers import ProfiniteInt
from .dynamics import LevelPeriodicTable, SolenoidMap
from .solenoid import SolenoidPoint, zero

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class _GapFunction:
    """``G(x) = (1 - L) x + sum_{theta_n < x} l_n`` on ``[0, 1]``."""

    def __init__(self, thetas: np.ndarray, lengths: np.ndarray) -> None:
        order = np.argsort(thetas)
        self.thetas = thetas[order]
        self.lengths = lengths[order]
        self.total = float(lengths.sum())
        self.before = np.concatenate(([0.0], np.cumsum(self.lengths)[:-1]))

    def left(self, x: float) -> float:
        """Left limit ``G(x-)``."""
        k = int(np.searchsorted(self.thetas, x, "left"))
        mass = self.before[k] if k < len(self.before) else self.total
        return (1.0 - self.total) * x + mass

    def lifted_left(self, x: float) -> float:
        k = math.floor(x)
        return k + self.left(x - k)

    def at_gap(self, theta: float) -> float:
        """``G`` just left of the gap placed at ``theta`` (which must be a gap point)."""
        k = int(np.searchsorted(self.thetas, theta, "left"))
        if k >= len(self.thetas) or self.thetas[k] != theta:
            raise ValueError("not a gap point")
        return (1.0 - self.total) * theta + self.before[k]


@dataclass(frozen=True)
class DenjoyConstruction:
    rotation: float
    offset: float
    gap_mass: float
    ratio: float
    indices: tuple[int, ...]
    table: LevelPeriodicTable
    gap_intervals: tuple[tuple[float, float], ...]  # (start, end) in leaf coordinate, by index
    _domain: _GapFunction

    def map(self, depth: int, level: int = 1) -> SolenoidMap:
        if level != 1:
            raise NotImplementedError("only the level-1 lift is built")
        return SolenoidMap(zero(depth), self.table)

    def cantor_point(self, u: float, t: int = 0, depth: int = 6) -> SolenoidPoint:
        """Image of the rotation coordinate ``u`` in the minimal Cantor set."""
        y = self._domain.left(u % 1.0)
        if y >= 1.0:
            y = 0.0
        return SolenoidPoint(y, ProfiniteInt(depth, t))

    def largest_gaps(self, k: int) -> list[tuple[float, float]]:
        gaps = sorted(self.gap_intervals, key=lambda g: g[1] - g[0], reverse=True)
        return gaps[:k]


def denjoy_construction(
    rotation: float = GOLDEN,
    gap_mass: float = 0.5,
    ratio: float = 0.5,
    offset: Optional[float] = None,
    min_gap: float = 1e-13,
) -> DenjoyConstruction:
    """Build the truncated Denjoy circle map with rotation number ``rotation``.

    Gap ``n`` has length proportional to ``ratio**|n|``, scaled so the full
    bi-infinite family has total length ``gap_mass``.
    """
    if not 0.0 < gap_mass < 1.0:
        raise ValueError("gap mass must lie in (0, 1)")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    if offset is None:
        offset = (math.sqrt(2.0) - 1.0) / 7.0
    scale = gap_mass * (1.0 - ratio) / (1.0 + ratio)
    kmax = 0
    while scale * ratio ** (kmax + 1) >= min_gap:
        kmax += 1
    dom_idx = np.arange(-kmax, kmax + 1)
    img_idx = dom_idx + 1

    def theta(idx: np.ndarray) -> np.ndarray:
        return np.mod(offset + idx * rotation, 1.0)

    def length(idx: np.ndarray) -> np.ndarray:
        return scale * ratio ** np.abs(idx).astype(float)

    dom = _GapFunction(theta(dom_idx), length(dom_idx))
    img = _GapFunction(theta(img_idx), length(img_idx))

    # knots: gap endpoints; the map is linear between consecutive knots
    knots_y = [0.0, 1.0]
    knots_f = [img.lifted_left(rotation), 1.0 + img.lifted_left(rotation)]
    gaps = []
    for n in dom_idx:
        th = float(theta(np.array([n]))[0])
        th_next = float(theta(np.array([n + 1]))[0])
        ln = float(length(np.array([n]))[0])
        y0 = dom.at_gap(th)
        # theta_{n+1} = theta_n + rotation up to an integer wrap
        f0 = round(th + rotation - th_next) + img.at_gap(th_next)
        l_next = float(length(np.array([n + 1]))[0])
        knots_y += [y0, y0 + ln]
        knots_f += [f0, f0 + l_next]
        gaps.append((y0, y0 + ln))
    order = np.argsort(knots_y)
    ys = np.asarray(knots_y)[order]
    fs = np.asarray(knots_f)[order]
    keep = np.concatenate(([True], np.diff(ys) > 0))
    ys, fs = ys[keep], fs[keep]
    psi = fs - ys
    psi[-1] = psi[0]
    table = LevelPeriodicTable(1, tuple(psi.tolist()), tuple(ys.tolist()))
    return DenjoyConstruction(
        rotation, offset, gap_mass, ratio, tuple(int(i) for i in dom_idx), table, tuple(gaps), dom
    )
