import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from solenoidal.core_numbers import ProfiniteInt, factorial
from solenoidal.dynamics import (
    CharacterPolynomial,
    ConjugatedMap,
    HaarNotInvariant,
    InvalidMap,
    LevelPeriodicTable,
    OrbitSummary,
    SolenoidMap,
    apply,
    bmv_deviations,
    conjugacy_defect,
    default_denominator_bound,
    find_fixed_point,
    identity_map,
    iterate,
    order_preserved,
    rotation_element_birkhoff,
    rotation_element_exact_haar,
    rotation_interval,
    rotation_map,
    semiconjugacy_sup,
)
from solenoidal.solenoid import (
    SolenoidPoint,
    UnresolvableCharacter,
    add,
    base_leaf,
    level_project,
    metric,
    point,
    zero,
)
from solenoidal.suspension import random_map, random_point

K = 6


def poly(c=0.0, *terms, depth=K, alpha=None):
    return SolenoidMap(alpha or zero(depth), CharacterPolynomial(c, tuple(terms)))


def circle_rotation_number(lift, n, x0=0.0):
    """Plain-Python Poincare rotation number of a circle lift."""
    x = x0
    for _ in range(n):
        x = lift(x)
    return (x - x0) / n


# -- apply -------------------------------------------------------------------

def test_apply_examples():
    f = rotation_map(0.3, 3)
    out = apply(f, point(0.9, 0, 3))
    assert out.t.residue == 1 and out.x == pytest.approx(0.2, abs=1e-15)
    z = point(0.42, 5)
    assert apply(identity_map(K), z) == z
    g = poly(0.0, (Fraction(1), 0.0, 0.1), depth=3)
    out = apply(g, point(0.25, 0, 3))
    assert out.x == pytest.approx(0.35, abs=1e-15) and out.t.residue == 0


def test_phi_evaluated_before_translation():
    alpha = point(0.5, 0)
    f = poly(0.0, (Fraction(1), 0.0, 0.1), alpha=alpha)
    # phi at z = (0.25, 0) is 0.1; at z + alpha it would be -0.1
    assert apply(f, point(0.25, 0)).x == pytest.approx(0.85)


def test_map_validation():
    with pytest.raises(InvalidMap):
        poly(0.0, (Fraction(1), 0.2, 0.0))
    with pytest.raises(UnresolvableCharacter):
        poly(0.0, (Fraction(1, 7), 0.001, 0.0))
    with pytest.raises(InvalidMap):
        LevelPeriodicTable(1, (0.0, 0.5, 0.1))
    with pytest.raises(InvalidMap):
        SolenoidMap(zero(K), LevelPeriodicTable(1, (0.0, -2.0, 0.0)))


def test_map_json_round_trip():
    f = poly(Fraction(1, 3), (Fraction(1, 2), 0.01, -0.02), alpha=point(0.1, 7))
    g = SolenoidMap.from_json(f.to_json())
    z = point(0.77, 301)
    assert apply(f, z) == apply(g, z)
    t = SolenoidMap(zero(K), LevelPeriodicTable(2, (0.1, 0.2, 0.1), (0.0, 0.3, 1.0)))
    u = SolenoidMap.from_json(t.to_json())
    assert apply(t, z) == apply(u, z)


def test_invert():
    rng = random.Random(3)
    for _ in range(50):
        f = random_map(rng, K)
        z = random_point(rng, K)
        assert metric(f.invert(apply(f, z)), z) < 1e-12


# -- iterate -----------------------------------------------------------------

def test_iterate_examples():
    z0 = point(0.1, 0)
    rec = iterate(rotation_map(0.3, K), z0, 0)
    assert rec.points == [z0] and list(rec.leaf_displacement) == [0.0]
    rec = iterate(rotation_map(0.3, K), z0, 10)
    assert rec.leaf_displacement[10] == pytest.approx(3.0, abs=1e-14)
    assert rec.leaf_displacement[0] == 0.0


def test_iterate_denjoy_average_within_range(denjoy):
    f = denjoy.map(K)
    rec = iterate(f, zero(K), 1000)
    phis = [f.displacement(rec.point(m)) for m in range(1000)]
    avg = rec.leaf_displacement[-1] / 1000
    assert min(phis) <= avg <= max(phis)
    assert np.allclose(np.diff(rec.leaf_displacement), phis, atol=1e-14)


def test_streaming_is_bit_identical():
    f = poly(0.21, (Fraction(1, 2), 0.03, 0.01), (Fraction(5, 6), -0.01, 0.02))
    z = point(0.3, 11)
    full = iterate(f, z, 5000)
    s1 = iterate(f, z, 5000, streaming=True)
    s2 = iterate(f, z, 5000, streaming=True)
    assert isinstance(s1, OrbitSummary)
    assert s1.total.exact() == s2.total.exact()
    assert s1.leaf_displacement == full.leaf_displacement[-1]
    assert s1.final == full.point(5000)


def test_orbit_csv_rows():
    rec = iterate(rotation_map(0.25, K), zero(K), 2)
    rows = list(rec.to_csv_rows())
    assert rows[2][0] == 2 and rows[2][2] == 0 and float(rows[2][3]) == 0.5


# -- rotation element --------------------------------------------------------

@pytest.mark.parametrize("c", [0.3, 1 / 3, math.sqrt(2) - 1, -0.7, 2.25])
def test_birkhoff_pure_rotation_exact(c):
    for n in (1, 7, 1000):
        est = rotation_element_birkhoff(rotation_map(c, K), point(0.4, 3), n)
        assert est.r == c and est.ci_halfwidth == 0.0


def test_birkhoff_identity():
    assert rotation_element_birkhoff(identity_map(K), zero(K), 100).r == 0.0


def test_birkhoff_matches_plain_circle_loop():
    f = poly(0.3, (Fraction(1), 0.0, 0.05))
    est = rotation_element_birkhoff(f, zero(K), 100_000)
    oracle = circle_rotation_number(lambda x: x + 0.3 + 0.05 * math.sin(2 * math.pi * x), 100_000)
    assert abs(est.r - oracle) < 1e-4


def test_exact_haar():
    est = rotation_element_exact_haar(rotation_map("1/3", K))
    assert est.exact == Fraction(1, 3) and est.method == "haar"
    assert rotation_element_exact_haar(identity_map(K)).r == 0
    with pytest.raises(HaarNotInvariant, match="Haar invariance not guaranteed"):
        rotation_element_exact_haar(poly(0.2, (Fraction(1), 0.01, 0.0)))


def test_rotation_element_includes_translation_part():
    alpha = point(0.0, 1)
    est = rotation_element_birkhoff(rotation_map(0.25, K, alpha), zero(K), 10)
    assert est.element == add(alpha, base_leaf(0.25))


def test_interval_pure_rotation():
    c = math.sqrt(2) - 1
    iv = rotation_interval(rotation_map(c, K), [point(u, t) for u, t in [(0, 0), (0.5, 3), (0.9, 100)]], 50)
    assert iv.r_min == iv.r_max == c
    assert iv.is_pseudo_irrational
    assert iv.irrationality.denominator_bound == default_denominator_bound(K) == 6


def test_interval_rational_rotation_not_pseudo_irrational():
    iv = rotation_interval(rotation_map(0.5, K), [zero(K)], 10)
    assert not iv.is_pseudo_irrational and iv.irrationality.witness == 2


def test_interval_with_fixed_point():
    f = poly(0.05, (Fraction(1), -0.05, 0.0))  # 0.05 (1 - cos 2 pi x)
    iv = rotation_interval(f, [zero(K)], 1000)
    assert iv.contains(0.0)
    iv = rotation_interval(f, [zero(K), point(0.5, 0), point(0.3, 4)], 1000)
    assert iv.r_min == 0.0 and iv.r_max >= 0.0
    # all displacements are nonnegative, so every Birkhoff average is too
    assert all(e.r >= 0.0 for e in iv.estimates)


# -- BMV and semiconjugacy ---------------------------------------------------

def test_bmv_pure_rotation_zero():
    for c in (0.3, 1 / 7, math.sqrt(3) - 1):
        rep = bmv_deviations(rotation_map(c, K), point(0.2, 9), c, 2000)
        assert rep.sup == 0.0 and not rep.deviations.any()


def test_bmv_denjoy_bounded(denjoy):
    f = denjoy.map(K)
    rep = bmv_deviations(f, zero(K), denjoy.rotation, 20_000)
    assert rep.sup < 1.0
    assert rep.running_sup([100, 20_000])[0] <= rep.sup


def test_bmv_wrong_tau_grows_linearly():
    rep = bmv_deviations(rotation_map(0.3, K), zero(K), 0.25, 1000)
    assert rep.growth_slope() == pytest.approx(0.05, rel=1e-9)


def test_semiconjugacy_pure_rotation_identity():
    z = point(0.37, 123)
    for N in (1, 10, 1000):
        h = semiconjugacy_sup(rotation_map(0.3, K), 0.3, z, N)
        assert h.point == z and h.stability == 0.0


def test_semiconjugacy_monotone_in_N(denjoy):
    f = denjoy.map(K)
    z = denjoy.cantor_point(0.3)
    shifts = [semiconjugacy_sup(f, denjoy.rotation, z, N).shift for N in (10, 100, 1000)]
    assert shifts == sorted(shifts)


def test_semiconjugacy_denjoy_defect(denjoy):
    f = denjoy.map(K)
    rng = random.Random(5)
    for _ in range(5):
        z = denjoy.cantor_point(rng.random(), rng.randrange(factorial(K)))
        assert conjugacy_defect(f, denjoy.rotation, z, 10_000) < 1e-6


def test_semiconjugacy_diverges_without_bmv():
    h = semiconjugacy_sup(rotation_map(0.3, K), 0.2, zero(K), 1000)
    h2 = semiconjugacy_sup(rotation_map(0.3, K), 0.2, zero(K), 4000)
    assert h2.stability > h.stability > 10


# -- fixed points ------------------------------------------------------------

def test_fixed_point_one_minus_cos():
    f = poly(0.05, (Fraction(1), -0.05, 0.0))
    z = find_fixed_point(f)
    assert z is not None and abs(f.displacement(z)) < 1e-10
    assert min(z.x, 1 - z.x) < 1e-4


def test_fixed_point_none_for_rotation():
    assert find_fixed_point(rotation_map(0.3, K)) is None


def test_fixed_point_sine():
    f = poly(0.0, (Fraction(1), 0.0, 0.1))
    z = find_fixed_point(f)
    assert abs(f.displacement(z)) < 1e-10
    assert min(abs(z.x - r) for r in (0.0, 0.5, 1.0)) < 1e-9


def test_fixed_point_needs_isotopic_map():
    with pytest.raises(ValueError):
        find_fixed_point(rotation_map(0.1, K, point(0.5, 0)))


def test_fixed_point_gives_zero_dirac_rotation():
    f = poly(0.02, (Fraction(1, 3), 0.03, 0.0), (Fraction(1, 2), 0.0, 0.01))
    z = find_fixed_point(f)
    assert z is not None
    assert abs(rotation_element_birkhoff(f, z, 1).r) < 1e-9


# -- invariants --------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_order_preserved(seed):
    rng = random.Random(seed)
    f = random_map(rng, K, margin=0.99)
    z = random_point(rng, K)
    offsets = [rng.uniform(-3, 3) for _ in range(50)]
    assert order_preserved(f, z, offsets)


def test_continuity_on_shared_orbit():
    f = poly(0.3, (Fraction(1), 0.0, 0.05), (Fraction(1, 2), 0.02, 0.0))
    rec = iterate(f, point(0.1, 2), 5000)
    pts = rec.points[:-1]
    for eps in (1e-2, 1e-4, 1e-6):
        g_phi = CharacterPolynomial(0.3 + eps / 3, ((Fraction(1), eps / 3, 0.05), (Fraction(1, 2), 0.02, eps / 3)))
        a = sum(f.displacement(z) for z in pts) / len(pts)
        b = sum(g_phi.value(z.x, z.t.residue) for z in pts) / len(pts)
        assert abs(a - b) <= eps + 1e-15


@pytest.mark.parametrize("j", [1, 2, 3])
def test_level_factoring_commutes_with_projection(j):
    rng = random.Random(j)
    m = factorial(j)
    qs = [Fraction(a, m) for a in (1, 2, m + 1)]
    f = poly(0.17, *[(q, 0.01, 0.005) for q in qs])
    assert f.level <= j
    for _ in range(200):
        z = random_point(rng, K)
        u = level_project(z, j)
        image = (u + 0.17 + sum(0.01 * math.cos(2 * math.pi * float(q) * u) + 0.005 * math.sin(2 * math.pi * float(q) * u) for q in qs)) % m
        diff = abs(level_project(apply(f, z), j) - image)
        assert min(diff, m - diff) < 1e-12


def test_conjugation_invariance_short():
    f = poly(0.3, (Fraction(1), 0.0, 0.1 / (2 * math.pi)))
    h = poly(0.0, (Fraction(1, 2), 0.05, 0.02))
    g = ConjugatedMap(f, h)
    rf = rotation_element_birkhoff(f, zero(K), 20_000)
    rg = rotation_element_birkhoff(g, zero(K), 20_000)
    assert abs(rf.r - rg.r) < 1e-3
    with pytest.raises(InvalidMap):
        ConjugatedMap(f, rotation_map(0.1, K, point(0.5, 0)))
