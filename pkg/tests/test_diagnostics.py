import math
from fractions import Fraction

import pytest

from solenoidal.core_numbers import factorial
from solenoidal.diagnostics import (
    CANTOR,
    FULL,
    TRAPPED,
    NotLevelFactoring,
    circle_oracle_rotation_number,
    minimality_classify,
    weyl_sum,
)
from solenoidal.dynamics import (
    CharacterPolynomial,
    ConjugatedMap,
    SolenoidMap,
    identity_map,
    rotation_element_birkhoff,
    rotation_map,
)
from solenoidal.solenoid import point, zero

K = 6
SCHEDULE = [10**3, 10**4, 10**5]


def test_classify_rotation_full():
    v = minimality_classify(rotation_map(math.sqrt(2) - 1, K), zero(K), [10**3, 10**4, 10**5, 3 * 10**5], B=64)
    assert v.verdict == FULL
    assert v.to_json()["params"]["B"] == 64


def test_classify_identity_trapped():
    assert minimality_classify(identity_map(K), zero(K), SCHEDULE).verdict == TRAPPED


def test_classify_rational_rotation_trapped():
    v = minimality_classify(rotation_map(0.25, K), zero(K), SCHEDULE, B=64)
    assert v.verdict == TRAPPED  # periodic orbit: plateau, fibers missed


def test_classify_denjoy_cantor(denjoy):
    v = minimality_classify(denjoy.map(K), denjoy.cantor_point(0.1), SCHEDULE, B=128)
    assert v.verdict == CANTOR
    leaf = v.grid.leaf_marginal
    # the large wandering gaps are never visited
    for a, b in denjoy.largest_gaps(3):
        lo, hi = math.ceil(a * 128), math.floor(b * 128)
        assert hi > lo and not leaf[lo:hi].any()


def test_classify_rejects_bad_schedule():
    with pytest.raises(ValueError):
        minimality_classify(identity_map(K), zero(K), [100, 10])


def test_weyl_examples():
    c = math.sqrt(2) - 1
    w = weyl_sum(rotation_map(c, K), 1, 10_000)
    assert w.modulus < 1e-3
    assert w.modulus <= w.bound
    assert w.bound == pytest.approx(2 / (10_000 * abs(1 - complex(math.cos(2 * math.pi * c), math.sin(2 * math.pi * c)))))
    assert weyl_sum(rotation_map(0.5, K), 2, 100).modulus == pytest.approx(1.0)
    assert weyl_sum(rotation_map(c, K), 0, 100).average == 1


@pytest.mark.parametrize("c", [0.1, math.sqrt(3) - 1, (math.sqrt(5) - 1) / 2])
@pytest.mark.parametrize("q", [Fraction(1), Fraction(1, 2), Fraction(5, 6)])
def test_weyl_bound_holds(c, q):
    w = weyl_sum(rotation_map(c, K), q, 3000, point(0.3, 5))
    assert w.bound is None or w.modulus <= w.bound + 1e-12


def test_oracle_examples():
    assert abs(circle_oracle_rotation_number(rotation_map(0.3, K), n=1000) - 0.3) < 1e-3
    assert circle_oracle_rotation_number(identity_map(K), n=100) == 0.0
    f = SolenoidMap(zero(K), CharacterPolynomial(0.3, ((Fraction(1), 0.0, 0.05),)))
    r = rotation_element_birkhoff(f, zero(K), 100_000).r
    assert abs(circle_oracle_rotation_number(f, n=100_000) - r) < 1e-4


def test_oracle_higher_level_units():
    # displacement depends on the level-2 coordinate: oracle reports turns of R / 2Z
    f = SolenoidMap(zero(K), CharacterPolynomial(0.2, ((Fraction(1, 2), 0.03, 0.0),)))
    turns = circle_oracle_rotation_number(f, n=50_000)
    r = rotation_element_birkhoff(f, zero(K), 50_000).r
    assert abs(turns * factorial(2) - r) < 1e-4


def test_oracle_rejects_non_factoring():
    f = rotation_map(0.3, K)
    with pytest.raises(NotLevelFactoring):
        circle_oracle_rotation_number(ConjugatedMap(f, identity_map(K)))
    with pytest.raises(NotLevelFactoring):
        circle_oracle_rotation_number(f, j=K + 1)
