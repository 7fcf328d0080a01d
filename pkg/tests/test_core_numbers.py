from fractions import Fraction
import math

import pytest
from hypothesis import given, strategies as st

from solenoidal.core_numbers import (
    DepthError,
    ExactSum,
    ProfiniteInt,
    factorial,
    format_rational,
    is_monothetic_generator,
    parse_rational,
    profinite_add,
    profinite_project,
)


@pytest.mark.parametrize(
    "depth, a, b, expected",
    [(3, 5, 3, 2), (2, 0, 0, 0), (4, 23, 1, 0)],
)
def test_profinite_add_examples(depth, a, b, expected):
    out = profinite_add(ProfiniteInt(depth, a), ProfiniteInt(depth, b))
    assert out == ProfiniteInt(depth, expected)


def test_profinite_add_depth_mismatch():
    with pytest.raises(DepthError, match="incompatible truncation depths"):
        profinite_add(ProfiniteInt(3, 1), ProfiniteInt(4, 1))


@pytest.mark.parametrize(
    "depth, r, j, expected",
    [(4, 23, 3, 5), (3, 5, 3, 5), (5, 119, 2, 1)],
)
def test_profinite_project_examples(depth, r, j, expected):
    assert profinite_project(ProfiniteInt(depth, r), j) == ProfiniteInt(j, expected)


def test_project_cannot_refine():
    with pytest.raises(DepthError, match="cannot refine a truncation"):
        profinite_project(ProfiniteInt(3, 1), 4)


def test_negative_residues_normalized():
    assert ProfiniteInt(3, -1).residue == 5
    assert ProfiniteInt(4, -25).residue == 23


def _orbit_size(r, modulus):
    # brute force: additive orbit of r in Z/modulus
    seen, v = set(), 0
    for _ in range(modulus):
        seen.add(v)
        v = (v + r) % modulus
    return len(seen)


def test_monothetic_examples():
    assert is_monothetic_generator(ProfiniteInt(4, 1))
    assert not is_monothetic_generator(ProfiniteInt(2, 0))
    assert _orbit_size(5, 24) == 24
    assert is_monothetic_generator(ProfiniteInt(4, 5))


@pytest.mark.parametrize("depth", [1, 2, 3, 4, 5])
def test_monothetic_matches_brute_force(depth):
    m = factorial(depth)
    for r in range(m):
        assert is_monothetic_generator(ProfiniteInt(depth, r)) == (_orbit_size(r, m) == m)


@given(
    st.integers(1, 7),
    st.integers(-10**12, 10**12),
    st.integers(-10**12, 10**12),
    st.data(),
)
def test_projection_is_homomorphism(depth, a, b, data):
    j = data.draw(st.integers(1, depth))
    x, y = ProfiniteInt(depth, a), ProfiniteInt(depth, b)
    lhs = profinite_project(profinite_add(x, y), j)
    rhs = profinite_add(profinite_project(x, j), profinite_project(y, j))
    assert lhs == rhs


@given(st.integers(1, 9), st.integers(0, 10**15))
def test_projection_compatibility(depth, r):
    a = ProfiniteInt(depth, r)
    for j in range(1, depth + 1):
        assert a.residue % factorial(j) == profinite_project(a, j).residue


def test_large_depth_uses_exact_integers():
    a = ProfiniteInt(30, -1)
    assert a.residue == math.factorial(30) - 1
    assert profinite_add(a, ProfiniteInt(30, 1)).residue == 0


@given(st.fractions(), st.fractions())
def test_rational_round_trip_exact(p, q):
    assert (p + q) - q == p
    assert parse_rational(format_rational(p)) == p


def test_rational_rejects_floats():
    with pytest.raises(TypeError):
        parse_rational(0.5)
    assert parse_rational("6/4") == Fraction(3, 2)
    assert Fraction(0).denominator == 1


def test_profinite_json_round_trip():
    a = ProfiniteInt(12, 123456789)
    data = a.to_json()
    assert data == {"depth": 12, "residue": "123456789"}
    assert ProfiniteInt.from_json(data) == a


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=50))
def test_exact_sum_matches_fsum(values):
    acc = ExactSum()
    for v in values:
        acc.add(v)
    assert acc.value() == math.fsum(values)
    assert acc.exact() == sum(Fraction(v) for v in values)


def test_exact_sum_constant_mean_is_exact():
    acc = ExactSum()
    for _ in range(1000):
        acc.add(0.3)
    assert acc.mean() == 0.3
