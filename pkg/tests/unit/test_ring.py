"""Unit tests for the ring module."""
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from src.ring import (
    InvalidRingSpec,
    NotInvertible,
    RingMismatch,
    RingSpec,
    UnsupportedRing,
    is_prime,
    parse_ring,
)

RINGS = [RingSpec.gf(5), RingSpec.gf(7), RingSpec.zmod(6), RingSpec.zmod(4), RingSpec.rational()]


def test_parse_ring_flags():
    assert parse_ring("gf:7") == RingSpec.gf(7)
    assert parse_ring("zmod:6") == RingSpec.zmod(6)
    assert parse_ring("q") == RingSpec.rational()
    assert parse_ring(" GF:3 ").flag == "gf:3"


@pytest.mark.parametrize("flag", ["gf:6", "gf", "zmod:1", "zmod:x", "r", "gf:4294967311"])
def test_parse_ring_rejects(flag):
    with pytest.raises(InvalidRingSpec):
        parse_ring(flag)


def test_descriptors():
    assert RingSpec.gf(5).is_field
    assert not RingSpec.zmod(6).is_field
    assert RingSpec.zmod(7).is_field
    assert RingSpec.rational().size is None
    assert RingSpec.zmod(4).characteristic == 4
    assert RingSpec.rational().characteristic == 0


def test_canonical_representatives():
    gf5 = RingSpec.gf(5)
    assert gf5(-1).value == 4
    assert gf5(Fraction(1, 2)).value == 3
    assert RingSpec.rational()(3).value == Fraction(3)


def test_inverse_and_units():
    gf7 = RingSpec.gf(7)
    assert gf7(3).inverse() * 3 == 1
    z6 = RingSpec.zmod(6)
    assert z6(5).inverse() == 5
    with pytest.raises(NotInvertible):
        z6(2).inverse()
    with pytest.raises(NotInvertible):
        RingSpec.rational()(0).inverse()


def test_mixed_rings_rejected():
    with pytest.raises(RingMismatch):
        RingSpec.gf(5)(1) + RingSpec.gf(7)(1)


def test_elements():
    assert [s.value for s in RingSpec.gf(3).elements()] == [0, 1, 2]
    with pytest.raises(UnsupportedRing):
        list(RingSpec.rational().elements())


def test_parse_and_format_values():
    q = RingSpec.rational()
    assert q.parse_value("-3/6") == Fraction(-1, 2)
    assert q.format_value(Fraction(-1, 2)) == "-1/2"
    assert RingSpec.gf(7).parse_value("1/2") == 4
    with pytest.raises(InvalidRingSpec):
        q.parse_value("1/0")


@pytest.mark.parametrize("p,expected", [(2, True), (9, False), (97, True), (1, False)])
def test_is_prime(p, expected):
    assert is_prime(p) is expected


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.flag)
@given(a=st.integers(-50, 50), b=st.integers(-50, 50), c=st.integers(-50, 50))
def test_ring_axioms(ring, a, b, c):
    x, y, z = ring(a), ring(b), ring(c)
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == 0


WIDE = [RingSpec.gf(2**31 - 1), RingSpec.zmod(2**31 - 2), RingSpec.zmod(6)]
wide_ints = st.integers(-(2**80), 2**80)


@pytest.mark.parametrize("ring", WIDE, ids=lambda r: r.flag)
@settings(max_examples=500)
@given(a=wide_ints, b=wide_ints)
def test_modular_arithmetic_matches_big_integers(ring, a, b):
    m = ring.modulus
    assert (ring(a) + ring(b)).value == (a + b) % m
    assert (ring(a) - ring(b)).value == (a - b) % m
    assert (ring(a) * ring(b)).value == (a * b) % m
    assert 0 <= ring(a).value < m
    if gcd(a, m) == 1:
        assert (ring(a).inverse().value * a) % m == 1


@settings(max_examples=500)
@given(a=st.fractions(max_denominator=10**6), b=st.fractions(max_denominator=10**6))
def test_rationals_match_fractions(a, b):
    q = RingSpec.rational()
    assert (q(a) * q(b)).value == a * b
    assert (q(a) - q(b)).value == a - b
    if a:
        assert q(a).inverse().value == 1 / a
