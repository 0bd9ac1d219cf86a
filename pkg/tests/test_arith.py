import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limsym.arith import (
    IDENTITY,
    INF,
    SIGNED,
    CFExpansion,
    Mat2,
    QuadIrr,
    S,
    T,
    bar_g,
    bar_g_closed,
    cf_of_quadratic,
    cf_of_rational,
    convergents,
    g_matrix,
    g_matrix_alt,
    moebius,
    signed_cf_of_point,
    sl2_with_first_column,
    streamed_cf,
    unimodular_between,
)


def test_cf_of_rational_examples():
    assert cf_of_rational(0).digits(1) == [0]
    assert cf_of_rational(Fraction(3, 7)).digits(3) == [0, 2, 3]
    assert cf_of_rational(Fraction(355, 113)).digits(3) == [3, 7, 16]


def test_cf_of_rational_canonical_last_digit():
    for x in (Fraction(3, 7), Fraction(355, 113), Fraction(-17, 5), Fraction(1, 2)):
        cf = cf_of_rational(x)
        ds = cf.digits(cf.length())
        if len(ds) > 1:
            assert ds[-1] >= 2


def test_cf_round_trip_random_rationals():
    rng = random.Random(7)
    for _ in range(10_000):
        x = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        assert cf_of_rational(x).value() == x


def test_cf_of_quadratic_examples():
    g = cf_of_quadratic(QuadIrr.make(-1, 2, 5))
    assert (list(g.preperiod), list(g.period)) == ([0], [1])
    s2 = cf_of_quadratic(QuadIrr.make(-1, 1, 2))
    assert (list(s2.preperiod), list(s2.period)) == ([0], [2])
    s7 = cf_of_quadratic(QuadIrr.make(0, 1, 7))
    assert (list(s7.preperiod), list(s7.period)) == ([2], [1, 1, 1, 4])


def test_cf_of_quadratic_rejects_square():
    with pytest.raises(ValueError):
        QuadIrr.make(0, 1, 9)


def test_quadratic_period_fixed_point():
    # the purely periodic tail is fixed by the product of its digit matrices
    for x in (QuadIrr.make(0, 1, 7), QuadIrr.make(1, 3, 13), QuadIrr.make(-1, 2, 5)):
        cf = cf_of_quadratic(x)
        tail = x
        for a in cf.preperiod:
            tail = tail.sub_int(a).reciprocal()
        m = IDENTITY
        for a in cf.period:
            m = m @ Mat2(a, 1, 1, 0)
        assert tail.moebius(m).same_value(tail)


def test_convergents_fibonacci_and_determinant():
    cf = cf_of_quadratic(QuadIrr.make(-1, 2, 5))
    cs = convergents(cf, 40)
    assert [q for _, q in cs[1:6]] == [1, 2, 3, 5, 8]
    for k in range(1, 40):
        (p, q), (pm, qm) = cs[k], cs[k - 1]
        assert p * qm - pm * q == (-1) ** (k + 1)


def test_convergents_reconstruct():
    assert convergents(cf_of_rational(Fraction(3, 7)), 2)[-1] == (3, 7)


def test_g_matrix():
    cf = cf_of_rational(Fraction(3, 7))
    assert g_matrix(cf, 1) == Mat2(1, 0, 2, 1)
    cf2 = cf_of_quadratic(QuadIrr.make(0, 1, 7))
    for k in range(1, 20):
        g = g_matrix(cf2, k)
        assert g.det() == (-1) ** (k + 1)
        cs = convergents(cf2, k)
        assert moebius(g, INF) == Fraction(*cs[k])
        assert moebius(g, Fraction(0)) == Fraction(*cs[k - 1])
        assert g_matrix_alt(cf2, k) == Mat2(g.b, g.a, g.d, g.c)


def test_bar_g_identity_and_small_case():
    cf = CFExpansion("finite", digits=[-1, 1], sign_mode=SIGNED)
    assert bar_g(cf, 0) == IDENTITY
    expected = S @ Mat2(1, -1, 0, 1) @ S @ T
    assert bar_g(cf, 2) == expected


def _random_signed(rng, n):
    s = rng.choice((-1, 1))
    return [s * (-1) ** i * rng.randint(1, 9) for i in range(n)]


def test_bar_g_closed_form_matches_product():
    rng = random.Random(3)
    for _ in range(50):
        cf = CFExpansion("finite", digits=_random_signed(rng, 50), sign_mode=SIGNED)
        for k in range(0, 51):
            assert bar_g(cf, k).proj_eq(bar_g_closed(cf, k))


def test_moebius_examples():
    assert moebius(S, INF) == 0
    assert moebius(T, Fraction(5, 3)) == Fraction(8, 3)
    assert moebius(T, 1j) == 1 + 1j
    assert moebius(S, Fraction(0)) is INF


def test_unimodular_between():
    g = unimodular_between(Fraction(1, 2), Fraction(2, 3))
    assert g is not None and abs(g.det()) == 1
    assert moebius(g, Fraction(0)) == Fraction(1, 2) and moebius(g, INF) == Fraction(2, 3)
    assert unimodular_between(Fraction(0), Fraction(2, 5)) is None


def test_sl2_with_first_column():
    g = sl2_with_first_column(5, 7)
    assert (g.a, g.c, g.det()) == (5, 7, 1)


def test_signed_expansion_sign_convention():
    cf = signed_cf_of_point(QuadIrr.make(-1, 2, 5))
    assert cf.digits(4) == [-1, 1, -1, 1]
    cf = signed_cf_of_point(-QuadIrr.make(-1, 1, 2))
    assert cf.digits(3) == [2, -2, 2]


def test_streamed_memoized():
    calls = []

    def gen():
        k = 1
        while True:
            calls.append(k)
            yield k
            k += 1

    cf = streamed_cf(gen())
    # digit(0) is a_0, the first yielded value
    assert cf.digit(5) == 6
    seen = len(calls)
    assert cf.digit(3) == 4
    assert len(calls) == seen


@settings(max_examples=200, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_property_cf_round_trip(p, q):
    x = Fraction(p, q)
    assert cf_of_rational(x).value() == x


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=30))
def test_property_unimodular_convergents(ds):
    cf = CFExpansion("finite", digits=[0] + ds)
    for k in range(1, len(ds) + 1):
        assert abs(g_matrix(cf, k).det()) == 1
