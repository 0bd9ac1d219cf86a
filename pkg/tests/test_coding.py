import random
from fractions import Fraction

import pytest

from limsym.arith import QuadIrr
from limsym.coding import (
    CodingPoint,
    ShiftLetter,
    ShiftWord,
    e_chain_vs_bar_g,
    encode,
    irreducibility_witness,
    metric,
    rho,
    shift,
    twisted_gauss,
)
from limsym.cosets import FULL, SubgroupSpec, enumerate_cosets
from limsym.limiting import random_coding_point

GOLDEN = QuadIrr.make(-1, 2, 5)
SILVER = QuadIrr.make(-1, 1, 2)


@pytest.fixture(scope="module")
def g11():
    return enumerate_cosets(SubgroupSpec("gamma0", 11))


def test_rho_frozen():
    assert rho([2, -2], 1) == Fraction(-1, 2)
    assert rho([-1, 2, -1, 2], 4) == Fraction(8, 11)


def test_encode_golden_full():
    table = enumerate_cosets(FULL)
    w = encode(CodingPoint(GOLDEN), table, 6)
    assert w.to_json() == [[-1, 0], [1, 0], [-1, 0], [1, 0], [-1, 0], [1, 0]]


def test_encode_silver_digits():
    table = enumerate_cosets(FULL)
    assert encode(CodingPoint(SILVER), table, 4).digits == [-2, 2, -2, 2]


def test_encode_convergents_approach_point(g11):
    p = CodingPoint(GOLDEN)
    w = encode(p, g11, 30)
    assert abs(float(rho(w.digits, 30)) - float(GOLDEN)) < 1e-12


def test_encode_rational_rejected(g11):
    p = CodingPoint.from_signed_digits([-2, 3])
    with pytest.raises(ValueError, match="rational"):
        encode(p, g11, 5)


def test_encode_admissible_and_chain(g11):
    rng = random.Random(4)
    for _ in range(20):
        p = random_coding_point(rng, 40, rng.randrange(g11.index))
        w = encode(p, g11, 40)
        ShiftWord(w.letters, g11)  # raises if inadmissible
        assert e_chain_vs_bar_g(w)


def test_shift_commutes_with_gauss(g11):
    for x in (GOLDEN, SILVER, QuadIrr.make(-2, 3, 13), -QuadIrr.make(-2, 3, 13)):
        w = encode(CodingPoint(x, 3), g11, 12)
        e2 = g11.tau_index(w[0].x, 3)
        w2 = encode(CodingPoint(twisted_gauss(x), e2), g11, 11)
        assert shift(w) == w2


def test_inadmissible_rejected(g11):
    with pytest.raises(ValueError, match="alternate"):
        ShiftWord([ShiftLetter(1, 0), ShiftLetter(2, g11.tau_index(1, 0))], g11)
    with pytest.raises(ValueError):
        ShiftLetter(0, 0)
    bad_e = (g11.tau_index(1, 0) + 1) % g11.index
    with pytest.raises(ValueError, match="tau"):
        ShiftWord([ShiftLetter(1, 0), ShiftLetter(-2, bad_e)], g11)


def test_metric():
    table = enumerate_cosets(FULL)
    a = encode(CodingPoint(GOLDEN), table, 5)
    b = encode(CodingPoint(SILVER), table, 5)
    assert metric(a, a) == 0
    assert metric(a, b) == sum(Fraction(1, 2 ** i) for i in range(1, 6))


def test_word_json_round_trip(g11):
    w = encode(CodingPoint(SILVER, 2), g11, 8)
    assert ShiftWord.from_json(w.to_json(), g11) == w


def test_irreducibility_full_frozen():
    table = enumerate_cosets(FULL)
    w = irreducibility_witness(table, ShiftLetter(1, 0), ShiftLetter(1, 0), 3)
    assert w.to_json() == [[-1, 0]]
    w = irreducibility_witness(table, ShiftLetter(1, 0), ShiftLetter(-1, 0), 3)
    assert len(w) == 0


@pytest.mark.parametrize("text", ["gamma0:2", "gamma0:11"])
def test_irreducibility_connected(text):
    table = enumerate_cosets(SubgroupSpec.parse(text))
    letters = [ShiftLetter(x, e) for x in (-3, -2, -1, 1, 2, 3) for e in range(table.index)]
    for a in letters:
        for b in letters[:: max(1, len(letters) // 12)]:
            w = irreducibility_witness(table, a, b, 3)
            assert w is not None
            full = ShiftWord([a, *w.letters, b], table)
            assert len(full) == len(w) + 2
