import random

import pytest

from limsym.arith import IDENTITY, S, T, Mat2, ST_pow
from limsym.cosets import FULL, SubgroupSpec, enumerate_cosets, index_formula, member

GAMMA0_INDEX = {2: 3, 3: 4, 4: 6, 5: 6, 6: 12, 7: 8, 11: 12, 12: 24, 23: 24, 25: 30, 30: 72}


def _random_sl2(rng, length=12):
    g = IDENTITY
    for _ in range(length):
        g = g @ rng.choice((S, T, ST_pow(rng.randint(-3, 3) or 1)))
    return g


def test_parse_round_trip():
    for text in ("full", "gamma0:11", "gamma1:5", "gamma:3"):
        assert str(SubgroupSpec.parse(text)) == text
    assert SubgroupSpec.parse("gamma0:1") == FULL
    with pytest.raises(ValueError):
        SubgroupSpec.parse("borel:3")


@pytest.mark.parametrize("N,idx", sorted(GAMMA0_INDEX.items()))
def test_gamma0_index_frozen(N, idx):
    spec = SubgroupSpec("gamma0", N)
    assert index_formula(spec) == idx
    assert enumerate_cosets(spec).index == idx


@pytest.mark.parametrize("spec,idx", [("full", 1), ("gamma1:5", 12), ("gamma:2", 6), ("gamma:3", 12), ("gamma1:4", 6)])
def test_other_indices_frozen(spec, idx):
    s = SubgroupSpec.parse(spec)
    assert index_formula(s) == idx == enumerate_cosets(s).index


def test_member_basic():
    g0 = SubgroupSpec("gamma0", 11)
    assert member(g0, Mat2(1, 0, 11, 1))
    assert member(g0, Mat2(-1, 0, -11, -1))
    assert not member(g0, S)
    assert member(SubgroupSpec("gamma1", 5), Mat2(-1, 0, -5, -1))
    assert not member(SubgroupSpec("gamma1", 5), Mat2(2, 1, 5, 3))
    with pytest.raises(ValueError):
        member(g0, Mat2(2, 0, 0, 1))


@pytest.mark.parametrize("text", ["gamma0:11", "gamma0:6", "gamma1:5", "gamma:3"])
def test_table_consistency(text):
    table = enumerate_cosets(SubgroupSpec.parse(text))
    assert table.coset_of(IDENTITY) == 0
    for i, r in enumerate(table.reps):
        assert table.coset_of(r) == i
        assert table.coset_of(r @ S) == table.right_mul["S"][i]
        assert table.coset_of(r @ T) == table.right_mul["T"][i]
        # right multiplication is a permutation and S is an involution
        assert table.right_mul["S"][table.right_mul["S"][i]] == i
        assert table.right_mul["Tinv"][table.right_mul["T"][i]] == i


def test_coset_invariance_random():
    rng = random.Random(11)
    spec = SubgroupSpec("gamma0", 11)
    table = enumerate_cosets(spec)
    for _ in range(200):
        g = _random_sl2(rng)
        e = table.coset_of(g)
        assert member(spec, table.witness(g, e))


def test_tau_witness_in_group():
    rng = random.Random(5)
    table = enumerate_cosets(SubgroupSpec("gamma0", 23))
    for _ in range(200):
        x = rng.choice([v for v in range(-9, 10) if v])
        e = rng.randrange(table.index)
        e2, w = table.tau(x, e)
        assert member(table.spec, w)
        assert w @ table.reps[e2] == table.reps[e] @ ST_pow(x) or (w @ table.reps[e2]).proj_eq(table.reps[e] @ ST_pow(x))
    with pytest.raises(ValueError):
        table.tau(0, 0)


@pytest.mark.parametrize("text,ncusps", [("full", 1), ("gamma0:2", 2), ("gamma0:4", 3), ("gamma0:11", 2), ("gamma0:6", 4), ("gamma:3", 4)])
def test_cusp_counts_frozen(text, ncusps):
    assert len(enumerate_cosets(SubgroupSpec.parse(text)).cusp_classes()) == ncusps


def test_to_json_shape():
    js = enumerate_cosets(SubgroupSpec("gamma0", 2)).to_json()
    assert js["index"] == 3 and js["reps"][0] == [1, 0, 0, 1]
    assert set(js["right_mul"]) == {"S", "T", "Tinv"}
