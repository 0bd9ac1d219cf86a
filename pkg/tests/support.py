"""Random instance generators shared by the property tests."""

import random
from fractions import Fraction

from limsym.arith import IDENTITY, INF, S, T, TINV
from limsym.symbols import CuspSymbolTerm, HomPoly, g_transform


def random_cusp(rng: random.Random, height: int = 200):
    if rng.random() < 0.1:
        return INF
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_poly(rng: random.Random, w: int) -> HomPoly:
    return HomPoly(tuple(rng.randint(-5, 5) for _ in range(w + 1)))


def random_word(rng: random.Random, length: int = 10):
    g = IDENTITY
    for _ in range(length):
        g = g @ rng.choice((S, T, TINV))
    return g


def random_group_element(rng: random.Random, table, length: int = 10):
    g = random_word(rng, length)
    return table.witness(g, table.coset_of(g))


def random_term(rng: random.Random, w: int) -> CuspSymbolTerm:
    a = random_cusp(rng)
    b = random_cusp(rng)
    return CuspSymbolTerm.make(a, b, random_poly(rng, w))


def check_additivity(space, rng) -> bool:
    a, b, c = (random_cusp(rng) for _ in range(3))
    P = random_poly(rng, space.w)
    lhs = space.reduce_term(CuspSymbolTerm.make(a, b, P)) + space.reduce_term(CuspSymbolTerm.make(b, c, P))
    return lhs == space.reduce_term(CuspSymbolTerm.make(a, c, P))


def check_antisymmetry(space, rng) -> bool:
    a, b = random_cusp(rng), random_cusp(rng)
    P = random_poly(rng, space.w)
    return space.reduce_term(CuspSymbolTerm.make(a, b, P)) == -space.reduce_term(CuspSymbolTerm.make(b, a, P))


def check_invariance(space, rng) -> bool:
    t = random_term(rng, space.w)
    g = random_group_element(rng, space.table)
    if rng.random() < 0.5:
        g = -g
    return space.reduce_term(g_transform(t, g)) == space.reduce_term(t)


def check_boundary(space, rng) -> bool:
    t = random_term(rng, space.w)
    return space.boundary_of_vector(space.reduce_term(t)) == space.boundary_term(t)
