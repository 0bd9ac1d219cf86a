"""Congruence subgroups of PSL2(Z): membership, coset tables and the
transition maps tau_x(e) = coset of e S T^x."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .arith import IDENTITY, S, T, TINV, Mat2, ST_pow

KINDS = ("full", "gamma0", "gamma1", "gamma")


@dataclass(frozen=True)
class SubgroupSpec:
    kind: str
    N: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown subgroup kind {self.kind!r}")
        if self.N < 1:
            raise ValueError("level must be >= 1")
        if self.kind == "full" and self.N != 1:
            object.__setattr__(self, "N", 1)

    @classmethod
    def parse(cls, text: str) -> "SubgroupSpec":
        """'full', 'gamma0:11', 'gamma1:5', 'gamma:3'."""
        t = text.strip().lower().replace("(", ":").replace(")", "")
        if t in ("full", "sl2", "psl2", "1"):
            return cls("full")
        if ":" not in t:
            raise ValueError(f"bad group spec {text!r}")
        kind, n = t.split(":", 1)
        aliases = {"g0": "gamma0", "gamma_0": "gamma0", "g1": "gamma1", "gamma_1": "gamma1", "principal": "gamma", "g": "gamma"}
        kind = aliases.get(kind, kind)
        N = int(n)
        if N == 1:
            return cls("full")
        return cls(kind, N)

    def __str__(self) -> str:
        return "full" if self.kind == "full" else f"{self.kind}:{self.N}"


FULL = SubgroupSpec("full")


def member(spec: SubgroupSpec, g: Mat2) -> bool:
    """True iff +g or -g satisfies the congruences defining the group."""
    if not g.is_unimodular():
        raise ValueError(f"{g} is not unimodular")
    if spec.kind == "full":
        return True
    N = spec.N
    if g.c % N:
        return False
    if spec.kind == "gamma0":
        return True
    if spec.kind == "gamma1":
        return (g.a - 1) % N == 0 and (g.d - 1) % N == 0 or (g.a + 1) % N == 0 and (g.d + 1) % N == 0
    # principal congruence subgroup
    if g.b % N:
        return False
    return (g.a - 1) % N == 0 and (g.d - 1) % N == 0 or (g.a + 1) % N == 0 and (g.d + 1) % N == 0


def coset_key(spec: SubgroupSpec, g: Mat2):
    """Invariant of the right coset G g; equal keys <=> same coset."""
    if spec.kind == "full":
        return ()
    N = spec.N
    if spec.kind == "gamma0":
        return _p1_key(g.c, g.d, N)
    if spec.kind == "gamma1":
        a = (g.c % N, g.d % N)
        b = (-g.c % N, -g.d % N)
        return min(a, b)
    a = (g.a % N, g.b % N, g.c % N, g.d % N)
    b = tuple(-v % N for v in (g.a, g.b, g.c, g.d))
    return min(a, b)


@lru_cache(maxsize=None)
def _units(N: int) -> tuple[int, ...]:
    return tuple(u for u in range(1, N) if math.gcd(u, N) == 1) or (1,)


def _p1_key(c: int, d: int, N: int) -> tuple[int, int]:
    c %= N
    d %= N
    return min((u * c % N, u * d % N) for u in _units(N))


def index_formula(spec: SubgroupSpec) -> int:
    """Classical index of the image of the group in PSL2(Z)."""
    N = spec.N
    if spec.kind == "full" or N == 1:
        return 1
    primes = [p for p in range(2, N + 1) if N % p == 0 and all(p % r for r in range(2, math.isqrt(p) + 1))]
    if spec.kind == "gamma0":
        num = N
        for p in primes:
            num = num * (p + 1) // p
        return num
    sl2 = N ** 3
    for p in primes:
        sl2 = sl2 * (p * p - 1) // (p * p)
    if spec.kind == "gamma":
        return sl2 // 2 if N > 2 else sl2
    # gamma1: [SL2 : Gamma1] = N^2 prod(1 - p^-2); -I in Gamma1(N) only for N <= 2
    g1 = sl2 // N
    return g1 // 2 if N > 2 else g1


GENERATORS = (("S", S), ("T", T), ("Tinv", TINV))


@dataclass
class CosetTable:
    """Representatives E_G of the right cosets G\\PSL2(Z).

    ``right_mul[name][i]`` is the index of the coset of ``reps[i] * gen``.
    """

    spec: SubgroupSpec
    reps: list[Mat2]
    right_mul: dict[str, list[int]]
    _lookup: dict = field(default_factory=dict, repr=False)

    @property
    def index(self) -> int:
        return len(self.reps)

    def coset_of(self, g: Mat2) -> int:
        if not g.is_unimodular():
            raise ValueError(f"{g} is not unimodular")
        return self._lookup[coset_key(self.spec, g)]

    def witness(self, g: Mat2, e: int) -> Mat2:
        """g * reps[e]^{-1}, an element of G when e = coset_of(g)."""
        return g @ self.reps[e].inv()

    def tau(self, x: int, e: int) -> tuple[int, Mat2]:
        """(e', w) with e' the coset of reps[e] S T^x and
        w = reps[e] S T^x reps[e']^{-1} in G."""
        if x == 0:
            raise ValueError("tau_x needs x != 0")
        h = self.reps[e] @ ST_pow(x)
        e2 = self.coset_of(h)
        return e2, self.witness(h, e2)

    def tau_index(self, x: int, e: int) -> int:
        return self.coset_of(self.reps[e] @ ST_pow(x))

    def to_json(self) -> dict:
        return {
            "spec": str(self.spec),
            "index": self.index,
            "reps": [g.tolist() for g in self.reps],
            "right_mul": {k: list(v) for k, v in self.right_mul.items()},
        }

    # cusp classes are the orbits of right multiplication by T
    def cusp_classes(self) -> list[list[int]]:
        seen: dict[int, int] = {}
        classes: list[list[int]] = []
        for i in range(self.index):
            if i in seen:
                continue
            orbit = []
            j = i
            while j not in seen:
                seen[j] = len(classes)
                orbit.append(j)
                j = self.right_mul["T"][j]
            classes.append(orbit)
        return classes

    def cusp_class_of_coset(self) -> list[int]:
        out = [0] * self.index
        for ci, orbit in enumerate(self.cusp_classes()):
            for j in orbit:
                out[j] = ci
        return out


_TABLE_CACHE: dict[SubgroupSpec, CosetTable] = {}


def enumerate_cosets(spec: SubgroupSpec) -> CosetTable:
    """Breadth-first closure of the identity coset under right multiplication
    by S, T, T^-1 (in that order); first word reaching a coset represents it."""
    if spec in _TABLE_CACHE:
        return _TABLE_CACHE[spec]
    reps = [IDENTITY]
    lookup = {coset_key(spec, IDENTITY): 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for _, gen in GENERATORS:
            h = reps[i] @ gen
            k = coset_key(spec, h)
            if k not in lookup:
                lookup[k] = len(reps)
                reps.append(h)
                queue.append(lookup[k])
    right_mul = {name: [lookup[coset_key(spec, r @ gen)] for r in reps] for name, gen in GENERATORS}
    table = CosetTable(spec, reps, right_mul, lookup)
    _TABLE_CACHE[spec] = table
    return table


def coset_of(table: CosetTable, g: Mat2) -> int:
    return table.coset_of(g)


def tau(table: CosetTable, x: int, e: int) -> tuple[int, Mat2]:
    return table.tau(x, e)
