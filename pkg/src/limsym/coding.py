"""Shift space coding of points (x, e) with x in [-1, 1] and e a coset."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import (
    SIGNED,
    CFExpansion,
    QuadIrr,
    ST_pow,
    signed_cf_of_point,
    signed_convergent,
)
from .cosets import CosetTable


@dataclass(frozen=True, slots=True)
class ShiftLetter:
    x: int
    e: int

    def __post_init__(self):
        if self.x == 0:
            raise ValueError("letter digit must be nonzero")


class ShiftWord:
    """Admissible word ((x_1, e_1), ..., (x_n, e_n)): digits alternate in sign
    and e_{k+1} = tau_{x_k}(e_k)."""

    __slots__ = ("letters", "table")

    def __init__(self, letters: Sequence[ShiftLetter], table: CosetTable, check: bool = True):
        self.letters = tuple(letters)
        self.table = table
        if check:
            problem = admissibility_error(self.letters, table)
            if problem:
                raise ValueError(problem)

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __eq__(self, o) -> bool:
        return isinstance(o, ShiftWord) and self.letters == o.letters and self.table.spec == o.table.spec

    def __hash__(self):
        return hash((self.letters, self.table.spec))

    def __repr__(self) -> str:
        return f"ShiftWord({[(l.x, l.e) for l in self.letters]})"

    @property
    def digits(self) -> list[int]:
        return [l.x for l in self.letters]

    def to_json(self) -> list[list[int]]:
        return [[l.x, l.e] for l in self.letters]

    @classmethod
    def from_json(cls, data, table: CosetTable) -> "ShiftWord":
        return cls([ShiftLetter(int(x), int(e)) for x, e in data], table)


def admissibility_error(letters: Sequence[ShiftLetter], table: CosetTable) -> str | None:
    for i, l in enumerate(letters):
        if not 0 <= l.e < table.index:
            return f"letter {i + 1}: coset index {l.e} out of range"
        if i:
            prev = letters[i - 1]
            if prev.x * l.x >= 0:
                return f"letters {i}, {i + 1}: digits must alternate in sign"
            if table.tau_index(prev.x, prev.e) != l.e:
                return f"letter {i + 1}: coset {l.e} does not follow tau_{prev.x}({prev.e})"
    return None


class CodingPoint:
    """A point x in [-1, 1] (already pulled back by its coset) together with
    the starting coset e1.  x is a QuadIrr or a signed expansion."""

    def __init__(self, x: QuadIrr | CFExpansion, e1: int = 0):
        if isinstance(x, QuadIrr):
            if abs(float(x)) > 1:
                raise ValueError("point must satisfy |x| <= 1")
        elif isinstance(x, CFExpansion):
            if x.sign_mode != SIGNED:
                raise ValueError("expansion must be in signed-alternating mode")
        else:
            raise TypeError("point must be a QuadIrr or a signed CFExpansion")
        self.x = x
        self.e1 = e1
        self._cf: CFExpansion | None = None

    @property
    def signed_cf(self) -> CFExpansion:
        if self._cf is None:
            self._cf = signed_cf_of_point(self.x) if isinstance(self.x, QuadIrr) else self.x
        return self._cf

    @property
    def is_quadratic(self) -> bool:
        return isinstance(self.x, QuadIrr)

    def sign(self) -> int:
        return self.signed_cf.sign()

    def __float__(self) -> float:
        if isinstance(self.x, QuadIrr):
            return float(self.x)
        cf = self.signed_cf
        n = cf.length()
        n = min(n, 60) if n is not None else 60
        return float(signed_convergent(cf, n))

    def describe(self) -> dict:
        if isinstance(self.x, QuadIrr):
            return {"kind": "quad", "p": self.x.p, "q": self.x.q, "d": self.x.d, "e1": self.e1}
        return {"kind": "digits", "e1": self.e1}

    @classmethod
    def from_signed_digits(cls, digits: Sequence[int], e1: int = 0) -> "CodingPoint":
        return cls(CFExpansion("finite", digits=list(digits), sign_mode=SIGNED), e1)


def rho(xs: Sequence[int] | CFExpansion, n: int) -> Fraction:
    """n-th convergent -sign(x_1) p_n/q_n of [0; |x_1|, ..., |x_n|]."""
    if not isinstance(xs, CFExpansion):
        xs = CFExpansion("finite", digits=list(xs)[:max(n, 1)], sign_mode=SIGNED)
    return signed_convergent(xs, n)


def encode(p: CodingPoint, table: CosetTable, n: int) -> ShiftWord:
    """First n letters (x_k, e_k) with e_{k+1} = tau_{x_k}(e_k)."""
    cf = p.signed_cf
    if not 0 <= p.e1 < table.index:
        raise ValueError(f"coset index {p.e1} out of range")
    length = cf.length()
    if length is not None and n > length:
        raise ValueError(f"point is rational: expansion terminates after {length} digits")
    letters = []
    e = p.e1
    for k in range(1, n + 1):
        x = cf.digit(k)
        letters.append(ShiftLetter(x, e))
        e = table.tau_index(x, e)
    return ShiftWord(letters, table, check=False)


def twisted_gauss(x: QuadIrr) -> QuadIrr:
    """-sign(x) (1/|x| - floor(1/|x|))."""
    if not isinstance(x, QuadIrr):
        raise ValueError("twisted_gauss needs an exact irrational point")
    s = x.sign()
    r = abs(x).reciprocal()
    frac = r.sub_int(r.floor())
    return -frac if s > 0 else frac


def shift(w: ShiftWord) -> ShiftWord:
    if not len(w):
        raise ValueError("cannot shift an empty word")
    return ShiftWord(w.letters[1:], w.table, check=False)


def metric(w1: ShiftWord, w2: ShiftWord) -> Fraction:
    """sum_{i=1}^{n} 2^{-i} [letter_i differs]."""
    if len(w1) != len(w2):
        raise ValueError("words must have equal length")
    out = Fraction(0)
    for i, (a, b) in enumerate(zip(w1.letters, w2.letters), start=1):
        if a != b:
            out += Fraction(1, 2 ** i)
    return out


def e_chain_vs_bar_g(w: ShiftWord) -> bool:
    if not len(w):
        return True
    t = w.table
    r1 = t.reps[w.letters[0].e]
    cf = CFExpansion("finite", digits=w.digits, sign_mode=SIGNED)
    g = r1  # r_{e_1} bar_g(k), built incrementally
    for k in range(1, len(w)):
        g = g @ ST_pow(cf.digit(k))
        if t.coset_of(g) != w.letters[k].e:
            return False
    return True


def irreducibility_witness(
    table: CosetTable, a: ShiftLetter, b: ShiftLetter, digit_bound: int
) -> ShiftWord | None:
    """Shortest word w with digits |x| <= digit_bound such that a w b is
    admissible; breadth-first over (coset, sign of last digit) states.
    Returns None when no such word exists."""
    if digit_bound < 1:
        raise ValueError("digit_bound must be >= 1")
    for l in (a, b):
        if not 0 <= l.e < table.index:
            raise ValueError(f"coset index {l.e} out of range")
    start = (table.tau_index(a.x, a.e), 1 if a.x > 0 else -1)
    sb = 1 if b.x > 0 else -1

    def done(state) -> bool:
        return state[0] == b.e and state[1] == -sb

    if done(start):
        return ShiftWord([], table, check=False)
    parent: dict = {start: None}
    queue = deque([start])
    cap = table.index * 2 * digit_bound
    expanded = 0
    while queue and expanded < cap:
        st = queue.popleft()
        expanded += 1
        e, s = st
        for mag in range(1, digit_bound + 1):
            x = -s * mag
            nxt = (table.tau_index(x, e), -s)
            if nxt in parent:
                continue
            parent[nxt] = (st, ShiftLetter(x, e))
            if done(nxt):
                letters = []
                cur = nxt
                while parent[cur] is not None:
                    prev, letter = parent[cur]
                    letters.append(letter)
                    cur = prev
                return ShiftWord(letters[::-1], table)
            queue.append(nxt)
    return None
