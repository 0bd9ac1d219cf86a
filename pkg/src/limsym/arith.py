"""Exact integer/rational arithmetic: cusps, 2x2 matrices, quadratic surds and
continued fractions."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence, Union


class _Infinity:
    """The cusp at infinity, projective point (1:0)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Cusp = Union[Fraction, _Infinity]


def as_cusp(x) -> Cusp:
    if x is INF:
        return INF
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "oo", "infinity", "i*inf", "iinf"):
            return INF
        return Fraction(s)
    return Fraction(x)


def cusp_pair(c: Cusp) -> tuple[int, int]:
    """Projective coordinates (p, q) with gcd 1, q >= 0 and (1, 0) for infinity."""
    if c is INF:
        return (1, 0)
    return (c.numerator, c.denominator)


def cusp_from_pair(p: int, q: int) -> Cusp:
    if q == 0:
        if p == 0:
            raise ValueError("(0:0) is not a projective point")
        return INF
    return Fraction(p, q)


def cusp_str(c: Cusp) -> str:
    return "inf" if c is INF else str(c)


# ---------------------------------------------------------------------------
# 2x2 integer matrices


@dataclass(frozen=True, slots=True)
class Mat2:
    a: int
    b: int
    c: int
    d: int

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def adj(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inv(self) -> "Mat2":
        """Inverse of a unimodular matrix."""
        det = self.det()
        if det == 1:
            return self.adj()
        if det == -1:
            return -self.adj()
        raise ValueError(f"matrix {self} is not unimodular (det={det})")

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1

    def psl_key(self) -> tuple[int, int, int, int]:
        """Canonical representative of {g, -g}."""
        t = (self.a, self.b, self.c, self.d)
        for v in t:
            if v != 0:
                return t if v > 0 else tuple(-u for u in t)
        return t

    def proj_eq(self, o: "Mat2") -> bool:
        return self.psl_key() == o.psl_key()

    def tolist(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]

    def __call__(self, z):
        return moebius(self, z)


IDENTITY = Mat2(1, 0, 0, 1)
S = Mat2(0, -1, 1, 0)
T = Mat2(1, 1, 0, 1)
TINV = Mat2(1, -1, 0, 1)
J = Mat2(1, 0, 0, -1)


def T_pow(x: int) -> Mat2:
    return Mat2(1, x, 0, 1)


def ST_pow(x: int) -> Mat2:
    """S * T^x."""
    return Mat2(0, -1, 1, x)


def moebius(g: Mat2, z):
    """Fractional-linear action. Cusps (Fraction / INF) stay exact; anything
    else is treated as a complex-like number."""
    a, b, c, d = g.a, g.b, g.c, g.d
    if z is INF:
        return cusp_from_pair(a, c)
    if isinstance(z, (int, Fraction)):
        z = Fraction(z)
        p, q = z.numerator, z.denominator
        return cusp_from_pair(a * p + b * q, c * p + d * q)
    den = c * z + d
    if den == 0:
        return INF
    return (a * z + b) / den


def sl2_with_first_column(p: int, q: int) -> Mat2:
    """Some g in SL2(Z) with g(inf) = p/q, i.e. first column (p, q)."""
    g, u, v = _xgcd(p, q)
    if g != 1:
        raise ValueError("column must be primitive")
    # p*u + q*v = 1  ->  (p -v; q u) has det p*u + q*v = 1
    return Mat2(p, -v, q, u)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def unimodular_between(u: Cusp, v: Cusp) -> Mat2 | None:
    """g in SL2(Z) with g(0) = u and g(inf) = v, or None if u, v are not
    Farey neighbours."""
    pu, qu = cusp_pair(u)
    pv, qv = cusp_pair(v)
    det = pv * qu - pu * qv
    if det == 1:
        return Mat2(pv, pu, qv, qu)
    if det == -1:
        return Mat2(-pv, pu, -qv, qu)
    return None


# ---------------------------------------------------------------------------
# Quadratic irrationals


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True, slots=True)
class QuadIrr:
    """The real number (p + sqrt(d)) / q, kept in normalized surd form
    (q divides d - p^2)."""

    p: int
    q: int
    d: int

    def __post_init__(self):
        if self.q == 0:
            raise ValueError("q must be nonzero")
        if self.d <= 0 or _is_square(self.d):
            raise ValueError(f"d={self.d} must be a positive non-square")
        if (self.d - self.p * self.p) % self.q:
            raise ValueError("not in normalized surd form; use QuadIrr.make")

    @classmethod
    def make(cls, p: int, q: int, d: int) -> "QuadIrr":
        """(p + sqrt(d))/q for arbitrary integers, normalized if needed."""
        if q == 0:
            raise ValueError("q must be nonzero")
        if d <= 0 or _is_square(d):
            raise ValueError(f"d={d} must be a positive non-square")
        if (d - p * p) % q:
            m = abs(q)
            p, q, d = p * m, q * m, d * m * m
        return cls(p, q, d)

    def sign(self) -> int:
        num = 1 if (self.p >= 0 or self.p * self.p < self.d) else -1
        return num if self.q > 0 else -num

    def __neg__(self) -> "QuadIrr":
        # -(p + r)/q = (p + r)/(-q)
        return QuadIrr(self.p, -self.q, self.d)

    def __abs__(self) -> "QuadIrr":
        return self if self.sign() > 0 else -self

    def sub_int(self, n: int) -> "QuadIrr":
        return QuadIrr(self.p - n * self.q, self.q, self.d)

    def add_int(self, n: int) -> "QuadIrr":
        return self.sub_int(-n)

    def reciprocal(self) -> "QuadIrr":
        # q/(p + r) = (-p + r) / ((d - p^2)/q)
        return QuadIrr(-self.p, (self.d - self.p * self.p) // self.q, self.d)

    def floor(self) -> int:
        s = math.isqrt(self.d)
        if self.q > 0:
            return (self.p + s) // self.q
        return (-self.p - s - 1) // (-self.q)

    def conjugate_value(self) -> float:
        return (self.p - math.sqrt(self.d)) / self.q

    def __float__(self) -> float:
        return (self.p + math.sqrt(self.d)) / self.q

    def to_mpf(self):
        import mpmath

        return (mpmath.mpf(self.p) + mpmath.sqrt(self.d)) / self.q

    def same_value(self, o: "QuadIrr") -> bool:
        # (p1 + sqrt d1)/q1 == (p2 + sqrt d2)/q2  <=>  q2 p1 == q1 p2 and q2^2 d1 == q1^2 d2
        # together with matching sign of the surd coefficient
        return (
            o.q * self.p == self.q * o.p
            and o.q * o.q * self.d == self.q * self.q * o.d
            and (o.q > 0) == (self.q > 0)
        )

    def moebius(self, g: Mat2) -> "QuadIrr":
        """(a x + b)/(c x + d) exactly."""
        # x = (p + r)/q ; numerator = (a p + b q + a r)/q, denominator = (c p + d q + c r)/q
        a, b, c, dd = g.a, g.b, g.c, g.d
        n0, n1 = a * self.p + b * self.q, a
        m0, m1 = c * self.p + dd * self.q, c
        D = self.d
        # (n0 + n1 r)/(m0 + m1 r) = (n0 + n1 r)(m0 - m1 r)/(m0^2 - m1^2 D)
        den = m0 * m0 - m1 * m1 * D
        if den == 0:
            raise ZeroDivisionError("pole")
        u = n0 * m0 - n1 * m1 * D
        v = n1 * m0 - n0 * m1
        if v == 0:
            raise ValueError("result is rational")
        # (u + v r)/den = (u/v + r)/(den/v) with r = sqrt(D)  ->  (u*sgn + sqrt(v^2 D)) / (den*sgn/|v|)...
        # write as (u + sqrt(v^2 D))/den if v > 0 else -(−u + sqrt(v^2 D))/den
        if v > 0:
            return QuadIrr.make(u, den, v * v * D)
        return QuadIrr.make(-u, -den, v * v * D)


# ---------------------------------------------------------------------------
# Continued fractions


UNSIGNED = "unsigned"
SIGNED = "signed-alternating"


class CFExpansion:
    """Continued-fraction digit source.

    ``kind`` is one of ``"finite"``, ``"periodic"``, ``"streamed"``.  In
    unsigned mode digit 0 is a_0 (any integer) and digits k >= 1 are >= 1.
    In signed mode digits are indexed from 1, nonzero and alternate in sign.
    """

    def __init__(
        self,
        kind: str,
        *,
        digits: Sequence[int] = (),
        preperiod: Sequence[int] = (),
        period: Sequence[int] = (),
        generator: Iterator[int] | None = None,
        sign_mode: str = UNSIGNED,
    ):
        if kind not in ("finite", "periodic", "streamed"):
            raise ValueError(kind)
        self.kind = kind
        self.sign_mode = sign_mode
        self._offset = 0 if sign_mode == UNSIGNED else 1
        if kind == "finite":
            self._digits = list(digits)
        elif kind == "periodic":
            if not period:
                raise ValueError("empty period")
            self.preperiod = tuple(preperiod)
            self.period = tuple(period)
        else:
            self._gen = generator
            self._memo: list[int] = []
            self._lock = threading.Lock()
            self._exhausted = False
        if kind == "finite":
            self._validate(self._digits)

    def _validate(self, ds: Sequence[int]) -> None:
        for i, a in enumerate(ds):
            k = i + self._offset
            if self.sign_mode == UNSIGNED:
                if k >= 1 and a < 1:
                    raise ValueError(f"unsigned digit a_{k}={a} must be >= 1")
            else:
                if a == 0:
                    raise ValueError("signed digits must be nonzero")
                if i and ds[i - 1] * a >= 0:
                    raise ValueError("signed digits must alternate in sign")

    # -- access -----------------------------------------------------------
    def length(self) -> int | None:
        """Number of available digits, None when infinite."""
        if self.kind == "finite":
            return len(self._digits)
        if self.kind == "streamed" and self._exhausted:
            return len(self._memo)
        return None

    def digit(self, k: int) -> int:
        i = k - self._offset
        if i < 0:
            raise IndexError(k)
        if self.kind == "finite":
            if i >= len(self._digits):
                raise IndexError(f"digit {k} beyond finite expansion")
            return self._digits[i]
        if self.kind == "periodic":
            if i < len(self.preperiod):
                return self.preperiod[i]
            return self.period[(i - len(self.preperiod)) % len(self.period)]
        with self._lock:
            while len(self._memo) <= i:
                if self._exhausted:
                    raise IndexError(f"digit {k}: stream exhausted")
                try:
                    nxt = next(self._gen)
                except StopIteration:
                    self._exhausted = True
                    raise IndexError(f"digit {k}: stream exhausted") from None
                if self.sign_mode == SIGNED:
                    if nxt == 0 or (self._memo and self._memo[-1] * nxt >= 0):
                        raise ValueError("stream produced an inadmissible signed digit")
                elif len(self._memo) >= 1 and nxt < 1:
                    raise ValueError("stream produced a digit < 1")
                self._memo.append(nxt)
            return self._memo[i]

    def digits(self, n: int) -> list[int]:
        """The first n digits (starting at index 0 unsigned, 1 signed)."""
        return [self.digit(k + self._offset) for k in range(n)]

    def __repr__(self) -> str:
        if self.kind == "finite":
            return f"CFExpansion(finite, {self._digits})"
        if self.kind == "periodic":
            return f"CFExpansion(periodic, {list(self.preperiod)}, period={list(self.period)})"
        return f"CFExpansion(streamed, memo={len(self._memo)})"

    def value(self) -> Fraction:
        """Exact value of a finite expansion."""
        if self.kind != "finite":
            raise ValueError("value() is only defined for finite expansions")
        if self.sign_mode == SIGNED:
            return signed_convergent(self, len(self._digits))
        acc = Fraction(self._digits[-1])
        for a in reversed(self._digits[:-1]):
            acc = a + 1 / acc
        return acc

    # -- signed <-> unsigned ---------------------------------------------
    def abs_expansion(self) -> "CFExpansion":
        """For a signed expansion (x_1, x_2, ...) return the unsigned
        [0; |x_1|, |x_2|, ...] of |x|."""
        if self.sign_mode != SIGNED:
            raise ValueError("abs_expansion needs a signed expansion")
        if self.kind == "finite":
            return CFExpansion("finite", digits=[0] + [abs(a) for a in self._digits])
        if self.kind == "periodic":
            return CFExpansion(
                "periodic",
                preperiod=[0] + [abs(a) for a in self.preperiod],
                period=[abs(a) for a in self.period],
            )
        parent = self

        def gen():
            k = 1
            while True:
                try:
                    yield abs(parent.digit(k))
                except IndexError:
                    return
                k += 1

        return CFExpansion("streamed", generator=_prepend(0, gen()))

    def sign(self) -> int:
        """Sign of the coded point -sign(x_1)[|x_1|, ...] (signed mode)."""
        if self.sign_mode != SIGNED:
            raise ValueError("signed mode only")
        return -1 if self.digit(1) > 0 else 1


def _prepend(first, it):
    yield first
    yield from it


def finite_cf(digits: Sequence[int]) -> CFExpansion:
    return CFExpansion("finite", digits=digits)


def periodic_cf(preperiod: Sequence[int], period: Sequence[int], sign_mode: str = UNSIGNED) -> CFExpansion:
    return CFExpansion("periodic", preperiod=preperiod, period=period, sign_mode=sign_mode)


def streamed_cf(gen: Iterator[int] | Callable[[], Iterator[int]], sign_mode: str = UNSIGNED) -> CFExpansion:
    if callable(gen) and not hasattr(gen, "__next__"):
        gen = gen()
    return CFExpansion("streamed", generator=gen, sign_mode=sign_mode)


def cf_of_rational(x) -> CFExpansion:
    """Canonical finite expansion [a_0; a_1, ..., a_n] with a_n >= 2 when n >= 1."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    ds = []
    while q:
        a, r = divmod(p, q)
        ds.append(a)
        p, q = q, r
    # Euclid already ends with a_n >= 2 unless n == 0
    return CFExpansion("finite", digits=ds)


def cf_of_quadratic(x: QuadIrr, max_steps: int = 100000) -> CFExpansion:
    """Eventually periodic expansion; the period is found by recurrence of the
    surd state (p, q)."""
    seen: dict[tuple[int, int], int] = {}
    ds: list[int] = []
    cur = x
    for step in range(max_steps):
        state = (cur.p, cur.q)
        if state in seen:
            start = seen[state]
            return CFExpansion("periodic", preperiod=ds[:start], period=ds[start:])
        seen[state] = step
        a = cur.floor()
        ds.append(a)
        cur = cur.sub_int(a).reciprocal()
    raise RuntimeError("period not found")


def convergents(cf: CFExpansion, n: int) -> list[tuple[int, int]]:
    """Pairs (p_k, q_k) for k = 0..n of an unsigned expansion, using
    p_{-1} = 1, q_{-1} = 0 and p_0 = a_0, q_0 = 1."""
    if cf.sign_mode != UNSIGNED:
        cf = cf.abs_expansion()
    length = cf.length()
    if length is not None and n >= length:
        raise IndexError(f"only {length} digits available (asked for convergent {n})")
    out = []
    pm, qm = 1, 0
    p, q = cf.digit(0), 1
    out.append((p, q))
    for k in range(1, n + 1):
        a = cf.digit(k)
        p, pm = a * p + pm, p
        q, qm = a * q + qm, q
        out.append((p, q))
    return out


def iter_convergents(cf: CFExpansion) -> Iterator[tuple[int, int]]:
    """Lazy (p_k, q_k) for k = 0, 1, ... until the digits run out."""
    if cf.sign_mode != UNSIGNED:
        cf = cf.abs_expansion()
    pm, qm = 1, 0
    p, q = cf.digit(0), 1
    yield p, q
    k = 1
    while True:
        try:
            a = cf.digit(k)
        except IndexError:
            return
        p, pm = a * p + pm, p
        q, qm = a * q + qm, q
        yield p, q
        k += 1


def _pq_pair(cf: CFExpansion, k: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """((p_k, q_k), (p_{k-1}, q_{k-1})) with the seed p_{-1}/q_{-1} = 1/0."""
    if k == 0:
        return (cf.digit(0), 1), (1, 0)
    cs = convergents(cf, k)
    return cs[k], cs[k - 1]


def g_matrix(cf: CFExpansion, k: int) -> Mat2:
    """(p_k p_{k-1}; q_k q_{k-1}), determinant (-1)^{k+1}."""
    if k < 1:
        raise ValueError("k >= 1")
    (p, q), (pm, qm) = _pq_pair(cf, k)
    return Mat2(p, pm, q, qm)


def g_matrix_alt(cf: CFExpansion, k: int) -> Mat2:
    """Column-swapped convention (p_{k-1} p_k; q_{k-1} q_k)."""
    if k < 1:
        raise ValueError("k >= 1")
    (p, q), (pm, qm) = _pq_pair(cf, k)
    return Mat2(pm, p, qm, q)


def signed_convergent(cf: CFExpansion, n: int) -> Fraction:
    """n-th convergent of the point -sign(x_1)[|x_1|, ..., |x_n|]."""
    if n == 0:
        return Fraction(0)
    p, q = convergents(cf.abs_expansion(), n)[n]
    return -_sgn(cf.digit(1)) * Fraction(p, q)


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def bar_g(cf: CFExpansion, k: int) -> Mat2:
    """Product S T^{x_1} ... S T^{x_k} of a signed expansion (identity for k = 0)."""
    if cf.sign_mode != SIGNED:
        raise ValueError("bar_g needs a signed expansion")
    g = IDENTITY
    for i in range(1, k + 1):
        g = g @ ST_pow(cf.digit(i))
    return g


def bar_g_closed(cf: CFExpansion, k: int) -> Mat2:
    """Closed form
    (-s p_{k-1}, (-1)^k p_k; q_{k-1}, (-1)^{k+1} s q_k) with s = sign(x_1),
    p, q the convergents of |x|. Agrees with :func:`bar_g` in PSL2(Z)."""
    if cf.sign_mode != SIGNED:
        raise ValueError("bar_g needs a signed expansion")
    if k == 0:
        return IDENTITY
    s = _sgn(cf.digit(1))
    cs = convergents(cf.abs_expansion(), k)
    p, q = cs[k]
    pm, qm = cs[k - 1]
    sk = -1 if k % 2 else 1
    return Mat2(-s * pm, sk * p, qm, -sk * s * q)


def signed_cf_of_point(x: QuadIrr) -> CFExpansion:
    """Signed alternating expansion (x_1, x_2, ...) of a point x in [-1, 1]
    with x = -sign(x_1)[|x_1|, |x_2|, ...]."""
    s = x.sign()
    ax = abs(x)
    if ax.floor() != 0:
        raise ValueError("point must lie in (-1, 1)")
    un = cf_of_quadratic(ax)
    # a_0 = 0 never recurs since complete quotients past a_0 exceed 1
    body_pre = list(un.preperiod[1:])
    per = list(un.period)
    if len(per) % 2:
        per = per + per
    first = -s

    def signed(seq, start):
        return [(first if (start + i) % 2 == 0 else -first) * a for i, a in enumerate(seq)]

    return CFExpansion(
        "periodic",
        preperiod=signed(body_pre, 0),
        period=signed(per, len(body_pre)),
        sign_mode=SIGNED,
    )


def signed_cf_from_unsigned_digits(sign: int, digits: Iterator[int] | Sequence[int]) -> Iterator[int]:
    """Turn |x| = [n_1, n_2, ...] and sign(x) into the signed letter stream."""
    first = -sign
    for i, a in enumerate(digits):
        yield (first if i % 2 == 0 else -first) * a
