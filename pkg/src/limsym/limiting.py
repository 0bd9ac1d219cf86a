"""Partial sums of the higher-weight limiting modular symbol along a coded
point, the closed form at quadratic points, the weight-zero Birkhoff average
and Lyapunov exponents."""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import (
    IDENTITY,
    INF,
    SIGNED,
    UNSIGNED,
    CFExpansion,
    Mat2,
    QuadIrr,
    ST_pow,
    cf_of_quadratic,
    cf_of_rational,
    convergents,
    g_matrix_alt,
    moebius,
    signed_cf_from_unsigned_digits,
)
from .coding import CodingPoint, ShiftWord, encode
from .cosets import CosetTable, SubgroupSpec, enumerate_cosets, member
from .symbols import (
    CuspSymbolTerm,
    HomPoly,
    HomologyVector,
    ManinSum,
    SymbolSpace,
    build_symbol_space,
    cusp_to_manin,
    act_poly,
    nm_to_poly,
)


@dataclass
class LMSRequest:
    spec: SubgroupSpec
    w: int
    N: tuple = ()
    M: tuple = ()
    point: CodingPoint | None = None
    n_max: int = 100

    def __post_init__(self):
        if not self.N and not self.M:
            # default coefficient X^w
            self.N = (1,) * self.w
            self.M = (0,) * self.w
        self.N = tuple(int(v) for v in self.N)
        self.M = tuple(int(v) for v in self.M)
        if len(self.N) != self.w or len(self.M) != self.w:
            raise ValueError(f"N and M must have length w = {self.w}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.point is None:
            raise ValueError("a coding point is required")

    @property
    def poly(self) -> HomPoly:
        return nm_to_poly(self.N, self.M)


class LMSComputation:
    """Exact running sums S_n = sum_{k<=n} {e_k(inf), e_k(0), g~_{k-1}^{-1} P}
    for one request; everything is cached so rows can be produced in order."""

    def __init__(self, req: LMSRequest, table: CosetTable | None = None, space: SymbolSpace | None = None):
        self.req = req
        self.table = table or enumerate_cosets(req.spec)
        self.space = space or build_symbol_space(self.table, req.w)
        self.P = req.poly
        self.word = encode(req.point, self.table, req.n_max)
        self.abs_cf = req.point.signed_cf.abs_expansion()
        self._q = [q for _, q in convergents(self.abs_cf, req.n_max)]
        self._frames: list[Mat2] = [self.table.reps[self.word[0].e]]  # r_{e1} bar_g(k)
        self._sums: list[ManinSum] = [ManinSum(req.w)]
        self._terms: list[ManinSum] = [ManinSum(req.w)]

    def q(self, n: int) -> int:
        return self._q[n]

    def frame(self, k: int) -> Mat2:
        """r_{e1} bar_g(k)."""
        while len(self._frames) <= k:
            j = len(self._frames)
            self._frames.append(self._frames[-1] @ ST_pow(self.word[j - 1].x))
        return self._frames[k]

    def tilde_g(self, k: int) -> Mat2:
        """g~_{k-1} = r_{e1} bar_g(k-1) r_{e_k}^{-1}."""
        if not 1 <= k <= len(self.word):
            raise ValueError(f"k must lie in 1..{len(self.word)}")
        return self.frame(k - 1) @ self.table.reps[self.word[k - 1].e].inv()

    def term(self, k: int) -> ManinSum:
        while len(self._terms) <= k:
            j = len(self._terms)
            r = self.table.reps[self.word[j - 1].e]
            coeff = act_poly(self.tilde_g(j).inv(), self.P)
            t = CuspSymbolTerm(moebius(r, INF), moebius(r, Fraction(0)), coeff)
            self._terms.append(cusp_to_manin(t, self.table))
        return self._terms[k]

    def exact_sum(self, n: int) -> ManinSum:
        if n > self.req.n_max:
            raise ValueError(f"n = {n} exceeds n_max = {self.req.n_max}")
        while len(self._sums) <= n:
            j = len(self._sums)
            s = ManinSum(self.req.w, self._sums[-1])
            s.add_sum(self.term(j))
            self._sums.append(s)
        return self._sums[n]

    def telescoped_term(self, n: int) -> CuspSymbolTerm:
        """{e1(inf), e1 bar_g(n)(inf), P}: the cusp path S_n equals in homology."""
        g = self.frame(n)
        return CuspSymbolTerm(moebius(self.frame(0), INF), moebius(g, INF), self.P)

    def exact_vector(self, n: int) -> HomologyVector:
        return self.space.reduce(self.exact_sum(n))

    def lambda_n(self, n: int) -> float | None:
        q = self.q(n)
        return 2 * math.log(q) / n if q > 1 else None

    def scaled(self, n: int) -> list[float] | None:
        q = self.q(n)
        if q <= 1:
            return None
        t = 2 * math.log(q)
        return [float(c) / t for c in self.exact_vector(n).coords]

    def rows(self, ns: Sequence[int] | None = None) -> list[dict]:
        ns = range(1, self.req.n_max + 1) if ns is None else ns
        out = []
        prev = None
        for n in ns:
            L = self.scaled(n)
            row = {
                "n": n,
                "q_n": self.q(n),
                "lambda_n": self.lambda_n(n),
                "L_n": L,
                "delta_n": None,
                "flagged": L is None,
            }
            if L is not None and prev is not None:
                row["delta_n"] = max(abs(a - b) for a, b in zip(L, prev)) if L else 0.0
            if L is not None:
                prev = L
            out.append(row)
        return out


def tilde_g(k: int, req: LMSRequest) -> Mat2:
    comp = LMSComputation(req)
    g = comp.tilde_g(k)
    if not member(req.spec, g):
        raise AssertionError("tilde_g left the group")
    return g


def lms_partial(req: LMSRequest, n: int) -> tuple[HomologyVector | None, dict]:
    """(L_n as float coordinates, report row).  L_n is None when q_n = 1."""
    comp = LMSComputation(req)
    L = comp.scaled(n)
    row = comp.rows([n])[0]
    return (HomologyVector(tuple(L)) if L is not None else None), row


@dataclass
class ConvergenceReport:
    rows: list[dict]
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "rows": [_row_json(r) for r in self.rows],
        }

    def to_csv(self) -> str:
        dim = max((len(r["L_n"]) for r in self.rows if r["L_n"] is not None), default=0)
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "q_n", "lambda_n"] + [f"L_{i}" for i in range(dim)] + ["delta_n"])
        for r in self.rows:
            L = r["L_n"] or [None] * dim
            wr.writerow([r["n"], r["q_n"], _fmt(r["lambda_n"])] + [_fmt(v) for v in L] + [_fmt(r["delta_n"])])
        return buf.getvalue()


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def _row_json(r: dict) -> dict:
    out = dict(r)
    out["q_n"] = str(r["q_n"])
    return out


def lms_report(req: LMSRequest, config: dict | None = None) -> ConvergenceReport:
    return ConvergenceReport(LMSComputation(req).rows(), config or {})


# ---------------------------------------------------------------------------
# quadratic points


@dataclass
class PeriodicClosedForm:
    period: int
    start: int
    per_period_class: HomologyVector
    period_matrix: Mat2
    spectral_radius: float
    lam: float
    limit: list[float]

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "start": self.start,
            "per_period_class": self.per_period_class.to_json(),
            "period_matrix": self.period_matrix.tolist(),
            "trace": self.period_matrix.a + self.period_matrix.d,
            "spectral_radius": self.spectral_radius,
            "lambda": self.lam,
            "limit": self.limit,
        }


def _spectral_radius(g: Mat2) -> float:
    t = abs(g.a + g.d)
    det = g.det()
    disc = t * t - 4 * det
    if disc <= 0:
        raise ValueError("period matrix is not hyperbolic")
    return (t + math.sqrt(disc)) / 2


def lms_periodic(req: LMSRequest, max_letters: int = 20000) -> PeriodicClosedForm:
    """Closed form at a quadratic point: detect the least period of the
    (digit phase, coset, transported coefficient) sequence, sum one period
    exactly and divide by 2 log of the spectral radius of the period matrix."""
    pt = req.point
    if not pt.is_quadratic:
        raise ValueError("lms_periodic needs a quadratic irrational point")
    cf = pt.signed_cf
    pre, L = len(cf.preperiod), len(cf.period)
    table = enumerate_cosets(req.spec)
    P = req.poly

    def phase(k: int):
        return ("pre", k) if k <= pre else (k - pre - 1) % L

    seen: dict = {}
    e = pt.e1
    frame = table.reps[e]
    found = None
    for k in range(1, max_letters + 1):
        g_tilde = frame @ table.reps[e].inv()
        coeff = act_poly(g_tilde.inv(), P)
        key = (phase(k), e, coeff.coeffs)
        if key in seen:
            found = (seen[key], k)
            break
        seen[key] = k
        x = cf.digit(k)
        frame = frame @ ST_pow(x)
        e = table.tau_index(x, e)
    if found is None:
        raise ValueError(
            f"letter/coefficient sequence shows no period within {max_letters} letters"
        )
    k0, k1 = found
    p = k1 - k0
    sub = LMSRequest(req.spec, req.w, req.N, req.M, pt, k1)
    comp = LMSComputation(sub, table)
    per = ManinSum(req.w)
    for k in range(k0, k1):
        per.add_sum(comp.term(k))
    C = comp.space.reduce(per)
    pm = IDENTITY
    for k in range(k0, k1):
        pm = pm @ ST_pow(cf.digit(k))
    rad = _spectral_radius(pm)
    lam = 2 * math.log(rad) / p
    limit = [float(c) / (p * lam) for c in C.coords]
    return PeriodicClosedForm(p, k0, C, pm, rad, lam, limit)


# ---------------------------------------------------------------------------
# Lyapunov exponents


def _unsigned_cf(x) -> CFExpansion:
    if isinstance(x, CodingPoint):
        return x.signed_cf.abs_expansion()
    if isinstance(x, QuadIrr):
        return cf_of_quadratic(abs(x))
    if isinstance(x, CFExpansion):
        return x.abs_expansion() if x.sign_mode == SIGNED else x
    return cf_of_rational(abs(Fraction(x)))


def lyapunov_estimate(x, n: int) -> float:
    """(2/n) log q_n(|x|) with q_n exact."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = convergents(_unsigned_cf(x), n)[n][1]
    return 2 * math.log(q) / n


def exact_lyapunov(x: QuadIrr) -> float:
    """2 log(spectral radius)/period for the periodic part of |x|."""
    cf = cf_of_quadratic(abs(x))
    per = list(cf.period)
    m = IDENTITY
    for a in per:
        m = m @ Mat2(a, 1, 1, 0)
    return 2 * math.log(_spectral_radius(m)) / len(per)


def random_dyadic(rng: random.Random, bits: int) -> Fraction:
    """Uniform dyadic rational in (0, 1) with the given number of bits."""
    while True:
        v = rng.getrandbits(bits)
        if v:
            return Fraction(v, 1 << bits)


def dyadic_bits_for_depth(n: int) -> int:
    # about 0.58 digits per bit on average; leave a wide margin
    return max(64, 4 * n + 64)


def random_unsigned_cf(rng: random.Random, n: int) -> CFExpansion:
    """CF of a uniform dyadic point with at least n + 1 digits; extra random
    bits are appended until the expansion is long enough."""
    bits = dyadic_bits_for_depth(n)
    v = random_dyadic(rng, bits)
    while True:
        cf = cf_of_rational(v)
        if cf.length() > n:
            return cf
        extra = 64
        v = v + Fraction(rng.getrandbits(extra), 1 << (bits + extra))
        bits += extra


def random_coding_point(rng: random.Random, n: int, e1: int = 0) -> CodingPoint:
    sign = 1 if rng.getrandbits(1) else -1
    cf = random_unsigned_cf(rng, n)
    ds = cf.digits(cf.length())[1:]
    return CodingPoint(CFExpansion("finite", digits=list(signed_cf_from_unsigned_digits(sign, ds)), sign_mode=SIGNED), e1)


def levy_samples(seed: int, count: int, n: int) -> list[float]:
    rng = random.Random(seed)
    return [lyapunov_estimate(random_unsigned_cf(rng, n), n) for _ in range(count)]


LEVY_CONSTANT = math.pi ** 2 / (6 * math.log(2))


# ---------------------------------------------------------------------------
# weight-zero Birkhoff average


def birkhoff_sum(beta, t0: int, n: int, table: CosetTable) -> ManinSum:
    """sum_{k=1}^n phi(T^k(beta, t0)) with phi(T^k) = {r g_k(0), r g_k(inf)},
    g_k = (p_{k-1} p_k; q_{k-1} q_k)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cf = _unsigned_cf(beta)
    r = table.reps[t0]
    out = ManinSum(0)
    one = HomPoly((1,))
    for k in range(1, n + 1):
        g = r @ g_matrix_alt(cf, k)
        cusp_to_manin(CuspSymbolTerm(moebius(g, Fraction(0)), moebius(g, INF), one), table, out)
    return out


def birkhoff_weight2(beta, t0: int, n: int, c: float, table: CosetTable) -> HomologyVector:
    if c <= 0:
        raise ValueError("c must be positive")
    space = build_symbol_space(table, 0)
    v = space.reduce(birkhoff_sum(beta, t0, n, table))
    return HomologyVector(tuple(float(x) / (c * n) for x in v.coords))


def birkhoff_report(beta, t0: int, n: int, table: CosetTable, c: float | None = None) -> dict:
    """Birkhoff average normalized by n * lambda_n and, when c is given, by
    c * n.  Convergence is not asserted."""
    space = build_symbol_space(table, 0)
    v = space.reduce(birkhoff_sum(beta, t0, n, table))
    lam = lyapunov_estimate(beta, n)
    out = {"n": n, "lambda_n": lam, "by_lambda_n": [float(x) / (lam * n) for x in v.coords], "by_c": None}
    if c is not None:
        out["by_c"] = birkhoff_weight2(beta, t0, n, c, table).to_float()
    return out
