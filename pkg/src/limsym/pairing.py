"""Pairing of modular symbols with cusp forms.

Symbols are paired through tail integrals  int_{u0}^{i inf} (f|g)(u) Q(u, 1) du,
evaluated term by term from the q-expansion; arbitrary paths in the upper
half-plane are integrated by adaptive Gauss-Kronrod quadrature."""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .arith import IDENTITY, Mat2, S, convergents, cusp_pair, moebius, signed_convergent, sl2_with_first_column
from .cosets import CosetTable, SubgroupSpec
from .forms import QExpansion, _is_prime, eval_form, eval_slashed
from .symbols import (
    U,
    CuspSymbolTerm,
    HomPoly,
    HomologyVector,
    ManinSum,
    SymbolSpace,
    act_poly,
    cusp_to_manin,
)

DEFAULT_TOL_PATH = 1e-6
DEFAULT_TOL_PERIOD = 1e-9
DEFAULT_TOL_IDENTITY = 1e-8


# ---------------------------------------------------------------------------
# tail integrals


def _slash_type(f: QExpansion, g: Mat2):
    """(constant, shift j, width) with (f|g)(u) = constant * f((u + j)/width)."""
    N = f.level
    if N == 1 or g.c % N == 0:
        return 1, 0, 1
    if f.fricke is None or not _is_prime(N):
        raise ValueError(f"cannot pair: form of level {N} has no transport to this coset")
    j = g.d * pow(g.c, -1, N) % N
    return f.fricke * mpmath.power(N, -mpmath.mpf(f.weight) / 2), j, N


def check_compatible(f: QExpansion, spec: SubgroupSpec) -> None:
    """The form must be invariant under the group of the symbols."""
    if f.level == 1:
        return
    if spec.kind == "full" or spec.N % f.level:
        raise ValueError(f"form of level {f.level} is not modular for {spec}")


def _tail_bound(f: QExpansion, c1, y0: float, w: int, T: int) -> float:
    """Crude bound on the discarded terms n > T of a tail integral."""
    r = math.exp(-float(c1) * y0)
    total = 0.0
    n = T + 1
    while True:
        c = float(c1) * n
        term = 2 * n ** (f.weight / 2) * r ** n * (w + 1) * math.factorial(w) * max(1.0, 1 / c) ** (w + 1) * (1 + y0) ** w
        total += term
        if term <= 1e-30 * total or term == 0.0 or n > T + 10000:
            return total
        n += 1


def tail_integral(f: QExpansion, g: Mat2, Q: HomPoly, u0, with_error: bool = False):
    """int_{u0}^{i inf} (f|g)(u) Q(u, 1) du along the vertical ray."""
    C, j, width = _slash_type(f, g)
    u0 = mpmath.mpc(u0)
    w = Q.weight
    c1 = 2 * mp.pi / width
    y0 = float(u0.imag)
    # terms with n beyond the truncation or negligible at this height
    eps = 10.0 ** -min(mp.dps, 40)
    r = math.exp(-float(c1) * y0)
    T = f.T
    for n in range(1, f.T + 1):
        if 2 * n ** (f.weight / 2 + w) * r ** n < eps * 1e-6:
            T = n
            break
    qs = [mpmath.mpf(q) for q in Q.coeffs]
    nz = [m for m in range(w + 1) if Q.coeffs[m]]
    upow = [mpmath.mpc(1)]
    for _ in range(w):
        upow.append(upow[-1] * u0)
    ipow = [mpmath.mpc(1), mpmath.mpc(0, 1), mpmath.mpc(-1), mpmath.mpc(0, -1)]
    fact = [math.factorial(l) for l in range(w + 1)]
    total = mpmath.mpc(0)
    e1 = mpmath.expj(c1 * (u0 + j))
    en = mpmath.mpc(1)
    for n in range(1, T + 1):
        en *= e1
        a = f.coeffs[n - 1]
        if not a:
            continue
        c = c1 * n
        inv = [1 / c]
        for _ in range(w):
            inv.append(inv[-1] / c)
        s = mpmath.mpc(0)
        for m in nz:
            inner = mpmath.mpc(0)
            for l in range(m + 1):
                inner += comb(m, l) * upow[m - l] * ipow[(l + 1) % 4] * fact[l] * inv[l]
            s += qs[m] * inner
        total += a * en * s
    val = C * total
    if with_error:
        err = eps if T < f.T else _tail_bound(f, c1, y0, w, T) * float(abs(C)) * max(1.0, float(max(abs(x) for x in qs)))
        return val, err
    return val


def _mpq(c):
    c = Fraction(c)
    return mpmath.mpf(c.numerator) / c.denominator


def manin_value(f: QExpansion, r: Mat2, Q: HomPoly):
    """<r{0, inf, r.Q}, f> = I(f|r, Q) - I(f|rS, S^{-1}.Q) with I based at i."""
    i = mpmath.mpc(0, 1)
    return tail_integral(f, r, Q, i) - tail_integral(f, r @ S, act_poly(S.inv(), Q), i)


class FormPairing:
    """Pairings of all Manin generators of a symbol space with one form."""

    def __init__(self, f: QExpansion, space: SymbolSpace):
        if f.weight != space.w + 2:
            raise ValueError(f"form weight {f.weight} does not match symbol weight {space.w}")
        check_compatible(f, space.table.spec)
        self.f = f
        self.space = space
        w = space.w
        self.gen_values = []
        for e, r in enumerate(space.table.reps):
            for jj in range(w + 1):
                self.gen_values.append(manin_value(f, r, HomPoly.monomial(w, jj)))

    def pair_sum(self, s: ManinSum):
        total = mpmath.mpc(0)
        for gid in sorted(s):
            total += _mpq(s[gid]) * self.gen_values[gid]
        return total

    def pair_vector(self, v: HomologyVector):
        total = mpmath.mpc(0)
        for c, gid in zip(v.coords, self.space.free):
            if c:
                total += _mpq(c) * self.gen_values[gid]
        return total

    def pair_relation(self, rel: dict):
        return self.pair_sum(ManinSum(self.space.w, rel))


def pair_manin(s: ManinSum, f: QExpansion, space: SymbolSpace):
    return FormPairing(f, space).pair_sum(s)


def pair_symbol(terms: Sequence[CuspSymbolTerm], f: QExpansion, space: SymbolSpace) -> tuple:
    """(holomorphic, antiholomorphic) pairing of a sum of cusp symbols."""
    if not terms:
        return mpmath.mpc(0), mpmath.mpc(0)
    s = ManinSum(space.w)
    for t in terms:
        cusp_to_manin(t, space.table, s)
    h = FormPairing(f, space).pair_sum(s)
    return h, mpmath.conj(h)


# ---------------------------------------------------------------------------
# period polynomial


@dataclass
class PeriodTable:
    weight: int
    r: list
    errors: list

    def to_json(self) -> dict:
        return {
            "w": self.weight,
            "r": [[float(v.real), float(v.imag)] for v in self.r],
            "errors": [float(e) for e in self.errors],
        }


def period_integrals(f: QExpansion, w: int | None = None, tol: float = DEFAULT_TOL_PERIOD) -> PeriodTable:
    """r_j = int_0^{i inf} f(z) z^j dz for j = 0..w, split at i."""
    w = f.weight - 2 if w is None else w
    if w != f.weight - 2:
        raise ValueError("w must equal k - 2")
    i = mpmath.mpc(0, 1)
    rs, errs = [], []
    for j in range(w + 1):
        Q = HomPoly.monomial(w, j)
        a, ea = tail_integral(f, IDENTITY, Q, i, with_error=True)
        b, eb = tail_integral(f, S, act_poly(S.inv(), Q), i, with_error=True)
        rs.append(a - b)
        errs.append(ea + eb)
    if max(errs) > tol:
        raise ValueError(f"truncation T = {f.T} insufficient for tolerance {tol}")
    return PeriodTable(w, rs, errs)


def period_polynomial(pt: PeriodTable) -> list:
    """Coefficients (in X^0..X^w) of int_0^{i inf} f(z) (X - z)^w dz."""
    w = pt.weight
    out = [mpmath.mpc(0)] * (w + 1)
    for j in range(w + 1):
        out[w - j] += comb(w, j) * (-1) ** j * pt.r[j]
    return out


def poly_slash(coeffs: list, g: Mat2) -> list:
    """(rho|g)(X) = (cX + d)^w rho(gX) on coefficient lists."""
    w = len(coeffs) - 1
    out = [mpmath.mpc(0)] * (w + 1)
    for m, cm in enumerate(coeffs):
        # (aX + b)^m (cX + d)^(w - m)
        A = [comb(m, s) * g.a ** s * g.b ** (m - s) for s in range(m + 1)]
        B = [comb(w - m, s) * g.c ** s * g.d ** (w - m - s) for s in range(w - m + 1)]
        for s, av in enumerate(A):
            if av:
                for t, bv in enumerate(B):
                    if bv:
                        out[s + t] += cm * av * bv
    return out


def cocycle_residuals(f: QExpansion) -> dict:
    rho = period_polynomial(period_integrals(f))
    two = [a + b for a, b in zip(rho, poly_slash(rho, S))]
    three = [a + b + c for a, b, c in zip(rho, poly_slash(rho, U), poly_slash(rho, U @ U))]
    scale = max(1.0, max(float(abs(c)) for c in rho))
    return {
        "two_term": max(float(abs(v)) for v in two) / scale,
        "three_term": max(float(abs(v)) for v in three) / scale,
        "scale": scale,
    }


# ---------------------------------------------------------------------------
# adaptive quadrature

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = (
    "0.991455371120812639206854697526329",
    "0.949107912342758524526189684047851",
    "0.864864423359769072789712788640926",
    "0.741531185599394439863864773280788",
    "0.586087235467691130294144845693013",
    "0.405845151377397166906606412076961",
    "0.207784955007898467600689403773245",
    "0",
)
_WGK = (
    "0.022935322010529224963732008058970",
    "0.063092092629978553290700663189204",
    "0.104790010322250183839876322541518",
    "0.140653259715525918745189590510238",
    "0.169004726639267902826583426598550",
    "0.190350578064785409913256402421014",
    "0.204432940075298892414161999234649",
    "0.209482141084727828012999174891714",
)
_WG = (
    "0.129484966168869693270611432679082",
    "0.279705391489276667901467771423780",
    "0.381830050505118944950369775488975",
    "0.417959183673469387755102040816327",
)


def _gk15(fn: Callable, a, b):
    xgk = [mpmath.mpf(x) for x in _XGK]
    wgk = [mpmath.mpf(x) for x in _WGK]
    wg = [mpmath.mpf(x) for x in _WG]
    c = (a + b) / 2
    h = (b - a) / 2
    fc = fn(c)
    k = fc * wgk[7]
    g = fc * wg[3]
    for i in range(7):
        d = h * xgk[i]
        f1, f2 = fn(c - d), fn(c + d)
        k += wgk[i] * (f1 + f2)
        if i % 2 == 1:
            g += wg[i // 2] * (f1 + f2)
    return k * h, abs((k - g) * h)


@dataclass
class QuadResult:
    value: object
    error: float
    intervals: int
    converged: bool


def adaptive_quad(fn: Callable, a, b, tol: float, max_intervals: int = 20000, initial: int = 1) -> QuadResult:
    """Globally adaptive Gauss-Kronrod quadrature.  The interval with the
    largest error estimate is bisected (ties by creation order) until the
    total estimate is below tol * (1 + |value|)."""
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    heap = []
    counter = 0
    pieces = {}
    step = (b - a) / initial
    for i in range(initial):
        lo, hi = a + i * step, a + (i + 1) * step
        v, e = _gk15(fn, lo, hi)
        pieces[counter] = (lo, hi, v, e)
        heapq.heappush(heap, (-float(e), counter))
        counter += 1
    while True:
        keys = sorted(pieces, key=lambda k: pieces[k][0])
        total = mpmath.fsum(pieces[k][2] for k in keys)
        err = math.fsum(float(pieces[k][3]) for k in keys)
        if err <= tol * (1 + float(abs(total))):
            return QuadResult(total, err, len(pieces), True)
        if len(pieces) >= max_intervals:
            return QuadResult(total, err, len(pieces), False)
        _, key = heapq.heappop(heap)
        lo, hi, _, _ = pieces.pop(key)
        mid = (lo + hi) / 2
        for l, r in ((lo, mid), (mid, hi)):
            v, e = _gk15(fn, l, r)
            pieces[counter] = (l, r, v, e)
            heapq.heappush(heap, (-float(e), counter))
            counter += 1


@dataclass
class PathSpec:
    z0: complex
    z1: complex
    via: tuple = ()

    def points(self) -> list:
        return [mpmath.mpc(self.z0)] + [mpmath.mpc(v) for v in self.via] + [mpmath.mpc(self.z1)]


def _poly_at(Q: HomPoly, u):
    acc = mpmath.mpc(0)
    for c in reversed(Q.coeffs):
        acc = acc * u + c
    return acc


def pair_path(
    f: QExpansion,
    path: PathSpec,
    P: HomPoly,
    tol: float = DEFAULT_TOL_PATH,
    frame: Mat2 = IDENTITY,
) -> mpmath.mpc:
    """int f(z) P(z, 1) dz along frame(path), a polyline in the upper
    half-plane.  Vertical pieces are parametrised by log Im u."""
    if f.weight != P.weight + 2:
        raise ValueError("form weight must be w + 2")
    pts = path.points()
    for p in pts:
        if p.imag <= 0:
            raise ValueError("path must stay in the upper half-plane")
    Q = act_poly(frame.inv(), P) if frame != IDENTITY else P

    def h(u):
        if frame == IDENTITY:
            return eval_form(f, u) * _poly_at(Q, u)
        return eval_slashed(f, frame, u) * _poly_at(Q, u)

    total = mpmath.mpc(0)
    for z0, z1 in zip(pts, pts[1:]):
        if z0 == z1:
            continue
        if abs(z0.real - z1.real) <= mpmath.mpf(10) ** (-mp.dps + 5) * (1 + abs(z0.real)):
            x = z0.real
            s0, s1 = mpmath.log(z0.imag), mpmath.log(z1.imag)

            def g(s, x=x):
                y = mpmath.exp(s)
                return h(mpmath.mpc(x, y)) * mpmath.mpc(0, y)

            n0 = max(1, int(abs(float(s1 - s0))))
            res = adaptive_quad(g, s0, s1, tol, initial=n0)
        else:
            d = z1 - z0

            def g(t, z0=z0, d=d):
                return h(z0 + t * d) * d

            res = adaptive_quad(g, 0, 1, tol)
        if not res.converged:
            raise RuntimeError(f"quadrature did not converge (error estimate {res.error:.3g})")
        total += res.value
    return total


def pair_point_to_cusp(f: QExpansion, z, cusp, P: HomPoly):
    """int_z^{cusp} f(w) P(w, 1) dw, transporting the cusp to infinity."""
    p, q = cusp_pair(cusp)
    g = sl2_with_first_column(p, q)  # g(inf) = cusp
    u = moebius(g.inv(), mpmath.mpc(z))
    return tail_integral(f, g, act_poly(g.inv(), P), u)


# ---------------------------------------------------------------------------
# nondegeneracy


def pairing_matrix(f: QExpansion, space: SymbolSpace) -> np.ndarray:
    """Rows: real and imaginary parts of the pairing against each cuspidal
    basis vector."""
    fp = FormPairing(f, space)
    vals = [fp.pair_vector(HomologyVector(tuple(b))) for b in space.cuspidal_basis]
    return np.array([[float(v.real) for v in vals], [float(v.imag) for v in vals]])


def numerical_rank(m: np.ndarray, rtol: float = 1e-8) -> int:
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int((sv > rtol * sv[0]).sum())


# ---------------------------------------------------------------------------
# theorem check


def working_dps(q: int, base: int = 25) -> int:
    """Enough digits to resolve a point at height q^{-2} above the real axis."""
    return base + 2 * len(str(q)) + 5


def theorem_check(req, f: QExpansion, n_list: Sequence[int] = (20, 40, 80), tol_path: float = DEFAULT_TOL_PATH, threads: int = 1) -> dict:
    """Compare (1/t_n) <{i, e1(x + i q_n^{-2}), P}, f> with the pairing of the
    exact partial sum divided by t_n = 2 log q_n."""
    from .limiting import LMSComputation, LMSRequest

    n_list = sorted(set(int(n) for n in n_list))
    sub = LMSRequest(req.spec, req.w, req.N, req.M, req.point, max(n_list))
    comp = LMSComputation(sub)
    check_compatible(f, req.spec)
    P = sub.poly
    e1 = comp.table.reps[req.point.e1]
    qmax = comp.q(max(n_list))
    dps = working_dps(qmax)

    with mp.workdps(dps):
        fp = FormPairing(f, comp.space)
        xval = _point_value(req.point, qmax)

        def one(n: int) -> dict:
            q = comp.q(n)
            if q <= 1:
                return {"n": n, "q_n": str(q), "flagged": True}
            t = 2 * mpmath.log(q)
            y = mpmath.mpf(1) / (mpmath.mpf(q) ** 2)
            path = PathSpec(mpmath.mpc(0, 1), mpmath.mpc(xval, y), (mpmath.mpc(xval, 1),))
            lhs = pair_path(f, path, P, tol_path, frame=e1) if e1 != IDENTITY else pair_path(f, path, P, tol_path)
            if e1 != IDENTITY:
                # frame(path) starts at e1(i); add the piece i -> e1(i)
                lhs += pair_path(f, PathSpec(mpmath.mpc(0, 1), moebius(e1, mpmath.mpc(0, 1))), P, tol_path)
            rhs = fp.pair_vector(comp.exact_vector(n))
            L, R = lhs / t, rhs / t
            gap = abs(L - R)
            return {
                "n": n,
                "q_n": str(q),
                "t_n": float(t),
                "lhs": [float(L.real), float(L.imag)],
                "rhs": [float(R.real), float(R.imag)],
                "abs_gap": float(gap),
                "rel_gap": float(gap / abs(R)) if abs(R) else None,
                "flagged": False,
            }

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                rows = list(ex.map(one, n_list))
        else:
            rows = [one(n) for n in n_list]

    gaps = [r["rel_gap"] for r in rows if not r["flagged"] and r["rel_gap"] is not None]
    return {
        "rows": rows,
        "dps": dps,
        "final_rel_gap": gaps[-1] if gaps else None,
        "strictly_decreasing": all(a > b for a, b in zip(gaps, gaps[1:])) if len(gaps) >= 2 else None,
        "t_convention": "t_n = 2 log q_n, endpoint height q_n^-2",
    }


def _point_value(point, qmax: int):
    """The point x as an mp number accurate well beyond q_max^-2."""
    if point.is_quadratic:
        x = point.x
        return (x.p + mpmath.sqrt(x.d)) / x.q
    cf = point.signed_cf
    target = qmax * qmax * 10 ** 10
    n = 1
    length = cf.length()
    while True:
        if length is not None and n >= length:
            n = length
            break
        if convergents(cf, n)[n][1] > target:
            break
        n *= 2
    return _mpq(signed_convergent(cf, n))
