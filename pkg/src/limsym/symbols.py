"""Higher-weight modular symbols as Manin symbols with homogeneous polynomial
coefficients.

A Manin symbol ``(e, Q)`` stands for ``r_e (Q {0, inf})``, the image of the
path from 0 to infinity with coefficient Q under the coset representative
r_e.  GL2 acts on polynomials by ``(g.P)(X, Y) = P(dX - bY, -cX + aY)``, which
on a linear form ``nX + mY`` is ``(n, m) -> (dn - cm, -bn + am)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .arith import (
    INF,
    Cusp,
    Mat2,
    S,
    as_cusp,
    cf_of_rational,
    convergents,
    cusp_from_pair,
    cusp_pair,
    cusp_str,
    moebius,
    sl2_with_first_column,
    unimodular_between,
)
from .cosets import CosetTable
from .linalg import Echelon, nullspace

U = Mat2(0, -1, 1, 1)  # S*T, order 3 in PSL2(Z)


@dataclass(frozen=True, slots=True)
class HomPoly:
    """P(X, Y) = sum_j coeffs[j] X^j Y^(w - j)."""

    coeffs: tuple

    @property
    def weight(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, w: int) -> "HomPoly":
        return cls((0,) * (w + 1))

    @classmethod
    def monomial(cls, w: int, j: int) -> "HomPoly":
        c = [0] * (w + 1)
        c[j] = 1
        return cls(tuple(c))

    def __add__(self, o: "HomPoly") -> "HomPoly":
        _check_weight(self, o)
        return HomPoly(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o: "HomPoly") -> "HomPoly":
        _check_weight(self, o)
        return HomPoly(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self) -> "HomPoly":
        return HomPoly(tuple(-a for a in self.coeffs))

    def scale(self, s) -> "HomPoly":
        return HomPoly(tuple(s * a for a in self.coeffs))

    def __mul__(self, o: "HomPoly") -> "HomPoly":
        out = [0] * (self.weight + o.weight + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return HomPoly(tuple(out))

    def __call__(self, x, y=1):
        """Evaluate at (X, Y) = (x, y); exact for ints and Fractions."""
        w = self.weight
        ys = [1]
        for _ in range(w):
            ys.append(ys[-1] * y)
        total = 0
        xp = 1
        for j in range(w + 1):
            if self.coeffs[j]:
                total += self.coeffs[j] * xp * ys[w - j]
            xp = xp * x
        return total

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> list[str]:
        return [_q(c) for c in self.coeffs]


def _check_weight(a: HomPoly, b: HomPoly) -> None:
    if a.weight != b.weight:
        raise ValueError(f"weight mismatch {a.weight} != {b.weight}")


def _q(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_q(s: str) -> Fraction:
    return Fraction(s)


def _linear_power(u: int, v: int, n: int) -> list[int]:
    """Coefficients of (uX + vY)^n in the X^j Y^(n-j) basis."""
    out = [0] * (n + 1)
    up = [1] * (n + 1)
    vp = [1] * (n + 1)
    for i in range(1, n + 1):
        up[i] = up[i - 1] * u
        vp[i] = vp[i - 1] * v
    for j in range(n + 1):
        out[j] = comb(n, j) * up[j] * vp[n - j]
    return out


def nm_to_poly(N: Sequence[int], M: Sequence[int]) -> HomPoly:
    """prod_j (N_j X + M_j Y)."""
    if len(N) != len(M):
        raise ValueError("N and M must have equal length")
    p = HomPoly((1,))
    for n, m in zip(N, M):
        p = p * HomPoly((m, n))
    return p


def act_poly(g: Mat2, P: HomPoly) -> HomPoly:
    """(g.P)(X, Y) = P(dX - bY, -cX + aY)."""
    w = P.weight
    if g.a == 1 and g.b == 0 and g.c == 0 and g.d == 1:
        return P
    # X -> dX - bY ; Y -> -cX + aY
    xs = [None] * (w + 1)
    ys = [None] * (w + 1)
    out = [0] * (w + 1)
    for j, cj in enumerate(P.coeffs):
        if not cj:
            continue
        if xs[j] is None:
            xs[j] = _linear_power(g.d, -g.b, j)
        if ys[w - j] is None:
            ys[w - j] = _linear_power(-g.c, g.a, w - j)
        A, B = xs[j], ys[w - j]
        for s, av in enumerate(A):
            if av:
                t = cj * av
                for r, bv in enumerate(B):
                    if bv:
                        out[s + r] += t * bv
    return HomPoly(tuple(out))


# ---------------------------------------------------------------------------
# cusp symbols


@dataclass(frozen=True)
class CuspSymbolTerm:
    """scalar * {alpha, beta, P}."""

    alpha: Cusp
    beta: Cusp
    P: HomPoly
    scalar: Fraction = Fraction(1)

    @classmethod
    def make(cls, alpha, beta, P: HomPoly, scalar=1) -> "CuspSymbolTerm":
        return cls(as_cusp(alpha), as_cusp(beta), P, Fraction(scalar))

    def to_json(self) -> dict:
        return {
            "alpha": cusp_str(self.alpha),
            "beta": cusp_str(self.beta),
            "P": self.P.to_json(),
            "scalar": _q(self.scalar),
        }


def g_transform(t: CuspSymbolTerm, g: Mat2) -> CuspSymbolTerm:
    """g | {alpha, beta, P} = {g alpha, g beta, g.P}."""
    if g.det() <= 0:
        raise ValueError("g must have positive determinant")
    return CuspSymbolTerm(moebius(g, t.alpha), moebius(g, t.beta), act_poly(g, t.P), t.scalar)


# ---------------------------------------------------------------------------
# Manin symbol sums: generator id = e * (w + 1) + j  <->  (e, X^j Y^(w-j))


class ManinSum(dict):
    """Formal sum of Manin symbols, stored as {generator id: coefficient}."""

    def __init__(self, w: int, *args):
        super().__init__(*args)
        self.w = w

    def add_symbol(self, e: int, P: HomPoly, scalar=1) -> None:
        if P.weight != self.w:
            raise ValueError(f"weight mismatch {P.weight} != {self.w}")
        base = e * (self.w + 1)
        for j, c in enumerate(P.coeffs):
            if c:
                gid = base + j
                v = self.get(gid, 0) + scalar * c
                if v:
                    self[gid] = v
                else:
                    self.pop(gid, None)

    def add_sum(self, o: "ManinSum", scalar=1) -> None:
        for gid, c in o.items():
            v = self.get(gid, 0) + scalar * c
            if v:
                self[gid] = v
            else:
                self.pop(gid, None)

    def symbols(self) -> list[tuple[int, HomPoly]]:
        by_e: dict[int, list] = {}
        for gid, c in self.items():
            e, j = divmod(gid, self.w + 1)
            by_e.setdefault(e, [0] * (self.w + 1))[j] = c
        return [(e, HomPoly(tuple(cs))) for e, cs in sorted(by_e.items())]

    def to_json(self) -> list[dict]:
        return [{"e": e, "P": P.to_json()} for e, P in self.symbols()]


def cusp_chain(beta: Cusp) -> list[Cusp]:
    """Convergents inf = c_{-1}, c_0, ..., c_n = beta; consecutive entries are
    Farey neighbours."""
    if beta is INF:
        return [INF]
    cf = cf_of_rational(beta)
    n = cf.length() - 1
    return [INF] + [cusp_from_pair(p, q) for p, q in convergents(cf, n)]


def unimodular_to_manin(table: CosetTable, g: Mat2, P: HomPoly, out: ManinSum, scalar=1) -> None:
    """Add scalar * {g(0), g(inf), P} = scalar * (coset(g), g^{-1}.P)."""
    out.add_symbol(table.coset_of(g), act_poly(g.inv(), P), scalar)


def _path_to_manin(table: CosetTable, u: Cusp, v: Cusp, P: HomPoly, out: ManinSum, scalar) -> None:
    g = unimodular_between(u, v)
    if g is not None:
        unimodular_to_manin(table, g, P, out, scalar)
        return
    # {u, v} = {inf, v} - {inf, u}
    for end, sgn in ((v, 1), (u, -1)):
        chain = cusp_chain(end)
        for a, b in zip(chain, chain[1:]):
            h = unimodular_between(a, b)
            unimodular_to_manin(table, h, P, out, sgn * scalar)


def cusp_to_manin(t: CuspSymbolTerm, table: CosetTable, out: ManinSum | None = None) -> ManinSum:
    """Write scalar * {alpha, beta, P} as a sum of Manin symbols via continued
    fractions of both endpoints; coefficients are transported by g^{-1}."""
    if out is None:
        out = ManinSum(t.P.weight)
    if t.alpha == t.beta or t.P.is_zero() or not t.scalar:
        return out
    _path_to_manin(table, t.alpha, t.beta, t.P, out, t.scalar)
    return out


def cusp_class(table: CosetTable, c: Cusp, classes_of: list[int] | None = None) -> int:
    p, q = cusp_pair(c)
    g = sl2_with_first_column(p, q)
    if classes_of is None:
        classes_of = table.cusp_class_of_coset()
    return classes_of[table.coset_of(g)]


# ---------------------------------------------------------------------------
# symbol space


@dataclass(frozen=True)
class HomologyVector:
    coords: tuple

    def __add__(self, o: "HomologyVector") -> "HomologyVector":
        return HomologyVector(tuple(a + b for a, b in zip(self.coords, o.coords)))

    def __sub__(self, o: "HomologyVector") -> "HomologyVector":
        return HomologyVector(tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __neg__(self) -> "HomologyVector":
        return HomologyVector(tuple(-a for a in self.coords))

    def scale(self, s) -> "HomologyVector":
        return HomologyVector(tuple(s * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_float(self) -> list[float]:
        return [float(c) for c in self.coords]

    def to_json(self) -> list[str]:
        return [_q(c) for c in self.coords]

    @classmethod
    def from_json(cls, data: Iterable[str]) -> "HomologyVector":
        return cls(tuple(Fraction(s) for s in data))


class SymbolSpace:
    """Quotient of the free space on Manin symbols (e, X^j Y^(w-j)) by the
    two-term relations eta + eta.S and three-term relations
    eta + eta.U + eta.U^2 with U = S T, where (e, P).g = (coset(r_e g), g^{-1}.P).
    """

    def __init__(self, table: CosetTable, w: int):
        if w < 0:
            raise ValueError("weight must be >= 0")
        if w % 2:
            raise ValueError("odd w is not supported: -I acts by -1 on odd-degree coefficients in PSL2")
        self.table = table
        self.w = w
        self.ngens = table.index * (w + 1)
        self.relations = self._relations()
        ech = Echelon()
        for r in self.relations:
            ech.add(r)
        self.rank_relations = ech.rank
        red = ech.reduced()
        self.free = [g for g in range(self.ngens) if g not in red]
        self.dim = len(self.free)
        pos = {g: i for i, g in enumerate(self.free)}
        self._proj: list[dict[int, Fraction]] = []
        for gid in range(self.ngens):
            if gid in pos:
                self._proj.append({pos[gid]: Fraction(1)})
            else:
                row = red[gid]
                self._proj.append({pos[k]: -v for k, v in row.items() if k != gid})
        self.cusp_classes = table.cusp_classes()
        self._class_of = table.cusp_class_of_coset()
        self.boundary_matrix = [self._gen_boundary(g) for g in self.free]
        rows_t = [[self.boundary_matrix[i][c] for i in range(self.dim)] for c in range(len(self.cusp_classes))]
        self.cuspidal_basis = nullspace(rows_t, self.dim) if self.dim else []
        self.cuspidal_dim = len(self.cuspidal_basis)

    # -- relations --------------------------------------------------------
    def symbol_times(self, e: int, P: HomPoly, g: Mat2) -> tuple[int, HomPoly]:
        return self.table.coset_of(self.table.reps[e] @ g), act_poly(g.inv(), P)

    def _relations(self) -> list[dict[int, int]]:
        w = self.w
        rels = []
        U2 = U @ U
        for e in range(self.table.index):
            for j in range(w + 1):
                m = HomPoly.monomial(w, j)
                two = ManinSum(w)
                two.add_symbol(e, m)
                two.add_symbol(*self.symbol_times(e, m, S))
                if two:
                    rels.append(dict(two))
                three = ManinSum(w)
                three.add_symbol(e, m)
                three.add_symbol(*self.symbol_times(e, m, U))
                three.add_symbol(*self.symbol_times(e, m, U2))
                if three:
                    rels.append(dict(three))
        return rels

    # -- projection --------------------------------------------------------
    def reduce(self, s: ManinSum) -> HomologyVector:
        if s.w != self.w:
            raise ValueError(f"weight mismatch: sum has w={s.w}, space has w={self.w}")
        acc = [Fraction(0)] * self.dim
        for gid, c in s.items():
            for i, v in self._proj[gid].items():
                acc[i] += c * v
        return HomologyVector(tuple(acc))

    def reduce_term(self, t: CuspSymbolTerm) -> HomologyVector:
        return self.reduce(cusp_to_manin(t, self.table))

    def basis_symbols(self) -> list[tuple[int, HomPoly]]:
        """Manin symbol (e, monomial) behind each quotient coordinate."""
        return [(g // (self.w + 1), HomPoly.monomial(self.w, g % (self.w + 1))) for g in self.free]

    def projection_of_generator(self, gid: int) -> dict[int, Fraction]:
        return dict(self._proj[gid])

    # -- boundary ----------------------------------------------------------
    def _gen_boundary(self, gid: int) -> list[Fraction]:
        e, j = divmod(gid, self.w + 1)
        s = ManinSum(self.w)
        s[gid] = 1
        return self.boundary_of_sum(s)

    def boundary_of_sum(self, s: ManinSum) -> list[Fraction]:
        """(e, Q) -> Q(1,0) [class of r_e inf] - Q(0,1) [class of r_e 0]."""
        out = [Fraction(0)] * len(self.cusp_classes)
        w = self.w
        for gid, c in s.items():
            e, j = divmod(gid, w + 1)
            if j == w:
                out[self._class_of[e]] += c
            if j == 0:
                out[self._class_of[self.table.right_mul["S"][e]]] -= c
        return out

    def boundary_term(self, t: CuspSymbolTerm) -> list[Fraction]:
        """scalar * (P(beta) [beta] - P(alpha) [alpha]) with P evaluated at the
        projective coordinates of each cusp."""
        out = [Fraction(0)] * len(self.cusp_classes)
        for c, sgn in ((t.beta, 1), (t.alpha, -1)):
            p, q = cusp_pair(c)
            out[cusp_class(self.table, c, self._class_of)] += sgn * t.scalar * t.P(p, q)
        return out

    def boundary_of_vector(self, v: HomologyVector) -> list[Fraction]:
        out = [Fraction(0)] * len(self.cusp_classes)
        for i, c in enumerate(v.coords):
            if c:
                for k, b in enumerate(self.boundary_matrix[i]):
                    out[k] += c * b
        return out

    def is_cuspidal(self, v: HomologyVector) -> bool:
        return not any(self.boundary_of_vector(v))


_SPACE_CACHE: dict = {}


def build_symbol_space(table: CosetTable, w: int) -> SymbolSpace:
    key = (table.spec, w)
    if key not in _SPACE_CACHE:
        _SPACE_CACHE[key] = SymbolSpace(table, w)
    return _SPACE_CACHE[key]


def reduce(s: ManinSum, space: SymbolSpace) -> HomologyVector:
    return space.reduce(s)


def boundary(t: CuspSymbolTerm, space: SymbolSpace) -> list[Fraction]:
    return space.boundary_term(t)
