"""Sparse exact linear algebra: fraction-free row echelon over Z, normalized
to rationals at the end."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

Row = dict[int, int]


def _primitive(row: Row) -> Row:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    lead = row[min(row)]
    if lead < 0:
        row = {k: -v for k, v in row.items()}
    return row


def _combine(r: Row, rc: int, s: Row, sc: int) -> Row:
    """rc * r - sc * s, dropping zeros."""
    out = {k: rc * v for k, v in r.items()} if rc != 1 else dict(r)
    for k, v in s.items():
        nv = out.get(k, 0) - sc * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _integral(row: Mapping[int, Fraction | int]) -> Row:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // math.gcd(den, v.denominator)
    return {k: int(v * den) for k, v in row.items() if v}


class Echelon:
    """Incremental integer row echelon form keyed by pivot column."""

    def __init__(self):
        self.rows: dict[int, Row] = {}

    def add(self, row: Mapping[int, Fraction | int]) -> bool:
        """Insert a row; returns True when it increases the rank."""
        r = _integral(row)
        while r:
            c = min(r)
            piv = self.rows.get(c)
            if piv is None:
                self.rows[c] = _primitive(r)
                return True
            g = math.gcd(piv[c], r[c])
            r = _combine(r, piv[c] // g, piv, r[c] // g)
            if r:
                r = _primitive(r)
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduced(self) -> dict[int, dict[int, Fraction]]:
        """Reduced row echelon form: pivot -> {col: Fraction} with pivot entry 1
        and zeros in every other pivot column."""
        pivots = sorted(self.rows)
        red: dict[int, Row] = {}
        for p in reversed(pivots):
            r = dict(self.rows[p])
            for q in sorted(k for k in r if k != p and k in red):
                if q not in r:
                    continue
                s = red[q]
                g = math.gcd(s[q], r[q])
                r = _combine(r, s[q] // g, s, r[q] // g)
            red[p] = _primitive(r)
        out = {}
        for p, r in red.items():
            lead = r[p]
            out[p] = {k: Fraction(v, lead) for k, v in r.items()}
        return out


def rank(rows: Iterable[Mapping[int, Fraction | int]]) -> int:
    e = Echelon()
    for r in rows:
        e.add(r)
    return e.rank


def nullspace(rows: list[list], ncols: int) -> list[list[Fraction]]:
    """Basis of {v : A v = 0} for a dense matrix A given by rows."""
    e = Echelon()
    for row in rows:
        e.add({j: v for j, v in enumerate(row) if v})
    red = e.reduced()
    free = [j for j in range(ncols) if j not in red]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for p, r in red.items():
            if f in r:
                v[p] = -r[f]
        basis.append(v)
    return basis


def transpose(rows: list[list], ncols: int) -> list[list]:
    return [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
