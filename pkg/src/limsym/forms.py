"""Cusp forms given by q-expansions: exact eta-product coefficients, a plain
text form file format, fundamental domain reduction and evaluation anywhere
in the upper half-plane."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import mpmath
from mpmath import mp

from .arith import IDENTITY, Mat2, S


@dataclass(frozen=True)
class QExpansion:
    """f = sum_{n>=1} a_n q^n, q = exp(2 pi i z).  ``coeffs[0]`` is a_1.

    ``fricke`` is the sign s in f(-1/(N z)) = s N^{k/2} z^k f(z); it lets a
    prime-level form be evaluated arbitrarily close to the real line."""

    weight: int
    level: int
    coeffs: tuple
    fricke: int | None = None
    name: str = ""

    @property
    def T(self) -> int:
        return len(self.coeffs)

    def a(self, n: int) -> int:
        return self.coeffs[n - 1]

    def truncate(self, T: int) -> "QExpansion":
        return QExpansion(self.weight, self.level, self.coeffs[:T], self.fricke, self.name)

    def to_json(self) -> dict:
        return {"name": self.name, "weight": self.weight, "level": self.level, "T": self.T, "fricke": self.fricke}


def _pentagonal(T: int) -> dict[int, int]:
    """Nonzero coefficients of prod_{n>=1} (1 - q^n) up to degree T."""
    out = {0: 1}
    k = 1
    while True:
        sgn = -1 if k % 2 else 1
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > T:
            break
        out[g1] = sgn
        if g2 <= T:
            out[g2] = sgn
        k += 1
    return out


@lru_cache(maxsize=32)
def euler_power(r: int, T: int) -> tuple[int, ...]:
    """Coefficients 0..T of prod (1 - q^n)^r via the power recurrence
    n g_n = sum_j ((r + 1) j - n) f_j g_{n-j} on the sparse pentagonal series."""
    f = sorted((j, c) for j, c in _pentagonal(T).items() if j)
    g = [0] * (T + 1)
    g[0] = 1
    for n in range(1, T + 1):
        acc = 0
        for j, c in f:
            if j > n:
                break
            acc += ((r + 1) * j - n) * c * g[n - j]
        g[n] = acc // n
    return tuple(g)


def qexp_delta(T: int = 50) -> QExpansion:
    """q prod (1 - q^n)^24."""
    if T < 1:
        raise ValueError("T must be >= 1")
    e = euler_power(24, T - 1)
    return QExpansion(12, 1, tuple(e), None, "delta")


def qexp_gamma0_11(T: int = 400) -> QExpansion:
    """q prod (1 - q^n)^2 (1 - q^{11 n})^2, the weight-2 newform of level 11."""
    if T < 1:
        raise ValueError("T must be >= 1")
    A = euler_power(2, T - 1)
    B = euler_power(2, (T - 1) // 11)
    out = [0] * T
    for i, b in enumerate(B):
        if b:
            s = 11 * i
            for j in range(T - s):
                out[s + j] += b * A[j]
    return QExpansion(2, 11, tuple(out), -1, "gamma0_11")


def read_form_file(path: str | Path) -> QExpansion:
    """Header 'weight k level N' (optionally followed by 'fricke s'), then one
    integer a_n per line starting at n = 1."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty form file")
    head = lines[0].split()
    try:
        fields = dict(zip(head[::2], head[1::2]))
        k = int(fields["weight"])
        N = int(fields["level"])
        fr = int(fields["fricke"]) if "fricke" in fields else None
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad header {lines[0]!r}; expected 'weight k level N'") from exc
    coeffs = tuple(int(ln) for ln in lines[1:])
    if not coeffs:
        raise ValueError("form file has no coefficients")
    return QExpansion(k, N, coeffs, fr, Path(path).stem)


def write_form_file(f: QExpansion, path: str | Path) -> None:
    head = f"weight {f.weight} level {f.level}"
    if f.fricke is not None:
        head += f" fricke {f.fricke}"
    Path(path).write_text(head + "\n" + "\n".join(str(a) for a in f.coeffs) + "\n")


# ---------------------------------------------------------------------------
# evaluation


def fd_reduce(z) -> tuple:
    """(z', gamma) with z' = gamma z in the standard fundamental domain and
    gamma an integer matrix in SL2(Z)."""
    z = mpmath.mpc(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    g = IDENTITY
    for _ in range(100000):
        n = int(mpmath.nint(z.real))
        if n:
            z = z - n
            g = Mat2(g.a - n * g.c, g.b - n * g.d, g.c, g.d)
        if abs(z) < 1 - mpmath.mpf(10) ** (-mp.dps + 5):
            z = -1 / z
            g = S @ g
        else:
            break
    else:
        raise RuntimeError("fundamental domain reduction did not terminate")
    # boundary ties toward Re z <= 0
    if z.real > 0.5:
        z -= 1
        g = Mat2(g.a - g.c, g.b - g.d, g.c, g.d)
    return z, g


def terms_needed(f: QExpansion, y: float, eps: float) -> int:
    """Smallest T whose tail bound sum_{n>T} 2 n^{k/2} |q|^n is below eps
    (capped at the available truncation)."""
    r = math.exp(-2 * math.pi * y)
    half_k = f.weight / 2
    for n in range(1, f.T):
        m = n + 1
        ratio = r * (1 + 1 / m) ** half_k
        if ratio < 1 and 2 * m ** half_k * r ** m / (1 - ratio) < eps:
            return n
    return f.T


def _series(f: QExpansion, z, T: int | None = None):
    """sum_{n<=T} a_n q^n by Horner in q."""
    q = mpmath.expj(2 * mp.pi * z)
    if T is None:
        T = terms_needed(f, float(z.imag), 10.0 ** -min(mp.dps, 30))
    acc = mpmath.mpc(0)
    for n in range(T, 0, -1):
        acc = (acc + f.coeffs[n - 1]) * q
    return acc


def series_tail_bound(f: QExpansion, y, T: int | None = None) -> float:
    """Bound on sum_{n>T} |a_n| |q|^n using |a_n| <= d(n) n^{(k-1)/2} <= 2 n^{k/2}."""
    T = T or f.T
    r = math.exp(-2 * math.pi * float(y))
    k = f.weight
    total = 0.0
    n = T + 1
    while True:
        term = 2 * n ** (k / 2) * r ** n
        total += term
        if term < 1e-40 * max(total, 1e-300) or n > T + 100000:
            break
        n += 1
    return total


def _min_height(f: QExpansion, tol: float = 1e-12) -> float:
    # smallest Im z for which the truncated series meets tol
    lo, hi = 1e-4, 10.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if series_tail_bound(f, mid) < tol:
            hi = mid
        else:
            lo = mid
    return hi


def eval_series(f: QExpansion, z, h_min: float | None = None):
    """Direct q-series summation; refuses points below the truncation height."""
    z = mpmath.mpc(z)
    h = _min_height(f) if h_min is None else h_min
    if z.imag < h:
        raise ValueError(f"Im z = {float(z.imag):.3g} is below the series height {h:.3g}")
    return _series(f, z)


def _can_unfold(f: QExpansion) -> bool:
    return f.level == 1 or (f.fricke is not None and _is_prime(f.level))


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % p for p in range(2, math.isqrt(n) + 1))


def slash_value(f: QExpansion, g: Mat2, u):
    """(f|g)(u) = (c u + d)^{-k} f(g u) for u in the fundamental domain,
    using only q-series at height >= Im(u)/N."""
    N = f.level
    if N == 1 or g.c % N == 0:
        return _series(f, u)
    if not (f.fricke is not None and _is_prime(N)):
        raise ValueError("form cannot be transported across cosets of its level")
    # g = delta S T^j with delta in Gamma0(N): j = d / c mod N
    j = g.d * pow(g.c, -1, N) % N
    k = f.weight
    return f.fricke * mpmath.power(N, -mpmath.mpf(k) / 2) * _series(f, (u + j) / N)


def eval_form(f: QExpansion, z):
    """f(z) for any z in the upper half-plane.  Level 1 forms and prime level
    forms with a Fricke sign are unfolded from the fundamental domain;
    anything else falls back to direct summation above the series height."""
    z = mpmath.mpc(z)
    if not _can_unfold(f):
        return eval_series(f, z)
    zr, gam = fd_reduce(z)
    h = gam.inv()  # z = h zr
    factor = mpmath.power(h.c * zr + h.d, f.weight)
    return factor * slash_value(f, h, zr)


def eval_slashed(f: QExpansion, g: Mat2, u):
    """(f|g)(u) = (c u + d)^{-k} f(g u)."""
    u = mpmath.mpc(u)
    gu = (g.a * u + g.b) / (g.c * u + g.d)
    return eval_form(f, gu) / mpmath.power(g.c * u + g.d, f.weight)
