"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import json
import math
import random
import time
import zlib

import pytest
from mpmath import mp

from limsym.arith import QuadIrr
from limsym.coding import CodingPoint
from limsym.cosets import FULL, SubgroupSpec, enumerate_cosets, index_formula, member
from limsym.forms import qexp_delta, qexp_gamma0_11
from limsym.limiting import (
    LEVY_CONSTANT,
    LMSComputation,
    LMSRequest,
    levy_samples,
    lms_periodic,
    lyapunov_estimate,
    random_coding_point,
)
from limsym.pairing import FormPairing, cocycle_residuals, numerical_rank, pairing_matrix, theorem_check
from limsym.service.handlers import run
from limsym.service.schemas import RunConfig
from limsym.symbols import ManinSum, build_symbol_space

from support import check_additivity, check_antisymmetry, check_invariance

GOLDEN = QuadIrr.make(-1, 2, 5)
SILVER = QuadIrr.make(-1, 1, 2)
G11 = SubgroupSpec("gamma0", 11)


def _line(record, tag, ok, detail):
    record(f"criterion {tag}: {'PASS' if ok else 'FAIL'} ({detail})")


def _space(spec, w):
    return build_symbol_space(enumerate_cosets(spec), w)


def test_c01_levy(record):
    t0 = time.perf_counter()
    vals = levy_samples(seed=1, count=200, n=300)
    dt = time.perf_counter() - t0
    dev = abs(sum(vals) / len(vals) - LEVY_CONSTANT) / LEVY_CONSTANT
    ok = dev <= 0.02 and dt < 10
    _line(record, "1", ok, f"relative deviation {dev:.2e}, {dt:.2f} s")
    assert ok


@pytest.mark.parametrize(
    "name,x,target",
    [
        ("golden", GOLDEN, 2 * math.log((1 + math.sqrt(5)) / 2)),
        ("sqrt2-1", SILVER, 2 * math.log(1 + math.sqrt(2))),
    ],
)
def test_c02_quadratic_lyapunov(record, name, x, target):
    t0 = time.perf_counter()
    lam = lyapunov_estimate(x, 500)
    dt = time.perf_counter() - t0
    gap = abs(lam - target)
    ok = gap <= 1e-3 and dt < 1
    _line(record, f"2 [{name}]", ok, f"|lambda_500 - exact| = {gap:.3e}, {dt:.3f} s")
    assert ok


def test_c03_gamma0_index(record):
    bad = []
    for N in range(1, 31):
        spec = SubgroupSpec("gamma0", N) if N > 1 else FULL
        expected = round(N * math.prod(1 + 1 / p for p in range(2, N + 1) if N % p == 0 and all(p % d for d in range(2, p))))
        if not (index_formula(spec) == enumerate_cosets(spec).index == expected):
            bad.append(N)
    _line(record, "3", not bad, f"N <= 30, mismatches {bad}")
    assert not bad


def test_c04_dimensions(record):
    cases = {("full", 10): 2, ("gamma0:11", 0): 2, ("full", 0): 0, ("gamma0:2", 0): 0}
    got = {k: _space(SubgroupSpec.parse(k[0]), k[1]).cuspidal_dim for k in cases}
    ok = got == cases
    _line(record, "4", ok, ", ".join(f"{g} w={w}: {d}" for (g, w), d in got.items()))
    assert ok


def test_c05_algebra(record):
    cases = [(G11, 0), (G11, 2), (FULL, 10)]
    counts = {}
    failures = 0
    for check in (check_additivity, check_antisymmetry, check_invariance):
        n = 0
        for spec, w in cases:
            sp = _space(spec, w)
            rng = random.Random(zlib.crc32(f"{spec}{w}{check.__name__}".encode()))
            for _ in range(500):
                failures += not check(sp, rng)
                n += 1
        counts[check.__name__.removeprefix("check_")] = n
    rel_bad = 0
    for spec, w in cases:
        sp = _space(spec, w)
        rel_bad += sum(not sp.reduce(ManinSum(w, r)).is_zero() for r in sp.relations)
    rng = random.Random(50)
    table = enumerate_cosets(G11)
    member_bad = 0
    for _ in range(20):
        p = random_coding_point(rng, 50, rng.randrange(table.index))
        comp = LMSComputation(LMSRequest(G11, 0, point=p, n_max=50))
        member_bad += sum(not member(G11, comp.tilde_g(k)) for k in range(1, 51))
    ok = not failures and not rel_bad and not member_bad
    _line(record, "5", ok, f"instances {counts}, failures {failures}, relation residues {rel_bad}, tilde_g outside G {member_bad}")
    assert ok


def test_c06_delta_cocycles(record):
    f = qexp_delta(50)
    t0 = time.perf_counter()
    with mp.workdps(30):
        res = cocycle_residuals(f)
        fp = FormPairing(f, _space(FULL, 10))
        rel = max(float(abs(fp.pair_relation(r))) for r in fp.space.relations)
    dt = time.perf_counter() - t0
    ok = res["two_term"] <= 1e-8 and res["three_term"] <= 1e-8 and rel <= 1e-8 and dt < 5
    _line(record, "6", ok, f"two-term {res['two_term']:.1e}, three-term {res['three_term']:.1e}, relations {rel:.1e}, {dt:.2f} s")
    assert ok


def test_c07_closed_form(record):
    req = LMSRequest(G11, 0, point=CodingPoint(SILVER), n_max=200)
    limit = lms_periodic(req).limit
    comp = LMSComputation(req)
    gap = {n: max(abs(a - b) for a, b in zip(comp.scaled(n), limit)) for n in (50, 200)}
    ok = gap[200] <= 1e-2 and gap[200] < gap[50]
    _line(record, "7", ok, f"gap n=50 {gap[50]:.4f}, n=200 {gap[200]:.4f}")
    assert ok


@pytest.mark.parametrize(
    "name,spec,w,x,form",
    [
        ("full w=10 delta golden", FULL, 10, GOLDEN, "delta"),
        ("gamma0(11) w=0 sqrt2-1", G11, 0, SILVER, "gamma0_11"),
    ],
)
def test_c08_theorem(record, name, spec, w, x, form):
    f = qexp_delta(50) if form == "delta" else qexp_gamma0_11(400)
    req = LMSRequest(spec, w, point=CodingPoint(x), n_max=80)
    t0 = time.perf_counter()
    rep = theorem_check(req, f, (20, 40, 80))
    dt = time.perf_counter() - t0
    gaps = [r["rel_gap"] for r in rep["rows"]]
    ok = rep["final_rel_gap"] <= 0.10 and rep["strictly_decreasing"] and dt < 60
    _line(record, f"8 [{name}]", ok, "rel gaps " + ", ".join(f"{g:.4f}" for g in gaps) + f", {dt:.1f} s")
    assert ok


def test_c09_nondegeneracy(record):
    out = []
    ok = True
    for spec, w, f in ((FULL, 10, qexp_delta(50)), (G11, 0, qexp_gamma0_11(400))):
        sp = _space(spec, w)
        with mp.workdps(30):
            r = numerical_rank(pairing_matrix(f, sp))
        ok &= r == sp.cuspidal_dim
        out.append(f"{spec} rank {r} / cuspidal {sp.cuspidal_dim}")
    _line(record, "9", ok, "; ".join(out))
    assert ok


def test_c10_determinism(record):
    base = {"group": "gamma0:11", "weight": 0, "point": "silver", "n_list": [20, 40, 80]}
    a = json.dumps(run("verify-theorem", RunConfig(**base, threads=1)), sort_keys=True)
    b = json.dumps(run("verify-theorem", RunConfig(**base, threads=8)), sort_keys=True)
    ok = a == b
    _line(record, "10", ok, f"threads 1 vs 8, {len(a)} bytes, identical {ok}")
    assert ok
