"""Subcommand implementations: RunConfig in, plain JSON-ready dict out.

Used in-process by the CLI and behind the HTTP endpoints, so both front ends
produce identical reports."""

from __future__ import annotations

import random
import statistics
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from mpmath import mp

from .. import __version__
from ..arith import SIGNED, CFExpansion, QuadIrr
from ..coding import CodingPoint, e_chain_vs_bar_g, encode
from ..cosets import SubgroupSpec, enumerate_cosets, index_formula
from ..forms import QExpansion, qexp_delta, qexp_gamma0_11, read_form_file
from ..limiting import (
    LEVY_CONSTANT,
    LMSComputation,
    LMSRequest,
    exact_lyapunov,
    lms_periodic,
    lyapunov_estimate,
    random_coding_point,
    random_unsigned_cf,
)
from ..pairing import (
    FormPairing,
    cocycle_residuals,
    numerical_rank,
    pairing_matrix,
    period_integrals,
    theorem_check,
)
from ..symbols import build_symbol_space
from .schemas import RunConfig

NAMED_POINTS = {
    "golden": (-1, 2, 5),
    "silver": (-1, 1, 2),
    "sqrt2": (-1, 1, 2),
}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing


def parse_nm(text: str | None, w: int) -> tuple[tuple, tuple]:
    """'N1,...,Nw:M1,...,Mw'; empty means N = (1,...,1), M = (0,...,0)."""
    if not text:
        return (1,) * w, (0,) * w
    if ":" not in text:
        raise ConfigError("--nm must look like 'N1,..,Nw:M1,..,Mw'")
    a, b = text.split(":", 1)
    N = tuple(int(v) for v in a.split(",") if v.strip())
    M = tuple(int(v) for v in b.split(",") if v.strip())
    if len(N) != w or len(M) != w:
        raise ConfigError(f"--nm needs {w} entries on each side of ':'")
    return N, M


def parse_point(text: str | None, nmax: int = 50) -> list[CodingPoint]:
    """quad:p,q,d | digits:x1,x2,... | random:seed,count | golden | silver,
    optionally followed by '@e' for the starting coset."""
    if not text:
        raise ConfigError("a --point is required")
    e1 = 0
    if "@" in text:
        text, e = text.rsplit("@", 1)
        e1 = int(e)
    text = text.strip()
    if text in NAMED_POINTS:
        return [CodingPoint(QuadIrr.make(*NAMED_POINTS[text]), e1)]
    kind, _, body = text.partition(":")
    try:
        vals = [int(v) for v in body.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad point spec {text!r}") from exc
    if kind == "quad":
        if len(vals) != 3:
            raise ConfigError("quad:p,q,d needs three integers")
        x = QuadIrr.make(*vals)
        if abs(float(x)) >= 1:
            raise ConfigError("quadratic point must lie in (-1, 1)")
        return [CodingPoint(x, e1)]
    if kind == "digits":
        try:
            cf = CFExpansion("finite", digits=vals, sign_mode=SIGNED)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return [CodingPoint(cf, e1)]
    if kind == "random":
        if len(vals) != 2:
            raise ConfigError("random:seed,count needs two integers")
        rng = random.Random(vals[0])
        return [random_coding_point(rng, nmax, e1) for _ in range(vals[1])]
    raise ConfigError(f"unknown point kind {kind!r}")


def load_form(name: str | None, spec: SubgroupSpec, w: int, terms: int | None = None) -> QExpansion:
    if not name:
        if w == 10 and spec.kind == "full":
            name = "delta"
        elif w == 0 and spec.N == 11 and spec.kind != "full":
            name = "gamma0_11"
        else:
            raise ConfigError("no default cusp form for this group and weight; pass --form")
    if name == "delta":
        return qexp_delta(terms or 50)
    if name == "gamma0_11":
        return qexp_gamma0_11(terms or 400)
    path = Path(name)
    if not path.exists():
        raise ConfigError(f"unknown form {name!r}")
    f = read_form_file(path)
    return f.truncate(terms) if terms else f


def _spec(cfg: RunConfig) -> SubgroupSpec:
    return SubgroupSpec.parse(cfg.group)


def _envelope(command: str, cfg: RunConfig, result: dict) -> dict:
    return {
        "command": command,
        "version": __version__,
        # thread count never changes results, so it stays out of the report
        "config": cfg.model_dump(exclude={"threads"}),
        "tolerances": {
            "path": cfg.tol_path,
            "period": cfg.tol_period,
            "identity": cfg.tol_identity,
        },
        "result": result,
    }


def _point_json(p: CodingPoint) -> dict:
    out = p.describe()
    if not p.is_quadratic:
        cf = p.signed_cf
        out["digits"] = cf.digits(cf.length())
    return out


# ---------------------------------------------------------------------------
# subcommands


def run_cosets(cfg: RunConfig) -> dict:
    spec = _spec(cfg)
    table = enumerate_cosets(spec)
    res = table.to_json()
    res["index_formula"] = index_formula(spec)
    res["cusp_classes"] = table.cusp_classes()
    return _envelope("cosets", cfg, res)


def run_encode(cfg: RunConfig) -> dict:
    table = enumerate_cosets(_spec(cfg))
    words = []
    for p in parse_point(cfg.point, cfg.nmax):
        try:
            w = encode(p, table, cfg.nmax)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        words.append({"point": _point_json(p), "word": w.to_json(), "e_chain_ok": e_chain_vs_bar_g(w)})
    return _envelope("encode", cfg, {"words": words})


def run_lms(cfg: RunConfig) -> dict:
    spec = _spec(cfg)
    N, M = parse_nm(cfg.nm, cfg.weight)
    out = []
    for p in parse_point(cfg.point, cfg.nmax):
        req = LMSRequest(spec, cfg.weight, N, M, p, cfg.nmax)
        try:
            comp = LMSComputation(req)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        rows = comp.rows()
        for r in rows:
            r["q_n"] = str(r["q_n"])
        item = {
            "point": _point_json(p),
            "dim": comp.space.dim,
            "cuspidal_dim": comp.space.cuspidal_dim,
            "rows": rows,
            "exact_sum": comp.exact_vector(cfg.nmax).to_json(),
            "closed_form": None,
        }
        if p.is_quadratic:
            try:
                item["closed_form"] = lms_periodic(req).to_json()
            except ValueError as exc:
                item["closed_form"] = {"error": str(exc)}
        out.append(item)
    return _envelope("lms", cfg, {"points": out})


def run_lyapunov(cfg: RunConfig) -> dict:
    n = cfg.nmax
    text = cfg.point or f"random:{cfg.seed if cfg.seed is not None else 0},200"
    if text.startswith("random:"):
        seed, count = (int(v) for v in text.split(":", 1)[1].split(","))
        rng = random.Random(seed)
        cfs = [random_unsigned_cf(rng, n) for _ in range(count)]
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            vals = list(ex.map(lambda cf: lyapunov_estimate(cf, n), cfs))
        mean = statistics.fmean(vals)
        res = {
            "n": n,
            "samples": vals,
            "mean": mean,
            "stdev": statistics.stdev(vals) if len(vals) > 1 else 0.0,
            "levy_constant": LEVY_CONSTANT,
            "relative_deviation": abs(mean - LEVY_CONSTANT) / LEVY_CONSTANT,
        }
        return _envelope("lyapunov", cfg, res)
    pts = parse_point(text, n)
    samples = []
    for p in pts:
        row = {"point": _point_json(p), "lambda_n": lyapunov_estimate(p, n)}
        if p.is_quadratic:
            row["lambda_exact"] = exact_lyapunov(p.x)
            row["abs_error"] = abs(row["lambda_n"] - row["lambda_exact"])
        samples.append(row)
    return _envelope("lyapunov", cfg, {"n": n, "samples": samples})


def run_pair(cfg: RunConfig) -> dict:
    spec = _spec(cfg)
    f = load_form(cfg.form, spec, cfg.weight, cfg.terms)
    space = build_symbol_space(enumerate_cosets(spec), cfg.weight)
    with mp.workdps(30):
        res = {"form": f.to_json(), "dim": space.dim, "cuspidal_dim": space.cuspidal_dim}
        if f.level == 1:
            pt = period_integrals(f, tol=cfg.tol_period)
            res["periods"] = pt.to_json()
            res["cocycles"] = cocycle_residuals(f)
        fp = FormPairing(f, space)
        res["generator_pairings"] = [[float(v.real), float(v.imag)] for v in fp.gen_values]
        rel = max((float(abs(fp.pair_relation(r))) for r in space.relations), default=0.0)
        res["max_relation_pairing"] = rel
        res["relations_vanish"] = rel <= cfg.tol_identity
        m = pairing_matrix(f, space)
        res["pairing_matrix"] = m.tolist()
        res["pairing_rank"] = numerical_rank(m)
    return _envelope("pair", cfg, res)


def run_verify_theorem(cfg: RunConfig) -> dict:
    spec = _spec(cfg)
    f = load_form(cfg.form, spec, cfg.weight, cfg.terms)
    N, M = parse_nm(cfg.nm, cfg.weight)
    pts = parse_point(cfg.point, max(cfg.n_list))
    if len(pts) != 1:
        raise ConfigError("verify-theorem takes a single point")
    req = LMSRequest(spec, cfg.weight, N, M, pts[0], max(cfg.n_list))
    rep = theorem_check(req, f, cfg.n_list, cfg.tol_path, cfg.threads)
    rep["point"] = _point_json(pts[0])
    rep["form"] = f.to_json()
    return _envelope("verify-theorem", cfg, rep)


COMMANDS = {
    "cosets": run_cosets,
    "encode": run_encode,
    "lms": run_lms,
    "lyapunov": run_lyapunov,
    "pair": run_pair,
    "verify-theorem": run_verify_theorem,
}


def run(command: str, cfg: RunConfig) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    return COMMANDS[command](cfg)
