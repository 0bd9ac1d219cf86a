"""Command line front end.  Runs the shared handlers in-process, or posts the
same config to a running service with --url."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from pydantic import ValidationError

from .service.handlers import ConfigError, run
from .service.schemas import RunConfig

COMMANDS = ("cosets", "encode", "lms", "lyapunov", "pair", "verify-theorem")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="limsym", description="Higher-weight limiting modular symbols")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--group", default="full", help="full | gamma0:N | gamma1:N | gamma:N")
    p.add_argument("--weight", type=int, default=0, help="symbol weight w (forms of weight w + 2)")
    p.add_argument("--nm", default=None, help="coefficient vectors 'N1,..,Nw:M1,..,Mw' (default X^w)")
    p.add_argument("--point", default=None, help="quad:p,q,d | digits:x1,x2,.. | random:seed,count | golden | silver, optional @e")
    p.add_argument("--nmax", type=int, default=50)
    p.add_argument("--n-list", default="20,40,80", help="n values for verify-theorem")
    p.add_argument("--form", default=None, help="delta | gamma0_11 | path to a form file")
    p.add_argument("--terms", type=int, default=None, help="q-expansion truncation")
    p.add_argument("--tol-path", type=float, default=1e-6)
    p.add_argument("--tol-period", type=float, default=1e-9)
    p.add_argument("--tol-identity", type=float, default=1e-8)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--url", default=None, help="base URL of a running service")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        group=args.group,
        weight=args.weight,
        nm=args.nm,
        point=args.point,
        nmax=args.nmax,
        n_list=[int(v) for v in args.n_list.split(",") if v.strip()],
        form=args.form,
        terms=args.terms,
        tol_path=args.tol_path,
        tol_period=args.tol_period,
        tol_identity=args.tol_identity,
        seed=args.seed,
        threads=args.threads,
    )


def remote(url: str, command: str, cfg: RunConfig) -> dict:
    import httpx

    r = httpx.post(url.rstrip("/") + "/" + command, json=cfg.model_dump(), timeout=None)
    if r.status_code >= 400:
        raise ConfigError(r.json().get("detail", r.text))
    return r.json()


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    cmd, res = report["command"], report["result"]
    if cmd == "cosets":
        wr.writerow(["index", "a", "b", "c", "d", "S", "T", "Tinv"])
        for i, g in enumerate(res["reps"]):
            wr.writerow([i, *g] + [res["right_mul"][k][i] for k in ("S", "T", "Tinv")])
    elif cmd == "encode":
        wr.writerow(["point", "k", "x", "e"])
        for pi, item in enumerate(res["words"]):
            for k, (x, e) in enumerate(item["word"], start=1):
                wr.writerow([pi, k, x, e])
    elif cmd == "lms":
        dim = max(item["dim"] for item in res["points"])
        wr.writerow(["point", "n", "q_n", "lambda_n"] + [f"L_{i}" for i in range(dim)] + ["delta_n"])
        for pi, item in enumerate(res["points"]):
            for r in item["rows"]:
                L = r["L_n"] or [None] * dim
                wr.writerow([pi, r["n"], r["q_n"], _f(r["lambda_n"])] + [_f(v) for v in L] + [_f(r["delta_n"])])
    elif cmd == "lyapunov":
        wr.writerow(["sample", "lambda_n"])
        for i, s in enumerate(res["samples"]):
            wr.writerow([i, _f(s["lambda_n"] if isinstance(s, dict) else s)])
    elif cmd == "verify-theorem":
        wr.writerow(["n", "q_n", "t_n", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_gap", "rel_gap"])
        for r in res["rows"]:
            if r.get("flagged"):
                wr.writerow([r["n"], r["q_n"], "", "", "", "", "", "", ""])
                continue
            wr.writerow([r["n"], r["q_n"], _f(r["t_n"]), *map(_f, r["lhs"]), *map(_f, r["rhs"]), _f(r["abs_gap"]), _f(r["rel_gap"])])
    else:
        wr.writerow(["j", "re", "im"])
        for j, (re, im) in enumerate(res["generator_pairings"]):
            wr.writerow([j, _f(re), _f(im)])
    return buf.getvalue()


def _f(v) -> str:
    return "" if v is None else repr(float(v))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = remote(args.url, args.command, cfg) if args.url else run(args.command, cfg)
    except (ConfigError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = to_csv(report) if args.format == "csv" else to_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
