"""Command-line interface.

Exit codes: 0 success, 1 a check failed or the solver did not converge,
2 invalid configuration, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import __version__
from .measures import SCHEMA_VERSION, equilibrium_moments
from .momentmat import moment_matrix
from .pell import (CHRISTOFFEL, KERNEL, boundary_minimum_check, boundary_samples,
                   full_generators, kernel_constant, localized_christoffel, pell_constant,
                   reports_to_csv, vertex_samples, verify_pell)
from .polyring import DOMAINS, EXACT, FLOAT

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    domains: list[str]
    d_range: range
    n_range: range
    level: str
    mode: str
    tol: float | None
    out: str | None
    fmt: str


def parse_range(text: str, lo: int) -> range:
    """``"A"`` or ``"A..B"``, inclusive."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            r = range(int(a), int(b) + 1)
        else:
            r = range(int(text), int(text) + 1)
    except ValueError:
        raise ConfigError(f"bad range {text!r}, expected A or A..B") from None
    if len(r) == 0:
        raise ConfigError(f"empty range {text!r}")
    if r.start < lo:
        raise ConfigError(f"range {text!r} must start at {lo} or above")
    return r


def parse_point(text: str, d: int) -> tuple[Fraction, ...]:
    try:
        pt = tuple(Fraction(c.strip()) for c in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad point {text!r}") from None
    if len(pt) != d:
        raise ConfigError(f"point {text!r} has {len(pt)} coordinates, expected {d}")
    return pt


def _config(args) -> RunConfig:
    domains = args.domain or list(DOMAINS)
    tol = getattr(args, "tol", None)
    if tol is not None and not tol > 0:
        raise ConfigError(f"--tol must be positive, got {tol}")
    return RunConfig(args.command, domains, parse_range(args.d, 1), parse_range(args.n, 0),
                     getattr(args, "level", CHRISTOFFEL), getattr(args, "mode", EXACT),
                     tol, args.out, args.format)


# ---------------------------------------------------------------------------
# output

def _table_text(header: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).rjust(w) for x, w in zip(r, widths)) for r in [header, *rows]]
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(payload, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {out}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands

def cmd_verify(cfg: RunConfig) -> int:
    reports = [verify_pell(dom, d, n, cfg.level, cfg.mode)
               for dom in sorted(cfg.domains) for d in cfg.d_range for n in cfg.n_range]
    if cfg.fmt == "json":
        text = _json_text({"command": "verify", "reports": [r.to_dict() for r in reports]})
    elif cfg.fmt == "csv":
        text = reports_to_csv(reports)
    else:
        rows = [(r.domain, r.d, r.n, r.level, r.mode, r.constant_expected,
                 r.residual_max_abs_coeff, r.status) for r in reports]
        text = _table_text(("domain", "d", "n", "level", "mode", "constant", "residual", "status"),
                           rows, "pretty")
    _emit(text, cfg.out)
    return EXIT_OK if all(r.verified for r in reports) else EXIT_FAIL


def cmd_constants(cfg: RunConfig) -> int:
    f = pell_constant if cfg.level == CHRISTOFFEL else kernel_constant
    rows = [(dom, d, n, f(dom, d, n))
            for dom in sorted(cfg.domains) for d in cfg.d_range for n in cfg.n_range]
    if cfg.fmt == "json":
        text = _json_text({"command": "constants", "level": cfg.level,
                           "constants": [dict(zip(("domain", "d", "n", "value"), r)) for r in rows]})
    else:
        text = _table_text(("domain", "d", "n", "constant"), rows, cfg.fmt)
    _emit(text, cfg.out)
    return EXIT_OK


def _single(cfg: RunConfig) -> tuple[str, int, int]:
    if len(cfg.domains) != 1 or len(cfg.d_range) != 1 or len(cfg.n_range) != 1:
        raise ConfigError(f"{cfg.command} needs a single --domain, --d and --n")
    return cfg.domains[0], cfg.d_range[0], cfg.n_range[0]


def cmd_kernel(cfg: RunConfig, x: str, y: str | None) -> int:
    from .closedform import closed_kernel, moment_kernel

    dom, d, n = _single(cfg)
    px = parse_point(x, d)
    py = parse_point(y, d) if y is not None else px
    try:
        closed = closed_kernel(dom, d, n, px, py)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    moment = moment_kernel(dom, d, n, px, py)
    payload = {"domain": dom, "d": d, "n": n, "x": [str(c) for c in px], "y": [str(c) for c in py],
               "moment_kernel": moment, "closed_form": closed, "deviation": abs(moment - closed)}
    if cfg.fmt == "json":
        text = _json_text({"command": "kernel", **payload})
    else:
        text = _table_text(tuple(payload), [tuple(
            ",".join(v) if isinstance(v, list) else v for v in payload.values())], cfg.fmt)
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_optimize(cfg: RunConfig, generators: str, max_iter: int) -> int:
    from .logdet import DEFAULT_TOL, ConvergenceError, ProblemSpec, primal_solve

    dom, d, n = _single(cfg)
    try:
        spec = ProblemSpec.for_domain(dom, d, n, truncated=generators == "truncated")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    code = EXIT_OK
    try:
        report = primal_solve(spec, tol=cfg.tol or DEFAULT_TOL, max_iter=max_iter)
    except ConvergenceError as exc:
        report, code = exc.report, EXIT_FAIL
    data = report.to_dict()
    data["generator_set"] = generators
    data["recovers_equilibrium"] = report.equilibrium_deviation <= 1e-6
    if cfg.fmt == "json":
        text = _json_text({"command": "optimize", **{k: v for k, v in data.items()
                                                     if k != "schema_version"}})
    else:
        keys = ("domain", "d", "n", "generator_set", "converged", "iterations", "objective",
                "gradient_norm", "partition_residual", "equilibrium_deviation",
                "recovers_equilibrium")
        text = _table_text(keys, [tuple(data[k] for k in keys)], cfg.fmt)
    _emit(text, cfg.out)
    return code


def cmd_boundary(cfg: RunConfig, samples: int, vertices: bool, seed: int) -> int:
    results = []
    for dom in sorted(cfg.domains):
        for d in cfg.d_range:
            pts = vertex_samples(dom, d) if vertices else boundary_samples(dom, d, samples, seed)
            for n in cfg.n_range:
                results.append(boundary_minimum_check(dom, d, n, pts, seed=seed))
    if cfg.fmt == "json":
        text = _json_text({"command": "boundary", "samples": "vertices" if vertices else "faces",
                           "reports": [r.to_dict() for r in results]})
    else:
        rows = [(r.domain, r.d, r.n, r.gamma, sum(r.boundary_attained), len(r.boundary_attained),
                 r.interior_ok, r.status) for r in results]
        text = _table_text(("domain", "d", "n", "gamma", "attained", "samples", "interior_ok",
                            "status"), rows, cfg.fmt)
    _emit(text, cfg.out)
    return EXIT_OK if all(r.status == "verified" for r in results) else EXIT_FAIL


def _trace(dom: str, d: int, n: int, start, stop, count: int) -> list[dict]:
    inv = localized_christoffel(dom, d, full_generators(dom, d)[0].label, n)
    out = []
    for i in range(count):
        t = Fraction(i, count - 1) if count > 1 else Fraction(0)
        x = tuple(a + t * (b - a) for a, b in zip(start, stop))
        out.append({"t": str(t), "x": [str(c) for c in x], "value": str(inv(x))})
    return out


def cmd_export(cfg: RunConfig, what: str, order: int | None, line: Sequence[str] | None,
               count: int) -> int:
    dom, d, n = _single(cfg)
    if what == "moments":
        mu = equilibrium_moments(dom, d, order if order is not None else 2 * n)
        if cfg.mode == FLOAT:
            mu = mu.to_float()
        data = mu.to_dict()
        rows = [(m["alpha"], m["value"]) for m in data["moments"]]
        header = ("alpha", "value")
    elif what == "matrix":
        M = moment_matrix(equilibrium_moments(dom, d, 2 * n), n)
        data = M.to_dict()
        rows = [tuple(r) for r in data["entries"]]
        header = tuple(f"c{j}" for j in range(M.size))
    elif what == "christoffel":
        texts = [{"generator": g.label, "order": n - g.half_degree,
                  "polynomial": localized_christoffel(dom, d, g.label, n - g.half_degree).to_text()}
                 for g in full_generators(dom, d) if g.half_degree <= n]
        data = {"domain": dom, "d": d, "n": n, "christoffel": texts}
        rows = [(t["generator"], t["order"], t["polynomial"]) for t in texts]
        header = ("generator", "order", "polynomial")
    else:
        if line is None:
            # a chord through the domain: the diagonal of the cube, the x1-axis otherwise
            e1 = tuple(Fraction(int(i == 0)) for i in range(d))
            start, stop = {"cube": ((Fraction(-1),) * d, (Fraction(1),) * d),
                           "ball": (tuple(-c for c in e1), e1),
                           "simplex": ((Fraction(0),) * d, e1)}[dom]
        else:
            start, stop = parse_point(line[0], d), parse_point(line[1], d)
        pts = _trace(dom, d, n, start, stop, count)
        data = {"domain": dom, "d": d, "n": n, "gamma": pell_constant(dom, d, n), "trace": pts}
        rows = [(p["t"], ",".join(p["x"]), p["value"]) for p in pts]
        header = ("t", "x", "value")
    if cfg.fmt == "json":
        data = {k: v for k, v in data.items() if k != "schema_version"}
        text = _json_text({"command": "export", "what": what, **data})
    else:
        text = _table_text(header, [tuple(map(_cell, r)) for r in rows], cfg.fmt)
    _emit(text, cfg.out)
    return EXIT_OK


def _cell(v):
    return " ".join(map(str, v)) if isinstance(v, list) else v


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pellpoly", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_n="0..5"):
        sp.add_argument("--domain", action="append", choices=DOMAINS,
                        help="repeatable; default all three")
        sp.add_argument("--d", default="1..3", help="dimension range A..B")
        sp.add_argument("--n", default=default_n, help="degree range A..B")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("json", "csv", "pretty"), default="pretty")

    v = sub.add_parser("verify", help="check the Pell identities")
    common(v)
    v.add_argument("--level", choices=(CHRISTOFFEL, KERNEL), default=CHRISTOFFEL)
    v.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)

    c = sub.add_parser("constants", help="tabulate the identity constants")
    common(c, "0..5")
    c.add_argument("--level", choices=(CHRISTOFFEL, KERNEL), default=CHRISTOFFEL)

    k = sub.add_parser("kernel", help="moment-matrix vs closed-form kernel at a point pair")
    common(k, "1")
    k.add_argument("--x", required=True, help="comma-separated rationals")
    k.add_argument("--y", help="second point (default x)")

    o = sub.add_parser("optimize", help="solve the log-det moment problem")
    common(o, "1")
    o.add_argument("--generators", choices=("full", "truncated"), default="full")
    o.add_argument("--tol", type=float, default=None)
    o.add_argument("--max-iter", type=int, default=200)

    b = sub.add_parser("boundary", help="check where the Christoffel function attains its minimum")
    common(b, "0..4")
    b.add_argument("--samples", type=int, default=10)
    b.add_argument("--vertices", action="store_true", help="use vertices instead of random faces")
    b.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("export", help="dump moments, matrices, polynomials or traces")
    e.add_argument("what", choices=("moments", "matrix", "christoffel", "trace"))
    common(e, "1")
    e.add_argument("--order", type=int, help="moment order (moments only)")
    e.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)
    e.add_argument("--line", nargs=2, metavar=("FROM", "TO"), help="trace segment endpoints")
    e.add_argument("--points", type=int, default=21)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "constants":
            return cmd_constants(cfg)
        if args.command == "kernel":
            return cmd_kernel(cfg, args.x, args.y)
        if args.command == "optimize":
            if args.max_iter < 1:
                raise ConfigError("--max-iter must be at least 1")
            return cmd_optimize(cfg, args.generators, args.max_iter)
        if args.command == "boundary":
            if args.samples < 1:
                raise ConfigError("--samples must be at least 1")
            return cmd_boundary(cfg, args.samples, args.vertices, args.seed)
        if args.order is not None and args.order < 0:
            raise ConfigError("--order must be nonnegative")
        if args.points < 1:
            raise ConfigError("--points must be at least 1")
        return cmd_export(cfg, args.what, args.order, args.line, args.points)
    except ConfigError as exc:
        print(f"pellpoly: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"pellpoly: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
