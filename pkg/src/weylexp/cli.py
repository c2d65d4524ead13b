"""Command-line interface: ``weylexp <command> [options]``.

Exit codes: 0 on success, 1 when an internal check or verification fails,
2 on bad usage.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import checks
from .exponents import (
    LARGE_TYPES,
    MAX_DEGREE,
    ExponentReport,
    compute_report,
    dynkin_index_orbit,
    dynkin_index_via_q,
    exponent_tau,
    exponent_tau_in_basis,
    h2_tau2,
    torsion_bounds,
)
from .lattice import random_unimodular
from .phi import CACHE_ENV, ConsistencyError, phi_rho
from .rootsys import (
    STREAM_CAP,
    OrbitCapExceeded,
    RootSystemKind,
    build,
    orbit,
)
from .scalar import parse_scalar

log = logging.getLogger("weylexp")

TABLE_SCOPE = (
    [("A", n) for n in range(1, 6)]
    + [("B", n) for n in range(2, 5)]
    + [("C", n) for n in range(2, 5)]
    + [("D", 4), ("G", 2), ("F", 4), ("E", 6)]
)
FORMATS = ("table", "json", "csv")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    kinds: list = field(default_factory=list)
    max_degree: int = MAX_DEGREE
    fmt: str = "table"
    cache_dir: Optional[str] = None
    orbit_cap: int = STREAM_CAP
    allow_large: bool = False
    jobs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.max_degree not in (2, 3, 4):
            raise UsageError("--max-degree must be 2, 3 or 4")
        if self.fmt not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")


def _kind(family: str, rank: Optional[int]) -> RootSystemKind:
    family = family.upper()
    if family == "H2" or (family == "H" and rank in (None, 2)):
        return RootSystemKind("H2", 2)
    if rank is None:
        raise UsageError(f"--rank is required for family {family}")
    return RootSystemKind(family, rank)


def select_kinds(family: Optional[str], rank: Optional[int]) -> list[RootSystemKind]:
    """Explicit (family, rank), every table rank of a family, or the whole table."""
    if family is None:
        if rank is not None:
            raise UsageError("--rank needs --kind")
        return [RootSystemKind(f, n) for f, n in TABLE_SCOPE]
    family = family.upper()
    if rank is None and family not in ("H", "H2"):
        ranks = [n for f, n in TABLE_SCOPE if f == family]
        if not ranks:
            raise UsageError(f"--rank is required for family {family}")
        return [RootSystemKind(family, n) for n in ranks]
    return [_kind(family, rank)]


def parse_weight(text: str, rank: int) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != rank:
        raise UsageError(f"weight {text!r} needs {rank} comma-separated coordinates")
    return tuple(parse_scalar(p) for p in parts)


def _fmt_weight(w) -> str:
    return "(" + ", ".join(str(x) for x in w) + ")"


# rendering -------------------------------------------------------------------

def render(rows: list[dict], columns: list[str], fmt: str, payload=None) -> str:
    """Render flat ``rows`` as an aligned table or CSV, or ``payload`` as JSON."""
    if fmt == "json":
        return json.dumps(payload if payload is not None else rows, indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: r.get(c, "") for c in columns})
        return buf.getvalue().rstrip("\n")
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for row in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


REPORT_COLUMNS = ["type", "tau_2", "tau_3", "tau_4", "dynkin", "bound_3", "bound_4", "ch4", "per_weight"]


def report_row(rep: ExponentReport) -> dict:
    row = {"type": rep.name, "dynkin": rep.dynkin_gcd}
    for i in (2, 3, 4):
        row[f"tau_{i}"] = rep.tau.get(i, "")
    for i in (3, 4):
        row[f"bound_{i}"] = rep.torsion_bounds.get(i, "")
    row["ch4"] = "/".join(map(str, rep.ch4_constants)) if rep.ch4_constants else ""
    row["per_weight"] = " ".join(str(rep.dynkin_per_weight[j]) for j in sorted(rep.dynkin_per_weight))
    return row


# commands ----------------------------------------------------------------------

def _report_job(args: tuple) -> dict:
    family, rank, max_degree, allow_large, cap = args
    return compute_report(RootSystemKind(family, rank), max_degree, allow_large, cap).to_dict()


def compute_reports(kinds: list[RootSystemKind], cfg: RunConfig) -> list[ExponentReport]:
    """Reports for ``kinds``, in (family, rank) order whatever the job count."""
    for k in kinds:
        if (k.family, k.rank) in LARGE_TYPES and not cfg.allow_large:
            raise UsageError(f"{k.name} needs --allow-large")
    jobs = [(k.family, k.rank, cfg.max_degree, cfg.allow_large, cfg.orbit_cap) for k in kinds]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            dicts = list(pool.map(_report_job, jobs))
    else:
        dicts = [_report_job(j) for j in jobs]
    reports = [ExponentReport.from_dict(d) for d in dicts]
    return sorted(reports, key=lambda r: (r.kind, r.rank))


def cmd_orbit(args, cfg: RunConfig) -> str:
    kind = _kind(args.family, args.rank_pos)
    rs = build(kind)
    chi = parse_weight(args.weight, rs.rank)
    elements = orbit(rs, chi, min(cfg.orbit_cap, 10**6))
    payload = {"kind": kind.name, "weight": [str(x) for x in chi], "size": len(elements),
               "orbit": [[str(x) for x in w] for w in elements]}
    rows = [{"index": k + 1, "weight": _fmt_weight(w)} for k, w in enumerate(elements)]
    out = render(rows, ["index", "weight"], cfg.fmt, payload)
    if cfg.fmt == "table":
        out += f"\nsize {len(elements)}"
    return out


def cmd_phi(args, cfg: RunConfig) -> str:
    if not args.kind:
        raise UsageError("phi needs --kind")
    kind = _kind(args.kind, args.rank)
    rs = build(kind)
    weights = [parse_weight(args.weight, rs.rank)] if args.weight else rs.fundamental_weights()
    degree = args.degree or cfg.max_degree
    rows = []
    for chi in weights:
        p = phi_rho(rs, chi, degree, cfg.orbit_cap)
        rows.append({"type": kind.name, "weight": _fmt_weight(chi), "degree": degree, "phi": str(p)})
    return render(rows, ["type", "weight", "degree", "phi"], cfg.fmt)


def cmd_dynkin(args, cfg: RunConfig) -> str:
    rows = []
    for kind in select_kinds(args.kind, args.rank):
        if not kind.crystallographic:
            raise UsageError("Dynkin indices need a crystallographic type")
        if (kind.family, kind.rank) in LARGE_TYPES and not cfg.allow_large:
            raise UsageError(f"{kind.name} needs --allow-large")
        rs = build(kind)
        for j in range(rs.rank):
            if (kind.family, kind.rank) in LARGE_TYPES:
                n = dynkin_index_orbit(rs, j, cfg.orbit_cap)
            else:
                n = dynkin_index_via_q(rs, j, cfg.orbit_cap)
            rows.append({"type": kind.name, "weight": f"omega_{j + 1}", "index": n})
    return render(rows, ["type", "weight", "index"], cfg.fmt)


def cmd_h2(args, cfg: RunConfig) -> str:
    rep = h2_tau2()
    if not rep.is_sqrt5:
        raise ConsistencyError(f"H2: tau_2 = {rep.tau2} is not an associate of sqrt(5)")
    d = rep.to_dict()
    row = {"type": "H2", "tau_2": d["tau2"]["display"], "is_sqrt5": str(rep.is_sqrt5).lower(),
           "phi2_rho_omega1": d["phi2_rho_omega1"]}
    return render([row], list(row), cfg.fmt, d)


def cmd_exponents(args, cfg: RunConfig) -> str:
    kinds = select_kinds(args.kind, args.rank)
    if any(not k.crystallographic for k in kinds):
        return cmd_h2(args, cfg)
    reports = compute_reports(kinds, cfg)
    rows = [report_row(r) for r in reports]
    if args.probe_basis:
        for row, rep in zip(rows, reports):
            rs = build(RootSystemKind(rep.kind, rep.rank))
            B = random_unimodular(rs.rank, random.Random(cfg.seed))
            probe = [exponent_tau_in_basis(rs, i, B, cfg.orbit_cap) for i in range(2, cfg.max_degree + 1)]
            row["probe"] = ",".join(map(str, probe))
    columns = REPORT_COLUMNS + (["probe"] if args.probe_basis else [])
    payload = [r.to_dict() for r in reports]
    if args.probe_basis:
        for d, row in zip(payload, rows):
            d["basis_probe"] = row["probe"]
    return render(rows, columns, cfg.fmt, payload)


def cmd_torsion(args, cfg: RunConfig) -> str:
    rows, payload = [], []
    for kind in select_kinds(args.kind, args.rank):
        if not kind.crystallographic:
            raise UsageError("torsion bounds need a crystallographic type")
        rs = build(kind)
        tau = {i: exponent_tau(rs, i, cfg.orbit_cap) for i in (3, 4)}
        bounds, ch4 = torsion_bounds(rs, tau)
        rows.append({"type": kind.name, "bound_3": bounds[3], "bound_4": bounds[4],
                     "ch4": "/".join(map(str, ch4)) if ch4 else ""})
        payload.append({"kind": kind.name, "bounds": {str(k): v for k, v in bounds.items()},
                        "ch4_constants": list(ch4) if ch4 else None})
    return render(rows, ["type", "bound_3", "bound_4", "ch4"], cfg.fmt, payload)


def cmd_table(args, cfg: RunConfig) -> str:
    reports = compute_reports([RootSystemKind(f, n) for f, n in TABLE_SCOPE], cfg)
    rows = [report_row(r) for r in reports]
    payload = {"schema": 1, "reports": [r.to_dict() for r in reports]}
    if cfg.max_degree >= 2:
        h2 = h2_tau2()
        rows.append({"type": "H2", "tau_2": h2.to_dict()["tau2"]["display"]})
        payload["h2"] = h2.to_dict()
    return render(rows, REPORT_COLUMNS, cfg.fmt, payload)


def cmd_verify(args, cfg: RunConfig):
    if args.kind:
        systems = [build(k) for k in select_kinds(args.kind, args.rank)]
    else:
        systems = [build(k) for k in checks.DEFAULT_SCOPE]
    if args.perturb:
        try:
            i, j = (int(x) - 1 for x in args.perturb.split(","))
        except ValueError:
            raise UsageError("--perturb takes two 1-based indices, e.g. 1,2")
        systems = [checks.perturbed_system(rs.kind, i, j) for rs in systems]
    cap = min(cfg.orbit_cap, 10**5)
    results = []
    for rs in systems:
        if not rs.kind.crystallographic:
            raise UsageError("verify covers crystallographic types; use h2 for H2")
        results.extend(checks.run_checks(rs, cfg.seed, cap))
    failed = [r for r in results if not r.ok]
    rows = [{"status": "PASS" if r.ok else "FAIL", "type": r.system, "check": r.check, "detail": r.detail}
            for r in results]
    out = render(rows, ["status", "type", "check", "detail"], cfg.fmt)
    if cfg.fmt == "table":
        out += f"\n{len(results) - len(failed)} passed, {len(failed)} failed"
    return out, 1 if failed else 0


# argument parsing ------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--kind", help="root system family (A-G) or H2")
    p.add_argument("--rank", type=int)
    p.add_argument("--max-degree", type=int, default=MAX_DEGREE)
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV),
                   help=f"disk cache for orbit images (default ${CACHE_ENV})")
    p.add_argument("--allow-large", action="store_true", help="permit E7 and E8")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--orbit-cap", type=int, default=STREAM_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="weylexp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", parents=[common], help="list a Weyl orbit")
    p.add_argument("family")
    p.add_argument("rank_pos", metavar="rank", type=int)
    p.add_argument("weight", help="omega-coordinates, e.g. 1,0 or tau,-1")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("phi", parents=[common], help="phi^(i) of fundamental orbit sums")
    p.add_argument("--weight")
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("dynkin", parents=[common], help="Dynkin indices of fundamental orbits")
    p.set_defaults(func=cmd_dynkin)

    p = sub.add_parser("exponents", parents=[common], help="exponents tau_i and torsion bounds")
    p.add_argument("--probe-basis", action="store_true",
                   help="also report tau_i after a seeded random change of basis")
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("torsion-bounds", parents=[common], help="torsion annihilators")
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("h2", parents=[common], help="second exponent of H2 over Z[tau]")
    p.set_defaults(func=cmd_h2)

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--perturb", metavar="I,J", help="flip the sign of Cartan entry (I,J) first")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", parents=[common], help="full exponent table")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig(max_degree=args.max_degree, fmt=args.format, cache_dir=args.cache_dir,
                        orbit_cap=args.orbit_cap, allow_large=args.allow_large,
                        jobs=args.jobs, seed=args.seed)
        if cfg.cache_dir:
            os.environ[CACHE_ENV] = cfg.cache_dir
        result = args.func(args, cfg)
    except (UsageError, ValueError) as exc:
        print(f"weylexp: error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, OrbitCapExceeded) as exc:
        print(f"weylexp: check failed: {exc}", file=sys.stderr)
        return 1
    out, code = result if isinstance(result, tuple) else (result, 0)
    print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
