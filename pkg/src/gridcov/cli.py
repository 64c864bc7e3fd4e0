"""Command-line front end: analyze, verify, build, collapse and the small model commands."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import assembly, homology, morse
from .cellcomplex import SCHEMA_VERSION, euler_characteristic
from .errors import DimensionUnsupported, GridCovError, InputError, ResourceLimit
from .griddomain import (
    GridDomain, check_area_lemma, crossings, domain_summary, parse_domain, patrol_region,
    random_domain, serialize_domain,
)
from .interval import interval_model
from .permutahedron import k_skeleton, skel1, subdivide_and_expand

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3
TORSION_CELL_CAP = homology.DEFAULT_TORSION_CAP


@dataclass
class RunConfig:
    command: str
    domain: Optional[str] = None
    mode: str = "full"
    threads: int = 1
    max_cells: int = assembly.DEFAULT_MAX_CELLS
    seed: int = 0
    fmt: str = "json"
    output: Optional[str] = None

    def __post_init__(self):
        if self.threads < 1:
            raise InputError("threads must be at least 1")
        if self.max_cells < 1:
            raise InputError("max-cells must be positive")


# -- helpers --------------------------------------------------------------------


def load_domain(path: str) -> GridDomain:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_domain(text, name=Path(path).stem if path != "-" else "stdin")


def domain_report(g: GridDomain) -> dict:
    s = domain_summary(g)
    q = patrol_region(g)
    cs = crossings(q)
    out = {
        "domain": {"name": g.name, **s.to_dict()},
        "patrol": {
            "K": q.K,
            "face_counts": q.face_counts(),
            "euler": q.euler(),
            "crossings": {str(k): v for k, v in cs.histogram().items()},
            "degenerate_crossings": cs.histogram().get(1, 0),
        },
    }
    if g.dim == 2:
        out["lemma"] = check_area_lemma(s, cs, q).to_dict()
    else:
        out["lemma"] = None
    predicted = {"conjecture": g.dim != 2}
    if g.A >= 2:
        predicted["euler"] = assembly.predicted_euler(s)
        if g.dim == 2:
            predicted.update(assembly.predicted_cell_counts(s, cs, q).to_dict())
    out["predicted"] = predicted
    return out


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    else:
        yield prefix[:-1], obj


def emit(report: dict, cfg: RunConfig):
    report = {"schema_version": SCHEMA_VERSION, **report}
    if cfg.fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = "".join(f"{k}: {json.dumps(v)}\n" for k, v in _flatten(report))
    if cfg.output and cfg.command not in ("build", "random"):
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------


def cmd_analyze(cfg: RunConfig) -> int:
    g = load_domain(cfg.domain)
    rep = domain_report(g)
    emit(rep, cfg)
    lemma = rep["lemma"]
    return EXIT_OK if lemma is None or lemma["pass"] else EXIT_FAIL


def _build(g: GridDomain, cfg: RunConfig):
    return assembly.build_covering_complex(
        g, mode=cfg.mode, threads=cfg.threads, max_cells=cfg.max_cells
    )


def cmd_verify(cfg: RunConfig) -> int:
    g = load_domain(cfg.domain)
    if g.A < 2:
        raise InputError(f"need at least 2 plaques, got {g.A}")
    rep = domain_report(g)
    s = domain_summary(g)
    predicted_chi = assembly.predicted_euler(s)
    predicted = None
    if g.dim == 2:
        q = patrol_region(g)
        predicted = assembly.predicted_cell_counts(s, crossings(q), q)
    checks = {}
    if cfg.mode == "census":
        built, mult = _build(g, cfg)
    else:
        cx = _build(g, cfg)
        built, mult = cx.count_report(), cx.multiplicities
        checks["boundary_squared_zero"] = homology.boundary_squared_zero(cx)
        checks["built_euler_is_alternating_sum"] = euler_characteristic(cx) == built.euler
        rep["homology"] = _homology_checks(cx, g, checks)
        if g.dim == 2:
            rep["morse"] = _morse_checks(cx, checks, rep["homology"].get("betti"))
    cmp = assembly.compare_counts(built, predicted, predicted_chi, g.dim)
    checks["residuals_zero"] = cmp.passed
    checks["multiplicities"] = mult.ok
    rep["built"] = built.to_dict()
    rep["residuals"] = cmp.to_dict()
    rep["multiplicities"] = mult.to_dict()
    rep["mode"] = cfg.mode
    rep["checks"] = checks
    rep["pass"] = all(checks.values())
    emit(rep, cfg)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def _homology_checks(cx, g, checks) -> dict:
    out = {}
    try:
        b = homology.betti(cx)
    except ResourceLimit as exc:
        return {"betti": None, "skipped": str(exc)}
    out["betti"] = b
    if g.dim == 2:
        checks["b2_zero"] = len(b) < 3 or b[2] == 0
    if cx.total_cells() <= TORSION_CELL_CAP:
        torsion = homology.integral_h1_torsion(cx)
        out["h1_torsion"] = torsion
        checks["h1_torsion_free"] = not torsion
    else:
        out["h1_torsion"] = None
    return out


def _morse_checks(cx, checks, direct) -> dict:
    m = morse.build_matching(cx, strict=False)
    v = morse.verify_matching(cx, m)
    out = v.to_dict()
    out["provenance"] = m.provenance_counts()
    checks["matching_valid"] = v.valid
    checks["matching_acyclic"] = v.acyclic
    checks["matching_complete"] = v.complete
    if not (v.valid and v.acyclic):
        return out
    data = morse.morse_complex(cx, m)
    out.update(data.to_dict())
    try:
        sched = morse.free_collapse_schedule(cx, m)
        out["collapse"] = {"steps": len(sched), "rounds": sched.rounds,
                           "remainder": sched.remainder}
        checks["collapse_complete"] = True
    except morse.Stuck as exc:
        out["collapse"] = {"stuck": {"pairs": exc.remaining_pairs, "cells": exc.remaining_cells}}
        checks["collapse_complete"] = False
    if direct is not None:
        checks["morse_betti_matches"] = list(direct) == list(data.betti[: len(direct)])
    return out


def cmd_build(cfg: RunConfig) -> int:
    g = load_domain(cfg.domain)
    if cfg.mode == "census":
        built, mult = _build(g, cfg)
        emit({"built": built.to_dict(), "multiplicities": mult.to_dict()}, cfg)
        return EXIT_OK if mult.ok else EXIT_FAIL
    cx = _build(g, cfg)
    if cfg.output:
        path = Path(cfg.output)
        if path.suffix == ".json":
            path.write_text(cx.to_json(include_labels=True))
        else:
            path.write_bytes(cx.to_bytes())
    report = {
        "built": cx.count_report().to_dict(),
        "cells": cx.counts(),
        "by_kind": cx.count_by_kind(),
        "euler": euler_characteristic(cx),
        "multiplicities": cx.multiplicities.to_dict(),
    }
    emit(report, cfg)
    return EXIT_OK if cx.multiplicities.ok else EXIT_FAIL


def cmd_collapse(cfg: RunConfig) -> int:
    g = load_domain(cfg.domain)
    if g.dim != 2:
        raise DimensionUnsupported("collapse is implemented for 2D domains")
    cx = _build(g, cfg)
    m = morse.build_matching(cx, strict=False)
    v = morse.verify_matching(cx, m)
    report = {"matched": v.matched, "unmatched": v.unmatched, "valid": v.valid,
              "acyclic": v.acyclic, "complete": v.complete,
              "provenance": m.provenance_counts()}
    ok = v.ok
    if v.valid and v.acyclic:
        data = morse.morse_complex(cx, m)
        report["critical"] = {str(d): n for d, n in data.critical.items()}
        report["morse_betti"] = data.betti
        try:
            sched = morse.free_collapse_schedule(cx, m)
            report["collapse"] = {"steps": len(sched), "rounds": sched.rounds,
                                  "remainder": sched.remainder}
        except morse.Stuck as exc:
            report["collapse"] = {"stuck": {"pairs": exc.remaining_pairs,
                                            "cells": exc.remaining_cells}}
            ok = False
    emit(report, cfg)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_permutahedron(cfg: RunConfig, m: int, k: int, expand: bool) -> int:
    if m < 1:
        raise InputError("m must be positive")
    if not 0 <= k <= m - 1:
        raise InputError(f"need 0 <= k <= m-1 (m={m}, k={k})")
    lat = k_skeleton(m, k)
    cx = lat.to_complex()
    report = {"m": m, "k": k, "faces": {str(d): n for d, n in lat.counts().items()},
              "euler": lat.euler(), "betti": homology.betti(cx)}
    if expand:
        p = subdivide_and_expand(skel1(m))
        report["expanded"] = {"counts": p.counts(), "euler": p.euler()}
    emit(report, cfg)
    return EXIT_OK


def _parse_radius(text: str) -> Fraction:
    try:
        r = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"radius must be a rational like 1/4, got {text!r}") from None
    return r


def cmd_interval(cfg: RunConfig, n: int, r: str) -> int:
    emit(interval_model(n, _parse_radius(r)).to_dict(), cfg)
    return EXIT_OK


def cmd_random(cfg: RunConfig, A: int, g: int) -> int:
    dom = random_domain(A, g, cfg.seed)
    text = serialize_domain(dom, "ascii")
    if cfg.output:
        Path(cfg.output).write_text(text)
    if cfg.fmt == "json" and cfg.output:
        emit({"domain": domain_summary(dom).to_dict(), "seed": cfg.seed, "path": cfg.output}, cfg)
    elif cfg.fmt == "json":
        emit({"domain": domain_summary(dom).to_dict(), "seed": cfg.seed, "ascii": text}, cfg)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridcov", description="Covering configuration spaces of grid domains.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    common.add_argument("--output", "-o", help="write the report (or artifact) here")
    sub = p.add_subparsers(dest="command", required=True)

    def with_build(sp):
        sp.add_argument("domain", help="domain file (ASCII or JSON); '-' reads stdin")
        sp.add_argument("--mode", choices=("full", "census"), default="full")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $GRIDCOV_THREADS or 1)")
        sp.add_argument("--max-cells", type=int, default=assembly.DEFAULT_MAX_CELLS)
        return sp

    a = sub.add_parser("analyze", parents=[common], help="domain summary and predictions")
    a.add_argument("domain")
    with_build(sub.add_parser("verify", parents=[common], help="build and check all predictions"))
    with_build(sub.add_parser("build", parents=[common], help="build and serialize the complex"))
    with_build(sub.add_parser("collapse", parents=[common], help="matching and collapse report"))
    pm = sub.add_parser("permutahedron", parents=[common], help="k-skeleton of a permutahedron")
    pm.add_argument("--m", type=int, required=True, help="number of labels")
    pm.add_argument("--k", type=int, default=1)
    pm.add_argument("--expand", action="store_true", help="also report the expanded 1-skeleton")
    iv = sub.add_parser("interval", parents=[common], help="covering the unit interval")
    iv.add_argument("--n", type=int, required=True)
    iv.add_argument("--r", required=True, help="radius as a rational, e.g. 1/4")
    rd = sub.add_parser("random", parents=[common], help="random connected domain")
    rd.add_argument("--A", type=int, required=True)
    rd.add_argument("--g", type=int, default=0)
    rd.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads = args.threads if getattr(args, "threads", None) is not None \
            else assembly.default_threads()
        cfg = RunConfig(
            command=args.command,
            domain=getattr(args, "domain", None),
            mode=getattr(args, "mode", "full"),
            threads=threads,
            max_cells=getattr(args, "max_cells", assembly.DEFAULT_MAX_CELLS),
            seed=getattr(args, "seed", 0),
            fmt=args.fmt,
            output=args.output,
        )
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "collapse":
            return cmd_collapse(cfg)
        if args.command == "permutahedron":
            return cmd_permutahedron(cfg, args.m, args.k, args.expand)
        if args.command == "interval":
            return cmd_interval(cfg, args.n, args.r)
        return cmd_random(cfg, args.A, args.g)
    except ResourceLimit as exc:
        print(f"gridcov: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (InputError, DimensionUnsupported, ValueError) as exc:
        print(f"gridcov: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GridCovError as exc:
        print(f"gridcov: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
