"""Command-line entry point: ``hermskew <subcommand> ...``.

Every subcommand prints one JSON document carrying ``schema_version``.  Exit
status is 0 on success, 1 when a computed invariant fails and 2 on usage
errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import cliques, geometry, perms, spread
from .field import FieldError, build_field, field_for_q, field_info
from .graph import GraphError, SkewGraph, build_skew_graph

SCHEMA_VERSION = 1
JOBS_ENV = "HERMSKEW_JOBS"
LONG_Q = 4

log = logging.getLogger("hermskew")


class UsageError(Exception):
    pass


class InvariantFailure(Exception):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


def _modulus(text):
    if text is None:
        return None
    return tuple(int(x) for x in text.replace(" ", "").split(","))


def _triple(text):
    try:
        vs = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected v0,v1,v2, got {text!r}")
    if len(vs) != 3:
        raise argparse.ArgumentTypeError("expected exactly three vertices")
    return vs


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _setup(q, modulus=None):
    F = field_for_q(q, _modulus(modulus))
    table = geometry.enumerate_lines(F)
    return F, table


def _emit(doc, fmt="json", out=None):
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2) if fmt == "json" else doc.pop("_csv")
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _hist_csv(hist) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "count"])
    for k, v in sorted(hist.items(), key=lambda kv: int(kv[0])):
        w.writerow([k, v])
    return buf.getvalue()


def _require_long(args, what):
    if not args.yes_long:
        raise UsageError(f"{what} is a long run; pass --yes-long to start it")


# -- subcommands --

def cmd_field_info(args):
    F = build_field(args.p, args.e, _modulus(args.modulus))
    return {"command": "field-info", **field_info(F)}


def cmd_lines(args):
    F, table = _setup(args.q, args.modulus)
    recs = [table.describe(i) for i in range(len(table))]
    doc = {"command": "lines", "q": args.q, "count": len(recs), "lines": recs}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "family", "i", "j", "k", "row0", "row1"])
        for r in recs:
            w.writerow([r["index"], r["family"], r.get("i"), r.get("j"), r.get("k", ""),
                        " ".join(r["basis_str"][0]), " ".join(r["basis_str"][1])])
        doc["_csv"] = buf.getvalue()
    return doc


def cmd_graph(args):
    F, table = _setup(args.q, args.modulus)
    g = build_skew_graph(table)
    if args.format == "dimacs":
        text = g.to_dimacs()
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return None
    return {"command": "graph", "q": args.q, **g.to_json()}


def _load_graph(args):
    if args.dimacs:
        if args.q is not None:
            raise UsageError("give either --q or --dimacs, not both")
        return None, None, SkewGraph.read_dimacs(args.dimacs)
    if args.q is None:
        raise UsageError("one of --q or --dimacs is required")
    F, table = _setup(args.q, args.modulus)
    return F, table, build_skew_graph(table)


def cmd_census(args):
    if args.algorithm == "bk-orbits":
        if args.dimacs:
            return _orbit_census_dimacs(args)
        return cmd_orbit_census(args)
    if args.group:
        raise UsageError("--group only applies to --algorithm bk-orbits")
    F, table, g = _load_graph(args)
    if args.q is not None and args.q >= LONG_Q:
        _require_long(args, f"a full census at q={args.q}")
    t0 = time.perf_counter()
    res = cliques.census(g, jobs=args.jobs, emit_path=args.emit_cliques, checkpoint=args.checkpoint,
                         backend=args.backend)
    doc = {"command": "census", "algorithm": "bk", "q": args.q, "n": g.n, **res.to_json(),
           "jobs": args.jobs, "backend": args.backend or cliques.default_backend(),
           "seconds": round(time.perf_counter() - t0, 3)}
    if args.format == "csv":
        doc["_csv"] = _hist_csv(res.histogram)
    return doc


def _orbit_census_dimacs(args):
    g = SkewGraph.read_dimacs(args.dimacs)
    group = perms.read_perm_file(args.group) if args.group else [perms.identity(g.n)]
    elements = perms.closure(group)
    res = cliques.bk_orbits(g, stab=elements, orbit_pivot=args.orbit_pivot, max_nodes=args.max_nodes, backend=args.backend)
    _write_cliques(args.emit_cliques, res.reps)
    doc = {"command": "census", "algorithm": "bk-orbits", "n": g.n, "group_order": len(elements),
           "representatives": len(res.reps), **res.to_json()}
    if args.format == "csv":
        doc["_csv"] = _hist_csv(res.histogram)
    return doc


def _write_cliques(path, cl):
    if path:
        with open(path, "w") as f:
            for c in cl:
                f.write(" ".join(map(str, c)) + "\n")


def _generators(args, F, table):
    if getattr(args, "group", None):
        gens = perms.read_perm_file(args.group)
        if any(len(p) != len(table) for p in gens):
            raise UsageError(f"permutations in {args.group} must have degree {len(table)}")
        return gens
    return perms.builtin_generators(F, table)


def _stabilizer(args, F, table, g, base):
    gens = _generators(args, F, table)
    for p in gens:
        if not perms.preserves_adjacency(p, g):
            raise InvariantFailure("a generator does not preserve the skew graph")
    chain = perms.stabilizer_chain(gens, base)
    triples = perms.count_ordered_skew_triples(g)
    info = {
        "base": list(base),
        "group_order": chain.group_order,
        "base_orbits": [len(o) for o in chain.orbits],
        "stabilizer_order": len(chain.stabilizer),
        "ordered_skew_triples": triples,
        "transitive": chain.base_orbit_size == triples,
        "orbit_fraction": chain.base_orbit_size / triples if triples else 1.0,
    }
    if not info["transitive"]:
        log.warning("generators reach %d of %d ordered skew triples; continuing with this subgroup",
                    chain.base_orbit_size, triples)
    return chain.stabilizer, info


def cmd_stabilizer(args):
    F, table = _setup(args.q, args.modulus)
    g = build_skew_graph(table)
    base = args.base or geometry.initial_triple(args.q)
    if not g.is_clique(base):
        raise UsageError(f"base {base} is not a skew triple")
    stab, info = _stabilizer(args, F, table, g, base)
    if args.out:
        perms.write_perm_file(args.out, stab)
    return {"command": "stabilizer", "q": args.q, **info, "out": args.out}


def cmd_orbit_census(args):
    if args.q is None:
        raise UsageError("--q is required")
    if args.q >= LONG_Q and not args.max_nodes:
        _require_long(args, f"an orbit census at q={args.q}")
    F, table = _setup(args.q, args.modulus)
    g = build_skew_graph(table)
    base = geometry.initial_triple(args.q)
    stab, info = _stabilizer(args, F, table, g, base)

    ckpt = cliques.Checkpoint(args.checkpoint) if args.checkpoint else None
    reps_file = open(args.emit_cliques, "a" if ckpt else "w") if args.emit_cliques else None
    bad = []
    emitted = [0]

    def sink(c):
        emitted[0] += 1
        if not g.is_maximal_clique(c):
            bad.append(c)
        if reps_file:
            reps_file.write(" ".join(map(str, c)) + "\n")

    t0 = time.perf_counter()
    try:
        res = cliques.bk_orbits(g, base, stab=stab, sink=sink, orbit_pivot=args.orbit_pivot,
                                max_nodes=args.max_nodes, backend=args.backend,
                                branch_done=ckpt.record if ckpt else None,
                                skip_branches=ckpt.done if ckpt else (), keep_reps=False)
    finally:
        if reps_file:
            reps_file.close()
    hist = dict(res.histogram)
    if ckpt:
        # completed branches only, including those from earlier runs
        hist = dict(sorted(ckpt.histogram.items()))
    doc = {
        "command": "orbit-census",
        "q": args.q,
        "stabilizer": info,
        "orbit_pivot": args.orbit_pivot,
        "representatives": emitted[0],
        "histogram": {str(k): v for k, v in sorted(hist.items())},
        "total": sum(hist.values()),
        "nodes": res.nodes,
        "completed": res.completed,
        "all_maximal": not bad,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    if args.format == "csv":
        doc["_csv"] = _hist_csv(hist)
    if bad:
        raise InvariantFailure(f"{len(bad)} emitted representatives are not maximal cliques", doc)
    return doc


def cmd_construct(args):
    F, table = _setup(args.q, args.modulus)
    g = build_skew_graph(table)
    stars = geometry.star_points(table)
    if args.all_quadrics:
        if args.q >= 3:
            _require_long(args, f"the all-quadrics census at q={args.q}")
        t0 = time.perf_counter()
        rep = spread.census_from_quadrics(args.q, table, g, stars)
        doc = {"command": "construct", "mode": "all-quadrics", **rep.to_json(),
               "lower_bound_per_config": spread.lower_bound_count(args.q),
               "seconds": round(time.perf_counter() - t0, 3)}
        if rep.jointly_extendable_pairs:
            raise InvariantFailure("two outputs of one configuration are jointly extendable", doc)
        return doc
    base = args.base or geometry.initial_triple(args.q)
    cfg = spread.quadric_through(*base, table)
    pairing = spread.star_chords(cfg, args.ruling, stars, table)
    opposite = cfg.surface_lines[1 - args.ruling]
    triple = tuple(args.triple) if args.triple else tuple(opposite[:3])
    npairs = len(pairing.pairs)
    signs = args.signs if args.signs is not None else "0" * npairs
    if len(signs) != npairs or set(signs) - {"0", "1"}:
        raise UsageError(f"--signs needs {npairs} binary digits")
    s = spread.build_large_skew_set(cfg, args.ruling, triple, signs, table, stars, pairing)
    maximal, steps = spread.extend_to_maximal(s, g)
    return {
        "command": "construct",
        "q": args.q,
        "base": list(base),
        "surface_lines": [list(x) for x in cfg.surface_lines],
        "chords": len(pairing.chords),
        "dual_pairs": [list(p) for p in pairing.pairs],
        "provenance": s.provenance(),
        "lines": s.lines,
        "size": len(s),
        "maximal_extension": maximal,
        "maximal_size": len(maximal),
        "extension_candidates": steps,
        "extension_unique": all(len(st) == 1 for st in steps),
    }


def run_verify(q, modulus=None, transitivity=True) -> dict:
    """All structural invariants for one q; keys map to {"passed": bool, ...}."""
    F, table = _setup(q, modulus)
    checks = {}
    checks["nu"] = {"passed": F.pow(F.nu, q + 1) == F.neg_one}
    checks["line_count"] = {"passed": len(table) == geometry.line_count(q), "value": len(table)}
    checks["lines_on_surface"] = {"passed": all(geometry.line_on_surface(L, F) for L in table.lines)}
    stars = geometry.star_points(table, check=False)
    checks["star_point_count"] = {"passed": len(stars) == geometry.star_point_count(q), "value": len(stars)}
    for name, res in geometry.verify_gq(table, stars).items():
        checks[name] = res
    g = build_skew_graph(table)
    degrees = {g.degree(v) for v in range(g.n)}
    checks["regular_degree"] = {"passed": degrees == {q**4}, "value": sorted(degrees)}
    checks["edge_count"] = {"passed": g.edge_count() == g.n * q**4 // 2, "value": g.edge_count()}
    if transitivity:
        gens = perms.builtin_generators(F, table)
        checks["generators_preserve_graph"] = {"passed": all(perms.preserves_adjacency(p, g) for p in gens)}
        chain = perms.stabilizer_chain(gens, geometry.initial_triple(q))
        triples = perms.count_ordered_skew_triples(g)
        checks["triple_transitivity"] = {"passed": chain.base_orbit_size == triples,
                                         "group_order": chain.group_order,
                                         "stabilizer_order": len(chain.stabilizer)}
    return checks


def cmd_verify(args):
    checks = run_verify(args.q, args.modulus, not args.skip_group)
    ok = all(c["passed"] for c in checks.values())
    doc = {"command": "verify", "q": args.q, "passed": ok, "checks": checks}
    if not ok:
        raise InvariantFailure("invariant check failed", doc)
    return doc


# -- parser --

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermskew", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    default_jobs = int(os.environ.get(JOBS_ENV, "1") or 1)

    def qarg(p, required=True):
        p.add_argument("--q", type=int, required=required)
        p.add_argument("--modulus", help="comma-separated coefficients of a primitive polynomial, constant term first")

    p = sub.add_parser("field-info", help="modulus, order of mu and nu for GF((p^e)^2)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--e", type=int, default=1)
    p.add_argument("--modulus")
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("lines", help="the enumerated lines of X")
    qarg(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_lines)

    p = sub.add_parser("graph", help="the skew graph G(X)")
    qarg(p)
    p.add_argument("--format", choices=["dimacs", "json"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph)

    def search_args(p):
        p.add_argument("--orbit-pivot", action="store_true",
                       help="take orbit representatives from P minus N(pivot) only")
        p.add_argument("--max-nodes", type=int, default=0, help="stop after this many search nodes")
        p.add_argument("--emit-cliques", metavar="FILE")
        p.add_argument("--checkpoint", metavar="FILE")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--backend", choices=["compiled", "python"])
        p.add_argument("--group", metavar="FILE", help="permutation file, one permutation per line")
        p.add_argument("--yes-long", action="store_true")

    p = sub.add_parser("census", help="histogram of maximal clique sizes")
    qarg(p, required=False)
    p.add_argument("--dimacs", metavar="FILE")
    p.add_argument("--algorithm", choices=["bk", "bk-orbits"], default="bk")
    p.add_argument("--jobs", type=_positive, default=default_jobs)
    search_args(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("stabilizer", help="ordered-triple stabilizer and transitivity check")
    qarg(p)
    p.add_argument("--base", type=_triple)
    p.add_argument("--group", metavar="FILE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stabilizer)

    p = sub.add_parser("orbit-census", help="orbit algorithm from the initial skew triple")
    qarg(p)
    search_args(p)
    p.set_defaults(func=cmd_orbit_census)

    p = sub.add_parser("construct", help="large skew sets from a quadric configuration")
    qarg(p)
    p.add_argument("--base", type=_triple)
    p.add_argument("--ruling", type=int, choices=[0, 1], default=0)
    p.add_argument("--triple", type=_triple, help="three surface lines of the opposite ruling")
    p.add_argument("--signs", help="one binary digit per dual pair")
    p.add_argument("--all-quadrics", action="store_true")
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--yes-long", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="structural invariant suite")
    qarg(p)
    p.add_argument("--skip-group", action="store_true", help="skip the automorphism group checks")
    p.set_defaults(func=cmd_verify)
    return parser


USAGE_ERRORS = (UsageError, FieldError, GraphError, spread.NotSkew, perms.NotSkewTriple,
                perms.DegreeMismatch, FileNotFoundError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    fmt = getattr(args, "format", "json")
    out = getattr(args, "out", None) if args.command != "stabilizer" else None
    try:
        doc = args.func(args)
    except USAGE_ERRORS as exc:
        print(f"hermskew {args.command}: {exc}", file=sys.stderr)
        return 2
    except InvariantFailure as exc:
        print(f"hermskew {args.command}: {exc}", file=sys.stderr)
        if exc.payload is not None:
            exc.payload.pop("_csv", None)
            _emit(exc.payload)
        return 1
    except (ValueError, ArithmeticError, MemoryError) as exc:
        print(f"hermskew {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if doc is not None:
        _emit(doc, fmt if fmt in ("json", "csv") else "json", out if args.command == "graph" else None)
    return 0


if __name__ == "__main__":
    sys.exit(main())
