"""Command-line surface: batch verifications emitting deterministic JSON reports.

Exit codes: 0 = pass, 1 = mathematical failure (a theorem-check mismatch or a
hypothesis gate), 2 = input error.  Reports go to stdout (or --out) and are
byte-for-byte reproducible; the human-readable comparison table prints on
stderr.  LAZARD_THREADS caps the per-degree parallelism of rank computations
(0 or unset = automatic).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

from .bch import bch_table, format_tree
from .corpus import GENERATORS as CORPUS_GENERATORS
from .corpus import corpus as corpus_generate
from .cohomology import ce_complex, cup_product, integral_profile, uct_reconcile
from .errors import InputError, LazardError
from .fileformat import SCHEMA, emit_algebra, parse_algebra, parse_chain, parse_module
from .lhs import main_theorem_check
from .liecore import solvable_chain, verify_pf_chain
from .modarith import PrimeContext

_CORPUS_RE = re.compile(r"^([a-z_]+)\s*(?:\(([^)]*)\))?$")


def _thread_count() -> int:
    raw = os.environ.get("LAZARD_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"LAZARD_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise InputError("LAZARD_THREADS must be >= 0")
    if n == 0:
        return min(4, os.cpu_count() or 1)
    return n


def _load_algebra(spec: str, p: int, k: int):
    if os.path.exists(spec):
        return parse_algebra(spec)
    m = _CORPUS_RE.match(spec.strip())
    if m and m.group(1) in CORPUS_GENERATORS:
        name, args = m.group(1), m.group(2)
        params = []
        if args:
            for piece in args.split(","):
                piece = piece.strip()
                if piece:
                    try:
                        params.append(int(piece))
                    except ValueError:
                        raise InputError(f"corpus parameter {piece!r} is not an integer")
        try:
            ctx = PrimeContext(p, k)
        except ValueError as exc:
            raise InputError(str(exc))
        return corpus_generate(name, params, ctx)
    return parse_algebra(spec)  # raises a precise InputError


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_betti(args) -> int:
    g = _load_algebra(args.algebra, args.p, args.k)
    module = None
    coeff = "trivial"
    if args.coeff and args.coeff != "trivial":
        module = parse_module(args.coeff, g.reduce_mod_p())
        coeff = args.coeff
    gbar = g.reduce_mod_p()
    cx = ce_complex(gbar, module)
    workers = _thread_count()
    degrees = list(range(gbar.rank + 1))
    if workers > 1 and len(degrees) > 2:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(cx.rank_of_d, degrees))
    numbers = cx.betti_numbers()
    doc = {
        "schema": SCHEMA,
        "command": "betti",
        "algebra": g.name or args.algebra,
        "p": g.ctx.p,
        "k": g.ctx.k,
        "coefficients": coeff,
        "betti": list(numbers),
        "euler": sum((-1) ** n * b for n, b in enumerate(numbers)),
        "torsion": [],
    }
    if args.integral:
        if module is not None:
            raise InputError("--integral supports trivial coefficients only")
        profile = integral_profile(g)
        doc["torsion"] = [list(h.torsion) for h in profile]
        doc["integral"] = [
            {"degree": h.degree, "free_rank": h.free_rank, "torsion_exponents": list(h.torsion)}
            for h in profile
        ]
        doc["uct_consistent"] = uct_reconcile(g)
    _emit(doc, args.out)
    return 0


def _cmd_compare(args) -> int:
    g = _load_algebra(args.algebra, args.p, args.k)
    report = main_theorem_check(g)
    doc = {
        "schema": SCHEMA,
        "command": "compare",
        "algebra": report.name,
        "p": report.p,
        "k": report.k,
        "columns": {
            "group": list(report.group_betti),
            "lie": list(report.lie_betti),
            "direct": list(report.direct_betti),
        },
        "degrees": [
            {"n": n, "group": a, "lie": b, "direct": c} for n, a, b, c in report.rows()
        ],
        "verdict": "pass" if report.passed else "fail",
    }
    _emit(doc, args.out)
    width = max(5, *(len(str(x)) for row in report.rows() for x in row))
    header = f"{'n':>3} {'group':>{width}} {'lie':>{width}} {'direct':>{width}}"
    print(header, file=sys.stderr)
    for n, a, b, c in report.rows():
        print(f"{n:>3} {a:>{width}} {b:>{width}} {c:>{width}}", file=sys.stderr)
    print(f"verdict: {doc['verdict']}", file=sys.stderr)
    return 0 if report.passed else 1


def _cmd_series(args) -> int:
    g = _load_algebra(args.algebra, args.p, args.k)
    chain = solvable_chain(g)
    doc = {
        "schema": SCHEMA,
        "command": "series",
        "algebra": g.name or args.algebra,
        "p": g.ctx.p,
        "k": g.ctx.k,
        "length": len(chain),
        "ideals": [[list(b) for b in sub.basis] for sub in chain.ideals],
        "generators": [list(t) for t in chain.generators],
    }
    status = 0
    if args.chain:
        filtration = parse_chain(args.chain, g)
        report = verify_pf_chain(g, filtration)
        if report.ok:
            doc["pf_check"] = {"ok": True, "horizon": filtration.horizon}
        else:
            doc["pf_check"] = {
                "ok": False,
                "condition": report.condition,
                "index": report.index,
                "witness": list(report.witness) if report.witness else None,
            }
            status = 1
    else:
        doc["pf_check"] = "witness not constructed"
    _emit(doc, args.out)
    return status


def _cmd_bch(args) -> int:
    try:
        ctx = PrimeContext(args.p, args.k)
    except ValueError as exc:
        raise InputError(str(exc))
    table = bch_table(ctx, args.degree)
    terms = []
    for d, level in enumerate(table.terms, start=1):
        for tree, c, res in level:
            terms.append(
                {
                    "hall_word": format_tree(tree, ("X", "Y")),
                    "degree": d,
                    "numerator": c.numerator,
                    "denominator": c.denominator,
                    "residue_mod_pk": res,
                }
            )
    doc = {
        "schema": SCHEMA,
        "command": "bch",
        "p": ctx.p,
        "k": ctx.k,
        "degree": args.degree,
        "terms": terms,
    }
    _emit(doc, args.out)
    return 0


def _cmd_cup(args) -> int:
    g = _load_algebra(args.algebra, args.p, args.k)
    gbar = g.reduce_mod_p()
    cx = ce_complex(gbar)
    m, n = args.deg1, args.deg2
    if not (0 <= m <= gbar.rank and 0 <= n <= gbar.rank):
        raise InputError(f"degrees must lie in [0, {gbar.rank}]")
    sm, sn = cx.cohomology(m), cx.cohomology(n)
    target_dim = cx.betti(m + n) if m + n <= gbar.rank else 0
    products = []
    for i, a in enumerate(sm.representatives):
        for j, b in enumerate(sn.representatives):
            cls = cup_product(cx, m, a, n, b)
            products.append({"left": i, "right": j, "class": list(cls)})
    doc = {
        "schema": SCHEMA,
        "command": "cup",
        "algebra": g.name or args.algebra,
        "p": g.ctx.p,
        "k": g.ctx.k,
        "deg1": m,
        "deg2": n,
        "h_deg1": [list(r) for r in sm.representatives],
        "h_deg2": [list(r) for r in sn.representatives],
        "target_dim": target_dim,
        "products": products,
    }
    _emit(doc, args.out)
    return 0


def _cmd_corpus(args) -> int:
    families = [
        {"name": "abelian", "params": "n", "description": "zero bracket on rank n"},
        {"name": "filiform", "params": "n", "description": "[e1, e_i] = e_(i+1), rank n, class n-1"},
        {
            "name": "heisenberg_gen",
            "params": "n",
            "description": "rank 2n+1 with [x_i, y_i] = z",
        },
        {"name": "solvable_px", "params": "", "description": "[t, x] = p.x, rank 2, needs k >= 2"},
        {
            "name": "ut",
            "params": "n",
            "description": "strictly upper-triangular n x n, rank n(n-1)/2, needs n-1 < p",
        },
    ]
    doc = {"schema": SCHEMA, "command": "corpus", "families": families}
    _emit(doc, args.out)
    return 0


def _cmd_emit(args) -> int:
    g = _load_algebra(args.algebra, args.p, args.k)
    _emit(emit_algebra(g), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lazard",
        description="Exact mod-p^k Lie algebra cohomology and the rank-one spectral recursion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--algebra", required=True, help="structure-constant file or corpus name(params)")
        sp.add_argument("--p", type=int, default=5, help="prime for corpus algebras (default 5)")
        sp.add_argument("--k", type=int, default=2, help="precision for corpus algebras (default 2)")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")

    sp = sub.add_parser("betti", help="Betti numbers over GF(p), optionally with integral data")
    common(sp)
    sp.add_argument("--coeff", default="trivial", help="'trivial' or a module file")
    sp.add_argument("--integral", action="store_true", help="add Smith-form cohomology over Z/p^k")
    sp.set_defaults(fn=_cmd_betti)

    sp = sub.add_parser("compare", help="group-side vs Lie-side vs direct Betti columns")
    common(sp)
    sp.set_defaults(fn=_cmd_compare)

    sp = sub.add_parser("series", help="rank-one splitting chain; verify a filtration if given")
    common(sp)
    sp.add_argument("--chain", help="filtration file to verify")
    sp.set_defaults(fn=_cmd_series)

    sp = sub.add_parser("bch", help="Baker-Campbell-Hausdorff table")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_bch)

    sp = sub.add_parser("cup", help="cup products between two cohomology degrees")
    common(sp)
    sp.add_argument("--deg1", type=int, required=True)
    sp.add_argument("--deg2", type=int, required=True)
    sp.set_defaults(fn=_cmd_cup)

    sp = sub.add_parser("corpus", help="list the named algebra families")
    sp.add_argument("--list", action="store_true", default=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_corpus)

    sp = sub.add_parser("emit", help="re-emit an algebra in the canonical file format")
    common(sp)
    sp.set_defaults(fn=_cmd_emit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except LazardError as exc:
        print(f"mathematical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
