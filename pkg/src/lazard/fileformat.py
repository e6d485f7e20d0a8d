"""Structure-constant JSON files and the other on-disk schemas.

One format serves both GF(p) and Z/p^k inputs: the header carries p and k,
and each bracket record {i, j, m, c} contributes c.e_m to [e_i, e_j] with
1 <= i < j <= rank.  Antisymmetry is implicit: only i < j may be stored.
Parsing validates everything, Jacobi included, and reports the offending
record index on failure.
"""

from __future__ import annotations

import json
import os

from .errors import InputError, JacobiError
from .liecore import FiltrationChain, LieAlgebra, Submodule, validate
from .cohomology import LieModule
from .modarith import PrimeContext

SCHEMA = 1


def _context(doc, source):
    try:
        p = int(doc["p"])
        k = int(doc.get("k", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{source}: missing or malformed p/k header") from exc
    try:
        return PrimeContext(p, k)
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from exc


def parse_algebra_text(text: str, source: str = "<text>") -> LieAlgebra:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top level must be an object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise InputError(f"{source}: unsupported schema {doc.get('schema')!r}")
    ctx = _context(doc, source)
    try:
        rank = int(doc["rank"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{source}: missing or malformed rank") from exc
    if rank < 0:
        raise InputError(f"{source}: rank must be >= 0")
    sc: dict = {}
    seen = set()
    for t, rec in enumerate(doc.get("brackets", [])):
        where = f"{source}: brackets[{t}]"
        if not isinstance(rec, dict):
            raise InputError(f"{where}: record must be an object")
        try:
            i, j, m, c = int(rec["i"]), int(rec["j"]), int(rec["m"]), int(rec["c"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{where}: needs integer fields i, j, m, c") from exc
        if not (1 <= i < j <= rank):
            raise InputError(f"{where}: requires 1 <= i < j <= rank, got i={i}, j={j}")
        if not (1 <= m <= rank):
            raise InputError(f"{where}: target index m={m} out of range")
        if not (0 <= c < ctx.modulus):
            raise InputError(f"{where}: coefficient {c} outside [0, p^k)")
        if (i, j, m) in seen:
            raise InputError(f"{where}: duplicate record for (i={i}, j={j}, m={m})")
        seen.add((i, j, m))
        vec = sc.setdefault((i - 1, j - 1), [0] * rank)
        vec[m - 1] = c
    g = LieAlgebra(ctx, rank, {key: tuple(v) for key, v in sc.items()}, name=str(doc.get("name", "")))
    try:
        validate(g)
    except JacobiError as exc:
        raise InputError(f"{source}: {exc}") from exc
    return g


def parse_algebra(path_or_text: str) -> LieAlgebra:
    """Parse a structure-constant document from a path or a raw JSON string."""
    if os.path.exists(path_or_text):
        with open(path_or_text, "r", encoding="utf-8") as fh:
            return parse_algebra_text(fh.read(), source=path_or_text)
    stripped = path_or_text.lstrip()
    if stripped.startswith("{"):
        return parse_algebra_text(path_or_text)
    raise InputError(f"no such file: {path_or_text}")


def emit_algebra(g: LieAlgebra) -> dict:
    brackets = []
    for (i, j) in sorted(g.sc):
        for m, c in enumerate(g.sc[(i, j)]):
            if c:
                brackets.append({"i": i + 1, "j": j + 1, "m": m + 1, "c": c})
    doc = {
        "schema": SCHEMA,
        "p": g.ctx.p,
        "k": g.ctx.k,
        "rank": g.rank,
        "brackets": brackets,
    }
    if g.name:
        doc["name"] = g.name
    return doc


def parse_module(path: str, g: LieAlgebra) -> LieModule:
    """Coefficient-module file: {"schema": 1, "dim": d, "action": [r matrices]}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read module file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc.msg}") from exc
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise InputError(f"{path}: unsupported schema")
    try:
        dim = int(doc["dim"])
        action = doc["action"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: needs dim and action") from exc
    if len(action) != g.rank:
        raise InputError(f"{path}: expected {g.rank} action matrices, got {len(action)}")
    return LieModule(g.ctx, dim, action)


def parse_chain(path: str, g: LieAlgebra) -> FiltrationChain:
    """Filtration file: {"schema": 1, "ideals": [[vector, ...], ...]}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read chain file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc.msg}") from exc
    ideals = []
    for t, gens in enumerate(doc.get("ideals", [])):
        for v in gens:
            if len(v) != g.rank:
                raise InputError(f"{path}: ideals[{t}] has a vector of length {len(v)} != rank {g.rank}")
        ideals.append(Submodule.from_generators(g, gens))
    if not ideals:
        raise InputError(f"{path}: chain needs at least one ideal")
    return FiltrationChain(tuple(ideals))
