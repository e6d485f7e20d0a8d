"""Named structure-constant families used throughout the test corpus.

All generators return validated LieAlgebra instances over the requested
Z/p^k.  Parameters out of range (for example an upper-triangular algebra
whose class reaches p) raise InputError.
"""

from __future__ import annotations

from .errors import InputError
from .liecore import LieAlgebra, jacobi_violation
from .modarith import PrimeContext


def abelian(n: int, ctx: PrimeContext) -> LieAlgebra:
    """Zero bracket on rank n."""
    if n < 0:
        raise InputError("abelian(n) needs n >= 0")
    return LieAlgebra(ctx, n, {}, name=f"abelian({n})")


def heisenberg_gen(n: int, ctx: PrimeContext) -> LieAlgebra:
    """Generalized Heisenberg of rank 2n+1: [x_i, y_i] = z, all else zero.

    Basis order x_1..x_n, y_1..y_n, z.
    """
    if n < 1:
        raise InputError("heisenberg_gen(n) needs n >= 1")
    rank = 2 * n + 1
    z = rank - 1
    sc = {}
    for i in range(n):
        vec = [0] * rank
        vec[z] = 1
        sc[(i, n + i)] = tuple(vec)
    return LieAlgebra(ctx, rank, sc, name=f"heisenberg_gen({n})")


def filiform(n: int, ctx: PrimeContext) -> LieAlgebra:
    """Rank n with [e_1, e_i] = e_{i+1} for 2 <= i <= n-1; class n-1."""
    if n < 2:
        raise InputError("filiform(n) needs n >= 2")
    sc = {}
    for i in range(1, n - 1):
        vec = [0] * n
        vec[i + 1] = 1
        sc[(0, i)] = tuple(vec)
    return LieAlgebra(ctx, n, sc, name=f"filiform({n})")


def solvable_px(ctx: PrimeContext) -> LieAlgebra:
    """Rank 2 with [t, x] = p.x; needs k >= 2 for the bracket to survive."""
    if ctx.k < 2:
        raise InputError("solvable_px needs precision k >= 2")
    return LieAlgebra(ctx, 2, {(0, 1): (0, ctx.p)}, name="solvable_px")


def ut(n: int, ctx: PrimeContext) -> LieAlgebra:
    """Strictly upper-triangular n x n matrices; rank n(n-1)/2, class n-1.

    Basis E_{ab} for 1 <= a < b <= n in lexicographic order, with
    [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb.  Requires class n-1 < p.
    """
    if n < 2:
        raise InputError("ut(n) needs n >= 2")
    if n - 1 >= ctx.p:
        raise InputError(f"ut({n}) has class {n - 1} >= p = {ctx.p}")
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    index = {ab: t for t, ab in enumerate(pairs)}
    rank = len(pairs)
    pk = ctx.modulus
    sc = {}
    for s, (a, b) in enumerate(pairs):
        for t in range(s + 1, rank):
            c, d = pairs[t]
            vec = [0] * rank
            if b == c:
                vec[index[(a, d)]] += 1
            if d == a:
                vec[index[(c, b)]] -= 1
            vec = [x % pk for x in vec]
            if any(vec):
                sc[(s, t)] = tuple(vec)
    return LieAlgebra(ctx, rank, sc, name=f"ut({n})")


GENERATORS = {
    "abelian": (abelian, 1),
    "heisenberg_gen": (heisenberg_gen, 1),
    "filiform": (filiform, 1),
    "solvable_px": (solvable_px, 0),
    "ut": (ut, 1),
}


def corpus(name: str, params, ctx: PrimeContext) -> LieAlgebra:
    """Instantiate a named family; every generated algebra is validated."""
    if name not in GENERATORS:
        raise InputError(f"unknown corpus family {name!r}; known: {sorted(GENERATORS)}")
    fn, arity = GENERATORS[name]
    params = tuple(params)
    if len(params) != arity:
        raise InputError(f"{name} takes {arity} parameter(s), got {len(params)}")
    g = fn(*params, ctx) if arity else fn(ctx)
    bad = jacobi_violation(g)
    if bad is not None:  # families above are Jacobi-valid by construction
        raise InputError(f"corpus generator produced an invalid algebra: {bad}")
    return g


def corpus_names():
    return sorted(GENERATORS)
