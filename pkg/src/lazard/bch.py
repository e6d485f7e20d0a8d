"""Hall bases, the Baker-Campbell-Hausdorff table, and the truncated log/exp pair.

The BCH series Phi(X,Y) = log(exp X exp Y) is computed twice over Q: once by
the Dynkin formula (left-normed bracketings of words, weighted by inverse
factorials and the 1/degree projection factor) and once by direct expansion
of log of the product of truncated exponentials.  The two series must agree
degree by degree or the table build aborts.  The agreed Lie element is then
written in the classical Hall basis; through degree p-1 every denominator is
coprime to p, so the table reduces exactly mod p^k.

Group operations on nilpotent algebras of class < p evaluate the table on
concrete brackets; conjugation operators, the truncated logarithm
Psi(U) = sum_{i<p} (-1)^(i+1) (U-I)^i / i and its exponential companion give
the operator-level dictionary between the group and Lie sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    ClassTooLargeError,
    DegreeCapError,
    DimensionMismatchError,
    ExponentialNotExactError,
    NotNilpotentError,
    NotUnipotentError,
)
from .liecore import LieAlgebra, Submodule, nilpotency_class
from .modarith import ModMatrix, PrimeContext

# A free-algebra polynomial is {word: Fraction} with words as letter tuples.


def _padd(a: dict, b: dict, c=Fraction(1)) -> dict:
    out = dict(a)
    for w, v in b.items():
        nv = out.get(w, Fraction(0)) + c * v
        if nv:
            out[w] = nv
        else:
            out.pop(w, None)
    return out


def _pmul(a: dict, b: dict, maxdeg: int | None = None) -> dict:
    out: dict = {}
    for wa, va in a.items():
        for wb, vb in b.items():
            if maxdeg is not None and len(wa) + len(wb) > maxdeg:
                continue
            w = wa + wb
            nv = out.get(w, Fraction(0)) + va * vb
            if nv:
                out[w] = nv
            else:
                out.pop(w, None)
    return out


def _left_normed(word) -> dict:
    """Associative expansion of [[..[w_0,w_1],w_2]..,w_end]."""
    poly = {(word[0],): Fraction(1)}
    for letter in word[1:]:
        nxt: dict = {}
        for w, c in poly.items():
            for key, sign in ((w + (letter,), 1), ((letter,) + w, -1)):
                nv = nxt.get(key, Fraction(0)) + sign * c
                if nv:
                    nxt[key] = nv
                else:
                    nxt.pop(key, None)
        poly = nxt
    return poly


def _factorials(n):
    out = [1]
    for i in range(1, n + 1):
        out.append(out[-1] * i)
    return out


def log_exp_series(maxdeg: int) -> list[dict]:
    """Homogeneous parts of log(exp X exp Y) through maxdeg, direct expansion."""
    fact = _factorials(maxdeg)
    ex = {(): Fraction(1)}
    ey = {(): Fraction(1)}
    for i in range(1, maxdeg + 1):
        ex[(0,) * i] = Fraction(1, fact[i])
        ey[(1,) * i] = Fraction(1, fact[i])
    z = _pmul(ex, ey, maxdeg)
    z.pop((), None)  # z = exp(X)exp(Y) - 1
    out = {}
    power = {(): Fraction(1)}
    for n in range(1, maxdeg + 1):
        power = _pmul(power, z, maxdeg)
        out = _padd(out, power, Fraction((-1) ** (n + 1), n))
    parts = [dict() for _ in range(maxdeg + 1)]
    for w, c in out.items():
        parts[len(w)][w] = c
    return parts


def dynkin_series(maxdeg: int) -> list[dict]:
    """Homogeneous parts of Phi through maxdeg by the Dynkin formula.

    For each word w the weight sums (-1)^(n-1)/n over the splittings of w
    into n blocks of shape X^a Y^b, each block weighted 1/(a! b!); the word
    then contributes weight/|w| times its left-normed bracketing.
    """
    fact = _factorials(maxdeg)
    parts = [dict() for _ in range(maxdeg + 1)]
    for d in range(1, maxdeg + 1):
        for code in range(1 << d):
            word = tuple((code >> t) & 1 for t in range(d))
            # blocks[i] = list of (j, weight) with w[i:j] of shape X^a Y^b
            blocks = []
            for i in range(d):
                opts = []
                a = 0
                j = i
                while j < d and word[j] == 0:
                    j += 1
                    a += 1
                    opts.append((j, Fraction(1, fact[a])))
                b = 0
                base = j
                while j < d and word[j] == 1:
                    j += 1
                    b += 1
                    opts.append((j, Fraction(1, fact[a] * fact[b])))
                blocks.append(opts)
            # dp[i][n] = sum over splittings of w[:i] into n blocks
            dp = [dict() for _ in range(d + 1)]
            dp[0][0] = Fraction(1)
            for i in range(d):
                if not dp[i]:
                    continue
                for j, wgt in blocks[i]:
                    for n, val in dp[i].items():
                        dp[j][n + 1] = dp[j].get(n + 1, Fraction(0)) + val * wgt
            weight = Fraction(0)
            for n, val in dp[d].items():
                weight += Fraction((-1) ** (n - 1), n) * val
            if not weight:
                continue
            weight /= d
            for w2, c in _left_normed(word).items():
                nv = parts[d].get(w2, Fraction(0)) + weight * c
                if nv:
                    parts[d][w2] = nv
                else:
                    parts[d].pop(w2, None)
    return parts


# ---------------------------------------------------------------------------
# Hall bases


@dataclass(frozen=True)
class HallBasis:
    """Classical Hall set on m generators through degree maxdeg.

    Trees are nested tuples over leaf letters 0..m-1; a composite (u, v)
    belongs to the set iff u < v and v is a letter or v = (v1, v2) with
    v1 <= u, the order being degree-first then construction order.  Per-degree
    counts match Witt's necklace formula.
    """

    generators: int
    maxdeg: int
    elements: tuple  # elements[d-1] = tuple of trees of degree d


def _tree_degree(t) -> int:
    return 1 if isinstance(t, int) else _tree_degree(t[0]) + _tree_degree(t[1])


@lru_cache(maxsize=None)
def hall_basis(m: int, maxdeg: int) -> HallBasis:
    if m < 1 or maxdeg < 1:
        raise DimensionMismatchError("hall_basis needs m >= 1 and maxdeg >= 1")
    levels = [tuple(range(m))]
    order = {i: (1, i) for i in range(m)}
    for deg in range(2, maxdeg + 1):
        built = []
        for d1 in range(1, deg):
            d2 = deg - d1
            for u in levels[d1 - 1]:
                for v in levels[d2 - 1]:
                    if order[u] >= order[v]:
                        continue
                    if not isinstance(v, int) and order[v[0]] > order[u]:
                        continue
                    built.append((u, v))
        for t, tree in enumerate(built):
            order[tree] = (deg, t)
        levels.append(tuple(built))
    return HallBasis(m, maxdeg, tuple(levels))


def witt_dimension(m: int, n: int) -> int:
    """Necklace count (1/n) sum_{d | n} mu(d) m^(n/d)."""

    def mu(x):
        out, d = 1, 2
        while d * d <= x:
            if x % d == 0:
                x //= d
                if x % d == 0:
                    return 0
                out = -out
            d += 1
        if x > 1:
            out = -out
        return out

    total = sum(mu(d) * m ** (n // d) for d in range(1, n + 1) if n % d == 0)
    return total // n


def tree_expand(tree) -> dict:
    if isinstance(tree, int):
        return {(tree,): Fraction(1)}
    a = tree_expand(tree[0])
    b = tree_expand(tree[1])
    return _padd(_pmul(a, b), _pmul(b, a), Fraction(-1))


def format_tree(tree, names) -> str:
    if isinstance(tree, int):
        return names[tree]
    return f"[{format_tree(tree[0], names)},{format_tree(tree[1], names)}]"


# ---------------------------------------------------------------------------
# Lyndon machinery (internal coordinates for Lie elements)


@lru_cache(maxsize=None)
def _lyndon_words(m: int, d: int) -> tuple:
    words = []
    for code in range(m**d):
        w = []
        c = code
        for _ in range(d):
            w.append(c % m)
            c //= m
        w = tuple(w)
        if all(w < w[i:] for i in range(1, d)):
            words.append(w)
    return tuple(sorted(words))


@lru_cache(maxsize=None)
def _lyndon_tree(w) -> tuple | int:
    if len(w) == 1:
        return w[0]
    for i in range(1, len(w)):
        suf = w[i:]
        if all(suf < suf[j:] for j in range(1, len(suf))):
            return (_lyndon_tree(w[:i]), _lyndon_tree(suf))
    raise ValueError(f"not a Lyndon word: {w}")


@lru_cache(maxsize=None)
def _lyndon_expansion(w) -> tuple:
    return tuple(sorted(tree_expand(_lyndon_tree(w)).items()))


def lyndon_coordinates(poly: dict, m: int, d: int) -> dict:
    """Coordinates of a homogeneous Lie element in the Lyndon basis.

    The standard bracketing of a Lyndon word is that word plus lexicographically
    larger ones, so a greedy sweep in increasing order extracts coordinates and
    certifies Lie-ness: a nonzero remainder raises.
    """
    residue = dict(poly)
    coords = {}
    for w in _lyndon_words(m, d):
        c = residue.get(w, Fraction(0))
        if c:
            coords[w] = c
            for key, val in _lyndon_expansion(w):
                nv = residue.get(key, Fraction(0)) - c * val
                if nv:
                    residue[key] = nv
                else:
                    residue.pop(key, None)
    if residue:
        raise ValueError("polynomial is not a Lie element")
    return coords


def _solve_fractions(matrix, rhs):
    """Gaussian elimination over Q; matrix is a list of rows."""
    n = len(matrix)
    m = len(matrix[0]) if n else 0
    a = [row[:] + [r] for row, r in zip(matrix, rhs)]
    piv = []
    r = 0
    for c in range(m):
        sel = next((i for i in range(r, n) if a[i][c]), None)
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if a[i][m]:
            raise ValueError("inconsistent system over Q")
    x = [Fraction(0)] * m
    for t, c in enumerate(piv):
        x[c] = a[t][m]
    return x


# ---------------------------------------------------------------------------
# The BCH table


@dataclass(frozen=True)
class BCHTable:
    """Hall-basis coefficients of Phi(X,Y) through maxdeg <= p-1.

    terms[d-1] lists (tree, Fraction, residue mod p^k); the degree-1 part is
    exactly X + Y and every denominator is coprime to p.
    """

    ctx: PrimeContext
    maxdeg: int
    terms: tuple

    def all_terms(self):
        for level in self.terms:
            yield from level


@lru_cache(maxsize=None)
def _rational_bch(maxdeg: int) -> tuple:
    """((tree, coefficient) per degree) of Phi, cross-checked by two routes."""
    dyn = dynkin_series(maxdeg)
    ora = log_exp_series(maxdeg)
    for d in range(1, maxdeg + 1):
        if dyn[d] != ora[d]:
            raise AssertionError(f"BCH generation mismatch at degree {d}; build aborted")
    basis = hall_basis(2, maxdeg)
    table = []
    for d in range(1, maxdeg + 1):
        trees = basis.elements[d - 1]
        target = lyndon_coordinates(dyn[d], 2, d)
        lws = _lyndon_words(2, d)
        cols = []
        for tree in trees:
            coords = lyndon_coordinates(dict(tree_expand(tree)), 2, d)
            cols.append([coords.get(w, Fraction(0)) for w in lws])
        matrix = [[cols[j][i] for j in range(len(trees))] for i in range(len(lws))]
        rhs = [target.get(w, Fraction(0)) for w in lws]
        sol = _solve_fractions(matrix, rhs)
        table.append(tuple((tree, c) for tree, c in zip(trees, sol) if c))
    return tuple(table)


@lru_cache(maxsize=None)
def bch_table(ctx: PrimeContext, maxdeg: int) -> BCHTable:
    """The BCH table over Z/p^k through maxdeg; errors past degree p-1."""
    if maxdeg > ctx.p - 1:
        raise DegreeCapError(f"degree {maxdeg} exceeds p-1 = {ctx.p - 1}: 1/p enters the series")
    if maxdeg < 1:
        raise DimensionMismatchError("maxdeg must be >= 1")
    rational = _rational_bch(maxdeg)
    pk = ctx.modulus
    levels = []
    for d, level in enumerate(rational, start=1):
        out = []
        for tree, c in level:
            if c.denominator % ctx.p == 0:
                raise DegreeCapError(f"denominator {c.denominator} not a unit mod {ctx.p} at degree {d}")
            res = c.numerator * ctx.unit_inverse(c.denominator) % pk
            out.append((tree, c, res))
        levels.append(tuple(out))
    return BCHTable(ctx, maxdeg, tuple(levels))


# ---------------------------------------------------------------------------
# Group operations through the table


def _eval_tree(g: LieAlgebra, tree, x, y):
    if isinstance(tree, int):
        return x if tree == 0 else y
    return g.bracket(_eval_tree(g, tree[0], x, y), _eval_tree(g, tree[1], x, y))


def _group_class(g: LieAlgebra) -> int:
    cls = nilpotency_class(g)
    if cls is None or cls >= g.ctx.p:
        raise ClassTooLargeError(
            f"nilpotency class at precision {g.ctx.k} is >= p = {g.ctx.p}; group law undefined"
        )
    return cls


def group_mul(g: LieAlgebra, x, y) -> tuple:
    """Group product Phi(x, y) on a nilpotent algebra of class < p."""
    cls = max(_group_class(g), 1)
    table = bch_table(g.ctx, cls)
    pk = g.ctx.modulus
    out = [0] * g.rank
    for tree, _, res in table.all_terms():
        vec = _eval_tree(g, tree, x, y)
        if any(vec):
            for t, v in enumerate(vec):
                out[t] = (out[t] + res * v) % pk
    return tuple(out)


def group_inverse(g: LieAlgebra, x) -> tuple:
    pk = g.ctx.modulus
    return tuple(-v % pk for v in x)


def group_pow(g: LieAlgebra, x, lam: int) -> tuple:
    """x^lam = lam.x in Lazard coordinates (one-parameter subgroup)."""
    _group_class(g)
    pk = g.ctx.modulus
    return tuple(v * lam % pk for v in x)


# ---------------------------------------------------------------------------
# Linear operators: conjugation, truncated log / exp


@dataclass(frozen=True)
class LinearOperator:
    """Square matrix over Z/p^k acting on column vectors."""

    ctx: PrimeContext
    matrix: ModMatrix

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols:
            raise DimensionMismatchError("operators are square")

    @property
    def dim(self) -> int:
        return self.matrix.rows

    @classmethod
    def identity(cls, ctx, n):
        return cls(ctx, ModMatrix.identity(n))

    def compose(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator(self.ctx, self.matrix.matmul(other.matrix, self.ctx.modulus))

    def minus_identity(self) -> ModMatrix:
        return self.matrix.add(ModMatrix.identity(self.dim).scale(-1, self.ctx.modulus), self.ctx.modulus)

    def apply(self, vec):
        return self.matrix.apply(vec, self.ctx.modulus)

    def __eq__(self, other):
        return isinstance(other, LinearOperator) and self.ctx == other.ctx and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.ctx, self.matrix))


def _nilpotency_index(mat: ModMatrix, ctx: PrimeContext, bound: int):
    """Smallest c <= bound with mat^c = 0, else None."""
    if mat.is_zero():
        return 1
    power = mat
    c = 1
    while c < bound:
        power = power.matmul(mat, ctx.modulus)
        c += 1
        if power.is_zero():
            return c
    return None


def _exp_nilpotent(mat: ModMatrix, ctx: PrimeContext) -> ModMatrix:
    # requires mat^p = 0; every surviving term has a unit denominator
    pk = ctx.modulus
    out = ModMatrix.identity(mat.rows)
    power = ModMatrix.identity(mat.rows)
    fact = 1
    for i in range(1, ctx.p):
        power = power.matmul(mat, pk)
        if power.is_zero():
            break
        fact *= i
        out = out.add(power.scale(ctx.unit_inverse(fact), pk), pk)
    return out


def conjugation_operator(g: LieAlgebra, sigma, h: Submodule) -> LinearOperator:
    """C_sigma = exp(ad_sigma) restricted to an invariant submodule.

    Requires ad_sigma to preserve h and its restriction A to satisfy A^p = 0
    at this precision, so the exponential has only unit denominators.  The
    result is invertible and is the identity when sigma is central.
    """
    pk = g.ctx.modulus
    cols = []
    for b in h.basis:
        w = g.bracket(sigma, b)
        try:
            cols.append(h.coordinates(w))
        except DimensionMismatchError:
            raise ExponentialNotExactError("ad_sigma does not preserve the submodule") from None
    m = h.dim()
    ent = {}
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            if v:
                ent[(i, j)] = v
    ad = ModMatrix(m, m, ent)
    if _nilpotency_index(ad, g.ctx, g.ctx.p) is None:
        raise ExponentialNotExactError("ad_sigma^p != 0 at this precision; exponential not exact")
    return LinearOperator(g.ctx, _exp_nilpotent(ad, g.ctx))


def truncated_log(op: LinearOperator) -> LinearOperator:
    """Psi(U) = sum_{i=1}^{p-1} (-1)^(i+1) (U - I)^i / i for unipotent U.

    Requires (U - I)^p = 0 exactly; then truncated_exp inverts it exactly.
    """
    ctx = op.ctx
    pk = ctx.modulus
    b = op.minus_identity()
    if _nilpotency_index(b, ctx, ctx.p) is None:
        raise NotUnipotentError("(U - I)^p != 0: operator is not unipotent of class <= p")
    out = ModMatrix.zero(op.dim, op.dim)
    power = ModMatrix.identity(op.dim)
    for i in range(1, ctx.p):
        power = power.matmul(b, pk)
        if power.is_zero():
            break
        coef = ctx.unit_inverse(i) if i % 2 else -ctx.unit_inverse(i) % pk
        out = out.add(power.scale(coef, pk), pk)
    return LinearOperator(ctx, out)


def truncated_exp(op: LinearOperator) -> LinearOperator:
    """exp(N) = sum_{i=0}^{p-1} N^i / i! for nilpotent N with N^p = 0."""
    ctx = op.ctx
    if _nilpotency_index(op.matrix, ctx, ctx.p) is None:
        raise NotNilpotentError("N^p != 0: operator is not nilpotent of index <= p")
    return LinearOperator(ctx, _exp_nilpotent(op.matrix, ctx))
