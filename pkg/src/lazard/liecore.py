"""Finite-rank Lie algebras over Z/p^k by structure constants.

A LieAlgebra is the free module (Z/p^k)^r with a bracket given on basis pairs
e_i, e_j (i < j) and extended antisymmetrically and bilinearly.  Submodules
are kept in canonical Howell form so that membership, equality and subquotient
bookkeeping are decidable and deterministic.  On top of that sit derived
series, isolators (saturations), descending PF-style filtration checks and
the rank-one splitting chain used by the spectral-sequence recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    DimensionMismatchError,
    JacobiError,
    MalformedChainError,
    NotSolvableError,
    TorsionAbelianizationError,
)
from .modarith import ModMatrix, PrimeContext, howell_form, howell_residue, smith_normal_form


class LieAlgebra:
    """Lie algebra on basis e_0..e_{r-1} over Z/p^k with sparse structure constants.

    sc maps an ordered pair (i, j) with i < j to the coefficient vector of
    [e_i, e_j]; missing pairs bracket to zero.  Instances are immutable.
    """

    __slots__ = ("ctx", "rank", "sc", "name")

    def __init__(self, ctx: PrimeContext, rank: int, sc: dict | None = None, name: str = ""):
        self.ctx = ctx
        self.rank = rank
        self.name = name
        pk = ctx.modulus
        table = {}
        if sc:
            for (i, j), vec in sc.items():
                if not (0 <= i < j < rank):
                    raise DimensionMismatchError(f"bracket pair ({i},{j}) out of range for rank {rank}")
                if len(vec) != rank:
                    raise DimensionMismatchError("structure constant vector length mismatch")
                v = tuple(x % pk for x in vec)
                if any(v):
                    table[(i, j)] = v
        self.sc = table

    def basis_vector(self, i: int) -> tuple:
        v = [0] * self.rank
        v[i] = 1
        return tuple(v)

    def basis_bracket(self, i: int, j: int) -> tuple:
        """[e_i, e_j] for any i, j."""
        if i == j:
            return (0,) * self.rank
        if i < j:
            return self.sc.get((i, j), (0,) * self.rank)
        vec = self.sc.get((j, i))
        if vec is None:
            return (0,) * self.rank
        pk = self.ctx.modulus
        return tuple(-x % pk for x in vec)

    def bracket(self, x: Sequence[int], y: Sequence[int]) -> tuple:
        """Bilinear antisymmetric extension of the structure constants."""
        r = self.rank
        if len(x) != r or len(y) != r:
            raise DimensionMismatchError("vector length mismatch")
        pk = self.ctx.modulus
        out = [0] * r
        for (i, j), vec in self.sc.items():
            c = x[i] * y[j] - x[j] * y[i]
            if c % pk:
                for m, w in enumerate(vec):
                    if w:
                        out[m] = (out[m] + c * w) % pk
        return tuple(v % pk for v in out)

    def adjoint(self, x: Sequence[int]) -> ModMatrix:
        """Matrix of ad_x, columns ad_x(e_j) = [x, e_j]."""
        ent = {}
        for j in range(self.rank):
            col = self.bracket(x, self.basis_vector(j))
            for i, v in enumerate(col):
                if v:
                    ent[(i, j)] = v
        return ModMatrix(self.rank, self.rank, ent)

    def reduce_mod_p(self) -> "LieAlgebra":
        """The GF(p) algebra with the same structure constants read mod p."""
        p = self.ctx.p
        gf = self.ctx.mod_p()
        sc = {key: tuple(x % p for x in vec) for key, vec in self.sc.items()}
        return LieAlgebra(gf, self.rank, sc, name=self.name)

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"LieAlgebra(rank={self.rank}, p={self.ctx.p}, k={self.ctx.k}{tag})"


@dataclass(frozen=True)
class JacobiViolation:
    triple: tuple
    residual: tuple


def jacobi_violation(g: LieAlgebra) -> Optional[JacobiViolation]:
    """First basis triple violating [[x,y],z] + [[y,z],x] + [[z,x],y] = 0, or None."""
    pk = g.ctx.modulus
    r = g.rank
    for i in range(r):
        for j in range(i + 1, r):
            for m in range(j + 1, r):
                ei, ej, em = g.basis_vector(i), g.basis_vector(j), g.basis_vector(m)
                a = g.bracket(g.basis_bracket(i, j), em)
                b = g.bracket(g.basis_bracket(j, m), ei)
                c = g.bracket(g.basis_bracket(m, i), ej)
                res = tuple((a[t] + b[t] + c[t]) % pk for t in range(r))
                if any(res):
                    return JacobiViolation((i + 1, j + 1, m + 1), res)
    return None


def validate(g: LieAlgebra) -> None:
    """Raise JacobiError on the first violating triple; silent when valid."""
    bad = jacobi_violation(g)
    if bad is not None:
        raise JacobiError(bad.triple, bad.residual)


# ---------------------------------------------------------------------------
# Submodules


@dataclass(frozen=True)
class Submodule:
    """Submodule of the ambient free module, held as a canonical Howell basis."""

    algebra: LieAlgebra
    basis: tuple

    @classmethod
    def from_generators(cls, g: LieAlgebra, vectors) -> "Submodule":
        rows = howell_form(vectors, g.rank, g.ctx)
        return cls(g, tuple(rows))

    @classmethod
    def zero(cls, g: LieAlgebra) -> "Submodule":
        return cls(g, ())

    @classmethod
    def full(cls, g: LieAlgebra) -> "Submodule":
        return cls.from_generators(g, [g.basis_vector(i) for i in range(g.rank)])

    def contains(self, v) -> bool:
        if not self.basis:
            return not any(x % self.algebra.ctx.modulus for x in v)
        return not any(howell_residue(v, self.basis, self.algebra.ctx))

    def contains_module(self, other: "Submodule") -> bool:
        return all(self.contains(b) for b in other.basis)

    def coordinates(self, v) -> tuple:
        """Coefficients expressing v in the basis rows; requires membership."""
        coeffs = [0] * len(self.basis)
        res = howell_residue(v, self.basis, self.algebra.ctx, coeffs)
        if any(res):
            raise DimensionMismatchError("vector is not in the submodule")
        return tuple(coeffs)

    def add(self, other: "Submodule") -> "Submodule":
        return Submodule.from_generators(self.algebra, list(self.basis) + list(other.basis))

    def scale(self, c: int) -> "Submodule":
        pk = self.algebra.ctx.modulus
        return Submodule.from_generators(self.algebra, [[x * c % pk for x in b] for b in self.basis])

    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> list:
        """(column, valuation of pivot) per basis row."""
        ctx = self.algebra.ctx
        out = []
        for row in self.basis:
            c = next(i for i, x in enumerate(row) if x)
            out.append((c, ctx.valuation(row[c])))
        return out

    def is_saturated(self) -> bool:
        return all(a == 0 for _, a in self.pivots())

    def is_ideal(self) -> bool:
        g = self.algebra
        for b in self.basis:
            for j in range(g.rank):
                if not self.contains(g.bracket(g.basis_vector(j), b)):
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, Submodule) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)


def bracket_span(g: LieAlgebra, left: Submodule, right: Submodule) -> Submodule:
    """Span of all [x, y] with x in left, y in right."""
    vecs = [g.bracket(a, b) for a in left.basis for b in right.basis]
    return Submodule.from_generators(g, vecs)


def derived_subalgebra(g: LieAlgebra, h: Submodule | None = None) -> Submodule:
    """[h, h] (default [g, g]), echelonized; an ideal when h is."""
    if h is None:
        vecs = list(g.sc.values())
        return Submodule.from_generators(g, vecs)
    return bracket_span(g, h, h)


def derived_series(g: LieAlgebra) -> list:
    """Strictly descending derived series, ending at its stable term."""
    series = [Submodule.full(g)]
    while True:
        nxt = derived_subalgebra(g, series[-1])
        if nxt == series[-1]:
            break
        series.append(nxt)
        if nxt.dim() == 0:
            break
    return series


def is_solvable(g: LieAlgebra):
    """(solvable?, derived length).  Length counts strict steps to zero."""
    series = derived_series(g)
    solvable = series[-1].dim() == 0
    return solvable, (len(series) - 1 if solvable else len(series))


def lower_central_series(g: LieAlgebra) -> list:
    """g = gamma_1 >= gamma_2 = [g, gamma_1] >= ... down to the stable term."""
    full = Submodule.full(g)
    series = [full]
    while True:
        nxt = bracket_span(g, full, series[-1])
        if nxt == series[-1]:
            break
        series.append(nxt)
        if nxt.dim() == 0:
            break
    return series


def nilpotency_class(g: LieAlgebra) -> Optional[int]:
    """Smallest c with gamma_{c+1} = 0 at this precision, or None."""
    series = lower_central_series(g)
    if series[-1].dim() != 0:
        return None
    return len(series) - 1


# ---------------------------------------------------------------------------
# Isolators


def isolator(g: LieAlgebra, h: Submodule) -> Submodule:
    """Saturation of h: strip the p-power factors from a Smith-adapted basis.

    With h = span{p^{a_i} v_i} for a unimodular family v_i, the result is
    span{v_i : a_i < k}.  The result contains h, is saturated, is idempotent
    under this operation, and h has finite index p^{sum a_i} in it.  Directions
    with a_i = k contribute nothing to h and are dropped.
    """
    if not h.basis:
        return h
    ctx = g.ctx
    mat = ModMatrix.from_rows([list(b) for b in h.basis], ctx.modulus)
    # pad with zero rows so V is square and every direction gets an exponent
    if mat.rows < g.rank:
        padded = [list(b) for b in h.basis] + [[0] * g.rank for _ in range(g.rank - mat.rows)]
        mat = ModMatrix.from_rows(padded, ctx.modulus)
    dec = smith_normal_form(mat, ctx)
    vrows = dec.V.row_dicts()
    keep = []
    for i, a in enumerate(dec.exponents):
        if a < ctx.k:
            row = [0] * g.rank
            for j, v in vrows[i].items():
                row[j] = v
            keep.append(row)
    return Submodule.from_generators(g, keep)


def isolator_in(g: LieAlgebra, ambient: Submodule, h: Submodule) -> Submodule:
    """Isolator of h inside a saturated submodule, computed in its coordinates."""
    if not ambient.is_saturated():
        raise DimensionMismatchError("ambient submodule must be saturated")
    m = ambient.dim()
    coords = [ambient.coordinates(b) for b in h.basis]
    inner = LieAlgebra(g.ctx, m)  # bracket-free carrier for coordinate rows
    iso = isolator(inner, Submodule.from_generators(inner, coords))
    pk = g.ctx.modulus
    lifted = []
    for row in iso.basis:
        vec = [0] * g.rank
        for c, b in zip(row, ambient.basis):
            if c:
                for t, x in enumerate(b):
                    vec[t] = (vec[t] + c * x) % pk
        lifted.append(vec)
    return Submodule.from_generators(g, lifted)


# ---------------------------------------------------------------------------
# PF filtration verification


@dataclass(frozen=True)
class FiltrationChain:
    """Descending family n_1 >= n_2 >= ... >= n_N of ideals with a finite horizon."""

    ideals: tuple

    @property
    def horizon(self) -> int:
        return len(self.ideals)


@dataclass(frozen=True)
class PFReport:
    ok: bool
    condition: Optional[str] = None  # 'ii' | 'iii' | 'iv' | 'v'
    index: Optional[int] = None  # 1-based chain position
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def verify_pf_chain(g: LieAlgebra, chain: FiltrationChain) -> PFReport:
    """Check the descending-filtration conditions at the working precision.

    ii: n_{i+1} <= n_i; iv: [n_i, g] <= n_{i+1}; v: the (p-1)-fold iterated
    bracket [n_i, g, ..., g] lands in p.n_{i+1}; and the finite-horizon form
    of the vanishing condition iii: n_N = 0 at precision k.  Members that are
    not ideals raise MalformedChainError.
    """
    full = Submodule.full(g)
    ideals = list(chain.ideals)
    for t, n_i in enumerate(ideals):
        if not n_i.is_ideal():
            raise MalformedChainError(f"chain member {t + 1} is not an ideal")
    for t in range(len(ideals) - 1):
        n_i, n_next = ideals[t], ideals[t + 1]
        if not n_i.contains_module(n_next):
            bad = next(b for b in n_next.basis if not n_i.contains(b))
            return PFReport(False, "ii", t + 1, bad)
        br = bracket_span(g, n_i, full)
        if not n_next.contains_module(br):
            bad = next(b for b in br.basis if not n_next.contains(b))
            return PFReport(False, "iv", t + 1, bad)
        iterated = n_i
        for _ in range(g.ctx.p - 1):
            iterated = bracket_span(g, iterated, full)
        target = n_next.scale(g.ctx.p)
        if not target.contains_module(iterated):
            bad = next(b for b in iterated.basis if not target.contains(b))
            return PFReport(False, "v", t + 1, bad)
    if ideals and ideals[-1].dim() != 0:
        return PFReport(False, "iii", len(ideals), ideals[-1].basis[0])
    return PFReport(True)


def canonical_nilpotent_chain(g: LieAlgebra) -> FiltrationChain:
    """n_i = gamma_i + p.gamma_{i-1} + ... for a nilpotent algebra.

    For class < p this chain verifies all PF conditions at any precision;
    the horizon is class + k so that the last member vanishes mod p^k.
    """
    c = nilpotency_class(g)
    if c is None:
        raise NotSolvableError("algebra is not nilpotent at this precision")
    gammas = lower_central_series(g)

    def gamma(m):
        if m <= 1:
            return gammas[0]
        if m > len(gammas):
            return Submodule.zero(g)
        return gammas[m - 1]

    ideals = []
    horizon = c + g.ctx.k
    for i in range(1, horizon + 1):
        acc = Submodule.zero(g)
        for j in range(i):
            term = gamma(i - j).scale(pow(g.ctx.p, j, g.ctx.modulus))
            acc = acc.add(term)
        ideals.append(acc)
    return FiltrationChain(tuple(ideals))


# ---------------------------------------------------------------------------
# Rank-one splitting chains


@dataclass(frozen=True)
class SolvableChain:
    """g = k_0 > k_1 > ... > k_r = 0 with free rank-one quotients.

    generators[i] spans k_i/k_{i+1}; each k_{i+1} is an ideal of k_i,
    saturated inside it.
    """

    algebra: LieAlgebra
    ideals: tuple  # r+1 Submodules, full down to zero
    generators: tuple  # r ambient vectors

    def __len__(self):
        return len(self.generators)


def _free_quotient_exists(g: LieAlgebra, rel_rows, m: int) -> bool:
    # quotient (Z/p^k)^m / <rows> has a free factor iff some padded Smith
    # exponent equals k (an untouched direction at this precision)
    if not rel_rows:
        return m > 0
    ctx = g.ctx
    padded = [list(r) for r in rel_rows]
    while len(padded) < m:
        padded.append([0] * m)
    exps = smith_normal_form(ModMatrix.from_rows(padded, ctx.modulus), ctx).exponents
    return len(rel_rows) < m or any(a == ctx.k for a in exps)


def _split_direction(g: LieAlgebra, derived_rows, m: int):
    """Pick the quotient generator in the coordinates of the current term.

    Tries coordinate directions first (lowest index whose complement plus the
    derived span is saturated of corank one), then falls back to the free
    directions of the Smith transform.  Returns (t_coords, complement_rows).
    """
    ctx = g.ctx

    def complement_ok(rows, c):
        hb = howell_form(rows, m, ctx)
        if len(hb) != m - 1:
            return None
        pivots = set()
        for row in hb:
            col = next(i for i, x in enumerate(row) if x)
            if ctx.valuation(row[col]) != 0:
                return None
            pivots.add(col)
        if c in pivots:
            return None
        return hb

    unit = lambda c: tuple(1 if t == c else 0 for t in range(m))
    for c in range(m):
        rows = list(derived_rows) + [unit(j) for j in range(m) if j != c]
        hb = complement_ok(rows, c)
        if hb is not None:
            return unit(c), hb
    padded = [list(r) for r in derived_rows]
    while len(padded) < m:
        padded.append([0] * m)
    dec = smith_normal_form(ModMatrix.from_rows(padded, ctx.modulus), ctx)
    vrows = dec.V.row_dicts()
    vrow = lambda i: tuple(vrows[i].get(j, 0) for j in range(m))
    for i, a in enumerate(dec.exponents):
        if a == ctx.k:
            rows = list(derived_rows) + [vrow(t) for t in range(m) if t != i]
            hb = howell_form(rows, m, ctx)
            if len(hb) == m - 1 and all(ctx.valuation(r[next(j for j, x in enumerate(r) if x)]) == 0 for r in hb):
                return vrow(i), hb
    raise TorsionAbelianizationError("no free rank-one quotient at this precision")


def solvable_chain(g: LieAlgebra) -> SolvableChain:
    """Descending chain with free rank-one quotients and splitting generators.

    Each step quotients the current term by a saturated corank-one ideal
    containing its derived subalgebra; the generator choice is the lowest
    coordinate direction that works, so the chain is deterministic.  Fails
    with TorsionAbelianizationError when the abelianization of some term has
    no free part at precision k, and NotSolvableError when the input is not
    solvable.
    """
    solvable, _ = is_solvable(g)
    if not solvable:
        raise NotSolvableError("derived series does not reach zero")
    if g.rank == 0:
        raise NotSolvableError("the zero algebra has no splitting chain")
    ctx = g.ctx
    pk = ctx.modulus
    ideals = [Submodule.full(g)]
    gens = []
    current = ideals[0]
    while current.dim() > 0:
        m = current.dim()
        cb = current.basis
        derived_rows = []
        for a in range(m):
            for b in range(a + 1, m):
                w = g.bracket(cb[a], cb[b])
                if any(w):
                    derived_rows.append(current.coordinates(w))
        if not _free_quotient_exists(g, derived_rows, m):
            raise TorsionAbelianizationError(
                "abelianization torsion at this precision: every Smith exponent of the quotient is finite"
            )
        t_coords, comp_rows = _split_direction(g, derived_rows, m)

        def lift(row):
            vec = [0] * g.rank
            for c, bvec in zip(row, cb):
                if c:
                    for t, x in enumerate(bvec):
                        vec[t] = (vec[t] + c * x) % pk
            return tuple(vec)

        t_ambient = lift(t_coords)
        next_sub = Submodule.from_generators(g, [lift(r) for r in comp_rows])
        next_sub = isolator(g, next_sub)  # already saturated; kept as the defining form
        gens.append(t_ambient)
        ideals.append(next_sub)
        current = next_sub
    return SolvableChain(g, tuple(ideals), tuple(gens))


def subalgebra_structure(g: LieAlgebra, sub: Submodule) -> LieAlgebra:
    """The algebra sub carries in its own coordinates (basis must be saturated)."""
    if not sub.is_saturated():
        raise DimensionMismatchError("subalgebra basis must be saturated for exact coordinates")
    m = sub.dim()
    sc = {}
    for a in range(m):
        for b in range(a + 1, m):
            w = g.bracket(sub.basis[a], sub.basis[b])
            if any(w):
                sc[(a, b)] = sub.coordinates(w)
    return LieAlgebra(g.ctx, m, sc)
