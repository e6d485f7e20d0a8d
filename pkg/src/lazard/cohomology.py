"""The Chevalley-Eilenberg cochain complex and everything computed from it.

C^n = Hom(Lambda^n g, V) with the n-subsets of the basis enumerated in
increasing bitmask order.  The differential is

    (d phi)(x_0..x_n) = sum_i (-1)^i rho(x_i) phi(..x_i^..)
                      + sum_{i<j} (-1)^(i+j) phi([x_i,x_j], ..x_i^..x_j^..),

the dual of the standard free-resolution differential; d.d = 0 is verified
exactly at construction.  Betti numbers, deterministic cocycle
representatives, induced operators on cohomology (automorphisms act by
precomposing the inverse on each slot, derivations by the negative sum over
slots), cup products for trivial coefficients, and Smith-form cohomology over
Z/p^k with the universal-coefficient bookkeeping all live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .errors import (
    CocycleError,
    DimensionMismatchError,
    ModuleAxiomError,
)
from .liecore import LieAlgebra
from .modarith import (
    ModMatrix,
    PrimeContext,
    howell_form,
    invert,
    rank,
    rank_kernel,
    snf_exponents,
    solve,
)


@lru_cache(maxsize=None)
def subsets(r: int, n: int) -> tuple:
    """n-subsets of range(r) in increasing bitmask order."""
    if n < 0 or n > r:
        return ()
    out = []
    for mask in range(1 << r):
        if mask.bit_count() == n:
            out.append(tuple(i for i in range(r) if mask >> i & 1))
    return tuple(out)


@lru_cache(maxsize=None)
def subset_index(r: int, n: int) -> dict:
    return {s: t for t, s in enumerate(subsets(r, n))}


class LieModule:
    """Finite module over a Lie algebra: action matrices rho(e_i), one per basis vector."""

    __slots__ = ("ctx", "dim", "action")

    def __init__(self, ctx: PrimeContext, dim: int, action):
        self.ctx = ctx
        self.dim = dim
        pk = ctx.modulus
        mats = []
        for a in action:
            if isinstance(a, ModMatrix):
                m = ModMatrix(dim, dim, a.entries, modulus=pk)
            else:
                m = ModMatrix.from_rows(a, pk)
            if m.rows != dim or m.cols != dim:
                raise DimensionMismatchError("action matrices must be dim x dim")
            mats.append(m)
        self.action = tuple(mats)

    @classmethod
    def trivial(cls, ctx: PrimeContext, rank: int, dim: int = 1) -> "LieModule":
        return cls(ctx, dim, [ModMatrix.zero(dim, dim) for _ in range(rank)])

    def is_trivial(self) -> bool:
        return all(m.is_zero() for m in self.action)


def validate_module(g: LieAlgebra, v: LieModule) -> None:
    """rho([e_i,e_j]) = rho(e_i) rho(e_j) - rho(e_j) rho(e_i), exactly."""
    if len(v.action) != g.rank:
        raise DimensionMismatchError("one action matrix per basis vector required")
    pk = g.ctx.modulus
    for i in range(g.rank):
        for j in range(i + 1, g.rank):
            br = g.basis_bracket(i, j)
            lhs = ModMatrix.zero(v.dim, v.dim)
            for m, c in enumerate(br):
                if c:
                    lhs = lhs.add(v.action[m].scale(c, pk), pk)
            ri, rj = v.action[i], v.action[j]
            rhs = ri.matmul(rj, pk).add(rj.matmul(ri, pk).scale(-1, pk), pk)
            diff = lhs.add(rhs.scale(-1, pk), pk)
            if not diff.is_zero():
                raise ModuleAxiomError((i + 1, j + 1), tuple(sorted(diff.entries.items())))


def _assemble_differential(r: int, sc: dict, action, dim: int, n: int, modulus: int) -> ModMatrix:
    """Matrix of d^n : C^n -> C^(n+1) from raw structure constants and actions."""
    rows_sub = subsets(r, n + 1)
    cols_idx = subset_index(r, n)
    entries: dict = {}
    act_entries = [a.entries if isinstance(a, ModMatrix) else a for a in action]
    nontrivial = [bool(e) for e in act_entries]
    for t_idx, T in enumerate(rows_sub):
        pos = {e: q for q, e in enumerate(T)}
        # module-action part
        for q, e in enumerate(T):
            if not nontrivial[e]:
                continue
            s_idx = cols_idx[T[:q] + T[q + 1 :]]
            sign = -1 if q % 2 else 1
            for (w, v), val in act_entries[e].items():
                key = (t_idx * dim + w, s_idx * dim + v)
                nv = (entries.get(key, 0) + sign * val) % modulus
                if nv:
                    entries[key] = nv
                else:
                    entries.pop(key, None)
        # bracket part
        for (a, b), vec in sc.items():
            if a not in pos or b not in pos:
                continue
            i, j = pos[a], pos[b]
            base = -1 if (i + j) % 2 else 1
            rest = T[:i] + T[i + 1 : j] + T[j + 1 :]
            restset = set(rest)
            for m, c in enumerate(vec):
                if not c or m in restset:
                    continue
                q = sum(1 for e in rest if e < m)
                s = tuple(sorted(rest + (m,)))
                s_idx = cols_idx[s]
                coef = base * c * (-1 if q % 2 else 1)
                for v in range(dim):
                    key = (t_idx * dim + v, s_idx * dim + v)
                    nv = (entries.get(key, 0) + coef) % modulus
                    if nv:
                        entries[key] = nv
                    else:
                        entries.pop(key, None)
    rows = len(rows_sub) * dim
    cols = len(subsets(r, n)) * dim
    return ModMatrix(rows, cols, entries)


class CochainComplex:
    """Degreewise differentials of Hom(Lambda^. g, V) with cached cohomology."""

    def __init__(self, g: LieAlgebra, module: LieModule, differentials):
        self.g = g
        self.module = module
        self.differentials = tuple(differentials)  # d^n for n = 0..r
        self.dims = tuple(len(subsets(g.rank, n)) * module.dim for n in range(g.rank + 1))
        self._ranks: dict = {}
        self._spaces: dict = {}

    @property
    def ctx(self) -> PrimeContext:
        return self.g.ctx

    def differential(self, n: int) -> ModMatrix:
        if 0 <= n < len(self.differentials):
            return self.differentials[n]
        return ModMatrix.zero(0, 0)

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n <= self.g.rank else 0

    def rank_of_d(self, n: int) -> int:
        if not (0 <= n <= self.g.rank):
            return 0
        if n not in self._ranks:
            self._ranks[n] = rank(self.differentials[n], self.ctx)
        return self._ranks[n]

    def betti(self, n: int) -> int:
        if not (0 <= n <= self.g.rank):
            return 0
        return self.dim(n) - self.rank_of_d(n) - self.rank_of_d(n - 1)

    def betti_numbers(self) -> tuple:
        return tuple(self.betti(n) for n in range(self.g.rank + 1))

    def cohomology(self, n: int) -> "CohomologySpace":
        if n not in self._spaces:
            self._spaces[n] = cocycle_representatives(self, n)
        return self._spaces[n]


def ce_complex(g: LieAlgebra, module: LieModule | None = None) -> CochainComplex:
    """Build the complex over GF(p) and verify d.d = 0 in every degree."""
    if g.ctx.k != 1:
        raise DimensionMismatchError("ce_complex works over GF(p); use integral_complex for k >= 2")
    if module is None:
        module = LieModule.trivial(g.ctx, g.rank)
    validate_module(g, module)
    p = g.ctx.p
    diffs = [
        _assemble_differential(g.rank, g.sc, module.action, module.dim, n, p)
        for n in range(g.rank + 1)
    ]
    for n in range(g.rank):
        if not diffs[n + 1].matmul(diffs[n], p).is_zero():
            raise CocycleError(f"d.d != 0 between degrees {n} and {n + 2}")
    return CochainComplex(g, module, diffs)


def integral_complex(g: LieAlgebra, module: LieModule | None = None) -> CochainComplex:
    """The same complex over Z/p^k (trivial coefficients by default)."""
    if module is None:
        module = LieModule.trivial(g.ctx, g.rank)
    validate_module(g, module)
    pk = g.ctx.modulus
    diffs = [
        _assemble_differential(g.rank, g.sc, module.action, module.dim, n, pk)
        for n in range(g.rank + 1)
    ]
    for n in range(g.rank):
        if not diffs[n + 1].matmul(diffs[n], pk).is_zero():
            raise CocycleError(f"d.d != 0 between degrees {n} and {n + 2}")
    return CochainComplex(g, module, diffs)


def betti(g: LieAlgebra, module: LieModule | None = None) -> tuple:
    """Betti numbers b_0..b_r over GF(p)."""
    return ce_complex(g, module).betti_numbers()


# ---------------------------------------------------------------------------
# Representatives and class coordinates


@dataclass(frozen=True)
class CohomologySpace:
    """H^n with deterministic representative cocycles and projection data."""

    complex: CochainComplex
    degree: int
    dim: int
    representatives: tuple
    image_basis: tuple

    def is_cocycle(self, vec) -> bool:
        d = self.complex.differential(self.degree)
        if d.rows == 0:
            return True
        return not any(d.apply(vec, self.complex.ctx.p))

    def coordinates(self, vec) -> tuple:
        """Class coordinates of a cocycle in the representative basis."""
        if not self.is_cocycle(vec):
            raise CocycleError("vector is not a cocycle", witness=tuple(vec))
        if self.dim == 0:
            return ()
        p = self.complex.ctx.p
        n = self.complex.dim(self.degree)
        cols = list(self.representatives) + list(self.image_basis)
        ent = {}
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                if v:
                    ent[(i, j)] = v
        mat = ModMatrix(n, len(cols), ent)
        x = solve(mat, list(vec), self.complex.ctx)
        return tuple(x[: self.dim])


def cocycle_representatives(complex: CochainComplex, n: int) -> CohomologySpace:
    """Kernel-modulo-image representatives with lowest-index echelon choice."""
    ctx = complex.ctx
    p = ctx.p
    dim_n = complex.dim(n)
    if not (0 <= n <= complex.g.rank):
        return CohomologySpace(complex, n, 0, (), ())
    d_n = complex.differential(n)
    _, kernel = rank_kernel(d_n, ctx)
    if n > 0:
        d_prev = complex.differential(n - 1)
        image_rows = howell_form(
            [tuple(col.get(i, 0) for i in range(dim_n)) for col in _columns(d_prev)],
            dim_n,
            ctx,
        )
    else:
        image_rows = []
    echelon = [dict(enumerate(row)) for row in image_rows]
    echelon = [{j: v for j, v in row.items() if v} for row in echelon]
    pivots = {next(iter(sorted(row))): row for row in echelon}
    reps = []
    for vec in kernel:
        w = list(vec)
        for c in sorted(pivots):
            if w[c]:
                f = w[c]
                for j, v in pivots[c].items():
                    w[j] = (w[j] - f * v) % p
        if any(w):
            lead = next(i for i, v in enumerate(w) if v)
            inv = pow(w[lead], -1, p)
            if inv != 1:
                w = [x * inv % p for x in w]
            reps.append(tuple(w))
            pivots[lead] = {j: v for j, v in enumerate(w) if v}
    return CohomologySpace(complex, n, len(reps), tuple(reps), tuple(tuple(r) for r in image_rows))


def _columns(mat: ModMatrix):
    cols = [dict() for _ in range(mat.cols)]
    for (i, j), v in mat.entries.items():
        cols[j][i] = v
    return cols


# ---------------------------------------------------------------------------
# Induced operators on cohomology


@dataclass(frozen=True)
class AlgebraMap:
    """An automorphism or derivation of g over GF(p), validated on construction."""

    kind: str  # 'automorphism' | 'derivation'
    matrix: ModMatrix

    @classmethod
    def automorphism(cls, g: LieAlgebra, matrix: ModMatrix) -> "AlgebraMap":
        p = g.ctx.p
        if rank(matrix, g.ctx) != g.rank:
            raise DimensionMismatchError("automorphism matrix is singular")
        cols = _columns(matrix)
        img = [tuple(cols[j].get(i, 0) for i in range(g.rank)) for j in range(g.rank)]
        for i in range(g.rank):
            for j in range(i + 1, g.rank):
                lhs = matrix.apply(g.basis_bracket(i, j), p)
                rhs = g.bracket(img[i], img[j])
                if lhs != rhs:
                    raise CocycleError(f"not a bracket homomorphism on pair ({i + 1},{j + 1})")
        return cls("automorphism", matrix)

    @classmethod
    def derivation(cls, g: LieAlgebra, matrix: ModMatrix) -> "AlgebraMap":
        p = g.ctx.p
        cols = _columns(matrix)
        img = [tuple(cols[j].get(i, 0) for i in range(g.rank)) for j in range(g.rank)]
        for i in range(g.rank):
            for j in range(i + 1, g.rank):
                lhs = matrix.apply(g.basis_bracket(i, j), p)
                a = g.bracket(img[i], g.basis_vector(j))
                b = g.bracket(g.basis_vector(i), img[j])
                rhs = tuple((x + y) % p for x, y in zip(a, b))
                if lhs != rhs:
                    raise CocycleError(f"Leibniz rule fails on pair ({i + 1},{j + 1})")
        return cls("derivation", matrix)


def wedge_power_operators(b: ModMatrix, r: int, p: int, maxn: int):
    """Matrices of Lambda^n acting on subset coordinates, n = 0..maxn.

    Entry [U, S] of level n is det b[S, U] (rows S, columns U), built by
    Laplace recursion on the lowest row index.
    """
    dense = b.to_dense() % p
    levels = []
    prev = {((), ()): 1}
    levels.append({(0, 0): 1})  # Lambda^0 = identity on the empty subset
    minors_prev = prev
    for n in range(1, maxn + 1):
        subs = subsets(r, n)
        idx = subset_index(r, n)
        cur = {}
        minors = {}
        for S in subs:
            s0, srest = S[0], S[1:]
            for U in subs:
                total = 0
                for q, u in enumerate(U):
                    coef = int(dense[s0, u])
                    if coef == 0:
                        continue
                    sub_u = U[:q] + U[q + 1 :]
                    m = minors_prev.get((srest, sub_u), 0)
                    if m:
                        total += (coef * m) if q % 2 == 0 else -(coef * m)
                total %= p
                if total:
                    minors[(S, U)] = total
        ent = {}
        for (S, U), v in minors.items():
            ent[(idx[U], idx[S])] = v
        levels.append(ent)
        minors_prev = minors
    out = []
    for n in range(maxn + 1):
        size = len(subsets(r, n))
        out.append(ModMatrix(size, size, levels[n]))
    return out


def _cochain_operator(complex: CochainComplex, phi: AlgebraMap, n: int) -> ModMatrix:
    g = complex.g
    p = complex.ctx.p
    d = complex.module.dim
    if phi.kind == "automorphism":
        b = invert(phi.matrix, complex.ctx)
        lam = wedge_power_operators(b, g.rank, p, n)[n]
        if d == 1:
            return lam
        ent = {}
        for (i, j), v in lam.entries.items():
            for w in range(d):
                ent[(i * d + w, j * d + w)] = v
        return ModMatrix(complex.dim(n), complex.dim(n), ent)
    # derivation: negative sum over slots
    dense = phi.matrix.to_dense() % p
    subs = subsets(g.rank, n)
    idx = subset_index(g.rank, n)
    ent = {}
    for t_idx, T in enumerate(subs):
        for a, ta in enumerate(T):
            for i in range(g.rank):
                coef = int(dense[i, ta])
                if coef == 0:
                    continue
                if i == ta:
                    S, sign = T, 1
                elif i in T:
                    continue
                else:
                    rest = T[:a] + T[a + 1 :]
                    q = sum(1 for e in rest if e < i)
                    S = tuple(sorted(rest + (i,)))
                    sign = 1 if (a - q) % 2 == 0 else -1
                s_idx = idx[S]
                for w in range(d):
                    key = (t_idx * d + w, s_idx * d + w)
                    nv = (ent.get(key, 0) - sign * coef) % p
                    if nv:
                        ent[key] = nv
                    else:
                        ent.pop(key, None)
    return ModMatrix(complex.dim(n), complex.dim(n), ent)


def induced_map(complex: CochainComplex, phi: AlgebraMap, n: int) -> tuple:
    """Matrix of the induced operator on H^n, columns in representative coordinates.

    The cochain operator must send cocycles to cocycles (verified on every
    representative, error with witness otherwise); the class coordinates are
    then independent of the representative choice.
    """
    space = complex.cohomology(n)
    if space.dim == 0:
        return ()
    op = _cochain_operator(complex, phi, n)
    p = complex.ctx.p
    cols = []
    for rep in space.representatives:
        w = op.apply(rep, p)
        if not space.is_cocycle(w):
            raise CocycleError("operator does not preserve cocycles", witness=w)
        cols.append(space.coordinates(w))
    return tuple(tuple(col[i] for col in cols) for i in range(space.dim))


# ---------------------------------------------------------------------------
# Cup products (trivial coefficients)


def cup_product(complex: CochainComplex, m: int, a, n: int, b):
    """Class of the wedge of two cocycle representatives; zero class past degree r.

    Graded-commutative and associative; requires trivial coefficients.
    """
    if not complex.module.is_trivial() or complex.module.dim != 1:
        raise DimensionMismatchError("cup products need trivial one-dimensional coefficients")
    g = complex.g
    p = complex.ctx.p
    if m + n > g.rank:
        return ()
    subs_m = subset_index(g.rank, m)
    subs_n = subset_index(g.rank, n)
    out = []
    for S in subsets(g.rank, m + n):
        total = 0
        for I in combinations(S, m):
            J = tuple(e for e in S if e not in I)
            ai = a[subs_m[I]]
            bj = b[subs_n[J]]
            if ai and bj:
                inv = sum(1 for x in I for y in J if y < x)
                term = ai * bj
                total += -term if inv % 2 else term
        out.append(total % p)
    w = tuple(out)
    space = complex.cohomology(m + n)
    return space.coordinates(w)


# ---------------------------------------------------------------------------
# Integral (Z/p^k) cohomology via Smith forms


@dataclass(frozen=True)
class IntegralCohomology:
    """H^n over Z/p^k: free rank plus torsion exponents (from d^{n-1}).

    Exponents read from the Smith form are honest whenever they are < k;
    a diagonal zero at precision k is reported as a free direction.
    """

    degree: int
    free_rank: int
    torsion: tuple  # exponents a with factors Z/p^a, each 0 < a < k

    def mod_p_dimension_with(self, next_torsion: int) -> int:
        return self.free_rank + len(self.torsion) + next_torsion


def integral_cohomology(g: LieAlgebra, n: int, complex: CochainComplex | None = None) -> IntegralCohomology:
    if complex is None:
        complex = integral_complex(g)
    ctx = g.ctx
    exps_n = snf_exponents(complex.differential(n), ctx) if 0 <= n <= g.rank else ()
    exps_prev = snf_exponents(complex.differential(n - 1), ctx) if n - 1 >= 0 else ()
    rank_n = sum(1 for a in exps_n if a < ctx.k)
    rank_prev = sum(1 for a in exps_prev if a < ctx.k)
    free = complex.dim(n) - rank_n - rank_prev
    torsion = tuple(sorted(a for a in exps_prev if 0 < a < ctx.k))
    return IntegralCohomology(n, free, torsion)


def integral_profile(g: LieAlgebra) -> tuple:
    cx = integral_complex(g)
    return tuple(integral_cohomology(g, n, cx) for n in range(g.rank + 1))


def uct_reconcile(g: LieAlgebra) -> bool:
    """mod-p Betti = free + torsion in degree n, plus torsion in degree n+1."""
    profile = integral_profile(g)
    mod_p = betti(g.reduce_mod_p())
    for n in range(g.rank + 1):
        next_tors = len(profile[n + 1].torsion) if n + 1 <= g.rank else 0
        if mod_p[n] != profile[n].mod_p_dimension_with(next_tors):
            return False
    return True


def eckmann_shapiro_check(g: LieAlgebra, module: LieModule | None = None) -> bool:
    """Betti numbers through the precision-k complex equal those of g/pg.

    Route one assembles the differentials from the unreduced structure
    constants and reduces the matrices mod p; route two reduces the algebra
    first and builds the GF(p) complex.  Both sides are computed and compared
    in every degree.
    """
    p = g.ctx.p
    if module is None:
        action = [ModMatrix.zero(1, 1) for _ in range(g.rank)]
        dim = 1
    else:
        if module.ctx.k != 1:
            raise DimensionMismatchError("coefficients must live over GF(p)")
        action = list(module.action)
        dim = module.dim
    route_one = []
    for n in range(g.rank + 1):
        raw = _assemble_differential(g.rank, g.sc, action, dim, n, g.ctx.modulus)
        route_one.append(ModMatrix(raw.rows, raw.cols, raw.entries, modulus=p))
    gf = g.ctx.mod_p()
    for n in range(g.rank):
        if not route_one[n + 1].matmul(route_one[n], p).is_zero():
            raise CocycleError("reduced complex is not a complex")
    dims = [len(subsets(g.rank, n)) * dim for n in range(g.rank + 1)]
    ranks = [rank(mat, gf) for mat in route_one]
    side_one = tuple(
        dims[n] - ranks[n] - (ranks[n - 1] if n else 0) for n in range(g.rank + 1)
    )
    gbar = g.reduce_mod_p()
    mod_module = LieModule(gf, dim, action) if module is not None else None
    side_two = betti(gbar, mod_module)
    return side_one == side_two
