"""Two-column spectral machinery for extensions with rank-one quotient.

For an extension 0 -> k -> h -> (rank one) -> 0 the second page has only two
nonzero columns,

    E^{0,s} = invariants of the quotient action on H^s(k),
    E^{1,s} = coinvariants,  E^{r,s} = 0 for r >= 2,

so every differential vanishes for placement reasons, the page is already the
limit, and total dimensions add: b_n = E^{0,n} + E^{1,n-1}.  The group side
acts through the exponential of the adjoint (a unipotent automorphism), the
Lie side through the adjoint itself (a nilpotent derivation); both actions on
H^s are computed by independent cochain-level routes.  Walking a rank-one
splitting chain from the bottom up runs the same induction on both sides and
compares the outcome with the direct Chevalley-Eilenberg computation of the
mod-p reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bch import LinearOperator, _exp_nilpotent, _nilpotency_index, truncated_log
from .cohomology import AlgebraMap, CochainComplex, betti, ce_complex, induced_map
from .errors import (
    ExponentialNotExactError,
    NotNilpotentError,
    NotUnipotentError,
)
from .liecore import LieAlgebra, solvable_chain, subalgebra_structure
from .modarith import ModMatrix, rank

GROUP = "group"
LIE = "lie"
_SIDES = (GROUP, LIE)


def _check_side(side: str):
    if side not in _SIDES:
        raise ValueError(f"side must be one of {_SIDES}")


def invariants_dim(op: LinearOperator, side: str) -> int:
    """dim ker(A - I) on the group side, dim ker(A) on the Lie side."""
    _check_side(side)
    mat = op.minus_identity() if side == GROUP else op.matrix
    return op.dim - rank(mat, op.ctx)


def coinvariants_dim(op: LinearOperator, side: str) -> int:
    """dim V/(A - I)V (group) or dim V/AV (lie); equals invariants_dim by rank-nullity."""
    _check_side(side)
    mat = op.minus_identity() if side == GROUP else op.matrix
    return op.dim - rank(mat, op.ctx)


def lemma_abelian_check(op: LinearOperator) -> bool:
    """Invariants and coinvariants of a unipotent U match those of Psi(U).

    This is the computable content of the rank-one comparison in each degree;
    it requires (U - I)^p = 0 and holds because Psi(U) = (U - I) . (unipotent).
    """
    log = truncated_log(op)  # raises NotUnipotentError when not licensed
    r_group = rank(op.minus_identity(), op.ctx)
    r_lie = rank(log.matrix, op.ctx)
    return r_group == r_lie


@dataclass(frozen=True)
class SpectralPage:
    """Second page of a rank-one extension: entries vanish for r >= 2."""

    side: str
    sub_rank: int
    entries: tuple  # entries[s] = (E^{0,s}, E^{1,s})

    def entry(self, r: int, s: int) -> int:
        if r >= 2 or r < 0 or s < 0 or s > self.sub_rank:
            return 0
        return self.entries[s][r]

    def total(self, n: int) -> int:
        return self.entry(0, n) + self.entry(1, n - 1)

    def totals(self) -> tuple:
        return tuple(self.total(n) for n in range(self.sub_rank + 2))


def induced_operators(k_bar: LieAlgebra, ad_matrix: ModMatrix, s: int, cx: CochainComplex | None = None):
    """(lie, group) operators on H^s(k_bar) for the action generated by ad_matrix.

    The Lie operator comes from the derivation route, the group operator from
    the automorphism exp(ad) route; both are b_s x b_s over GF(p).
    """
    if cx is None:
        cx = ce_complex(k_bar)
    ctx = k_bar.ctx
    der = AlgebraMap.derivation(k_bar, ad_matrix)
    if _nilpotency_index(ad_matrix, ctx, ctx.p) is None:
        raise ExponentialNotExactError("adjoint action is not nilpotent of index <= p mod p")
    aut = AlgebraMap.automorphism(k_bar, _exp_nilpotent(ad_matrix, ctx))
    lie_mat = induced_map(cx, der, s)
    grp_mat = induced_map(cx, aut, s)
    dim = cx.betti(s)
    to_op = lambda rows: LinearOperator(ctx, ModMatrix.from_rows([list(r) for r in rows] if dim else [], ctx.p))
    if dim == 0:
        zero = LinearOperator(ctx, ModMatrix.zero(0, 0))
        return zero, zero
    return to_op(lie_mat), to_op(grp_mat)


def two_column_page(k_bar: LieAlgebra, ad_matrix: ModMatrix, side: str, cx: CochainComplex | None = None) -> SpectralPage:
    """Page of the extension with kernel k_bar and quotient acting via ad_matrix.

    The induced operator on every H^s must be unipotent (group) or nilpotent
    (lie) of class <= p; a failure is reported with its degree.
    """
    _check_side(side)
    if cx is None:
        cx = ce_complex(k_bar)
    ctx = k_bar.ctx
    entries = []
    for s in range(k_bar.rank + 1):
        lie_op, grp_op = induced_operators(k_bar, ad_matrix, s, cx)
        op = grp_op if side == GROUP else lie_op
        if op.dim:
            if side == GROUP:
                if _nilpotency_index(op.minus_identity(), ctx, ctx.p) is None:
                    raise NotUnipotentError(f"action not unipotent of class <= p on H^{s}")
            else:
                if _nilpotency_index(op.matrix, ctx, ctx.p) is None:
                    raise NotNilpotentError(f"action not nilpotent of class <= p on H^{s}")
        entries.append((invariants_dim(op, side), coinvariants_dim(op, side)))
    return SpectralPage(side, k_bar.rank, tuple(entries))


# ---------------------------------------------------------------------------
# The chain recursion


def _chain_levels(g: LieAlgebra):
    """Per-level data for the splitting chain: (k_bar, ad_t mod p, complex)."""
    chain = solvable_chain(g)
    p = g.ctx.p
    levels = []
    for i in range(len(chain)):
        sub = chain.ideals[i + 1]
        t = chain.generators[i]
        inner = subalgebra_structure(g, sub)
        k_bar = inner.reduce_mod_p()
        cols = [sub.coordinates(g.bracket(t, b)) for b in sub.basis]
        ent = {}
        for j, col in enumerate(cols):
            for w, v in enumerate(col):
                if v % p:
                    ent[(w, j)] = v % p
        ad = ModMatrix(sub.dim(), sub.dim(), ent)
        levels.append((k_bar, ad))
    return chain, levels


def solvable_betti(g: LieAlgebra, side: str) -> tuple:
    """Betti numbers of g assembled along the splitting chain on one side.

    Level r-1 is the rank-one base case (1, 1); each higher level totals its
    two-column page, with the action on H^s(k_{i+1}) induced degreewise.
    The answer is the level-0 total.
    """
    _check_side(side)
    levels = solvable_betti_levels(g, side)
    return levels[0]


def solvable_betti_levels(g: LieAlgebra, side: str) -> list:
    """Page totals for every chain term k_0, ..., k_{r-1}."""
    _check_side(side)
    _, levels = _chain_levels(g)
    out = []
    for k_bar, ad in levels:
        page = two_column_page(k_bar, ad, side)
        out.append(page.totals())
    return out


@dataclass(frozen=True)
class ComparisonReport:
    """Group-side, Lie-side and direct mod-p Betti columns, degree by degree."""

    name: str
    p: int
    k: int
    group_betti: tuple
    lie_betti: tuple
    direct_betti: tuple

    @property
    def passed(self) -> bool:
        return self.group_betti == self.lie_betti == self.direct_betti

    def rows(self):
        return [
            (n, self.group_betti[n], self.lie_betti[n], self.direct_betti[n])
            for n in range(len(self.direct_betti))
        ]


def main_theorem_check(g: LieAlgebra) -> ComparisonReport:
    """Compare both spectral-recursion columns with the direct CE computation."""
    _, levels = _chain_levels(g)
    cxs = [ce_complex(k_bar) for k_bar, _ in levels]
    sides = {}
    for side in _SIDES:
        pages = [
            two_column_page(k_bar, ad, side, cx)
            for (k_bar, ad), cx in zip(levels, cxs)
        ]
        sides[side] = pages[0].totals() if pages else (1,)
    direct = betti(g.reduce_mod_p())
    return ComparisonReport(
        g.name or f"rank-{g.rank}",
        g.ctx.p,
        g.ctx.k,
        sides[GROUP],
        sides[LIE],
        direct,
    )
