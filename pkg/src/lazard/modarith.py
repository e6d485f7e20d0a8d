"""Exact linear algebra over GF(p) and Z/p^k.

Everything here is integer arithmetic on residues in [0, p^k); no floating
point is used anywhere.  Matrices are sparse triplet maps with a dense
numpy-int64 echelon engine behind them; the sparse row-reduction path falls
back to the dense engine when fill-in passes 50%.

Determinism: echelon pivoting always takes the lowest-index row/column with a
unit pivot, and over Z/p^k the pivot of minimal p-valuation with lowest index
breaking ties.  All outputs (kernels, solutions, Smith transforms) are
reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InconsistentSystemError,
    NotUnitError,
)

# Sparse echelon switches to the dense engine past this fill ratio.
_DENSE_FILL = 0.5
# Matrices with at most this many entries go straight to the dense engine.
_SMALL_DENSE = 1 << 15
# How often the sparse loop re-measures fill-in (in pivot steps).
_FILL_CHECK = 64


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeContext:
    """The coefficient ring Z/p^k for an odd prime p >= 5; k = 1 gives GF(p)."""

    p: int
    k: int = 1

    def __post_init__(self):
        if not _is_prime(self.p) or self.p < 5:
            raise ValueError(f"p must be a prime >= 5, got {self.p}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def residue(self, x: int) -> int:
        return x % self.modulus

    def valuation(self, x: int) -> int:
        """p-adic valuation of a residue; the zero residue gets valuation k."""
        x %= self.modulus
        if x == 0:
            return self.k
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def is_unit(self, x: int) -> bool:
        return x % self.p != 0

    def unit_inverse(self, a: int) -> int:
        """Inverse of a residue coprime to p."""
        a %= self.modulus
        if a % self.p == 0:
            raise NotUnitError(f"{a} is not a unit mod {self.p}^{self.k}")
        return pow(a, -1, self.modulus)

    def mod_p(self) -> "PrimeContext":
        return PrimeContext(self.p, 1)


def unit_inverse(ctx: PrimeContext, a: int) -> int:
    return ctx.unit_inverse(a)


class ModMatrix:
    """Sparse matrix over Z/p^k: reduced residues keyed by (row, col).

    Instances are immutable by convention; all operations return new objects.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None, *, modulus=None):
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            for (i, j), v in dict(entries).items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise DimensionMismatchError(f"entry ({i},{j}) outside {rows}x{cols}")
                if modulus is not None:
                    v %= modulus
                if v:
                    ent[(i, j)] = v
        self.entries = ent

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], modulus: int | None = None) -> "ModMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise DimensionMismatchError("ragged rows")
            for j, v in enumerate(row):
                v = int(v)
                if modulus is not None:
                    v %= modulus
                if v:
                    ent[(i, j)] = v
        return cls(rows, cols, ent)

    @classmethod
    def identity(cls, n: int) -> "ModMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "ModMatrix":
        return cls(rows, cols)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        for (i, j), v in self.entries.items():
            a[i, j] = v
        return a

    def row_dicts(self) -> list[dict]:
        rows = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def transpose(self) -> "ModMatrix":
        return ModMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def apply(self, vec: Sequence[int], modulus: int) -> tuple:
        if len(vec) != self.cols:
            raise DimensionMismatchError(f"vector length {len(vec)} != cols {self.cols}")
        out = [0] * self.rows
        for (i, j), v in self.entries.items():
            c = vec[j]
            if c:
                out[i] = (out[i] + v * c) % modulus
        return tuple(out)

    def matmul(self, other: "ModMatrix", modulus: int) -> "ModMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError("inner dimensions disagree")
        # small operands multiply densely; residues < p^k <= 343 cannot
        # overflow int64 at these sizes
        if (
            self.rows * self.cols <= _SMALL_DENSE
            and other.rows * other.cols <= _SMALL_DENSE
            and self.nnz()
            and other.nnz()
        ):
            prod = (self.to_dense() @ other.to_dense()) % modulus
            ent = {}
            for i, j in zip(*np.nonzero(prod)):
                ent[(int(i), int(j))] = int(prod[i, j])
            return ModMatrix(self.rows, other.cols, ent)
        by_row = other.row_dicts()
        acc: dict = {}
        for (i, j), v in self.entries.items():
            for l, w in by_row[j].items():
                key = (i, l)
                acc[key] = (acc.get(key, 0) + v * w) % modulus
        return ModMatrix(self.rows, other.cols, acc)

    def scale(self, c: int, modulus: int) -> "ModMatrix":
        return ModMatrix(self.rows, self.cols, {k: (v * c) % modulus for k, v in self.entries.items()})

    def add(self, other: "ModMatrix", modulus: int) -> "ModMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("shape mismatch")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = (acc.get(k, 0) + v) % modulus
        return ModMatrix(self.rows, self.cols, acc)

    def is_zero(self) -> bool:
        return not self.entries

    def nnz(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self) -> str:
        return f"ModMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# GF(p) echelon engine


def _dense_rref(a: np.ndarray, p: int, reduced: bool = True):
    """Row-echelon form of an int64 array mod p; returns (rows, pivot cols).

    Pivot selection: columns left to right, lowest-index row with a nonzero
    (hence unit) entry.  With reduced=True the output is the RREF.
    """
    a = np.ascontiguousarray(a % p)
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        below = a[r + 1 :, c]
        hit = np.nonzero(below)[0]
        if hit.size:
            rows = r + 1 + hit
            a[rows] = (a[rows] - np.outer(a[rows, c], a[r])) % p
        pivots.append(c)
        r += 1
    if reduced:
        for ri in range(len(pivots) - 1, -1, -1):
            ci = pivots[ri]
            above = a[:ri, ci]
            hit = np.nonzero(above)[0]
            if hit.size:
                a[hit] = (a[hit] - np.outer(a[hit, ci], a[ri])) % p
    return a[: len(pivots)], pivots


def _sparse_forward(rows: list[dict], cols: int, p: int):
    """Forward elimination on row dictionaries mod p.

    Returns (pivot_rows, pivot_cols) sorted by pivot column.  Hands the
    still-active rows to the dense engine once their fill passes 50%.
    """
    buckets: dict[int, list[dict]] = {}
    active = 0
    for row in rows:
        if row:
            buckets.setdefault(min(row), []).append(row)
            active += 1
    pivot_rows: list[dict] = []
    pivot_cols: list[int] = []
    steps = 0
    for c in range(cols):
        group = buckets.pop(c, None)
        if not group:
            continue
        piv = group[0]
        active -= 1
        inv = pow(piv[c], -1, p)
        if inv != 1:
            for j in list(piv):
                piv[j] = piv[j] * inv % p
        for other in group[1:]:
            f = other[c]
            for j, v in piv.items():
                w = (other.get(j, 0) - f * v) % p
                if w:
                    other[j] = w
                else:
                    other.pop(j, None)
            if other:
                buckets.setdefault(min(other), []).append(other)
            else:
                active -= 1
        pivot_rows.append(piv)
        pivot_cols.append(c)
        steps += 1
        if steps % _FILL_CHECK == 0 and active:
            live = [row for grp in buckets.values() for row in grp]
            fill = sum(len(row) for row in live) / (len(live) * cols)
            if fill > _DENSE_FILL:
                block = np.zeros((len(live), cols), dtype=np.int64)
                for i, row in enumerate(live):
                    for j, v in row.items():
                        block[i, j] = v
                sub, sub_piv = _dense_rref(block, p, reduced=False)
                for t, ci in enumerate(sub_piv):
                    pivot_rows.append({j: int(v) for j, v in enumerate(sub[t]) if v})
                    pivot_cols.append(ci)
                break
    order = sorted(range(len(pivot_cols)), key=lambda t: pivot_cols[t])
    return [pivot_rows[t] for t in order], [pivot_cols[t] for t in order]


def _echelon(mat: ModMatrix, p: int, reduced: bool = True):
    """Echelon rows of a matrix mod p as (list of row dicts, pivot columns)."""
    size = mat.rows * mat.cols
    if size and (size <= _SMALL_DENSE or mat.nnz() / size > _DENSE_FILL):
        arr, piv = _dense_rref(mat.to_dense(), p, reduced=reduced)
        rows = [{j: int(v) for j, v in enumerate(arr[i]) if v} for i in range(len(piv))]
        return rows, piv
    rows, pivcols = _sparse_forward(mat.row_dicts(), mat.cols, p)
    if reduced:
        for idx in range(len(rows) - 1, -1, -1):
            c = pivcols[idx]
            low = rows[idx]
            for up in range(idx):
                f = rows[up].get(c, 0)
                if f:
                    target = rows[up]
                    for j, v in low.items():
                        w = (target.get(j, 0) - f * v) % p
                        if w:
                            target[j] = w
                        else:
                            target.pop(j, None)
    return rows, pivcols


def rank(mat: ModMatrix, ctx: PrimeContext) -> int:
    """Rank over GF(p); requires k = 1."""
    if ctx.k != 1:
        raise ValueError("rank is a GF(p) operation; reduce the context first")
    _, piv = _echelon(mat, ctx.p, reduced=False)
    return len(piv)


def rank_kernel(mat: ModMatrix, ctx: PrimeContext):
    """(rank, kernel basis) of a matrix over GF(p).

    The kernel basis is in reduced echelon form: vector t has a 1 in its free
    column and zeros in every other free column, so the list is deterministic.
    """
    if ctx.k != 1:
        raise ValueError("rank_kernel is a GF(p) operation")
    p = ctx.p
    rows, pivcols = _echelon(mat, p, reduced=True)
    pivset = set(pivcols)
    basis = []
    for f in range(mat.cols):
        if f in pivset:
            continue
        vec = [0] * mat.cols
        vec[f] = 1
        for i, c in enumerate(pivcols):
            coef = rows[i].get(f, 0)
            if coef:
                vec[c] = -coef % p
        basis.append(tuple(vec))
    return len(pivcols), basis


# ---------------------------------------------------------------------------
# Z/p^k row reduction: Howell form


def howell_form(vectors: Iterable[Sequence[int]], cols: int, ctx: PrimeContext) -> list[tuple]:
    """Canonical Howell basis of the row span over Z/p^k.

    Rows come out in echelon order with pivots normalized to powers of p and
    entries above a pivot p^a reduced mod p^a.  Two generating sets span the
    same submodule iff their Howell forms are equal; over GF(p) this is the
    ordinary RREF.
    """
    pk = ctx.modulus
    p, k = ctx.p, ctx.k
    work: list[list[int]] = []
    for v in vectors:
        if len(v) != cols:
            raise DimensionMismatchError("generator length mismatch")
        w = [x % pk for x in v]
        if any(w):
            work.append(w)
    result: list[list[int]] = []
    pivcols: list[int] = []
    for c in range(cols):
        cand = [t for t, w in enumerate(work) if w[c] != 0 and not any(w[:c])]
        if not cand:
            continue
        t0 = min(cand, key=lambda t: (ctx.valuation(work[t][c]), t))
        piv = work.pop(t0)
        a = ctx.valuation(piv[c])
        unit = piv[c] // p**a
        inv = pow(unit, -1, pk)
        if inv != 1:
            piv = [(x * inv) % pk for x in piv]
        pa = p**a
        for t, w in enumerate(work):
            if w[c] != 0 and not any(w[:c]):
                q = w[c] // pa
                for j in range(c, cols):
                    w[j] = (w[j] - q * piv[j]) % pk
        work = [w for w in work if any(w)]
        result.append(piv)
        pivcols.append(c)
        if a > 0:
            shift = [(x * p ** (k - a)) % pk for x in piv]
            if any(shift):
                work.append(shift)
    # reduce entries above each pivot p^a to their residue mod p^a; increasing
    # pivot order keeps already-reduced columns untouched (later rows vanish
    # on earlier pivot columns)
    for t in range(len(result)):
        c = pivcols[t]
        pa = p ** ctx.valuation(result[t][c])
        for up in range(t):
            q = result[up][c] // pa
            if q:
                for j in range(c, cols):
                    result[up][j] = (result[up][j] - q * result[t][j]) % pk
    return [tuple(r) for r in result]


def howell_residue(vec: Sequence[int], basis: Sequence[Sequence[int]], ctx: PrimeContext, coeffs=None):
    """Residual of vec after reduction against Howell-form rows.

    Zero residual means membership.  Pass coeffs as a zero list of
    len(basis) to recover the combination used.
    """
    pk = ctx.modulus
    p = ctx.p
    v = [x % pk for x in vec]
    for t, row in enumerate(basis):
        c = next(j for j, x in enumerate(row) if x)
        x = v[c]
        if x == 0:
            continue
        a = ctx.valuation(row[c])
        if ctx.valuation(x) < a:
            continue
        q = x // p**a
        for j in range(c, len(v)):
            if row[j]:
                v[j] = (v[j] - q * row[j]) % pk
        if coeffs is not None:
            coeffs[t] = (coeffs[t] + q) % pk
    return tuple(v)


# ---------------------------------------------------------------------------
# Solving


def _solve_gf(mat: ModMatrix, b: Sequence[int], p: int) -> tuple:
    aug = np.zeros((mat.rows, mat.cols + 1), dtype=np.int64)
    for (i, j), v in mat.entries.items():
        aug[i, j] = v
    for i, v in enumerate(b):
        aug[i, mat.cols] = v % p
    rows, piv = _dense_rref(aug, p, reduced=True)
    x = [0] * mat.cols
    for t, c in enumerate(piv):
        if c == mat.cols:
            raise InconsistentSystemError("b is not in the column span")
        x[c] = int(rows[t][mat.cols])
    return tuple(x)


def solve(mat: ModMatrix, b: Sequence[int], ctx: PrimeContext) -> tuple:
    """One solution of M x = b over Z/p^k, or InconsistentSystemError.

    Deterministic: echelon pivots carry the solution and free variables stay
    zero.  Over GF(p) this is augmented RREF; over Z/p^k the Howell form of
    the column span with a coefficient trail.
    """
    if len(b) != mat.rows:
        raise DimensionMismatchError("right-hand side length mismatch")
    if ctx.k == 1:
        return _solve_gf(mat, b, ctx.p)
    pk = ctx.modulus
    n = mat.cols
    cols = mat.transpose().row_dicts()
    # augmented rows [column | unit coefficient tail]: Howell reductions then
    # record which combination of columns produced each basis row
    aug = []
    for j in range(n):
        row = [0] * (mat.rows + n)
        for i, v in cols[j].items():
            row[i] = v
        row[mat.rows + j] = 1
        aug.append(row)
    hf = howell_form(aug, mat.rows + n, ctx)
    reducers = [r for r in hf if any(r[: mat.rows])]
    stripped = [list(r[: mat.rows]) + [0] * n for r in reducers]
    coeffs = [0] * len(reducers)
    residual = howell_residue(list(b) + [0] * n, stripped, ctx, coeffs)
    if any(residual[: mat.rows]):
        raise InconsistentSystemError("b is not in the column span")
    x = [0] * n
    for q, r in zip(coeffs, reducers):
        if q:
            for j in range(n):
                if r[mat.rows + j]:
                    x[j] = (x[j] + q * r[mat.rows + j]) % pk
    return tuple(x)


def invert(mat: ModMatrix, ctx: PrimeContext) -> ModMatrix:
    """Inverse of a square matrix invertible over Z/p^k."""
    if mat.rows != mat.cols:
        raise DimensionMismatchError("only square matrices invert")
    n = mat.rows
    if ctx.k == 1:
        aug = np.zeros((n, 2 * n), dtype=np.int64)
        for (i, j), v in mat.entries.items():
            aug[i, j] = v
        for i in range(n):
            aug[i, n + i] = 1
        rows, piv = _dense_rref(aug, ctx.p, reduced=True)
        if piv != list(range(n)):
            raise InconsistentSystemError("matrix is singular over GF(p)")
        ent = {}
        for i in range(n):
            for j in range(n):
                v = int(rows[i][n + j])
                if v:
                    ent[(i, j)] = v
        return ModMatrix(n, n, ent)
    ent = {}
    for j in range(n):
        e = [0] * n
        e[j] = 1
        col = solve(mat, e, ctx)
        for i, v in enumerate(col):
            if v:
                ent[(i, j)] = v
    return ModMatrix(n, n, ent)


# ---------------------------------------------------------------------------
# Smith normal form over Z/p^k


@dataclass(frozen=True)
class SmithDecomposition:
    """M = U . D . V with U, V invertible and D = diag(p^a_i), a_i nondecreasing.

    Exponent k stands for the zero diagonal entry.  The exponent list is an
    invariant of M (uniqueness of the Smith form over the local ring Z/p^k).
    """

    exponents: tuple
    U: ModMatrix
    V: ModMatrix
    ctx: PrimeContext

    def diagonal(self, rows: int, cols: int) -> ModMatrix:
        p, k = self.ctx.p, self.ctx.k
        ent = {}
        for i, a in enumerate(self.exponents):
            if a < k:
                ent[(i, i)] = p**a
        return ModMatrix(rows, cols, ent)


def _valuation_array(a: np.ndarray, p: int, k: int) -> np.ndarray:
    val = np.zeros(a.shape, dtype=np.int64)
    val[a == 0] = k
    rem = a.copy()
    active = a != 0
    for _ in range(k - 1):
        div = active & (rem % p == 0)
        if not div.any():
            break
        val[div] += 1
        rem[div] //= p
        active = div
    return val


def smith_normal_form(mat: ModMatrix, ctx: PrimeContext) -> SmithDecomposition:
    """Smith decomposition M = U . D . V over Z/p^k.

    Pivoting takes the entry of minimal p-valuation, lowest (row, col) pair
    breaking ties, so D and the transforms are deterministic.
    """
    p, k, pk = ctx.p, ctx.k, ctx.modulus
    m, n = mat.rows, mat.cols
    a = mat.to_dense() % pk
    u = np.eye(m, dtype=np.int64)
    v = np.eye(n, dtype=np.int64)
    # invariant: mat == u . a . v (mod p^k) throughout
    exps: list[int] = []
    limit = min(m, n)
    s = 0
    while s < limit:
        sub = a[s:, s:]
        val = _valuation_array(sub, p, k)
        best = int(val.min())
        if best >= k:
            break
        i, j = np.argwhere(val == best)[0]
        i, j = int(i) + s, int(j) + s
        if i != s:
            a[[s, i]] = a[[i, s]]
            u[:, [s, i]] = u[:, [i, s]]
        if j != s:
            a[:, [s, j]] = a[:, [j, s]]
            v[[s, j]] = v[[j, s]]
        piv = int(a[s, s])
        pa = p**best
        unit = piv // pa
        inv = pow(unit, -1, pk)
        if inv != 1:
            a[s] = (a[s] * inv) % pk
            u[:, s] = (u[:, s] * unit) % pk
        col = a[s + 1 :, s]
        hit = np.nonzero(col)[0]
        if hit.size:
            rows = s + 1 + hit
            q = a[rows, s] // pa
            a[rows] = (a[rows] - np.outer(q, a[s])) % pk
            u[:, s] = (u[:, s] + u[:, rows] @ q) % pk
        rowtail = a[s, s + 1 :]
        hit = np.nonzero(rowtail)[0]
        if hit.size:
            cols_ = s + 1 + hit
            q = a[s, cols_] // pa
            a[:, cols_] = (a[:, cols_] - np.outer(a[:, s], q)) % pk
            v[s] = (v[s] + q @ v[cols_]) % pk
        exps.append(best)
        s += 1
    exps.extend([k] * (limit - len(exps)))
    return SmithDecomposition(
        tuple(exps),
        ModMatrix.from_rows(u.tolist(), pk),
        ModMatrix.from_rows(v.tolist(), pk),
        ctx,
    )


def snf_exponents(mat: ModMatrix, ctx: PrimeContext) -> tuple:
    """Diagonal exponents of the Smith form, zero entries reported as k."""
    return smith_normal_form(mat, ctx).exponents
