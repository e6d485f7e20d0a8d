"""Acceptance suite: one test per criterion, one pass/fail line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is exact (integer equality), every timing bound is
asserted with time.monotonic.
"""

import random
import time
from fractions import Fraction

from lazard.bch import (
    LinearOperator,
    bch_table,
    group_mul,
    log_exp_series,
    tree_expand,
    truncated_exp,
    truncated_log,
)
from lazard.cohomology import (
    LieModule,
    betti,
    ce_complex,
    cup_product,
    integral_profile,
    uct_reconcile,
    eckmann_shapiro_check,
)
from lazard.corpus import abelian, filiform, heisenberg_gen, solvable_px, ut
from lazard.lhs import (
    GROUP,
    LIE,
    coinvariants_dim,
    invariants_dim,
    lemma_abelian_check,
    main_theorem_check,
)
from lazard.liecore import LieAlgebra
from lazard.modarith import ModMatrix, PrimeContext, invert, rank


def _report(criterion, message):
    print(f"[acceptance] criterion {criterion}: PASS  {message}")


def _random_unipotent(rng, ctx, dim):
    """I + g N g^-1 with Jordan blocks of size <= p and a permuted unit-triangular g."""
    pk = ctx.modulus
    ent = {}
    at = 0
    while at < dim:
        s = min(dim - at, rng.randrange(1, ctx.p + 1))
        for t in range(s - 1):
            ent[(at + t, at + t + 1)] = 1
        at += s
    nil = ModMatrix(dim, dim, ent)
    perm = list(range(dim))
    rng.shuffle(perm)
    rows = [[0] * dim for _ in range(dim)]
    for i in range(dim):
        rows[perm[i]][i] = 1
        for j in range(i):
            rows[perm[i]][j] = rng.randrange(pk)
    g = ModMatrix.from_rows(rows)
    conj = g.matmul(nil, pk).matmul(invert(g, ctx), pk)
    return LinearOperator(ctx, ModMatrix.identity(dim).add(conj, pk))


def _random_ut_subalgebra(rng, ctx, n):
    full = ut(n, ctx)
    pairs = n * (n - 1) // 2
    keep = set(rng.sample(range(pairs), rng.randrange(2, pairs)))
    changed = True
    while changed:
        changed = False
        for s in list(keep):
            for t in list(keep):
                for m, c in enumerate(full.basis_bracket(s, t)):
                    if c and m not in keep:
                        keep.add(m)
                        changed = True
    sub = sorted(keep)
    reindex = {m: t for t, m in enumerate(sub)}
    sc = {}
    for s in sub:
        for t in sub:
            if s < t:
                vec = full.basis_bracket(s, t)
                if any(vec):
                    out = [0] * len(sub)
                    for m, c in enumerate(vec):
                        if c:
                            out[reindex[m]] = c
                    sc[(reindex[s], reindex[t])] = tuple(out)
    return LieAlgebra(ctx, len(sub), sc)


def test_criterion_1_heisenberg_reproduction():
    for p in (5, 7, 11):
        start = time.monotonic()
        g = heisenberg_gen(1, PrimeContext(p, 2))
        report = main_theorem_check(g)
        assert report.passed
        assert report.group_betti == (1, 2, 2, 1)
        assert report.lie_betti == (1, 2, 2, 1)
        assert report.direct_betti == (1, 2, 2, 1)
        cx = ce_complex(g.reduce_mod_p())
        h1 = cx.cohomology(1)
        h2 = cx.cohomology(2)
        x, y = h1.representatives
        big_x, big_y = h2.representatives
        zero2 = (0,) * cx.betti(2)
        zero3 = (0,) * cx.betti(3)
        assert cup_product(cx, 1, x, 1, y) == zero2  # x.y = 0
        assert cup_product(cx, 1, x, 2, big_x) == zero3  # x.X = 0
        assert cup_product(cx, 1, y, 2, big_y) == zero3  # y.Y = 0
        assert cup_product(cx, 2, big_x, 2, big_y) == ()  # X.Y = 0 past top degree
        xy_ = cup_product(cx, 1, x, 2, big_y)
        yx_ = cup_product(cx, 1, y, 2, big_x)
        assert any(xy_) and any(yx_)  # x.Y and y.X generate H^3
        scale = next(
            s for s in range(1, p) if all((s * a) % p == b for a, b in zip(xy_, yx_))
        )
        elapsed = time.monotonic() - start
        assert elapsed < 1.0
        _report(1, f"p={p}: columns (1,2,2,1); ring relations hold, y.X = {scale} * x.Y ({elapsed:.2f}s)")


def test_criterion_2_main_theorem_suite():
    start = time.monotonic()
    suite = []
    for n in range(1, 7):
        suite.append(abelian(n, PrimeContext(5, 2)))
    suite.append(heisenberg_gen(1, PrimeContext(5, 2)))
    suite.append(heisenberg_gen(2, PrimeContext(5, 2)))
    for n in range(2, 6):
        suite.append(filiform(n, PrimeContext(5, 2)))
    suite.append(ut(4, PrimeContext(5, 2)))
    suite.append(ut(4, PrimeContext(7, 2)))
    suite.append(ut(5, PrimeContext(7, 2)))
    suite.append(solvable_px(PrimeContext(5, 2)))
    suite.append(abelian(6, PrimeContext(7, 2)))
    suite.append(filiform(5, PrimeContext(7, 2)))
    for g in suite:
        report = main_theorem_check(g)
        assert report.passed, (g.name, report)
    elapsed = time.monotonic() - start
    assert elapsed < 30.0
    _report(2, f"{len(suite)} algebras, three columns equal everywhere ({elapsed:.1f}s)")


def test_criterion_3_lemma_abelian_property_suite():
    rng = random.Random(20260810)
    start = time.monotonic()
    total = 0
    for p in (5, 7):
        ctx = PrimeContext(p)
        for dim in range(2, 13):
            for _ in range(200):
                u = _random_unipotent(rng, ctx, dim)
                umi = u.minus_identity()
                assert lemma_abelian_check(u)
                log = truncated_log(u)
                assert invariants_dim(u, GROUP) == dim - rank(log.matrix, ctx)
                assert coinvariants_dim(u, GROUP) == coinvariants_dim(
                    LinearOperator(ctx, log.matrix), LIE
                )
                assert truncated_exp(log) == u  # Lazard round-trip
                total += 1
    elapsed = time.monotonic() - start
    assert total == 2 * 11 * 200
    _report(3, f"{total} unipotent operators: kernel/coinvariant match and exp(log U) = U ({elapsed:.1f}s)")


def test_criterion_4_ce_correctness():
    start = time.monotonic()
    nilpotent_corpus = [
        abelian(3, PrimeContext(5)),
        abelian(5, PrimeContext(5)),
        heisenberg_gen(1, PrimeContext(5)),
        heisenberg_gen(2, PrimeContext(5)),
        filiform(3, PrimeContext(5)),
        filiform(4, PrimeContext(5)),
        filiform(5, PrimeContext(5)),
        ut(4, PrimeContext(5)),
        ut(4, PrimeContext(7)),
        ut(5, PrimeContext(7)),
    ]
    for g in nilpotent_corpus:
        cx = ce_complex(g)  # construction verifies d.d = 0 in every degree
        b = cx.betti_numbers()
        assert sum((-1) ** n * v for n, v in enumerate(b)) == 0
        assert b == tuple(reversed(b))  # Poincare duality, nilpotent entries
    rng = random.Random(4)
    randoms = 0
    while randoms < 50:
        p = rng.choice((5, 7))
        n = 5 if p == 7 and rng.random() < 0.4 else 4
        g = _random_ut_subalgebra(rng, PrimeContext(p), n)
        cx = ce_complex(g)
        b = cx.betti_numbers()
        assert sum((-1) ** t * v for t, v in enumerate(b)) == 0
        assert b == tuple(reversed(b))
        randoms += 1
    elapsed = time.monotonic() - start
    _report(4, f"d.d = 0, Euler 0, duality on {len(nilpotent_corpus)} corpus + {randoms} random algebras ({elapsed:.1f}s)")


def test_criterion_5_bch_certification():
    start = time.monotonic()
    for p in (5, 7):
        table = bch_table(PrimeContext(p), p - 1)
        oracle = log_exp_series(p - 1)
        for d in range(1, p):
            acc = {}
            for tree, c, _ in table.terms[d - 1]:
                for w, v in tree_expand(tree).items():
                    nv = acc.get(w, Fraction(0)) + c * v
                    if nv:
                        acc[w] = nv
                    else:
                        acc.pop(w, None)
            assert acc == oracle[d]
        deg2 = {tree: c for tree, c, _ in table.terms[1]}
        assert deg2 == {(0, 1): Fraction(1, 2)}
        for _, c, _ in table.all_terms():
            assert c.denominator % p != 0
    rng = random.Random(9)
    algebras = [
        abelian(3, PrimeContext(5, 2)),
        heisenberg_gen(1, PrimeContext(5, 2)),
        heisenberg_gen(2, PrimeContext(5, 2)),
        filiform(4, PrimeContext(5, 2)),
        filiform(5, PrimeContext(5)),
        ut(4, PrimeContext(5, 2)),
        ut(4, PrimeContext(7, 2)),
        solvable_px(PrimeContext(5, 2)),
    ]
    for g in algebras:
        pk = g.ctx.modulus
        for _ in range(50):
            x, y, z = (tuple(rng.randrange(pk) for _ in range(g.rank)) for _ in range(3))
            assert group_mul(g, group_mul(g, x, y), z) == group_mul(g, x, group_mul(g, y, z))
    elapsed = time.monotonic() - start
    _report(5, f"table = oracle through degree p-1 (p=5,7); associativity on {len(algebras)} x 50 triples ({elapsed:.1f}s)")


def test_criterion_6_dim_one_base_cases():
    rng = random.Random(112)
    ctx = PrimeContext(5)
    g = abelian(1, ctx)
    checked = 0
    for _ in range(20):
        d = rng.randrange(1, 5)
        s = ModMatrix.from_rows([[rng.randrange(5) for _ in range(d)] for _ in range(d)])
        module = LieModule(ctx, d, [s])
        b = betti(g, module)
        # brute-force oracles over all p^d vectors
        fixed_lie = sum(
            1
            for code in range(5**d)
            if not any(s.apply([(code // 5**t) % 5 for t in range(d)], 5))
        )
        assert 5 ** b[0] == fixed_lie  # H^0 = V^g
        assert b[1] == d - rank(s, ctx)  # H^1 = V / S V
        assert len(b) == 2  # H^{>=2} = 0 for a rank-one algebra
        # group side: a random invertible sigma-action
        while True:
            u = ModMatrix.from_rows([[rng.randrange(5) for _ in range(d)] for _ in range(d)])
            if rank(u, ctx) == d:
                break
        op = LinearOperator(ctx, u)
        fixed_grp = sum(
            1
            for code in range(5**d)
            if op.apply([(code // 5**t) % 5 for t in range(d)])
            == tuple((code // 5**t) % 5 for t in range(d))
        )
        assert 5 ** invariants_dim(op, GROUP) == fixed_grp  # H^0 = V^G
        images = {
            tuple(
                (a - b) % 5
                for a, b in zip(
                    op.apply([(code // 5**t) % 5 for t in range(d)]),
                    [(code // 5**t) % 5 for t in range(d)],
                )
            )
            for code in range(5**d)
        }
        assert 5 ** (d - coinvariants_dim(op, GROUP)) == len(images)  # H^1 = V/(sigma-1)V
        checked += 1
    _report(6, f"{checked} random modules: invariants and coinvariants match brute force, H^2 vanishes")


def test_criterion_7_eckmann_shapiro_and_uct():
    start = time.monotonic()
    count = 0
    for k in (2, 3):
        suite = [
            abelian(4, PrimeContext(5, k)),
            heisenberg_gen(1, PrimeContext(5, k)),
            heisenberg_gen(2, PrimeContext(5, k)),
            filiform(4, PrimeContext(5, k)),
            filiform(5, PrimeContext(5, k)),
            ut(4, PrimeContext(5, k)),
            solvable_px(PrimeContext(5, k)),
            heisenberg_gen(1, PrimeContext(7, k)),
            ut(4, PrimeContext(7, k)),
        ]
        for g in suite:
            assert eckmann_shapiro_check(g), (g.name, k)
            assert uct_reconcile(g), (g.name, k)
            count += 1
    elapsed = time.monotonic() - start
    _report(7, f"{count} (algebra, k) pairs: precision-k Betti = mod-p Betti and UCT reconciles ({elapsed:.1f}s)")


def test_criterion_8_scale():
    start = time.monotonic()
    b10 = betti(ut(5, PrimeContext(7)))
    t10 = time.monotonic() - start
    assert t10 < 5.0
    assert sum((-1) ** n * v for n, v in enumerate(b10)) == 0
    assert b10 == tuple(reversed(b10))
    start = time.monotonic()
    b14 = betti(filiform(14, PrimeContext(5)))
    t14 = time.monotonic() - start
    assert t14 < 120.0
    assert sum((-1) ** n * v for n, v in enumerate(b14)) == 0
    assert b14 == tuple(reversed(b14))
    _report(8, f"rank 10 in {t10:.2f}s (< 5s), rank 14 in {t14:.2f}s (< 2min)")
