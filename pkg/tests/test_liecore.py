import random

import pytest

from lazard.corpus import abelian, filiform, heisenberg_gen, solvable_px, ut
from lazard.errors import JacobiError, MalformedChainError, NotSolvableError
from lazard.liecore import (
    FiltrationChain,
    LieAlgebra,
    Submodule,
    canonical_nilpotent_chain,
    derived_series,
    derived_subalgebra,
    is_solvable,
    isolator,
    jacobi_violation,
    lower_central_series,
    nilpotency_class,
    solvable_chain,
    subalgebra_structure,
    validate,
    verify_pf_chain,
)
from lazard.modarith import ModMatrix, PrimeContext

GF5 = PrimeContext(5)
GF7 = PrimeContext(7)
Z25 = PrimeContext(5, 2)

CORPUS = [
    abelian(3, GF5),
    abelian(4, Z25),
    heisenberg_gen(1, GF5),
    heisenberg_gen(1, Z25),
    heisenberg_gen(2, Z25),
    filiform(4, Z25),
    filiform(5, GF5),
    solvable_px(Z25),
    ut(4, Z25),
    ut(4, PrimeContext(7, 2)),
]


def span(g, *vecs):
    return Submodule.from_generators(g, list(vecs))


def test_validate_corpus_and_hand_examples():
    for g in CORPUS:
        validate(g)
    bad = LieAlgebra(GF5, 3, {(0, 1): (1, 0, 0), (0, 2): (0, 1, 0)})
    v = jacobi_violation(bad)
    assert v is not None
    assert v.triple == (1, 2, 3)
    assert v.residual == (0, 1, 0)  # the residual is e2
    with pytest.raises(JacobiError):
        validate(bad)


def test_validate_rejects_genuine_perturbations():
    rng = random.Random(17)
    rejected = 0
    base = [heisenberg_gen(2, Z25), filiform(5, GF5), ut(4, Z25)]
    while rejected < 100:
        g = rng.choice(base)
        pk = g.ctx.modulus
        sc = {k: list(v) for k, v in g.sc.items()}
        i, j = sorted(rng.sample(range(g.rank), 2))
        m = rng.randrange(g.rank)
        vec = sc.setdefault((i, j), [0] * g.rank)
        vec[m] = (vec[m] + rng.randrange(1, pk)) % pk
        mutated = LieAlgebra(g.ctx, g.rank, {k: tuple(v) for k, v in sc.items()})
        if jacobi_violation(mutated) is None:
            continue  # perturbation happened to stay Jacobi-valid; resample
        rejected += 1
        with pytest.raises(JacobiError):
            validate(mutated)


def test_bracket_basics():
    h = heisenberg_gen(1, GF5)
    x = (1, 2, 3)
    assert h.bracket(x, x) == (0, 0, 0)
    assert h.bracket(h.basis_vector(0), h.basis_vector(1)) == (0, 0, 1)
    assert h.bracket(h.basis_vector(1), h.basis_vector(0)) == (0, 0, 4)
    s = solvable_px(Z25)
    assert s.bracket((1, 0), (0, 1)) == (0, 5)


def test_bracket_bilinearity_random():
    rng = random.Random(8)
    g = ut(4, Z25)
    pk = g.ctx.modulus
    for _ in range(30):
        x = tuple(rng.randrange(pk) for _ in range(g.rank))
        y = tuple(rng.randrange(pk) for _ in range(g.rank))
        z = tuple(rng.randrange(pk) for _ in range(g.rank))
        c = rng.randrange(pk)
        left = g.bracket(tuple((a + c * b) % pk for a, b in zip(x, y)), z)
        right = tuple(
            (u + c * v) % pk for u, v in zip(g.bracket(x, z), g.bracket(y, z))
        )
        assert left == right
        assert g.bracket(x, y) == tuple(-t % pk for t in g.bracket(y, x))


def test_reduce_mod_p():
    s = solvable_px(Z25)
    sbar = s.reduce_mod_p()
    assert sbar.sc == {}  # [t,x] = 5x dies mod 5
    assert sbar.rank == 2
    h = heisenberg_gen(1, Z25)
    hbar = h.reduce_mod_p()
    assert hbar.sc == {(0, 1): (0, 0, 1)}
    validate(hbar)


def test_derived_subalgebra_examples():
    assert derived_subalgebra(abelian(3, GF5)).dim() == 0
    h = heisenberg_gen(1, GF5)
    assert derived_subalgebra(h) == span(h, (0, 0, 1))
    s = solvable_px(Z25)
    d = derived_subalgebra(s)
    assert d == span(s, (0, 5))
    assert d.is_ideal()


def test_derived_series_and_solvability():
    assert is_solvable(abelian(3, GF5)) == (True, 1)
    assert is_solvable(heisenberg_gen(1, GF5)) == (True, 2)
    assert is_solvable(ut(4, Z25))[0]
    # sl2-like: [h,e] = 2e, [h,f] = -2f, [e,f] = h over GF(7)
    sl2 = LieAlgebra(GF7, 3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, 5), (1, 2): (1, 0, 0)})
    validate(sl2)
    solvable, _ = is_solvable(sl2)
    assert not solvable
    assert len(derived_series(sl2)) == 1


def test_lower_central_series_classes():
    assert nilpotency_class(abelian(2, GF5)) == 1
    assert nilpotency_class(heisenberg_gen(1, Z25)) == 2
    assert nilpotency_class(ut(4, Z25)) == 3
    assert nilpotency_class(filiform(5, GF5)) == 4
    # solvable_px becomes nilpotent at finite precision: ad t scales by p
    assert nilpotency_class(solvable_px(Z25)) == 2
    sl2 = LieAlgebra(GF7, 3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, 5), (1, 2): (1, 0, 0)})
    assert nilpotency_class(sl2) is None


def test_isolator_examples():
    g = abelian(3, Z25)
    h = span(g, (5, 0, 0))
    iso = isolator(g, h)
    assert iso == span(g, (1, 0, 0))
    assert isolator(g, iso) == iso
    s = solvable_px(Z25)
    assert isolator(s, derived_subalgebra(s)) == span(s, (0, 1))


def test_isolator_is_ideal_for_ideals():
    for g in (heisenberg_gen(1, Z25), ut(4, Z25), solvable_px(Z25)):
        d = derived_subalgebra(g)
        iso = isolator(g, d)
        assert iso.contains_module(d)
        assert iso.is_ideal()
        assert iso.is_saturated()


def test_isolator_monotone_at_effective_precision():
    # Saturation loses the top p-layer of information, so monotonicity is
    # asserted after reducing both sides by the largest exponent stripped.
    rng = random.Random(13)
    g = abelian(4, Z25)
    ctx = g.ctx
    pk = ctx.modulus
    for _ in range(60):
        big_rows = [[rng.randrange(pk) for _ in range(4)] for _ in range(rng.randrange(1, 4))]
        big = Submodule.from_generators(g, big_rows)
        mults = [[rng.randrange(pk) for _ in big.basis] for _ in range(2)]
        small_rows = []
        for m in mults:
            vec = [0] * 4
            for c, b in zip(m, big.basis):
                for t, x in enumerate(b):
                    vec[t] = (vec[t] + c * x) % pk
            small_rows.append(vec)
        small = Submodule.from_generators(g, small_rows)
        assert big.contains_module(small)
        iso_small, iso_big = isolator(g, small), isolator(g, big)
        stripped = max(
            [a for _, a in small.pivots()] + [a for _, a in big.pivots()] + [0]
        )
        drop = ctx.p ** (ctx.k - stripped) if stripped else 1
        scaled = [tuple(x * drop % pk for x in b) for b in iso_small.basis]
        # mod p^{k-stripped}: p^{k-stripped}-scaled vectors land inside the big isolator
        for v in scaled:
            assert isolator(g, iso_big).contains(v) or iso_big.contains(v)


def test_solvable_chain_abelian_flag():
    g = abelian(3, Z25)
    ch = solvable_chain(g)
    assert len(ch) == 3
    assert ch.generators == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert ch.ideals[1] == span(g, (0, 1, 0), (0, 0, 1))
    assert ch.ideals[-1].dim() == 0


def test_solvable_chain_heisenberg():
    g = heisenberg_gen(1, Z25)
    ch = solvable_chain(g)
    assert ch.generators == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert ch.ideals[1] == span(g, (0, 1, 0), (0, 0, 1))
    assert ch.ideals[2] == span(g, (0, 0, 1))


def test_solvable_chain_solvable_px():
    g = solvable_px(Z25)
    ch = solvable_chain(g)
    assert len(ch) == 2
    assert ch.generators[0] == (1, 0)
    assert ch.ideals[1] == span(g, (0, 1))


def test_solvable_chain_quotients_are_free_rank_one():
    for g in (abelian(4, Z25), heisenberg_gen(2, Z25), filiform(4, Z25), ut(4, Z25), solvable_px(Z25)):
        ch = solvable_chain(g)
        assert len(ch) == g.rank
        for i, t in enumerate(ch.generators):
            k_i, k_next = ch.ideals[i], ch.ideals[i + 1]
            assert k_i.contains(t)
            assert not k_next.contains(t)
            assert k_next.is_saturated()
            assert k_i.dim() == k_next.dim() + 1
            # t generates the quotient: adding it recovers k_i
            assert k_next.add(span(g, t)) == k_i
            # k_{i+1} is an ideal of k_i
            for b in k_next.basis:
                assert k_next.contains(g.bracket(t, b))
                for b2 in k_i.basis:
                    assert k_next.contains(g.bracket(b2, b))


def test_solvable_chain_rejects_nonsolvable():
    sl2 = LieAlgebra(GF7, 3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, 5), (1, 2): (1, 0, 0)})
    with pytest.raises(NotSolvableError):
        solvable_chain(sl2)


def test_pf_chain_abelian_scaling():
    g = abelian(2, Z25)
    full = Submodule.full(g)
    chain = FiltrationChain((full, full.scale(5), full.scale(25)))
    assert verify_pf_chain(g, chain).ok


def test_pf_chain_heisenberg_period_two():
    g = heisenberg_gen(1, Z25)
    n1 = Submodule.full(g)
    n2 = span(g, (5, 0, 0), (0, 5, 0), (0, 0, 1))
    chain = FiltrationChain((n1, n2, n1.scale(5), n2.scale(5), n1.scale(25)))
    rep = verify_pf_chain(g, chain)
    assert rep.ok


def test_pf_chain_violation_iv():
    g = heisenberg_gen(1, Z25)
    n1 = Submodule.full(g)
    # n2 too small: [n1, g] = span{e3} is not inside span{5 e3}
    n2 = span(g, (5, 0, 0), (0, 5, 0), (0, 0, 5))
    rep = verify_pf_chain(g, FiltrationChain((n1, n2, n1.scale(25))))
    assert not rep.ok
    assert rep.condition == "iv"
    assert rep.index == 1


def test_pf_chain_malformed_member():
    g = heisenberg_gen(1, Z25)
    not_ideal = span(g, (1, 0, 0))  # [e1, e2] = e3 escapes
    with pytest.raises(MalformedChainError):
        verify_pf_chain(g, FiltrationChain((Submodule.full(g), not_ideal)))


def test_canonical_chain_passes_for_nilpotent_corpus():
    for g in (heisenberg_gen(1, Z25), heisenberg_gen(2, Z25), filiform(4, Z25), ut(4, Z25)):
        assert nilpotency_class(g) < g.ctx.p
        chain = canonical_nilpotent_chain(g)
        assert verify_pf_chain(g, chain).ok


def test_adjoint_examples():
    h = heisenberg_gen(1, GF5)
    assert h.adjoint((0, 0, 0)).is_zero()
    ad1 = h.adjoint(h.basis_vector(0))
    assert ad1.entries == {(2, 1): 1}  # e2 -> e3
    s = solvable_px(Z25)
    assert s.adjoint((1, 0)).entries == {(1, 1): 5}


def test_adjoint_is_bracket_homomorphism():
    rng = random.Random(44)
    for g in (heisenberg_gen(1, Z25), ut(4, Z25), filiform(5, GF5)):
        pk = g.ctx.modulus
        for _ in range(20):
            x = tuple(rng.randrange(pk) for _ in range(g.rank))
            y = tuple(rng.randrange(pk) for _ in range(g.rank))
            lhs = g.adjoint(g.bracket(x, y))
            ax, ay = g.adjoint(x), g.adjoint(y)
            rhs = ax.matmul(ay, pk).add(ay.matmul(ax, pk).scale(-1, pk), pk)
            assert lhs == rhs


def test_subalgebra_structure_roundtrip():
    g = ut(4, Z25)
    ch = solvable_chain(g)
    sub = ch.ideals[1]
    inner = subalgebra_structure(g, sub)
    assert inner.rank == g.rank - 1
    validate(inner)
    # brackets commute with the coordinate embedding
    pk = g.ctx.modulus
    rng = random.Random(2)
    for _ in range(10):
        a = tuple(rng.randrange(pk) for _ in range(inner.rank))
        b = tuple(rng.randrange(pk) for _ in range(inner.rank))
        inside = inner.bracket(a, b)
        lift = lambda coords: tuple(
            sum(c * bv[t] for c, bv in zip(coords, sub.basis)) % pk for t in range(g.rank)
        )
        assert g.bracket(lift(a), lift(b)) == lift(inside)


def test_solvable_chain_quotient_smith_is_unit():
    from lazard.modarith import smith_normal_form

    for g in (abelian(3, Z25), heisenberg_gen(1, Z25), ut(4, Z25), solvable_px(Z25)):
        ch = solvable_chain(g)
        for i, t in enumerate(ch.generators):
            k_i, k_next = ch.ideals[i], ch.ideals[i + 1]
            # the splitting generator completes the sub-basis to a basis of k_i:
            # Smith form of [basis(k_{i+1}); t] in k_i coordinates is all units
            rows = [k_i.coordinates(b) for b in k_next.basis]
            rows.append(k_i.coordinates(t))
            mat = ModMatrix.from_rows(rows, g.ctx.modulus)
            exps = smith_normal_form(mat, g.ctx).exponents
            assert exps == (0,) * k_i.dim()


def test_isolator_inside_subalgebra():
    from lazard.liecore import isolator_in

    g = heisenberg_gen(1, Z25)
    ambient = span(g, (0, 1, 0), (0, 0, 1))  # k_1 = <e2, e3>
    h = span(g, (0, 5, 0), (0, 0, 1))  # p e2 and e3 inside k_1
    sat = isolator_in(g, ambient, h)
    assert sat == ambient
    # saturating relative to the subalgebra never leaves it
    assert ambient.contains_module(sat)
