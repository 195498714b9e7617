import random

import pytest
from hypothesis import given, strategies as st

from surgobs import intlin
from surgobs.forms import (ContextMismatch, DimensionMismatch, Equivalence, EquivalenceSearch, InvalidForm, Simpleness,
                           UnsupportedGroup, bounded_equivalence, eval_lambda, eval_mu, form_over_z,
                           hyperbolic, is_isometry, lam_compose, lam_from_int, lam_identity, lam_inverse,
                           make_form, mu_lift, orthogonal_sum, radical, restrict, simpleness)
from surgobs.group_ring import GroupContext, Variant, cyclic_group, multiply
from surgobs.samples import random_form, random_ring_vector

Z = GroupContext.integers()
Z2 = GroupContext.of(cyclic_group(2))
Z2w = GroupContext.of(cyclic_group(2), [1, -1])


def test_hyperbolic_examples():
    H = hyperbolic(1, 1)
    assert [[x.coeffs[0] for x in r] for r in H.lam] == [[0, 1], [1, 0]]
    assert all(m.is_zero() for m in H.mu)
    assert hyperbolic(0, 1).rank == 0
    Hm = hyperbolic(1, -1)
    assert [[x.coeffs[0] for x in r] for r in Hm.lam] == [[0, 1], [-1, 0]]
    assert orthogonal_sum(H, H) == hyperbolic(2, 1)
    assert orthogonal_sum(H, hyperbolic(0, 1)) == H


def test_eval_examples():
    H = hyperbolic(1, 1)
    ef = H.vector([1, 1])
    assert eval_lambda(H, ef, ef) == Z.scalar(2)
    assert eval_lambda(H, H.vector([0, 0]), ef).is_zero()
    Hm = hyperbolic(1, -1)
    assert eval_lambda(Hm, ef, ef).is_zero()
    assert eval_mu(H, ef).canonical == (1,)
    assert eval_mu(H, H.vector([2, 0])).is_zero()
    assert eval_mu(Hm, ef).canonical == (1,)
    with pytest.raises(DimensionMismatch):
        eval_lambda(H, [Z.one()], ef)


def test_construction_rejects_bad_forms():
    with pytest.raises(InvalidForm):
        form_over_z(1, Variant.MU, [[0, 1], [2, 0]], [0, 0])
    # mu = 1 is incompatible with lambda(b, b) = 0 when eps = +1
    Q = Z.quotient(1, Variant.MU)
    with pytest.raises(InvalidForm):
        make_form(Z, 1, Variant.MU, lam_from_int(Z, [[0]]), [Q.element([1])])
    with pytest.raises(ContextMismatch):
        orthogonal_sum(hyperbolic(1, 1), hyperbolic(1, -1))


CASES = [(ctx, eps, var) for ctx in (Z, Z2, Z2w) for eps in (1, -1) for var in Variant]


@given(st.integers(0, 10 ** 9), st.sampled_from(CASES), st.integers(1, 3))
def test_axiom_iv_and_lift_identity(seed, case, n):
    ctx, eps, variant = case
    rng = random.Random(seed)
    F = random_form(rng, ctx, eps, variant, n)
    v, w = random_ring_vector(rng, ctx, n), random_ring_vector(rng, ctx, n)
    Q = F.quotient
    s = [a + b for a, b in zip(v, w)]
    assert eval_mu(F, s) == Q.add(Q.add(eval_mu(F, v), eval_mu(F, w)), Q.canonicalize(eval_lambda(F, v, w)))
    m = mu_lift(F, v)
    assert Q.canonicalize(m) == eval_mu(F, v)
    if variant is Variant.MU:
        assert eval_lambda(F, v, v) == m + eps * m.bar()
    else:
        assert Q.compatible(eval_lambda(F, v, v), eval_mu(F, v))
    # axiom v) for a group element g
    g = ctx.element(rng.randrange(ctx.order), rng.choice([1, -1]))
    gv = [multiply(g, x) for x in v]
    assert eval_mu(F, gv) == Q.canonicalize(multiply(multiply(g, m), g.bar()))
    # sesquilinearity
    assert eval_lambda(F, gv, w) == multiply(g, eval_lambda(F, v, w))
    assert eval_lambda(F, v, w) == eps * eval_lambda(F, w, v).bar()


def test_radical_examples():
    assert radical(hyperbolic(1, 1)).rank == 0
    Z0 = form_over_z(1, Variant.MU, [[0, 0], [0, 0]], [0, 0])
    assert radical(Z0).rank == 2
    Q = Z.quotient(-1, Variant.MU)
    F = make_form(Z, -1, Variant.MU, lam_from_int(Z, [[0]]), [Q.element([1])])
    G = orthogonal_sum(F, hyperbolic(1, -1))
    R = radical(G)
    # the lambda-kernel is <b_0>; mu(b_0) = 1 but mu(2 b_0) = 0
    assert R.rank == 1 and R.vectors() == [[2, 0, 0]]
    with pytest.raises(UnsupportedGroup):
        radical(hyperbolic(1, 1, Z2))


@given(st.integers(0, 10 ** 9), st.sampled_from([1, -1]))
def test_radical_membership(seed, eps):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    F = random_form(rng, Z, eps, Variant.MU, n)
    # force a kernel by summing with a zero block
    Q = F.quotient
    zero_mu = [Q.element([rng.randint(0, 1)]) if eps == -1 else Q.element([0])]
    G = orthogonal_sum(F, make_form(Z, eps, Variant.MU, lam_from_int(Z, [[0]]), zero_mu))
    R = radical(G)
    for v in R.vectors():
        x = G.vector(v)
        assert eval_mu(G, x).is_zero()
        assert all(eval_lambda(G, x, G.basis_vector(j)).is_zero() for j in range(G.rank))
    assert R.rank >= 1 or not zero_mu[0].is_zero()


def test_is_isometry_examples():
    H = hyperbolic(1, 1)
    assert is_isometry(lam_identity(Z, 2), H, H)
    for eps in (1, -1):
        Hm = hyperbolic(1, eps)
        flip = lam_from_int(Z, [[0, 1], [eps, 0]])
        assert is_isometry(flip, Hm, Hm)
    assert not is_isometry(lam_from_int(Z, [[2, 0], [0, 1]]), H, H)
    with pytest.raises(DimensionMismatch):
        is_isometry(lam_from_int(Z, [[1]]), H, H)


@given(st.integers(0, 10 ** 9))
def test_isometries_closed(seed):
    from surgobs.odd_l import OddVariant, generator_matrix, search_generators
    rng = random.Random(seed)
    eps = rng.choice([1, -1])
    r = rng.randint(1, 2)
    H = hyperbolic(r, eps)
    gens = [generator_matrix(g, Z, eps, r, OddVariant.RU) for g in search_generators(r, eps)]
    A, B = rng.choice(gens), rng.choice(gens)
    AB = lam_compose(A, B, Z)
    assert is_isometry(AB, H, H)
    assert is_isometry(lam_inverse(AB, Z), H, H)


def test_restrict_and_simpleness():
    H = hyperbolic(2, 1)
    R = restrict(H, [H.vector([1, 0, 0, 0]), H.vector([0, 1, 0, 0])])
    assert R == hyperbolic(1, 1)
    assert simpleness(lam_identity(Z, 2), Z) is Simpleness.SIMPLE
    t = Z2.element(1)
    M = [[t, Z2.zero()], [Z2.scalar(3), Z2.one()]]
    assert simpleness(M, Z2) is Simpleness.SIMPLE


def test_bounded_equivalence():
    H = hyperbolic(1, 1)
    assert bounded_equivalence(H, H) is Equivalence.PROVEN_EQUAL
    D = form_over_z(1, Variant.MU, [[2, 0], [0, -2]], [1, -1])
    assert bounded_equivalence(H, D) is Equivalence.PROVEN_DISTINCT
    swapped = form_over_z(1, Variant.MU, [[0, 1], [1, 0]], [0, 0])
    assert bounded_equivalence(H, swapped) is Equivalence.PROVEN_EQUAL
    # [[2,1],[1,0]] is H in another basis
    G = form_over_z(1, Variant.MU, [[2, 1], [1, 0]], [1, 0])
    assert bounded_equivalence(H, G) is Equivalence.PROVEN_EQUAL
    # stable: the zero rank form against H
    assert bounded_equivalence(hyperbolic(0, 1), H) is Equivalence.PROVEN_EQUAL
    # H in a basis whose change needs entries beyond the bound: inconclusive
    P = [[3, 2], [4, 3]]
    L = intlin.matmul(intlin.matmul(intlin.transpose(P, 2, 2), [[0, 1], [1, 0]]), P)
    far = form_over_z(1, Variant.MU, L, [L[0][0] // 2, L[1][1] // 2])
    cfg = EquivalenceSearch(max_stabilization=0, entry_bound=1)
    assert bounded_equivalence(H, far, cfg) is Equivalence.UNKNOWN
    assert bounded_equivalence(H, far, EquivalenceSearch(max_stabilization=0, entry_bound=4)) is Equivalence.PROVEN_EQUAL


def test_json_roundtrip():
    rng = random.Random(5)
    for ctx, eps, var in CASES:
        F = random_form(rng, ctx, eps, var, 3)
        from surgobs.forms import EpsQuadraticForm
        assert EpsQuadraticForm.from_json(F.to_json(), ctx) == F
