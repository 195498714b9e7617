import itertools
import math

import pytest
from hypothesis import given, strategies as st

from surgobs import complete_intersection as ci
from surgobs.complete_intersection import (DimensionTooSmall, InvalidDegree, MultiDegree,
                                           PredicateVariant, TruncatedSeries, Verdict)
from surgobs.forms import DimensionMismatch


def coefficient_oracle(N, sq_degrees, k):
    """[x^k] (1 + x)^N / prod (1 + a x) by summing over exponent vectors."""
    total = 0
    r = len(sq_degrees)
    for ks in itertools.product(range(k + 1), repeat=r):
        s = sum(ks)
        if s > k:
            continue
        term = math.comb(N, k - s)
        for a, j in zip(sq_degrees, ks):
            term *= (-a) ** j
        total += term
    return total


def chi_oracle(n, degrees):
    degrees = [d for d in degrees if d != 1]
    N = n + len(degrees) + 1
    return math.prod(degrees) * coefficient_oracle(N, degrees, n)


def pont_oracle(n, degrees):
    degrees = [d for d in degrees if d != 1]
    N = n + len(degrees) + 1
    return [coefficient_oracle(N, [d * d for d in degrees], k) for k in range(1, n // 2 + 1)]


def test_oracle_frozen_values():
    assert chi_oracle(3, [8]) == -2096
    assert chi_oracle(3, [4, 2]) == -176
    assert chi_oracle(3, [5]) == -200
    assert chi_oracle(2, [2]) == 4
    assert pont_oracle(3, [5]) == [-20]
    assert pont_oracle(3, [8]) == [-59]


def M(n, *ds):
    return MultiDegree(n, ds)


def test_canonicalize_and_degree():
    assert ci.canonicalize(M(3, 1, 5)) == M(3, 5)
    assert ci.canonicalize(M(3, 2, 3)) == M(3, 3, 2)
    assert ci.canonicalize(M(4, 1, 1)) == M(4)
    assert ci.total_degree(M(3, 5)) == 5
    assert ci.total_degree(M(3, 2, 3)) == 6
    assert ci.total_degree(M(3)) == 1
    with pytest.raises(InvalidDegree):
        M(3, 0)
    with pytest.raises(InvalidDegree):
        M(3, -2)


def test_euler_examples():
    for n in range(11):
        assert ci.euler_characteristic(M(n)) == n + 1
    assert ci.euler_characteristic(M(2, 2)) == 4
    assert ci.euler_characteristic(M(3, 5)) == -200
    assert ci.euler_characteristic(M(3, 8)) == -2096
    assert ci.euler_characteristic(M(3, 4, 2)) == -176


def test_pontrjagin_examples():
    for n in range(1, 11):
        p = ci.pontrjagin_classes(M(n))
        assert len(p) == n // 2
        if p:
            assert p[0] == n + 1
    assert ci.pontrjagin_classes(M(3, 5)) == [-20]
    assert ci.pontrjagin_classes(M(3, 8)) == [-59]


multidegrees = st.builds(lambda n, ds: MultiDegree(n, tuple(ds)),
                         st.integers(0, 8), st.lists(st.integers(1, 9), max_size=3))


@given(multidegrees)
def test_against_oracle(m):
    assert ci.euler_characteristic(m) == chi_oracle(m.n, m.degrees)
    assert ci.euler_characteristic_direct(m) == chi_oracle(m.n, m.degrees)
    assert ci.pontrjagin_classes(m) == pont_oracle(m.n, m.degrees)


@given(multidegrees, st.randoms(use_true_random=False), st.integers(0, 3))
def test_invariance(m, rnd, ones):
    ds = list(m.degrees) + [1] * ones
    rnd.shuffle(ds)
    other = MultiDegree(m.n, tuple(ds))
    assert ci.invariants(other) == ci.invariants(m)


@given(st.integers(1, 10), st.lists(st.integers(1, 9), max_size=4))
def test_series_product_identity(n, ds):
    m = MultiDegree(n, tuple(ds))
    prod = ci.tangent_pontrjagin_series(m) * ci.normal_pontrjagin_series(m)
    assert prod.coeffs == TruncatedSeries.constant(1, prod.cutoff).coeffs


@given(st.integers(-9, 9).filter(bool), st.integers(0, 12))
def test_series_inverse_routes(a, N):
    lhs = TruncatedSeries.polynomial([1, a], N).inverse()
    assert lhs.coeffs == ci.geometric_inverse(a, N).coeffs
    assert (TruncatedSeries.polynomial([1, a], N) * lhs).coeffs == TruncatedSeries.constant(1, N).coeffs


def test_series_errors():
    with pytest.raises(ZeroDivisionError):
        TruncatedSeries.polynomial([0, 1], 3).inverse()
    with pytest.raises(ValueError):
        TruncatedSeries.constant(1, 2) + TruncatedSeries.constant(1, 3)


def test_predicate_examples():
    r16i = ci.divisibility_check(3, 16, PredicateVariant.INTRO)
    r16p = ci.divisibility_check(3, 16, PredicateVariant.PROP12)
    assert [c.p for c in r16i.primes] == [2]
    assert r16i.holds and r16i.primes[0].required == 3
    assert not r16p.holds and r16p.primes[0].required == 5
    for v in PredicateVariant:
        assert not ci.divisibility_check(3, 3, v).holds
        assert ci.divisibility_check(3, 32, v).holds


@given(st.integers(0, 20), st.integers(1, 2 ** 20))
def test_stronger_bound_implies_weaker(n, d):
    if ci.divisibility_check(n, d, PredicateVariant.PROP12).holds:
        assert ci.divisibility_check(n, d, PredicateVariant.INTRO).holds


def test_relevant_primes():
    assert ci.relevant_primes(3) == [2]
    assert ci.relevant_primes(5) == [2, 3]
    assert ci.relevant_primes(0) == []


def test_splits_hyperbolic_plane():
    assert not ci.splits_hyperbolic_plane(M(4, 2))
    assert not ci.splits_hyperbolic_plane(M(4))
    assert not ci.splits_hyperbolic_plane(M(4, 2, 2, 1))
    assert ci.splits_hyperbolic_plane(M(4, 3))
    assert ci.splits_hyperbolic_plane(M(5, 2))
    assert ci.splits_hyperbolic_plane(M(5))


def test_decide_examples():
    assert ci.theorem_a_decide(M(3, 5), M(3, 5, 1)).verdict is Verdict.DIFFEOMORPHIC
    v = ci.theorem_a_decide(M(3, 8), M(3, 4, 2))
    assert v.verdict is Verdict.NOT_DIFFEOMORPHIC
    assert "euler_characteristic" in v.differing and "total_degree" in v.agreeing
    with pytest.raises(DimensionMismatch):
        ci.theorem_a_decide(M(3, 5), M(4, 5))
    with pytest.raises(DimensionTooSmall):
        ci.theorem_a_decide(M(2, 3), M(2, 3))


def test_decide_indeterminate_with_forced_agreement():
    fixed = ci.invariants(M(3, 8))

    def same(m):
        return fixed

    v = ci.theorem_a_decide(M(3, 8), M(3, 4, 2), invariant_fn=same)
    assert v.verdict is Verdict.INDETERMINATE
    assert not v.differing
    # with a predicate that holds the same agreement is decisive
    fixed = ci.invariants(M(3, 32))
    v = ci.theorem_a_decide(M(3, 32), M(3, 8, 4), invariant_fn=same)
    assert v.verdict is Verdict.DIFFEOMORPHIC
    # the weaker bound decides where the stronger one does not
    fixed = ci.invariants(M(3, 16))
    assert ci.theorem_a_decide(M(3, 16), M(3, 4, 4), invariant_fn=same).verdict is Verdict.INDETERMINATE
    v = ci.theorem_a_decide(M(3, 16), M(3, 4, 4), PredicateVariant.INTRO, invariant_fn=same)
    assert v.verdict is Verdict.DIFFEOMORPHIC and v.caveats


def test_decide_even_dimension_needs_split():
    def same(m):
        return ci.invariants(M(4, 64))

    assert ci.theorem_a_decide(M(4, 64), M(4, 8, 8), invariant_fn=same).verdict is Verdict.DIFFEOMORPHIC
    # the quadric never splits off a hyperbolic plane
    assert ci.theorem_a_decide(M(4, 2), M(4, 64), invariant_fn=same).verdict is Verdict.INDETERMINATE


@given(st.integers(3, 8), st.lists(st.integers(1, 6), max_size=3), st.lists(st.integers(1, 6), max_size=3))
def test_not_diffeomorphic_needs_difference(n, a, b):
    v = ci.theorem_a_decide(MultiDegree(n, tuple(a)), MultiDegree(n, tuple(b)))
    if v.verdict is Verdict.NOT_DIFFEOMORPHIC:
        assert v.differing


def test_normal_type_caveat_flag():
    assert ci.normal_type_caveat(4) and ci.normal_type_caveat(7)
    assert not ci.normal_type_caveat(3)
    v = ci.theorem_a_decide(M(4, 3), M(4, 3))
    assert v.caveats
