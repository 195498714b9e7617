"""Complete intersections: invariants and the diffeomorphism decision.

X^n(d_1, ..., d_r) is a smooth complete intersection of complex dimension n in
CP^{n+r}.  With x the hyperplane class,

    c(TX) = (1 + x)^{n+r+1} / prod (1 + d_i x),
    p(TX) = (1 + x^2)^{n+r+1} / prod (1 + d_i^2 x^2),

and the Euler characteristic is d times the top coefficient of c(TX).
Degree one equations only cut down the ambient space, so they are dropped by
`canonicalize`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .forms import DimensionMismatch


class InvalidDegree(ValueError):
    pass


class DimensionTooSmall(ValueError):
    pass


class PredicateVariant(str, Enum):
    INTRO = "intro"
    PROP12 = "prop12"


class Verdict(str, Enum):
    DIFFEOMORPHIC = "Diffeomorphic"
    NOT_DIFFEOMORPHIC = "NotDiffeomorphic"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class MultiDegree:
    n: int
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if self.n < 0:
            raise InvalidDegree("complex dimension must be nonnegative")
        if any(d <= 0 for d in self.degrees):
            raise InvalidDegree("degrees must be positive")

    @property
    def r(self) -> int:
        return len(self.degrees)

    def to_json(self) -> dict:
        return {"n": self.n, "degrees": list(self.degrees)}


def canonicalize(m: MultiDegree) -> MultiDegree:
    return MultiDegree(m.n, tuple(sorted((d for d in m.degrees if d != 1), reverse=True)))


def total_degree(m: MultiDegree) -> int:
    return math.prod(m.degrees)


# ------------------------------------------------------------- series

@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in one variable, exact rational coefficients up to x^cutoff."""
    cutoff: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs[:self.cutoff + 1]]
        c += [Fraction(0)] * (self.cutoff + 1 - len(c))
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def constant(cls, a, cutoff: int) -> "TruncatedSeries":
        return cls(cutoff, (Fraction(a),))

    @classmethod
    def polynomial(cls, coeffs: Sequence, cutoff: int) -> "TruncatedSeries":
        return cls(cutoff, tuple(Fraction(a) for a in coeffs))

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.cutoff else Fraction(0)

    def _same(self, other: "TruncatedSeries"):
        if self.cutoff != other.cutoff:
            raise ValueError("series with different cutoffs")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._same(other)
        return TruncatedSeries(self.cutoff, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._same(other)
        return TruncatedSeries(self.cutoff, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._same(other)
        N = self.cutoff
        out = [Fraction(0)] * (N + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(N + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return TruncatedSeries(N, tuple(out))

    def inverse(self) -> "TruncatedSeries":
        """Solve self * g = 1 coefficient by coefficient."""
        a0 = self.coeffs[0]
        if a0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        N = self.cutoff
        g = [Fraction(0)] * (N + 1)
        g[0] = 1 / a0
        for k in range(1, N + 1):
            s = sum(self.coeffs[i] * g[k - i] for i in range(1, k + 1))
            g[k] = -s / a0
        return TruncatedSeries(N, tuple(g))

    def __pow__(self, e: int) -> "TruncatedSeries":
        if e < 0:
            return self.inverse() ** (-e)
        out = TruncatedSeries.constant(1, self.cutoff)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def substitute_square(self, cutoff: int) -> "TruncatedSeries":
        """f(x) -> f(x^2) truncated at the new cutoff."""
        out = [Fraction(0)] * (cutoff + 1)
        for k, a in enumerate(self.coeffs):
            if 2 * k <= cutoff:
                out[2 * k] = a
        return TruncatedSeries(cutoff, tuple(out))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("series has non-integral coefficients")
        return [int(c) for c in self.coeffs]


def geometric_inverse(a: int, cutoff: int) -> TruncatedSeries:
    """(1 + a x)^-1 written out as sum (-a x)^k."""
    return TruncatedSeries(cutoff, tuple(Fraction((-a) ** k) for k in range(cutoff + 1)))


def binomial_series(e: int, cutoff: int) -> TruncatedSeries:
    """(1 + x)^e for an integer e, from generalized binomial coefficients."""
    c = [Fraction(1)]
    for k in range(1, cutoff + 1):
        c.append(c[-1] * (e - k + 1) / k)
    return TruncatedSeries(cutoff, tuple(c))


def chern_series(m: MultiDegree, cutoff: Optional[int] = None) -> TruncatedSeries:
    m = canonicalize(m)
    N = m.n if cutoff is None else cutoff
    s = TruncatedSeries.polynomial([1, 1], N) ** (m.n + m.r + 1)
    for d in m.degrees:
        s = s * TruncatedSeries.polynomial([1, d], N).inverse()
    return s


def euler_characteristic(m: MultiDegree) -> int:
    m = canonicalize(m)
    return total_degree(m) * int(chern_series(m)[m.n])


def euler_characteristic_direct(m: MultiDegree) -> int:
    """Second route: binomial coefficients against complete homogeneous sums.

    [x^n] (1+x)^{n+r+1} prod (1 + d_i x)^-1 = sum_k C(n+r+1, n-k) (-1)^k h_k(d).
    """
    m = canonicalize(m)
    n = m.n
    h = [1] + [0] * n
    for d in m.degrees:
        for k in range(1, n + 1):
            h[k] += d * h[k - 1]
    top = sum(math.comb(n + m.r + 1, n - k) * (-1) ** k * h[k] for k in range(n + 1))
    return total_degree(m) * top


def tangent_pontrjagin_series(m: MultiDegree, cutoff: Optional[int] = None) -> TruncatedSeries:
    """p(TX) in y = x^2, truncated at y^cutoff (default floor(n/2))."""
    m = canonicalize(m)
    K = m.n // 2 if cutoff is None else cutoff
    s = binomial_series(m.n + m.r + 1, K)
    for d in m.degrees:
        s = s * geometric_inverse(d * d, K)
    return s


def normal_pontrjagin_series(m: MultiDegree, cutoff: Optional[int] = None) -> TruncatedSeries:
    """p of the stable normal bundle: prod (1 + d_i^2 y) (1 + y)^-(n+r+1)."""
    m = canonicalize(m)
    K = m.n // 2 if cutoff is None else cutoff
    s = TruncatedSeries.polynomial([1, 1], K) ** (-(m.n + m.r + 1))
    for d in m.degrees:
        s = s * TruncatedSeries.polynomial([1, d * d], K)
    return s


def pontrjagin_classes(m: MultiDegree, up_to: Optional[int] = None) -> list[int]:
    """Coefficients c_1 .. c_k with p_j(TX) = c_j x^{2j}."""
    m = canonicalize(m)
    k = m.n // 2 if up_to is None else up_to
    return tangent_pontrjagin_series(m, k).int_coeffs()[1:k + 1]


@dataclass(frozen=True)
class CIInvariants:
    total_degree: int
    euler_characteristic: int
    pontrjagin: tuple[int, ...]

    def to_json(self) -> dict:
        return {"total_degree": self.total_degree, "euler_characteristic": self.euler_characteristic,
                "pontrjagin": list(self.pontrjagin)}


def invariants(m: MultiDegree) -> CIInvariants:
    m = canonicalize(m)
    return CIInvariants(total_degree(m), euler_characteristic(m), tuple(pontrjagin_classes(m)))


# ------------------------------------------------------------ predicates

def primes_up_to(N: int) -> list[int]:
    if N < 2:
        return []
    sieve = bytearray([1]) * (N + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(N ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(sieve[p * p::p]))
    return [p for p in range(N + 1) if sieve[p]]


def relevant_primes(n: int) -> list[int]:
    """Primes with p(p - 1) <= n + 1."""
    return [p for p in primes_up_to(n + 2) if p * (p - 1) <= n + 1]


def p_valuation(d: int, p: int) -> int:
    if d == 0:
        raise ValueError("valuation of zero")
    v = 0
    while d % p == 0:
        d //= p
        v += 1
    return v


def required_valuation(n: int, p: int, variant: PredicateVariant) -> int:
    if PredicateVariant(variant) is PredicateVariant.INTRO:
        return (2 * n + 1) // (2 * p - 1) + 1
    # nu >= (2n+1)/(2(p-1)) + 1 as an integer condition
    return -(-(2 * n + 1) // (2 * (p - 1))) + 1


@dataclass(frozen=True)
class PrimeCheck:
    p: int
    valuation: int
    required: int

    @property
    def ok(self) -> bool:
        return self.valuation >= self.required

    def to_json(self) -> dict:
        return {"p": self.p, "valuation": self.valuation, "required": self.required, "ok": self.ok}


@dataclass(frozen=True)
class PredicateReport:
    variant: PredicateVariant
    holds: bool
    primes: tuple[PrimeCheck, ...]

    def to_json(self) -> dict:
        return {"variant": self.variant.value, "holds": self.holds,
                "primes": [c.to_json() for c in self.primes]}


def divisibility_check(n: int, d: int, variant: PredicateVariant = PredicateVariant.PROP12) -> PredicateReport:
    variant = PredicateVariant(variant)
    checks = tuple(PrimeCheck(p, p_valuation(d, p), required_valuation(n, p, variant))
                   for p in relevant_primes(n))
    return PredicateReport(variant, all(c.ok for c in checks), checks)


def traving_predicate(m: MultiDegree, variant: PredicateVariant = PredicateVariant.PROP12) -> PredicateReport:
    m = canonicalize(m)
    return divisibility_check(m.n, total_degree(m), variant)


EXCEPTIONAL_DEGREES = {(), (2,), (2, 2)}


def splits_hyperbolic_plane(m: MultiDegree) -> bool:
    """False only for CP^n, the quadric and the (2,2) intersection in even dimension."""
    m = canonicalize(m)
    if m.n % 2:
        return True
    return m.degrees not in EXCEPTIONAL_DEGREES


def normal_type_caveat(n: int) -> bool:
    """Bundle comparison over CP^m is only quoted for m not 2, 3 mod 8 (m = floor(n/2))."""
    return (n // 2) % 8 in (2, 3)


@dataclass
class TheoremAVerdict:
    verdict: Verdict
    differing: list[str] = field(default_factory=list)
    agreeing: list[str] = field(default_factory=list)
    invariants: tuple[Optional[CIInvariants], Optional[CIInvariants]] = (None, None)
    predicates: dict = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        a, b = self.invariants
        return {"verdict": self.verdict.value, "differing": list(self.differing),
                "agreeing": list(self.agreeing),
                "invariants": [None if a is None else a.to_json(), None if b is None else b.to_json()],
                "predicates": self.predicates, "caveats": list(self.caveats)}


def theorem_a_decide(m1: MultiDegree, m2: MultiDegree,
                     variant: PredicateVariant = PredicateVariant.PROP12,
                     invariant_fn=invariants) -> TheoremAVerdict:
    """Compare two complete intersections of the same dimension n > 2.

    invariant_fn can be replaced to exercise the decision logic on forced data.
    """
    if m1.n != m2.n:
        raise DimensionMismatch("complete intersections of different dimensions")
    if m1.n <= 2:
        raise DimensionTooSmall("the decision needs complex dimension n > 2")
    a, b = canonicalize(m1), canonicalize(m2)
    variant = PredicateVariant(variant)
    ia, ib = invariant_fn(a), invariant_fn(b)
    out = TheoremAVerdict(Verdict.INDETERMINATE, invariants=(ia, ib))
    for name in ("total_degree", "euler_characteristic", "pontrjagin"):
        (out.agreeing if getattr(ia, name) == getattr(ib, name) else out.differing).append(name)
    preds = {}
    for v in PredicateVariant:
        preds[v.value] = [divisibility_check(a.n, ia.total_degree, v).to_json(),
                          divisibility_check(b.n, ib.total_degree, v).to_json()]
    out.predicates = preds
    intro_ok = all(p["holds"] for p in preds["intro"])
    prop_ok = all(p["holds"] for p in preds["prop12"])
    if intro_ok != prop_ok:
        out.caveats.append("divisibility bounds disagree between the two predicate variants")
    if normal_type_caveat(a.n):
        out.caveats.append("normal bundle comparison not certified for floor(n/2) = 2, 3 mod 8")
    if a == b:
        out.verdict = Verdict.DIFFEOMORPHIC
        return out
    if out.differing:
        out.verdict = Verdict.NOT_DIFFEOMORPHIC
        return out
    hyp = prop_ok if variant is PredicateVariant.PROP12 else intro_ok
    if a.n % 2 == 0:
        hyp = hyp and splits_hyperbolic_plane(a) and splits_hyperbolic_plane(b)
    out.verdict = Verdict.DIFFEOMORPHIC if hyp else Verdict.INDETERMINATE
    return out
