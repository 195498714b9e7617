"""Epsilon-quadratic forms (lambda, mu) on free based modules over Z[pi].

Conventions.  Modules are left modules with column coordinates.  lambda is
linear in its first argument and conjugate-linear in the second:

    lambda(sum a_i b_i, sum c_j b_j) = sum a_i * L[i][j] * bar(c_j).

A matrix M over the ring represents the map b_j -> sum_i M[i][j] b_i, so it
acts on coordinates by (M x)_i = sum_j x_j * M[i][j] (scalars on the left).

mu is stored on the basis and extended to arbitrary vectors by expanding each
coordinate into signed group elements and applying mu(g v) = g mu(v) g^-1-bar
together with mu(v + w) = mu(v) + mu(w) + lambda(v, w).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence

from . import intlin
from .group_ring import (GroupContext, QuotientElement, QuotientStructure, RingElement,
                         Variant, multiply)
from .intlin import IntMatrix, Sublattice


class DimensionMismatch(ValueError):
    pass


class ContextMismatch(ValueError):
    pass


class UnsupportedGroup(ValueError):
    pass


class InvalidForm(ValueError):
    pass


LamMatrix = list[list[RingElement]]


# ------------------------------------------------------------ ring matrices

def lam_zero_matrix(ctx: GroupContext, m: int, n: int) -> LamMatrix:
    z = ctx.zero()
    return [[z] * n for _ in range(m)]


def lam_identity(ctx: GroupContext, n: int) -> LamMatrix:
    M = lam_zero_matrix(ctx, n, n)
    for i in range(n):
        M[i][i] = ctx.one()
    return M


def lam_from_int(ctx: GroupContext, A: Sequence[Sequence[int]]) -> LamMatrix:
    return [[ctx.scalar(int(x)) for x in row] for row in A]


def lam_to_int(M: LamMatrix) -> list[list[int]]:
    """Entries as integers; only valid over the trivial group."""
    return [[x.coeffs[0] for x in row] for row in M]


def lam_apply(M: LamMatrix, x: Sequence[RingElement], ctx: GroupContext) -> list[RingElement]:
    out = []
    for row in M:
        acc = ctx.zero()
        for xj, mij in zip(x, row):
            if not xj.is_zero() and not mij.is_zero():
                acc = acc + multiply(xj, mij)
        out.append(acc)
    return out


def lam_compose(M: LamMatrix, N: LamMatrix, ctx: GroupContext) -> LamMatrix:
    """Matrix of M o N (apply N first)."""
    m = len(M)
    n = len(N[0]) if N else 0
    cols = [lam_apply(M, [N[k][j] for k in range(len(N))], ctx) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(m)]


def lam_columns(M: LamMatrix) -> list[list[RingElement]]:
    n = len(M[0]) if M else 0
    return [[row[j] for row in M] for j in range(n)]


def lam_from_columns(cols: Sequence[Sequence[RingElement]], nrows: int) -> LamMatrix:
    return [[c[i] for c in cols] for i in range(nrows)]


def lam_block_diag(ctx: GroupContext, *blocks: LamMatrix) -> LamMatrix:
    sizes = [(len(B), len(B[0]) if B else 0) for B in blocks]
    M = lam_zero_matrix(ctx, sum(s[0] for s in sizes), sum(s[1] for s in sizes))
    r = c = 0
    for B, (m, n) in zip(blocks, sizes):
        for i in range(m):
            for j in range(n):
                M[r + i][c + j] = B[i][j]
        r += m
        c += n
    return M


def expand_vector(x: Sequence[RingElement]) -> list[int]:
    return [c for xi in x for c in xi.coeffs]


def collapse_vector(ctx: GroupContext, y: Sequence[int]) -> list[RingElement]:
    k = ctx.order
    return [ctx.from_coeffs(y[i * k:(i + 1) * k]) for i in range(len(y) // k)]


def expand(M: LamMatrix, ctx: GroupContext, ncols: Optional[int] = None) -> list[list[int]]:
    """The Z-matrix of the coordinate map x -> M x on Z^(cols*|pi|)."""
    m = len(M)
    n = (len(M[0]) if M else 0) if ncols is None else ncols
    k = ctx.order
    cols = []
    for j in range(n):
        for g in range(k):
            x = [ctx.zero()] * n
            x[j] = ctx.element(g)
            cols.append(expand_vector(lam_apply(M, x, ctx)))
    return [[c[i] for c in cols] for i in range(m * k)]


def lam_inverse(M: LamMatrix, ctx: GroupContext) -> Optional[LamMatrix]:
    """Two-sided inverse over the group ring, or None."""
    n = len(M)
    if any(len(r) != n for r in M):
        return None
    E = expand(M, ctx, n)
    if n == 0:
        return []
    if abs(intlin.det(E)) != 1:
        return None
    Einv = intlin.inverse_unimodular(E)
    k = ctx.order
    e = ctx.group.identity
    cols = [collapse_vector(ctx, [row[j * k + e] for row in Einv]) for j in range(n)]
    return lam_from_columns(cols, n)


def lam_is_invertible(M: LamMatrix, ctx: GroupContext) -> bool:
    n = len(M)
    if any(len(r) != n for r in M):
        return False
    return n == 0 or abs(intlin.det(expand(M, ctx, n))) == 1


def lam_has_left_inverse(M: LamMatrix, ctx: GroupContext, nrows: int, ncols: int) -> bool:
    """Is the injective map with matrix M (nrows x ncols) split over the ring?"""
    if ncols == 0:
        return True
    if ctx.is_trivial():
        A = [[x.coeffs[0] for x in r] for r in M]
        if intlin.rank(A) != ncols:
            return False
        return all(d == 1 for d in intlin.snf_diagonal(A, nrows, ncols))
    # unknown R (ncols x nrows): (R o M)[a][c] = sum_b M[b][c] * R[a][b] must be the identity
    k = ctx.order
    cols = []
    for a in range(ncols):
        for b in range(nrows):
            for h in range(k):
                gh = ctx.element(h)
                col = []
                for a2 in range(ncols):
                    for c in range(ncols):
                        if a2 != a:
                            col.extend([0] * k)
                        else:
                            col.extend(multiply(M[b][c], gh).coeffs)
                cols.append(col)
    rhs = []
    for a in range(ncols):
        for c in range(ncols):
            rhs.extend((ctx.one() if a == c else ctx.zero()).coeffs)
    A = IntMatrix.from_columns(cols, len(rhs))
    return intlin.solve_integral(A, rhs) is not None


def lam_conj_transpose(M: LamMatrix) -> LamMatrix:
    n = len(M[0]) if M else 0
    return [[M[i][j].bar() for i in range(len(M))] for j in range(n)]


class Simpleness(str, Enum):
    SIMPLE = "simple"
    UNVERIFIED = "unverified"


def _unit_monomial(x: RingElement) -> bool:
    s = x.support()
    return len(s) == 1 and abs(s[0][1]) == 1


def simpleness(M: LamMatrix, ctx: GroupContext) -> Simpleness:
    """Whether an invertible matrix is provably simple.

    Over Z every isomorphism is simple.  Otherwise reduce by elementary
    operations using only +-g pivots; reaching a monomial matrix proves
    simpleness, getting stuck proves nothing.
    """
    if ctx.is_trivial():
        return Simpleness.SIMPLE
    A = [list(r) for r in M]
    n = len(A)
    used: set[int] = set()
    for j in range(n):
        p = next((i for i in range(n) if i not in used and _unit_monomial(A[i][j])), None)
        if p is None:
            return Simpleness.UNVERIFIED
        used.add(p)
        piv_inv = A[p][j].bar() if ctx.w(A[p][j].support()[0][0]) == 1 else -A[p][j].bar()
        # (+-g)^-1 = +-g^-1, and bar(g) = w(g) g^-1
        for i in range(n):
            if i != p and not A[i][j].is_zero():
                f = multiply(A[i][j], piv_inv)
                A[i] = [a - multiply(f, b) for a, b in zip(A[i], A[p])]
    return Simpleness.SIMPLE


# ------------------------------------------------------------------- forms

@dataclass(frozen=True, eq=False)
class EpsQuadraticForm:
    ctx: GroupContext
    epsilon: int
    variant: Variant
    rank: int
    lam: tuple[tuple[RingElement, ...], ...]
    mu: tuple[QuotientElement, ...]

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise InvalidForm("epsilon must be +-1")
        object.__setattr__(self, "variant", Variant(self.variant))
        n = self.rank
        if len(self.lam) != n or any(len(r) != n for r in self.lam) or len(self.mu) != n:
            raise DimensionMismatch("lambda / mu sizes do not match the rank")
        for i in range(n):
            for j in range(n):
                if self.lam[i][j] != self.epsilon * self.lam[j][i].bar():
                    raise InvalidForm(f"lambda is not eps-hermitian at ({i},{j})")
        Q = self.quotient
        for i in range(n):
            if not Q.compatible(self.lam[i][i], self.mu[i]):
                raise InvalidForm(f"mu({i}) has no lift m with lambda(b,b) = m + eps*bar(m)")

    @property
    def quotient(self) -> QuotientStructure:
        return self.ctx.quotient(self.epsilon, self.variant)

    def __eq__(self, other):
        return (isinstance(other, EpsQuadraticForm) and self.ctx == other.ctx
                and self.epsilon == other.epsilon and self.variant == other.variant
                and self.lam == other.lam and self.mu == other.mu)

    def __hash__(self):
        return hash((self.epsilon, self.variant, self.rank, self.lam))

    def lam_matrix(self) -> LamMatrix:
        return [list(r) for r in self.lam]

    def basis_vector(self, i: int) -> list[RingElement]:
        v = [self.ctx.zero()] * self.rank
        v[i] = self.ctx.one()
        return v

    def vector(self, coeffs: Sequence) -> list[RingElement]:
        """Coordinates from ints (scalars) or coefficient lists."""
        out = []
        for c in coeffs:
            if isinstance(c, RingElement):
                out.append(c)
            elif isinstance(c, int):
                out.append(self.ctx.scalar(c))
            else:
                out.append(self.ctx.from_coeffs(c))
        return out

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "variant": self.variant.value,
            "rank": self.rank,
            "lambda": [[list(x.coeffs) for x in row] for row in self.lam],
            "mu": [list(q.canonical) for q in self.mu],
        }

    @classmethod
    def from_json(cls, d: dict, ctx: GroupContext) -> "EpsQuadraticForm":
        eps = int(d["epsilon"])
        variant = Variant(d.get("variant", "mu"))
        n = int(d["rank"])
        lam = [[ctx.from_coeffs(_as_coeffs(x, ctx)) for x in row] for row in d["lambda"]]
        Q = ctx.quotient(eps, variant)
        mu = [Q.element(_as_list(m)) for m in d["mu"]]
        return make_form(ctx, eps, variant, lam, mu, rank=n)


def _as_coeffs(x, ctx: GroupContext) -> list[int]:
    if isinstance(x, int):
        c = [0] * ctx.order
        c[ctx.group.identity] = x
        return c
    return [int(t) for t in x]


def _as_list(m) -> list[int]:
    return [int(m)] if isinstance(m, int) else [int(t) for t in m]


def make_form(ctx: GroupContext, epsilon: int, variant: Variant, lam: LamMatrix,
              mu: Sequence, rank: Optional[int] = None) -> EpsQuadraticForm:
    """Build a form; mu entries may be QuotientElements or ring-element lifts."""
    n = len(lam) if rank is None else rank
    Q = ctx.quotient(epsilon, variant)
    mus = tuple(m if isinstance(m, QuotientElement) else Q.canonicalize(m) for m in mu)
    return EpsQuadraticForm(ctx, epsilon, Variant(variant), n, tuple(tuple(r) for r in lam), mus)


def form_over_z(epsilon: int, variant: Variant, lam: Sequence[Sequence[int]],
                mu_lifts: Sequence[int]) -> EpsQuadraticForm:
    ctx = GroupContext.integers()
    return make_form(ctx, epsilon, variant, lam_from_int(ctx, lam), [ctx.scalar(m) for m in mu_lifts])


def hyperbolic(r: int, epsilon: int, ctx: Optional[GroupContext] = None,
               variant: Variant = Variant.MU) -> EpsQuadraticForm:
    """H_eps(Lambda^r), basis ordered e_1, f_1, ..., e_r, f_r."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    ctx = GroupContext.integers() if ctx is None else ctx
    lam = lam_zero_matrix(ctx, 2 * r, 2 * r)
    for i in range(r):
        lam[2 * i][2 * i + 1] = ctx.one()
        lam[2 * i + 1][2 * i] = ctx.scalar(epsilon)
    Q = ctx.quotient(epsilon, variant)
    return EpsQuadraticForm(ctx, epsilon, Variant(variant), 2 * r,
                            tuple(tuple(x) for x in lam), (Q.zero(),) * (2 * r))


def _check_len(F: EpsQuadraticForm, *vs):
    for v in vs:
        if len(v) != F.rank:
            raise DimensionMismatch(f"vector of length {len(v)} for a rank {F.rank} form")


def eval_lambda(F: EpsQuadraticForm, v: Sequence[RingElement], w: Sequence[RingElement]) -> RingElement:
    _check_len(F, v, w)
    acc = F.ctx.zero()
    wbar = [x.bar() for x in w]
    for i, vi in enumerate(v):
        if vi.is_zero():
            continue
        for j, wj in enumerate(wbar):
            if wj.is_zero() or F.lam[i][j].is_zero():
                continue
            acc = acc + multiply(multiply(vi, F.lam[i][j]), wj)
    return acc


def mu_lift(F: EpsQuadraticForm, v: Sequence[RingElement]) -> RingElement:
    """A ring element representing mu(v), built from axioms iv) and v)."""
    _check_len(F, v)
    ctx = F.ctx
    # terms n * (g b_i); mu(n g b_i) = n^2 g mu_i gbar, cross terms lambda(term_a, term_b), a < b
    terms = [(i, g, c) for i, vi in enumerate(v) for g, c in vi.support()]
    acc = ctx.zero()
    mu_lifts = [F.quotient.lift(m) for m in F.mu]
    for i, g, c in terms:
        gel = ctx.element(g)
        acc = acc + (c * c) * multiply(multiply(gel, mu_lifts[i]), gel.bar())
    for a in range(len(terms)):
        i, g, c = terms[a]
        left = ctx.element(g, c)
        for b in range(a + 1, len(terms)):
            j, h, d = terms[b]
            lij = F.lam[i][j]
            if lij.is_zero():
                continue
            acc = acc + multiply(multiply(left, lij), ctx.element(h, d).bar())
    return acc


def eval_mu(F: EpsQuadraticForm, v: Sequence[RingElement]) -> QuotientElement:
    return F.quotient.canonicalize(mu_lift(F, v))


def orthogonal_sum(F: EpsQuadraticForm, G: EpsQuadraticForm) -> EpsQuadraticForm:
    if F.ctx != G.ctx or F.epsilon != G.epsilon or F.variant != G.variant:
        raise ContextMismatch("forms live over different contexts, epsilons or variants")
    lam = lam_block_diag(F.ctx, F.lam_matrix(), G.lam_matrix())
    return EpsQuadraticForm(F.ctx, F.epsilon, F.variant, F.rank + G.rank,
                            tuple(tuple(r) for r in lam), F.mu + G.mu)


def restrict(F: EpsQuadraticForm, basis: Sequence[Sequence[RingElement]]) -> EpsQuadraticForm:
    """The form induced on the submodule with the given basis vectors."""
    lam = [[eval_lambda(F, u, v) for v in basis] for u in basis]
    mu = [eval_mu(F, u) for u in basis]
    return EpsQuadraticForm(F.ctx, F.epsilon, F.variant, len(basis), tuple(tuple(r) for r in lam), tuple(mu))


def gram_int(F: EpsQuadraticForm) -> list[list[int]]:
    if not F.ctx.is_trivial():
        raise UnsupportedGroup("integer Gram matrix needs the trivial group")
    return lam_to_int(F.lam_matrix())


def radical(F: EpsQuadraticForm) -> Sublattice:
    """{x : lambda(x, -) = 0 and mu(x) = 0}, over Z only.

    mu is additive on the lambda-kernel K, so the radical is the kernel of a
    homomorphism K -> (quotient group).  It is a direct summand of Z^n except
    when mu is a nonzero Z/2-valued map on K (eps = -1, variant mu), where it
    has index 2 in K.
    """
    if not F.ctx.is_trivial():
        raise UnsupportedGroup("radical is only implemented over Z")
    n = F.rank
    L = gram_int(F)
    K = intlin.kernel_basis(intlin.transpose(L, n, n), n, n)
    if not K:
        return Sublattice(n, IntMatrix.zeros(n, 0))
    Q = F.quotient
    vals = [eval_mu(F, F.vector(k)).canonical for k in K]
    t = len(Q.moduli)
    # c in Z^|K| with sum c_j vals_j = 0 in Q: kernel of [vals | diag(moduli)]
    A = [[vals[j][s] for j in range(len(K))] + [Q.moduli[s] * int(s == u) for u in range(t)]
         for s in range(t)]
    if t == 0:
        coeffs = [list(r) for r in intlin.identity_rows(len(K))]
    else:
        ker = intlin.kernel_basis(A, t, len(K) + t)
        coeffs = [list(c) for c in intlin.hnf_columns([v[:len(K)] for v in ker], len(K))]
    basis = [[sum(c[j] * K[j][i] for j in range(len(K))) for i in range(n)] for c in coeffs]
    return Sublattice.from_vectors(basis, n) if basis else Sublattice(n, IntMatrix.zeros(n, 0))


def is_isometry(M: LamMatrix, F: EpsQuadraticForm, G: EpsQuadraticForm) -> bool:
    """M sends the basis of F to vectors of G (column i = image of b_i)."""
    if len(M) != G.rank or any(len(r) != F.rank for r in M):
        raise DimensionMismatch("matrix shape does not match the forms")
    if F.rank != G.rank or not lam_is_invertible(M, F.ctx):
        return False
    cols = lam_columns(M) if F.rank else []
    for i in range(F.rank):
        if eval_mu(G, cols[i]) != F.mu[i]:
            return False
        for j in range(F.rank):
            if eval_lambda(G, cols[i], cols[j]) != F.lam[i][j]:
                return False
    return True


def isometry_is_simple(M: LamMatrix, ctx: GroupContext) -> Simpleness:
    return simpleness(M, ctx)


# ----------------------------------------------------- bounded equivalence

class Equivalence(str, Enum):
    PROVEN_EQUAL = "proven-equal"
    PROVEN_DISTINCT = "proven-distinct-by-invariant"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class EquivalenceSearch:
    max_stabilization: int = 2
    entry_bound: int = 1
    max_rank: int = 6
    max_nodes: int = 200_000


def invariants(F: EpsQuadraticForm) -> dict:
    """Stable invariants: rank mod 2, and over Z the radical rank, |det lambda|
    and for eps = +1 the signature."""
    inv = {"rank_mod_2": F.rank % 2}
    if F.ctx.is_trivial():
        inv["radical_rank"] = radical(F).rank
        inv["abs_det"] = abs(intlin.det(gram_int(F))) if F.rank else 1
        if F.epsilon == 1:
            L = gram_int(F)
            # signature of the nondegenerate part: restrict to a complement of the lambda-kernel
            K = intlin.kernel_basis(L, F.rank, F.rank)
            if K:
                C = intlin.summand_complement(Sublattice.from_vectors(K, F.rank)).vectors()
                L = [[sum(u[a] * L[a][b] * v[b] for a in range(F.rank) for b in range(F.rank)) for v in C] for u in C]
            inv["signature"] = intlin.signature_rows(L) if L else 0
    return inv


class _Budget:
    def __init__(self, nodes: int):
        self.left = nodes


def _z_isometries(F: EpsQuadraticForm, G: EpsQuadraticForm, bound: int,
                  budget: Optional[_Budget] = None) -> Iterator[list[list[int]]]:
    """Backtracking search for integer isometries F -> G with |entries| <= bound."""
    n = F.rank
    cands = [list(c) for c in itertools.product(range(-bound, bound + 1), repeat=n) if any(c)]
    Lg = gram_int(G)
    Lf = gram_int(F)

    def lam(u, v):
        return sum(u[a] * Lg[a][b] * v[b] for a in range(n) for b in range(n) if Lg[a][b])

    chosen: list[list[int]] = []

    def rec(i):
        if i == n:
            yield [list(r) for r in zip(*chosen)]
            return
        for c in cands:
            if budget is not None:
                budget.left -= 1
                if budget.left < 0:
                    return
            if lam(c, c) != Lf[i][i]:
                continue
            if any(lam(chosen[j], c) != Lf[j][i] for j in range(i)):
                continue
            if eval_mu(G, G.vector(c)) != F.mu[i]:
                continue
            chosen.append(c)
            yield from rec(i + 1)
            chosen.pop()

    yield from rec(0)


def bounded_equivalence(F: EpsQuadraticForm, G: EpsQuadraticForm,
                        cfg: EquivalenceSearch = EquivalenceSearch()) -> Equivalence:
    if F.ctx != G.ctx or F.epsilon != G.epsilon or F.variant != G.variant:
        raise ContextMismatch("forms live over different contexts, epsilons or variants")
    if F == G:
        return Equivalence.PROVEN_EQUAL
    if invariants(F) != invariants(G):
        return Equivalence.PROVEN_DISTINCT
    if not F.ctx.is_trivial():
        return Equivalence.UNKNOWN
    budget = _Budget(cfg.max_nodes)
    for s in range(cfg.max_stabilization + 1):
        a = F.rank + 2 * s
        t2 = a - G.rank
        if t2 < 0 or t2 % 2:
            continue
        if a > cfg.max_rank:
            break
        Fs = orthogonal_sum(F, hyperbolic(s, F.epsilon, F.ctx, F.variant))
        Gs = orthogonal_sum(G, hyperbolic(t2 // 2, G.epsilon, G.ctx, G.variant))
        for M in _z_isometries(Fs, Gs, cfg.entry_bound, budget):
            if abs(intlin.det(M)) == 1:
                return Equivalence.PROVEN_EQUAL
    return Equivalence.UNKNOWN
