"""Even-dimensional obstructions: triples (V0 <-f- V -g-> V1, lambda, mu).

lambda is a pairing between V0 and V1 given by the matrix P with
P[i][j] = lambda(b0_i, b1_j); the form on V is lambda_V(x, y) = lambda(f x, g y).
A witness of elementarity is a based U in V with lambda_V and mu vanishing on U,
injective images f(U), g(U) that are direct summands, and lambda inducing an
isomorphism f(U) -> (V1 / g(U))*.

The second half of the module is the constructive pipeline for the integral
data 0 -> V -S-> V* -> H + H -> 0 with a surjection rho : V -> A: the three
algebraic conditions, the witness U + rad(S_K) and the lagrangian search for
even unimodular forms of signature zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import intlin
from .forms import (DimensionMismatch, EpsQuadraticForm, LamMatrix, Simpleness, UnsupportedGroup,
                    eval_lambda, eval_mu, expand, hyperbolic, lam_block_diag,
                    lam_columns, lam_compose, lam_from_columns, lam_from_int, lam_has_left_inverse, lam_identity,
                    lam_is_invertible)
from .group_ring import GroupContext, QuotientElement, RingElement, Variant, multiply
from .intlin import IntMatrix, Sublattice


class ConditionsNotMet(ValueError):
    pass


class OddDiagonalOnKernel(ValueError):
    pass


class NotEvenUnimodular(ValueError):
    pass


class NonzeroSignature(ValueError):
    pass


class MalformedDatum(ValueError):
    pass


class InvalidObstruction(ValueError):
    pass


class SearchExhausted(RuntimeError):
    pass


# ------------------------------------------------------------- obstructions

@dataclass(frozen=True, eq=False)
class EvenObstruction:
    ctx: GroupContext
    epsilon: int
    variant: Variant
    V_rank: int
    V0_rank: int
    V1_rank: int
    f: LamMatrix          # V0_rank x V_rank, column i = f(b_i)
    g: LamMatrix          # V1_rank x V_rank
    lambda_adj: LamMatrix  # V0_rank x V1_rank
    mu: tuple[QuotientElement, ...]
    form: EpsQuadraticForm = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        n, n0, n1 = self.V_rank, self.V0_rank, self.V1_rank
        if (len(self.f) != n0 or any(len(r) != n for r in self.f) or len(self.g) != n1
                or any(len(r) != n for r in self.g) or len(self.lambda_adj) != n0
                or any(len(r) != n1 for r in self.lambda_adj) or len(self.mu) != n):
            raise DimensionMismatch("matrix shapes do not match the ranks")
        if n0 != n1 or not lam_is_invertible(self.lambda_adj, self.ctx):
            raise InvalidObstruction("lambda : V0 -> V1* is not an isomorphism")
        fcols = [[self.f[r][i] for r in range(n0)] for i in range(n)]
        gcols = [[self.g[r][i] for r in range(n1)] for i in range(n)]
        lamV = [[self._pair(fc, gc) for gc in gcols] for fc in fcols]
        try:
            F = EpsQuadraticForm(self.ctx, self.epsilon, self.variant, n,
                                 tuple(tuple(r) for r in lamV), tuple(self.mu))
        except ValueError as e:
            raise InvalidObstruction(f"induced form on V is invalid: {e}") from e
        object.__setattr__(self, "form", F)

    def _pair(self, x: Sequence[RingElement], y: Sequence[RingElement]) -> RingElement:
        """lambda(x, y) for x in V0, y in V1."""
        acc = self.ctx.zero()
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y):
                pij = self.lambda_adj[i][j]
                if not yj.is_zero() and not pij.is_zero():
                    acc = acc + multiply(multiply(xi, pij), yj.bar())
        return acc

    def to_json(self) -> dict:
        def mat(M):
            return [[list(x.coeffs) for x in r] for r in M]
        return {"epsilon": self.epsilon, "variant": self.variant.value, "V_rank": self.V_rank,
                "V0_rank": self.V0_rank, "V1_rank": self.V1_rank, "f": mat(self.f), "g": mat(self.g),
                "lambda": mat(self.lambda_adj), "mu": [list(m.canonical) for m in self.mu]}

    @classmethod
    def from_json(cls, d: dict, ctx: Optional[GroupContext] = None) -> "EvenObstruction":
        ctx = GroupContext.integers() if ctx is None else ctx

        def mat(M, rows, cols):
            out = [[ctx.scalar(x) if isinstance(x, int) else ctx.from_coeffs(x) for x in r] for r in M]
            if len(out) != rows or any(len(r) != cols for r in out):
                raise DimensionMismatch("matrix shape does not match the ranks")
            return out
        eps = int(d["epsilon"])
        variant = Variant(d.get("variant", "mu"))
        n, n0, n1 = int(d["V_rank"]), int(d["V0_rank"]), int(d["V1_rank"])
        Q = ctx.quotient(eps, variant)
        mu = tuple(Q.element([m] if isinstance(m, int) else list(m)) for m in d["mu"])
        return cls(ctx, eps, variant, n, n0, n1, mat(d["f"], n0, n), mat(d["g"], n1, n),
                   mat(d["lambda"], n0, n1), mu)


def even_obstruction_from_form(F: EpsQuadraticForm) -> EvenObstruction:
    """(V <-id- V -id-> V, lambda, mu): the triple of a nonsingular form."""
    I = lam_identity(F.ctx, F.rank)
    return EvenObstruction(F.ctx, F.epsilon, F.variant, F.rank, F.rank, F.rank, I, I,
                           F.lam_matrix(), F.mu)


def even_obstruction_over_z(f: Sequence[Sequence[int]], g: Sequence[Sequence[int]],
                            lam: Sequence[Sequence[int]], epsilon: int = 1,
                            variant: Variant = Variant.MU, mu: Optional[Sequence[int]] = None,
                            V_rank: Optional[int] = None) -> EvenObstruction:
    """Integral triple; mu defaults to the value forced by lambda_V (needs eps = +1, even diagonal)."""
    ctx = GroupContext.integers()
    n0 = len(lam)
    n = V_rank if V_rank is not None else (len(f[0]) if f else 0)
    F = lam_from_int(ctx, f) if f else [[] for _ in range(n0)]
    G = lam_from_int(ctx, g) if g else [[] for _ in range(n0)]
    P = lam_from_int(ctx, lam)
    Q = ctx.quotient(epsilon, variant)
    if mu is None:
        if epsilon != 1:
            raise ValueError("mu must be given when eps = -1")
        lamV = intlin.matmul(intlin.matmul(intlin.transpose(f, n0, n) if f else [[] for _ in range(n)], lam), g) if n else []
        if any(lamV[i][i] % 2 for i in range(n)):
            raise OddDiagonalOnKernel("lambda_V has odd diagonal; mu is not determined")
        mus = tuple(Q.canonicalize(ctx.scalar(lamV[i][i] // 2)) for i in range(n))
    else:
        mus = tuple(Q.canonicalize(ctx.scalar(int(m))) for m in mu)
    return EvenObstruction(ctx, epsilon, variant, n, n0, n0, F, G, P, mus)


def stabilize_even(theta: EvenObstruction, s: int) -> EvenObstruction:
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return theta
    H = hyperbolic(s, theta.epsilon, theta.ctx, theta.variant)
    I = lam_identity(theta.ctx, 2 * s)
    ctx = theta.ctx
    return EvenObstruction(
        ctx, theta.epsilon, theta.variant, theta.V_rank + 2 * s, theta.V0_rank + 2 * s,
        theta.V1_rank + 2 * s, lam_block_diag(ctx, theta.f, I), lam_block_diag(ctx, theta.g, I),
        lam_block_diag(ctx, theta.lambda_adj, H.lam_matrix()), theta.mu + H.mu)


# ------------------------------------------------------------------ witness

@dataclass(frozen=True)
class ElementaryWitness:
    basis: tuple[tuple[RingElement, ...], ...]  # vectors of V

    @classmethod
    def from_int_vectors(cls, vectors: Sequence[Sequence[int]], ctx: Optional[GroupContext] = None) -> "ElementaryWitness":
        ctx = GroupContext.integers() if ctx is None else ctx
        return cls(tuple(tuple(ctx.scalar(int(x)) for x in v) for v in vectors))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def int_vectors(self) -> list[list[int]]:
        return [[x.coeffs[0] for x in v] for v in self.basis]


@dataclass(frozen=True)
class WitnessCheck:
    isotropic: bool
    injective_summands: bool
    pairing_isomorphism: bool
    simple: Simpleness

    @property
    def ok(self) -> bool:
        return self.isotropic and self.injective_summands and self.pairing_isomorphism


def _z_rank(A: list[list[int]]) -> int:
    return intlin.rank(A) if A and A[0] else 0


def check_witness(theta: EvenObstruction, U: ElementaryWitness) -> WitnessCheck:
    ctx = theta.ctx
    n = theta.V_rank
    for v in U.basis:
        if len(v) != n:
            raise DimensionMismatch("witness vector has the wrong length")
    u = U.rank
    F = theta.form
    basis = [list(v) for v in U.basis]
    iso = all(eval_mu(F, v).is_zero() for v in basis) and all(
        eval_lambda(F, a, b).is_zero() for a in basis for b in basis)

    Ucols = lam_from_columns(basis, n) if u else [[] for _ in range(n)]
    FU = lam_compose(theta.f, Ucols, ctx) if u else [[] for _ in range(theta.V0_rank)]
    GU = lam_compose(theta.g, Ucols, ctx) if u else [[] for _ in range(theta.V1_rank)]
    k = ctx.order
    summ = True
    for M, nr in ((FU, theta.V0_rank), (GU, theta.V1_rank)):
        if u and _z_rank(expand(M, ctx, u)) != u * k:
            summ = False
        elif not lam_has_left_inverse(M, ctx, nr, u):
            summ = False

    # Phi : V1 -> Lambda^u, y -> (lambda(f u_a, y))_a ; needs surjective with kernel g(U)
    n1 = theta.V1_rank
    fu = lam_columns(FU) if u else []
    Phi_cols = []
    for l in range(n1):
        for h in range(k):
            y = [ctx.zero()] * n1
            y[l] = ctx.element(h)
            Phi_cols.append([c for a in range(u) for c in theta._pair(fu[a], y).coeffs])
    pairing = True
    if u * k == 0:
        pairing = n1 == 0
    else:
        Phi = [[c[i] for c in Phi_cols] for i in range(u * k)]
        if _z_rank(Phi) != u * k or any(d != 1 for d in intlin.snf_diagonal(Phi, u * k, n1 * k)):
            pairing = False
        elif n1 * k - u * k != u * k:
            pairing = False
    simple = Simpleness.SIMPLE if ctx.is_trivial() else Simpleness.UNVERIFIED
    return WitnessCheck(iso, summ, pairing, simple)


def verify_elementary_witness(theta: EvenObstruction, U: ElementaryWitness) -> bool:
    return check_witness(theta, U).ok


def _sign_normalized(v: Sequence[int]) -> bool:
    for x in v:
        if x:
            return x > 0
    return False


def brute_force_elementary(theta: EvenObstruction, entry_bound: int) -> Optional[ElementaryWitness]:
    """First verified witness among sublattices spanned by bounded vectors, else None."""
    if not theta.ctx.is_trivial():
        raise UnsupportedGroup("brute force search is only implemented over Z")
    n = theta.V_rank
    if theta.V1_rank % 2:
        return None
    u = theta.V1_rank // 2
    if u == 0:
        W = ElementaryWitness(())
        return W if verify_elementary_witness(theta, W) else None
    if u > n:
        return None
    F = theta.form
    L = [[x.coeffs[0] for x in r] for r in F.lam]
    rng = range(-entry_bound, entry_bound + 1)
    cands = []
    for c in itertools.product(rng, repeat=n):
        if not _sign_normalized(c):
            continue
        if sum(c[a] * L[a][b] * c[b] for a in range(n) for b in range(n) if L[a][b]) != 0:
            continue
        if not eval_mu(F, F.vector(c)).is_zero():
            continue
        cands.append(c)
    seen: set = set()
    chosen: list = []

    def orth(a, b):
        return sum(a[i] * L[i][j] * b[j] for i in range(n) for j in range(n) if L[i][j]) == 0

    def rec(start):
        if len(chosen) == u:
            key = intlin.hnf_columns(chosen, n)
            if key in seen:
                return None
            seen.add(key)
            if not intlin.is_primitive_summand(Sublattice.from_vectors(chosen, n)):
                return None
            W = ElementaryWitness.from_int_vectors(chosen)
            return W if verify_elementary_witness(theta, W) else None
        for idx in range(start, len(cands)):
            c = cands[idx]
            if not all(orth(c, d) for d in chosen):
                continue
            if intlin.rank([list(x) for x in chosen + [c]]) != len(chosen) + 1:
                continue
            chosen.append(c)
            res = rec(idx + 1)
            chosen.pop()
            if res is not None:
                return res
        return None

    return rec(0)


# ------------------------------------------------------------ surgery datum

def _row_moduli(P: list[list[int]], S: list[list[int]]) -> list[int]:
    """Largest modulus per row making phi -> row.phi well defined on coker S."""
    PS = intlin.matmul(P, S) if P else []
    out = []
    for row in PS:
        g = 0
        for x in row:
            g = _gcd(g, x)
        out.append(g)
    return out


def _gcd(a: int, b: int) -> int:
    import math
    return math.gcd(a, b)


@dataclass(frozen=True)
class SurgeryDatum:
    """0 -> V -S-> V* -j-> H + H -> 0 with rho : V -> A.

    p0, p1 are integer matrices on V* = Z^n; row k of p_i is read modulo
    H_moduli[k], so p_i o j is phi -> p_i phi mod H_moduli.
    """

    S: IntMatrix
    rho: IntMatrix
    p0: IntMatrix
    p1: IntMatrix
    H_moduli: tuple[int, ...]

    @property
    def V_rank(self) -> int:
        return self.S.rows

    @property
    def A_rank(self) -> int:
        return self.rho.rows

    @classmethod
    def build(cls, S, rho, p0, p1, H_moduli: Optional[Sequence[int]] = None) -> "SurgeryDatum":
        S_rows = [list(r) for r in S]
        n = len(S_rows)
        Sm = IntMatrix.from_rows(S_rows, cols=n)
        rho_m = IntMatrix.from_rows([list(r) for r in rho], cols=n)
        p0r = [list(r) for r in p0]
        p1r = [list(r) for r in p1]
        if len(p0r) != len(p1r):
            raise MalformedDatum("p0 and p1 must have the same number of rows")
        if H_moduli is None:
            m0 = _row_moduli(p0r, S_rows)
            m1 = _row_moduli(p1r, S_rows)
            H_moduli = [_gcd(a, b) for a, b in zip(m0, m1)]
        d = cls(Sm, rho_m, IntMatrix.from_rows(p0r, cols=n), IntMatrix.from_rows(p1r, cols=n),
                tuple(int(m) for m in H_moduli))
        d.validate()
        return d

    def validate(self) -> None:
        n = self.V_rank
        S = self.S.tolist()
        if not self.S.is_symmetric():
            raise MalformedDatum("S is not symmetric")
        D = intlin.det(S)
        if D == 0:
            raise MalformedDatum("coker S is infinite (det S = 0)")
        a = self.A_rank
        if a and (intlin.rank(self.rho.tolist()) != a
                  or any(x != 1 for x in intlin.snf_diagonal(self.rho.tolist(), a, n))):
            raise MalformedDatum("rho is not surjective")
        h = len(self.H_moduli)
        if any(m <= 0 for m in self.H_moduli):
            raise MalformedDatum("H moduli must be positive")
        order_H = 1
        for m in self.H_moduli:
            order_H *= m
        # well defined on coker S
        for P in (self.p0.tolist(), self.p1.tolist()):
            PS = intlin.matmul(P, S) if P else []
            for k, row in enumerate(PS):
                if any(x % self.H_moduli[k] for x in row):
                    raise MalformedDatum("projection does not vanish on im S")
        # injective: the joint kernel lattice must be exactly im S
        if order_H * order_H != abs(D):
            raise MalformedDatum("|H + H| does not match |coker S|")
        joint = self.p0.tolist() + self.p1.tolist()
        mods = list(self.H_moduli) * 2
        if joint:
            A = [row + [m * int(k == t) for t in range(2 * h)] for k, (row, m) in enumerate(zip(joint, mods))]
            ker = intlin.kernel_basis(A, 2 * h, n + 2 * h)
            gens = intlin.hnf_columns([v[:n] for v in ker], n)
            if len(gens) != n or abs(intlin.det(intlin.transpose([list(c) for c in gens], n, n))) != abs(D):
                raise MalformedDatum("p0 + p1 is not an isomorphism coker S -> H + H")
        elif abs(D) != 1:
            raise MalformedDatum("p0 + p1 is not an isomorphism coker S -> H + H")
        # the two summands must be orthogonal for the linking pairing phi^T S^-1 psi
        B0, B1 = self.kernel_p1(), self.kernel_p0()
        Sinv = intlin.inverse_rows(S)
        for x in B0:
            for y in B1:
                val = sum(x[i] * Sinv[i][j] * y[j] for i in range(n) for j in range(n))
                if val.denominator != 1:
                    raise MalformedDatum("H + 0 and 0 + H are not orthogonal under the linking pairing")

    def _kernel(self, P: list[list[int]]) -> list[list[int]]:
        n = self.V_rank
        h = len(self.H_moduli)
        if h == 0:
            return [list(r) for r in intlin.identity_rows(n)]
        A = [row + [m * int(k == t) for t in range(h)] for k, (row, m) in enumerate(zip(P, self.H_moduli))]
        ker = intlin.kernel_basis(A, h, n + h)
        return [list(c) for c in intlin.hnf_columns([v[:n] for v in ker], n)]

    def kernel_p0(self) -> list[list[int]]:
        """Basis of Ker(p0 j) in V*."""
        return self._kernel(self.p0.tolist())

    def kernel_p1(self) -> list[list[int]]:
        return self._kernel(self.p1.tolist())

    def to_json(self) -> dict:
        return {"S": self.S.tolist(), "rho": self.rho.tolist(), "p0": self.p0.tolist(),
                "p1": self.p1.tolist(), "H": list(self.H_moduli)}

    @classmethod
    def from_json(cls, d: dict) -> "SurgeryDatum":
        S = d["S"]
        n = len(S)
        rho = d.get("rho") or []
        p0 = d.get("p0") or []
        p1 = d.get("p1") or []
        for name, M in (("rho", rho), ("p0", p0), ("p1", p1)):
            if any(len(r) != n for r in M):
                raise MalformedDatum(f"{name} must have {n} columns")
        return cls.build(S, rho, p0, p1, d.get("H"))

    def triple(self) -> tuple[EvenObstruction, list[list[int]]]:
        """The induced triple (Ker p1 j <- Ker rho -> Ker p0 j, lambda) and the basis of Ker rho."""
        n = self.V_rank
        S = self.S.tolist()
        K = intlin.kernel_basis(self.rho.tolist(), self.A_rank, n) if self.A_rank else \
            [list(r) for r in intlin.identity_rows(n)]
        k = len(K)
        B0, B1 = self.kernel_p1(), self.kernel_p0()
        Sinv = intlin.inverse_rows(S)
        P = []
        for x in B0:
            row = []
            for y in B1:
                val = sum(x[i] * Sinv[i][j] * y[j] for i in range(n) for j in range(n))
                if val.denominator != 1:
                    raise MalformedDatum("pairing is not integral")
                row.append(int(val))
            P.append(row)

        def coords(B, vecs):
            M = IntMatrix.from_columns(B, n)
            out = []
            for v in vecs:
                c = intlin.solve_integral(M, v)
                if c is None:
                    raise MalformedDatum("S(Ker rho) is not inside the kernel lattice")
                out.append(c)
            return out

        SK = [intlin.matvec(S, v) for v in K]
        fcols = coords(B0, SK)
        gcols = coords(B1, SK)
        f = [[c[i] for c in fcols] for i in range(n)] if k else [[] for _ in range(n)]
        g = [[c[i] for c in gcols] for i in range(n)] if k else [[] for _ in range(n)]
        SKK = [[sum(K[a][i] * S[i][j] * K[b][j] for i in range(n) for j in range(n)) for b in range(k)] for a in range(k)]
        if any(SKK[i][i] % 2 for i in range(k)):
            raise OddDiagonalOnKernel("S restricted to Ker rho has odd diagonal")
        mu = [SKK[i][i] // 2 for i in range(k)]
        theta = even_obstruction_over_z(f, g, P, 1, Variant.MU, mu=mu, V_rank=k)
        return theta, K


@dataclass
class PipelineReport:
    a: bool = False
    b: bool = False
    c: bool = False
    diagnostics: list[str] = field(default_factory=list)
    witness: Optional[ElementaryWitness] = None
    witness_in_V: Optional[list[list[int]]] = None
    triple: Optional[EvenObstruction] = None
    sign_vanishes: Optional[bool] = None
    char_numbers_vanish: Optional[bool] = None

    @property
    def conditions_ok(self) -> bool:
        return self.a and self.b and self.c

    @property
    def ok(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        d = {"a": self.a, "b": self.b, "c": self.c, "diagnostics": list(self.diagnostics),
             "witness": self.witness_in_V}
        if self.sign_vanishes is not None:
            d["sign_vanishes"] = self.sign_vanishes
            d["char_numbers_vanish"] = self.char_numbers_vanish
        return d


def _coker_elements(S: list[list[int]], n: int):
    """Yield (phi, order) for one lift phi of every class of Z^n / S Z^n."""
    U, D, _ = intlin._snf_rows(S, n, n)
    Uinv = intlin.inverse_unimodular(U)
    diag = [D[i][i] for i in range(n)]
    ranges = [range(d) for d in diag]
    for c in itertools.product(*ranges):
        phi = intlin.matvec(Uinv, list(c))
        o = 1
        for ci, d in zip(c, diag):
            if ci:
                o = o * (d // _gcd(ci, d)) // _gcd(o, d // _gcd(ci, d))
        yield phi, o


def check_conditions_abc(d: SurgeryDatum) -> PipelineReport:
    rep = PipelineReport()
    n = d.V_rank
    S = d.S.tolist()
    rho = d.rho.tolist()
    a = d.A_rank
    sig = intlin.signature_rows(S)
    rep.a = sig == 0
    if not rep.a:
        rep.diagnostics.append(f"a) signature of S is {sig}, not 0")

    # b) M = {v : S v in im rho^T}; S pairs M with itself to zero
    if a:
        rhoT = intlin.transpose(rho, a, n)
        A = [S[i] + [-rhoT[i][t] for t in range(a)] for i in range(n)]
        ker = intlin.kernel_basis(A, n, n + a)
        M = [list(c) for c in intlin.hnf_columns([v[:n] for v in ker], n)]
    else:
        M = []
    bad = [(x, y) for x in M for y in M
           if sum(x[i] * S[i][j] * y[j] for i in range(n) for j in range(n)) != 0]
    rep.b = not bad
    if bad:
        rep.diagnostics.append(f"b) S(v1)(v2) = {sum(bad[0][0][i] * S[i][j] * bad[0][1][j] for i in range(n) for j in range(n))} "
                               f"for v1 = {bad[0][0]}, v2 = {bad[0][1]}")

    # c) for phi with p_i j(phi) != 0, p_k j(phi) = 0 and o = order of j(phi):
    #    rho S^-1(o phi) must avoid o*A (then no lift and no multiple is killed)
    Sinv = intlin.inverse_rows(S)
    p = (d.p0.tolist(), d.p1.tolist())
    mods = d.H_moduli
    rep.c = True

    def pj(P, phi):
        return [sum(x * y for x, y in zip(row, phi)) % m for row, m in zip(P, mods)]

    for phi, o in _coker_elements(S, n):
        if o == 1:
            continue
        v0 = pj(p[0], phi)
        v1 = pj(p[1], phi)
        if (any(v1) and not any(v0)) or (any(v0) and not any(v1)):
            pre = [sum(Sinv[i][j] * o * phi[j] for j in range(n)) for i in range(n)]
            x = [sum(r[i] * pre[i] for i in range(n)) for r in rho]
            if all(Fraction(xi) % o == 0 for xi in x):
                rep.c = False
                rep.diagnostics.append(f"c) phi = {phi} (order {o}) has rho S^-1({o} phi) = {[int(t) for t in x]} in {o}A")
                break
    return rep


def _even_diagonal(S: list[list[int]]) -> bool:
    return all(S[i][i] % 2 == 0 for i in range(len(S)))


def _small_vectors(n: int, max_bound_exp: int, max_support: Optional[int] = None):
    """Nonzero integer vectors ordered by bound level 2^k, then support size,
    then support positions and values; the first nonzero entry is positive."""
    tried = 0
    for k in range(1, max_bound_exp + 1):
        B = 2 ** k
        vals = [x for x in range(-B, B + 1) if x]
        for s in range(1, (max_support or n) + 1):
            for pos in itertools.combinations(range(n), s):
                for vs in itertools.product(vals, repeat=s):
                    if vs[0] < 0 or max(abs(x) for x in vs) <= tried:
                        continue
                    yield pos, vs
        tried = B


def _quad(S: list[list[int]], pos, vs) -> int:
    return sum(a * S[i][j] * b for i, a in zip(pos, vs) for j, b in zip(pos, vs))


def _isotropic_search(S: list[list[int]], constraints: list[list[int]], avoid: list[list[int]],
                      max_bound_exp: int = 12, max_support: Optional[int] = None) -> Optional[list[int]]:
    """First z in the small-vector order with S(z,z) = 0, c.z = 0 for every constraint
    row c, and z outside the span of `avoid`; divided by its content."""
    n = len(S)
    base_rank = intlin.rank(avoid) if avoid else 0
    for pos, vs in _small_vectors(n, max_bound_exp, max_support):
        if any(sum(c[i] * x for i, x in zip(pos, vs)) for c in constraints):
            continue
        if _quad(S, pos, vs) != 0:
            continue
        z = [0] * n
        for i, x in zip(pos, vs):
            z[i] = x
        if avoid and intlin.rank(avoid + [z]) == base_rank:
            continue
        g = 0
        for x in vs:
            g = _gcd(g, x)
        return [x // g for x in z]
    return None


def hyperbolic_split_even_unimodular(S_in, max_bound_exp: int = 12) -> Sublattice:
    """A lagrangian U = U^perp of an even unimodular form of signature 0.

    U is grown one isotropic vector at a time.  If U is isotropic and
    saturated, U^perp / U is again even unimodular of signature 0, so it has an
    isotropic vector unless it is zero; each new vector splits off one more
    hyperbolic plane.  Candidates are searched first as short vectors in the
    given coordinates, then in a basis of a complement of U in U^perp, with the
    coordinate bound growing through 2, 4, 8, ...
    """
    S = S_in.tolist() if isinstance(S_in, IntMatrix) else [list(r) for r in S_in]
    n = len(S)
    if any(len(r) != n for r in S) or any(S[i][j] != S[j][i] for i in range(n) for j in range(n)):
        raise NotEvenUnimodular("matrix is not symmetric")
    if not _even_diagonal(S) or abs(intlin.det(S)) != 1:
        raise NotEvenUnimodular("form is not even unimodular")
    if n and intlin.signature_rows(S) != 0:
        raise NonzeroSignature("signature is not zero")
    U: list[list[int]] = []
    while len(U) < n // 2:
        cons = [intlin.matvec(S, v) for v in U]
        z = _isotropic_search(S, cons, U, max_bound_exp=1, max_support=3)
        if z is None:
            # work in a complement X of U inside U^perp
            P = intlin.kernel_basis(cons, len(cons), n) if cons else [list(r) for r in intlin.identity_rows(n)]
            PM = IntMatrix.from_columns(P, n)
            Uc = [intlin.solve_integral(PM, u) for u in U]
            X = intlin.summand_complement(Sublattice.from_vectors(Uc, len(P))).vectors() if Uc else \
                [list(r) for r in intlin.identity_rows(len(P))]
            Xn = [[sum(c[t] * P[t][i] for t in range(len(P))) for i in range(n)] for c in X]
            G = [[sum(x[i] * S[i][j] * y[j] for i in range(n) for j in range(n)) for y in Xn] for x in Xn]
            c = _isotropic_search(G, [], [], max_bound_exp=max_bound_exp)
            if c is None:
                raise SearchExhausted("no isotropic vector found within the coordinate bound")
            z = [sum(ci * x[i] for ci, x in zip(c, Xn)) for i in range(n)]
        U = intlin.saturation(U + [z], n)
    if not U:
        return Sublattice(n, IntMatrix.zeros(n, 0))
    return Sublattice.from_vectors([list(c) for c in intlin.hnf_columns(U, n)], n)


def prop13_construct_witness(d: SurgeryDatum) -> PipelineReport:
    rep = check_conditions_abc(d)
    if not rep.conditions_ok:
        raise ConditionsNotMet("; ".join(rep.diagnostics) or "conditions a)-c) fail")
    theta, K = d.triple()
    n = d.V_rank
    S = d.S.tolist()
    k = len(K)
    SK = [[sum(K[a][i] * S[i][j] * K[b][j] for i in range(n) for j in range(n)) for b in range(k)] for a in range(k)]
    rad = intlin.kernel_basis(SK, k, k) if k else []
    if len(rad) != d.A_rank:
        raise ConditionsNotMet(f"rank rad(S_K) = {len(rad)} differs from rank A = {d.A_rank}")
    if k:
        diag = intlin.snf_diagonal(SK, k, k)
        if any(x not in (0, 1) for x in diag):
            raise ConditionsNotMet("coker S_K has torsion")
    rep.diagnostics.append(f"rank Ker rho = {k}, rank rad(S_K) = {len(rad)}")
    if rad and len(rad) < k:
        X = intlin.summand_complement(Sublattice.from_vectors(rad, k)).vectors()
    elif rad:
        X = []
    else:
        X = [list(r) for r in intlin.identity_rows(k)]
    SX = [[sum(x[a] * SK[a][b] * y[b] for a in range(k) for b in range(k)) for y in X] for x in X]
    U = hyperbolic_split_even_unimodular(SX).vectors() if X else []
    U_K = [[sum(c[t] * X[t][i] for t in range(len(X))) for i in range(k)] for c in U]
    basis = U_K + [list(v) for v in rad]
    W = ElementaryWitness.from_int_vectors(basis)
    if not verify_elementary_witness(theta, W):
        raise ConditionsNotMet("constructed witness failed verification")
    rep.witness = W
    rep.triple = theta
    rep.witness_in_V = [[sum(c[t] * K[t][i] for t in range(k)) for i in range(n)] for c in basis]
    return rep


def theorem6_check(sign_W: int, char_numbers: Sequence[int], d: SurgeryDatum) -> PipelineReport:
    rep = check_conditions_abc(d)
    rep.sign_vanishes = sign_W == 0
    rep.char_numbers_vanish = all(c == 0 for c in char_numbers)
    if not rep.sign_vanishes:
        rep.diagnostics.append(f"(i) sign W = {sign_W}, not 0")
    if not rep.char_numbers_vanish:
        rep.diagnostics.append("(ii) a characteristic number is nonzero")
    sig = intlin.signature_rows(d.S.tolist())
    if sig != sign_W:
        rep.diagnostics.append(f"signature(S) = {sig} differs from sign W = {sign_W}")
    if rep.sign_vanishes and rep.char_numbers_vanish and sig == sign_W and rep.conditions_ok:
        full = prop13_construct_witness(d)
        full.sign_vanishes, full.char_numbers_vanish = True, True
        return full
    return rep
