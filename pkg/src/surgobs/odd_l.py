"""Odd-dimensional obstructions: pairs (H_eps(Lambda^r), V).

V is a based half rank direct summand of the hyperbolic form, stored as a
2r x r matrix whose columns are coordinates in the basis e_1, f_1, ..., e_r, f_r.
The pair is elementary when V together with the f-basis is a (simple) basis.

The group generated by flips, swaps, scalings, additions and lower triangular
moves acts by V -> A V.  Over Z the module also carries the constructive plane
moving algorithm built from transvections, the lagrangian complement peeling
and the conversion of a lagrangian complement into an elementary
representative.  Generator indices are 1-based, as in the usual notation.
"""
from __future__ import annotations

import itertools
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

from . import intlin
from .forms import (DimensionMismatch, EpsQuadraticForm, LamMatrix, Simpleness, UnsupportedGroup,
                    eval_lambda, eval_mu, hyperbolic, lam_compose, lam_from_int, lam_has_left_inverse,
                    lam_identity, lam_is_invertible, lam_to_int, lam_zero_matrix, simpleness)
from .group_ring import GroupContext, RingElement, Variant
from .intlin import IntMatrix, Sublattice


class VariantMismatch(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class PreconditionViolated(ValueError):
    pass


class NotAHyperbolicPlane(ValueError):
    pass


class NotAnIsometry(ValueError):
    pass


class SplitInfoInvalid(ValueError):
    pass


class InvalidGenerator(ValueError):
    pass


class OddVariant(str, Enum):
    RU = "ru"
    RU_TILDE = "ru_tilde"

    @property
    def form_variant(self) -> Variant:
        return Variant.MU if self is OddVariant.RU else Variant.MU_TILDE


def _e(i: int) -> int:
    return 2 * (i - 1)


def _f(i: int) -> int:
    return 2 * (i - 1) + 1


# ---------------------------------------------------------------- pairs

@dataclass(frozen=True, eq=False)
class OddObstruction:
    ctx: GroupContext
    epsilon: int
    variant: OddVariant
    r: int
    V: tuple[tuple[RingElement, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variant", OddVariant(self.variant))
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +-1")
        if self.variant is OddVariant.RU_TILDE and self.epsilon != -1:
            raise VariantMismatch("the modified variant is only defined for epsilon = -1")
        if len(self.V) != 2 * self.r or any(len(row) != self.r for row in self.V):
            raise DimensionMismatch("V must be a 2r x r matrix")
        if not lam_has_left_inverse(self.V_matrix(), self.ctx, 2 * self.r, self.r):
            raise intlin.NotASummand("V is not a rank r direct summand")

    def __eq__(self, other):
        return (isinstance(other, OddObstruction) and self.ctx == other.ctx
                and self.epsilon == other.epsilon and self.variant == other.variant
                and self.r == other.r and self.V == other.V)

    def __hash__(self):
        return hash((self.epsilon, self.variant, self.r, self.V))

    def V_matrix(self) -> LamMatrix:
        return [list(row) for row in self.V]

    def V_int(self) -> list[list[int]]:
        return lam_to_int(self.V_matrix())

    def form(self) -> EpsQuadraticForm:
        return hyperbolic(self.r, self.epsilon, self.ctx, self.variant.form_variant)

    def columns(self) -> list[list[RingElement]]:
        return [[self.V[i][j] for i in range(2 * self.r)] for j in range(self.r)]

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "variant": self.variant.value, "r": self.r,
                "V": [[list(x.coeffs) for x in row] for row in self.V]}

    @classmethod
    def from_json(cls, d: dict, ctx: Optional[GroupContext] = None) -> "OddObstruction":
        ctx = GroupContext.integers() if ctx is None else ctx
        r = int(d["r"])
        rows = []
        for row in d["V"]:
            rows.append(tuple(ctx.scalar(x) if isinstance(x, int) else ctx.from_coeffs(x) for x in row))
        return cls(ctx, int(d["epsilon"]), OddVariant(d.get("variant", "ru")), r, tuple(rows))


def make_odd(ctx: GroupContext, epsilon: int, V: LamMatrix, variant: OddVariant = OddVariant.RU,
             r: Optional[int] = None) -> OddObstruction:
    r = (len(V) // 2) if r is None else r
    return OddObstruction(ctx, epsilon, OddVariant(variant), r, tuple(tuple(row) for row in V))


def odd_over_z(epsilon: int, V: Sequence[Sequence[int]], variant: OddVariant = OddVariant.RU) -> OddObstruction:
    """Pair over Z from an integer 2r x r matrix (rows of coordinates)."""
    ctx = GroupContext.integers()
    r = len(V) // 2
    return make_odd(ctx, epsilon, lam_from_int(ctx, [list(row) for row in V]) if r else [], variant, r)


def odd_from_columns(epsilon: int, cols: Sequence[Sequence[int]],
                     variant: OddVariant = OddVariant.RU) -> OddObstruction:
    n = len(cols[0]) if cols else 0
    return odd_over_z(epsilon, [[c[i] for c in cols] for i in range(n)], variant)


def stabilize_odd(P: OddObstruction) -> OddObstruction:
    """(H^r, V) -> (H^r + H, V + <e_{r+1}>)."""
    ctx, r = P.ctx, P.r
    z = ctx.zero()
    rows = [list(row) + [z] for row in P.V]
    rows.append([z] * r + [ctx.one()])
    rows.append([z] * (r + 1))
    return make_odd(ctx, P.epsilon, rows, P.variant, r + 1)


def f_basis_matrix(P: OddObstruction) -> LamMatrix:
    ctx, r = P.ctx, P.r
    M = lam_zero_matrix(ctx, 2 * r, 2 * r)
    for j in range(r):
        for i in range(2 * r):
            M[i][j] = P.V[i][j]
        M[_f(j + 1)][r + j] = ctx.one()
    return M


def is_elementary_rep(P: OddObstruction) -> bool:
    """[V | f_1 .. f_r] is invertible and provably simple."""
    if P.r == 0:
        return True
    M = f_basis_matrix(P)
    if not lam_is_invertible(M, P.ctx):
        return False
    return simpleness(M, P.ctx) is Simpleness.SIMPLE


# ------------------------------------------------------------ generators

def _check_index(i: int, r: int):
    if not 1 <= i <= r:
        raise IndexOutOfRange(f"plane index {i} outside 1..{r}")


@dataclass(frozen=True)
class Flip:
    """e_i -> eps f_i, f_i -> e_i."""
    i: int

    def matrix(self, ctx: GroupContext, epsilon: int, r: int, variant: OddVariant) -> LamMatrix:
        _check_index(self.i, r)
        M = lam_identity(ctx, 2 * r)
        e, f = _e(self.i), _f(self.i)
        M[e][e], M[f][f] = ctx.zero(), ctx.zero()
        M[f][e] = ctx.scalar(epsilon)
        M[e][f] = ctx.one()
        return M

    def to_json(self) -> dict:
        return {"type": "Flip", "i": self.i}


@dataclass(frozen=True)
class Swap:
    i: int
    j: int

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        _check_index(self.i, r)
        _check_index(self.j, r)
        perm = list(range(2 * r))
        for a, b in ((_e(self.i), _e(self.j)), (_f(self.i), _f(self.j))):
            perm[a], perm[b] = perm[b], perm[a]
        M = lam_zero_matrix(ctx, 2 * r, 2 * r)
        for col, row in enumerate(perm):
            M[row][col] = ctx.one()
        return M

    def to_json(self) -> dict:
        return {"type": "Swap", "i": self.i, "j": self.j}


@dataclass(frozen=True)
class Scale:
    """e_i -> s g e_i, f_i -> s w(g) g f_i with s = +-1."""
    i: int
    sign: int = -1
    g: Optional[int] = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidGenerator("scale sign must be +-1")

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        _check_index(self.i, r)
        g = ctx.group.identity if self.g is None else self.g
        if not 0 <= g < ctx.order:
            raise InvalidGenerator("group element out of range")
        M = lam_identity(ctx, 2 * r)
        M[_e(self.i)][_e(self.i)] = ctx.element(g, self.sign)
        M[_f(self.i)][_f(self.i)] = ctx.element(g, self.sign * ctx.w(g))
        return M

    def to_json(self) -> dict:
        return {"type": "Scale", "i": self.i, "sign": self.sign, "g": self.g}


@dataclass(frozen=True)
class Add:
    """e_i -> e_i + e_j, f_j -> f_j - f_i."""
    i: int
    j: int

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        _check_index(self.i, r)
        _check_index(self.j, r)
        if self.i == self.j:
            raise InvalidGenerator("Add needs two distinct planes")
        M = lam_identity(ctx, 2 * r)
        M[_e(self.j)][_e(self.i)] = ctx.one()
        M[_f(self.i)][_f(self.j)] = ctx.scalar(-1)
        return M

    def to_json(self) -> dict:
        return {"type": "Add", "i": self.i, "j": self.j}


@dataclass(frozen=True)
class Lower:
    """f_i -> f_i + sum_j C[i][j] e_j.

    Isometry requires C[i][j] = -eps bar(C[j][i]) off the diagonal and
    C[i][i] = c - eps bar(c) for some c; both are checked by `validate`.
    """
    C: tuple[tuple[RingElement, ...], ...]

    def validate(self, epsilon: int):
        n = len(self.C)
        if any(len(row) != n for row in self.C):
            raise InvalidGenerator("C must be square")
        if n == 0:
            return
        ctx = self.C[0][0].ctx
        Q = ctx.quotient(epsilon, Variant.MU)
        for i in range(n):
            for j in range(n):
                if i != j and self.C[i][j] != -epsilon * self.C[j][i].bar():
                    raise InvalidGenerator(f"C[{i}][{j}] must be -eps * bar(C[{j}][{i}])")
            if not Q.canonicalize(self.C[i][i]).is_zero():
                raise InvalidGenerator(f"C[{i}][{i}] is not of the form c - eps bar(c)")

    @classmethod
    def from_int(cls, C: Sequence[Sequence[int]], epsilon: int,
                 ctx: Optional[GroupContext] = None) -> "Lower":
        ctx = GroupContext.integers() if ctx is None else ctx
        g = cls(tuple(tuple(ctx.scalar(x) for x in row) for row in C))
        g.validate(epsilon)
        return g

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        if len(self.C) != r:
            raise IndexOutOfRange("Lower matrix size differs from r")
        self.validate(epsilon)
        M = lam_identity(ctx, 2 * r)
        for i in range(r):
            for j in range(r):
                M[_e(j + 1)][_f(i + 1)] = self.C[i][j]
        return M

    def to_json(self) -> dict:
        return {"type": "Lower", "C": [[list(x.coeffs) for x in row] for row in self.C]}


@dataclass(frozen=True)
class MuShift:
    """e_i -> e_i + f_i (modified variant only)."""
    i: int

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        if OddVariant(variant) is not OddVariant.RU_TILDE:
            raise VariantMismatch("MuShift only acts in the modified variant")
        _check_index(self.i, r)
        M = lam_identity(ctx, 2 * r)
        M[_f(self.i)][_e(self.i)] = ctx.one()
        return M

    def to_json(self) -> dict:
        return {"type": "MuShift", "i": self.i}


# ----------------------------------------- auxiliary word items (over Z)

def hyperbolic_gram(r: int, epsilon: int) -> list[list[int]]:
    G = [[0] * (2 * r) for _ in range(2 * r)]
    for i in range(r):
        G[2 * i][2 * i + 1] = 1
        G[2 * i + 1][2 * i] = epsilon
    return G


def pair(x: Sequence[int], y: Sequence[int], epsilon: int) -> int:
    """lambda of the hyperbolic form over Z on coordinate vectors."""
    s = 0
    for i in range(0, len(x), 2):
        s += x[i] * y[i + 1] + epsilon * x[i + 1] * y[i]
    return s


def transvect(u: Sequence[int], v: Sequence[int], q_parity: int) -> list[list[int]]:
    """Matrix of x -> x + <v,x> u - (-1)^q <u,x> v on H_eps(Z^r), eps = (-1)^q."""
    if len(u) != len(v) or len(u) % 2:
        raise DimensionMismatch("u and v must be coordinate vectors of equal even length")
    eps = -1 if q_parity % 2 else 1
    if pair(u, v, eps) or pair(u, u, eps) or pair(v, v, eps):
        raise PreconditionViolated("transvection needs <u,v> = <u,u> = <v,v> = 0")
    n = len(u)
    cols = []
    for j in range(n):
        x = [0] * n
        x[j] = 1
        a, b = pair(v, x, eps), pair(u, x, eps)
        cols.append([x[k] + a * u[k] - eps * b * v[k] for k in range(n)])
    return [[c[i] for c in cols] for i in range(n)]


@dataclass(frozen=True)
class Transvection:
    u: tuple[int, ...]
    v: tuple[int, ...]
    q_parity: int

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        if len(self.u) != 2 * r:
            raise IndexOutOfRange("transvection vectors have the wrong length")
        return lam_from_int(ctx, transvect(self.u, self.v, self.q_parity))

    def to_json(self) -> dict:
        return {"type": "Transvection", "u": list(self.u), "v": list(self.v), "q_parity": self.q_parity}


@dataclass(frozen=True)
class PlaneSL2:
    """An element of SL_2(Z) acting on the coordinates (e_i, f_i) of one plane."""
    i: int
    M: tuple[tuple[int, int], tuple[int, int]]

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        _check_index(self.i, r)
        (a, b), (c, d) = self.M
        if a * d - b * c != 1:
            raise InvalidGenerator("plane move must have determinant 1")
        M = [[int(i == j) for j in range(2 * r)] for i in range(2 * r)]
        e, f = _e(self.i), _f(self.i)
        M[e][e], M[e][f], M[f][e], M[f][f] = a, b, c, d
        return lam_from_int(ctx, M)

    def to_json(self) -> dict:
        return {"type": "PlaneSL2", "i": self.i, "M": [list(row) for row in self.M]}


@dataclass(frozen=True)
class Isometry:
    """An explicit integral isometry, recorded with a short label."""
    label: str
    M: tuple[tuple[int, ...], ...]

    def matrix(self, ctx, epsilon, r, variant) -> LamMatrix:
        if len(self.M) != 2 * r:
            raise IndexOutOfRange("isometry has the wrong size")
        return lam_from_int(ctx, [list(row) for row in self.M])

    def to_json(self) -> dict:
        return {"type": "Isometry", "label": self.label, "M": [list(row) for row in self.M]}


@dataclass(frozen=True)
class Stabilize:
    def to_json(self) -> dict:
        return {"type": "Stabilize"}


RUGenerator = Union[Flip, Swap, Scale, Add, Lower, MuShift]
WordItem = Union[Flip, Swap, Scale, Add, Lower, MuShift, Transvection, PlaneSL2, Isometry, Stabilize]
RUWord = list


def generator_from_json(d: dict, ctx: Optional[GroupContext] = None) -> WordItem:
    ctx = GroupContext.integers() if ctx is None else ctx
    t = d["type"]
    if t == "Flip":
        return Flip(int(d["i"]))
    if t == "Swap":
        return Swap(int(d["i"]), int(d["j"]))
    if t == "Scale":
        return Scale(int(d["i"]), int(d.get("sign", -1)), d.get("g"))
    if t == "Add":
        return Add(int(d["i"]), int(d["j"]))
    if t == "Lower":
        return Lower(tuple(tuple(ctx.scalar(x) if isinstance(x, int) else ctx.from_coeffs(x) for x in row)
                           for row in d["C"]))
    if t == "MuShift":
        return MuShift(int(d["i"]))
    if t == "Transvection":
        return Transvection(tuple(d["u"]), tuple(d["v"]), int(d["q_parity"]))
    if t == "PlaneSL2":
        return PlaneSL2(int(d["i"]), tuple(tuple(row) for row in d["M"]))
    if t == "Isometry":
        return Isometry(str(d.get("label", "")), tuple(tuple(row) for row in d["M"]))
    if t == "Stabilize":
        return Stabilize()
    raise ValueError(f"unknown word item {t!r}")


def word_to_json(word: Sequence[WordItem]) -> list[dict]:
    return [g.to_json() for g in word]


def generator_matrix(g: WordItem, ctx: GroupContext, epsilon: int, r: int,
                     variant: OddVariant = OddVariant.RU) -> LamMatrix:
    return g.matrix(ctx, epsilon, r, OddVariant(variant))


def apply_generator(P: OddObstruction, g: WordItem) -> OddObstruction:
    if isinstance(g, Stabilize):
        return stabilize_odd(P)
    A = g.matrix(P.ctx, P.epsilon, P.r, P.variant)
    return make_odd(P.ctx, P.epsilon, lam_compose(A, P.V_matrix(), P.ctx), P.variant, P.r)


def apply_word(P: OddObstruction, word: Sequence[WordItem]) -> OddObstruction:
    for g in word:
        P = apply_generator(P, g)
    return P


def word_product(word: Sequence[WordItem], ctx: GroupContext, epsilon: int, r: int,
                 variant: OddVariant = OddVariant.RU) -> LamMatrix:
    """The matrix of the word; the first item acts first."""
    A = lam_identity(ctx, 2 * r)
    for g in word:
        A = lam_compose(g.matrix(ctx, epsilon, r, variant), A, ctx)
    return A


def is_form_isometry(M: LamMatrix, ctx: GroupContext, epsilon: int, r: int,
                     variant: OddVariant = OddVariant.RU) -> bool:
    from .forms import is_isometry
    H = hyperbolic(r, epsilon, ctx, OddVariant(variant).form_variant)
    return is_isometry(M, H, H)


# ------------------------------------------------------- orbit search

def search_generators(r: int, epsilon: int, variant: OddVariant = OddVariant.RU) -> list[RUGenerator]:
    """Small generator set used by the breadth-first searches over Z."""
    gens: list[RUGenerator] = []
    for i in range(1, r + 1):
        gens.append(Flip(i))
        gens.append(Scale(i, -1))
    for i, j in itertools.combinations(range(1, r + 1), 2):
        gens.append(Swap(i, j))
    for i, j in itertools.permutations(range(1, r + 1), 2):
        gens.append(Add(i, j))
    diag_vals = [2, -2] if epsilon == -1 else []
    for i in range(r):
        for c in diag_vals:
            C = [[0] * r for _ in range(r)]
            C[i][i] = c
            gens.append(Lower.from_int(C, epsilon))
    for i, j in itertools.combinations(range(r), 2):
        for t in (1, -1):
            C = [[0] * r for _ in range(r)]
            C[i][j] = t
            C[j][i] = -epsilon * t
            gens.append(Lower.from_int(C, epsilon))
    if OddVariant(variant) is OddVariant.RU_TILDE:
        gens.extend(MuShift(i) for i in range(1, r + 1))
    return gens


def _int_matrix(g: WordItem, epsilon: int, r: int, variant: OddVariant) -> list[list[int]]:
    return lam_to_int(g.matrix(GroupContext.integers(), epsilon, r, variant))


def _elementary_int(V: list[list[int]], r: int) -> bool:
    if r == 0:
        return True
    M = [list(V[i]) + [int(i == _f(j + 1)) for j in range(r)] for i in range(2 * r)]
    return abs(intlin.det(M)) == 1


def _stabilize_int(V: list[list[int]], r: int) -> list[list[int]]:
    rows = [list(row) + [0] for row in V]
    rows.append([0] * r + [1])
    rows.append([0] * (r + 1))
    return rows


def _canon(V: list[list[int]], r: int) -> tuple:
    cols = [[V[i][j] for i in range(2 * r)] for j in range(r)]
    return (r, intlin.hnf_columns(cols, 2 * r))


def decide_elementary_orbit(P: OddObstruction, depth: int, stabilizations: int = 0,
                            max_ms: Optional[int] = None) -> Optional[RUWord]:
    """Breadth-first search for a word making P elementary.

    None means nothing was found within the bounds (word length, number of
    stabilizations, wall clock); it is not a disproof.
    """
    if not P.ctx.is_trivial():
        raise UnsupportedGroup("orbit search is implemented over Z only")
    start = P.V_int() if P.r else []
    if _elementary_int(start, P.r):
        return []
    cache: dict[int, list[tuple[RUGenerator, list[list[int]]]]] = {}

    def gens(r):
        if r not in cache:
            cache[r] = [(g, _int_matrix(g, P.epsilon, r, P.variant))
                        for g in search_generators(r, P.epsilon, P.variant)]
        return cache[r]

    deadline = None if max_ms is None else time.monotonic() + max_ms / 1000
    seen = {_canon(start, P.r)}
    queue = deque([(start, P.r, 0, [])])
    while queue:
        if deadline is not None and time.monotonic() > deadline:
            return None
        V, r, stabs, word = queue.popleft()
        if len(word) >= depth:
            continue
        moves = [(g, intlin.matmul(A, V)) for g, A in gens(r)]
        if stabs < stabilizations:
            moves.append((Stabilize(), _stabilize_int(V, r)))
        for g, W in moves:
            r2 = r + 1 if isinstance(g, Stabilize) else r
            key = _canon(W, r2)
            if key in seen:
                continue
            seen.add(key)
            w2 = word + [g]
            if _elementary_int(W, r2):
                return w2
            queue.append((W, r2, stabs + isinstance(g, Stabilize), w2))
    return None


# ---------------------------------------------------- integer helpers

def _col_matrix(vectors: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    return [[v[i] for v in vectors] for i in range(n)]


def _unit(n: int, k: int) -> list[int]:
    v = [0] * n
    v[k] = 1
    return v


def _in_span(vectors: Sequence[Sequence[int]], x: Sequence[int], n: int) -> Optional[list[int]]:
    if not vectors:
        return [] if not any(x) else None
    return intlin.solve_integral(IntMatrix.from_columns([list(v) for v in vectors], n), list(x))


def preserves_submodule(A: list[list[int]], W: Sequence[Sequence[int]], n: int) -> bool:
    """A(W) = W for an invertible integral A."""
    Ainv = intlin.inverse_unimodular(A)
    for M in (A, Ainv):
        for w in W:
            if _in_span(W, intlin.matvec(M, w), n) is None:
                return False
    return True


def is_lagrangian(L: Sequence[Sequence[int]], epsilon: int, variant: OddVariant = OddVariant.RU) -> bool:
    """lambda and mu vanish on the span of L (vectors in H_eps(Z^r))."""
    n = len(L[0]) if L else 0
    r = n // 2
    if any(pair(a, b, epsilon) for a in L for b in L):
        return False
    H = hyperbolic(r, epsilon, None, OddVariant(variant).form_variant)
    ctx = H.ctx
    return all(eval_mu(H, [ctx.scalar(x) for x in v]).is_zero() for v in L)


def is_lagrangian_complement(V: Sequence[Sequence[int]], L: Sequence[Sequence[int]], epsilon: int,
                             variant: OddVariant = OddVariant.RU) -> bool:
    n = len(V[0]) if V else (len(L[0]) if L else 0)
    if len(V) + len(L) != n:
        return False
    if not is_lagrangian(L, epsilon, variant):
        return False
    return n == 0 or abs(intlin.det(_col_matrix(list(V) + list(L), n))) == 1


# --------------------------------------------------- plane move (Z)

class Prop9Case(str, Enum):
    Q_ODD = "q_odd"
    Q_EVEN_WITH_H_PLUS = "q_even_with_h_plus"


class _Tracker:
    """Accumulates isometries of H_eps(Z^m) together with the moving plane."""

    def __init__(self, m: int, epsilon: int, e: list[int], f: list[int]):
        self.m, self.eps = m, epsilon
        self.n = 2 * m
        self.A = intlin.identity_rows(self.n)
        self.word: list[WordItem] = []
        self.e, self.f = list(e), list(f)
        self.e0, self.f0 = list(e), list(f)

    def apply(self, item: WordItem):
        M = _int_matrix(item, self.eps, self.m, OddVariant.RU)
        if M == intlin.identity_rows(self.n):
            return
        self.A = intlin.matmul(M, self.A)
        self.e = intlin.matvec(M, self.e)
        self.f = intlin.matvec(M, self.f)
        self.word.append(item)

    def transvection(self, u: Sequence[int], v: Sequence[int]):
        if any(u) and any(v):
            self.apply(Transvection(tuple(u), tuple(v), 1 if self.eps == -1 else 0))


def _sl2_to(a: int, b: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """M in SL_2(Z) with M (a, b)^T = (gcd, 0)^T."""
    g, s, t = intlin._xgcd(a, b)
    if g == 0:
        return ((1, 0), (0, 1))
    return ((s, t), (-b // g, a // g))


def _check_plane(W: list[list[int]], e: Sequence[int], f: Sequence[int], epsilon: int, n: int):
    if pair(e, f, epsilon) != 1 or pair(e, e, epsilon) or pair(f, f, epsilon):
        raise NotAHyperbolicPlane("need lambda(e,f) = 1 with e, f isotropic")
    if _in_span(W, e, n) is None or _in_span(W, f, n) is None:
        raise NotAHyperbolicPlane("the plane is not contained in V + H_1")


def _finish_plane(T: _Tracker, h: int):
    """Append the plane move sending the images of the original e, f to e_h, f_h."""
    ae, af = intlin.matvec(T.A, T.e0), intlin.matvec(T.A, T.f0)
    K = ((ae[_e(h)], af[_e(h)]), (ae[_f(h)], af[_f(h)]))
    det = K[0][0] * K[1][1] - K[0][1] * K[1][0]
    if det != 1 or any(x for k, x in enumerate(ae) if k not in (_e(h), _f(h))) \
            or any(x for k, x in enumerate(af) if k not in (_e(h), _f(h))):
        raise AssertionError("plane move failed to land in H_1")
    inv = ((K[1][1], -K[0][1]), (-K[1][0], K[0][0]))
    if inv != ((1, 0), (0, 1)):
        if T.eps == -1:
            T.apply(PlaneSL2(h, inv))
        else:
            T.apply(Isometry("plane", _plane_iso(T.m, h, inv)))


def _plane_iso(m: int, h: int, M) -> tuple[tuple[int, ...], ...]:
    A = intlin.identity_rows(2 * m)
    e, f = _e(h), _f(h)
    A[e][e], A[e][f], A[f][e], A[f][f] = M[0][0], M[0][1], M[1][0], M[1][1]
    return tuple(tuple(row) for row in A)


def _move_q_odd(T: _Tracker, h: int):
    E1, F1 = _unit(T.n, _e(h)), _unit(T.n, _f(h))
    if T.e == E1 and T.f == F1:
        return
    # clear the f_1 coordinate of e
    a, b = T.e[_e(h)], T.e[_f(h)]
    if b:
        T.apply(PlaneSL2(h, _sl2_to(a, b)))
    a = T.e[_e(h)]
    b, c = T.f[_e(h)], T.f[_f(h)]
    # sigma_{e,e_1}^k moves the e_1 coordinate of f by k(ca + 1)
    m = c * a + 1
    if c == 0:
        k = 1 - b
    else:
        k = ((1 - b) * pow(m, -1, abs(c))) % abs(c) if abs(c) > 1 else 0
    if k:
        T.transvection([k * x for x in T.e], E1)
    b, c = T.f[_e(h)], T.f[_f(h)]
    T.apply(PlaneSL2(h, _sl2_to(b, c)))
    # f = y + e_1; the inverse of sigma_{y,-f_1} sends it to e_1
    y = [x - d for x, d in zip(T.f, E1)]
    T.transvection([-x for x in y], [-x for x in F1])
    assert T.f == E1
    a = T.e[_e(h)]
    assert T.e[_f(h)] == -1
    # new plane basis (f, -(e - a f)) = (e_1, -x + f_1)
    e_new = T.f
    f_new = [-(x - a * y2) for x, y2 in zip(T.e, T.f)]
    T.e, T.f = e_new, f_new
    y = [x - d for x, d in zip(T.f, F1)]
    T.transvection([-x for x in y], E1)


def _u2_coords(x: Sequence[int], B4: Sequence[Sequence[int]], eps: int) -> list[int]:
    """Coordinates of the projection of x on the plane sum with basis (p1, q1, p2, q2)."""
    return [pair(x, B4[1], eps), pair(x, B4[0], eps), pair(x, B4[3], eps), pair(x, B4[2], eps)]


def _u2_isometry(T: _Tracker, B4: Sequence[Sequence[int]], Phi: Sequence[Sequence[int]]) -> list[list[int]]:
    """Extend Phi (4x4 on the basis B4) by the identity on the orthogonal complement."""
    n = T.n
    cols = []
    for j in range(n):
        x = _unit(n, j)
        c = _u2_coords(x, B4, T.eps)
        img = list(x)
        for k in range(4):
            for i in range(n):
                img[i] -= c[k] * B4[k][i]
        for k in range(4):
            coef = sum(Phi[k][l] * c[l] for l in range(4))
            for i in range(n):
                img[i] += coef * B4[k][i]
        cols.append(img)
    return [[c[i] for c in cols] for i in range(n)]


def _mat_of(w: Sequence[int]) -> list[list[int]]:
    a, b, c, d = w
    return [[a, c], [-d, b]]


def _vec_of(X) -> list[int]:
    return [X[0][0], X[1][1], X[0][1], -X[1][0]]


def _to_diag(w: Sequence[int]) -> list[list[int]]:
    """4x4 isometry of the hyperbolic sum sending the primitive w to p1 + N q1.

    Vectors a p1 + b q1 + c p2 + d q2 correspond to 2x2 matrices with
    determinant ab + cd; X -> P X Q^-1 with det P = det Q preserves it.
    """
    X = _mat_of(w)
    U, D, V = intlin._snf_rows(X, 2, 2)
    if intlin.det(U) != intlin.det(V):
        U = [U[0], [-x for x in U[1]]]
    cols = []
    for k in range(4):
        Z = intlin.matmul(intlin.matmul(U, _mat_of(_unit(4, k))), V)
        cols.append(_vec_of(Z))
    return [[c[i] for c in cols] for i in range(4)]


def _transitive(T: _Tracker, B4, target: Sequence[int]):
    """Isometry of the plane sum moving the projection of e to the given target."""
    w = _u2_coords(T.e, B4, T.eps)
    if list(w) == list(target):
        return
    k = 0
    for x in w:
        k = intlin._xgcd(k, x)[0]
    kt = 0
    for x in target:
        kt = intlin._xgcd(kt, x)[0]
    if k != kt or k == 0:
        raise AssertionError("transitivity step needs equal contents")
    D1 = _to_diag([x // k for x in w])
    D2 = _to_diag([x // k for x in target])
    Phi = intlin.matmul(intlin.inverse_unimodular(D2), D1)
    T.apply(Isometry("transitive", tuple(tuple(r) for r in _u2_isometry(T, B4, Phi))))


def _move_q_even(T: _Tracker, h: int, p2: list[int], q2: list[int]):
    n, eps = T.n, T.eps
    E1, F1 = _unit(n, _e(h)), _unit(n, _f(h))
    if T.e == E1 and T.f == F1:
        return
    B4 = [E1, F1, p2, q2]
    w = _u2_coords(T.e, B4, eps)
    if any(w):
        k = 0
        for x in w:
            k = intlin._xgcd(k, x)[0]
        N = (w[0] * w[1] + w[2] * w[3]) // (k * k)
        _transitive(T, B4, [0, 0, k, k * N])
    # z in V' + H_2 with <e,z> = 1 and <z,z> = 0
    fh = [pair(T.f, F1, eps) * a + pair(T.f, E1, eps) * b for a, b in zip(E1, F1)]
    z0 = [a - b for a, b in zip(T.f, fh)]
    s = pair(z0, z0, eps) // 2
    z = [a - s * b for a, b in zip(z0, T.e)]
    T.transvection(z, [-x for x in E1])
    w = _u2_coords(T.e, B4, eps)
    if w[0] != 1 or w[1] != 0:
        raise AssertionError("expected e = x + e_1 + ...")
    norm = w[0] * w[1] + w[2] * w[3]
    _transitive(T, B4, [1, 0, 1, norm])
    u = [a - b for a, b in zip(T.e, E1)]
    T.transvection([-x for x in u], F1)
    if T.e != E1:
        raise AssertionError("expected e = e_1")
    a, b, c = pair(T.f, F1, eps), pair(T.f, q2, eps), pair(T.f, p2, eps)
    Phi = [[1, a * c - a + b * c * c - 2 * b * c + b, c - 1, b - a - b * c],
           [0, 1, 0, 0],
           [0, a + b * c - b, 1, 0],
           [0, 1 - c, 0, 1]]
    T.apply(Isometry("plane-to-last", tuple(tuple(r) for r in _u2_isometry(T, B4, Phi))))
    u = [x - d for x, d in zip(T.f, F1)]
    T.transvection([-x for x in u], E1)


def prop9_move_plane(V: Sublattice, H: Sequence[Sequence[int]], case: Prop9Case,
                     h_plus: Optional[Sequence[Sequence[int]]] = None,
                     ctx: Optional[GroupContext] = None) -> RUWord:
    """Word of isometries of H_eps(Z^r) + H_1 moving the plane H onto H_1.

    V is a submodule of H_eps(Z^r); H = (e, f) is a hyperbolic basis inside
    V + H_1 (coordinates of length 2r + 2, H_1 the last plane).  The product
    A of the word satisfies A e = e_1, A f = f_1 and A(V + H_1) = V + H_1.
    In the even case h_plus = (p, q) is a hyperbolic basis inside V.
    """
    if ctx is not None and not ctx.is_trivial():
        raise UnsupportedGroup("plane move is constructive over Z only")
    case = Prop9Case(case)
    eps = -1 if case is Prop9Case.Q_ODD else 1
    n0 = V.ambient_rank
    if n0 % 2:
        raise DimensionMismatch("V must live in an even rank hyperbolic form")
    m = n0 // 2 + 1
    n = 2 * m
    e, f = list(H[0]), list(H[1])
    if len(e) != n or len(f) != n:
        raise DimensionMismatch("plane vectors must have length 2r + 2")
    W = [list(v) + [0, 0] for v in V.vectors()] + [_unit(n, n - 2), _unit(n, n - 1)]
    _check_plane(W, e, f, eps, n)
    T = _Tracker(m, eps, e, f)
    if case is Prop9Case.Q_ODD:
        _move_q_odd(T, m)
    else:
        if h_plus is None or len(h_plus) != 2:
            raise NotAHyperbolicPlane("the even case needs a hyperbolic plane split off V")
        p2 = list(h_plus[0]) + [0, 0]
        q2 = list(h_plus[1]) + [0, 0]
        _check_plane(W, p2, q2, eps, n)
        if _in_span([list(v) + [0, 0] for v in V.vectors()], p2, n) is None or \
                _in_span([list(v) + [0, 0] for v in V.vectors()], q2, n) is None:
            raise NotAHyperbolicPlane("the split plane must lie in V")
        _move_q_even(T, m, p2, q2)
    _finish_plane(T, m)
    if not preserves_submodule(T.A, W, n):
        raise AssertionError("plane move left V + H_1")
    return T.word


def word_int_product(word: Sequence[WordItem], epsilon: int, m: int) -> list[list[int]]:
    return lam_to_int(word_product(word, GroupContext.integers(), epsilon, m)) if m else []


# ------------------------------------------------------- decompositions

def prop8_decompose(B: LamMatrix, U: OddObstruction) -> tuple[OddObstruction, OddObstruction]:
    """Split [H, B(U)] as [H, B(Lambda^t x 0)] + [H, U]."""
    ctx, eps, t = U.ctx, U.epsilon, U.r
    if len(B) != 2 * t:
        raise DimensionMismatch("B and U live on different forms")
    if not is_form_isometry(B, ctx, eps, t, U.variant):
        raise NotAnIsometry("B is not an isometry of the hyperbolic form")
    E = lam_zero_matrix(ctx, 2 * t, t)
    for j in range(t):
        E[_e(j + 1)][j] = ctx.one()
    first = make_odd(ctx, eps, lam_compose(B, E, ctx), U.variant, t)
    return first, U


def orthogonal_sum_odd(P: OddObstruction, Q: OddObstruction) -> OddObstruction:
    ctx = P.ctx
    z = ctx.zero()
    rows = [list(row) + [z] * Q.r for row in P.V] + [[z] * P.r + list(row) for row in Q.V]
    return make_odd(ctx, P.epsilon, rows, P.variant, P.r + Q.r)


def vanishes_on(P: OddObstruction) -> bool:
    """lambda and mu vanish on V: the pair lies in the group part."""
    H = P.form()
    cols = P.columns()
    for a in cols:
        if not eval_mu(H, a).is_zero():
            return False
        for b in cols:
            if not eval_lambda(H, a, b).is_zero():
                return False
    return True


def isometry_to_standard(L: Sequence[Sequence[int]], epsilon: int,
                         variant: OddVariant = OddVariant.RU) -> list[list[int]]:
    """An isometry of H_eps(Z^r) sending the lagrangian L onto the f-span."""
    r = len(L)
    n = 2 * r
    if r == 0:
        return []
    G = hyperbolic_gram(r, epsilon)
    # rows (G l_j)^T: w with lambda(w, l_j) = delta
    rows = [[sum(G[i][k] * l[k] for k in range(n)) for i in range(n)] for l in L]
    A = IntMatrix.from_rows(rows, n)
    W = []
    for j in range(r):
        w = intlin.solve_integral(A, _unit(r, j))
        if w is None:
            raise intlin.NotASummand("L is not a lagrangian direct summand")
        W.append(w)
    Gm = [[pair(W[i], W[k], epsilon) for k in range(r)] for i in range(r)]
    H = hyperbolic(r, epsilon, None, OddVariant(variant).form_variant)
    ctx = H.ctx
    a = [[0] * r for _ in range(r)]
    for i in range(r):
        for k in range(i + 1, r):
            a[i][k] = Gm[i][k] if epsilon == 1 else -Gm[i][k]
    for i in range(r):
        if epsilon == 1:
            a[i][i] = Gm[i][i] // 2
    W = [[W[i][x] - sum(a[i][j] * L[j][x] for j in range(r)) for x in range(n)] for i in range(r)]
    if epsilon == -1:
        for i in range(r):
            m = eval_mu(H, [ctx.scalar(x) for x in W[i]])
            if not m.is_zero():
                W[i] = [W[i][x] - L[i][x] for x in range(n)]
    basis = []
    for i in range(r):
        basis.append(W[i])
        basis.append(list(L[i]))
    D = _col_matrix(basis, n)
    C = intlin.inverse_unimodular(D)
    if not is_form_isometry(lam_from_int(ctx, C), ctx, epsilon, r, variant):
        raise AssertionError("dual basis construction failed")
    return C


def find_lagrangian_complement(P: OddObstruction, depth: int = 2, entry_bound: int = 1) -> Optional[Sublattice]:
    """A lagrangian complement of V found by a bounded direct search, or None."""
    if not P.ctx.is_trivial():
        raise UnsupportedGroup("lagrangian complements are searched over Z only")
    r, eps = P.r, P.epsilon
    n = 2 * r
    if r == 0:
        return Sublattice(0, IntMatrix.zeros(0, 0))
    Vc = [[row[j] for row in P.V_int()] for j in range(r)]

    def ok(L):
        return is_lagrangian_complement(Vc, L, eps, P.variant)

    F = [_unit(n, _f(i + 1)) for i in range(r)]
    E = [_unit(n, _e(i + 1)) for i in range(r)]
    for L in (F, E):
        if ok(L):
            return Sublattice.from_vectors(L, n)
    # graphs of small admissible matrices over F and over E
    vals = range(-entry_bound, entry_bound + 1)
    pairs = list(itertools.combinations(range(r), 2))
    diag = [0] if eps == 1 else [2 * c for c in vals]
    for d in itertools.product(diag, repeat=r):
        for off in itertools.product(vals, repeat=len(pairs)):
            C = [[0] * r for _ in range(r)]
            for i in range(r):
                C[i][i] = d[i]
            for (i, j), t in zip(pairs, off):
                C[i][j], C[j][i] = t, -eps * t
            for base, other in ((F, E), (E, F)):
                L = [[base[i][x] + sum(C[i][j] * other[j][x] for j in range(r)) for x in range(n)]
                     for i in range(r)]
                if ok(L):
                    return Sublattice.from_vectors(L, n)
    # images of F under short generator words
    mats = [_int_matrix(g, eps, r, P.variant) for g in search_generators(r, eps, P.variant)]
    frontier = [F]
    seen = {intlin.hnf_columns(F, n)}
    for _ in range(depth):
        nxt = []
        for L in frontier:
            for M in mats:
                L2 = [intlin.matvec(M, v) for v in L]
                key = intlin.hnf_columns(L2, n)
                if key in seen:
                    continue
                seen.add(key)
                if ok(L2):
                    return Sublattice.from_vectors(L2, n)
                nxt.append(L2)
        frontier = nxt
    return None


# ------------------------------------------------------ peeling (Z)

@dataclass
class SplitInfo:
    """Data for the reduction of a pair over Z.

    complement: a lagrangian complement of V + H_1 inside
    H_eps(Z^r) + H_1 + H_2 (vectors of length 2r + 4, H_1 and H_2 the last two
    planes).  h_plus: for eps = +1, a hyperbolic basis of a plane split off V.
    """
    complement: Optional[list[list[int]]] = None
    h_plus: Optional[list[list[int]]] = None
    search_depth: int = 2


@dataclass
class ReductionTrace:
    plane_word: list = field(default_factory=list)
    lagrangian_complement: list = field(default_factory=list)


def stabilized_with_h1(P: OddObstruction) -> list[list[int]]:
    """Columns of V + H_1 inside H_eps(Z^r) + H_1 + H_2."""
    r = P.r
    n = 2 * r + 4
    cols = [list(c) + [0, 0, 0, 0] for c in ([[row[j] for row in P.V_int()] for j in range(r)])]
    cols.append(_unit(n, _e(r + 1)))
    cols.append(_unit(n, _f(r + 1)))
    return cols


def standard_split_complement(P: OddObstruction, L: Sequence[Sequence[int]]) -> list[list[int]]:
    """Lagrangian complement of V + H_1 from a lagrangian complement L of V."""
    r = P.r
    n = 2 * r + 4
    out = [list(v) + [0, 0, 0, 0] for v in L]
    e1, f1, e2, f2 = _e(r + 1), _f(r + 1), _e(r + 2), _f(r + 2)
    a = [0] * n
    a[e2], a[e1] = 1, 1
    b = [0] * n
    b[f2], b[f1] = 1, -1
    out += [a, b]
    return out


def theorem5_reduce(P: OddObstruction, split_info: Optional[SplitInfo] = None,
                    trace: Optional[ReductionTrace] = None) -> Optional[tuple[RUWord, OddObstruction]]:
    """Peel a lagrangian complement off the stabilized pair and return an elementary representative."""
    if not P.ctx.is_trivial():
        raise UnsupportedGroup("the reduction is constructive over Z only")
    if is_elementary_rep(P):
        return [], P
    info = SplitInfo() if split_info is None else split_info
    r, eps = P.r, P.epsilon
    n = 2 * r + 4
    Wcols = stabilized_with_h1(P)
    Vhat = info.complement
    if Vhat is None:
        L = find_lagrangian_complement(P, depth=info.search_depth)
        if L is None:
            return None
        Vhat = standard_split_complement(P, L.vectors())
    Vhat = [list(v) for v in Vhat]
    if len(Vhat) != r + 2 or any(len(v) != n for v in Vhat):
        raise SplitInfoInvalid("complement must consist of r + 2 vectors of length 2r + 4")
    if not is_lagrangian_complement(Wcols, Vhat, eps, P.variant):
        raise SplitInfoInvalid("complement is not a lagrangian complement of V + H_1")
    basis = IntMatrix.from_columns(Wcols + Vhat, n)
    k = len(Wcols)

    def split(x):
        c = intlin.solve_integral(basis, x)
        return [sum(c[j] * Wcols[j][i] for j in range(k)) for i in range(n)]

    xe = split(_unit(n, _e(r + 2)))
    xf = split(_unit(n, _f(r + 2)))
    if pair(xe, xf, eps) != -1:
        raise SplitInfoInvalid("the projections of e_2, f_2 do not span a hyperbolic plane")
    Hplane = [xe[:2 * r + 2], [-x for x in xf[:2 * r + 2]]]
    Vsub = Sublattice.from_vectors([c[:2 * r] for c in Wcols[:r]], 2 * r)
    if eps == -1:
        plane_word = prop9_move_plane(Vsub, Hplane, Prop9Case.Q_ODD)
    else:
        if info.h_plus is None:
            raise SplitInfoInvalid("epsilon = +1 needs a hyperbolic plane split off V")
        try:
            plane_word = prop9_move_plane(Vsub, Hplane, Prop9Case.Q_EVEN_WITH_H_PLUS, info.h_plus)
        except NotAHyperbolicPlane as exc:
            raise SplitInfoInvalid(str(exc)) from exc
    A = word_int_product(plane_word, eps, r + 1)
    Aext = [list(row) + [0, 0] for row in A] + [[0] * (2 * r + 2) + [1, 0], [0] * (2 * r + 2) + [0, 1]]
    Vp = [intlin.matvec(Aext, v) for v in Vhat]
    h1 = [[v[_e(r + 1)] for v in Vp], [v[_f(r + 1)] for v in Vp]]
    ker = intlin.kernel_basis(h1, 2, r + 2)
    Bvecs = [[sum(c[j] * Vp[j][i] for j in range(r + 2)) for i in range(n)] for c in ker]
    if len(Bvecs) != r or any(v[2 * r:] != [0, 0, 0, 0] for v in Bvecs):
        raise AssertionError("peeled complement does not live in the original form")
    Bvecs = [v[:2 * r] for v in Bvecs]
    Vc = [c[:2 * r] for c in Wcols[:r]]
    if not is_lagrangian_complement(Vc, Bvecs, eps, P.variant):
        raise AssertionError("peeled module is not a lagrangian complement of V")
    if trace is not None:
        trace.plane_word = plane_word
        trace.lagrangian_complement = Bvecs
    C = isometry_to_standard(Bvecs, eps, P.variant)
    word = [Isometry("lagrangian-to-standard", tuple(tuple(row) for row in C))]
    rep = apply_word(P, word)
    if not is_elementary_rep(rep):
        raise AssertionError("representative is not elementary")
    return word, rep
