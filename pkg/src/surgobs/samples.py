"""Seeded instance generators and bounded enumerations.

Used by the test suite and by the scripts in scripts/.  Every generator takes
a random.Random so results are reproducible from a seed.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from . import intlin
from .complete_intersection import MultiDegree
from .even_l import EvenObstruction, SurgeryDatum, even_obstruction_over_z
from .group_ring import GroupContext, Variant
from .intlin import Sublattice
from .forms import EpsQuadraticForm, make_form
from .odd_l import (Add, Flip, Lower, MuShift, OddObstruction, OddVariant, Scale, SplitInfo, Swap,
                    _e, _f, _int_matrix, _unit, is_lagrangian, odd_from_columns, pair, search_generators,
                    stabilized_with_h1, standard_split_complement, transvect, word_int_product)


# ----------------------------------------------------------- integer linear

def random_unimodular(rng: random.Random, n: int, steps: int = 8, bound: int = 2) -> list[list[int]]:
    """Product of random elementary row operations and sign changes."""
    M = intlin.identity_rows(n)
    M = [list(r) for r in M]
    for _ in range(steps):
        if n >= 2 and rng.random() < 0.8:
            i, j = rng.sample(range(n), 2)
            q = rng.randint(-bound, bound)
            M[i] = [a + q * b for a, b in zip(M[i], M[j])]
        else:
            i = rng.randrange(n)
            M[i] = [-a for a in M[i]]
    return M


def random_matrix(rng: random.Random, m: int, n: int, bound: int = 20) -> list[list[int]]:
    return [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)]


def congruent(S: Sequence[Sequence[int]], P: Sequence[Sequence[int]]) -> list[list[int]]:
    """P^T S P."""
    n = len(S)
    return intlin.matmul(intlin.matmul(intlin.transpose([list(r) for r in P], n, n), [list(r) for r in S]),
                         [list(r) for r in P])


E8 = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
]


def block_diag(*blocks: Sequence[Sequence[int]]) -> list[list[int]]:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = x
        k += len(b)
    return out


# --------------------------------------------------- complete intersections

def random_multidegree(rng: random.Random, n_max: int = 10, d_max: int = 9, r_max: int = 4,
                       n_min: int = 1) -> MultiDegree:
    n = rng.randint(n_min, n_max)
    r = rng.randint(0, r_max)
    return MultiDegree(n, tuple(rng.randint(1, d_max) for _ in range(r)))


# ----------------------------------------------------------- even triples

def form_type_triples(max_rank: int = 4, bound: int = 2) -> Iterator[EvenObstruction]:
    """(V <-id- V -id-> V, lambda) over Z for unimodular lambda with entries in
    [-bound, bound], one per class under signed permutations of the basis.

    eps = +1 needs an even diagonal (mu = lambda(v, v)/2); for eps = -1 every
    mu in (Z/2)^n is listed.
    """
    for eps in (1, -1):
        for n in range(max_rank + 1):
            for L in _unimodular_forms(n, eps, bound):
                if eps == 1:
                    yield even_obstruction_over_z(intlin.identity_rows(n), intlin.identity_rows(n), L, 1,
                                                  Variant.MU, V_rank=n)
                else:
                    for mu in itertools.product((0, 1), repeat=n):
                        yield even_obstruction_over_z(intlin.identity_rows(n), intlin.identity_rows(n), L, -1,
                                                      Variant.MU, mu=mu, V_rank=n)


def _signed_perms(n: int):
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            yield perm, signs


def _unimodular_forms(n: int, eps: int, bound: int) -> Iterator[list[list[int]]]:
    if n == 0:
        yield []
        return
    diag_vals = [x for x in range(-bound, bound + 1) if x % 2 == 0] if eps == 1 else [0]
    off = list(itertools.combinations(range(n), 2))
    group = list(_signed_perms(n))
    seen = set()
    # every orbit meets the matrices with a non-decreasing diagonal
    for d in itertools.combinations_with_replacement(diag_vals, n):
        for o in itertools.product(range(-bound, bound + 1), repeat=len(off)):
            L = [[0] * n for _ in range(n)]
            for i in range(n):
                L[i][i] = d[i]
            for (i, j), x in zip(off, o):
                L[i][j] = x
                L[j][i] = eps * x
            key = tuple(map(tuple, L))
            if key in seen or abs(intlin.det(L)) != 1:
                continue
            for perm, s in group:
                seen.add(tuple(tuple(s[a] * s[b] * L[perm[a]][perm[b]] for b in range(n)) for a in range(n)))
            yield L


def general_triples(bound: int = 2) -> Iterator[EvenObstruction]:
    """V0 = V1 = Z^2 with lambda_adj the identity or the hyperbolic matrix, V of
    rank 1 or 2 and f, g with entries in [-bound, bound], eps = +1.  Triples
    differing by a signed permutation of the V basis are listed once."""
    lams = ([[1, 0], [0, 1]], [[0, 1], [1, 0]])
    vals = range(-bound, bound + 1)
    for lam in lams:
        for n in (1, 2):
            group = list(_signed_perms(n))
            seen = set()
            for fv in itertools.product(vals, repeat=2 * n):
                F = [list(fv[0:n]), list(fv[n:2 * n])]
                for gv in itertools.product(vals, repeat=2 * n):
                    G = [list(gv[0:n]), list(gv[n:2 * n])]
                    key = (tuple(map(tuple, F)), tuple(map(tuple, G)))
                    if key in seen:
                        continue
                    L = [[sum(F[a][i] * lam[a][b] * G[b][j] for a in range(2) for b in range(2))
                          for j in range(n)] for i in range(n)]
                    if any(L[i][j] != L[j][i] for i in range(n) for j in range(n)):
                        continue
                    if any(L[i][i] % 2 for i in range(n)):
                        continue
                    for perm, s in group:
                        seen.add((tuple(tuple(s[c] * F[r][perm[c]] for c in range(n)) for r in range(2)),
                                  tuple(tuple(s[c] * G[r][perm[c]] for c in range(n)) for r in range(2))))
                    yield even_obstruction_over_z(F, G, lam, V_rank=n)


# ------------------------------------------------------------ surgery data

HYPERBOLIC_BLOCK = ([[0, 1], [1, 0]], [])
# S = diag(2, -2), coker = Z/2 + Z/2 split orthogonally; rho = (1 1) keeps c) true
TORSION_BLOCK = ([[2, 0], [0, -2]], [[1, 1]], [[1, 0]], [[0, 1]])


@dataclass
class DatumParts:
    S: list[list[int]]
    rho: list[list[int]]
    p0: list[list[int]]
    p1: list[list[int]]
    H: list[int]

    def datum(self) -> SurgeryDatum:
        return SurgeryDatum.build(self.S, self.rho, self.p0, self.p1, self.H)


def _assemble(blocks: list[tuple]) -> DatumParts:
    """Direct sum of blocks (S, rho[, p0, p1])."""
    S = block_diag(*[b[0] for b in blocks])
    n = len(S)
    rho, p0, p1, H = [], [], [], []
    k = 0
    for b in blocks:
        m = len(b[0])
        for row in b[1]:
            rho.append([0] * k + list(row) + [0] * (n - k - m))
        if len(b) > 2:
            for row in b[2]:
                p0.append([0] * k + list(row) + [0] * (n - k - m))
            for row in b[3]:
                p1.append([0] * k + list(row) + [0] * (n - k - m))
            H += [2] * len(b[2])
        k += m
    return DatumParts(S, rho, p0, p1, H)


def _conjugate(parts: DatumParts, P: list[list[int]]) -> DatumParts:
    """Change of basis v = P v' of V: S' = P^T S P, rho' = rho P, p' = p P^-T."""
    n = len(parts.S)
    PinvT = intlin.transpose(intlin.inverse_unimodular(P), n, n)
    mod = lambda rows: [[x % m for x in r] for r, m in zip(rows, parts.H)]  # noqa: E731
    return DatumParts(congruent(parts.S, P),
                      intlin.matmul(parts.rho, P) if parts.rho else [],
                      mod(intlin.matmul(parts.p0, PinvT)) if parts.p0 else [],
                      mod(intlin.matmul(parts.p1, PinvT)) if parts.p1 else [],
                      list(parts.H))


def _hyp_block(rng: random.Random) -> tuple:
    # hyperbolic plane, with rho either 0 or the coordinate of e (isotropic)
    return ([[0, 1], [1, 0]], [[1, 0]] if rng.random() < 0.4 else [])


def random_good_datum(rng: random.Random, max_rank: int = 6) -> SurgeryDatum:
    """A datum with a), b), c) all true and even diagonal on Ker rho."""
    blocks = []
    size = 0
    while True:
        b = TORSION_BLOCK if rng.random() < 0.35 else _hyp_block(rng)
        if size + 2 > max_rank:
            break
        blocks.append(b)
        size += 2
        if rng.random() < 0.35:
            break
    parts = _conjugate(_assemble(blocks), random_unimodular(rng, size, steps=rng.randint(0, 8)))
    return parts.datum()


def random_bad_datum(rng: random.Random, which: str, max_rank: int = 6) -> SurgeryDatum:
    """A datum where exactly the condition `which` in 'abc' fails."""
    bad = {"a": ([[1]], []),
           "b": ([[0, 1], [1, 0]], [[1, 1]]),
           "c": ([[2, 0], [0, -2]], [], [[1, 0]], [[0, 1]])}[which]
    blocks = [bad]
    size = len(bad[0])
    while size + 2 <= max_rank and rng.random() < 0.5:
        blocks.append(([[0, 1], [1, 0]], []))
        size += 2
    rng.shuffle(blocks)
    parts = _conjugate(_assemble(blocks), random_unimodular(rng, size, steps=rng.randint(0, 8)))
    return parts.datum()


# ------------------------------------------------------------ odd instances

def random_word(rng: random.Random, r: int, eps: int, length: int):
    gens = search_generators(r, eps)
    return [rng.choice(gens) for _ in range(length)]


def _touches(g, m: int) -> set:
    if isinstance(g, Lower):
        C = [[x.coeffs[0] for x in row] for row in g.C]
        return {a + 1 for a in range(m) for b in range(m) if C[a][b] or C[b][a]}
    return {getattr(g, a) for a in ("i", "j") if hasattr(g, a)}


@dataclass
class PlaneInstance:
    epsilon: int
    r: int
    V: Sublattice
    H: tuple[list[int], list[int]]
    h_plus: list[list[int]]


def random_plane_instance(rng: random.Random, r: int, eps: int) -> PlaneInstance:
    """V in H(Z^r) containing a hyperbolic plane, and a plane H in H(Z^{r+1})
    orthogonal to V with H + V + H_{r+1} spanning a summand."""
    n, m = 2 * r + 2, r + 1
    j = rng.randint(1, r)
    V0 = [_unit(2 * r, 0), _unit(2 * r, 1)] + [_unit(2 * r, _e(i)) for i in range(2, j + 1)]
    gens = [g for g in search_generators(m, eps) if _touches(g, m) <= {1, m}]
    T = intlin.identity_rows(n)
    for _ in range(rng.randint(1, 6)):
        if rng.random() < 0.5 and j >= 2:
            i = rng.randint(2, j)
            v = [0] * n
            v[_e(1)] = rng.randint(-2, 2)
            v[_e(m)] = rng.randint(-2, 2)
            if eps == -1:
                v[_f(m)] = rng.randint(-2, 2)
            u = _unit(n, _e(i))
            if pair(u, v, eps) or pair(v, v, eps):
                continue
            M = transvect(u, v, 0 if eps == 1 else 1)
        else:
            M = _int_matrix(rng.choice(gens), eps, m, OddVariant.RU)
        T = intlin.matmul(M, T)
    Mr = word_int_product(random_word(rng, r, eps, rng.randint(0, 6)), eps, r)
    Mext = [list(row) + [0, 0] for row in Mr] + [[0] * (2 * r) + [1, 0], [0] * (2 * r) + [0, 1]]
    full = intlin.matmul(Mext, T)
    e = [row[_e(m)] for row in full]
    f = [row[_f(m)] for row in full]
    V = [intlin.matvec(Mr, v) for v in V0]
    hp = [intlin.matvec(Mr, V0[0]), intlin.matvec(Mr, V0[1])]
    return PlaneInstance(eps, r, Sublattice.from_vectors(V, 2 * r), (e, f), hp)


@dataclass
class SplitInstance:
    P: OddObstruction
    split: SplitInfo


def random_split_instance(rng: random.Random, scramble: bool = True,
                          r: Optional[int] = None, eps: Optional[int] = None) -> SplitInstance:
    """An odd pair P = (H(Z^r), V) with a known lagrangian complement of the
    stabilized V, optionally moved by transvections inside V + H_1."""
    eps = rng.choice([1, -1]) if eps is None else eps
    r = rng.randint(2, 4) if r is None else r
    n = 2 * r
    V0 = [_unit(n, 0), _unit(n, 1)] + [_unit(n, _e(i)) for i in range(3, r + 1)]
    L0 = [[a + b for a, b in zip(_unit(n, _e(2)), _unit(n, _e(1)))],
          [a - b for a, b in zip(_unit(n, _f(2)), _unit(n, _f(1)))]] + [_unit(n, _f(i)) for i in range(3, r + 1)]
    M = word_int_product(random_word(rng, r, eps, rng.randint(1, 8)), eps, r)
    V = [intlin.matvec(M, v) for v in V0]
    L = [intlin.matvec(M, v) for v in L0]
    P = odd_from_columns(eps, V)
    Vhat = standard_split_complement(P, L)
    N = n + 4
    W = stabilized_with_h1(P)
    for _ in range(rng.randint(0, 4) if scramble else 0):
        ca = [rng.randint(-1, 1) for _ in W]
        cb = [rng.randint(-1, 1) for _ in W]
        a = [sum(c * w[i] for c, w in zip(ca, W)) for i in range(N)]
        b = [sum(c * w[i] for c, w in zip(cb, W)) for i in range(N)]
        u = a
        v = [pair(u, b, eps) * x - pair(u, a, eps) * y for x, y in zip(a, b)]
        if not any(u) or not any(v) or not is_lagrangian([u, v], eps):
            continue
        T = transvect(u, v, 0 if eps == 1 else 1)
        Vhat = [intlin.matvec(T, x) for x in Vhat]
    return SplitInstance(P, SplitInfo(complement=Vhat, h_plus=[V[0], V[1]]))


def unit_generators(ctx: GroupContext, r: int, eps: int, variant: OddVariant = OddVariant.RU) -> list:
    """Every generator whose entries are units or single group elements."""
    idx = range(1, r + 1)
    gens = [Flip(i) for i in idx]
    gens += [Swap(i, j) for i, j in itertools.combinations(idx, 2)]
    gens += [Scale(i, s, g) for i in idx for s in (1, -1) for g in range(ctx.order)]
    gens += [Add(i, j) for i, j in itertools.permutations(idx, 2)]
    for g in range(ctx.order):
        x = ctx.element(g)
        for i in range(r):
            C = [[ctx.zero()] * r for _ in range(r)]
            C[i][i] = x - eps * x.bar()
            gens.append(Lower(tuple(map(tuple, C))))
        for i, j in itertools.combinations(range(r), 2):
            C = [[ctx.zero()] * r for _ in range(r)]
            C[i][j] = x
            C[j][i] = -eps * x.bar()
            gens.append(Lower(tuple(map(tuple, C))))
    if OddVariant(variant) is OddVariant.RU_TILDE:
        gens += [MuShift(i) for i in idx]
    return gens


# --------------------------------------------------------------- forms

def random_ring_element(rng: random.Random, ctx: GroupContext, bound: int = 3):
    return ctx.from_coeffs([rng.randint(-bound, bound) for _ in range(ctx.order)])


def random_ring_vector(rng: random.Random, ctx: GroupContext, n: int, bound: int = 2) -> list:
    return [random_ring_element(rng, ctx, bound) for _ in range(n)]


def random_form(rng: random.Random, ctx: GroupContext, eps: int, variant: Variant, n: int) -> EpsQuadraticForm:
    """lambda from random upper entries and diagonal lifts, mu = their classes."""
    Q = ctx.quotient(eps, variant)
    lam = [[ctx.zero()] * n for _ in range(n)]
    mu = []
    for i in range(n):
        m = random_ring_element(rng, ctx)
        lam[i][i] = m + eps * m.bar()
        mu.append(Q.canonicalize(m))
        for j in range(i + 1, n):
            a = random_ring_element(rng, ctx)
            lam[i][j] = a
            lam[j][i] = eps * a.bar()
    return make_form(ctx, eps, variant, lam, mu)


def random_group_context(rng: random.Random) -> GroupContext:
    from .group_ring import all_characters, cyclic_group, quaternion_group, symmetric_group_3
    G = rng.choice([cyclic_group(1), cyclic_group(2), cyclic_group(3), symmetric_group_3(), quaternion_group()])
    w = rng.choice(all_characters(G))
    return GroupContext.of(G, list(w.values))
