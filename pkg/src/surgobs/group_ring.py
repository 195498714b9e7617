"""Integral group rings Z[pi] of finite groups, with the w-twisted involution.

A group is an explicit multiplication table on 0..n-1.  Ring elements are
dense coefficient tuples indexed by group elements.  The quotient targets for
quadratic refinements are Z^n / im(1 - eps*T) (optionally also modulo Z*1),
where T is the signed permutation matrix of the involution; canonical
representatives come from the Smith form of that presentation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .intlin import _snf_rows, inverse_unimodular, matvec


class GroupMismatch(ValueError):
    pass


class InvalidGroup(ValueError):
    pass


class Variant(str, Enum):
    MU = "mu"
    MU_TILDE = "mu_tilde"


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    order: int
    mul_table: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        n = self.order
        T = self.mul_table
        if n < 1 or len(T) != n or any(len(r) != n for r in T):
            raise InvalidGroup("multiplication table has the wrong shape")
        if any(not 0 <= x < n for r in T for x in r):
            raise InvalidGroup("table entry out of range")
        e = self.identity
        if any(T[e][g] != g or T[g][e] != g for g in range(n)):
            raise InvalidGroup("identity is not a two-sided unit")
        if len(self.inverse) != n:
            raise InvalidGroup("inverse table has the wrong length")
        for g in range(n):
            h = self.inverse[g]
            if T[g][h] != e or T[h][g] != e:
                raise InvalidGroup(f"inverse of {g} is wrong")
        for a, b, c in itertools.product(range(n), repeat=3):
            if T[T[a][b]][c] != T[a][T[b][c]]:
                raise InvalidGroup("table is not associative")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, FiniteGroup) and self.order == other.order
                and self.identity == other.identity and self.mul_table == other.mul_table)

    def __hash__(self):
        return hash((self.order, self.identity, self.mul_table))

    def mul(self, g: int, h: int) -> int:
        return self.mul_table[g][h]

    def is_trivial(self) -> bool:
        return self.order == 1

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        n = len(table)
        table = tuple(tuple(int(x) for x in r) for r in table)
        e = next((g for g in range(n) if all(table[g][h] == h for h in range(n))), None)
        if e is None:
            raise InvalidGroup("no identity element")
        inv = []
        for g in range(n):
            h = next((h for h in range(n) if table[g][h] == e), None)
            if h is None:
                raise InvalidGroup(f"{g} has no inverse")
            inv.append(h)
        return cls(n, table, e, tuple(inv), name)

    @classmethod
    def from_elements(cls, elements: Sequence, op, name: str = "") -> "FiniteGroup":
        index = {x: i for i, x in enumerate(elements)}
        table = [[index[op(a, b)] for b in elements] for a in elements]
        return cls.from_table(table, name)


def trivial_group() -> FiniteGroup:
    return FiniteGroup(1, ((0,),), 0, (0,), "1")


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup.from_table([[(a + b) % n for b in range(n)] for a in range(n)], f"Z/{n}")


def symmetric_group_3() -> FiniteGroup:
    perms = sorted(itertools.permutations(range(3)))
    return FiniteGroup.from_elements(perms, lambda p, q: tuple(p[q[i]] for i in range(3)), "S3")


def quaternion_group() -> FiniteGroup:
    # elements (s, u) meaning s*u with s = +-1, u in {1, i, j, k}
    basis_mul = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elems = [(s, u) for s in (1, -1) for u in "1ijk"]

    def op(a, b):
        s, u = basis_mul[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    return FiniteGroup.from_elements(elems, op, "Q8")


@dataclass(frozen=True, eq=False)
class OrientationCharacter:
    group: FiniteGroup
    values: tuple[int, ...]

    def __post_init__(self):
        G = self.group
        if len(self.values) != G.order or any(v not in (1, -1) for v in self.values):
            raise InvalidGroup("character values must be +-1, one per element")
        if self.values[G.identity] != 1:
            raise InvalidGroup("w(identity) must be +1")
        for g in range(G.order):
            for h in range(G.order):
                if self.values[G.mul(g, h)] != self.values[g] * self.values[h]:
                    raise InvalidGroup("character is not multiplicative")

    def __eq__(self, other):
        return isinstance(other, OrientationCharacter) and self.group == other.group and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __call__(self, g: int) -> int:
        return self.values[g]

    @classmethod
    def trivial(cls, group: FiniteGroup) -> "OrientationCharacter":
        return cls(group, (1,) * group.order)


def all_characters(G: FiniteGroup) -> list[OrientationCharacter]:
    """Every homomorphism G -> {+1, -1} (brute force over sign vectors)."""
    out = []
    for signs in itertools.product((1, -1), repeat=G.order):
        if signs[G.identity] != 1:
            continue
        try:
            out.append(OrientationCharacter(G, signs))
        except InvalidGroup:
            pass
    return out


@dataclass(frozen=True, eq=False)
class GroupContext:
    """A group together with its orientation character: the data (pi, w)."""

    group: FiniteGroup
    w: OrientationCharacter
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.w.group != self.group:
            raise GroupMismatch("character lives on a different group")

    def __eq__(self, other):
        return isinstance(other, GroupContext) and (self is other or (self.group == other.group and self.w == other.w))

    def __hash__(self):
        return hash((self.group, self.w))

    @classmethod
    def integers(cls) -> "GroupContext":
        G = trivial_group()
        return cls(G, OrientationCharacter.trivial(G))

    @classmethod
    def of(cls, group: FiniteGroup, w: Sequence[int] | None = None) -> "GroupContext":
        if w is None:
            return cls(group, OrientationCharacter.trivial(group))
        return cls(group, OrientationCharacter(group, tuple(w)))

    @property
    def order(self) -> int:
        return self.group.order

    def is_trivial(self) -> bool:
        return self.group.is_trivial()

    def zero(self) -> "RingElement":
        return RingElement(self, (0,) * self.order)

    def one(self) -> "RingElement":
        return self.element(self.group.identity)

    def element(self, g: int, coeff: int = 1) -> "RingElement":
        c = [0] * self.order
        c[g] = coeff
        return RingElement(self, tuple(c))

    def scalar(self, n: int) -> "RingElement":
        return self.element(self.group.identity, n)

    def from_coeffs(self, coeffs: Sequence[int]) -> "RingElement":
        if len(coeffs) != self.order:
            raise ValueError("coefficient vector has the wrong length")
        return RingElement(self, tuple(int(x) for x in coeffs))

    def quotient(self, epsilon: int, variant: Variant) -> "QuotientStructure":
        key = (epsilon, Variant(variant))
        q = self._cache.get(key)
        if q is None:
            q = QuotientStructure(self, epsilon, Variant(variant))
            self._cache[key] = q
        return q

    def to_json(self) -> dict:
        G = self.group
        return {"order": G.order, "mul_table": [list(r) for r in G.mul_table],
                "inverse": list(G.inverse), "w": list(self.w.values)}

    @classmethod
    def from_json(cls, d: dict) -> "GroupContext":
        table = tuple(tuple(int(x) for x in r) for r in d["mul_table"])
        n = int(d["order"])
        if len(table) != n:
            raise InvalidGroup("order does not match table")
        e = next((g for g in range(n) if all(table[g][h] == h for h in range(n))), None)
        if e is None:
            raise InvalidGroup("no identity element")
        if "inverse" in d:
            inv = tuple(int(x) for x in d["inverse"])
        else:
            inv = tuple(next((h for h in range(n) if table[g][h] == e), -1) for g in range(n))
        G = FiniteGroup(n, table, e, inv)
        w = d.get("w")
        return cls.of(G, None if w is None else [int(x) for x in w])


@dataclass(frozen=True)
class RingElement:
    ctx: GroupContext
    coeffs: tuple[int, ...]

    def _check(self, other: "RingElement"):
        if self.ctx is not other.ctx and self.ctx.group != other.ctx.group:
            raise GroupMismatch("elements of different group rings")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "RingElement":
        return RingElement(self.ctx, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> "RingElement":
        if isinstance(other, int):
            return RingElement(self.ctx, tuple(other * a for a in self.coeffs))
        return multiply(self, other)

    __rmul__ = __mul__  # only reached for int * element

    def __eq__(self, other):
        return isinstance(other, RingElement) and self.coeffs == other.coeffs and self.ctx.group == other.ctx.group

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def bar(self) -> "RingElement":
        return involute(self, self.ctx.w)

    def support(self) -> list[tuple[int, int]]:
        return [(g, c) for g, c in enumerate(self.coeffs) if c]

    def __repr__(self):
        if self.ctx.is_trivial():
            return f"RingElement({self.coeffs[0]})"
        return f"RingElement({list(self.coeffs)})"


def multiply(x: RingElement, y: RingElement) -> RingElement:
    x._check(y)
    T = x.ctx.group.mul_table
    out = [0] * len(x.coeffs)
    ys = y.support()
    for g, a in enumerate(x.coeffs):
        if a:
            row = T[g]
            for h, b in ys:
                out[row[h]] += a * b
    return RingElement(x.ctx, tuple(out))


def involute(x: RingElement, w: OrientationCharacter | None = None) -> RingElement:
    """sum n_g g  ->  sum n_g w(g) g^{-1}."""
    if w is None:
        w = x.ctx.w
    G = x.ctx.group
    if w.group != G:
        raise GroupMismatch("character lives on a different group")
    out = [0] * G.order
    for g, a in enumerate(x.coeffs):
        if a:
            out[G.inverse[g]] += w.values[g] * a
    return RingElement(x.ctx, tuple(out))


def augmentation(x: RingElement) -> int:
    return sum(x.coeffs)


# --------------------------------------------------------------- quotients

@dataclass(frozen=True)
class QuotientElement:
    epsilon: int
    variant: Variant
    canonical: tuple[int, ...]
    structure: "QuotientStructure" = field(repr=False, compare=False, hash=False)

    def __add__(self, other: "QuotientElement") -> "QuotientElement":
        return self.structure.add(self, other)

    def __neg__(self) -> "QuotientElement":
        return self.structure.scale(self, -1)

    def __sub__(self, other: "QuotientElement") -> "QuotientElement":
        return self.structure.add(self, -other)

    def is_zero(self) -> bool:
        return not any(self.canonical)

    def lift(self) -> RingElement:
        return self.structure.lift(self)


class QuotientStructure:
    """Z^n / (im(1 - eps*T) [+ Z*1]) with canonical coordinates.

    With S the Smith form U M V = D of the generator matrix M, x maps to U x;
    coordinates with d_i = 1 are dropped, those with d_i > 1 are reduced mod
    d_i and those with d_i = 0 (the free part) are kept as integers.
    """

    def __init__(self, ctx: GroupContext, epsilon: int, variant: Variant):
        if epsilon not in (1, -1):
            raise ValueError("epsilon must be +-1")
        self.ctx = ctx
        self.epsilon = epsilon
        self.variant = Variant(variant)
        G = ctx.group
        n = G.order
        gens = []
        for g in range(n):
            col = [0] * n
            col[g] += 1
            col[G.inverse[g]] -= epsilon * ctx.w.values[g]
            gens.append(col)
        if self.variant is Variant.MU_TILDE:
            col = [0] * n
            col[G.identity] = 1
            gens.append(col)
        M = [[c[i] for c in gens] for i in range(n)]
        U, D, _ = _snf_rows(M, n, len(gens))
        diag = [D[i][i] if i < len(gens) else 0 for i in range(n)]
        self._U = U
        self._Uinv = inverse_unimodular(U)
        self._keep = [i for i in range(n) if diag[i] != 1]
        self.moduli = tuple(diag[i] for i in self._keep)  # 0 means a free Z summand

    def __repr__(self):
        return f"QuotientStructure(eps={self.epsilon}, {self.variant.value}, moduli={self.moduli})"

    def _reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        return tuple(c % d if d else c for c, d in zip(coords, self.moduli))

    def canonicalize(self, x: RingElement) -> QuotientElement:
        y = matvec(self._U, x.coeffs)
        c = self._reduce([y[i] for i in self._keep])
        return QuotientElement(self.epsilon, self.variant, c, self)

    def element(self, canonical: Sequence[int]) -> QuotientElement:
        if len(canonical) != len(self.moduli):
            raise ValueError("wrong number of quotient coordinates")
        return QuotientElement(self.epsilon, self.variant, self._reduce(canonical), self)

    def zero(self) -> QuotientElement:
        return QuotientElement(self.epsilon, self.variant, (0,) * len(self.moduli), self)

    def lift(self, q: QuotientElement) -> RingElement:
        y = [0] * self.ctx.order
        for i, c in zip(self._keep, q.canonical):
            y[i] = c
        return RingElement(self.ctx, tuple(matvec(self._Uinv, y)))

    def add(self, a: QuotientElement, b: QuotientElement) -> QuotientElement:
        return self.element([x + y for x, y in zip(a.canonical, b.canonical)])

    def scale(self, a: QuotientElement, k: int) -> QuotientElement:
        return self.element([k * x for x in a.canonical])

    def symmetrize(self, m: RingElement) -> RingElement:
        """m + eps * bar(m): the value lambda(v, v) forced by mu(v) = m."""
        return m + self.epsilon * m.bar()

    def symmetrization_ambiguity(self) -> int:
        """lambda(v, v) is determined by mu(v) only up to this multiple of 1 (0: exactly)."""
        if self.variant is Variant.MU_TILDE and self.epsilon == 1:
            return 2
        return 0

    def compatible(self, lam_vv: RingElement, q: QuotientElement) -> bool:
        """Is there a lift m of q with m + eps*bar(m) = lam_vv ?"""
        diff = lam_vv - self.symmetrize(self.lift(q))
        k = self.symmetrization_ambiguity()
        e = self.ctx.group.identity
        if k == 0:
            return diff.is_zero()
        return all(c == 0 for g, c in enumerate(diff.coeffs) if g != e) and diff.coeffs[e] % k == 0


def quotient_canonicalize(x: RingElement, epsilon: int, variant: Variant,
                          w: OrientationCharacter | None = None) -> QuotientElement:
    ctx = x.ctx
    if w is not None and w != ctx.w:
        ctx = GroupContext(ctx.group, w)
        x = RingElement(ctx, x.coeffs)
    return ctx.quotient(epsilon, variant).canonicalize(x)


def ring_elements(ctx: GroupContext, coeff_bound: int) -> Iterable[RingElement]:
    """All elements with coefficients in [-coeff_bound, coeff_bound]."""
    rng = range(-coeff_bound, coeff_bound + 1)
    for c in itertools.product(rng, repeat=ctx.order):
        yield RingElement(ctx, c)
