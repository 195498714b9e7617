"""Exact integer linear algebra.

Smith normal form, exact signatures, direct-summand tests and integral
solving.  Everything works on Python ints (and ``Fraction`` where a field is
needed), so no entry ever overflows.

Matrices are passed around as :class:`IntMatrix`; the algorithms themselves
work on plain lists of lists and convert at the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence


class NotSymmetric(ValueError):
    pass


class Degenerate(ValueError):
    pass


class NotASummand(ValueError):
    pass


Rows = list[list[int]]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows(identity_rows(n), cols=n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(m, n, (0,) * (m * n))

    def tolist(self) -> Rows:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def column(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_rows(transpose(self.tolist(), self.rows, self.cols), cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return IntMatrix.from_rows(matmul(self.tolist(), other.tolist()), cols=other.cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    def det(self) -> int:
        if not self.is_square():
            raise ValueError("det of a non-square matrix")
        return det(self.tolist())


@dataclass(frozen=True)
class SnfDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]


@dataclass(frozen=True)
class Sublattice:
    ambient_rank: int
    basis: IntMatrix

    def __post_init__(self):
        if self.basis.rows != self.ambient_rank:
            raise ValueError("basis rows must equal ambient rank")
        if rank(self.basis.tolist()) != self.basis.cols:
            raise ValueError("basis columns are linearly dependent")

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[int]], ambient_rank: int) -> "Sublattice":
        return cls(ambient_rank, IntMatrix.from_columns(vectors, ambient_rank))

    @property
    def rank(self) -> int:
        return self.basis.cols

    def vectors(self) -> list[list[int]]:
        return self.basis.columns()


# ---------------------------------------------------------------- list helpers

def identity_rows(n: int) -> Rows:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Rows, m: Optional[int] = None, n: Optional[int] = None) -> Rows:
    m = len(A) if m is None else m
    n = (len(A[0]) if A else 0) if n is None else n
    return [[A[i][j] for i in range(m)] for j in range(n)]


def matmul(A: Rows, B: Rows) -> Rows:
    if not A:
        return []
    if not B:
        return [[] for _ in A]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Rows, x: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def det(A: Rows) -> int:
    """Bareiss fraction-free determinant."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A: Rows) -> int:
    if not A or not A[0]:
        return 0
    M = [[Fraction(x) for x in r] for r in A]
    m, n = len(M), len(M[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        for i in range(r + 1, m):
            if M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == m:
            break
    return r


def inverse_rows(A: Rows) -> list[list[Fraction]]:
    """Rational inverse by Gauss-Jordan; raises Degenerate if singular."""
    n = len(A)
    M = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            raise Degenerate("matrix is singular")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [r[n:] for r in M]


def inverse_unimodular(A: Rows) -> Rows:
    inv = inverse_rows(A)
    out = []
    for r in inv:
        row = []
        for x in r:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(x))
        out.append(row)
    return out


# ------------------------------------------------------------------------ SNF

def _snf_rows(A: Rows, m: int, n: int) -> tuple[Rows, Rows, Rows]:
    D = [list(r) for r in A]
    U = identity_rows(m)
    V = identity_rows(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in D:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    k = 0
    while k < min(m, n):
        # smallest nonzero |entry| in the trailing block, row-major tiebreak
        best = None
        for i in range(k, m):
            for j in range(k, n):
                x = D[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(k, i)
        swap_cols(k, j)
        while True:
            p = D[k][k]
            done = True
            for i in range(k + 1, m):
                if D[i][k]:
                    add_row(i, k, -(D[i][k] // p))
                    if D[i][k]:
                        done = False
            for j in range(k + 1, n):
                if D[k][j]:
                    add_col(j, k, -(D[k][j] // p))
                    if D[k][j]:
                        done = False
            if done:
                break
            # a remainder survived: move the smallest one in row/col k to the pivot
            cand = [(abs(D[i][k]), 0, i) for i in range(k + 1, m) if D[i][k]]
            cand += [(abs(D[k][j]), 1, j) for j in range(k + 1, n) if D[k][j]]
            _, kind, idx = min(cand)
            if kind == 0:
                swap_rows(k, idx)
            else:
                swap_cols(k, idx)
        if D[k][k] < 0:
            D[k] = [-x for x in D[k]]
            U[k] = [-x for x in U[k]]
        k += 1

    # enforce the divisibility chain with 2x2 gcd moves on the diagonal
    r = k
    for i in range(r):
        for j in range(i + 1, r):
            a, b = D[i][i], D[j][j]
            if b % a == 0:
                continue
            g, x, y = _xgcd(a, b)
            # rows: [x y; -b/g a/g], cols: [1 -y b/g; 1 x a/g]
            ri, rj = U[i], U[j]
            U[i] = [x * p + y * q for p, q in zip(ri, rj)]
            U[j] = [(-b // g) * p + (a // g) * q for p, q in zip(ri, rj)]
            for row in V:
                ci, cj = row[i], row[j]
                row[i] = ci + cj
                row[j] = ci * (-y * b // g) + cj * (x * a // g)
            D[i][i] = g
            D[j][j] = a // g * b
    return U, D, V


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def snf(A: IntMatrix) -> SnfDecomposition:
    U, D, V = _snf_rows(A.tolist(), A.rows, A.cols)
    return SnfDecomposition(
        IntMatrix.from_rows(U, cols=A.rows),
        IntMatrix.from_rows(D, cols=A.cols),
        IntMatrix.from_rows(V, cols=A.cols),
    )


def snf_diagonal(A: Rows, m: int, n: int) -> list[int]:
    _, D, _ = _snf_rows(A, m, n)
    return [D[i][i] for i in range(min(m, n))]


# ------------------------------------------------------------------ signature

def signature(S: IntMatrix) -> int:
    """Signature of a nondegenerate symmetric integer matrix, exactly."""
    if not S.is_symmetric():
        raise NotSymmetric("matrix is not symmetric")
    return signature_rows(S.tolist())


def signature_rows(A: Sequence[Sequence[int]]) -> int:
    M = [[Fraction(x) for x in r] for r in A]
    sig = 0
    while M:
        n = len(M)
        p = next((i for i in range(n) if M[i][i] != 0), None)
        if p is None:
            off = next(((i, j) for i in range(n) for j in range(i + 1, n) if M[i][j] != 0), None)
            if off is None:
                raise Degenerate("matrix is singular")
            # zero diagonal: the congruence e_i -> e_i + e_j yields a nonzero pivot 2*M[i][j]
            i, j = off
            M[i] = [a + b for a, b in zip(M[i], M[j])]
            for r in M:
                r[i] += r[j]
            p = i
        piv = M[p][p]
        sig += 1 if piv > 0 else -1
        keep = [i for i in range(n) if i != p]
        M = [[M[i][j] - M[i][p] * M[p][j] / piv for j in keep] for i in keep]
    return sig


# ------------------------------------------------------------------ summands

def is_primitive_summand(L: Sublattice) -> bool:
    if L.rank == 0:
        return True
    return all(d == 1 for d in snf_diagonal(L.basis.tolist(), L.ambient_rank, L.rank))


def summand_complement(L: Sublattice) -> Sublattice:
    n, k = L.ambient_rank, L.rank
    if not is_primitive_summand(L):
        raise NotASummand("sublattice is not a direct summand")
    if k == 0:
        return Sublattice(n, IntMatrix.identity(n))
    U, _, _ = _snf_rows(L.basis.tolist(), n, k)
    # columns of U^{-1}: the first k span L, the rest complete it to a basis
    Uinv = inverse_unimodular(U)
    cols = [[Uinv[i][j] for i in range(n)] for j in range(k, n)]
    return Sublattice(n, IntMatrix.from_columns(cols, n))


def solve_integral(A: IntMatrix, b: Sequence[int]) -> Optional[list[int]]:
    """An integer x with A x = b, or None if there is none."""
    m, n = A.rows, A.cols
    if len(b) != m:
        raise ValueError("right-hand side has the wrong length")
    U, D, V = _snf_rows(A.tolist(), m, n)
    c = matvec(U, b)
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    return matvec(V, y)


def kernel_basis(A: Rows, m: int, n: int) -> list[list[int]]:
    """Basis of the integer kernel {x : A x = 0}; it is always a primitive summand."""
    _, D, V = _snf_rows(A, m, n)
    r = sum(1 for i in range(min(m, n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(r, n)]


def saturation(vectors: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Basis of (Q-span of vectors) intersected with Z^n."""
    if not vectors:
        return []
    # kernel of the kernel: the annihilator of the annihilator
    ann = kernel_basis([list(v) for v in vectors], len(vectors), n)
    if not ann:
        return [list(r) for r in identity_rows(n)]
    return kernel_basis(ann, len(ann), n)


def hnf_columns(vectors: Iterable[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    """Canonical basis of the Z-span of the given vectors (column Hermite form).

    Works row by row from the top: each pivot is positive and the entries to
    its left in the same row are reduced into [0, pivot).
    """
    cols = [list(v) for v in vectors if any(v)]
    out: list[list[int]] = []
    for i in range(n):
        nz = [c for c in cols if c[i] != 0]
        if not nz:
            continue
        rest = [c for c in cols if c[i] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda c: abs(c[i]))
            piv = nz[0]
            new = [piv]
            for c in nz[1:]:
                q = c[i] // piv[i]
                c = [a - q * b for a, b in zip(c, piv)]
                if c[i] != 0:
                    new.append(c)
                elif any(c):
                    rest.append(c)
            nz = new
        piv = nz[0]
        if piv[i] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        cols = rest
    for k, piv in enumerate(out):
        i = next(t for t in range(n) if piv[t])
        for j in range(k):
            q = out[j][i] // piv[i]
            if q:
                out[j] = [a - q * b for a, b in zip(out[j], piv)]
    return tuple(tuple(c) for c in out)
