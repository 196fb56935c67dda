"""Exact dense linear algebra over the rationals.

Determinants use Bareiss fraction-free elimination on a row-scaled integer
copy of the matrix, so intermediate entries stay integral and small.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ArgumentError, DegenerateMatrix, ResourceLimit, SingularMatrix
from .exactnum import DEFAULT_SLACK, as_rational, lcm_list, sqrt_upper

DEFAULT_BASIS_CAP = 10**6


class RatMatrix:
    """Immutable row-major matrix of Fractions."""

    __slots__ = ("_rows", "rows", "cols")

    def __init__(self, rows: Iterable[Iterable], cols: int | None = None):
        data = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise ArgumentError("ragged matrix rows")
            if cols is not None and cols != width:
                raise ArgumentError(f"expected {cols} columns, got {width}")
        else:
            width = cols or 0
        self._rows = data
        self.rows = len(data)
        self.cols = width

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def empty(cls, cols: int) -> "RatMatrix":
        return cls([], cols=cols)

    @classmethod
    def hstack(cls, blocks: Sequence["RatMatrix"]) -> "RatMatrix":
        blocks = [b for b in blocks]
        nrows = blocks[0].rows
        if any(b.rows != nrows for b in blocks):
            raise ArgumentError("hstack of blocks with different row counts")
        cols = sum(b.cols for b in blocks)
        return cls([sum((b._rows[i] for b in blocks), ()) for i in range(nrows)], cols=cols)

    @classmethod
    def vstack(cls, blocks: Sequence["RatMatrix"]) -> "RatMatrix":
        cols = blocks[0].cols
        if any(b.cols != cols for b in blocks):
            raise ArgumentError("vstack of blocks with different column counts")
        return cls([r for b in blocks for r in b._rows], cols=cols)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self):
        return self.rows == self.cols

    def row(self, i) -> tuple:
        return self._rows[i]

    def col(self, j) -> tuple:
        return tuple(r[j] for r in self._rows)

    def tolist(self):
        return [list(r) for r in self._rows]

    def __iter__(self):
        return iter(self._rows)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.cols, self._rows))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RatMatrix([{body}])"

    def transpose(self) -> "RatMatrix":
        return RatMatrix([self.col(j) for j in range(self.cols)], cols=self.rows)

    T = property(transpose)

    def columns(self, idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix([[r[j] for j in idx] for r in self._rows], cols=len(idx))

    def select_rows(self, idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix([self._rows[i] for i in idx], cols=self.cols)

    def scale(self, s) -> "RatMatrix":
        s = as_rational(s)
        return RatMatrix([[s * x for x in r] for r in self._rows], cols=self.cols)

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ArgumentError("shape mismatch in matrix addition")
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], cols=self.cols)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise ArgumentError(f"cannot multiply {self.shape} by {other.shape}")
            cols = [other.col(j) for j in range(other.cols)]
            return RatMatrix(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._rows],
                cols=other.cols,
            )
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ArgumentError(f"cannot multiply {self.shape} matrix by vector of length {len(vec)}")
        return tuple(sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in self._rows)

    def is_symmetric(self) -> bool:
        return self.is_square and all(self._rows[i][j] == self._rows[j][i] for i in range(self.rows) for j in range(i))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)


def _require_square(M: RatMatrix, what: str):
    if not M.is_square:
        raise ArgumentError(f"{what} needs a square matrix, got {M.rows}x{M.cols}")


def _bareiss_det_int(rows: list[list[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    a = [r[:] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    return sign * a[n - 1][n - 1]


def det(M: RatMatrix) -> Fraction:
    _require_square(M, "det")
    scale = 1
    int_rows = []
    for r in M:
        d = lcm_list([x.denominator for x in r]) if r else 1
        scale *= d
        int_rows.append([int(x * d) for x in r])
    return Fraction(_bareiss_det_int(int_rows), scale)


def det_cofactor(M: RatMatrix) -> Fraction:
    """Laplace expansion; only meant for n <= 3 cross-checks."""
    _require_square(M, "det_cofactor")
    n = M.rows
    if n == 0:
        return Fraction(1)
    if n == 1:
        return M[0, 0]
    total = Fraction(0)
    for j in range(n):
        minor = RatMatrix([[M[i, k] for k in range(n) if k != j] for i in range(1, n)], cols=n - 1)
        total += (-1) ** j * M[0, j] * det_cofactor(minor)
    return total


def _minor(M: RatMatrix, i: int, j: int) -> RatMatrix:
    n = M.rows
    return RatMatrix([[M[r, c] for c in range(n) if c != j] for r in range(n) if r != i], cols=n - 1)


def adjugate(M: RatMatrix) -> RatMatrix:
    _require_square(M, "adjugate")
    n = M.rows
    if n == 0:
        return M
    if n == 1:
        return RatMatrix([[1]])
    d = det(M)
    if d != 0:
        return inverse(M).scale(d)
    # singular: transpose of the signed cofactor matrix
    return RatMatrix([[(-1) ** (i + j) * det(_minor(M, j, i)) for j in range(n)] for i in range(n)], cols=n)


def inverse(M: RatMatrix) -> RatMatrix:
    """Gauss-Jordan over Fractions with partial (first nonzero) pivoting."""
    _require_square(M, "inverse")
    n = M.rows
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise SingularMatrix("inverse of a singular matrix", det=Fraction(0))
        a[k], a[piv] = a[piv], a[k]
        pk = a[k][k]
        a[k] = [x / pk for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return RatMatrix([r[n:] for r in a], cols=n)


def frob_sq(M: RatMatrix) -> Fraction:
    return sum((x * x for r in M for x in r), Fraction(0))


def rank(M: RatMatrix) -> int:
    return len(rref(M)[1])


def rref(M: RatMatrix):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    a = [list(r) for r in M]
    pivots = []
    r = 0
    for c in range(M.cols):
        piv = next((i for i in range(r, M.rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(M.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == M.rows:
            break
    return a, pivots


def solve_linear(M: RatMatrix, rhs: Sequence[Fraction]):
    """A particular solution of M x = rhs (free variables set to 0), or None if inconsistent."""
    if len(rhs) != M.rows:
        raise ArgumentError("right-hand side length mismatch")
    aug = RatMatrix([list(r) + [as_rational(b)] for r, b in zip(M, rhs)], cols=M.cols + 1)
    a, pivots = rref(aug)
    if M.cols in pivots:
        return None
    x = [Fraction(0)] * M.cols
    for i, c in enumerate(pivots):
        x[c] = a[i][M.cols]
    return tuple(x)


def nullspace(M: RatMatrix) -> list[tuple]:
    a, pivots = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -a[i][f]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class Basis:
    columns: tuple
    det: Fraction
    inv_frob_sq: Fraction


@dataclass(frozen=True)
class BasisSet:
    rows: int
    bases: tuple  # tuple[Basis, ...] in lexicographic column order

    def __len__(self):
        return len(self.bases)

    def __iter__(self):
        return iter(self.bases)

    @property
    def dets(self):
        return [b.det for b in self.bases]

    @property
    def max_inv_frob_sq(self) -> Fraction:
        if not self.bases:
            raise DegenerateMatrix("no invertible basis")
        return max(b.inv_frob_sq for b in self.bases)


def enumerate_bases(M: RatMatrix, cap: int = DEFAULT_BASIS_CAP, pmap=map) -> BasisSet:
    """All invertible column-bases of M (rows(M) columns each)."""
    if M.rows > M.cols:
        raise ArgumentError(f"basis enumeration needs rows <= cols, got {M.shape}")
    count = math.comb(M.cols, M.rows)
    if count > cap:
        raise ResourceLimit(f"{count} column subsets exceed the basis cap {cap}", count=count, cap=cap)

    def check(cols):
        sub = M.columns(cols)
        d = det(sub)
        if d == 0:
            return None
        return Basis(tuple(cols), d, frob_sq(inverse(sub)))

    found = [b for b in pmap(check, itertools.combinations(range(M.cols), M.rows)) if b is not None]
    return BasisSet(M.rows, tuple(found))


def beta(M: RatMatrix, slack=DEFAULT_SLACK, cap: int = DEFAULT_BASIS_CAP, bases: BasisSet | None = None) -> Fraction:
    """Upper bound on the largest Frobenius norm of an inverse basis of M."""
    bases = bases if bases is not None else enumerate_bases(M, cap)
    if not bases.bases:
        raise DegenerateMatrix(f"matrix of shape {M.shape} has no invertible basis")
    return sqrt_upper(bases.max_inv_frob_sq, slack)
