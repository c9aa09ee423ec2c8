"""Exact rational vectors and matrices.

Scalars are :class:`fractions.Fraction`.  :class:`RatVec` and :class:`RatMat`
are immutable and hashable, so they can be shared freely between workers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

Rat = Fraction


class SingularMatrixError(ValueError):
    pass


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    return Fraction(x)


def rat_str(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` when integral)."""
    x = as_rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class RatVec:
    __slots__ = ("_e", "_hash")

    def __init__(self, entries: Iterable = ()):
        self._e = tuple(as_rat(x) for x in entries)
        self._hash = None

    @classmethod
    def zeros(cls, n: int) -> "RatVec":
        return cls([0] * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "RatVec":
        return cls([1 if j == i else 0 for j in range(n)])

    @property
    def dim(self) -> int:
        return len(self._e)

    @property
    def entries(self) -> tuple:
        return self._e

    def __len__(self):
        return len(self._e)

    def __iter__(self):
        return iter(self._e)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return RatVec(self._e[i])
        return self._e[i]

    def __eq__(self, other):
        if isinstance(other, RatVec):
            return self._e == other._e
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._e)
        return self._hash

    def __repr__(self):
        return "RatVec([" + ", ".join(rat_str(x) for x in self._e) + "])"

    def _check(self, other: "RatVec"):
        if len(other) != len(self):
            raise ValueError(f"dimension mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other: "RatVec") -> "RatVec":
        self._check(other)
        return RatVec(a + b for a, b in zip(self._e, other._e))

    def __sub__(self, other: "RatVec") -> "RatVec":
        self._check(other)
        return RatVec(a - b for a, b in zip(self._e, other._e))

    def __neg__(self) -> "RatVec":
        return RatVec(-a for a in self._e)

    def __mul__(self, c) -> "RatVec":
        c = as_rat(c)
        return RatVec(c * a for a in self._e)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "RatVec":
        c = as_rat(c)
        return RatVec(a / c for a in self._e)

    def dot(self, other: "RatVec") -> Fraction:
        return dot(self, other)

    def is_zero(self) -> bool:
        return not any(self._e)

    def concat(self, other: "RatVec") -> "RatVec":
        return RatVec(self._e + other._e)

    def to_strings(self) -> list[str]:
        return [rat_str(x) for x in self._e]


def dot(a: RatVec, b: RatVec) -> Fraction:
    """Euclidean pairing of two vectors of equal dimension."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum((x * y for x, y in zip(a.entries, b.entries)), Fraction(0))


class RatMat:
    __slots__ = ("_rows", "_ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self._rows = tuple(tuple(as_rat(x) for x in r) for r in rows)
        if self._rows:
            widths = {len(r) for r in self._rows}
            if len(widths) != 1:
                raise ValueError("rows of unequal length")
            self._ncols = widths.pop()
        else:
            self._ncols = ncols or 0
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "RatMat":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int) -> "RatMat":
        return cls([[0] * n for _ in range(m)], ncols=n)

    @classmethod
    def from_columns(cls, cols: Sequence[RatVec], nrows: int | None = None) -> "RatMat":
        if not cols:
            return cls([[] for _ in range(nrows or 0)])
        return cls(zip(*(c.entries for c in cols)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._ncols

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    def row(self, i: int) -> RatVec:
        return RatVec(self._rows[i])

    def rows(self) -> list[RatVec]:
        return [RatVec(r) for r in self._rows]

    def col(self, j: int) -> RatVec:
        return RatVec(r[j] for r in self._rows)

    def cols(self) -> list[RatVec]:
        return [self.col(j) for j in range(self._ncols)]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        if isinstance(other, RatMat):
            return self.shape == other.shape and self._rows == other._rows
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._rows, self._ncols))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(rat_str(x) for x in r) for r in self._rows)
        return f"RatMat([{body}])"

    @property
    def T(self) -> "RatMat":
        return RatMat(zip(*self._rows), ncols=len(self._rows)) if self._rows else RatMat([])

    def __add__(self, other: "RatMat") -> "RatMat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMat([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __sub__(self, other: "RatMat") -> "RatMat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMat([[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __neg__(self) -> "RatMat":
        return RatMat([[-a for a in r] for r in self._rows], ncols=self._ncols)

    def scale(self, c) -> "RatMat":
        c = as_rat(c)
        return RatMat([[c * a for a in r] for r in self._rows], ncols=self._ncols)

    def __matmul__(self, other):
        if isinstance(other, RatVec):
            if len(other) != self._ncols:
                raise ValueError(f"dimension mismatch: {self.shape} @ {len(other)}")
            v = other.entries
            return RatVec(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self._rows)
        if isinstance(other, RatMat):
            if other.nrows != self._ncols:
                raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
            cols = list(zip(*other._rows))
            return RatMat(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._rows],
                ncols=other.ncols,
            )
        return NotImplemented

    def __pow__(self, k: int) -> "RatMat":
        if self.nrows != self._ncols:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return mat_invert(self) ** (-k)
        out = RatMat.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def is_identity(self) -> bool:
        return self == RatMat.identity(self.nrows) if self.nrows == self._ncols else False

    def hstack(self, other: "RatMat") -> "RatMat":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return RatMat([r + s for r, s in zip(self._rows, other._rows)])

    def vstack(self, other: "RatMat") -> "RatMat":
        if self.nrows == 0:
            return other
        if other.nrows == 0:
            return self
        if self._ncols != other.ncols:
            raise ValueError("column count mismatch")
        return RatMat(self._rows + other._rows)

    def select_rows(self, idx: Iterable[int]) -> "RatMat":
        return RatMat([self._rows[i] for i in idx], ncols=self._ncols)

    def rank(self) -> int:
        return len(rref(self)[1])

    def det(self) -> Fraction:
        return mat_det(self)

    def inverse(self) -> "RatMat":
        return mat_invert(self)

    def nullspace(self) -> list[RatVec]:
        return nullspace(self)


def block_diag(blocks: Sequence[RatMat]) -> RatMat:
    n = sum(b.ncols for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for r in b.tolist():
            rows.append([0] * off + r + [0] * (n - off - b.ncols))
        off += b.ncols
    return RatMat(rows, ncols=n)


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = lcm(d, as_rat(v).denominator)
    return d


def to_integer_matrix(m: RatMat) -> tuple[list[list[int]], int]:
    """Return ``(N, d)`` with integer ``N`` and ``m == N / d``."""
    d = common_denominator(x for r in m.tolist() for x in r)
    return [[int(x * d) for x in r] for r in m.tolist()], d


def to_int_array(m: RatMat) -> tuple[np.ndarray, int]:
    n, d = to_integer_matrix(m)
    return np.array(n, dtype=np.int64).reshape(m.shape), d


def primitive_integer(v: Sequence[Fraction]) -> list[int]:
    """Smallest positive rational multiple of ``v`` with coprime integer entries."""
    d = common_denominator(v)
    ints = [int(as_rat(x) * d) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def _bareiss_jordan(a: list[list[int]], n: int) -> int:
    """Fraction-free Gauss-Jordan on the first ``n`` columns of ``a`` in place.

    On return the left ``n x n`` block is ``d * I`` and ``d`` (= +-det) is returned.
    Raises :class:`SingularMatrixError` when no pivot exists.
    """
    width = len(a[0])
    prev = 1
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        if p != k:
            a[k], a[p] = a[p], a[k]
        rk = a[k]
        piv = rk[k]
        for i in range(n):
            if i == k:
                continue
            ri = a[i]
            f = ri[k]
            for j in range(width):
                num = piv * ri[j] - f * rk[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("inexact Bareiss division")
                ri[j] = q
        prev = piv
    # Rows i < n-1 carry the pivot of their own step; rescale to the last pivot.
    d = prev
    for i in range(n):
        di = a[i][i]
        if di != d:
            for j in range(width):
                q, rem = divmod(a[i][j] * d, di)
                if rem:
                    raise ArithmeticError("inexact Bareiss rescale")
                a[i][j] = q
    return d


def mat_invert(m: RatMat) -> RatMat:
    """Exact inverse via fraction-free Gauss-Jordan elimination."""
    n, c = m.shape
    if n != c:
        raise ValueError("matrix is not square")
    if n == 0:
        return RatMat([])
    ints, scale = to_integer_matrix(m)
    a = [row + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(ints)]
    d = _bareiss_jordan(a, n)
    # (m * scale)^{-1} = right / d  =>  m^{-1} = right * scale / d
    return RatMat([[Fraction(x * scale, d) for x in row[n:]] for row in a])


def solve_linear(m: RatMat, b: RatVec) -> RatVec:
    """Solve ``m x = b`` exactly for square nonsingular ``m``."""
    n, c = m.shape
    if n != c:
        raise ValueError("matrix is not square")
    if len(b) != n:
        raise ValueError("dimension mismatch")
    ints, scale = to_integer_matrix(m)
    bd = common_denominator(b)
    a = [row + [int(b[i] * bd)] for i, row in enumerate(ints)]
    d = _bareiss_jordan(a, n)
    # m x = b  <=>  (scale m) x = scale b ; rhs column holds d * (scale m)^{-1} (bd b)
    return RatVec(Fraction(row[n] * scale, d * bd) for row in a)


def mat_det(m: RatMat) -> Fraction:
    n, c = m.shape
    if n != c:
        raise ValueError("matrix is not square")
    if n == 0:
        return Fraction(1)
    ints, scale = to_integer_matrix(m)
    a = [list(r) for r in ints]
    sign = 1
    prev = 1
    for k in range(n - 1):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], scale**n)


def rref(m: RatMat) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    a = m.tolist()
    nr, nc = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        p = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(m: RatMat) -> list[RatVec]:
    """Exact basis of ``{x : m x = 0}``."""
    a, pivots = rref(m)
    nc = m.ncols
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for row, pc in zip(a, pivots):
            v[pc] = -row[f]
        basis.append(RatVec(v))
    return basis
