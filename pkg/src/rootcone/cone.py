"""Strict feasibility of ``A x + o > 0`` over the rationals.

:func:`solve_strict` decides homogeneous systems exactly with an
integer-pivoting simplex (Bland's rule) on the max-margin program

    maximize t  subject to  a_i . x >= t,  -1 <= x_j <= 1,  0 <= t <= 1

and returns either an interior witness or Gordan multipliers ``y >= 0``,
``y != 0`` with ``sum y_i a_i = 0``.  :func:`grid_search` is the bounded
exhaustive search over {1..max_coord}^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _accel
from .exact import RatMat, RatVec, common_denominator, primitive_integer

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class StrictConeProblem:
    """Rows ``a_i`` (and optional constants ``o_i``) asking for ``a_i . x + o_i > 0``.

    With ``chamber=True`` the rows ``x_j > 0`` are appended after ``rows``.
    """

    rows: RatMat
    chamber: bool = False
    offsets: Optional[RatVec] = None

    def __post_init__(self):
        if self.offsets is not None and len(self.offsets) != self.rows.nrows:
            raise ValueError("one offset per row required")

    @property
    def var_dim(self) -> int:
        return self.rows.ncols

    @property
    def is_homogeneous(self) -> bool:
        return self.offsets is None or self.offsets.is_zero()

    def all_rows(self) -> RatMat:
        if not self.chamber:
            return self.rows
        return self.rows.vstack(RatMat.identity(self.var_dim))

    def all_offsets(self) -> RatVec:
        n = self.rows.nrows + (self.var_dim if self.chamber else 0)
        base = list(self.offsets) if self.offsets is not None else [0] * self.rows.nrows
        return RatVec(base + [0] * (n - self.rows.nrows))


@dataclass(frozen=True)
class FeasibilityResult:
    status: str
    witness: Optional[RatVec] = None
    margins: Optional[RatVec] = None
    certificate: Optional[tuple[int, ...]] = None
    optimum: Fraction = Fraction(0)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def verify_witness(p: StrictConeProblem, x: RatVec) -> RatVec:
    """Exact value of every row (chamber rows included) at ``x``."""
    if len(x) != p.var_dim:
        raise ValueError(f"dimension mismatch: {len(x)} vs {p.var_dim}")
    return p.all_rows() @ x + p.all_offsets()


class _Tableau:
    """Dense integer tableau for ``max c.v  s.t.  A v <= b, v >= 0`` with ``b >= 0``.

    Entries are kept as integers over a common positive denominator ``d``
    (the last pivot), in the manner of fraction-free elimination.
    """

    def __init__(self, a: list[list[int]], b: list[int], c: list[int]):
        m, n = len(a), len(c)
        self.m, self.n = m, n
        # columns: n structural, m slack, rhs
        self.t = [row + [1 if k == i else 0 for k in range(m)] + [bi] for i, (row, bi) in enumerate(zip(a, b))]
        self.obj = [-x for x in c] + [0] * m + [0]
        self.basis = [n + i for i in range(m)]
        self.d = 1

    def _pivot(self, r: int, s: int):
        t, d = self.t, self.d
        pr = t[r]
        p = pr[s]
        for i, row in enumerate(t):
            if i == r:
                continue
            f = row[s]
            if f == 0:
                # row' = row * p / d
                t[i] = [x * p // d for x in row]
                continue
            t[i] = [(x * p - f * y) // d for x, y in zip(row, pr)]
        f = self.obj[s]
        self.obj = [(x * p - f * y) // d for x, y in zip(self.obj, pr)]
        self.d = p
        self.basis[r] = s

    def solve(self, max_iter: int = 100_000):
        width = self.n + self.m
        for _ in range(max_iter):
            s = next((j for j in range(width) if self.obj[j] < 0), None)
            if s is None:
                return
            best = None
            for i, row in enumerate(self.t):
                a = row[s]
                if a <= 0:
                    continue
                key = (Fraction(row[-1], a), self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                raise RuntimeError("LP unbounded")
            self._pivot(best[1], s)
        raise RuntimeError("simplex iteration limit reached")

    def primal(self) -> list[Fraction]:
        v = [Fraction(0)] * (self.n + self.m)
        for i, b in enumerate(self.basis):
            v[b] = Fraction(self.t[i][-1], self.d)
        return v[: self.n]

    def dual(self) -> list[Fraction]:
        return [Fraction(self.obj[self.n + i], self.d) for i in range(self.m)]

    def value(self) -> Fraction:
        return Fraction(self.obj[-1], self.d)


def _integer_rows(rows: RatMat) -> tuple[list[list[int]], list[int]]:
    out, scales = [], []
    for r in rows.tolist():
        k = common_denominator(r)
        out.append([int(x * k) for x in r])
        scales.append(k)
    return out, scales


def solve_strict(p: StrictConeProblem) -> FeasibilityResult:
    """Exact decision of the homogeneous strict system ``A x > 0``."""
    if not p.is_homogeneous:
        raise ValueError("solve_strict handles homogeneous systems; use gamma scaling for shifted rows")
    rows = p.all_rows()
    n = p.var_dim
    m = rows.nrows
    ia, scales = _integer_rows(rows)
    # variables: p_0..p_{n-1}, q_0..q_{n-1}, s   (x = p - q, t = s)
    a, b = [], []
    for r in ia:
        a.append([-x for x in r] + list(r) + [1])
        b.append(0)
    for j in range(n):
        a.append([1 if k == j else 0 for k in range(2 * n + 1)])
        b.append(1)
    for j in range(n):
        a.append([1 if k == n + j else 0 for k in range(2 * n + 1)])
        b.append(1)
    a.append([0] * (2 * n) + [1])
    b.append(1)
    c = [0] * (2 * n) + [1]
    tab = _Tableau(a, b, c)
    tab.solve()
    opt = tab.value()
    if opt > 0:
        v = tab.primal()
        x = RatVec(v[j] - v[n + j] for j in range(n))
        margins = rows @ x
        if not all(mg > 0 for mg in margins):
            raise AssertionError("simplex produced a non-strict witness")
        return FeasibilityResult(FEASIBLE, witness=x, margins=margins, optimum=opt)
    y = tab.dual()[:m]
    # multipliers for the original (unscaled) rows
    mult = [yi * k for yi, k in zip(y, scales)]
    cert = tuple(primitive_integer(mult))
    if not (any(cert) and all(v >= 0 for v in cert)):
        raise AssertionError("dual multipliers are not a Gordan certificate")
    combo = [sum(Fraction(cert[i]) * rows[i, j] for i in range(m)) for j in range(n)]
    if any(combo):
        raise AssertionError("Gordan combination is not the zero functional")
    return FeasibilityResult(INFEASIBLE, certificate=cert, optimum=opt)


def check_certificate(p: StrictConeProblem, cert: Sequence[int]) -> bool:
    rows = p.all_rows()
    if len(cert) != rows.nrows or any(c < 0 for c in cert) or not any(cert):
        return False
    return all(sum(Fraction(cert[i]) * rows[i, j] for i in range(rows.nrows)) == 0 for j in range(p.var_dim))


def integer_system(p: StrictConeProblem) -> tuple[np.ndarray, np.ndarray]:
    """Rows and offsets scaled row-wise to integers (same strict solution set)."""
    rows = p.all_rows()
    offs = p.all_offsets()
    r_out, o_out = [], []
    for i in range(rows.nrows):
        vals = list(rows.row(i)) + [offs[i]]
        k = common_denominator(vals)
        r_out.append([int(x * k) for x in vals[:-1]])
        o_out.append(int(vals[-1] * k))
    return (
        np.array(r_out, dtype=np.int64).reshape(rows.nrows, p.var_dim),
        np.array(o_out, dtype=np.int64),
    )


def grid_search(p: StrictConeProblem, max_coord: int = 3, backend: str | None = None) -> Optional[RatVec]:
    """First point of {1..max_coord}^n (lexicographic) satisfying every row strictly."""
    if max_coord < 1:
        raise ValueError("max_coord must be >= 1")
    rows, offs = integer_system(p)
    g = _accel.grid_first_batch(rows[None], offs[None], np.array([rows.shape[0]]), max_coord, backend=backend)[0]
    if g < 0:
        return None
    return RatVec(_accel.decode_grid_index(int(g), max_coord, p.var_dim))

