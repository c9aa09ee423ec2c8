"""Exact realizations of finite root systems.

Conventions: simple roots are indexed from 0, ``cartan_matrix[i][j]`` is
``<alpha_j, alpha_i^vee>`` and coroots are ``2 alpha / <alpha, alpha>`` for the
standard Euclidean form of the ambient space.  A vector ``lam`` has *weight
coordinates* ``x_i = <lam, alpha_i^vee>``, i.e. ``lam = sum x_i varpi_i`` on
the span of the roots.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial
from pathlib import Path
from typing import Sequence

import numpy as np

from .exact import RatMat, RatVec, block_diag, dot, mat_invert, to_int_array

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")

_H = Fraction(1, 2)


@dataclass(frozen=True)
class CartanType:
    family: str
    rank: int
    factors: tuple["CartanType", ...] = ()

    def __post_init__(self):
        f, n = self.family, self.rank
        if f == "Product":
            if len(self.factors) < 2:
                raise ValueError("a product type needs at least two factors")
            if n != sum(t.rank for t in self.factors):
                raise ValueError("product rank must be the sum of factor ranks")
            return
        if f not in FAMILIES:
            raise ValueError(f"unknown Cartan family {f!r}")
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "C": n >= 2,
            "D": n >= 3,
            "E": n in (6, 7, 8),
            "F": n == 4,
            "G": n == 2,
        }[f]
        if not ok:
            raise ValueError(f"invalid rank {n} for family {f}")

    @classmethod
    def parse(cls, s: str) -> "CartanType":
        """Parse ``"A3"``, ``"E6"`` or a product such as ``"A2xA2"``."""
        parts = [p for p in re.split(r"[x*×]", s.strip()) if p]
        if not parts:
            raise ValueError(f"cannot parse Cartan type {s!r}")
        types = []
        for p in parts:
            m = re.fullmatch(r"([A-Ga-g])_?(\d+)", p.strip())
            if not m:
                raise ValueError(f"cannot parse Cartan type {p!r}")
            types.append(cls(m.group(1).upper(), int(m.group(2))))
        if len(types) == 1:
            return types[0]
        return cls.product(types)

    @classmethod
    def product(cls, factors: Sequence["CartanType"]) -> "CartanType":
        flat: list[CartanType] = []
        for t in factors:
            flat.extend(t.factors if t.family == "Product" else (t,))
        return cls("Product", sum(t.rank for t in flat), tuple(flat))

    @property
    def is_product(self) -> bool:
        return self.family == "Product"

    def simple_factors(self) -> tuple["CartanType", ...]:
        return self.factors if self.is_product else (self,)

    def weyl_order(self) -> int:
        if self.is_product:
            out = 1
            for t in self.factors:
                out *= t.weyl_order()
            return out
        n = self.rank
        return {
            "A": lambda: factorial(n + 1),
            "B": lambda: 2**n * factorial(n),
            "C": lambda: 2**n * factorial(n),
            "D": lambda: 2 ** (n - 1) * factorial(n),
            "E": lambda: {6: 51840, 7: 2903040, 8: 696729600}[n],
            "F": lambda: 1152,
            "G": lambda: 12,
        }[self.family]()

    def positive_root_count(self) -> int:
        if self.is_product:
            return sum(t.positive_root_count() for t in self.factors)
        n = self.rank
        return {
            "A": n * (n + 1) // 2,
            "B": n * n,
            "C": n * n,
            "D": n * (n - 1),
            "E": {6: 36, 7: 63, 8: 120}.get(n, 0),
            "F": 24,
            "G": 6,
        }[self.family]

    def __str__(self):
        if self.is_product:
            return "x".join(str(t) for t in self.factors)
        return f"{self.family}{self.rank}"


def _e(n: int, *terms) -> RatVec:
    """Vector in n-space from (index, coefficient) pairs, 1-based indices."""
    v = [Fraction(0)] * n
    for i, c in terms:
        v[i - 1] += Fraction(c)
    return RatVec(v)


def _standard_simple_roots(t: CartanType) -> tuple[int, list[RatVec]]:
    f, n = t.family, t.rank
    if f == "A":
        d = n + 1
        return d, [_e(d, (i, 1), (i + 1, -1)) for i in range(1, n + 1)]
    if f in ("B", "C", "D"):
        roots = [_e(n, (i, 1), (i + 1, -1)) for i in range(1, n)]
        if f == "B":
            roots.append(_e(n, (n, 1)))
        elif f == "C":
            roots.append(_e(n, (n, 2)))
        else:
            roots.append(_e(n, (n - 1, 1), (n, 1)))
        return n, roots
    if f == "E":
        a1 = RatVec([_H, -_H, -_H, -_H, -_H, -_H, -_H, _H])
        roots = [a1, _e(8, (1, 1), (2, 1)), _e(8, (1, -1), (2, 1))]
        roots += [_e(8, (i, -1), (i + 1, 1)) for i in range(2, 7)]
        return 8, roots[:n]
    if f == "F":
        return 4, [_e(4, (2, 1), (3, -1)), _e(4, (3, 1), (4, -1)), _e(4, (4, 1)), RatVec([_H, -_H, -_H, -_H])]
    if f == "G":
        return 3, [_e(3, (1, 1), (2, -1)), _e(3, (1, -2), (2, 1), (3, 1))]
    raise ValueError(f"no standard realization for {t}")


def cartan_from_roots(simple_roots: Sequence[RatVec]) -> RatMat:
    cor = [a * Fraction(2) / dot(a, a) for a in simple_roots]
    return RatMat([[dot(aj, ci) for aj in simple_roots] for ci in cor])


def _closure_root_coords(cartan: np.ndarray, limit: int) -> list[tuple[int, ...]]:
    """All roots (root coordinates) reachable from the simple roots by simple reflections."""
    r = cartan.shape[0]
    simple = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for c in frontier:
            for i in range(r):
                # s_i(beta) = beta - <beta, alpha_i^vee> alpha_i
                p = sum(int(cartan[i, j]) * c[j] for j in range(r))
                if p == 0:
                    continue
                img = list(c)
                img[i] -= p
                img = tuple(img)
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
                    if len(seen) > limit:
                        raise RuntimeError("root closure exceeded its size guard; input is not of finite type")
        frontier = nxt
    return sorted(seen, key=lambda c: (sum(c), tuple(-x for x in c)))


def positive_roots_closure(simple_roots: Sequence[RatVec], limit: int | None = None) -> list[RatVec]:
    """Positive roots generated from a base by closure under simple reflections.

    Returned in order of increasing height.  ``limit`` caps the number of roots
    explored (defaults to ``2 * (10 r^2 + 10)``).
    """
    r = len(simple_roots)
    if r == 0:
        return []
    cartan, _ = to_int_array(cartan_from_roots(simple_roots))
    limit = limit or 2 * (10 * r * r + 10)
    coords = _closure_root_coords(cartan, limit)
    dim = len(simple_roots[0])
    out = []
    for c in coords:
        if all(x >= 0 for x in c):
            v = RatVec.zeros(dim)
            for k, x in enumerate(c):
                if x:
                    v = v + simple_roots[k] * x
            out.append(v)
        elif not all(x <= 0 for x in c):
            raise RuntimeError("mixed-sign root found; input is not a base of a root system")
    return out


@dataclass(frozen=True, eq=False)
class RootDatum:
    cartan_type: CartanType
    ambient_dim: int
    simple_roots: tuple[RatVec, ...]
    simple_coroots: tuple[RatVec, ...]
    fundamental_weights: tuple[RatVec, ...]
    fundamental_coweights: tuple[RatVec, ...]
    positive_roots: tuple[RatVec, ...]
    cartan_matrix: RatMat
    positive_root_coords: tuple[tuple[int, ...], ...] = field(repr=False)
    name: str = ""

    @property
    def rank(self) -> int:
        return len(self.simple_roots)

    def __repr__(self):
        return f"RootDatum({self.name or self.cartan_type}, rank={self.rank}, ambient_dim={self.ambient_dim})"

    @cached_property
    def inverse_cartan(self) -> RatMat:
        return mat_invert(self.cartan_matrix)

    @cached_property
    def cartan_int(self) -> np.ndarray:
        return to_int_array(self.cartan_matrix)[0]

    @cached_property
    def inverse_cartan_scaled(self) -> tuple[np.ndarray, int]:
        """``(N, d)`` with ``inverse_cartan == N / d`` and integer ``N``."""
        return to_int_array(self.inverse_cartan)

    @cached_property
    def reflection_matrices(self) -> np.ndarray:
        """Simple reflections in weight coordinates, shape (r, r, r)."""
        r = self.rank
        a = self.cartan_int
        out = np.zeros((r, r, r), dtype=np.int64)
        for i in range(r):
            m = np.eye(r, dtype=np.int64)
            # s_i(varpi_i) = varpi_i - alpha_i and alpha_i = sum_k A[k][i] varpi_k
            m[:, i] -= a[:, i]
            out[i] = m
        return out

    @cached_property
    def positive_root_weights(self) -> np.ndarray:
        """Positive roots in weight coordinates, shape (r, N)."""
        c = np.array(self.positive_root_coords, dtype=np.int64).reshape(-1, self.rank)
        return self.cartan_int @ c.T

    @cached_property
    def weight_basis(self) -> RatMat:
        """Ambient matrix whose columns are the fundamental weights."""
        return RatMat.from_columns(self.fundamental_weights)

    @cached_property
    def coroot_rows(self) -> RatMat:
        return RatMat([c.entries for c in self.simple_coroots], ncols=self.ambient_dim)

    @cached_property
    def span_projector(self) -> RatMat:
        """Orthogonal projector of the ambient space onto the span of the roots."""
        return self.weight_basis @ self.coroot_rows

    @cached_property
    def complement_projector(self) -> RatMat:
        return RatMat.identity(self.ambient_dim) - self.span_projector

    def weight_coords(self, v: RatVec) -> RatVec:
        return RatVec(dot(v, c) for c in self.simple_coroots)

    def from_weight_coords(self, x: Sequence) -> RatVec:
        return self.weight_basis @ RatVec(x)

    def root_coords(self, v: RatVec) -> RatVec:
        """Coefficients of ``v`` (in the root span) in the basis of simple roots."""
        return RatVec(dot(v, w) for w in self.fundamental_coweights)

    def ambient_from_weight_matrix(self, m) -> RatMat:
        """Ambient map acting by ``m`` on weight coordinates and trivially off the root span."""
        mm = RatMat(np.asarray(m).tolist()) if not isinstance(m, RatMat) else m
        return self.weight_basis @ mm @ self.coroot_rows + self.complement_projector

    def is_positive_chamber(self, v: RatVec) -> bool:
        return all(x > 0 for x in self.weight_coords(v))


def _datum_from_simple_roots(t: CartanType, dim: int, simple: Sequence[RatVec], name: str = "") -> RootDatum:
    simple = tuple(simple)
    coroots = tuple(a * Fraction(2) / dot(a, a) for a in simple)
    cartan = RatMat([[dot(aj, ci) for aj in simple] for ci in coroots])
    inv = mat_invert(cartan)
    r = len(simple)
    weights = []
    for j in range(r):
        v = RatVec.zeros(dim)
        for k in range(r):
            if inv[k, j]:
                v = v + simple[k] * inv[k, j]
        weights.append(v)
    coweights = []
    for i in range(r):
        v = RatVec.zeros(dim)
        for k in range(r):
            if inv[i, k]:
                v = v + coroots[k] * inv[i, k]
        coweights.append(v)
    cint, _ = to_int_array(cartan)
    coords = _closure_root_coords(cint, 2 * (10 * r * r + 10))
    pos_coords = tuple(c for c in coords if all(x >= 0 for x in c))
    pos = []
    for c in pos_coords:
        v = RatVec.zeros(dim)
        for k, x in enumerate(c):
            if x:
                v = v + simple[k] * x
        pos.append(v)
    return RootDatum(
        cartan_type=t,
        ambient_dim=dim,
        simple_roots=simple,
        simple_coroots=coroots,
        fundamental_weights=tuple(weights),
        fundamental_coweights=tuple(coweights),
        positive_roots=tuple(pos),
        cartan_matrix=cartan,
        positive_root_coords=pos_coords,
        name=name or str(t),
    )


_CACHE: dict[str, RootDatum] = {}


def build(t: CartanType | str) -> RootDatum:
    """Standard realization of a Cartan type (cached)."""
    if isinstance(t, str):
        t = CartanType.parse(t)
    key = str(t)
    if key in _CACHE:
        return _CACHE[key]
    if t.is_product:
        d = product([build(f) for f in t.factors])
    else:
        dim, simple = _standard_simple_roots(t)
        d = _datum_from_simple_roots(t, dim, simple)
    _CACHE[key] = d
    return d


def product(factors: Sequence[RootDatum]) -> RootDatum:
    """Block-diagonal product of root data."""
    if len(factors) < 2:
        raise ValueError("product needs at least two factors")
    t = CartanType.product([f.cartan_type for f in factors])
    dim = sum(f.ambient_dim for f in factors)

    def lift(vs, off):
        return [RatVec([0] * off + list(v) + [0] * (dim - off - len(v))) for v in vs]

    fields = {k: [] for k in ("simple_roots", "simple_coroots", "fundamental_weights", "fundamental_coweights", "positive_roots")}
    coords = []
    off = 0
    roff = 0
    for f in factors:
        for k in fields:
            fields[k].extend(lift(getattr(f, k), off))
        for c in f.positive_root_coords:
            coords.append((0,) * roff + c + (0,) * (t.rank - roff - f.rank))
        off += f.ambient_dim
        roff += f.rank
    return RootDatum(
        cartan_type=t,
        ambient_dim=dim,
        simple_roots=tuple(fields["simple_roots"]),
        simple_coroots=tuple(fields["simple_coroots"]),
        fundamental_weights=tuple(fields["fundamental_weights"]),
        fundamental_coweights=tuple(fields["fundamental_coweights"]),
        positive_roots=tuple(fields["positive_roots"]),
        cartan_matrix=block_diag([f.cartan_matrix for f in factors]),
        positive_root_coords=tuple(coords),
        name=str(t),
    )


def _cartan_graph(a: Sequence[Sequence[int]], nodes=None):
    import networkx as nx

    g = nx.DiGraph()
    idx = range(len(a)) if nodes is None else nodes
    g.add_nodes_from(idx)
    for i in idx:
        for j in idx:
            if i != j and a[i][j] != 0:
                g.add_edge(i, j, w=int(a[i][j]))
    return g


def _candidate_types(k: int) -> list[CartanType]:
    out = [CartanType("A", k)]
    if k >= 2:
        out += [CartanType("B", k), CartanType("C", k)]
    if k >= 3:
        out.append(CartanType("D", k))
    if k in (6, 7, 8):
        out.append(CartanType("E", k))
    if k == 4:
        out.append(CartanType("F", 4))
    if k == 2:
        out.append(CartanType("G", 2))
    return out


def from_cartan_matrix(cartan: Sequence[Sequence[int]]) -> RootDatum:
    """Synthesize a realization for an integer Cartan matrix.

    Each connected component of the Dynkin diagram is matched (up to
    relabeling) against the classification; the datum is the standard
    realization with simple roots reordered to the given labels.
    """
    import networkx as nx
    from networkx.algorithms.isomorphism import DiGraphMatcher

    a = [[int(x) for x in row] for row in cartan]
    r = len(a)
    if r == 0 or any(len(row) != r for row in a):
        raise ValueError("Cartan matrix must be square and nonempty")
    if any(a[i][i] != 2 for i in range(r)):
        raise ValueError("Cartan matrix must have 2 on the diagonal")
    for i in range(r):
        for j in range(r):
            if i != j and (a[i][j] > 0 or (a[i][j] == 0) != (a[j][i] == 0)):
                raise ValueError("not a generalized Cartan matrix")
    g = _cartan_graph(a)
    comps = sorted((sorted(c) for c in nx.weakly_connected_components(g)), key=lambda c: c[0])
    factor_data: list[RootDatum] = []
    placement: list[int] = [0] * r  # custom index -> index in concatenated standard order
    base = 0
    for comp in comps:
        sub = g.subgraph(comp)
        match = None
        for t in _candidate_types(len(comp)):
            std = build(t)
            sa = to_int_array(std.cartan_matrix)[0].tolist()
            gm = DiGraphMatcher(sub, _cartan_graph(sa), edge_match=lambda e1, e2: e1["w"] == e2["w"])
            if gm.is_isomorphic():
                match = (std, gm.mapping)
                break
        if match is None:
            raise ValueError(f"component {comp} is not a finite-type Cartan matrix")
        std, mapping = match
        for i in comp:
            placement[i] = base + mapping[i]
        factor_data.append(std)
        base += std.rank
    whole = factor_data[0] if len(factor_data) == 1 else product(factor_data)
    if placement == list(range(r)):
        return whole
    pick = lambda vs: tuple(vs[placement[i]] for i in range(r))  # noqa: E731
    simple = pick(whole.simple_roots)
    d = _datum_from_simple_roots(whole.cartan_type, whole.ambient_dim, simple, name="custom")
    if to_int_array(d.cartan_matrix)[0].tolist() != a:
        raise AssertionError("relabeled realization does not reproduce the input Cartan matrix")
    return d


def load_cartan_json(path: str | Path) -> RootDatum:
    """Read ``{"cartan": [[...], ...]}`` and synthesize a datum."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict) or "cartan" not in data:
        raise ValueError('expected a JSON object with key "cartan"')
    return from_cartan_matrix(data["cartan"])


def resolve_datum(spec: str) -> RootDatum:
    """Build from a type string, or from a Cartan JSON file when ``spec`` is a path."""
    p = Path(spec)
    if spec.endswith(".json") or p.is_file():
        return load_cartan_json(p)
    return build(spec)
