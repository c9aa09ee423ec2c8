"""Dynkin diagram automorphisms and their induced linear maps."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .exact import RatMat, RatVec, mat_invert, nullspace
from .root_datum import RootDatum

STANDARD_NAMES = ("identity", "flip", "swap", "triality", "e6", "cycle")


def _perm_order(perm: Sequence[int]) -> int:
    n = len(perm)
    cur = list(range(n))
    k = 0
    while True:
        cur = [perm[i] for i in cur]
        k += 1
        if cur == list(range(n)):
            return k


@dataclass(frozen=True, eq=False)
class DiagramAutomorphism:
    datum: RootDatum
    perm: tuple[int, ...]
    name: str = "custom"

    def __post_init__(self):
        if sorted(self.perm) != list(range(self.datum.rank)):
            raise ValueError("perm must be a permutation of the simple-root indices")

    @cached_property
    def order(self) -> int:
        return _perm_order(self.perm)

    @cached_property
    def induced(self) -> RatMat:
        """Ambient map with alpha_i -> alpha_perm(i), identity off the root span.

        Obtained by solving T [alpha | N] = [alpha_perm | N] with N a basis of
        the orthogonal complement of the roots.
        """
        d = self.datum
        comp = nullspace(RatMat([a.entries for a in d.simple_roots], ncols=d.ambient_dim))
        src = RatMat.from_columns(list(d.simple_roots) + comp)
        dst = RatMat.from_columns([d.simple_roots[self.perm[i]] for i in range(d.rank)] + comp)
        return dst @ mat_invert(src)

    @cached_property
    def inverse_induced(self) -> RatMat:
        return self.induced ** (self.order - 1)

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """Permutation matrix in weight coordinates: varpi_i -> varpi_perm(i)."""
        r = self.datum.rank
        m = np.zeros((r, r), dtype=np.int64)
        for i, p in enumerate(self.perm):
            m[p, i] = 1
        return m

    @cached_property
    def inverse_weight_matrix(self) -> np.ndarray:
        return np.ascontiguousarray(self.weight_matrix.T)

    def to_json(self) -> dict:
        return {"name": self.name, "perm": [p + 1 for p in self.perm], "order": self.order}

    def apply(self, v: RatVec) -> RatVec:
        return self.induced @ v


def make_automorphism(datum: RootDatum, perm: Sequence[int], name: str = "custom") -> DiagramAutomorphism:
    return DiagramAutomorphism(datum, tuple(int(p) for p in perm), name)


def _cycle_perm(datum: RootDatum, d: int | None) -> tuple[int, ...]:
    t = datum.cartan_type
    if not t.is_product:
        raise ValueError("cycle automorphism needs a product datum")
    factors = t.factors
    if d is not None and d != len(factors):
        raise ValueError(f"cycle:{d} does not match the {len(factors)} factors of {t}")
    if len(set(factors)) != 1:
        raise ValueError("cycle automorphism needs identical factors")
    h = factors[0].rank
    n = len(factors)
    return tuple(((k + 1) % n) * h + i for k in range(n) for i in range(h))


def standard_automorphism(datum: RootDatum, name: str) -> DiagramAutomorphism:
    """``identity``, ``flip`` (A), ``swap`` (D), ``triality`` (D4), ``e6``, ``cycle`` / ``cycle:d``."""
    t = datum.cartan_type
    r = datum.rank
    custom = datum.name == "custom"
    fam = None if (t.is_product or custom) else t.family
    base = name.split(":")[0]
    if base == "identity":
        perm = tuple(range(r))
    elif base == "flip" and fam == "A":
        perm = tuple(r - 1 - i for i in range(r))
    elif base == "swap" and fam == "D":
        perm = tuple(range(r - 2)) + (r - 1, r - 2)
    elif base == "triality" and fam == "D" and r == 4:
        perm = (2, 1, 3, 0)  # alpha1 -> alpha3 -> alpha4 -> alpha1
    elif base == "e6" and fam == "E" and r == 6:
        perm = (5, 1, 4, 3, 2, 0)  # (1 6)(3 5)
    elif base == "cycle" and not custom:
        d = int(name.split(":")[1]) if ":" in name else None
        perm = _cycle_perm(datum, d)
    else:
        raise ValueError(f"automorphism {name!r} is not defined for {datum.name or t}")
    auto = DiagramAutomorphism(datum, perm, name)
    if not validate(auto):
        raise AssertionError(f"standard automorphism {name} failed validation")
    return auto


def validate(auto: DiagramAutomorphism) -> bool:
    """Cartan preservation plus consistency of the induced map."""
    d = auto.datum
    c = d.cartan_matrix
    p = auto.perm
    r = d.rank
    if any(c[p[i], p[j]] != c[i, j] for i in range(r) for j in range(r)):
        return False
    m = auto.induced
    if any(m @ d.simple_roots[i] != d.simple_roots[p[i]] for i in range(r)):
        return False
    if any(m @ d.fundamental_weights[i] != d.fundamental_weights[p[i]] for i in range(r)):
        return False
    # isometry: m^T m = I for the standard form
    return (m.T @ m).is_identity()


def orbit_average(auto: DiagramAutomorphism, v: RatVec) -> RatVec:
    acc = v
    cur = v
    for _ in range(auto.order - 1):
        cur = auto.induced @ cur
        acc = acc + cur
    return acc / auto.order


def fixed_subspace_basis(auto: DiagramAutomorphism) -> list[RatVec]:
    """Basis of the fixed vectors of the induced map inside the root span."""
    d = auto.datum
    wb = d.weight_basis
    k = nullspace((auto.induced - RatMat.identity(d.ambient_dim)) @ wb)
    return [wb @ y for y in k]


def perm_orbits(perm: Sequence[int]) -> list[tuple[int, ...]]:
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen:
            continue
        orb = []
        j = i
        while j not in seen:
            seen.add(j)
            orb.append(j)
            j = perm[j]
        out.append(tuple(orb))
    return out


def averaged_root(auto: DiagramAutomorphism, i: int) -> RatVec:
    """Orbit average of the simple root alpha_i."""
    return orbit_average(auto, auto.datum.simple_roots[i])

