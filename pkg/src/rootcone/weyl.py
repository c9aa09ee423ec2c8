"""Weyl group elements, enumeration and the support set of an element.

Elements are identified by their exact integer matrix in weight coordinates
(the action on ``x`` with ``lam = sum x_i varpi_i``).  W acts trivially on the
orthogonal complement of the root span, so this is the same information as
the ambient action matrix, which is available as :attr:`WeylElement.action`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _accel
from .exact import RatMat, RatVec
from .root_datum import RootDatum

# Enumeration beyond this order needs allow_large=True (E7 and E8).
DEFAULT_MAX_ORDER = 100_000


@dataclass(frozen=True, eq=False)
class WeylElement:
    datum: RootDatum
    matrix: np.ndarray
    word: tuple[int, ...]
    length: int

    @property
    def key(self) -> bytes:
        return self.matrix.tobytes()

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.datum is other.datum and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        w = "".join(f"s{i + 1}" for i in self.word) or "1"
        return f"WeylElement({w})"

    @property
    def is_identity(self) -> bool:
        return not self.word

    @cached_property
    def action(self) -> RatMat:
        """Exact linear map on the ambient space."""
        return self.datum.ambient_from_weight_matrix(self.matrix)

    @cached_property
    def inverse_matrix(self) -> np.ndarray:
        m = np.eye(self.datum.rank, dtype=np.int64)
        s = self.datum.reflection_matrices
        for i in self.word:
            m = s[i] @ m
        return m


def word_matrix(datum: RootDatum, word: Sequence[int]) -> np.ndarray:
    """Weight-coordinate matrix of ``s_{w[0]} s_{w[1]} ...``."""
    r = datum.rank
    m = np.eye(r, dtype=np.int64)
    s = datum.reflection_matrices
    for i in word:
        if not 0 <= i < r:
            raise IndexError(f"simple reflection index {i} out of range for rank {r}")
        m = m @ s[i]
    return m


def simple_reflection(datum: RootDatum, i: int) -> WeylElement:
    if not 0 <= i < datum.rank:
        raise IndexError(f"simple reflection index {i} out of range for rank {datum.rank}")
    return WeylElement(datum, datum.reflection_matrices[i].copy(), (i,), 1)


def identity(datum: RootDatum) -> WeylElement:
    return WeylElement(datum, np.eye(datum.rank, dtype=np.int64), (), 0)


def act(w: WeylElement, v: RatVec) -> RatVec:
    if len(v) != w.datum.ambient_dim:
        raise ValueError(f"dimension mismatch: {len(v)} vs ambient {w.datum.ambient_dim}")
    return w.action @ v


class WeylGroup:
    """The full group, enumerated breadth-first over right multiplication.

    ``elements`` is in shortlex order of the canonical words (shortest, then
    lexicographically smallest), which is also the order certificates use.
    """

    def __init__(self, datum: RootDatum, allow_large: bool = False, max_order: int = DEFAULT_MAX_ORDER):
        expected = datum.cartan_type.weyl_order() if datum.name != "custom" else None
        if expected is not None and expected > max_order and not allow_large:
            raise ValueError(f"|W({datum.cartan_type})| = {expected} exceeds {max_order}; pass allow_large=True")
        self.datum = datum
        r = datum.rank
        gens = datum.reflection_matrices
        eye = np.eye(r, dtype=np.int64)
        mats = [eye]
        invs = [eye]
        words: list[tuple[int, ...]] = [()]
        lengths = [0]
        index = {eye.tobytes(): 0}
        level = [0]
        depth = 0
        while level:
            depth += 1
            parents = np.stack([mats[k] for k in level])
            pinv = np.stack([invs[k] for k in level])
            children = np.einsum("kab,gbc->kgac", parents, gens)
            cinv = np.einsum("gab,kbc->kgac", gens, pinv)
            nxt = []
            for a, p in enumerate(level):
                for i in range(r):
                    c = children[a, i]
                    key = c.tobytes()
                    if key in index:
                        continue
                    index[key] = len(mats)
                    nxt.append(len(mats))
                    mats.append(np.ascontiguousarray(c))
                    invs.append(np.ascontiguousarray(cinv[a, i]))
                    words.append(words[p] + (i,))
                    lengths.append(depth)
            level = nxt
            if len(mats) > max(max_order, expected or 0) and not allow_large:
                raise ValueError(f"enumeration exceeded {max_order} elements; pass allow_large=True")
        self.matrices = np.stack(mats)
        self.inverse_matrices = np.stack(invs)
        self.words = words
        self.lengths = np.array(lengths, dtype=np.int64)
        self.index = index
        self.elements = [WeylElement(datum, self.matrices[k], words[k], lengths[k]) for k in range(len(mats))]
        for k, e in enumerate(self.elements):
            e.__dict__["inverse_matrix"] = self.inverse_matrices[k]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k) -> WeylElement:
        return self.elements[k]

    def lookup(self, matrix: np.ndarray) -> WeylElement:
        return self.elements[self.index[np.ascontiguousarray(matrix, dtype=np.int64).tobytes()]]

    def from_word(self, word: Sequence[int]) -> WeylElement:
        return self.lookup(word_matrix(self.datum, word))

    def multiply(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return self.lookup(a.matrix @ b.matrix)

    def inverse(self, a: WeylElement) -> WeylElement:
        return self.lookup(a.inverse_matrix)

    def longest(self) -> WeylElement:
        return self.elements[int(np.argmax(self.lengths))]

    @cached_property
    def support_masks(self) -> np.ndarray:
        """(K, r) bool: column i of M_w differs from e_i, i.e. w moves varpi_i."""
        r = self.datum.rank
        eye = np.eye(r, dtype=np.int64)
        return np.any(self.matrices != eye[None], axis=1)

    def inversion_data(self, backend: str | None = None):
        """``(counts, masks)``: positive roots each element sends to negative roots."""
        d = self.datum
        inv, _ = d.inverse_cartan_scaled
        height = inv.sum(axis=0)  # weight coords -> positive multiple of height
        return _accel.negative_root_masks(self.matrices, height, d.positive_root_weights, backend=backend)


_GROUPS: dict[int, WeylGroup] = {}


def weyl_group(datum: RootDatum, allow_large: bool = False) -> WeylGroup:
    """Cached enumeration of W(datum)."""
    g = _GROUPS.get(id(datum))
    if g is None or g.datum is not datum:
        g = WeylGroup(datum, allow_large=allow_large)
        _GROUPS[id(datum)] = g
    return g


def enumerate_group(datum: RootDatum, allow_large: bool = False) -> list[WeylElement]:
    return weyl_group(datum, allow_large=allow_large).elements


def longest_element(datum: RootDatum) -> WeylElement:
    return weyl_group(datum).longest()


def length_by_inversions(w: WeylElement) -> int:
    """Number of positive roots sent to negative roots, computed on the ambient action."""
    d = w.datum
    return sum(1 for a in d.positive_roots if _is_negative(d, w.action @ a))


def _is_negative(d: RootDatum, v: RatVec) -> bool:
    c = d.root_coords(v)
    return all(x <= 0 for x in c) and any(x < 0 for x in c)


def qw_support(datum: RootDatum, w: WeylElement) -> frozenset[int]:
    """Indices i with ``w varpi_i^vee != varpi_i^vee`` (ambient computation)."""
    a = w.action
    return frozenset(i for i, c in enumerate(datum.fundamental_coweights) if a @ c != c)


@dataclass(frozen=True)
class SignedPermutation:
    """``e_i -> eta[i] e_{sigma[i]}`` (0-based)."""

    sigma: tuple[int, ...]
    eta: tuple[int, ...]

    def __post_init__(self):
        n = len(self.sigma)
        if sorted(self.sigma) != list(range(n)) or len(self.eta) != n:
            raise ValueError("not a signed permutation")
        if any(e not in (1, -1) for e in self.eta):
            raise ValueError("signs must be +-1")

    @property
    def negatives(self) -> int:
        return sum(1 for e in self.eta if e < 0)

    def matrix(self) -> RatMat:
        n = len(self.sigma)
        rows = [[0] * n for _ in range(n)]
        for i, (s, e) in enumerate(zip(self.sigma, self.eta)):
            rows[s][i] = e
        return RatMat(rows)

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """``self o other``."""
        n = len(self.sigma)
        sigma = tuple(self.sigma[other.sigma[i]] for i in range(n))
        eta = tuple(other.eta[i] * self.eta[other.sigma[i]] for i in range(n))
        return SignedPermutation(sigma, eta)

    def inverted_set(self) -> frozenset[int]:
        """``{sigma(i) : eta_i = -1}`` (0-based)."""
        return frozenset(s for s, e in zip(self.sigma, self.eta) if e < 0)


def to_signed_permutation(datum: RootDatum, w: WeylElement) -> SignedPermutation:
    t = datum.cartan_type
    if t.family != "D" or datum.name not in ("", str(t)):
        raise ValueError("signed permutations are defined for the standard type D realization")
    a = w.action
    n = datum.ambient_dim
    sigma, eta = [], []
    for i in range(n):
        col = a.col(i)
        nz = [(k, x) for k, x in enumerate(col) if x != 0]
        if len(nz) != 1 or nz[0][1] not in (1, -1):
            raise ValueError("action is not a signed permutation matrix")
        sigma.append(nz[0][0])
        eta.append(int(nz[0][1]))
    sp = SignedPermutation(tuple(sigma), tuple(eta))
    if sp.negatives % 2:
        raise ValueError("odd number of sign changes: not an element of W(D)")
    return sp
