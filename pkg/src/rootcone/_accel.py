"""Integer hot loops: batched grid search and inversion counts.

Each kernel has a numba implementation and a pure-numpy one.  The numba path
is used when numba imports and ``ROOTCONE_DISABLE_NUMBA`` is unset; every
public function also takes ``backend="numba"|"numpy"`` to force one.

All inputs are int64 arrays; callers scale rational data to integers first,
so the kernels are exact as long as no product overflows 2**63.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

_DISABLED = os.environ.get("ROOTCONE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by ROOTCONE_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

DEFAULT_BACKEND = "numba" if HAVE_NUMBA else "numpy"

# Magnitude bound for kernel inputs: rows * coords * width stays far below 2**63.
INT_LIMIT = 2**40


def _resolve(backend: str | None) -> str:
    backend = backend or DEFAULT_BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    return backend


if HAVE_NUMBA:

    @njit(cache=True)
    def _grid_first_nb(rows, offsets, nrows, max_coord, out):
        K = rows.shape[0]
        V = rows.shape[2]
        x = np.empty(V, dtype=np.int64)
        for k in range(K):
            out[k] = -1
            m = nrows[k]
            for j in range(V):
                x[j] = 1
            g = 0
            while True:
                ok = True
                for r in range(m):
                    s = offsets[k, r]
                    for j in range(V):
                        s += rows[k, r, j] * x[j]
                    if s <= 0:
                        ok = False
                        break
                if ok:
                    out[k] = g
                    break
                # odometer, last coordinate fastest
                j = V - 1
                while j >= 0 and x[j] == max_coord:
                    x[j] = 1
                    j -= 1
                if j < 0:
                    break
                x[j] += 1
                g += 1

    @njit(cache=True)
    def _negative_counts_nb(height_rows, images, out_counts, out_masks):
        # height_rows: (K, r) = h @ M_k ; images: (r, N) positive roots in weight coords
        K = height_rows.shape[0]
        r = images.shape[0]
        N = images.shape[1]
        for k in range(K):
            c = 0
            for a in range(N):
                s = 0
                for i in range(r):
                    s += height_rows[k, i] * images[i, a]
                neg = s < 0
                out_masks[k, a] = neg
                if neg:
                    c += 1
            out_counts[k] = c


def grid_points(max_coord: int, dim: int) -> np.ndarray:
    """All points of {1..max_coord}^dim in lexicographic order (first coordinate slowest)."""
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    pts = np.array(list(itertools.product(range(1, max_coord + 1), repeat=dim)), dtype=np.int64)
    return pts.reshape(-1, dim)


def decode_grid_index(g: int, max_coord: int, dim: int) -> list[int]:
    x = []
    for _ in range(dim):
        x.append(1 + g % max_coord)
        g //= max_coord
    return x[::-1]


def _grid_first_np(rows, offsets, nrows, max_coord, chunk=512):
    K, R, V = rows.shape
    pts = grid_points(max_coord, V)
    out = np.full(K, -1, dtype=np.int64)
    live = np.arange(R)[None, :] < nrows[:, None]  # (K, R)
    for s in range(0, K, chunk):
        e = min(K, s + chunk)
        vals = np.einsum("krv,gv->krg", rows[s:e], pts) + offsets[s:e, :, None]
        ok = np.all((vals > 0) | ~live[s:e, :, None], axis=1)  # (chunk, G)
        has = ok.any(axis=1)
        first = ok.argmax(axis=1)
        out[s:e] = np.where(has, first, -1)
    return out


def grid_first_batch(rows, offsets, nrows, max_coord: int, backend: str | None = None) -> np.ndarray:
    """Index of the first lexicographic grid point satisfying every live row strictly.

    ``rows`` is (K, R, V), ``offsets`` (K, R), ``nrows`` (K,): only the first
    ``nrows[k]`` rows of instance ``k`` are live.  Returns (K,) indices into
    the grid order, ``-1`` where no point of {1..max_coord}^V works.
    """
    if max_coord < 1:
        raise ValueError("max_coord must be >= 1")
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    nrows = np.ascontiguousarray(nrows, dtype=np.int64)
    if rows.size and (np.abs(rows).max() > INT_LIMIT or np.abs(offsets).max() > INT_LIMIT):
        raise OverflowError("grid kernel input too large for int64 evaluation")
    backend = _resolve(backend)
    if backend == "numba":
        out = np.empty(rows.shape[0], dtype=np.int64)
        _grid_first_nb(rows, offsets, nrows, np.int64(max_coord), out)
        return out
    return _grid_first_np(rows, offsets, nrows, max_coord)


def negative_root_masks(mats, height_vec, root_weights, backend: str | None = None):
    """For each weight-basis matrix ``M_k``, flag positive roots sent to negative roots.

    ``height_vec`` (r,) maps weight coordinates to a positive multiple of the
    root height; ``root_weights`` (r, N) holds the positive roots in weight
    coordinates.  Returns ``(counts (K,), masks (K, N) bool)``.
    """
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    hrows = np.ascontiguousarray(np.einsum("i,kij->kj", np.asarray(height_vec, dtype=np.int64), mats))
    images = np.ascontiguousarray(root_weights, dtype=np.int64)
    backend = _resolve(backend)
    K, N = mats.shape[0], images.shape[1]
    if backend == "numba":
        counts = np.empty(K, dtype=np.int64)
        masks = np.empty((K, N), dtype=np.bool_)
        _negative_counts_nb(hrows, images, counts, masks)
        return counts, masks
    masks = (hrows @ images) < 0
    return masks.sum(axis=1).astype(np.int64), masks
