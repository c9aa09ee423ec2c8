"""Compare the numba and numpy backends of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--type E6] [--grid-max 3] [--repeat 3]

Both backends are called on identical inputs in one process (the backend is
chosen per call), and their outputs are checked for equality.
"""

import argparse
import time

import numpy as np

from rootcone import _accel
from rootcone.rcl import make_setup


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def _parts(out):
    return out if isinstance(out, tuple) else (out,)


def grid_inputs(setup):
    rows, _ = setup.eta_rows_scaled
    masks = setup.group.support_masks
    packed = np.zeros_like(rows)
    for k in range(len(rows)):
        sel = np.nonzero(masks[k])[0]
        packed[k, : len(sel)] = rows[k][sel]
    offs = np.zeros(masks.shape, dtype=np.int64)
    return packed, offs, masks.sum(axis=1)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--type", default="E6")
    ap.add_argument("--auto", default=None)
    ap.add_argument("--grid-max", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args(argv)
    auto = a.auto or {"E6": "e6", "D4": "triality"}.get(a.type, "identity")
    s = make_setup(a.type, auto)
    g = s.group
    print(f"{a.type} theta={auto} |W|={len(g)} numba={'yes' if _accel.HAVE_NUMBA else 'no'}")
    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])

    packed, offs, nrows = grid_inputs(s)
    inv, _ = s.datum.inverse_cartan_scaled
    height = inv.sum(axis=0)
    kernels = {
        "grid_first_batch": lambda b: _accel.grid_first_batch(packed, offs, nrows, a.grid_max, backend=b),
        "negative_root_masks": lambda b: _accel.negative_root_masks(
            g.matrices, height, s.datum.positive_root_weights, backend=b
        ),
    }
    for name, fn in kernels.items():
        results = {}
        for b in backends:
            fn(b)  # warm-up, includes JIT compilation
            results[b] = best_of(lambda: fn(b), a.repeat)
        ref = results["numpy"][1]
        for b, (t, out) in results.items():
            same = all(np.array_equal(x, y) for x, y in zip(_parts(out), _parts(ref)))
            print(f"  {name:22s} {b:6s} {t * 1e3:9.1f} ms  {'match' if same else 'MISMATCH'}")
        if len(results) == 2:
            print(f"  {name:22s} speedup {results['numpy'][0] / results['numba'][0]:.1f}x")


if __name__ == "__main__":
    main()
