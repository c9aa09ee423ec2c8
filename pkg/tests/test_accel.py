import os
import subprocess
import sys

import numpy as np
import pytest

from rootcone import _accel
from rootcone.root_datum import build
from rootcone.weyl import weyl_group


@pytest.mark.parametrize("name", ["A3", "D4", "F4"])
def test_inversion_backends_agree(name):
    if not _accel.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    g = weyl_group(build(name))
    a = g.inversion_data(backend="numpy")
    b = g.inversion_data(backend="numba")
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    # length equals the number of inversions
    assert [len(w.word) for w in g] == a[0].tolist()


def test_env_flag_disables_numba():
    env = dict(os.environ, ROOTCONE_DISABLE_NUMBA="1")
    code = "from rootcone import _accel; print(_accel.HAVE_NUMBA, _accel.DEFAULT_BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "numpy"]


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _accel.grid_first_batch(np.zeros((1, 1, 1)), np.zeros((1, 1)), np.ones(1), 2, backend="cuda")
