import os
import subprocess
import sys

import numpy as np
import pytest

from stretchlab import _kernels_py
from stretchlab._backend import BACKEND
from stretchlab.model import ModelParams, generate
from stretchlab.stretch import _adj_u8, _csr
from stretchlab.geom import pairwise_euclid

cython = pytest.importorskip("stretchlab._kernels") if BACKEND == "cython" else None
needs_ext = pytest.mark.skipif(cython is None, reason="compiled kernels not built")


def _inputs(n, p, seed):
    g = generate(ModelParams(n, p, seed))
    indptr, indices = _csr(g)
    return g, pairwise_euclid(g.points), _adj_u8(g), indptr, indices


@needs_ext
@pytest.mark.parametrize("n,p,seed", [(5, 0.9, 1), (40, 0.3, 2), (120, 0.08, 3), (200, 0.6, 4), (90, 1.0, 5)])
def test_max_stretch_parity(n, p, seed):
    _, dmat, adj, indptr, indices = _inputs(n, p, seed)
    for dense in (True, False):
        a = _kernels_py.max_stretch(dmat, adj, indptr, indices, dense=dense)
        b = cython.max_stretch(dmat, adj, indptr, indices, dense=dense)
        assert tuple(a[1:3]) == tuple(b[1:3])
        assert a[0] == pytest.approx(b[0], rel=1e-12)


@needs_ext
def test_sssp_parity():
    _, dmat, adj, indptr, indices = _inputs(80, 0.1, 9)
    for s in (0, 17, 79):
        ref = _kernels_py.sssp_dense(dmat, adj, s)
        np.testing.assert_allclose(cython.sssp_dense(dmat, adj, s), ref, rtol=1e-12)
        np.testing.assert_allclose(cython.sssp_heap(dmat, indptr, indices, s), ref, rtol=1e-12)
        np.testing.assert_allclose(_kernels_py.sssp_heap(dmat, indptr, indices, s), ref, rtol=1e-12)


def test_pure_env_selects_fallback():
    env = dict(os.environ, STRETCHLAB_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from stretchlab._backend import BACKEND; print(BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
