import numpy as np
import pytest

from polyscat import _ext
from polyscat._ext import _leapfrog_py


def _state(n, rng):
    u_prev, u = rng.standard_normal((2, n, n))
    a = rng.uniform(0.1, 0.3, (n, n))
    src = np.zeros((n, n))
    src[n // 2, n // 2] = 1.0
    g = rng.standard_normal(8)
    sigma = rng.uniform(0.0, 0.1, (n, n))
    return u_prev, u, a, src, g, 1.0 - sigma, 1.0 / (1.0 + sigma)


def _run(advance, state, nsteps=8):
    u_prev, u, a, src, g, dp, dm = (np.array(x, copy=True) for x in state)
    work = np.zeros_like(u)
    assert advance(u_prev, u, work, a, src, g[:nsteps], dp, dm)
    return _ext.rotate((u_prev, u, work), nsteps)


@pytest.mark.skipif(_ext.BACKEND != "cython", reason="compiled extension not built")
def test_compiled_matches_fallback(rng):
    from polyscat._ext import _leapfrog

    st = _state(40, rng)
    a = _run(_leapfrog.advance, st)
    b = _run(_leapfrog_py.advance, st)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-13)


def test_rotate_cycles():
    bufs = ("p", "c", "w")
    assert _ext.rotate(bufs, 3) == bufs
    assert _ext.rotate(bufs, 1) == ("c", "w", "p")
