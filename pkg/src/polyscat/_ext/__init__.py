"""Hot kernels: compiled extension when built, numpy fallback otherwise.

Set ``POLYSCAT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _leapfrog_py

BACKEND = "python"
advance = _leapfrog_py.advance

if os.environ.get("POLYSCAT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _leapfrog as _compiled
    except ImportError:
        pass
    else:
        advance = _compiled.advance
        BACKEND = "cython"


def rotate(bufs, nsteps):
    """Buffer order (previous, current, scratch) after ``advance`` ran ``nsteps``."""
    r = nsteps % 3
    return bufs[r], bufs[(r + 1) % 3], bufs[(r + 2) % 3]
