"""Order-zero Hankel / modified Bessel functions and the small-argument kernel expansion.

Evaluation is delegated to the AMOS (``hankel1e``) and Cephes (``k0``) routines
shipped with scipy; the two are independent code paths, which the
``(i/4) H0(ix) = K0(x)/(2 pi)`` identity cross-checks.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import DomainError, OutOfRange

EULER_GAMMA = float(np.euler_gamma)
SMALL_ARG_REMAINDER_C = 1.0
K0_UNDERFLOW = 700.0


def sqrt_is(s):
    """Principal ``sqrt(i s)`` for ``s > 0``: ``sqrt(s) * exp(i pi/4)``."""
    return np.sqrt(np.asarray(s, dtype=float)) * np.exp(0.25j * np.pi)


def hankel1_0(z):
    """``H0^(1)(z)`` on the principal branch; raises on ``z == 0``.

    Uses the exponentially scaled routine so that large ``Im z`` underflows
    cleanly to 0 instead of overflowing.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("H0^(1) is singular at z = 0")
    out = special.hankel1e(0, z) * np.exp(1j * z)
    return out if out.ndim else complex(out)


def hankel1_1(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("H1^(1) is singular at z = 0")
    out = special.hankel1e(1, z) * np.exp(1j * z)
    return out if out.ndim else complex(out)


def bessel_k0(x):
    """``K0(x)`` for ``x > 0``; exactly 0 beyond ``x = 700``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("K0 requires x > 0")
    out = np.where(x > K0_UNDERFLOW, 0.0, special.k0(np.minimum(x, K0_UNDERFLOW)))
    return out if out.ndim else float(out)


def bessel_k1(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("K1 requires x > 0")
    out = np.where(x > K0_UNDERFLOW, 0.0, special.k1(np.minimum(x, K0_UNDERFLOW)))
    return out if out.ndim else float(out)


class SmallArgExpansion(NamedTuple):
    principal: complex
    remainder_bound: float


def hankel_small_arg(s: float, r: float) -> SmallArgExpansion:
    """Leading small-``s r`` expansion of ``(i/4) H0(i s r) = K0(s r) / (2 pi)``.

    principal = -ln(r)/(2 pi) + i/4 - ln(i s/2)/(2 pi) - gamma/(2 pi), which is
    real because ``ln(i s/2) = ln(s/2) + i pi/2``. The remainder is bounded by
    ``C (s r)^2 |ln(s r)|`` with C = 1.
    """
    if not (s > 0 and r > 0):
        raise OutOfRange("s and r must be positive")
    x = s * r
    if x >= 0.5:
        raise OutOfRange(f"s*r = {x} must be < 1/2")
    two_pi = 2 * np.pi
    principal = (-np.log(r) / two_pi + 0.25j - np.log(0.5j * s) / two_pi
                 - EULER_GAMMA / two_pi)
    return SmallArgExpansion(complex(principal), SMALL_ARG_REMAINDER_C * x * x * abs(np.log(x)))
