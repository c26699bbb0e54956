import numpy as np
import pytest

from polyscat import specialfn as sf
from polyscat.errors import DomainError, OutOfRange


def test_tabulated_values():
    # Abramowitz & Stegun tables
    assert sf.bessel_k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-14)
    assert sf.bessel_k1(1.0) == pytest.approx(0.6019072301972346, rel=1e-14)
    h = sf.hankel1_0(1.0)
    assert h.real == pytest.approx(0.7651976865579666, rel=1e-14)
    assert h.imag == pytest.approx(0.08825696421567696, rel=1e-13)


def test_hankel_k0_identity():
    x = np.geomspace(1e-4, 50.0, 500)
    lhs = 0.25j * sf.hankel1_0(1j * x)
    rhs = sf.bessel_k0(x) / (2 * np.pi)
    assert np.max(np.abs(lhs - rhs) / rhs) <= 1e-10


def test_large_imaginary_argument_underflows():
    assert sf.hankel1_0(800j) == 0
    assert sf.bessel_k0(800.0) == 0.0


def test_domain_errors():
    with pytest.raises(DomainError):
        sf.hankel1_0(0.0)
    with pytest.raises(DomainError):
        sf.bessel_k0(-1.0)
    with pytest.raises(OutOfRange):
        sf.hankel_small_arg(2.0, 0.5)


def test_sqrt_is():
    z = sf.sqrt_is(4.0)
    assert z ** 2 == pytest.approx(4j)
    assert z.real > 0


def test_small_arg_expansion_remainder():
    r = 0.3
    ratios = []
    prev = None
    for s in (0.4, 0.2, 0.1, 0.05):
        e = sf.hankel_small_arg(s, r)
        exact = sf.bessel_k0(s * r) / (2 * np.pi)
        rem = abs(exact - e.principal)
        assert rem <= e.remainder_bound
        assert abs(e.principal.imag) < 1e-15
        if prev is not None:
            ratios.append(prev / rem)
        prev = rem
    # O(x^2 log x): a bit more than 4 per halving
    assert all(3.0 <= q <= 5.0 for q in ratios)
