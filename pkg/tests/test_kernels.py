import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from hetnet_ffr import kernels as kn
from hetnet_ffr.errors import ConfigError
from hetnet_ffr.quadrature import QuadPolicy


def rho_hyp2f1(z, alpha):
    d = 2.0 / alpha
    return 2.0 * z / (alpha - 2.0) * special.hyp2f1(1.0, 1.0 - d, 2.0 - d, -z)


def unit_quad(f):
    return integrate.quad(f, 1.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=500)[0]


@pytest.mark.parametrize("alpha", [2.5, 3.0, 3.5, 4.0, 5.0, 6.0])
@pytest.mark.parametrize("z", [1e-3, 0.1, 1.0, 7.3, 1e2, 1e4])
def test_rho_matches_hypergeometric_oracle(z, alpha):
    assert kn.rho(z, alpha) == pytest.approx(rho_hyp2f1(z, alpha), rel=1e-9)


def test_rho_alpha4_closed_form():
    z = np.logspace(-4, 4, 41)
    assert np.allclose([kn.rho(v, 4.0) for v in z], kn.rho_alpha4(z), rtol=1e-10, atol=0)


def test_rho_zero_and_large_argument():
    assert kn.rho(0.0, 4.0) == 0.0
    # the excluded disc removes exactly one unit from the unbounded integral
    for alpha in (3.0, 4.0, 5.0):
        z = 1e10
        assert 2 * kn.psi(z, alpha) - kn.rho(z, alpha) == pytest.approx(1.0, rel=1e-4)


def test_psi_alpha4():
    assert kn.psi(0.3, 4.0) == pytest.approx(math.pi / 4 * math.sqrt(0.3), rel=1e-15)


def test_rho_unit_is_half_rho():
    v, _, _ = kn.rho_unit_j(2.5, 3.7, 1e-11, 1e-14, 2000)
    assert v == pytest.approx(kn.rho(2.5, 3.7) / 2, rel=1e-10)


@pytest.mark.parametrize("T,T1,alpha,delta", [(2.0, 1.0, 4.0, 3), (0.3, 1.26, 3.5, 2), (40.0, 0.8, 5.0, 4)])
def test_xi_against_scipy(T, T1, alpha, delta):
    # summed form: the textbook "1 - ..." integrand loses digits in the tail
    def f(x):
        a, b = T1 * x ** -alpha, T * x ** -alpha
        return (a / (1 + a) + b / ((1 + a) * (1 + b)) / delta) * x

    v = kn.xi_closed(T, T1, alpha, delta)
    assert v == pytest.approx(unit_quad(f), rel=1e-9)
    # partial fractions with the hypergeometric rho: no quadrature at all
    r1, r = rho_hyp2f1(T1, alpha), rho_hyp2f1(T, alpha)
    assert v == pytest.approx(r1 / 2 + T * (r1 - r) / (2 * delta * (T1 - T)), rel=1e-9)


@pytest.mark.parametrize("T,T1,alpha,beta", [(2.0, 1.0, 4.0, 4.0), (0.3, 1.26, 3.5, 2.0), (40.0, 0.8, 5.0, 1.0)])
def test_zeta_against_scipy(T, T1, alpha, beta):
    eta = (3 - 1 + beta) / 3

    a0, b0 = eta * T1, eta / beta * T

    def f(x):
        a, b = a0 * x ** -alpha, b0 * x ** -alpha
        return (a + b + a * b) / ((1 + a) * (1 + b)) * x

    v = kn.zeta_closed(T, T1, alpha, beta, eta)
    assert v == pytest.approx(unit_quad(f), rel=1e-9)
    ref = (b0 * rho_hyp2f1(b0, alpha) - a0 * rho_hyp2f1(a0, alpha)) / (2 * (b0 - a0))
    assert v == pytest.approx(ref, rel=1e-9)


def test_xi_limits():
    for alpha, delta in ((4.0, 3), (3.2, 2)):
        assert kn.xi_closed(0.0, 1.7, alpha, delta) == pytest.approx(kn.rho(1.7, alpha) / 2, abs=1e-8)
        assert kn.xi_closed(1.7, 0.0, alpha, delta) == pytest.approx(kn.rho(1.7, alpha) / (2 * delta), abs=1e-8)


def test_zeta_limits():
    alpha, beta, eta = 4.0, 4.0, 2.0
    assert kn.zeta_closed(0.0, 1.3, alpha, beta, eta) == pytest.approx(kn.rho(eta * 1.3, alpha) / 2, abs=1e-8)
    assert kn.zeta_closed(5.0, 0.0, alpha, beta, eta) == pytest.approx(kn.rho(eta * 5 / beta, alpha) / 2, abs=1e-8)


def test_epsilon_limits():
    e1, e2 = kn.epsilon_weights(0.0, 1e300, 0.1, 1.0, 2.0, 4.0)
    assert e1 == 1.0 and e2 == pytest.approx(0.0, abs=1e-290)
    e1, e2 = kn.epsilon_weights(1e300, 0.0, 0.1, 1.0, 2.0, 4.0)
    assert e1 == pytest.approx(0.0, abs=1e-290) and e2 == 1.0


def test_rho_open_against_scipy():
    z, alpha, ra, rb = 1.4, 3.5, 0.7, 1.9
    c = z * ra ** alpha
    ref = integrate.quad(lambda x: x / (1 + x ** alpha / c), rb, np.inf, epsrel=1e-12, limit=500)[0]
    assert kn.rho_open(z, alpha, ra, rb) == pytest.approx(ref, rel=1e-9)


def test_open_kernels_reduce_to_closed_at_unit_radii():
    assert kn.xi_open(2.0, 1.3, 4.0, 3, 1.0, 1.0) == pytest.approx(kn.xi_closed(2.0, 1.3, 4.0, 3), rel=1e-12)
    assert kn.zeta_open(2.0, 1.3, 4.0, 4.0, 2.0, 1.0, 1.0) == pytest.approx(
        kn.zeta_closed(2.0, 1.3, 4.0, 4.0, 2.0), rel=1e-12)


def test_invalid_arguments():
    with pytest.raises(ConfigError):
        kn.rho(1.0, 2.0)
    with pytest.raises(ConfigError):
        kn.rho(-1.0, 4.0)
    with pytest.raises(ConfigError):
        kn.xi_closed(math.nan, 1.0, 4.0, 3)


def test_full_result_reports_convergence():
    res = kn.rho(3.0, 4.0, full=True)
    assert res.converged and res.error_estimate < 1e-8
    coarse = kn.rho(3.0, 4.0, policy=QuadPolicy(1e-15, 1e-300, 1), full=True)
    assert not coarse.converged


def test_printed_forms_are_wrong():
    # kept only to document the published expressions; see the discrepancy report
    assert kn.xi_alpha4_printed(2.0, 1.0, 3.0) == pytest.approx(-0.552419521, rel=1e-8)
    assert kn.xi_closed(2.0, 1.0, 4.0, 3) == pytest.approx(0.581240266, rel=1e-8)
    assert kn.zeta_alpha4_printed(1.0, 1.0, 4.0, 2.0) == pytest.approx(53.289969, rel=1e-7)
    assert kn.zeta_closed(1.0, 1.0, 4.0, 4.0, 2.0) == pytest.approx(0.828146166, rel=1e-8)


pos = st.floats(1e-3, 1e3)


@settings(max_examples=60, deadline=None)
@given(T=pos, T1=pos, alpha=st.floats(2.2, 6.0), delta=st.integers(1, 6))
def test_xi_partial_fraction_and_bounds(T, T1, alpha, delta):
    q = kn.xi_closed(T, T1, alpha, delta)
    pf = kn.xi_partial_fraction(T, T1, alpha, delta)
    if pf is not None and abs(T - T1) > 1e-3 * max(T, T1):
        assert pf == pytest.approx(q, rel=1e-6)
    a, b = kn.rho(T1, alpha) / 2, kn.rho(T, alpha) / (2 * delta)
    assert max(a, b) * (1 - 1e-9) <= q <= (a + b) * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(T=pos, T1=pos, alpha=st.floats(2.2, 6.0), beta=st.floats(1.0, 10.0))
def test_zeta_partial_fraction(T, T1, alpha, beta):
    eta = (2.0 + beta) / 3.0
    q = kn.zeta_closed(T, T1, alpha, beta, eta)
    pf = kn.zeta_partial_fraction(T, T1, alpha, beta, eta)
    a, b = eta * T1, eta / beta * T
    if pf is not None and abs(a - b) > 1e-3 * max(a, b):
        assert pf == pytest.approx(q, rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(z1=pos, z2=pos, alpha=st.floats(2.2, 6.0))
def test_rho_monotone(z1, z2, alpha):
    lo, hi = sorted((z1, z2))
    assert kn.rho(lo, alpha) <= kn.rho(hi, alpha) * (1 + 1e-12)
