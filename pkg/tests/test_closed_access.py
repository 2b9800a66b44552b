import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from hetnet_ffr import closed_access as ca
from hetnet_ffr import kernels as kn
from hetnet_ffr.discrepancy import reference_network
from hetnet_ffr.errors import DegenerateConditioning, UnsupportedRegime
from hetnet_ffr.model import NetworkConfig, ReuseScheme, ThresholdGrid, TierConfig, db_to_linear

GRID = ThresholdGrid(-10.0, 20.0, 1.0)


def rho_h(z, alpha):
    d = 2.0 / alpha
    return 2.0 * z / (alpha - 2.0) * special.hyp2f1(1.0, 1.0 - d, 2.0 - d, -z)


def single_tier(t1_db=1.0, **kw):
    return NetworkConfig((TierConfig(1.0, 1.0, db_to_linear(t1_db)),), **kw)


def test_single_tier_universal_alpha4():
    net = single_tier()
    for T in (0.1, 1.0, 10.0):
        assert ca.universal_coverage_multitier(T, net) == pytest.approx(1 / (1 + kn.rho_alpha4(T)), rel=1e-12)


def test_reuse_delta_coverage():
    net = single_tier(delta=3)
    assert ca.reuse_delta_coverage(2.0, net) == pytest.approx(1 / (1 + kn.rho_alpha4(2.0) / 3), rel=1e-12)


def test_multitier_cross_term():
    net = reference_network()
    T = 1.7
    s = 0.5 * math.pi * (2 * math.sqrt(0.1 * T) + 4 * math.sqrt(0.01 * T))
    assert ca.universal_coverage_multitier(T, net) == pytest.approx(1 / (1 + kn.rho_alpha4(T) + s), rel=1e-12)


def test_noisy_strict_against_scipy_oracle():
    """Same conditional probability assembled from scipy quadrature in r."""
    net = reference_network(noise=0.5).with_(alpha=3.5)
    T, t1, a, d = 2.0, net.t1, net.alpha, net.delta
    lam, p1, mu, s2 = 1.0, 1.0, 1.0, 0.5
    cross = lambda z: sum(2 * k * math.pi * (g * z) ** (2 / a) / (a * math.sin(2 * math.pi / a))
                          for k, g in ((2.0, 0.1), (4.0, 0.01)))
    r1, r = rho_h(t1, a), rho_h(T, a)
    xi = r1 / 2 + T * (r1 - r) / (2 * d * (t1 - T))

    def lap(A, factor):
        f = lambda v: math.pi * lam * math.exp(-math.pi * lam * v * A - mu * factor * s2 / p1 * v ** (a / 2))
        return integrate.quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=400)[0]

    den = 1 - lap(1 + r1 + cross(t1), t1)
    num = lap(1 + r / d, T) - lap(1 + 2 * xi + cross(t1), T + t1)
    assert ca.strict_ffr_closed_edge_ccdf(T, net) == pytest.approx(num / den, rel=1e-8)


def test_fast_paths_match_quadrature():
    net = reference_network()
    for T in GRID.linear:
        assert ca.strict_ffr_closed_fast(T, net) == pytest.approx(ca.strict_ffr_closed_edge_ccdf(T, net), abs=1e-10)
        assert ca.sfr_closed_fast(T, net) == pytest.approx(ca.sfr_closed_edge_ccdf(T, net), abs=1e-10)


def test_fast_path_regime_guard():
    with pytest.raises(UnsupportedRegime):
        ca.strict_ffr_closed_fast(1.0, reference_network().with_(alpha=3.0))
    with pytest.raises(UnsupportedRegime):
        ca.sfr_closed_fast(1.0, reference_network(noise=0.1))
    with pytest.raises(UnsupportedRegime):
        ca.ccdf_curve("strict_ffr", reference_network(noise=0.1), GRID, fast=True)


def test_small_threshold_limits():
    net = reference_network()
    assert ca.strict_ffr_closed_edge_ccdf(1e-9, net) == pytest.approx(1.0, abs=1e-6)
    # the cross-tier term makes SFR converge like sqrt(T)
    assert ca.sfr_closed_edge_ccdf(1e-15, net) == pytest.approx(1.0, abs=1e-6)
    for T in (1e-9, 1e-12):
        assert 1 - ca.sfr_closed_edge_ccdf(T, net) <= 2 * math.sqrt(T)


def test_universal_is_sfr_with_unit_beta():
    net = reference_network()
    c = ca.ccdf_curve("universal", net, GRID)
    ref = [ca.sfr_closed_edge_ccdf(T, net.with_(beta=1.0)) for T in GRID.linear]
    assert np.allclose(c.values, ref, atol=1e-12)
    assert c.scheme is ReuseScheme.UNIVERSAL


def test_curve_fast_and_quadrature_selection():
    net = reference_network()
    a = ca.ccdf_curve("sfr", net, GRID)
    b = ca.ccdf_curve("sfr", net, GRID, fast=False)
    assert np.max(np.abs(a.values - b.values)) < 1e-10
    assert len(b.point_warnings) == len(GRID)
    assert not a.values.flags.writeable


def test_degenerate_conditioning():
    net = single_tier(t1_db=-300.0)
    with pytest.raises(DegenerateConditioning):
        ca.ccdf_curve("strict_ffr", net, GRID)
    with pytest.raises(DegenerateConditioning):
        ca.strict_ffr_closed_edge_ccdf(1.0, net)


def test_noise_conventions_differ_and_coincide_without_noise():
    net0 = reference_network()
    assert ca.sfr_closed_edge_ccdf(1.0, net0, noise="printed") == pytest.approx(
        ca.sfr_closed_edge_ccdf(1.0, net0), abs=1e-14)
    net = reference_network(noise=10.0)
    assert ca.strict_ffr_closed_edge_ccdf(1.0, net, noise="printed") < ca.strict_ffr_closed_edge_ccdf(1.0, net)


def test_strict_dominates_universal_on_reference():
    net = reference_network()
    s = ca.ccdf_curve("strict_ffr", net, GRID).values
    u = ca.ccdf_curve("universal", net, GRID).values
    assert np.all(s >= u)


@settings(max_examples=40, deadline=None)
@given(kappa=st.floats(0.1, 10), gamma=st.floats(1e-3, 1.0), delta=st.integers(1, 5), beta=st.floats(1.0, 8.0),
       t1_db=st.floats(-5, 10), alpha=st.sampled_from([3.0, 4.0, 4.5]))
def test_conditional_ccdf_is_a_monotone_probability(kappa, gamma, delta, beta, t1_db, alpha):
    t1 = db_to_linear(t1_db)
    net = NetworkConfig((TierConfig(1.0, 1.0, t1), TierConfig(kappa, gamma)), alpha=alpha, delta=delta, beta=beta)
    grid = ThresholdGrid(-10.0, 20.0, 5.0)
    for scheme in ("strict_ffr", "sfr"):
        v = ca.ccdf_curve(scheme, net, grid).values
        assert np.all((v >= 0) & (v <= 1))
        assert np.all(np.diff(v) <= 1e-12)
