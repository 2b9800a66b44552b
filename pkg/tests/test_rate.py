import math

import pytest
from scipy import integrate

from hetnet_ffr import kernels as kn
from hetnet_ffr import rate as rt
from hetnet_ffr.errors import DegenerateConditioning
from hetnet_ffr.model import NetworkConfig, TierConfig, db_to_linear


def test_zero_ccdf_gives_zero_rate():
    value, t_max, warns = rt.average_rate(lambda T: 0.0)
    assert value == 0.0 and not warns


def test_single_tier_universal_rate_against_scipy():
    net = NetworkConfig((TierConfig(1.0, 1.0),))
    f = lambda t: 1 / (1 + kn.rho_alpha4(math.expm1(t)))
    res = rt.universal_rate(net)
    ref = integrate.quad(f, 0, res.t_max, limit=400, epsrel=1e-12)[0]
    assert res.mean_rate == pytest.approx(ref, rel=1e-10)
    # truncation beyond t_max, where the CCDF is below 1e-8, stays small
    full = ref + integrate.quad(f, res.t_max, 200, limit=400)[0]
    assert 0 < full - res.mean_rate < 5e-8
    assert res.mean_rate == pytest.approx(1.4889876, rel=1e-7)
    assert res.rate_bits == pytest.approx(res.mean_rate / math.log(2))


def test_t_max_bracket():
    # P(rate > t) = e^-t  ->  t_max = ln(1e8), mean 1
    value, t_max, _ = rt.average_rate(lambda T: 1 / (1 + T))
    assert t_max == pytest.approx(math.log(1e8), rel=1e-5)
    assert value == pytest.approx(1.0, abs=2e-8)


def test_cap_warns():
    value, t_max, warns = rt.average_rate(lambda T: 1.0)
    assert t_max == rt.T_MAX_CAP and warns
    assert value == pytest.approx(rt.T_MAX_CAP, rel=1e-12)


def test_bounded_by_t_max():
    value, t_max, _ = rt.average_rate(lambda T: 1.0 if T < 20.0 else 0.0)
    assert value <= t_max + 1e-8 * t_max


def test_dominance_monotonicity(ref_net):
    s = rt.average_edge_rate("strict_ffr", "closed", ref_net)
    u = rt.average_edge_rate("universal", "closed", ref_net)
    assert s.mean_rate > u.mean_rate


def test_fast_and_quadrature_rates_agree(ref_net):
    a = rt.average_edge_rate("sfr", "closed", ref_net)
    b = rt.average_edge_rate("sfr", "closed", ref_net, fast=False)
    assert a.mean_rate == pytest.approx(b.mean_rate, rel=1e-9)


def test_open_rate_runs(open_scen):
    r = rt.average_edge_rate("strict_ffr", "open", open_scen)
    assert 0 < r.mean_rate < 10


def test_degenerate_rate():
    net = NetworkConfig((TierConfig(1.0, 1.0, db_to_linear(-300.0)),))
    with pytest.raises(DegenerateConditioning):
        rt.average_edge_rate("strict_ffr", "closed", net)
