"""Average rate ``E[ln(1 + SINR)]`` from a coverage curve.

Since the rate is a positive random variable, its mean is the integral of its
tail: ``int_0^inf P(SINR > e^t - 1) dt``. Integrating in ``t`` rather than in
the threshold avoids the exponential Jacobian.
"""

import math
from dataclasses import dataclass

from . import closed_access as ca
from . import open_access as oa
from .errors import ConfigError, DegenerateConditioning
from .model import AccessMode, NetworkConfig, ReuseScheme
from .quadrature import DEFAULT_POLICY, integrate_finite

TAIL_LEVEL = 1e-8
T_MAX_CAP = 512.0  # e^t - 1 must stay representable
LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateResult:
    mean_rate: float  # nats/Hz
    scheme: ReuseScheme
    access: AccessMode
    warnings: tuple = ()
    t_max: float = float("nan")

    def __post_init__(self):
        if not (self.mean_rate >= 0 and math.isfinite(self.mean_rate)):
            raise ValueError(f"mean rate must be finite and non-negative, got {self.mean_rate}")

    @property
    def rate_bits(self):
        return self.mean_rate / LN2


def _tail_point(ccdf, level=TAIL_LEVEL, cap=T_MAX_CAP):
    """Smallest ``t`` (to bisection accuracy) with ``ccdf(e^t - 1) < level``.

    Brackets by doubling from ``t = 1``. Returns ``(t_max, capped)``.
    """

    def below(t):
        return ccdf(math.expm1(t)) < level

    hi = 1.0
    while not below(hi):
        if hi >= cap:
            return cap, True
        hi = min(2.0 * hi, cap)
    lo = 0.0 if hi == 1.0 else 0.5 * hi
    for _ in range(60):
        if hi - lo <= 1e-6 * hi:
            break
        mid = 0.5 * (lo + hi)
        if below(mid):
            hi = mid
        else:
            lo = mid
    return hi, False


def average_rate(ccdf, policy=DEFAULT_POLICY):
    """``int_0^{t_max} ccdf(e^t - 1) dt`` for a scalar coverage function.

    Returns ``(rate, t_max, warnings)``.
    """
    warnings = []
    t_max, capped = _tail_point(ccdf)
    if capped:
        warnings.append(f"coverage still above {TAIL_LEVEL:g} at t = {T_MAX_CAP:g}; tail truncated")
    res = integrate_finite(lambda t: ccdf(math.expm1(float(t))), 0.0, t_max, policy)
    if not res.converged:
        warnings.append("nonconverged:rate integral")
    return max(res.value, 0.0), t_max, tuple(warnings)


def _edge_ccdf_fn(scheme, access, cfg, policy, fast):
    scheme = ReuseScheme(scheme)
    access = AccessMode(access)
    if access is AccessMode.OPEN:
        if not isinstance(cfg, oa.OpenScenario):
            raise TypeError("open access needs an OpenScenario")
        if scheme is ReuseScheme.UNIVERSAL:
            raise ConfigError("open access supports strict_ffr and sfr", code="scheme_invalid")
        den = oa.open_denominator(cfg, scheme, policy)
        return lambda T: oa.open_edge_ccdf(T, cfg, scheme, policy, denominator=den)
    if not isinstance(cfg, NetworkConfig):
        raise TypeError("closed access needs a NetworkConfig")
    net = cfg.with_(beta=1.0) if scheme is ReuseScheme.UNIVERSAL else cfg
    use_fast = ca._fast_ok(net) if fast is None else bool(fast)
    if scheme is ReuseScheme.STRICT_FFR:
        if use_fast:
            return lambda T: ca.strict_ffr_closed_fast(T, net)
        den = ca.strict_ffr_denominator(net, policy)
        return lambda T: ca.strict_ffr_closed_edge_ccdf(T, net, policy, denominator=den)
    if use_fast:
        return lambda T: ca.sfr_closed_fast(T, net)
    den = ca.sfr_denominator(net, policy)
    return lambda T: ca.sfr_closed_edge_ccdf(T, net, policy, denominator=den)


def _guard_denominator(scheme, access, cfg, policy):
    access = AccessMode(access)
    scheme = ReuseScheme(scheme)
    if access is AccessMode.OPEN:
        den = oa.open_denominator(cfg, scheme, policy)
    elif scheme is ReuseScheme.STRICT_FFR:
        den = ca.strict_ffr_denominator(cfg, policy)
    else:
        net = cfg.with_(beta=1.0) if scheme is ReuseScheme.UNIVERSAL else cfg
        den = ca.sfr_denominator(net, policy)
    if not den >= ca.DEGENERATE_DENOMINATOR:
        raise DegenerateConditioning(f"P(edge) = {den:.3e}: no edge users at this FFR threshold")


def average_edge_rate(scheme, access, cfg, policy=DEFAULT_POLICY, fast=None):
    """Mean edge-user rate in nats/Hz.

    ``cfg`` is a :class:`NetworkConfig` for closed access or an
    :class:`OpenScenario` for open access.
    """
    _guard_denominator(scheme, access, cfg, policy)
    fn = _edge_ccdf_fn(scheme, access, cfg, policy, fast)
    rate, t_max, warns = average_rate(fn, policy)
    return RateResult(rate, ReuseScheme(scheme), AccessMode(access), warns, t_max)


def universal_rate(net, policy=DEFAULT_POLICY):
    """Mean rate of a tier-1 user under universal reuse, without edge conditioning."""
    rate, t_max, warns = average_rate(lambda T: ca.universal_coverage_multitier(T, net, policy), policy)
    return RateResult(rate, ReuseScheme.UNIVERSAL, AccessMode.CLOSED, warns, t_max)
