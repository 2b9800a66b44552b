"""Closed-access edge-user CCDFs: strict FFR, SFR and the reuse baselines.

Every expression is an average over the serving distance ``r1`` written in
``w = pi * lambda_1 * r1^2``, so each term is a Laplace-type integral
``int_0^inf exp(-A w - c w^(alpha/2)) dw`` (exactly ``1/A`` without noise).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as kn
from .errors import DegenerateConditioning, EvaluationError, HetnetFFRError, UnsupportedRegime
from .model import AccessMode, NetworkConfig, ReuseScheme, ThresholdGrid, derived_ratios
from .quadrature import DEFAULT_POLICY

DEGENERATE_DENOMINATOR = 1e-12
PROB_SLACK = 1e-9

# Noise factors: "derived" follows the Laplace algebra (the conditioning event
# only ever involves T1); "printed" reproduces the published per-line factors.
NOISE_CONVENTIONS = ("derived", "printed")


@dataclass(frozen=True)
class CcdfCurve:
    grid: ThresholdGrid
    values: np.ndarray
    scheme: ReuseScheme
    access: AccessMode
    warnings: tuple = ()
    label: str = ""
    point_warnings: tuple = ()  # one string per grid point ("" when clean), or empty

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.grid),):
            raise ValueError("curve values must match the grid length")
        if self.point_warnings and len(self.point_warnings) != len(self.grid):
            raise ValueError("point warnings must match the grid length")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def db(self):
        return self.grid.db

    @property
    def linear(self):
        return self.grid.linear


class _Flags:
    """Collects quadrature non-convergence flags during one evaluation."""

    def __init__(self):
        self.items = []

    def note(self, status, what):
        if status == 2:
            raise EvaluationError(f"non-finite integrand in {what}")
        if status != 0:
            self.items.append(f"nonconverged:{what}")


def _tols(policy):
    return policy.rel_tol, policy.abs_tol, policy.max_subdivisions


def _rho(z, net, policy, flags):
    v, _, st = kn.rho_j(float(z), float(net.alpha), *_tols(policy))
    flags.note(st, "rho")
    return v


def _cross(z, net, beta=1.0):
    """``2 * sum_k kappa_k * psi(gamma_k z / beta)`` over tiers 2..K."""
    return 2.0 * sum(k * kn.psi_j(g * z / beta, net.alpha) for k, g in derived_ratios(net))


def _laplace(A, noise_coef, net, policy, flags):
    """``pi lam1 int_0^inf exp(-pi lam1 v A - noise_coef v^(alpha/2)) dv``."""
    if noise_coef <= 0.0:
        return 1.0 / A
    c = noise_coef / (math.pi * net.tiers[0].density) ** (0.5 * net.alpha)
    v, _, st = kn.laplace_j(float(A), float(c), float(net.alpha), *_tols(policy))
    flags.note(st, "laplace")
    return v


def _snr_coef(net, factor):
    """``mu * factor * sigma^2 / P1``."""
    return net.mu * factor * net.noise / net.tiers[0].power


def as_probability(x, what="probability"):
    """Clamp into [0, 1] within numerical slack; larger excursions are errors."""
    if not math.isfinite(x):
        raise EvaluationError(f"{what} is not finite")
    if x < -PROB_SLACK or x > 1.0 + PROB_SLACK:
        raise EvaluationError(f"{what} = {x!r} outside [0, 1]")
    return min(1.0, max(0.0, x))


def _check_T(T):
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"threshold must be positive and finite, got {T}")


# --- baselines ----------------------------------------------------------------------

def reuse_delta_coverage(T, net, policy=DEFAULT_POLICY):
    """Coverage with reuse factor ``delta`` and first-tier interference only."""
    _check_T(T)
    flags = _Flags()
    A = 1.0 + _rho(T, net, policy, flags) / net.delta
    return as_probability(_laplace(A, _snr_coef(net, T), net, policy, flags))


def universal_coverage_multitier(T, net, policy=DEFAULT_POLICY):
    """Unconditional coverage of a tier-1 user under universal reuse."""
    _check_T(T)
    flags = _Flags()
    A = 1.0 + _rho(T, net, policy, flags) + _cross(T, net)
    return as_probability(_laplace(A, _snr_coef(net, T), net, policy, flags))


# --- strict FFR ----------------------------------------------------------------------

def strict_ffr_denominator(net, policy=DEFAULT_POLICY, flags=None, noise="derived", T=None):
    """``P(SINR < T1)`` under universal reuse; independent of ``T``.

    With ``noise="printed"`` the published factor ``mu (T + T1)`` is used and
    ``T`` must be supplied.
    """
    flags = flags or _Flags()
    t1 = net.t1
    A = 1.0 + _rho(t1, net, policy, flags) + _cross(t1, net)
    factor = t1 if noise == "derived" else T + t1
    return 1.0 - _laplace(A, _snr_coef(net, factor), net, policy, flags)


def _strict_numerator(T, net, policy, flags):
    t1 = net.t1
    xi, _, st = kn.xi_unit_j(float(T), float(t1), float(net.alpha), float(net.delta), *_tols(policy))
    flags.note(st, "xi")
    first = _laplace(1.0 + _rho(T, net, policy, flags) / net.delta, _snr_coef(net, T), net, policy, flags)
    joint = _laplace(1.0 + 2.0 * xi + _cross(t1, net), _snr_coef(net, T + t1), net, policy, flags)
    return first - joint


def _conditional(num, den):
    if not den >= DEGENERATE_DENOMINATOR:
        raise DegenerateConditioning(
            f"P(SINR < T1) = {den:.3e}: no edge users at this FFR threshold")
    return as_probability(num / den, "conditional CCDF")


def strict_ffr_closed_edge_ccdf(T, net, policy=DEFAULT_POLICY, denominator=None, noise="derived",
                                _flags=None):
    """``P(SINR_ffr > T | SINR < T1)`` for a tier-1 edge user under strict FFR."""
    _check_T(T)
    flags = _flags or _Flags()
    if noise == "printed":
        denominator = strict_ffr_denominator(net, policy, flags, noise, T)
    elif denominator is None:
        denominator = strict_ffr_denominator(net, policy, flags)
    return _conditional(_strict_numerator(T, net, policy, flags), denominator)


# --- SFR -----------------------------------------------------------------------------

def sfr_denominator(net, policy=DEFAULT_POLICY, flags=None, noise="derived"):
    """``P(SINR < T1)`` with tier-1 common-band interference scaled by ``eta``."""
    flags = flags or _Flags()
    t1, eta = net.t1, net.eta
    A = 1.0 + _rho(eta * t1, net, policy, flags) + _cross(t1, net)
    factor = t1 if noise == "derived" else eta * t1
    return 1.0 - _laplace(A, _snr_coef(net, factor), net, policy, flags)


def _sfr_numerator(T, net, policy, flags, noise="derived"):
    t1, eta, beta = net.t1, net.eta, net.beta
    zeta, _, st = kn.zeta_unit_j(eta / beta * T, eta * t1, float(net.alpha), *_tols(policy))
    flags.note(st, "zeta")
    cb = _cross(T, net, beta)
    first = _laplace(1.0 + _rho(eta * T / beta, net, policy, flags) + cb,
                     _snr_coef(net, T / beta), net, policy, flags)
    joint_factor = T / beta + t1 if noise == "derived" else T + eta * t1
    joint = _laplace(1.0 + 2.0 * zeta + cb + _cross(t1, net), _snr_coef(net, joint_factor), net, policy, flags)
    return first - joint


def sfr_closed_edge_ccdf(T, net, policy=DEFAULT_POLICY, denominator=None, noise="derived", _flags=None):
    """``P(SINR_sfr > T | SINR < T1)`` for a tier-1 SFR edge user."""
    _check_T(T)
    flags = _flags or _Flags()
    if denominator is None:
        denominator = sfr_denominator(net, policy, flags, noise)
    return _conditional(_sfr_numerator(T, net, policy, flags, noise), denominator)


def universal_edge_ccdf(T, net, policy=DEFAULT_POLICY, denominator=None):
    """Edge-user CCDF when the edge user is rescheduled on the common band.

    The user keeps the same interferers but sees fresh fading; this is SFR
    with ``beta = 1`` (hence ``eta = 1``).
    """
    return sfr_closed_edge_ccdf(T, net.with_(beta=1.0), policy, denominator)


# --- alpha = 4, noiseless closed forms --------------------------------------------

def _require_fast_regime(net):
    if net.alpha != 4 or net.noise != 0:
        raise UnsupportedRegime("closed forms need alpha = 4 and zero noise")


def _sqrt_sum(net, z):
    """``(pi/2) * sum_k kappa_k * sqrt(gamma_k z)``, i.e. ``_cross`` at alpha = 4."""
    return 0.5 * math.pi * sum(k * math.sqrt(g * z) for k, g in derived_ratios(net))


def strict_ffr_closed_fast(T, net):
    """Strict FFR edge CCDF at ``alpha = 4``, no noise, in closed form."""
    _require_fast_regime(net)
    _check_T(T)
    t1, d = net.t1, net.delta
    r = kn.rho_alpha4
    s1 = _sqrt_sum(net, t1)
    bayes = (1.0 + r(t1) + s1) / (r(t1) + s1)
    xi = kn.xi_alpha4(T, t1, d)
    return as_probability(bayes * (1.0 / (1.0 + r(T) / d) - 1.0 / (1.0 + 2.0 * xi + s1)))


def sfr_closed_fast(T, net):
    """SFR edge CCDF at ``alpha = 4``, no noise, in closed form."""
    _require_fast_regime(net)
    _check_T(T)
    t1, eta, beta = net.t1, net.eta, net.beta
    r = kn.rho_alpha4
    s1 = _sqrt_sum(net, t1)
    sb = _sqrt_sum(net, T / beta)
    bayes = (1.0 + r(eta * t1) + s1) / (r(eta * t1) + s1)
    zeta = kn.zeta_alpha4(T, t1, beta, eta)
    return as_probability(bayes * (1.0 / (1.0 + r(eta * T / beta) + sb) - 1.0 / (1.0 + 2.0 * zeta + sb + s1)))


def strict_ffr_closed_printed(T, net):
    """The published alpha=4 strict FFR expression, for the discrepancy report only."""
    _require_fast_regime(net)
    t1, d = net.t1, net.delta
    r = kn.rho_alpha4
    s = 0.5 * math.pi * sum(k * math.sqrt(g * T) for k, g in derived_ratios(net))
    bayes = (1.0 + r(t1) + s) / (r(t1) + s)
    return bayes * (1.0 / (1.0 + r(T) / d) - 1.0 / (1.0 + 2.0 * kn.xi_alpha4_printed(T, t1, d) + s))


def sfr_closed_printed(T, net):
    """The published alpha=4 SFR expression, for the discrepancy report only."""
    _require_fast_regime(net)
    t1, eta, beta, d = net.t1, net.eta, net.beta, net.delta
    r = kn.rho_alpha4
    gam = [g for _, g in derived_ratios(net)]
    s = 0.5 * math.pi * sum(math.sqrt(g * T) for g in gam)
    sb = 0.5 * math.pi * sum(math.sqrt(g * T / beta) for g in gam)
    bayes = (1.0 + r(eta * t1) + s) / (r(eta * t1) + s)
    zeta = kn.zeta_alpha4_printed(T, t1, beta, eta)
    return bayes * (1.0 / (1.0 + r(eta * T / beta) / d + sb) - 1.0 / (1.0 + 2.0 * zeta + sb + s))


# --- curves ---------------------------------------------------------------------------

def _fast_ok(net):
    return net.alpha == 4 and net.noise == 0


def ccdf_curve(scheme, net, grid, policy=DEFAULT_POLICY, fast=None):
    """Closed-access edge CCDF over ``grid``.

    ``scheme`` is strict FFR, SFR or universal (edge user rescheduled on the
    common band). ``fast=None`` picks the closed forms whenever alpha = 4 and
    there is no noise. Per-point failures become NaN with a warning; a
    degenerate conditioning event aborts the curve.
    """
    scheme = ReuseScheme(scheme)
    if not isinstance(net, NetworkConfig):
        raise TypeError("net must be a NetworkConfig")
    use_fast = _fast_ok(net) if fast is None else bool(fast)
    if use_fast:
        _require_fast_regime(net)
    if scheme is ReuseScheme.UNIVERSAL:
        eff, scheme_fn = net.with_(beta=1.0), ReuseScheme.SFR
    else:
        eff, scheme_fn = net, scheme
    flags = _Flags()
    warnings = []
    if scheme_fn is ReuseScheme.STRICT_FFR:
        den = strict_ffr_denominator(eff, policy, flags)
        point = strict_ffr_closed_fast if use_fast else strict_ffr_closed_edge_ccdf
    else:
        den = sfr_denominator(eff, policy, flags)
        point = sfr_closed_fast if use_fast else sfr_closed_edge_ccdf
    if not den >= DEGENERATE_DENOMINATOR:
        raise DegenerateConditioning(f"P(SINR < T1) = {den:.3e}: no edge users at this FFR threshold")
    values = np.empty(len(grid))
    per_point = []
    for i, t in enumerate(grid.linear):
        pf = _Flags()
        pf.items.extend(flags.items)  # denominator flags apply everywhere
        try:
            if use_fast:
                values[i] = point(t, eff)
            else:
                values[i] = point(t, eff, policy, denominator=den, _flags=pf)
        except DegenerateConditioning:
            raise
        except HetnetFFRError as exc:
            values[i] = np.nan
            pf.items.append(f"failed:{exc}")
            warnings.append(f"T={grid.db[i]:g}dB: {exc}")
        per_point.append(";".join(dict.fromkeys(pf.items)))
        warnings.extend(x for x in pf.items if x.startswith("nonconverged"))
    return CcdfCurve(grid, values, scheme, AccessMode.CLOSED, tuple(dict.fromkeys(warnings)),
                     point_warnings=tuple(per_point))
