"""Two-tier open-access edge-user CCDFs (strict FFR and SFR).

A user is an edge user when neither tier clears its threshold. Given the
serving distances, every conditional term has the form
``eps(s) * exp(-A(s) w1 - B(s) w2)`` with ``w_k = pi lam_k r_k^2`` and
``s = w1 / w2``. Two evaluation methods are provided:

- ``"2d"``: nested quadrature over ``(w1, w2)``, truncated where the
  nearest-distance weight ``exp(-w1 - w2)`` drops below 1e-14;
- ``"ray"`` (default): the same double integral after integrating out the
  radial coordinate ``w2`` exactly along rays ``w1 = s w2``:
  ``int_0^inf eps(s) / (s (1 + A) + 1 + B)^2 ds``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .closed_access import DEGENERATE_DENOMINATOR, CcdfCurve, as_probability
from .errors import ConfigError, DegenerateConditioning, EvaluationError, HetnetFFRError
from .kernels import (epsilon_weights, psi_j, rho_j, rho_open_j, xi_open_j, xi_unit_j,
                      zeta_open_j, zeta_unit_j)
from .model import AccessMode, NetworkConfig, ReuseScheme, derived_ratios
from .quadrature import DEFAULT_POLICY, adapt, register_level

W_MAX = -math.log(1e-14)
METHODS = ("ray", "2d")

# parameter-vector layout shared by the jitted integrands
(_ALPHA, _KAPPA, _GAMMA, _T1, _T2, _DELTA, _BETA, _ETA, _T, _SFR, _RTOL, _ATOL, _MAXSUB,
 _W2, _STATUS, _PSI, _C1, _A1_DEN, _B2, _A1_NUM, _INNER_RTOL, _A_MIN, _B1_NUM_SCALE) = range(23)
_NPAR = 23

_RAY_DEN, _RAY_NUM, _INNER_DEN, _INNER_NUM = 0, 1, 2, 3


@dataclass(frozen=True)
class OpenScenario:
    """Two-tier network with open-access thresholds ``t1`` (macro) and ``t2`` (small cell).

    The conditioning events ``SIR1 >= t1`` and ``SIR2 >= t2`` are disjoint
    only when ``t1 * t2 >= 1``; below that the analytic forms no longer
    describe the edge population exactly.
    """

    net: NetworkConfig
    t1: float
    t2: float

    def __post_init__(self):
        if not isinstance(self.net, NetworkConfig):
            raise ConfigError("net must be a NetworkConfig", code="tier_type")
        if self.net.K != 2:
            raise ConfigError(f"open access needs exactly two tiers, got {self.net.K}", code="open_k")
        if self.net.noise != 0:
            raise ConfigError("open access is interference-limited; noise must be 0", code="open_noise")
        for name in ("t1", "t2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive and finite, got {v}", code="threshold_invalid")

    @property
    def kappa(self):
        return derived_ratios(self.net)[0][0]

    @property
    def gamma(self):
        return derived_ratios(self.net)[0][1]

    @property
    def events_disjoint(self):
        return self.t1 * self.t2 >= 1.0


# --- jitted integrands ---------------------------------------------------------------

@jit
def _note(p, st):
    if st > p[_STATUS]:
        p[_STATUS] = st


@jit
def _exit_terms(s, p, numer):
    """``(eps1, A1, B1, eps2, A2, B2)`` along the ray ``w1 = s w2``."""
    a = p[_ALPHA]
    rt = p[_RTOL]
    at = p[_ATOL]
    ms = int(p[_MAXSUB])
    q = p[_GAMMA] * (p[_KAPPA] * s) ** (0.5 * a)
    e1 = 0.0
    e2 = 0.0
    A1 = 0.0
    B1 = 0.0
    A2 = 0.0
    if q < 1e300:
        e1 = 1.0 / (p[_T1] * q + 1.0)
        zb = p[_T1] * q * (p[_B1_NUM_SCALE] if numer else 1.0)
        B1, _, st = rho_j(zb, a, rt, at, ms)
        _note(p, st)
        A1 = p[_A1_NUM] if numer else p[_A1_DEN]
    if q > 1e-300:
        e2 = 1.0 / (p[_T2] / q + 1.0)
        z2 = p[_T2] / q
        if not numer:
            A2, _, st = rho_j(p[_C1] * z2, a, rt, at, ms)
        elif p[_SFR] > 0.0:
            v, _, st = zeta_unit_j(p[_ETA] / p[_BETA] * p[_T], p[_ETA] * z2, a, rt, at, ms)
            A2 = 2.0 * v + p[_PSI]
        else:
            v, _, st = xi_unit_j(p[_T], z2, a, p[_DELTA], rt, at, ms)
            A2 = 2.0 * v
        _note(p, st)
    return e1, A1, B1, e2, A2, p[_B2]


@jit
def _open_f(kind, x, p):
    if kind == _RAY_DEN or kind == _RAY_NUM:
        e1, A1, B1, e2, A2, B2 = _exit_terms(x, p, kind == _RAY_NUM)
        d1 = x * (1.0 + A1) + 1.0 + B1
        d2 = x * (1.0 + A2) + 1.0 + B2
        return e1 / (d1 * d1) + e2 / (d2 * d2)
    w1 = x
    w2 = p[_W2]
    e1, A1, B1, e2, A2, B2 = _exit_terms(w1 / w2, p, kind == _INNER_NUM)
    out = 0.0
    if e1 > 0.0:
        out += e1 * math.exp(-(1.0 + A1) * w1 - (1.0 + B1) * w2)
    if e2 > 0.0:
        out += e2 * math.exp(-(1.0 + A2) * w1 - (1.0 + B2) * w2)
    return out


register_level(2, _open_f)


@jit
def _outer_f(kind, y, p):
    # The w1 decay rate is at least 1 + A_MIN, which is large at high
    # thresholds; geometric breakpoints keep the first panel resolved.
    q = p.copy()
    q[_W2] = y
    lo = 0.0
    hi = min(W_MAX, 1.0 / (1.0 + q[_A_MIN]))
    v = 0.0
    st = 0
    while lo < W_MAX:
        vi, _, _, sti = adapt(2, kind, q, lo, hi, 0.0, 0.0, 1.0, q[_INNER_RTOL], q[_ATOL], int(q[_MAXSUB]))
        v += vi
        st = max(st, sti)
        lo = hi
        hi = min(W_MAX, 2.0 * hi)
    _note(p, max(st, int(q[_STATUS])))
    return v


register_level(3, _outer_f)


@jit
def _ray_integral(kind, p, scale):
    v, err, _, st = adapt(2, kind, p, 0.0, 1.0, 1.0, 0.0, scale, p[_RTOL], p[_ATOL], int(p[_MAXSUB]))
    _note(p, st)
    return v


@jit
def _double_integral(kind, p, outer_rtol):
    v, err, _, st = adapt(3, kind, p, 0.0, W_MAX, 0.0, 0.0, 1.0, outer_rtol, p[_ATOL], int(p[_MAXSUB]))
    _note(p, st)
    return v


# --- parameter assembly --------------------------------------------------------------

def _params(scen, scheme, T, policy, printed_gn=False):
    net = scen.net
    kappa, gamma = scen.kappa, scen.gamma
    a = float(net.alpha)
    sfr = scheme is ReuseScheme.SFR
    eta = net.eta if sfr else 1.0
    beta = net.beta if sfr else 1.0
    p = np.zeros(_NPAR)
    p[[_ALPHA, _KAPPA, _GAMMA, _T1, _T2, _DELTA, _BETA, _ETA, _T]] = (
        a, kappa, gamma, scen.t1, scen.t2, net.delta, beta, eta, T)
    p[_SFR] = 1.0 if sfr else 0.0
    p[_RTOL], p[_ATOL], p[_MAXSUB] = policy.rel_tol, policy.abs_tol, policy.max_subdivisions
    p[_INNER_RTOL] = policy.rel_tol
    p[_C1] = eta
    # the published numerator drops gamma from the cross-tier kernel argument
    p[_B1_NUM_SCALE] = 1.0 / gamma if printed_gn else 1.0
    tol = (policy.rel_tol, policy.abs_tol, policy.max_subdivisions)
    p[_A1_DEN] = rho_j(eta * scen.t1, a, *tol)[0]
    p[_B2] = rho_j(scen.t2, a, *tol)[0]
    if T > 0:
        if sfr:
            p[_PSI] = 2.0 * kappa * psi_j(gamma * T / beta, a)
            p[_A1_NUM] = 2.0 * zeta_unit_j(eta / beta * T, eta * scen.t1, a, *tol)[0] + p[_PSI]
            floor = rho_j(eta / beta * T, a, *tol)[0] + p[_PSI]
        else:
            p[_A1_NUM] = 2.0 * xi_unit_j(T, scen.t1, a, float(net.delta), *tol)[0]
            floor = rho_j(T, a, *tol)[0] / net.delta
        # both numerator exponents are bounded below by the T1 -> 0 limit
        p[_A_MIN] = min(p[_A1_NUM], floor)
    return p


def _ray_scale(scen):
    # the rays where each exit weight is 1/2
    a = scen.net.alpha
    s1 = (1.0 / (scen.gamma * scen.t1)) ** (2.0 / a) / scen.kappa
    s2 = (scen.t2 / scen.gamma) ** (2.0 / a) / scen.kappa
    return math.sqrt(s1 * s2)


def _exit_mass(scen, scheme, T, policy, numer, method, outer_rel_tol, flags, printed_gn=False):
    p = _params(scen, scheme, T, policy, printed_gn)
    if method == "ray":
        v = _ray_integral(_RAY_NUM if numer else _RAY_DEN, p, _ray_scale(scen))
    elif method == "2d":
        v = _double_integral(_INNER_NUM if numer else _INNER_DEN, p, max(outer_rel_tol, policy.rel_tol))
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    st = int(p[_STATUS])
    if st == 2 or not math.isfinite(v):
        raise EvaluationError("non-finite integrand in open-access integral")
    if st == 1:
        flags.append("nonconverged:open_access")
    return v


def _scheme(scheme):
    scheme = ReuseScheme(scheme)
    if scheme is ReuseScheme.UNIVERSAL:
        raise ConfigError("open access supports strict_ffr and sfr; use sfr with beta=1 for universal",
                          code="scheme_invalid")
    return scheme


def open_denominator(scen, scheme, policy=DEFAULT_POLICY, method="ray", outer_rel_tol=1e-7, flags=None):
    """``P(SIR1 < T1, SIR2 < T2)``; independent of the FFR-band threshold."""
    scheme = _scheme(scheme)
    flags = [] if flags is None else flags
    return 1.0 - _exit_mass(scen, scheme, 0.0, policy, False, method, outer_rel_tol, flags)


def _first_term(T, scen, scheme, policy=DEFAULT_POLICY):
    net = scen.net
    a = float(net.alpha)
    tol = (policy.rel_tol, policy.abs_tol, policy.max_subdivisions)
    if scheme is ReuseScheme.SFR:
        eta, beta = net.eta, net.beta
        return 1.0 / (1.0 + rho_j(eta * T / beta, a, *tol)[0] + 2.0 * scen.kappa * psi_j(scen.gamma * T / beta, a))
    return 1.0 / (1.0 + rho_j(T, a, *tol)[0] / net.delta)


def open_edge_ccdf(T, scen, scheme, policy=DEFAULT_POLICY, method="ray", denominator=None,
                   outer_rel_tol=1e-7, flags=None, printed_gn=False):
    """``P(SIR_ffr > T | SIR1 < T1, SIR2 < T2)`` for an open-access edge user.

    ``printed_gn=True`` evaluates the published numerator, whose cross-tier
    kernel argument omits ``gamma``; it exists for the discrepancy report.
    """
    scheme = _scheme(scheme)
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"threshold must be positive and finite, got {T}")
    flags = [] if flags is None else flags
    if denominator is None:
        denominator = open_denominator(scen, scheme, policy, method, outer_rel_tol, flags)
    if not denominator >= DEGENERATE_DENOMINATOR:
        raise DegenerateConditioning(f"P(edge) = {denominator:.3e}: no open-access edge users")
    exit_mass = _exit_mass(scen, scheme, T, policy, True, method, outer_rel_tol, flags, printed_gn)
    num = _first_term(T, scen, scheme, policy) - exit_mass
    if printed_gn:
        return num / denominator
    return as_probability(num / denominator, "open-access conditional CCDF")


def strict_ffr_open_edge_ccdf(T, scen, policy=DEFAULT_POLICY, method="ray", denominator=None):
    return open_edge_ccdf(T, scen, ReuseScheme.STRICT_FFR, policy, method, denominator)


def sfr_open_edge_ccdf(T, scen, policy=DEFAULT_POLICY, method="ray", denominator=None):
    return open_edge_ccdf(T, scen, ReuseScheme.SFR, policy, method, denominator)


def open_ccdf_curve(scheme, scen, grid, policy=DEFAULT_POLICY, method="ray"):
    scheme = _scheme(scheme)
    flags = []
    if not scen.events_disjoint:
        flags.append("t1*t2<1: exit events overlap, analytic edge CCDF is approximate")
    den = open_denominator(scen, scheme, policy, method, flags=flags)
    if not den >= DEGENERATE_DENOMINATOR:
        raise DegenerateConditioning(f"P(edge) = {den:.3e}: no open-access edge users")
    values = np.empty(len(grid))
    warnings = list(flags)
    per_point = []
    for i, t in enumerate(grid.linear):
        pf = list(flags)  # curve-level flags apply to every point
        try:
            values[i] = open_edge_ccdf(t, scen, scheme, policy, method, den, flags=pf)
        except HetnetFFRError as exc:
            values[i] = np.nan
            pf.append(f"failed:{exc}")
            warnings.append(f"T={grid.db[i]:g}dB: {exc}")
        per_point.append(";".join(dict.fromkeys(pf)))
        warnings.extend(x for x in pf if x.startswith("nonconverged"))
    return CcdfCurve(grid, values, scheme, AccessMode.OPEN, tuple(dict.fromkeys(warnings)),
                     point_warnings=tuple(per_point))


# --- pointwise inner functions in physical distances ------------------------------

def _tols(policy):
    return policy.rel_tol, policy.abs_tol, policy.max_subdivisions


def _check_r(r1, r2):
    if not (r1 > 0 and r2 > 0):
        raise ValueError("distances must be positive")


def _inner(scen, scheme, r1, r2, T, policy):
    """``(exit1, exit2)`` conditional on the serving distances; ``T=None`` gives the denominator terms."""
    _check_r(r1, r2)
    net = scen.net
    lam1, lam2 = net.densities
    a = float(net.alpha)
    g = scen.gamma
    tol = _tols(policy)
    sfr = scheme is ReuseScheme.SFR
    eta = net.eta if sfr else 1.0
    beta = net.beta if sfr else 1.0
    e1, e2 = epsilon_weights(scen.t1, scen.t2, g, r1, r2, a)
    rho12 = rho_open_j(g * scen.t1, a, r1, r2, *tol)[0]
    rho22 = rho_open_j(scen.t2, a, r2, r2, *tol)[0]
    if T is None:
        x11 = rho_open_j(eta * scen.t1, a, r1, r1, *tol)[0]
        x21 = rho_open_j(eta * scen.t2 / g, a, r2, r1, *tol)[0]
        extra = 0.0
    elif sfr:
        x11 = zeta_open_j(T, scen.t1, a, beta, eta, r1, r1, *tol)[0]
        x21 = zeta_open_j(T, scen.t2 / g, a, beta, eta, r2, r1, *tol)[0]
        extra = scen.kappa * r1 * r1 * psi_j(g * T / beta, a)
    else:
        x11 = xi_open_j(T, scen.t1, a, float(net.delta), r1, r1, *tol)[0]
        x21 = xi_open_j(T, scen.t2 / g, a, float(net.delta), r2, r1, *tol)[0]
        extra = 0.0
    k = 2.0 * math.pi
    t1 = e1 * math.exp(-k * lam1 * (x11 + extra) - k * lam2 * rho12)
    t2 = e2 * math.exp(-k * lam1 * (x21 + extra) - k * lam2 * rho22)
    return t1, t2


def gd_strict(r1, r2, scen, policy=DEFAULT_POLICY):
    """Conditional probability that neither tier clears its threshold (strict FFR)."""
    t1, t2 = _inner(scen, ReuseScheme.STRICT_FFR, r1, r2, None, policy)
    return 1.0 - t1 - t2


def gn_strict(T, r1, r2, scen, policy=DEFAULT_POLICY):
    t1, t2 = _inner(scen, ReuseScheme.STRICT_FFR, r1, r2, T, policy)
    return t1 + t2


def fd_sfr(r1, r2, scen, policy=DEFAULT_POLICY):
    """SFR counterpart of :func:`gd_strict` (tier-1 interference scaled by eta)."""
    t1, t2 = _inner(scen, ReuseScheme.SFR, r1, r2, None, policy)
    return 1.0 - t1 - t2


def fn_sfr(T, r1, r2, scen, policy=DEFAULT_POLICY):
    t1, t2 = _inner(scen, ReuseScheme.SFR, r1, r2, T, policy)
    return t1 + t2
