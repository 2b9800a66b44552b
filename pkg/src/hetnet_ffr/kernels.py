"""Interference kernels: the normalised PGFL integrals inside every coverage expression.

All quadrature-backed kernels integrate over a unit-radius exclusion zone
(``u`` in ``[1, inf)``); radius-dependent variants rescale with ``x = r_b u``.
Integrands are written in the cancellation-free form (sums of non-negative
fractions) so the far tail keeps full relative precision.
"""

import math

import numpy as np

from ._accel import jit
from .errors import ConfigError, EvaluationError
from .quadrature import DEFAULT_POLICY, STATUS_NAN, QuadResult, adapt, register_level, tail_power


# --- level-1 integrands ----------------------------------------------------

K_RHO = 0     # p = [alpha]; 1 / (1 + u^(alpha/2)) on [z^(-2/alpha), inf)
K_RHO_UNIT = 1  # p = [alpha, z]
K_XI = 2      # p = [alpha, a, b, delta]
K_ZETA = 3    # p = [alpha, a, b]
K_LAPLACE = 4  # p = [A, c, alpha/2]; exp(-A w - c w^(alpha/2)), the noise-weighted Laplace integral


@jit
def _kernel_f(kind, u, p):
    if kind == K_RHO:
        return 1.0 / (1.0 + u ** (0.5 * p[0]))
    if kind == K_LAPLACE:
        return np.exp(-p[0] * u - p[1] * u ** p[2])
    ua = u ** (-p[0])
    a = p[1] * ua
    if kind == K_RHO_UNIT:
        return a / (1.0 + a) * u
    b = p[2] * ua
    if kind == K_XI:
        return (a / (1.0 + a) + b / ((1.0 + a) * (1.0 + b)) / p[3]) * u
    return (a + b + a * b) / ((1.0 + a) * (1.0 + b)) * u


register_level(1, _kernel_f, vectorized=True)


# --- jitted scalar kernels: return (value, error, status) ---------------------

@jit
def rho_j(z, alpha, rtol, atol, maxsub):
    if z <= 0.0:
        return 0.0, 0.0, 0
    e = 2.0 / alpha
    lower = z ** (-e)
    zf = z ** e
    p = np.array([alpha])
    v, err, _, st = adapt(1, K_RHO, p, 0.0, 1.0, tail_power(0.5 * alpha), lower, max(1.0, lower), rtol, atol / zf, maxsub)
    return zf * v, zf * err, st


@jit
def _unit_scale(c, alpha):
    return max(1.0, c ** (1.0 / alpha))


@jit
def rho_unit_j(z, alpha, rtol, atol, maxsub):
    """``int_1^inf (1 - 1/(1 + z u^-alpha)) u du`` (equals ``rho(z)/2``)."""
    if z <= 0.0:
        return 0.0, 0.0, 0
    p = np.array([alpha, z])
    v, err, _, st = adapt(1, K_RHO_UNIT, p, 0.0, 1.0, tail_power(alpha - 1.0), 1.0, _unit_scale(z, alpha), rtol, atol, maxsub)
    return v, err, st


@jit
def xi_unit_j(b_coef, a_coef, alpha, delta, rtol, atol, maxsub):
    """Strict-FFR joint kernel; ``a_coef`` is the common-band threshold, ``b_coef`` the FFR-band one."""
    if a_coef <= 0.0 and b_coef <= 0.0:
        return 0.0, 0.0, 0
    p = np.array([alpha, a_coef, b_coef, delta])
    sc = _unit_scale(max(a_coef, b_coef), alpha)
    v, err, _, st = adapt(1, K_XI, p, 0.0, 1.0, tail_power(alpha - 1.0), 1.0, sc, rtol, atol, maxsub)
    return v, err, st


@jit
def zeta_unit_j(b_coef, a_coef, alpha, rtol, atol, maxsub):
    """SFR joint kernel with effective thresholds already folded in."""
    if a_coef <= 0.0 and b_coef <= 0.0:
        return 0.0, 0.0, 0
    p = np.array([alpha, a_coef, b_coef])
    sc = _unit_scale(max(a_coef, b_coef), alpha)
    v, err, _, st = adapt(1, K_ZETA, p, 0.0, 1.0, tail_power(alpha - 1.0), 1.0, sc, rtol, atol, maxsub)
    return v, err, st


@jit
def laplace_j(A, c, alpha, rtol, atol, maxsub):
    """``int_0^inf exp(-A w - c w^(alpha/2)) dw``; exactly ``1/A`` when ``c = 0``."""
    if c <= 0.0:
        return 1.0 / A, 0.0, 0
    p = np.array([A, c, 0.5 * alpha])
    v, err, _, st = adapt(1, K_LAPLACE, p, 0.0, 1.0, 1.0, 0.0, 1.0 / A, rtol, atol, maxsub)
    return v, err, st


@jit
def rho_open_j(z, alpha, ra, rb, rtol, atol, maxsub):
    rb2 = rb * rb
    v, err, st = rho_unit_j(z * (ra / rb) ** alpha, alpha, rtol, atol / rb2, maxsub)
    return rb2 * v, rb2 * err, st


@jit
def xi_open_j(t, z, alpha, delta, ra, rb, rtol, atol, maxsub):
    rb2 = rb * rb
    v, err, st = xi_unit_j(t, z * (ra / rb) ** alpha, alpha, delta, rtol, atol / rb2, maxsub)
    return rb2 * v, rb2 * err, st


@jit
def zeta_open_j(t, z, alpha, beta, eta, ra, rb, rtol, atol, maxsub):
    rb2 = rb * rb
    v, err, st = zeta_unit_j(eta / beta * t, eta * z * (ra / rb) ** alpha, alpha, rtol, atol / rb2, maxsub)
    return rb2 * v, rb2 * err, st


@jit
def psi_j(z, alpha):
    return math.pi * z ** (2.0 / alpha) / (alpha * math.sin(2.0 * math.pi / alpha))


# --- public API -----------------------------------------------------------------

def _check_alpha(alpha):
    if not (math.isfinite(alpha) and alpha > 2):
        raise ConfigError(f"path-loss exponent must exceed 2, got {alpha}", code="alpha_le_2")


def _check_nonneg(**kw):
    for name, v in kw.items():
        if not (v >= 0 and math.isfinite(v)):
            raise ConfigError(f"{name} must be finite and >= 0, got {v}", code=f"{name}_invalid")


def _wrap(out, full, what):
    value, err, status = out
    if status == STATUS_NAN:
        raise EvaluationError(f"non-finite integrand in {what}")
    if full:
        return QuadResult(float(value), float(err), 0, status == 0)
    return float(value)


def _tols(policy):
    return policy.rel_tol, policy.abs_tol, policy.max_subdivisions


def rho(z, alpha, policy=DEFAULT_POLICY, full=False):
    """``z^(2/alpha) int_{z^(-2/alpha)}^inf du / (1 + u^(alpha/2))`` by quadrature."""
    _check_alpha(alpha)
    _check_nonneg(z=z)
    return _wrap(rho_j(float(z), float(alpha), *_tols(policy)), full, "rho")


def rho_alpha4(z):
    """Closed form of ``rho`` at ``alpha = 4``: ``sqrt(z) * arctan(sqrt(z))``."""
    s = np.sqrt(z)
    return s * np.arctan(s)


def psi(z, alpha):
    """Cross-tier kernel ``csc(2 pi / alpha) * pi * z^(2/alpha) / alpha``."""
    _check_alpha(alpha)
    _check_nonneg(z=z)
    return float(psi_j(float(z), float(alpha)))


def xi_closed(T, T1, alpha, delta, policy=DEFAULT_POLICY, full=False):
    """Unit-radius Strict-FFR joint kernel.

    ``int_1^inf [1 - 1/(1 + T1 u^-a) * (1 - (1 - 1/(1 + T u^-a)) / delta)] u du``.
    """
    _check_alpha(alpha)
    _check_nonneg(T=T, T1=T1)
    return _wrap(xi_unit_j(float(T), float(T1), float(alpha), float(delta), *_tols(policy)), full, "xi")


def zeta_closed(T, T1, alpha, beta, eta, policy=DEFAULT_POLICY, full=False):
    """Unit-radius SFR joint kernel with thresholds ``eta*T1`` and ``(eta/beta)*T``."""
    _check_alpha(alpha)
    _check_nonneg(T=T, T1=T1)
    out = zeta_unit_j(eta / beta * float(T), eta * float(T1), float(alpha), *_tols(policy))
    return _wrap(out, full, "zeta")


def rho_open(z, alpha, ra, rb, policy=DEFAULT_POLICY, full=False):
    """``int_{rb}^inf (1 - 1/(1 + z ra^a x^-a)) x dx``; carries units of area."""
    _check_alpha(alpha)
    _check_nonneg(z=z)
    return _wrap(rho_open_j(float(z), float(alpha), float(ra), float(rb), *_tols(policy)), full, "rho_open")


def xi_open(T, z, alpha, delta, ra, rb, policy=DEFAULT_POLICY, full=False):
    _check_alpha(alpha)
    _check_nonneg(T=T, z=z)
    out = xi_open_j(float(T), float(z), float(alpha), float(delta), float(ra), float(rb), *_tols(policy))
    return _wrap(out, full, "xi_open")


def zeta_open(T, z, alpha, beta, eta, ra, rb, policy=DEFAULT_POLICY, full=False):
    """SFR open-access joint kernel, evaluated from its integral definition."""
    _check_alpha(alpha)
    _check_nonneg(T=T, z=z)
    out = zeta_open_j(float(T), float(z), float(alpha), float(beta), float(eta), float(ra), float(rb),
                      *_tols(policy))
    return _wrap(out, full, "zeta_open")


def epsilon_weights(T1, T2, gamma, r1, r2, alpha):
    """Probability weights of the two open-access exit events, ``(eps1, eps2)``."""
    q = gamma * (r1 / r2) ** alpha
    return 1.0 / (T1 * q + 1.0), 1.0 / (T2 / q + 1.0)


# --- partial-fraction and printed closed forms --------------------------------

def _near(a, b):
    return abs(a - b) < 1e-6 * max(abs(a), abs(b))


def xi_partial_fraction(T, T1, alpha, delta, rho_fn=None):
    """``xi`` through the partial-fraction split, in terms of ``rho`` only.

    Returns ``None`` where the split is singular (``T ~= T1``).
    """
    if _near(T, T1):
        return None
    r = rho_fn or (lambda z: rho(z, alpha))
    return 0.5 * r(T1) + T * (r(T1) - r(T)) / (2.0 * delta * (T1 - T))


def zeta_partial_fraction(T, T1, alpha, beta, eta, rho_fn=None):
    """``zeta`` as ``(b rho(b) - a rho(a)) / (2 (b - a))``; ``None`` when singular."""
    a = eta * T1
    b = eta / beta * T
    if a == 0.0 or b == 0.0:
        r = rho_fn or (lambda z: rho(z, alpha))
        return 0.5 * r(a + b)
    if _near(a, b):
        return None
    r = rho_fn or (lambda z: rho(z, alpha))
    return (b * r(b) - a * r(a)) / (2.0 * (b - a))


def xi_alpha4(T, T1, delta):
    """Closed ``xi`` at ``alpha = 4``; falls back to quadrature near ``T = T1``."""
    v = xi_partial_fraction(T, T1, 4.0, delta, rho_fn=rho_alpha4)
    return xi_closed(T, T1, 4.0, delta) if v is None else v


def zeta_alpha4(T, T1, beta, eta):
    v = zeta_partial_fraction(T, T1, 4.0, beta, eta, rho_fn=rho_alpha4)
    return zeta_closed(T, T1, 4.0, beta, eta) if v is None else v


def xi_alpha4_printed(T, T1, delta):
    """The published alpha=4 expression for ``xi``, kept for the discrepancy report."""
    r = rho_alpha4
    return (T * r(T) - r(T1) * (T1 * delta - T * (1.0 + delta))) / (4.0 * delta * (T1 - T))


def zeta_alpha4_printed(T, T1, beta, eta):
    """The published alpha=4 expression for ``zeta``, kept for the discrepancy report."""
    d = T - T1 * beta
    t1 = eta ** 1.5 * T * beta / (4.0 * math.sqrt(T1) * d)
    t2 = eta * beta * T ** 3 * (2.0 * math.atan(math.sqrt(beta / (eta * T))) + math.pi) / d
    t3 = eta * T ** 1.5 * T1 ** 1.5 * beta ** 2.5 * (2.0 * math.atan(1.0 / math.sqrt(eta * T1)) - math.pi) / d
    return t1 - t2 + t3


def zeta_open_shortcut_printed(y, z, alpha, ra, rb):
    """Published open-access shortcut ``(y rho_ab(y) + z rho_ab(z)) / (2 (y - z))``."""
    return (y * rho_open(y, alpha, ra, rb) + z * rho_open(z, alpha, ra, rb)) / (2.0 * (y - z))
