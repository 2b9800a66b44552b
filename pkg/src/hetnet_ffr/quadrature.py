"""Adaptive Gauss-Kronrod (7/15) quadrature on finite and semi-infinite ranges.

The engine (:func:`gk15`, :func:`adapt`) is written once and is callable both
from plain Python and from numba jitted kernels; integrands are looked up in
a small registry (see :func:`register_level`). Semi-infinite ranges are compactified
with ``x = lower + scale * (t / (1 - t))^m``, ``t`` in ``[0, 1)``. An integrand
decaying like ``x^-p`` becomes ``(1 - t)^(m (p - 1) - 1)`` near ``t = 1``, so slow
tails (``p < 2``) need ``m > 1`` to stay bounded; see :func:`tail_power`.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import USE_NUMBA, jitable
from .errors import EvaluationError

STATUS_OK = 0
STATUS_NONCONVERGED = 1
STATUS_NAN = 2

_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG7 = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

X15 = np.array([-x for x in _XGK[:7]] + [0.0] + list(_XGK[6::-1]))
WK15 = np.array(list(_WGK[:7]) + [_WGK[7]] + list(_WGK[6::-1]))
# Gauss weights sit on the odd Kronrod nodes; zero elsewhere.
WG15 = np.zeros(15)
WG15[[1, 3, 5]] = _WG7[:3]
WG15[7] = _WG7[3]
WG15[[13, 11, 9]] = _WG7[:3]

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny


# --- integrand registry ----------------------------------------------------
#
# Integrands are addressed by ``(level, kind)``. A level groups the integrands
# of one nesting depth into a single function ``g(kind, x, p)``; keeping
# levels apart lets a level-2 integrand call the engine at level 1 without the
# type inference seeing a recursive cycle. Under numba the level is a literal,
# resolved at compile time, so every compiled function stays cacheable.
# Level 0 is reserved for plain Python callables passed in ``p``.

_SCALAR = {}
_VECTOR = {0: lambda kind, x, p: p(x)}


def register_level(level, func, vectorized=False):
    """Make ``func(kind, x, p)`` reachable from the engine as ``level``.

    ``vectorized`` says whether the plain-Python form accepts an array ``x``.
    """
    _SCALAR[level] = func
    if vectorized:
        _VECTOR[level] = func
    else:
        def loop(kind, x, p, _f=func):
            return np.array([_f(kind, xi, p) for xi in x])

        _VECTOR[level] = loop


def eval_nodes(level, kind, x, p):
    """Evaluate a registered integrand on the node array ``x``."""
    return np.asarray(_VECTOR[level](kind, x, p), dtype=np.float64)


if USE_NUMBA:
    from numba import types
    from numba.extending import overload

    @overload(eval_nodes, prefer_literal=True)
    def _eval_nodes_jit(level, kind, x, p):
        if not isinstance(level, types.IntegerLiteral):
            return None
        f = _SCALAR[level.literal_value]

        def impl(level, kind, x, p):
            out = np.empty(x.size)
            for i in range(x.size):
                out[i] = f(kind, x[i], p)
            return out

        return impl


@jitable
def tail_power(p):
    """Smallest integer map power ``m`` that leaves an ``x^-p`` tail bounded and vanishing at ``t = 1``."""
    if p >= 2.0:
        return 1.0
    return float(math.ceil(2.0 / (p - 1.0) - 1e-12))


@jitable
def gk15(level, kind, p, a, b, semi, lower, scale):
    """One 15-point Kronrod rule on ``[a, b]`` with QUADPACK's error heuristic.

    ``semi`` is 0 for a finite range, else the power ``m`` of the
    semi-infinite map. Returns ``(estimate, error, all_finite)``.
    """
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    t = c + h * X15
    if semi == 1.0:
        s = 1.0 - t
        fx = eval_nodes(level, kind, lower + scale * t / s, p) * (scale / (s * s))
    elif semi > 0.0:
        s = 1.0 - t
        r = t / s
        fx = eval_nodes(level, kind, lower + scale * r ** semi, p) * (scale * semi * r ** (semi - 1.0) / (s * s))
    else:
        fx = eval_nodes(level, kind, t, p)
    finite = np.all(np.isfinite(fx))
    resk = np.sum(WK15 * fx)
    resg = np.sum(WG15 * fx)
    mean = 0.5 * resk
    ah = abs(h)
    resabs = ah * np.sum(WK15 * np.abs(fx))
    resasc = ah * np.sum(WK15 * np.abs(fx - mean))
    err = abs((resk - resg) * h)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _UFLOW / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    return resk * h, err, finite


@jitable
def adapt(level, kind, p, a, b, semi, lower, scale, rel_tol, abs_tol, max_sub):
    """Globally adaptive bisection. Returns ``(value, error, evaluations, status)``."""
    la = np.empty(max_sub)
    lb = np.empty(max_sub)
    lr = np.empty(max_sub)
    le = np.empty(max_sub)
    r, e, ok = gk15(level, kind, p, a, b, semi, lower, scale)
    nev = 15
    if not ok:
        return r, e, nev, STATUS_NAN
    la[0] = a
    lb[0] = b
    lr[0] = r
    le[0] = e
    n = 1
    total = r
    err = e
    status = STATUS_OK
    while err > max(abs_tol, rel_tol * abs(total)):
        if n >= max_sub:
            status = STATUS_NONCONVERGED
            break
        i = np.argmax(le[:n])
        ai = la[i]
        bi = lb[i]
        m = 0.5 * (ai + bi)
        if not (ai < m < bi):
            status = STATUS_NONCONVERGED
            break
        r1, e1, ok1 = gk15(level, kind, p, ai, m, semi, lower, scale)
        r2, e2, ok2 = gk15(level, kind, p, m, bi, semi, lower, scale)
        nev += 30
        if not (ok1 and ok2):
            return total, err, nev, STATUS_NAN
        lb[i] = m
        lr[i] = r1
        le[i] = e1
        la[n] = m
        lb[n] = bi
        lr[n] = r2
        le[n] = e2
        n += 1
        total = np.sum(lr[:n])
        err = np.sum(le[:n])
    return total, err, nev, status


@dataclass(frozen=True)
class QuadPolicy:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool = True


DEFAULT_POLICY = QuadPolicy()


def _vectorized(f):
    def g(x):
        try:
            out = np.asarray(f(x), dtype=float)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(f(xi)) for xi in x])

    return g


def _finish(value, err, nev, status, what):
    if status == STATUS_NAN:
        raise EvaluationError(f"non-finite integrand value while integrating {what}")
    return QuadResult(float(value), float(err), int(nev), status == STATUS_OK)


def integrate_finite(f, a, b, policy=DEFAULT_POLICY):
    """Integrate a vectorised ``f`` over ``[a, b]``."""
    out = adapt(0, 0, _vectorized(f), float(a), float(b), 0.0, 0.0, 1.0,
                policy.rel_tol, policy.abs_tol, policy.max_subdivisions)
    return _finish(*out, what=f"[{a}, {b}]")


def integrate_semi_inf(f, lower=0.0, policy=DEFAULT_POLICY, scale=1.0, tail_exponent=2.0):
    """Integrate ``f`` over ``[lower, inf)``.

    ``scale`` sets where the compactifying map puts ``t = 1/2``; the default
    of 1 is fine for integrands that decay on an O(1) length.
    ``tail_exponent`` is ``p`` for an ``x^-p`` tail (any value >= 2 for faster decay).
    """
    if not tail_exponent > 1.0:
        raise ValueError("the integrand tail must decay faster than 1/x")
    out = adapt(0, 0, _vectorized(f), 0.0, 1.0, tail_power(float(tail_exponent)), float(lower), float(scale),
                policy.rel_tol, policy.abs_tol, policy.max_subdivisions)
    return _finish(*out, what=f"[{lower}, inf)")


def integrate_2d_semi_inf(f, policy=DEFAULT_POLICY, outer_rel_tol=1e-7):
    """Nested integral of ``f(x, y)`` over the quadrant ``[0, inf)^2``.

    The inner (``x``) integral runs at ``policy``; the outer one at
    ``max(policy.rel_tol, outer_rel_tol)``. The returned error is the outer
    estimate plus the worst inner relative error applied to the total.
    """
    inner_rel = [0.0]
    converged = [True]

    def outer(y):
        vals = np.empty(y.size)
        for i, yi in enumerate(y):
            res = integrate_semi_inf(lambda x, yi=yi: f(x, np.full_like(x, yi)), 0.0, policy)
            vals[i] = res.value
            converged[0] &= res.converged
            if res.value != 0.0:
                inner_rel[0] = max(inner_rel[0], res.error_estimate / abs(res.value))
        return vals

    outer_policy = QuadPolicy(max(policy.rel_tol, outer_rel_tol), policy.abs_tol, policy.max_subdivisions)
    res = integrate_semi_inf(outer, 0.0, outer_policy)
    err = res.error_estimate + inner_rel[0] * abs(res.value)
    return QuadResult(res.value, err, res.evaluations, res.converged and converged[0])
