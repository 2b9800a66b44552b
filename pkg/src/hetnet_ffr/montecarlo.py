"""Poisson point process Monte Carlo for the edge-user CCDFs.

Only distances to the typical user at the origin matter, so each tier is
drawn as squared distances ``d = r^2`` in nested annular shells:
shell 0 covers ``[0, R0]`` and shell ``j >= 1`` covers ``[R0 2^(j-1), R0 2^j]``,
with ``R0 = sqrt(1000 / (pi lam_min))``. Every (batch, tier, shell, purpose)
has its own random stream, so a run with a larger region reuses exactly the
points of the smaller one, and results never depend on the worker count.

Semantics follow the conditioning arguments behind the analytic results:

- common band: nearest tier-1 AP serves; SINR uses common fading ``g``;
- FFR band, fresh fading ``g_hat`` at the same tier-1 positions;
  strict FFR keeps each tier-1 interferer with probability ``1/delta``;
- SFR (and universal, i.e. SFR with ``beta = 1``): FFR-band interference
  ``eta P1 I1_hat + sum_k Pk Ik_hat``. The tier-k (k >= 2) FFR-band
  interferers come from an independent copy of the tier unless
  ``shared_cross_tier`` is set; the analytic forms factor the two bands'
  cross-tier interference as independent.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._accel import USE_NUMBA, jit
from .closed_access import CcdfCurve
from .errors import ConfigError, GridMismatch, InsufficientConditioning
from .model import AccessMode, NetworkConfig, ReuseScheme, ThresholdGrid

THREADS_ENV = "HETNET_FFR_THREADS"
POINTS_PER_UNIT = 1000.0
MIN_EXPECTED_POINTS = 20.0

# random stream purposes
_P_BASE, _P_HAT, _P_THIN, _P_INDEP = 0, 1, 2, 3


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.

    ``drops`` counts conditioned (edge) samples; ``max_attempts`` caps the
    number of realizations (default ``100 * drops``).
    """

    drops: int = 200_000
    seed: int = 0
    region_radius: float | None = None
    max_attempts: int | None = None
    batch: int = 128
    shared_cross_tier: bool = False
    workers: int | None = None

    def __post_init__(self):
        if self.drops < 1:
            raise ConfigError("drops must be >= 1", code="drops_invalid")
        if self.batch < 1:
            raise ConfigError("batch must be >= 1", code="batch_invalid")
        if self.region_radius is not None and not (self.region_radius > 0 and math.isfinite(self.region_radius)):
            raise ConfigError("region_radius must be positive", code="radius_invalid")
        if self.max_attempts is not None and self.max_attempts < 1:
            raise ConfigError("max_attempts must be >= 1", code="attempts_invalid")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits", code="seed_invalid")

    @property
    def attempts_cap(self):
        return self.max_attempts if self.max_attempts is not None else 100 * self.drops


@dataclass(frozen=True)
class DropOutcome:
    """One realization seen from the typical user."""

    common_sinr: float
    edge_sinr: float | None
    tier_distances: tuple
    g_serving: float
    g_hat_serving: float


@dataclass(frozen=True)
class EmpiricalCcdf:
    grid: ThresholdGrid
    values: np.ndarray
    stderr: np.ndarray
    n_conditioned: int
    n_total: int
    mean_rate: float
    rate_stderr: float
    scheme: ReuseScheme
    access: AccessMode
    samples: np.ndarray = field(repr=False)
    warnings: tuple = ()

    @property
    def conditioning_fraction(self):
        return self.n_conditioned / self.n_total if self.n_total else float("nan")


# --- point process helpers -------------------------------------------------------------

def sample_ppp(lam, radius, rng):
    """Homogeneous PPP of intensity ``lam`` on the disc of ``radius``; returns ``(n, 2)``."""
    if not (lam > 0 and radius > 0):
        raise ValueError("density and radius must be positive")
    n = rng.poisson(lam * math.pi * radius * radius)
    r = radius * np.sqrt(rng.random(n))
    th = 2.0 * math.pi * rng.random(n)
    return np.column_stack((r * np.cos(th), r * np.sin(th)))


def base_radius(densities):
    return math.sqrt(POINTS_PER_UNIT / (math.pi * float(np.min(densities))))


def _shell_bounds(r0, radius):
    """Squared-radius bounds of the shells needed to cover ``radius``."""
    out = [(0.0, r0 * r0)]
    outer = r0
    while outer < radius * (1.0 - 1e-12):
        out.append((outer * outer, 4.0 * outer * outer))
        outer *= 2.0
    return out


def _rng(seed, key):
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence(seed, spawn_key=key)))


def _worker_count(mc):
    cap = os.environ.get(THREADS_ENV)
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    if mc.workers is not None:
        n = min(n, max(1, int(mc.workers)))
    return n


# --- reductions (numba kernels and their numpy twins) --------------------------------

@jit
def _nearest_nb(d, starts, counts, r2max, shell, best_d, best_i, best_s):
    for i in range(starts.size):
        s = starts[i]
        for j in range(s, s + counts[i]):
            if d[j] <= r2max and d[j] < best_d[i]:
                best_d[i] = d[j]
                best_i[i] = j
                best_s[i] = shell


@jit
def _accumulate_nb(d, g, gh, u, starts, counts, excl, half_alpha, p_keep, r2max, out):
    hat = gh.size > 0
    thin = u.size > 0
    for i in range(starts.size):
        s = starts[i]
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        for j in range(s, s + counts[i]):
            dj = d[j]
            if j == excl[i] or dj > r2max:
                continue
            if half_alpha == 2.0:
                pl = 1.0 / (dj * dj)
            else:
                pl = dj ** (-half_alpha)
            if g.size > 0:
                a0 += g[j] * pl
            if hat:
                v = gh[j] * pl
                a1 += v
                if thin and u[j] < p_keep:
                    a2 += v
        out[i, 0] += a0
        out[i, 1] += a1
        out[i, 2] += a2


def _segment_sum(x, starts, counts):
    if x.size == 0:
        return np.zeros(starts.size)
    xs = np.append(x, 0.0)
    s = np.add.reduceat(xs, np.minimum(starts, x.size))
    return np.where(counts > 0, s, 0.0)


def _nearest_np(d, starts, counts, r2max, shell, best_d, best_i, best_s):
    if d.size == 0:
        return
    dm = np.where(d <= r2max, d, np.inf)
    seg_min = np.minimum.reduceat(np.append(dm, np.inf), np.minimum(starts, d.size))
    seg_min = np.where(counts > 0, seg_min, np.inf)
    seg = np.repeat(np.arange(starts.size), counts)
    hit = np.flatnonzero(dm == seg_min[seg])
    rows, first = np.unique(seg[hit], return_index=True)
    idx = hit[first]
    better = dm[idx] < best_d[rows]
    rows, idx = rows[better], idx[better]
    best_d[rows] = dm[idx]
    best_i[rows] = idx
    best_s[rows] = shell


def _accumulate_np(d, g, gh, u, starts, counts, excl, half_alpha, p_keep, r2max, out):
    if d.size == 0:
        return
    pl = 1.0 / (d * d) if half_alpha == 2.0 else d ** (-half_alpha)
    pl[d > r2max] = 0.0
    ex = excl[excl >= 0]
    pl[ex] = 0.0
    if g.size:
        out[:, 0] += _segment_sum(g * pl, starts, counts)
    if gh.size:
        v = gh * pl
        out[:, 1] += _segment_sum(v, starts, counts)
        if u.size:
            out[:, 2] += _segment_sum(np.where(u < p_keep, v, 0.0), starts, counts)


if USE_NUMBA:
    _nearest, _accumulate = _nearest_nb, _accumulate_nb
else:
    _nearest, _accumulate = _nearest_np, _accumulate_np

_EMPTY = np.empty(0)


# --- realization batches ---------------------------------------------------------------

class _Geometry:
    def __init__(self, densities, mc):
        self.r0 = base_radius(densities)
        self.radius = mc.region_radius if mc.region_radius is not None else self.r0
        if np.min(densities) * math.pi * self.radius ** 2 < MIN_EXPECTED_POINTS:
            raise ConfigError(
                f"region radius {self.radius:g} holds fewer than {MIN_EXPECTED_POINTS:g} expected points "
                "for the sparsest tier", code="radius_too_small")
        self.r2max = self.radius ** 2
        self.shells = _shell_bounds(self.r0, self.radius)


class _Shell:
    __slots__ = ("d", "g", "gh", "u", "starts", "counts")


def _draw_shell(seed, b, k, j, purpose, lam, lo, hi, n_real, mu, hat, thin):
    rng = _rng(seed, (b, k, j, purpose))
    sh = _Shell()
    sh.counts = rng.poisson(lam * math.pi * (hi - lo), n_real).astype(np.int64)
    sh.starts = np.zeros(n_real, dtype=np.int64)
    np.cumsum(sh.counts[:-1], out=sh.starts[1:])
    n = int(sh.counts.sum())
    sh.d = rng.random(n)
    sh.d *= hi - lo
    sh.d += lo
    sh.g = _exponential(rng, n, mu)
    sh.gh = _exponential(_rng(seed, (b, k, j, _P_HAT)), n, mu) if hat else _EMPTY
    sh.u = _rng(seed, (b, k, j, _P_THIN)).random(n) if thin else _EMPTY
    return sh


def _exponential(rng, n, mu):
    """Rate-``mu`` exponential fading draws."""
    x = rng.standard_exponential(n)
    if mu != 1.0:
        x /= mu
    return x


class _Tier:
    """All shells of one tier in a batch, plus the nearest-point bookkeeping."""

    def __init__(self, ctx, b, k, hat, thin, purpose=_P_BASE):
        lam = ctx.densities[k]
        n = ctx.batch
        self.shells = [
            _draw_shell(ctx.seed, b, k, j, purpose, lam, lo, hi, n, ctx.mu, hat, thin)
            for j, (lo, hi) in enumerate(ctx.geom.shells)
        ]
        self.ctx = ctx

    def nearest(self):
        n = self.ctx.batch
        best_d = np.full(n, np.inf)
        best_i = np.full(n, -1, dtype=np.int64)
        best_s = np.full(n, -1, dtype=np.int64)
        for j, sh in enumerate(self.shells):
            _nearest(sh.d, sh.starts, sh.counts, self.ctx.geom.r2max, j, best_d, best_i, best_s)
        g = np.zeros(n)
        gh = np.zeros(n)
        for j, sh in enumerate(self.shells):
            m = best_s == j
            g[m] = sh.g[best_i[m]]
            if sh.gh.size:
                gh[m] = sh.gh[best_i[m]]
        self.best_i, self.best_s = best_i, best_s
        return best_d, g, gh

    def sums(self, p_keep=1.0, exclude=False):
        """Per-realization ``(sum g pl, sum g_hat pl, sum g_hat pl [kept])``."""
        n = self.ctx.batch
        out = np.zeros((n, 3))
        none = np.full(n, -1, dtype=np.int64)
        for j, sh in enumerate(self.shells):
            excl = np.where(self.best_s == j, self.best_i, -1) if exclude else none
            _accumulate(sh.d, sh.g, sh.gh, sh.u, sh.starts, sh.counts, excl,
                        self.ctx.half_alpha, p_keep, self.ctx.geom.r2max, out)
        return out


class _Context:
    def __init__(self, net, mc, scheme):
        self.net = net
        self.mc = mc
        self.scheme = scheme
        self.seed = mc.seed
        self.batch = mc.batch
        self.mu = net.mu
        self.half_alpha = 0.5 * float(net.alpha)
        self.densities = net.densities
        self.powers = net.powers
        self.geom = _Geometry(self.densities, mc)
        sfr_like = scheme is not ReuseScheme.STRICT_FFR
        self.eta = net.eta if scheme is ReuseScheme.SFR else 1.0
        self.beta = net.beta if scheme is ReuseScheme.SFR else 1.0
        self.cross_hat_shared = sfr_like and mc.shared_cross_tier
        self.cross_hat_indep = sfr_like and not mc.shared_cross_tier


def _indep_hat(ctx, b, k):
    """FFR-band interference (unit power) of an independent copy of tier ``k``."""
    return _Tier(ctx, b, k, hat=False, thin=False, purpose=_P_INDEP).sums()[:, 0]


def _closed_batch(ctx, b):
    net = ctx.net
    P = ctx.powers
    strict = ctx.scheme is ReuseScheme.STRICT_FFR
    t1 = _Tier(ctx, b, 0, hat=True, thin=strict)
    d1, g1, gh1 = t1.nearest()
    s1 = t1.sums(p_keep=1.0 / net.delta, exclude=True)
    pl1 = np.where(np.isfinite(d1), d1, np.inf) ** (-ctx.half_alpha)
    common_i = ctx.eta * P[0] * s1[:, 0]
    ffr_i = P[0] * (s1[:, 2] if strict else ctx.eta * s1[:, 1])
    for k in range(1, net.K):
        sk = _Tier(ctx, b, k, hat=ctx.cross_hat_shared, thin=False).sums()
        common_i = common_i + P[k] * sk[:, 0]
        if ctx.cross_hat_shared:
            ffr_i = ffr_i + P[k] * sk[:, 1]
        elif ctx.cross_hat_indep:
            ffr_i = ffr_i + P[k] * _indep_hat(ctx, b, k)
    common = P[0] * g1 * pl1 / (net.noise + common_i)
    edge = ctx.beta * P[0] * gh1 * pl1 / (net.noise + ffr_i)
    valid = t1.best_i >= 0
    return common, edge, valid, (d1,), g1, gh1


def _open_batch(ctx, b, t1_open, t2_open):
    net = ctx.net
    P = ctx.powers
    strict = ctx.scheme is ReuseScheme.STRICT_FFR
    tr1 = _Tier(ctx, b, 0, hat=True, thin=strict)
    d1, g1, gh1 = tr1.nearest()
    s1 = tr1.sums(p_keep=1.0 / net.delta, exclude=True)
    tr2 = _Tier(ctx, b, 1, hat=ctx.cross_hat_shared, thin=False)
    d2, g2, _ = tr2.nearest()
    s2 = tr2.sums(exclude=True)
    S1 = P[0] * g1 * d1 ** (-ctx.half_alpha)
    S2 = P[1] * g2 * d2 ** (-ctx.half_alpha)
    ibar = ctx.eta * P[0] * s1[:, 0] + P[1] * s2[:, 0]
    sir1 = S1 / (ibar + S2)
    sir2 = S2 / (ibar + S1)
    if strict:
        ffr_i = P[0] * s1[:, 2]
    else:
        if ctx.cross_hat_shared:
            # the nearest tier-2 AP also interferes on the FFR band
            cross = tr2.sums()[:, 1]
        else:
            cross = _indep_hat(ctx, b, 1)
        ffr_i = ctx.eta * P[0] * s1[:, 1] + P[1] * cross
    edge = ctx.beta * P[0] * gh1 * d1 ** (-ctx.half_alpha) / ffr_i
    valid = (tr1.best_i >= 0) & (tr2.best_i >= 0)
    cond = (sir1 < t1_open) & (sir2 < t2_open)
    return sir1, sir2, edge, valid, cond, (d1, d2), g1, gh1


# --- driver ------------------------------------------------------------------------------

def _run(batch_fn, mc):
    """Collect conditioned samples batch by batch, in batch order."""
    workers = _worker_count(mc)
    cap = mc.attempts_cap
    chunks = []
    n_cond = 0
    n_total = 0
    b = 0
    done = False
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while not done and n_total < cap:
            wave = list(pool.map(batch_fn, range(b, b + workers)))
            b += workers
            for cond, edge in wave:
                take = min(cond.size, cap - n_total)
                cond, edge = cond[:take], edge[:take]
                idx = np.flatnonzero(cond)
                need = mc.drops - n_cond
                if idx.size >= need:
                    idx = idx[:need]
                    n_total += int(idx[-1]) + 1 if need > 0 else 0
                    done = True
                else:
                    n_total += take
                chunks.append(edge[idx])
                n_cond += idx.size
                if done or n_total >= cap:
                    done = True
                    break
    samples = np.concatenate(chunks) if chunks else np.empty(0)
    warnings = []
    if n_cond < mc.drops:
        if n_cond < 0.01 * cap:
            raise InsufficientConditioning(
                f"only {n_cond} of {n_total} realizations met the edge condition "
                f"(need at least {0.01 * cap:.0f}); the FFR threshold may be too low")
        warnings.append(f"max_attempts reached with {n_cond} of {mc.drops} conditioned drops")
    return samples, n_cond, n_total, tuple(warnings)


def _empirical(samples, n_cond, n_total, grid, scheme, access, warnings):
    s = np.sort(samples)
    n = s.size
    above = n - np.searchsorted(s, grid.linear, side="right")
    v = above / n
    se = np.sqrt(v * (1.0 - v) / n)
    rates = np.log1p(samples)
    rate_se = float(rates.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return EmpiricalCcdf(grid, v, se, int(n_cond), int(n_total), float(rates.mean()), rate_se,
                         scheme, access, samples, warnings)


def simulate_closed_access(net, scheme, mc, grid, edge_only=True):
    """Empirical edge CCDF under closed access.

    With ``edge_only=False`` (universal reuse only) every realization
    contributes its common-band SINR, giving the unconditional coverage.
    """
    scheme = ReuseScheme(scheme)
    if not isinstance(net, NetworkConfig):
        raise TypeError("net must be a NetworkConfig")
    if not edge_only and scheme is not ReuseScheme.UNIVERSAL:
        raise ConfigError("unconditional sampling is defined for universal reuse only", code="scheme_invalid")
    ctx = _Context(net, mc, scheme)
    t1 = net.t1

    def batch(b):
        common, edge, valid, *_ = _closed_batch(ctx, b)
        if edge_only:
            return valid & (common < t1), edge
        return valid, common

    samples, n_cond, n_total, warns = _run(batch, mc)
    return _empirical(samples, n_cond, n_total, grid, scheme, AccessMode.CLOSED, warns)


def simulate_open_access(scen, scheme, mc, grid):
    """Empirical open-access edge CCDF (edge: ``SIR1 < t1`` and ``SIR2 < t2``)."""
    scheme = ReuseScheme(scheme)
    if scheme is ReuseScheme.UNIVERSAL:
        raise ConfigError("open access supports strict_ffr and sfr", code="scheme_invalid")
    ctx = _Context(scen.net, mc, scheme)

    def batch(b):
        _, _, edge, valid, cond, *_ = _open_batch(ctx, b, scen.t1, scen.t2)
        return valid & cond, edge

    samples, n_cond, n_total, warns = _run(batch, mc)
    return _empirical(samples, n_cond, n_total, grid, scheme, AccessMode.OPEN, warns)


def draw_outcomes(net, scheme, mc, count=10):
    """The first ``count`` closed-access realizations as :class:`DropOutcome` records."""
    scheme = ReuseScheme(scheme)
    ctx = _Context(net, mc, scheme)
    out = []
    b = 0
    while len(out) < count:
        common, edge, valid, dists, g1, gh1 = _closed_batch(ctx, b)
        for i in np.flatnonzero(valid):
            cond = common[i] < net.t1
            out.append(DropOutcome(float(common[i]), float(edge[i]) if cond else None,
                                   tuple(float(np.sqrt(d[i])) for d in dists), float(g1[i]), float(gh1[i])))
            if len(out) == count:
                break
        b += 1
    return out


# --- comparison ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveComparison:
    max_abs_diff: float
    abs_diff: np.ndarray
    z_scores: np.ndarray
    frac_within_3se: float
    n_conditioned: int

    def passed(self, tol):
        return bool(self.max_abs_diff <= tol)


def compare_curves(analytic, empirical):
    """Max deviation, per-point z-scores and the fraction within three standard errors.

    The standard error at each point is the larger of the empirical one and
    the binomial error implied by the analytic value, floored at ``1/n`` so
    empirical values of exactly 0 or 1 do not give infinite z-scores.
    """
    if isinstance(analytic, CcdfCurve):
        a_grid, a_vals = analytic.grid, analytic.values
    else:
        a_grid, a_vals = analytic
    if not a_grid.same_as(empirical.grid):
        raise GridMismatch("analytic and empirical curves use different threshold grids")
    a = np.asarray(a_vals, dtype=float)
    e = empirical.values
    n = max(empirical.n_conditioned, 1)
    diff = np.abs(a - e)
    pa = np.clip(a, 0.0, 1.0)
    se = np.maximum(np.maximum(empirical.stderr, np.sqrt(pa * (1.0 - pa) / n)), 1.0 / n)
    z = (e - a) / se
    return CurveComparison(float(np.nanmax(diff)), diff, z, float(np.mean(np.abs(z) <= 3.0)),
                           empirical.n_conditioned)
