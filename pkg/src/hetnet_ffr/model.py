"""Scenario data model: tiers, network parameters, threshold grids."""

from dataclasses import dataclass, field, replace
from enum import Enum
import math

import numpy as np

from .errors import ConfigError


class ReuseScheme(str, Enum):
    UNIVERSAL = "universal"
    STRICT_FFR = "strict_ffr"
    SFR = "sfr"


class AccessMode(str, Enum):
    CLOSED = "closed"
    OPEN = "open"


def _positive_finite(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}", code=f"{name}_invalid")


@dataclass(frozen=True)
class TierConfig:
    """One tier of access points.

    Attributes
    ----------
    density : float
        Access points per unit area.
    power : float
        Transmit power, linear units.
    ffr_threshold : float
        FFR threshold of the tier, linear SINR.
    """

    density: float
    power: float
    ffr_threshold: float = 1.0

    def __post_init__(self):
        _positive_finite("density", self.density)
        _positive_finite("power", self.power)
        _positive_finite("ffr_threshold", self.ffr_threshold)

    @classmethod
    def from_db(cls, density, power, ffr_threshold_db):
        return cls(float(density), float(power), db_to_linear(ffr_threshold_db))


@dataclass(frozen=True)
class NetworkConfig:
    """A K-tier downlink. Tier 1 (index 0) is the FFR-managed macro tier.

    Fading is exponential with *rate* ``mu`` (mean ``1/mu``).
    """

    tiers: tuple
    alpha: float = 4.0
    noise: float = 0.0
    delta: int = 1
    beta: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if len(self.tiers) < 1:
            raise ConfigError("at least one tier is required", code="no_tiers")
        for t in self.tiers:
            if not isinstance(t, TierConfig):
                raise ConfigError(f"tiers must be TierConfig instances, got {type(t).__name__}", code="tier_type")
        if not (math.isfinite(self.alpha) and self.alpha > 2):
            raise ConfigError(f"path-loss exponent must exceed 2, got {self.alpha}", code="alpha_le_2")
        if not (math.isfinite(self.noise) and self.noise >= 0):
            raise ConfigError(f"noise power must be >= 0, got {self.noise}", code="noise_invalid")
        if int(self.delta) != self.delta or self.delta < 1:
            raise ConfigError(f"reuse factor must be an integer >= 1, got {self.delta}", code="delta_invalid")
        object.__setattr__(self, "delta", int(self.delta))
        if not (math.isfinite(self.beta) and self.beta >= 1):
            raise ConfigError(f"SFR power factor must be >= 1, got {self.beta}", code="beta_invalid")
        _positive_finite("mu", self.mu)

    @property
    def K(self):
        return len(self.tiers)

    @property
    def eta(self):
        return eta(self.delta, self.beta)

    @property
    def t1(self):
        return self.tiers[0].ffr_threshold

    @property
    def densities(self):
        return np.array([t.density for t in self.tiers])

    @property
    def powers(self):
        return np.array([t.power for t in self.tiers])

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class ThresholdGrid:
    """Evenly spaced SINR thresholds in dB, ``start_db`` to ``stop_db`` inclusive."""

    start_db: float
    stop_db: float
    step_db: float
    db: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.start_db) and math.isfinite(self.stop_db) and self.start_db < self.stop_db):
            raise ConfigError("grid requires start_db < stop_db", code="grid_invalid")
        if not (math.isfinite(self.step_db) and self.step_db > 0):
            raise ConfigError("grid requires step_db > 0", code="grid_invalid")
        n = int(math.floor((self.stop_db - self.start_db) / self.step_db + 1e-9)) + 1
        values = self.start_db + self.step_db * np.arange(n)
        values.setflags(write=False)
        object.__setattr__(self, "db", values)

    @property
    def linear(self):
        return db_to_linear(self.db)

    def __len__(self):
        return self.db.size

    def same_as(self, other):
        return len(self) == len(other) and np.allclose(self.db, other.db, rtol=0, atol=1e-12)


def eta(delta, beta):
    """Effective SFR interference scaling ``(delta - 1 + beta) / delta``."""
    if delta < 1:
        raise ConfigError(f"reuse factor must be >= 1, got {delta}", code="delta_invalid")
    if beta < 1:
        raise ConfigError(f"SFR power factor must be >= 1, got {beta}", code="beta_invalid")
    return (delta - 1.0 + beta) / delta


def derived_ratios(net):
    """``[(kappa_k, gamma_k)]`` for tiers 2..K relative to tier 1."""
    lam1 = net.tiers[0].density
    p1 = net.tiers[0].power
    return [(t.density / lam1, t.power / p1) for t in net.tiers[1:]]


def db_to_linear(x_db):
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0) if np.ndim(x_db) else 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ConfigError("linear_to_db requires strictly positive input", code="db_domain")
    out = 10.0 * np.log10(arr)
    return out if np.ndim(x) else float(out)
