"""Edge-user coverage and rate for multi-tier downlinks under strict FFR and SFR.

Analytic evaluation (adaptive quadrature plus alpha = 4 closed forms) and an
independent Poisson point process simulator. Set ``HETNET_FFR_NUMBA=0`` to run
without numba.
"""

from ._accel import BACKEND
from .closed_access import (
    CcdfCurve,
    ccdf_curve,
    reuse_delta_coverage,
    sfr_closed_edge_ccdf,
    sfr_closed_fast,
    strict_ffr_closed_edge_ccdf,
    strict_ffr_closed_fast,
    universal_coverage_multitier,
    universal_edge_ccdf,
)
from .errors import (
    ConfigError,
    DegenerateConditioning,
    EvaluationError,
    GridMismatch,
    HetnetFFRError,
    InsufficientConditioning,
    UnsupportedRegime,
)
from .kernels import epsilon_weights, psi, rho, rho_open, xi_closed, xi_open, zeta_closed, zeta_open
from .model import AccessMode, NetworkConfig, ReuseScheme, ThresholdGrid, TierConfig, db_to_linear, linear_to_db
from .montecarlo import McConfig, compare_curves, sample_ppp, simulate_closed_access, simulate_open_access
from .open_access import OpenScenario, open_ccdf_curve, sfr_open_edge_ccdf, strict_ffr_open_edge_ccdf
from .quadrature import QuadPolicy, integrate_2d_semi_inf, integrate_finite, integrate_semi_inf
from .rate import RateResult, average_edge_rate, universal_rate

__version__ = "0.1.0"
