"""Published closed forms versus direct quadrature.

Several of the published alpha = 4 expressions and per-line noise factors do
not agree with the integrals they abbreviate. The library evaluates the
integrals (and exact rewrites of them); this module tabulates the gap so the
choice is auditable.
"""

import math
from dataclasses import dataclass

from . import closed_access as ca
from . import kernels as kn
from . import open_access as oa
from .model import NetworkConfig, ReuseScheme, TierConfig, db_to_linear
from .quadrature import DEFAULT_POLICY

AGREE_TOL = 1e-6


@dataclass(frozen=True)
class DiscrepancyRow:
    item: str
    point: str
    printed: float
    reference: float
    note: str = ""

    @property
    def abs_diff(self):
        return abs(self.printed - self.reference)

    @property
    def agrees(self):
        return self.abs_diff <= AGREE_TOL * max(1.0, abs(self.reference))


def reference_network(noise=0.0):
    """Three tiers, kappa = (2, 4), gamma = (0.1, 0.01), delta = 3, beta = 4, T1 = 1 dB."""
    t1 = db_to_linear(1.0)
    tiers = (TierConfig(1.0, 1.0, t1), TierConfig(2.0, 0.1, t1), TierConfig(4.0, 0.01, t1))
    return NetworkConfig(tiers, alpha=4.0, noise=noise, delta=3.0, beta=4.0)


def reference_open_scenario():
    """Two tiers, kappa = 4, gamma = 0.1, T1 = 1 dB, T2 = 5 dB."""
    t1 = db_to_linear(1.0)
    net = NetworkConfig((TierConfig(1.0, 1.0, t1), TierConfig(4.0, 0.1, t1)), alpha=4.0, delta=3.0, beta=4.0)
    return oa.OpenScenario(net, t1, db_to_linear(5.0))


def _safe(f, *args):
    try:
        return float(f(*args))
    except (ArithmeticError, ValueError):
        return float("nan")


def _kernel_rows(policy):
    rows = []
    for T, T1, d in ((2.0, 1.0, 3.0), (0.5, 1.26, 3.0), (10.0, 1.26, 2.0)):
        rows.append(DiscrepancyRow("xi_alpha4", f"T={T:g},T1={T1:g},delta={d:g}",
                                   kn.xi_alpha4_printed(T, T1, d), kn.xi_closed(T, T1, 4.0, d, policy)))
    for T, T1, b, e in ((1.0, 1.0, 4.0, 2.0), (0.5, 1.26, 4.0, 2.0), (10.0, 1.26, 2.0, 1.5)):
        rows.append(DiscrepancyRow("zeta_alpha4", f"T={T:g},T1={T1:g},beta={b:g},eta={e:g}",
                                   kn.zeta_alpha4_printed(T, T1, b, e),
                                   kn.zeta_closed(T, T1, 4.0, b, e, policy)))
    for T, z, b, e in ((1.0, 1.26, 4.0, 2.0), (8.0, 0.5, 2.0, 1.5)):
        y, zz = e / b * T, e * z
        ref = kn.zeta_open(T, z, 4.0, b, e, 1.0, 1.0, policy)
        shortcut = kn.zeta_open_shortcut_printed(y, zz, 4.0, 1.0, 1.0)
        pt = f"T={T:g},z={z:g},beta={b:g},eta={e:g},ra=rb=1"
        rows.append(DiscrepancyRow("zeta_open_shortcut", pt, shortcut, ref, "sum in place of difference"))
        diff_form = (y * kn.rho_open(y, 4.0, 1.0, 1.0, policy) - zz * kn.rho_open(zz, 4.0, 1.0, 1.0, policy)) / (y - zz)
        rows.append(DiscrepancyRow("zeta_open_difference_form", pt, diff_form, ref, "corrected rewrite"))
    return rows


def _fast_path_rows(policy):
    net = reference_network()
    rows = []
    for t_db in (-10.0, 0.0, 10.0):
        T = db_to_linear(t_db)
        rows.append(DiscrepancyRow("strict_ffr_closed_alpha4", f"T={t_db:g}dB",
                                   _safe(ca.strict_ffr_closed_printed, T, net),
                                   ca.strict_ffr_closed_edge_ccdf(T, net, policy)))
        rows.append(DiscrepancyRow("sfr_closed_alpha4", f"T={t_db:g}dB",
                                   _safe(ca.sfr_closed_printed, T, net),
                                   ca.sfr_closed_edge_ccdf(T, net, policy)))
    return rows


def _noise_rows(policy):
    rows = []
    for n_db in (-10.0, 0.0, 10.0):
        net = reference_network(noise=db_to_linear(n_db))
        T = 1.0
        pt = f"T=0dB,noise={n_db:g}dB"
        rows.append(DiscrepancyRow("strict_ffr_noise_factors", pt,
                                   ca.strict_ffr_closed_edge_ccdf(T, net, policy, noise="printed"),
                                   ca.strict_ffr_closed_edge_ccdf(T, net, policy),
                                   "MC decides; see tests"))
        rows.append(DiscrepancyRow("sfr_noise_factors", pt,
                                   ca.sfr_closed_edge_ccdf(T, net, policy, noise="printed"),
                                   ca.sfr_closed_edge_ccdf(T, net, policy),
                                   "MC decides; see tests"))
    return rows


def _open_rows(policy):
    scen = reference_open_scenario()
    rows = []
    for scheme in (ReuseScheme.STRICT_FFR, ReuseScheme.SFR):
        den = oa.open_denominator(scen, scheme, policy)
        for T, label, note in ((1e-12, "T->0", "limit must be 1"), (1.0, "T=0dB", "")):
            printed = oa.open_edge_ccdf(T, scen, scheme, policy, denominator=den, printed_gn=True)
            ref = oa.open_edge_ccdf(T, scen, scheme, policy, denominator=den)
            rows.append(DiscrepancyRow(f"{scheme.value}_open_numerator_gamma", label, printed, ref, note))
    return rows


def discrepancy_report(policy=DEFAULT_POLICY, include_open=True):
    """List of :class:`DiscrepancyRow`, printed value against the reference evaluation."""
    rows = _kernel_rows(policy) + _fast_path_rows(policy) + _noise_rows(policy)
    if include_open:
        rows += _open_rows(policy)
    return rows


def format_report(rows):
    lines = ["item,point,printed,reference,abs_diff,agrees,note"]
    for r in rows:
        lines.append(f"{r.item},{r.point.replace(',', ';')},{r.printed:.9g},{r.reference:.9g},"
                     f"{r.abs_diff:.3g},{int(r.agrees)},{r.note}")
    return "\n".join(lines) + "\n"
