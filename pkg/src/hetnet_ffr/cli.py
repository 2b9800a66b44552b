"""Command-line interface: ``hetnet-ffr <command> --scenario <file> ...``.

Exit codes
----------
0  success (non-convergence shows up in the ``warning`` column only)
1  ``compare``: max |analytic - empirical| above the gate
2  usage or scenario schema error
3  degenerate or insufficient edge-user conditioning
4  numerical evaluation failure
"""

import argparse
import csv
import io
import sys
from dataclasses import replace

import numpy as np

from . import closed_access as ca
from . import montecarlo as mcm
from . import open_access as oa
from . import rate as rt
from .discrepancy import discrepancy_report, format_report
from .errors import ConfigError, DegenerateConditioning, HetnetFFRError, InsufficientConditioning
from .model import AccessMode, ReuseScheme
from .plot import read_curves, svg_plot
from .scenario import BUNDLED, ScenarioError, apply_bias, bundled_text, load_scenario

EXIT_OK, EXIT_GATE, EXIT_USAGE, EXIT_CONDITIONING, EXIT_EVAL = 0, 1, 2, 3, 4
DEFAULT_GATE = 0.015
SWEEP_PARAMS = ("kappa_k", "t2_db", "beta_db", "delta", "t_bias_db")


def fmt(x):
    """Nine significant digits; stable across platforms."""
    x = float(x)
    if np.isnan(x):
        return "nan"
    return format(x, ".9g")


def _write_csv(header, rows, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit(buf.getvalue(), out)


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


# --- pipelines ----------------------------------------------------------------------------

def analytic_curve(scn):
    if scn.access is AccessMode.OPEN:
        return oa.open_ccdf_curve(scn.scheme, scn.open, scn.grid)
    return ca.ccdf_curve(scn.scheme, scn.net, scn.grid)


def simulated_curve(scn):
    if scn.access is AccessMode.OPEN:
        return mcm.simulate_open_access(scn.open, scn.scheme, scn.mc, scn.grid)
    return mcm.simulate_closed_access(scn.net, scn.scheme, scn.mc, scn.grid)


def _mc_overrides(scn, args):
    changes = {}
    for name in ("drops", "seed", "workers"):
        v = getattr(args, name, None)
        if v is not None:
            changes[name] = v
    return replace(scn, mc=replace(scn.mc, **changes)) if changes else scn


def _point_warnings(curve):
    if curve.point_warnings:
        return list(curve.point_warnings)
    return [""] * len(curve.grid)


# --- commands ------------------------------------------------------------------------------

def cmd_analyze(args):
    scn = load_scenario(args.scenario)
    curve = analytic_curve(scn)
    for w in curve.warnings:
        _warn(w)
    rows = [(fmt(t), fmt(v), w) for t, v, w in zip(curve.db, curve.values, _point_warnings(curve))]
    _write_csv(("T_dB", "coverage", "warning"), rows, args.out)
    return EXIT_OK


def cmd_simulate(args):
    scn = _mc_overrides(load_scenario(args.scenario), args)
    emp = simulated_curve(scn)
    for w in emp.warnings:
        _warn(w)
    rows = [(fmt(t), fmt(v), fmt(s), emp.n_conditioned) for t, v, s in zip(emp.grid.db, emp.values, emp.stderr)]
    _write_csv(("T_dB", "coverage", "stderr", "n_conditioned"), rows, args.out)
    return EXIT_OK


def cmd_compare(args):
    scn = _mc_overrides(load_scenario(args.scenario), args)
    curve = analytic_curve(scn)
    emp = simulated_curve(scn)
    rep = mcm.compare_curves(curve, emp)
    rows = [(fmt(t), fmt(a), w, fmt(e), fmt(s), emp.n_conditioned, fmt(d), fmt(z))
            for t, a, w, e, s, d, z in zip(curve.db, curve.values, _point_warnings(curve), emp.values,
                                           emp.stderr, rep.abs_diff, rep.z_scores)]
    _write_csv(("T_dB", "analytic_coverage", "warning", "mc_coverage", "stderr", "n_conditioned",
                "abs_diff", "z_score"), rows, args.out)
    ok = rep.passed(args.gate)
    print(f"max_abs_diff={rep.max_abs_diff:.6f} gate={args.gate:g} frac_within_3se={rep.frac_within_3se:.3f} "
          f"n_conditioned={emp.n_conditioned} n_total={emp.n_total} {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_GATE


def _parse_values(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {text!r}", code="sweep_values")
    if not vals:
        raise ConfigError("--values must not be empty", code="sweep_values")
    return vals


def sweep_scenarios(scn, param, values):
    """``[(value, scenario)]`` for a one-parameter sweep around ``scn``."""
    out = []
    if param.startswith("kappa_"):
        try:
            k = int(param[6:])
        except ValueError:
            raise ConfigError(f"kappa parameter must look like kappa_2, got {param!r}", code="sweep_param")
        if not 2 <= k <= scn.net.K:
            raise ConfigError(f"{param}: tier index must be in 2..{scn.net.K}", code="sweep_param")
        for v in values:
            tiers = [dict(t) for t in scn.doc["tiers"]]
            tiers[k - 1]["density"] = v * tiers[0]["density"]
            out.append((v, scn.with_doc(tiers=tiers)))
    elif param == "t2_db":
        _need_open(scn, param)
        for v in values:
            out.append((v, scn.with_doc(open_thresholds={**scn.doc["open_thresholds"], "t2_db": v})))
    elif param == "t_bias_db":
        _need_open(scn, param)
        out = [(v, apply_bias(scn, v)) for v in values]
    elif param == "beta_db":
        if scn.scheme is not ReuseScheme.SFR:
            raise ConfigError("beta_db sweeps need scheme sfr", code="sweep_param")
        out = [(v, scn.with_doc(beta=10.0 ** (v / 10.0))) for v in values]
    elif param == "delta":
        if scn.scheme is ReuseScheme.UNIVERSAL:
            raise ConfigError("delta has no effect under universal reuse", code="sweep_param")
        for v in values:
            if v != int(v) or v < 1:
                raise ConfigError(f"delta values must be integers >= 1, got {v:g}", code="sweep_values")
            out.append((v, scn.with_doc(delta=int(v))))
    else:
        raise ConfigError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}",
                          code="sweep_param")
    return out


def _need_open(scn, param):
    if scn.access is not AccessMode.OPEN:
        raise ConfigError(f"{param} sweeps need an open-access scenario", code="sweep_param")


def cmd_sweep(args):
    base = _mc_overrides(load_scenario(args.scenario), args)
    rows = []
    for v, scn in sweep_scenarios(base, args.param, _parse_values(args.values)):
        if args.mc:
            scn = replace(scn, mc=base.mc)
            curve = simulated_curve(scn)
            db, vals = curve.grid.db, curve.values
        else:
            curve = analytic_curve(scn)
            db, vals = curve.db, curve.values
        for w in curve.warnings:
            _warn(f"{args.param}={v:g}: {w}")
        rows.extend((fmt(v), fmt(t), fmt(c)) for t, c in zip(db, vals))
    _write_csv(("param_value", "T_dB", "coverage"), rows, args.out)
    return EXIT_OK


def cmd_rate(args):
    scn = _mc_overrides(load_scenario(args.scenario), args)
    if args.unconditional and not (scn.scheme is ReuseScheme.UNIVERSAL and scn.access is AccessMode.CLOSED):
        raise ConfigError("--unconditional applies to universal closed access only", code="rate_mode")
    if args.mc:
        if scn.access is AccessMode.OPEN:
            emp = mcm.simulate_open_access(scn.open, scn.scheme, scn.mc, scn.grid)
        else:
            emp = mcm.simulate_closed_access(scn.net, scn.scheme, scn.mc, scn.grid,
                                             edge_only=not args.unconditional)
        nats = emp.mean_rate
    else:
        if args.unconditional:
            res = rt.universal_rate(scn.net)
        else:
            res = rt.average_edge_rate(scn.scheme, scn.access, scn.analytic_target)
        for w in res.warnings:
            _warn(w)
        nats = res.mean_rate
    rows = [(scn.scheme.value, scn.access.value, fmt(nats), fmt(nats / rt.LN2))]
    _write_csv(("scheme", "access", "rate_nats", "rate_bits"), rows, args.out)
    return EXIT_OK


def cmd_plot(args):
    curves = []
    for path in args.csv:
        curves.extend(read_curves(path))
    _emit(svg_plot(curves, args.width, args.height, args.title), args.out)
    return EXIT_OK


def cmd_discrepancies(args):
    _emit(format_report(discrepancy_report()), args.out)
    return EXIT_OK


def cmd_scenario(args):
    _emit(bundled_text(args.name), args.out)
    return EXIT_OK


# --- argument parsing ------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="hetnet-ffr",
                                description="Edge-user coverage and rate under strict FFR and SFR.")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, help_text, mc=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--scenario", default="builtin:default",
                        help="scenario JSON file, or builtin:default / builtin:open")
        sp.add_argument("--out", help="output file (default: stdout)")
        if mc:
            sp.add_argument("--drops", type=int, help="override mc.drops")
            sp.add_argument("--seed", type=int, help="override mc.seed")
            sp.add_argument("--workers", type=int, help="worker threads (also capped by HETNET_FFR_THREADS)")
        return sp

    scenario_cmd("analyze", "analytic edge CCDF").set_defaults(func=cmd_analyze)
    scenario_cmd("simulate", "Monte Carlo edge CCDF", mc=True).set_defaults(func=cmd_simulate)
    sp = scenario_cmd("compare", "analytic vs Monte Carlo", mc=True)
    sp.add_argument("--gate", type=float, default=DEFAULT_GATE, help="max allowed |diff| (default 0.015)")
    sp.set_defaults(func=cmd_compare)
    sp = scenario_cmd("sweep", "one-parameter sweep", mc=True)
    sp.add_argument("--param", required=True, help="kappa_<k>, t2_db, beta_db, delta or t_bias_db")
    sp.add_argument("--values", required=True, help="comma-separated values")
    sp.add_argument("--mc", action="store_true", help="sweep the simulator instead of the analysis")
    sp.set_defaults(func=cmd_sweep)
    sp = scenario_cmd("rate", "average edge rate", mc=True)
    sp.add_argument("--mc", action="store_true", help="estimate from simulation")
    sp.add_argument("--unconditional", action="store_true",
                    help="universal reuse without edge conditioning")
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("plot", help="SVG from one or more CSV files")
    sp.add_argument("csv", nargs="+")
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.add_argument("--width", type=int, default=720)
    sp.add_argument("--height", type=int, default=480)
    sp.add_argument("--title")
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("discrepancies", help="published closed forms vs quadrature")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_discrepancies)

    sp = sub.add_parser("scenario", help="print a bundled scenario")
    sp.add_argument("name", nargs="?", default="default", choices=BUNDLED)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scenario)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateConditioning, InsufficientConditioning) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING
    except (ScenarioError, ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HetnetFFRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
