"""JSON scenario files: schema, defaults, and conversion to model objects.

Thresholds are in dB at this boundary and linear everywhere inside.
"""

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .errors import ConfigError
from .model import AccessMode, NetworkConfig, ReuseScheme, ThresholdGrid, TierConfig, db_to_linear
from .montecarlo import McConfig
from .open_access import OpenScenario

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["tiers"],
    "properties": {
        "tiers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["density", "power"],
                "properties": {"density": _POS, "power": _POS, "ffr_threshold_db": _NUM},
            },
        },
        "alpha": {"type": "number", "exclusiveMinimum": 2},
        "noise": {"type": "number", "minimum": 0},
        "mu": _POS,
        "delta": {"type": "integer", "minimum": 1},
        "beta": {"type": "number", "minimum": 1},
        "scheme": {"enum": [s.value for s in ReuseScheme]},
        "access": {"enum": [a.value for a in AccessMode]},
        "open_thresholds": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t1_db", "t2_db"],
            "properties": {"t1_db": _NUM, "t2_db": _NUM},
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["start_db", "stop_db", "step_db"],
            "properties": {"start_db": _NUM, "stop_db": _NUM, "step_db": _POS},
        },
        "mc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "drops": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
                "region_radius": _POS,
                "max_attempts": {"type": "integer", "minimum": 1},
                "batch": {"type": "integer", "minimum": 1},
                "shared_cross_tier": {"type": "boolean"},
            },
        },
    },
}

DEFAULTS = {
    "alpha": 4.0,
    "noise": 0.0,
    "mu": 1.0,
    "delta": 1,
    "beta": 1.0,
    "scheme": "strict_ffr",
    "access": "closed",
    "grid": {"start_db": -10.0, "stop_db": 20.0, "step_db": 1.0},
    "mc": {"drops": 200_000, "seed": 0},
}

BUNDLED = ("default", "open")


class ScenarioError(ConfigError):
    """Schema violation; ``path`` locates the offending value (``$.tiers[0].density``)."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}", code="schema")
        self.path = path


def _path(parts):
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _schema_errors(doc):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message)):
        parts = list(err.absolute_path)
        if err.validator == "additionalProperties":
            allowed = err.schema.get("properties", {})
            for key in sorted(k for k in err.instance if k not in allowed):
                errors.append((_path(parts + [key]), "unknown key"))
        else:
            errors.append((_path(parts), err.message))
    return errors


@dataclass(frozen=True)
class Scenario:
    """A validated scenario: the model objects plus the normalised document."""

    doc: dict
    net: NetworkConfig
    scheme: ReuseScheme
    access: AccessMode
    grid: ThresholdGrid
    mc: McConfig
    open: OpenScenario | None = None

    @property
    def analytic_target(self):
        """What the analytic and MC routines take: ``OpenScenario`` or ``NetworkConfig``."""
        return self.open if self.access is AccessMode.OPEN else self.net

    def with_doc(self, **top_level):
        doc = copy.deepcopy(self.doc)
        doc.update(copy.deepcopy(top_level))
        return parse_scenario(doc)


def _merged(doc):
    out = copy.deepcopy(DEFAULTS)
    for k, v in doc.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = {**out[k], **copy.deepcopy(v)}
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_scenario(doc):
    """Validate a scenario document and build the model objects.

    Raises :class:`ScenarioError` naming the first offending path; all
    problems found are listed in the message.
    """
    if not isinstance(doc, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    errors = _schema_errors(doc)
    if errors:
        path, msg = errors[0]
        extra = "".join(f"\n  {p}: {m}" for p, m in errors[1:])
        err = ScenarioError(path, msg + extra)
        err.all_errors = errors
        raise err
    full = _merged(doc)
    tiers_doc = full["tiers"]
    if "ffr_threshold_db" not in tiers_doc[0]:
        raise ScenarioError("$.tiers[0].ffr_threshold_db", "required for the first tier")
    t1_db = tiers_doc[0]["ffr_threshold_db"]
    access = AccessMode(full["access"])
    scheme = ReuseScheme(full["scheme"])
    if access is AccessMode.OPEN:
        if "open_thresholds" not in full:
            raise ScenarioError("$.open_thresholds", "required when access is open")
        if scheme is ReuseScheme.UNIVERSAL:
            raise ScenarioError("$.scheme", "open access supports strict_ffr and sfr")
    elif "open_thresholds" in full:
        raise ScenarioError("$.open_thresholds", "only valid when access is open")
    try:
        tiers = tuple(TierConfig.from_db(t["density"], t["power"], t.get("ffr_threshold_db", t1_db))
                      for t in tiers_doc)
        net = NetworkConfig(tiers, alpha=float(full["alpha"]), noise=float(full["noise"]),
                            delta=int(full["delta"]), beta=float(full["beta"]), mu=float(full["mu"]))
        g = full["grid"]
        grid = ThresholdGrid(float(g["start_db"]), float(g["stop_db"]), float(g["step_db"]))
        m = full["mc"]
        mc = McConfig(drops=int(m["drops"]), seed=int(m["seed"]), region_radius=m.get("region_radius"),
                      max_attempts=m.get("max_attempts"), batch=int(m.get("batch", 128)),
                      shared_cross_tier=bool(m.get("shared_cross_tier", False)))
        scen = None
        if access is AccessMode.OPEN:
            o = full["open_thresholds"]
            scen = OpenScenario(net, db_to_linear(o["t1_db"]), db_to_linear(o["t2_db"]))
    except ScenarioError:
        raise
    except ConfigError as exc:
        raise ScenarioError("$", str(exc)) from exc
    return Scenario(full, net, scheme, access, grid, mc, scen)


def load_scenario(path):
    """Read a scenario from a file path, or ``builtin:<name>`` for a bundled one."""
    text = bundled_text(path[8:]) if str(path).startswith("builtin:") else open(path, encoding="utf-8").read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("$", f"invalid JSON: {exc}") from exc
    return parse_scenario(doc)


def bundled_text(name="default"):
    if name not in BUNDLED:
        raise ScenarioError("$", f"no bundled scenario {name!r}; choose from {', '.join(BUNDLED)}")
    return resources.files("hetnet_ffr").joinpath("scenarios", f"{name}.json").read_text(encoding="utf-8")


def apply_bias(scenario, t_bias_db):
    """Move ``t1_db`` and ``t2_db`` symmetrically so that ``t1_db - t2_db = t_bias_db``."""
    if scenario.access is not AccessMode.OPEN:
        raise ConfigError("threshold bias needs an open-access scenario", code="bias_closed")
    if not math.isfinite(t_bias_db):
        raise ConfigError("bias must be finite", code="bias_invalid")
    o = scenario.doc["open_thresholds"]
    mid = 0.5 * (o["t1_db"] + o["t2_db"])
    return scenario.with_doc(open_thresholds={"t1_db": mid + 0.5 * t_bias_db, "t2_db": mid - 0.5 * t_bias_db})
