"""
Experiment configuration documents.

A config names the system (odometer, tent or solenoid), the action to run,
the holes and the action parameters. Documents are JSON, or YAML when the
file ends in .yaml/.yml; both parse into the same ExperimentConfig and
to_dict() gives back a document that parses to an equal config.
"""

import json
import logging
import pathlib
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import yaml

from dynamics.errors import UsageError
from dynamics.escape import RadiusSchedule
from dynamics.interval import (
    PiecewiseAffineMap,
    format_rational,
    parse_rational,
    tent_map,
)
from dynamics.odometer import AdicPoint, format_point, parse_point
from dynamics.radix import RadixSpec, format_radix_spec, parse_radix_spec

logger = logging.getLogger(__name__)

ODOMETER = "odometer"
TENT = "tent"
SOLENOID = "solenoid"

ACTIONS = {
    ODOMETER: ("simulate", "construct", "classify", "sample", "verify"),
    TENT: ("simulate", "construct", "verify"),
    SOLENOID: ("simulate", "solenoid-check"),
}


class ConfigError(UsageError):
    """A config problem at a document path such as holes[1].schedule."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


Center = Union[AdicPoint, Fraction]


@dataclass(frozen=True)
class HoleConfig:
    center: Center
    schedule: RadiusSchedule


@dataclass(frozen=True)
class ActionParams:
    """Optional knobs; None means the action's default from common.config."""

    n_max: Optional[int] = None
    horizon: Optional[int] = None
    schedule: Optional[Tuple[int, ...]] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    point: Optional[str] = None
    compare: Optional[str] = None
    depth: Optional[int] = None
    threads: Optional[int] = None
    depth_cap: Optional[int] = None
    min_scale_gap: Optional[int] = None
    max_depth: Optional[int] = None
    max_offset: Optional[int] = None


_INT_PARAMS = (
    "n_max",
    "horizon",
    "trials",
    "seed",
    "depth",
    "threads",
    "depth_cap",
    "min_scale_gap",
    "max_depth",
    "max_offset",
)
_TEXT_PARAMS = ("out", "point", "compare")


@dataclass(frozen=True)
class ExperimentConfig:
    system: str
    action: str
    spec: Optional[RadixSpec] = None
    map: Optional[PiecewiseAffineMap] = None
    stage: Optional[int] = None
    holes: Tuple[HoleConfig, ...] = ()
    params: ActionParams = field(default_factory=ActionParams)

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentConfig":
        return parse_config(data)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"system": self.system, "action": self.action}
        if self.spec is not None:
            key = "branching" if self.system == SOLENOID else "spec"
            out[key] = format_radix_spec(self.spec)
        if self.map is not None:
            out["map"] = _format_map(self.map)
        if self.stage is not None:
            out["stage"] = self.stage
        if self.holes:
            out["holes"] = [
                {"center": _format_center(h.center), "schedule": h.schedule.describe()}
                for h in self.holes
            ]
        params = {}
        for f in fields(ActionParams):
            value = getattr(self.params, f.name)
            if value is not None:
                params[f.name] = list(value) if f.name == "schedule" else value
        if params:
            out["params"] = params
        return out

    def with_params(self, **overrides) -> "ExperimentConfig":
        """Copy with the non-None overrides applied to params."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if not changes:
            return self
        return replace(self, params=replace(self.params, **changes))


def _format_center(center: Center) -> str:
    if isinstance(center, AdicPoint):
        return format_point(center)
    return format_rational(center)


def _format_map(f: PiecewiseAffineMap) -> Any:
    if f == tent_map():
        return "tent"
    return {
        "name": f.name,
        "points": [[format_rational(x), format_rational(y)] for x, y in zip(f.breakpoints, f.values)],
    }


def _require(data: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in data:
        raise ConfigError(path + key, "missing")
    return data[key]


def _parse_map(value: Any) -> PiecewiseAffineMap:
    if value == "tent":
        return tent_map()
    if not isinstance(value, dict) or not isinstance(value.get("points"), list):
        raise ConfigError("map", "expected 'tent' or an object with a 'points' list")
    points = []
    for i, pair in enumerate(value["points"]):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(f"map.points[{i}]", "expected an [x, y] pair")
        try:
            points.append((parse_rational(pair[0]), parse_rational(pair[1])))
        except UsageError as e:
            raise ConfigError(f"map.points[{i}]", str(e)) from None
    try:
        return PiecewiseAffineMap.from_points(points, name=str(value.get("name", "")))
    except UsageError as e:
        raise ConfigError("map", str(e)) from None


def _parse_holes(value: Any, system: str, spec: Optional[RadixSpec]) -> Tuple[HoleConfig, ...]:
    if not isinstance(value, list):
        raise ConfigError("holes", "expected a list")
    holes: List[HoleConfig] = []
    for i, item in enumerate(value):
        path = f"holes[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(path, "expected an object with center and schedule")
        text = _require(item, "center", path + ".")
        try:
            if system == ODOMETER:
                center: Center = parse_point(str(text), spec)
            else:
                center = parse_rational(text)
        except UsageError as e:
            raise ConfigError(path + ".center", str(e)) from None
        schedule = _require(item, "schedule", path + ".")
        if not isinstance(schedule, dict):
            raise ConfigError(path + ".schedule", "expected an object")
        try:
            holes.append(HoleConfig(center, RadiusSchedule.parse(schedule)))
        except UsageError as e:
            raise ConfigError(path + ".schedule", str(e)) from None
    return tuple(holes)


def _parse_params(value: Any) -> ActionParams:
    if not isinstance(value, dict):
        raise ConfigError("params", "expected an object")
    known = {f.name for f in fields(ActionParams)}
    kwargs: Dict[str, Any] = {}
    for key, item in value.items():
        path = f"params.{key}"
        if key not in known:
            raise ConfigError(path, "unknown parameter")
        if item is None:
            continue
        if key == "schedule":
            if not isinstance(item, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in item
            ):
                raise ConfigError(path, "expected a list of hole indices")
            kwargs[key] = tuple(item)
        elif key in _INT_PARAMS:
            if not isinstance(item, int) or isinstance(item, bool):
                raise ConfigError(path, f"expected an integer, got {item!r}")
            if item < 0:
                raise ConfigError(path, "must be >= 0")
            kwargs[key] = item
        else:
            kwargs[key] = str(item)
    return ActionParams(**kwargs)


def parse_config(data: Any) -> ExperimentConfig:
    """Validate a decoded document into an ExperimentConfig."""
    if not isinstance(data, dict):
        raise ConfigError("$", "config must be an object")
    system = _require(data, "system", "")
    if system not in ACTIONS:
        raise ConfigError("system", f"expected one of {', '.join(ACTIONS)}, got {system!r}")
    action = _require(data, "action", "")
    if action not in ACTIONS[system]:
        raise ConfigError("action", f"'{action}' is not available for {system}")

    spec = None
    key = "branching" if system == SOLENOID else "spec"
    if system != TENT:
        text = _require(data, key, "")
        try:
            spec = parse_radix_spec(str(text))
        except UsageError as e:
            raise ConfigError(key, str(e)) from None

    f = _parse_map(data.get("map", "tent")) if system == TENT else None

    stage = None
    if system == SOLENOID:
        stage = data.get("stage", 1)
        if not isinstance(stage, int) or isinstance(stage, bool) or stage < 1:
            raise ConfigError("stage", "expected an integer >= 1")

    holes = _parse_holes(data.get("holes", []), system, spec)
    params = _parse_params(data.get("params", {}))
    return ExperimentConfig(system, action, spec, f, stage, holes, params)


def load_config(path: Union[str, pathlib.Path]) -> ExperimentConfig:
    """Read a JSON (or YAML) config file."""
    path = pathlib.Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(str(path), e.strerror or "cannot read file") from None
    if path.suffix in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError(str(path), f"invalid YAML: {e}") from None
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(
                str(path), f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
            ) from None
    logger.debug(f"loaded config {path}")
    return parse_config(data)
