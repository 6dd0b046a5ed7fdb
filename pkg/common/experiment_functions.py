"""
Experiment handlers, one per (system, action).

Each handler takes an ExperimentConfig and returns a result dictionary:
  success    bool
  exit_code  0 ok, 1 semantic negative, 3 search failure
  header/rows  CSV payload, or
  report       JSON payload
  message    one-line verdict for the terminal (optional)
  error      reason string when success is False
Usage problems raise UsageError and are turned into exit code 2 by the caller.
"""

import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from common.config import SEARCH_LIMITS, SIMULATION_DEFAULTS
from common.experiment_config import ODOMETER, SOLENOID, TENT, ExperimentConfig
from dynamics.classify import compute_M, format_M, witness_prime
from dynamics.errors import UsageError
from dynamics.escape import (
    SUMMARY_HEADER,
    ConstructionOptions,
    Failure,
    HoleSystem,
    construct_indecisive,
    indecisiveness_stats,
    sample_genericity,
    summary_rows,
    trace_header,
    trace_rows,
    validate_system,
    winner_trace,
)
from dynamics.interval import (
    IntervalHole,
    IntervalSearchOptions,
    backward_gap,
    build_solenoid,
    construct_indecisive_interval,
    faithful_scales,
    format_rational,
    interval_winner_trace,
    itinerary,
    parse_rational,
    solenoid_hole_system,
    stage_rows,
    verify_solenoid_structure,
)
from dynamics.odometer import (
    format_point,
    orbit_visits_each_cylinder,
    parse_point,
    point_from_residue,
    regular_recurrence_period,
    verify_cyclic_partition,
    zero_point,
)
from dynamics.radix import format_radix_spec, modulus, parse_radix_spec

logger = logging.getLogger(__name__)

Result = Dict[str, Any]


def _param(config: ExperimentConfig, name: str) -> Any:
    value = getattr(config.params, name)
    return SIMULATION_DEFAULTS[name] if value is None else value


def _limit(value: Optional[int], default: int) -> int:
    return default if value is None else value


def _failure(failure: Failure) -> Result:
    error = failure.reason + (f": {failure.detail}" if failure.detail else "")
    logger.error(f"search failed, {error}")
    return {"success": False, "exit_code": 3, "error": error}


def _schedule(config: ExperimentConfig) -> Tuple[int, ...]:
    if not config.params.schedule:
        raise UsageError("params.schedule: a construct run needs a schedule of hole indices")
    return config.params.schedule


def _hole_system(config: ExperimentConfig) -> HoleSystem:
    if not config.holes:
        raise UsageError("holes: at least one hole is required")
    return HoleSystem(
        config.spec,
        tuple(h.center for h in config.holes),
        tuple(h.schedule for h in config.holes),
    )


def _interval_holes(config: ExperimentConfig) -> List[IntervalHole]:
    if not config.holes:
        raise UsageError("holes: at least one hole is required")
    return [IntervalHole(h.center, h.schedule) for h in config.holes]


def _log_stats(trace) -> None:
    stats = indecisiveness_stats(trace)
    logger.info(f"wins per hole {list(stats.wins)}, {stats.switch_count} winner switches")


def simulate_odometer(config: ExperimentConfig) -> Result:
    system = _hole_system(config)
    check = validate_system(system, _param(config, "depth_cap"))
    if not check.generic:
        logger.warning(f"⚠️ degenerate system: {check.reason} for holes {check.pair}")
    x = parse_point(config.params.point, config.spec) if config.params.point else zero_point(config.spec)
    trace = winner_trace(system, x, _param(config, "n_max"))
    _log_stats(trace)
    return {
        "success": True,
        "exit_code": 0,
        "header": trace_header(system.size),
        "rows": trace_rows(trace),
    }


def construct_odometer(config: ExperimentConfig) -> Result:
    system = _hole_system(config)
    p = config.params
    opts = ConstructionOptions(
        max_depth=_limit(p.max_depth, SEARCH_LIMITS["max_depth"]),
        max_offset=_limit(p.max_offset, SEARCH_LIMITS["max_offset"]),
        min_scale_gap=_limit(p.min_scale_gap, 1),
        depth_cap=_param(config, "depth_cap"),
    )
    schedule = _schedule(config)
    result = construct_indecisive(system, schedule, opts)
    if isinstance(result, Failure):
        return _failure(result)
    trace = winner_trace(system, result.point, max(result.realized_scales))
    return {
        "success": True,
        "exit_code": 0,
        "report": {
            "point": format_point(result.point),
            "residue": result.residue,
            "depth": result.depth,
            "schedule": list(schedule),
            "realized_scales": list(result.realized_scales),
            "winners": [w or 0 for w in trace.winners()],
        },
    }


def classify_odometer(config: ExperimentConfig) -> Result:
    if not config.params.compare:
        raise UsageError("params.compare: classify needs a second radix spec")
    other = parse_radix_spec(config.params.compare)
    witness = witness_prime(config.spec, other)
    verdict = "conjugate" if witness is None else "not-conjugate"
    logger.info(f"{format_radix_spec(config.spec)} vs {format_radix_spec(other)}: {verdict}")
    return {
        "success": True,
        "exit_code": 0 if witness is None else 1,
        "message": verdict if witness is None else f"{verdict} (witness prime {witness})",
        "report": {
            "verdict": verdict,
            "witness_prime": witness,
            "a": {"spec": format_radix_spec(config.spec), "M": format_M(compute_M(config.spec))},
            "b": {"spec": format_radix_spec(other), "M": format_M(compute_M(other))},
        },
    }


def sample_odometer(config: ExperimentConfig) -> Result:
    system = _hole_system(config)
    summary = sample_genericity(
        system,
        n_max=_param(config, "n_max"),
        trials=_param(config, "trials"),
        seed=_param(config, "seed"),
        threads=max(_param(config, "threads"), 1),
    )
    logger.info(f"sampled {summary.trials} trials over {summary.n_max} scales")
    return {"success": True, "exit_code": 0, "header": SUMMARY_HEADER, "rows": summary_rows(summary)}


VERIFY_HEADER = [
    "depth",
    "modulus",
    "cyclic_partition",
    "forward_visits_all",
    "backward_visits_all",
    "recurrence_period",
]


def verify_odometer(config: ExperimentConfig) -> Result:
    """Finite-depth checks of the cyclic clopen covers, minimality and recurrence."""
    spec = config.spec
    x = parse_point(config.params.point, spec) if config.params.point else zero_point(spec)
    rows = []
    ok = True
    for i in range(1, _param(config, "depth") + 1):
        m = modulus(spec, i)
        checks = (
            verify_cyclic_partition(spec, i),
            orbit_visits_each_cylinder(x, i),
            orbit_visits_each_cylinder(x, i, backward=True),
        )
        period = regular_recurrence_period(x, i)
        ok = ok and all(checks) and period == m
        rows.append([str(i), str(m)] + ["1" if c else "0" for c in checks] + [str(period)])
    if not ok:
        logger.warning(f"⚠️ verification of {format_radix_spec(spec)} failed")
    return {"success": ok, "exit_code": 0 if ok else 1, "header": VERIFY_HEADER, "rows": rows}


def simulate_tent(config: ExperimentConfig) -> Result:
    if not config.params.point:
        raise UsageError("params.point: a tent simulation needs a rational start point")
    holes = _interval_holes(config)
    x = parse_rational(config.params.point)
    trace = interval_winner_trace(
        config.map, holes, x, _param(config, "n_max"), _param(config, "horizon")
    )
    undecided = [r.n for r in trace.records if r.indeterminate]
    if undecided:
        logger.warning(f"⚠️ scales {undecided} undecided within the horizon")
    _log_stats(trace)
    return {
        "success": True,
        "exit_code": 0,
        "header": trace_header(len(holes), with_depths=False),
        "rows": trace_rows(trace, with_depths=False),
    }


def construct_tent(config: ExperimentConfig) -> Result:
    holes = _interval_holes(config)
    opts = IntervalSearchOptions(
        max_preimage_depth=_limit(config.params.max_depth, SEARCH_LIMITS["max_preimage_depth"]),
        max_candidates=_limit(config.params.max_offset, SEARCH_LIMITS["max_candidates"]),
        n_max=_limit(config.params.n_max, IntervalSearchOptions.n_max),
        orbit_horizon=_param(config, "horizon"),
    )
    result = construct_indecisive_interval(config.map, holes, _schedule(config), opts)
    if isinstance(result, Failure):
        return _failure(result)
    return {
        "success": True,
        "exit_code": 0,
        "report": {
            "x": format_rational(result.x),
            "preimage_depth": result.preimage_depth,
            "schedule": list(config.params.schedule),
            "realized_scales": list(result.realized_scales),
        },
    }


GAP_HEADER = ["y", "d", "gap", "bound", "within_bound"]


def verify_tent(config: ExperimentConfig) -> Result:
    """Backward gaps of the preimage trees of the hole centers (or params.point)."""
    if config.params.point:
        targets = [parse_rational(config.params.point)]
    else:
        targets = [h.center for h in config.holes]
    if not targets:
        raise UsageError("params.point: nothing to verify, give a point or holes")
    rows = []
    ok = True
    for y in targets:
        for d in range(_param(config, "depth") + 1):
            gap = backward_gap(config.map, y, d)
            bound = Fraction(2, 2 ** d)
            within = gap <= bound
            ok = ok and within
            rows.append(
                [format_rational(y), str(d), format_rational(gap), format_rational(bound), "1" if within else "0"]
            )
    return {"success": ok, "exit_code": 0 if ok else 1, "header": GAP_HEADER, "rows": rows}


def simulate_solenoid(config: ExperimentConfig) -> Result:
    """Transport rational centers and start point to the quotient adding machine."""
    if not config.params.point:
        raise UsageError("params.point: a solenoid simulation needs a rational start point")
    if not config.holes:
        raise UsageError("holes: at least one hole is required")
    k = config.stage
    model = build_solenoid(config.spec, k)
    system = solenoid_hole_system(
        model, [h.center for h in config.holes], [h.schedule for h in config.holes], k
    )
    x = point_from_residue(config.spec, itinerary(model, parse_rational(config.params.point), k), k)
    n_max = _param(config, "n_max")
    scales = faithful_scales(system, k, n_max)
    if len(scales) < n_max:
        logger.warning(f"⚠️ only scales {scales} are resolved by stage {k}")
    if not scales:
        return {"success": True, "exit_code": 0, "header": trace_header(system.size), "rows": []}
    trace = winner_trace(system, x, max(scales))
    rows = [row for row in trace_rows(trace) if int(row[0]) in scales]
    return {"success": True, "exit_code": 0, "header": trace_header(system.size), "rows": rows}


STAGE_HEADER = ["label", "left", "right"]


def solenoid_check(config: ExperimentConfig) -> Result:
    model = build_solenoid(config.spec, config.stage)
    ok = verify_solenoid_structure(model, config.stage)
    if ok:
        logger.info(f"solenoid structure verified through stage {config.stage}")
    return {
        "success": ok,
        "exit_code": 0 if ok else 1,
        "header": STAGE_HEADER,
        "rows": stage_rows(model, config.stage),
    }


# Function mapping dictionary
FUNCTION_MAP: Dict[Tuple[str, str], Callable[[ExperimentConfig], Result]] = {
    (ODOMETER, "simulate"): simulate_odometer,
    (ODOMETER, "construct"): construct_odometer,
    (ODOMETER, "classify"): classify_odometer,
    (ODOMETER, "sample"): sample_odometer,
    (ODOMETER, "verify"): verify_odometer,
    (TENT, "simulate"): simulate_tent,
    (TENT, "construct"): construct_tent,
    (TENT, "verify"): verify_tent,
    (SOLENOID, "simulate"): simulate_solenoid,
    (SOLENOID, "solenoid-check"): solenoid_check,
}


def run_experiment(config: ExperimentConfig) -> Result:
    """Dispatch to the handler for the config's system and action."""
    handler = FUNCTION_MAP.get((config.system, config.action))
    if handler is None:
        raise UsageError(f"action '{config.action}' is not available for {config.system}")
    logger.debug(f"running {config.system}/{config.action}")
    return handler(config)
