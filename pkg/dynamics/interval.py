#!/usr/bin/env python3
"""
Interval Dynamics
Exact rational piecewise-affine maps of [0,1] (the tent map in particular),
hole competition on interval orbits, backward preimage trees, and the
solenoidal substitution model whose stage intervals are cyclically permuted
and coded to an adding machine by their labels.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

from dynamics.errors import NotInStage, UsageError
from dynamics.escape import (
    INFINITY,
    Failure,
    HoleSystem,
    RadiusSchedule,
    ScaleRecord,
    WinnerTrace,
    winner,
)
from dynamics.odometer import point_from_residue
from dynamics.radix import RadixSpec, modulus, radix_at

logger = logging.getLogger(__name__)

Rational = Union[Fraction, int]


def parse_rational(text: Any) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"'{text}' is not a rational number") from None


def format_rational(q: Rational) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class PiecewiseAffineMap:
    """Continuous map of [0,1], affine between consecutive breakpoints."""

    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(Fraction(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        b, v = self.breakpoints, self.values
        if len(b) < 2 or len(b) != len(v):
            raise UsageError("need at least two breakpoints, each with a value")
        if b[0] != 0 or b[-1] != 1:
            raise UsageError("breakpoints must start at 0 and end at 1")
        if any(lo >= hi for lo, hi in zip(b, b[1:])):
            raise UsageError("breakpoints must be strictly increasing")
        if any(not 0 <= y <= 1 for y in v):
            raise UsageError("map values must lie in [0, 1]")

    @classmethod
    def from_points(cls, points: Sequence[Tuple[Rational, Rational]], name: str = "") -> "PiecewiseAffineMap":
        return cls(tuple(p[0] for p in points), tuple(p[1] for p in points), name)

    @property
    def pieces(self) -> List[Tuple[Fraction, Fraction, Fraction, Fraction]]:
        b, v = self.breakpoints, self.values
        return [(b[i], b[i + 1], v[i], v[i + 1]) for i in range(len(b) - 1)]


def tent_map() -> PiecewiseAffineMap:
    """T(x) = 1 - |2x - 1|."""
    return PiecewiseAffineMap((0, Fraction(1, 2), 1), (0, 1, 0), name="tent")


def evaluate(f: PiecewiseAffineMap, x: Rational) -> Fraction:
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise UsageError(f"{x} lies outside [0, 1]")
    i = min(bisect_right(f.breakpoints, x) - 1, len(f.breakpoints) - 2)
    a, b = f.breakpoints[i], f.breakpoints[i + 1]
    va, vb = f.values[i], f.values[i + 1]
    return va + (vb - va) * (x - a) / (b - a)


def preimages(f: PiecewiseAffineMap, y: Rational) -> Tuple[Fraction, ...]:
    """All x with f(x) = y, sorted."""
    y = Fraction(y)
    if not 0 <= y <= 1:
        raise UsageError(f"{y} lies outside [0, 1]")
    found = set()
    for a, b, va, vb in f.pieces:
        if va == vb:
            if va == y:
                raise UsageError(f"{y} has a whole interval of preimages on [{a}, {b}]")
            continue
        x = a + (y - va) * (b - a) / (vb - va)
        if a <= x <= b:
            found.add(x)
    return tuple(sorted(found))


@dataclass(frozen=True)
class HitResult:
    """Hit(k), NeverHits (min of the empty set) or Undecided."""

    kind: str
    steps: Optional[int] = None

    HIT = "hit"
    NEVER = "never"
    UNDECIDED = "undecided"

    @classmethod
    def hit(cls, k: int) -> "HitResult":
        return cls(cls.HIT, k)

    @property
    def time(self):
        """Hit time, +inf for NeverHits, None when undecided."""
        if self.kind == self.HIT:
            return self.steps
        return INFINITY if self.kind == self.NEVER else None


NEVER_HITS = HitResult(HitResult.NEVER)
UNDECIDED = HitResult(HitResult.UNDECIDED)


@dataclass(frozen=True)
class Orbit:
    """Forward orbit up to its first repeated state, when one was found."""

    states: Tuple[Fraction, ...]
    closed: bool
    repeat: Optional[Fraction] = None

    @property
    def cycle_start(self) -> Optional[int]:
        if not self.closed:
            return None
        return self.states.index(self.repeat)


def orbit_until_cycle(f: PiecewiseAffineMap, x: Rational, horizon: int) -> Orbit:
    """Distinct states x, f(x), ... until one repeats or `horizon` steps pass."""
    z = Fraction(x)
    seen = {}
    states = []
    for k in range(horizon + 1):
        if z in seen:
            return Orbit(tuple(states), True, z)
        seen[z] = k
        states.append(z)
        z = evaluate(f, z)
    return Orbit(tuple(states), False)


def _first_entry(orbit: Orbit, lo: Fraction, hi: Fraction) -> HitResult:
    for k, z in enumerate(orbit.states):
        if lo < z < hi:
            return HitResult.hit(k)
    return NEVER_HITS if orbit.closed else UNDECIDED


def first_hit_interval(
    f: PiecewiseAffineMap, x: Rational, hole: Tuple[Rational, Rational], horizon: int
) -> HitResult:
    """First k with f^k(x) in the open interval `hole`."""
    if horizon < 1:
        raise UsageError("horizon must be >= 1")
    lo, hi = Fraction(hole[0]), Fraction(hole[1])
    return _first_entry(orbit_until_cycle(f, x, horizon), lo, hi)


@dataclass(frozen=True)
class IntervalHole:
    """Open interval (center - rho_n, center + rho_n), read inside [0,1]."""

    center: Fraction
    schedule: RadiusSchedule

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        if not 0 < self.center < 1:
            raise UsageError(f"hole center {self.center} must lie in (0, 1)")

    def bounds(self, n: int) -> Tuple[Fraction, Fraction]:
        rho = self.schedule.rho(n)
        return self.center - rho, self.center + rho


def _check_distinct(holes: Sequence[IntervalHole]) -> None:
    centers = [h.center for h in holes]
    if len(set(centers)) != len(centers):
        raise UsageError("hole centers must be pairwise distinct")


def _trace_from_orbit(
    orbit: Orbit, holes: Sequence[IntervalHole], n_max: int
) -> WinnerTrace:
    records = []
    for n in range(1, n_max + 1):
        bounds = [h.bounds(n) for h in holes]
        results = [_first_entry(orbit, lo, hi) for lo, hi in bounds]
        undecided = any(r.kind == HitResult.UNDECIDED for r in results)
        taus = tuple(INFINITY if r.time is None else r.time for r in results)
        overlap = any(
            bounds[a][0] < bounds[b][1] and bounds[b][0] < bounds[a][1]
            for a in range(len(bounds))
            for b in range(a + 1, len(bounds))
        )
        records.append(
            ScaleRecord(
                n=n,
                depths=(),
                taus=taus,
                winner=None if undecided else winner(taus),
                overlap=overlap,
                indeterminate=undecided,
            )
        )
    return WinnerTrace(len(holes), tuple(records))


def interval_winner_trace(
    f: PiecewiseAffineMap,
    holes: Sequence[IntervalHole],
    x: Rational,
    n_max: int,
    horizon: int,
) -> WinnerTrace:
    """Per-scale winners for an interval orbit; undecided scales are flagged."""
    _check_distinct(holes)
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    return _trace_from_orbit(orbit_until_cycle(f, x, horizon), holes, n_max)


def preimage_level(f: PiecewiseAffineMap, y: Rational, d: int) -> Tuple[Fraction, ...]:
    """f^-d(y), sorted."""
    level = {Fraction(y)}
    for _ in range(d):
        level = {p for z in level for p in preimages(f, z)}
    return tuple(sorted(level))


def backward_gap(f: PiecewiseAffineMap, y: Rational, d: int) -> Fraction:
    """Largest gap between consecutive points of f^-d(y), counting 0 and 1 as ends."""
    y = Fraction(y)
    if not 0 < y < 1:
        raise UsageError("backward_gap needs y in (0, 1)")
    if d < 0:
        raise UsageError("depth must be >= 0")
    points = [Fraction(0)] + list(preimage_level(f, y, d)) + [Fraction(1)]
    return max(b - a for a, b in zip(points, points[1:]))


def has_disjoint_backward_orbits(
    f: PiecewiseAffineMap, centers: Sequence[Rational], horizon: int
) -> bool:
    """No center is a forward image f^k(c), 1 <= k <= horizon, of another."""
    centers = [Fraction(c) for c in centers]
    for j, c in enumerate(centers):
        orbit = orbit_until_cycle(f, c, horizon)
        images = set(orbit.states[1:])
        if orbit.closed:
            images.add(orbit.repeat)
        for i, other in enumerate(centers):
            if i != j and other in images:
                logger.warning(f"⚠️ center {i + 1} lies on the forward orbit of center {j + 1}")
                return False
    return True


@dataclass(frozen=True)
class IntervalSearchOptions:
    min_preimage_depth: int = 1
    max_preimage_depth: int = 14
    max_candidates: int = 1 << 16
    n_max: int = 40
    orbit_horizon: int = 4096


@dataclass(frozen=True)
class IntervalConstruction:
    x: Fraction
    realized_scales: Tuple[int, ...]
    preimage_depth: int


def _match_schedule(trace: WinnerTrace, schedule: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Earliest increasing scales whose winners spell out the schedule."""
    scales = []
    k = 0
    for r in trace.records:
        if r.counted and r.winner == schedule[k]:
            scales.append(r.n)
            k += 1
            if k == len(schedule):
                return tuple(scales)
    return None


def construct_indecisive_interval(
    f: PiecewiseAffineMap,
    holes: Sequence[IntervalHole],
    schedule: Sequence[int],
    opts: Optional[IntervalSearchOptions] = None,
) -> Union[IntervalConstruction, Failure]:
    """
    Search the preimage tree of the last scheduled center, shallow levels first,
    for a point whose forward orbit enters the scheduled holes first at
    increasing scales. At fine scales the exact visit to the last center wins;
    coarser scales are decided by the near-visits along the way.
    """
    opts = opts or IntervalSearchOptions()
    if not schedule:
        raise UsageError("schedule must be nonempty")
    for i in schedule:
        if not 1 <= i <= len(holes):
            raise UsageError(f"hole index {i} outside 1..{len(holes)}")
    _check_distinct(holes)
    if not has_disjoint_backward_orbits(f, [h.center for h in holes], opts.orbit_horizon):
        return Failure(Failure.DEGENERATE_CENTERS, "a center is a forward image of another")

    level: Tuple[Fraction, ...] = (holes[schedule[-1] - 1].center,)
    tried = 0
    for depth in range(opts.max_preimage_depth + 1):
        if depth >= opts.min_preimage_depth:
            for x in level:
                tried += 1
                if tried > opts.max_candidates:
                    return Failure(Failure.SEARCH_BUDGET, f"{opts.max_candidates} candidates tried")
                trace = interval_winner_trace(f, holes, x, opts.n_max, opts.orbit_horizon)
                scales = _match_schedule(trace, schedule)
                if scales is None:
                    continue
                for n, target in zip(scales, schedule):
                    hits = [
                        first_hit_interval(f, x, h.bounds(n), opts.orbit_horizon).time
                        for h in holes
                    ]
                    if winner([INFINITY if t is None else t for t in hits]) != target:
                        return Failure(Failure.VERIFICATION, f"{format_rational(x)} failed at scale {n}")
                logger.info(
                    f"🔎 constructed x={format_rational(x)} at preimage depth {depth}, scales {list(scales)}"
                )
                return IntervalConstruction(x, scales, depth)
        level = tuple(sorted({p for z in level for p in preimages(f, z)}))
    return Failure(Failure.SEARCH_BUDGET, f"preimage depth {opts.max_preimage_depth} exhausted")


# Solenoidal substitution model


@dataclass(frozen=True)
class StageInterval:
    label: int
    left: Fraction
    right: Fraction

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    def contains(self, x: Fraction) -> bool:
        return self.left <= x <= self.right


@dataclass(frozen=True)
class SolenoidalModel:
    """
    Stages 1..k of nested closed intervals. stages[k-1][r] is I_(k,r); the stage
    map sends I_(k,r) affinely onto I_(k,(r+1) mod m_k).
    """

    branching: RadixSpec
    stages: Tuple[Tuple[StageInterval, ...], ...]
    _order: Tuple[Tuple[StageInterval, ...], ...] = field(
        default=(), init=False, repr=False, compare=False
    )

    def __post_init__(self):
        object.__setattr__(
            self,
            "_order",
            tuple(tuple(sorted(stage, key=lambda cell: cell.left)) for stage in self.stages),
        )

    @property
    def depth(self) -> int:
        return len(self.stages)

    def stage(self, k: int) -> Tuple[StageInterval, ...]:
        if not 1 <= k <= self.depth:
            raise UsageError(f"stage {k} outside 1..{self.depth}")
        return self.stages[k - 1]

    def positional(self, k: int) -> Tuple[StageInterval, ...]:
        self.stage(k)
        return self._order[k - 1]


def build_solenoid(branching: RadixSpec, k: int) -> SolenoidalModel:
    """
    Substitution geometry: a parent with c children is cut into 2c - 1 equal
    closed parts and child t takes the part at position 2t; the child of label
    r at offset t gets label r + t * m_(k-1).
    """
    if k < 1:
        raise UsageError("stage must be >= 1")
    stages = []
    parents = [StageInterval(0, Fraction(0), Fraction(1))]
    for s in range(1, k + 1):
        c = radix_at(branching, s)
        m_prev = modulus(branching, s - 1)
        children: List[Optional[StageInterval]] = [None] * (m_prev * c)
        for parent in parents:
            part = parent.length / (2 * c - 1)
            for t in range(c):
                left = parent.left + 2 * t * part
                label = parent.label + t * m_prev
                children[label] = StageInterval(label, left, left + part)
        stages.append(tuple(children))
        parents = children
    return SolenoidalModel(branching, tuple(stages))


def _affine(src: StageInterval, dst: StageInterval, x: Fraction) -> Fraction:
    return dst.left + (x - src.left) * dst.length / src.length


def itinerary(model: SolenoidalModel, x: Rational, k: int) -> int:
    """Label of the stage-k interval containing x."""
    x = Fraction(x)
    order = model.positional(k)
    i = bisect_right([cell.left for cell in order], x) - 1
    if i < 0 or not order[i].contains(x):
        raise NotInStage(x, k)
    return order[i].label


def stage_map(model: SolenoidalModel, x: Rational, k: int) -> Fraction:
    """f_k(x): I_(k,r) onto I_(k,r+1)."""
    x = Fraction(x)
    stage = model.stage(k)
    r = itinerary(model, x, k)
    return _affine(stage[r], stage[(r + 1) % len(stage)], x)


def stage_map_inverse(model: SolenoidalModel, x: Rational, k: int) -> Fraction:
    x = Fraction(x)
    stage = model.stage(k)
    r = itinerary(model, x, k)
    return _affine(stage[r], stage[(r - 1) % len(stage)], x)


def verify_solenoid_structure(model: SolenoidalModel, k: int) -> bool:
    """Disjointness, labelled nesting and the cyclic affine stage maps, stage by stage."""
    if k > model.depth:
        return False
    spec = model.branching
    for s in range(1, k + 1):
        stage = model.stage(s)
        m = modulus(spec, s)
        if len(stage) != m or [cell.label for cell in stage] != list(range(m)):
            logger.warning(f"stage {s}: labels are not 0..{m - 1}")
            return False
        order = sorted(stage, key=lambda cell: cell.left)
        if any(cell.length <= 0 or cell.left < 0 or cell.right > 1 for cell in order):
            logger.warning(f"stage {s}: degenerate or out-of-range interval")
            return False
        if any(a.right >= b.left for a, b in zip(order, order[1:])):
            logger.warning(f"stage {s}: intervals overlap")
            return False
        for cell in stage:
            succ = stage[(cell.label + 1) % m]
            try:
                coded = itinerary(model, _affine(cell, succ, (cell.left + cell.right) / 2), s)
            except NotInStage:
                coded = None
            if coded != succ.label:
                logger.warning(f"stage {s}: f_{s} on I_({s},{cell.label}) is not coded as +1")
                return False
        if s == 1:
            continue
        m_prev = modulus(spec, s - 1)
        parents = model.stage(s - 1)
        per_parent = [0] * m_prev
        for cell in stage:
            parent = parents[cell.label % m_prev]
            if not (parent.left <= cell.left and cell.right <= parent.right):
                logger.warning(f"stage {s}: I_({s},{cell.label}) escapes its parent")
                return False
            per_parent[parent.label] += 1
        if any(count != radix_at(spec, s) for count in per_parent):
            logger.warning(f"stage {s}: wrong number of children")
            return False
    return True


def quotient_spec(model: SolenoidalModel) -> RadixSpec:
    """Radix spec (m_1, m_2/m_1, ...) of the adding machine the model codes to."""
    return model.branching


def solenoid_hole_system(
    model: SolenoidalModel,
    centers: Sequence[Rational],
    schedules: Sequence[RadiusSchedule],
    k: int,
) -> HoleSystem:
    """Transport stage-k centers to the quotient adding machine via itinerary."""
    points = [point_from_residue(model.branching, itinerary(model, c, k), k) for c in centers]
    return HoleSystem(model.branching, tuple(points), tuple(schedules))


def faithful_scales(system: HoleSystem, k: int, n_max: int) -> List[int]:
    """Scales whose holes are resolved by stage k (every depth <= k)."""
    return [n for n in range(1, n_max + 1) if max(system.depths(n)) <= k]


def backward_orbit_covers(model: SolenoidalModel, x: Rational, k: int) -> bool:
    """The first m_k backward stage iterates of x meet every stage-k interval."""
    m = modulus(model.branching, k)
    labels = set()
    z = Fraction(x)
    for _ in range(m):
        labels.add(itinerary(model, z, k))
        z = stage_map_inverse(model, z, k)
    return len(labels) == m


def stage_rows(model: SolenoidalModel, k: int) -> List[List[str]]:
    """CSV rows (label, left, right) in left-to-right order."""
    return [
        [str(cell.label), format_rational(cell.left), format_rational(cell.right)]
        for cell in model.positional(k)
    ]
