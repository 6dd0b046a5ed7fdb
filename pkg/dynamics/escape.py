#!/usr/bin/env python3
"""
Competing Shrinking Holes
N holes B^i_n = B(p_i, rho^i_n) on an adding machine, per-scale first-hit
times and winners, indecisiveness statistics, the nested-cylinder
construction of points that follow a prescribed winner schedule, and seeded
Monte Carlo sampling.

Holes are indexed from 1. A winner at scale n is the hole whose first-hit time
is strictly below every other hole's; ties give no winner.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from dynamics.errors import UsageError
from dynamics.odometer import (
    AdicPoint,
    Cylinder,
    ExactPoint,
    SampledPoint,
    ball_to_cylinder,
    depth_for_radius,
    derive_seed,
    distance,
    first_hit,
    first_hit_bruteforce,
    format_point,
    point_from_residue,
    same_orbit,
)
from dynamics.radix import RadixSpec, modulus

logger = logging.getLogger(__name__)

INFINITY = math.inf
HitTime = Union[int, float]


def _fraction(value: Any, name: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{name}: '{value}' is not a rational number") from None


@dataclass(frozen=True)
class RadiusSchedule:
    """
    A decreasing radius sequence rho_n, n >= 1:
      geometric  rho_n = c * lambda^n
      harmonic   rho_n = c / n
      explicit   rho_n = values[n-1], then values[-1] * lambda^(n - len(values))
    """

    form: str
    c: Fraction = Fraction(1)
    lam: Optional[Fraction] = None
    values: Tuple[Fraction, ...] = ()

    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"
    EXPLICIT = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        if self.lam is not None:
            object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if self.form not in (self.GEOMETRIC, self.HARMONIC, self.EXPLICIT):
            raise UsageError(f"unknown radius schedule form '{self.form}'")
        if self.form == self.HARMONIC:
            if self.c <= 0:
                raise UsageError("harmonic schedule needs c > 0")
            return
        if self.lam is None or not 0 < self.lam < 1:
            raise UsageError("lambda must lie in (0, 1)")
        if self.form == self.GEOMETRIC:
            if self.c <= 0:
                raise UsageError("geometric schedule needs c > 0")
            return
        if not self.values:
            raise UsageError("explicit schedule needs at least one radius")
        for n, (a, b) in enumerate(zip(self.values, self.values[1:]), 1):
            if a <= 0 or b <= 0:
                raise UsageError("radii must be positive")
            if b > a:
                raise UsageError(f"radii must not increase (rho_{n} < rho_{n + 1})")
            if b == a:
                logger.warning(f"⚠️ radius schedule is not strictly decreasing at n={n}")
        if self.values[-1] <= 0:
            raise UsageError("radii must be positive")

    @classmethod
    def geometric(cls, c, lam) -> "RadiusSchedule":
        return cls(cls.GEOMETRIC, c=Fraction(c), lam=Fraction(lam))

    @classmethod
    def harmonic(cls, c) -> "RadiusSchedule":
        return cls(cls.HARMONIC, c=Fraction(c))

    @classmethod
    def explicit(cls, values: Sequence, lam) -> "RadiusSchedule":
        return cls(cls.EXPLICIT, values=tuple(Fraction(v) for v in values), lam=Fraction(lam))

    @classmethod
    def parse(cls, data: Mapping[str, Any]) -> "RadiusSchedule":
        """Build a schedule from its config dictionary."""
        form = data.get("form")
        if form == cls.GEOMETRIC:
            return cls.geometric(
                _fraction(data.get("c", 1), "c"), _fraction(data.get("lambda"), "lambda")
            )
        if form == cls.HARMONIC:
            return cls.harmonic(_fraction(data.get("c", 1), "c"))
        if form == cls.EXPLICIT:
            values = data.get("values")
            if not isinstance(values, list):
                raise UsageError("values: expected a list of radii")
            return cls.explicit(
                [_fraction(v, f"values[{i}]") for i, v in enumerate(values)],
                _fraction(data.get("lambda"), "lambda"),
            )
        raise UsageError(f"form: unknown radius schedule form '{form}'")

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"form": self.form}
        if self.form == self.EXPLICIT:
            out["values"] = [str(v) for v in self.values]
        else:
            out["c"] = str(self.c)
        if self.lam is not None:
            out["lambda"] = str(self.lam)
        return out

    def rho(self, n: int) -> Fraction:
        if n < 1:
            raise UsageError(f"scale index must be >= 1, got {n}")
        if self.form == self.GEOMETRIC:
            return self.c * self.lam ** n
        if self.form == self.HARMONIC:
            return self.c / n
        if n <= len(self.values):
            return self.values[n - 1]
        return self.values[-1] * self.lam ** (n - len(self.values))


@dataclass(frozen=True)
class HoleSystem:
    """N centers on one adding machine with their radius schedules."""

    spec: RadixSpec
    centers: Tuple[AdicPoint, ...]
    schedules: Tuple[RadiusSchedule, ...]

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        object.__setattr__(self, "schedules", tuple(self.schedules))
        if not self.centers:
            raise UsageError("a hole system needs at least one center")
        if len(self.centers) != len(self.schedules):
            raise UsageError("every center needs exactly one radius schedule")
        for i, c in enumerate(self.centers, 1):
            if c.spec != self.spec:
                raise UsageError(f"center {i} lives on a different adding machine")

    @property
    def size(self) -> int:
        return len(self.centers)

    def depths(self, n: int) -> Tuple[int, ...]:
        """Cylinder depths L_i(n) of the holes at scale n."""
        return tuple(depth_for_radius(s.rho(n)) for s in self.schedules)

    def holes(self, n: int) -> Tuple[Cylinder, ...]:
        return tuple(
            ball_to_cylinder(p, s.rho(n)) for p, s in zip(self.centers, self.schedules)
        )

    def permuted(self, order: Sequence[int]) -> "HoleSystem":
        """Relabel holes: new hole k is old hole order[k] (1-based)."""
        return HoleSystem(
            self.spec,
            tuple(self.centers[i - 1] for i in order),
            tuple(self.schedules[i - 1] for i in order),
        )


@dataclass(frozen=True)
class SystemCheck:
    """Generic, or Degenerate with the offending pair and relation."""

    generic: bool
    reason: str = ""
    pair: Optional[Tuple[int, int]] = None
    offset: Optional[int] = None


@dataclass(frozen=True)
class ScaleRecord:
    """Everything measured at one scale n."""

    n: int
    depths: Tuple[int, ...]
    taus: Tuple[HitTime, ...]
    winner: Optional[int]
    overlap: bool
    degenerate: bool = False
    indeterminate: bool = False

    @property
    def counted(self) -> bool:
        """Scales that enter the switch and win statistics."""
        return not (self.degenerate or self.indeterminate)


@dataclass(frozen=True)
class WinnerTrace:
    hole_count: int
    records: Tuple[ScaleRecord, ...] = ()

    def winners(self) -> List[Optional[int]]:
        return [r.winner for r in self.records]


@dataclass(frozen=True)
class IndecisivenessStats:
    switch_count: int
    wins: Tuple[int, ...]
    threshold: int
    h_indecisive: bool


@dataclass(frozen=True)
class ConstructionOptions:
    max_depth: int = 64
    max_offset: int = 1 << 16
    min_scale_gap: int = 1
    max_scale: int = 10_000
    depth_cap: int = 64

    def __post_init__(self):
        if self.min_scale_gap < 1:
            raise UsageError(f"min_scale_gap must be >= 1, got {self.min_scale_gap}")
        if self.depth_cap < 1:
            raise UsageError(f"depth_cap must be >= 1, got {self.depth_cap}")


@dataclass(frozen=True)
class Construction:
    point: AdicPoint
    realized_scales: Tuple[int, ...]
    residue: int
    depth: int


@dataclass(frozen=True)
class Failure:
    reason: str
    detail: str = ""

    SEARCH_BUDGET = "search-budget-exceeded"
    DEGENERATE_SYSTEM = "degenerate-system"
    DEGENERATE_CENTERS = "degenerate-centers"
    VERIFICATION = "verification-failed"


@dataclass(frozen=True)
class GenericitySummary:
    trials: int
    n_max: int
    win_histograms: Tuple[Dict[int, int], ...] = ()
    switch_distribution: Dict[int, int] = field(default_factory=dict)
    fraction_indecisive: Dict[int, Fraction] = field(default_factory=dict)


def validate_system(system: HoleSystem, depth_cap: int = 64) -> SystemCheck:
    """
    Generic iff centers are pairwise distinct and on pairwise distinct orbits.
    Sampled centers that agree on the first depth_cap digits count as equal.
    """
    for a in range(system.size):
        for b in range(a + 1, system.size):
            p, q = system.centers[a], system.centers[b]
            d = distance(p, q, depth_cap)
            if d.kind != d.EXACT:
                return SystemCheck(False, "equal-centers", (a + 1, b + 1))
            if not (isinstance(p, ExactPoint) and isinstance(q, ExactPoint)):
                logger.debug(f"orbit relation of centers {a + 1},{b + 1} not decidable")
                continue
            relation = same_orbit(p, q)
            if relation.same:
                return SystemCheck(False, "same-orbit", (a + 1, b + 1), relation.offset)
    return SystemCheck(True)


def winner(taus: Sequence[HitTime]) -> Optional[int]:
    """Index (1-based) of the strict minimizer, None on ties or when nothing is hit."""
    if not taus:
        return None
    best = min(taus)
    if best == INFINITY or list(taus).count(best) > 1:
        return None
    return list(taus).index(best) + 1


def _any_overlap(holes: Sequence[Cylinder]) -> bool:
    return any(
        holes[a].intersects(holes[b])
        for a in range(len(holes))
        for b in range(a + 1, len(holes))
    )


def hit_vector(system: HoleSystem, x: AdicPoint, n: int) -> ScaleRecord:
    """First-hit times of x into every hole at scale n."""
    holes = system.holes(n)
    taus = tuple(first_hit(x, c) for c in holes)
    depths = tuple(c.depth for c in holes)
    return ScaleRecord(
        n=n,
        depths=depths,
        taus=taus,
        winner=winner(taus),
        overlap=_any_overlap(holes),
        degenerate=min(depths) == 0,
    )


def hit_vector_bruteforce(system: HoleSystem, x: AdicPoint, n: int) -> ScaleRecord:
    """Same as hit_vector, with first-hit times found by iterating f."""
    holes = system.holes(n)
    taus = []
    for c in holes:
        tau = first_hit_bruteforce(x, c, c.modulus)
        taus.append(tau if isinstance(tau, int) else INFINITY)
    depths = tuple(c.depth for c in holes)
    return ScaleRecord(
        n, depths, tuple(taus), winner(taus), _any_overlap(holes), min(depths) == 0
    )


def winner_trace(system: HoleSystem, x: AdicPoint, n_max: int) -> WinnerTrace:
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    records = tuple(hit_vector(system, x, n) for n in range(1, n_max + 1))
    for r in records:
        if r.degenerate:
            logger.info(f"scale {r.n} has a whole-space hole; excluded from statistics")
    return WinnerTrace(system.size, records)


def indecisiveness_stats(
    trace: WinnerTrace, threshold: int = 1
) -> IndecisivenessStats:
    """Switches between consecutive winners and wins per hole over counted scales."""
    wins = [0] * trace.hole_count
    switches = 0
    previous = None
    for r in trace.records:
        if not r.counted or r.winner is None:
            continue
        wins[r.winner - 1] += 1
        if previous is not None and r.winner != previous:
            switches += 1
        previous = r.winner
    indecisive = all(w >= threshold for w in wins)
    return IndecisivenessStats(switches, tuple(wins), threshold, indecisive)


def construct_indecisive(
    system: HoleSystem,
    schedule: Sequence[int],
    opts: Optional[ConstructionOptions] = None,
) -> Union[Construction, Failure]:
    """
    Nested-cylinder search for a point whose winner at increasing scales
    n_1 < n_2 < ... follows `schedule`. The committed residue r mod m_D is only
    ever extended, so winners at already realized scales stay fixed.

    Each entry takes the first scale at least min_scale_gap past the previous
    one. On the dyadic pair (zeros, alternating) with rho_n = 2^-n the default
    gap realizes [2, 1, 2] at scales (1, 2, 3) with residue 3 mod 8, while
    min_scale_gap=2 gives scales (2, 4, 6) with residue 9 mod 64.
    """
    opts = opts or ConstructionOptions()
    if not schedule:
        raise UsageError("schedule must be nonempty")
    for i in schedule:
        if not 1 <= i <= system.size:
            raise UsageError(f"hole index {i} outside 1..{system.size}")
    check = validate_system(system, opts.depth_cap)
    if not check.generic:
        return Failure(Failure.DEGENERATE_SYSTEM, f"{check.reason} {check.pair}")

    spec = system.spec
    residue, depth, scale = 0, 0, 0
    realized: List[int] = []
    for k, target in enumerate(schedule):
        n = scale + opts.min_scale_gap
        found = False
        while not found:
            if n > opts.max_scale:
                return Failure(Failure.SEARCH_BUDGET, f"entry {k}: scale cap {opts.max_scale}")
            depths = system.depths(n)
            need = max(depth, max(depths))
            if need > opts.max_depth:
                return Failure(
                    Failure.SEARCH_BUDGET, f"entry {k}: depth {need} > {opts.max_depth}"
                )
            if min(depths) == 0:
                n += 1
                continue
            centers = [c.residue(L) for c, L in zip(system.centers, depths)]
            moduli = [modulus(spec, L) for L in depths]
            step = modulus(spec, depth)
            count = min(modulus(spec, need) // step, opts.max_offset)
            for t in range(count):
                candidate = residue + t * step
                taus = [(c - candidate) % m for c, m in zip(centers, moduli)]
                if winner(taus) == target:
                    residue, depth, found = candidate, need, True
                    break
            if not found:
                n += 1
        logger.debug(f"entry {k}: hole {target} wins at scale {n} (residue {residue} mod m_{depth})")
        realized.append(n)
        scale = n

    point = point_from_residue(spec, residue, depth)
    for n, target in zip(realized, schedule):
        if hit_vector(system, point, n).winner != target:
            return Failure(Failure.VERIFICATION, f"scale {n} does not follow the schedule")
    logger.info(f"🔎 constructed {format_point(point)} realizing scales {realized}")
    return Construction(point, tuple(realized), residue, depth)


def _trial(system: HoleSystem, n_max: int, seed: int, index: int) -> WinnerTrace:
    return winner_trace(system, SampledPoint(system.spec, derive_seed(seed, index)), n_max)


def sample_genericity(
    system: HoleSystem,
    n_max: int,
    trials: int,
    seed: int,
    threads: int = 1,
    thresholds: Sequence[int] = (1, 2, 3),
) -> GenericitySummary:
    """
    Winner statistics over `trials` sampled points. Trial t uses the point
    seeded by derive_seed(seed, t); results are reduced in trial order.
    """
    if trials < 0:
        raise UsageError("trials must be >= 0")
    if trials == 0:
        return GenericitySummary(0, n_max)
    indices = range(trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(lambda t: _trial(system, n_max, seed, t), indices))
    else:
        traces = [_trial(system, n_max, seed, t) for t in indices]

    histograms = [Counter() for _ in range(system.size)]
    switches: Counter = Counter()
    indecisive = Counter()
    for trace in traces:
        stats = indecisiveness_stats(trace)
        switches[stats.switch_count] += 1
        for i, w in enumerate(stats.wins):
            histograms[i][w] += 1
        for h in thresholds:
            if all(w >= h for w in stats.wins):
                indecisive[h] += 1
    return GenericitySummary(
        trials=trials,
        n_max=n_max,
        win_histograms=tuple(dict(sorted(h.items())) for h in histograms),
        switch_distribution=dict(sorted(switches.items())),
        fraction_indecisive={h: Fraction(indecisive[h], trials) for h in thresholds},
    )


def format_tau(tau: HitTime) -> str:
    return "inf" if tau == INFINITY else str(tau)


def trace_header(hole_count: int, with_depths: bool = True) -> List[str]:
    header = ["n"]
    if with_depths:
        header += [f"L_{i}" for i in range(1, hole_count + 1)]
    header += [f"tau_{i}" for i in range(1, hole_count + 1)]
    return header + ["winner", "overlap"]


def trace_rows(trace: WinnerTrace, with_depths: bool = True) -> List[List[str]]:
    """CSV rows, one per scale; winner 0 stands for no winner."""
    rows = []
    for r in trace.records:
        row = [str(r.n)]
        if with_depths:
            row += [str(L) for L in r.depths]
        row += [format_tau(t) for t in r.taus]
        row += [str(r.winner or 0), "1" if r.overlap else "0"]
        rows.append(row)
    return rows


SUMMARY_HEADER = ["metric", "hole", "value", "frequency"]


def summary_rows(summary: GenericitySummary) -> List[List[str]]:
    """
    CSV rows for a sampling run: a leading "trials" row (value n_max,
    frequency the trial count), per-hole win-count histograms ("wins"), the
    switch-count distribution ("switches", hole 0) and the fraction of
    trials that are h-indecisive ("indecisive", value h, frequency a/b).
    """
    rows = [["trials", "0", str(summary.n_max), str(summary.trials)]]
    for i, histogram in enumerate(summary.win_histograms, 1):
        rows += [["wins", str(i), str(w), str(c)] for w, c in histogram.items()]
    rows += [["switches", "0", str(s), str(c)] for s, c in summary.switch_distribution.items()]
    for h, frac in summary.fraction_indecisive.items():
        rows.append(["indecisive", "0", str(h), f"{frac.numerator}/{frac.denominator}"])
    return rows
