#!/usr/bin/env python3
"""
Adding Machine
Points of Delta_alpha, the 2^-n ultrametric, translation by integers (f = +1),
metric balls as cylinders, and exact first-hit times.

Exact points are eventually-periodic digit streams. A period symbol may be
MAX_DIGIT, meaning x_n = j_n - 1 at that position, which keeps the
predecessor of a zero tail representable for the non-periodic radix families.
Sampled points are lazy streams keyed by a 64-bit seed.
"""

import hashlib
import logging
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from dynamics.errors import UsageError
from dynamics.radix import (
    RadixSpec,
    depth_exceeding,
    digits_to_residue,
    modulus,
    radix_at,
    residue_to_digits,
)

logger = logging.getLogger(__name__)

MAX_DIGIT = -1
MASK64 = (1 << 64) - 1


class AdicPoint(ABC):
    """A point of Delta_alpha, materializable digit by digit."""

    spec: RadixSpec

    @abstractmethod
    def digit(self, n: int) -> int:
        """Return x_n."""

    def digits(self, depth: int) -> Tuple[int, ...]:
        return tuple(self.digit(n) for n in range(1, depth + 1))

    def residue(self, depth: int) -> int:
        """Depth-L residue X_L in [0, m_L)."""
        return digits_to_residue(self.spec, self.digits(depth))


@dataclass(frozen=True, eq=False)
class ExactPoint(AdicPoint):
    """Eventually-periodic point: preperiod digits, then period symbols repeating."""

    spec: RadixSpec
    preperiod: Tuple[int, ...]
    period: Tuple[int, ...]

    def __post_init__(self):
        pre, per = _canonical(self.spec, tuple(self.preperiod), tuple(self.period))
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)
        start, cycle = stable_window(self.spec, [self])
        for n in range(1, start + cycle + 1):
            self.digit(n)

    def digit(self, n: int) -> int:
        if n < 1:
            raise UsageError(f"digit index must be >= 1, got {n}")
        j = radix_at(self.spec, n)
        if n <= len(self.preperiod):
            x = self.preperiod[n - 1]
        else:
            x = self.period[(n - len(self.preperiod) - 1) % len(self.period)]
            if x == MAX_DIGIT:
                return j - 1
        if not 0 <= x < j:
            raise UsageError(f"digit x_{n}={x} outside [0, {j})")
        return x

    def __eq__(self, other):
        if not isinstance(other, ExactPoint):
            return NotImplemented
        if other.spec != self.spec:
            return False
        start, cycle = stable_window(self.spec, [self, other])
        return self.digits(start + cycle) == other.digits(start + cycle)

    def __hash__(self):
        return hash((self.spec, self.digits(16)))

    def __repr__(self):
        return f"ExactPoint({format_point(self)!r}, spec={self.spec})"


class SampledPoint(AdicPoint):
    """Lazy point whose digit n is drawn uniformly from [0, j_n) keyed by (seed, n)."""

    def __init__(self, spec: RadixSpec, seed: int):
        self.spec = spec
        self.seed = int(seed) & MASK64
        self._digits: List[int] = []
        self._lock = threading.Lock()

    def digit(self, n: int) -> int:
        if n < 1:
            raise UsageError(f"digit index must be >= 1, got {n}")
        with self._lock:
            while len(self._digits) < n:
                k = len(self._digits) + 1
                self._digits.append(_draw_digit(self.seed, k, radix_at(self.spec, k)))
            return self._digits[n - 1]

    def __eq__(self, other):
        if not isinstance(other, SampledPoint):
            return NotImplemented
        return self.spec == other.spec and self.seed == other.seed

    def __hash__(self):
        return hash((self.spec, self.seed))

    def __repr__(self):
        return f"SampledPoint(seed={self.seed}, spec={self.spec})"


@dataclass(frozen=True)
class Cylinder:
    """Points whose first `depth` digits have residue `residue` mod m_depth."""

    spec: RadixSpec
    depth: int
    residue: int

    def __post_init__(self):
        if self.depth < 0:
            raise UsageError(f"cylinder depth must be >= 0, got {self.depth}")
        if not 0 <= self.residue < modulus(self.spec, self.depth):
            raise UsageError(f"residue {self.residue} outside [0, m_{self.depth})")

    @property
    def modulus(self) -> int:
        return modulus(self.spec, self.depth)

    def contains(self, x: AdicPoint) -> bool:
        return x.residue(self.depth) == self.residue

    def intersects(self, other: "Cylinder") -> bool:
        """Two cylinders meet iff one residue extends the other."""
        shallow, deep = sorted((self, other), key=lambda c: c.depth)
        return deep.residue % shallow.modulus == shallow.residue


@dataclass(frozen=True)
class UltraDistance:
    """Value of d_alpha: zero, 2^-n, or known only to be below 2^-n."""

    kind: str
    exponent: int = 0

    ZERO = "zero"
    EXACT = "exact"
    BELOW = "indeterminate-below"

    @property
    def value(self) -> Optional[Fraction]:
        if self.kind == self.ZERO:
            return Fraction(0)
        if self.kind == self.EXACT:
            return Fraction(1, 2 ** self.exponent)
        return None

    def __str__(self):
        if self.kind == self.ZERO:
            return "0"
        if self.kind == self.EXACT:
            return f"2^-{self.exponent}"
        return f"<2^-{self.exponent}"


@dataclass(frozen=True)
class OrbitRelation:
    """Outcome of same_orbit: y = x + offset when same is True."""

    same: bool
    offset: Optional[int] = None


class NotFoundWithinHorizon:
    """Brute-force search ran out of steps."""

    def __init__(self, horizon: int):
        self.horizon = horizon

    def __eq__(self, other):
        return isinstance(other, NotFoundWithinHorizon)

    def __hash__(self):
        return hash(NotFoundWithinHorizon)

    def __repr__(self):
        return f"NotFoundWithinHorizon({self.horizon})"


def _lcm(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


def _canonical(
    spec: RadixSpec, pre: Tuple[int, ...], per: Tuple[int, ...]
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Shortest period, then absorb trailing preperiod digits into the cycle."""
    if not per:
        raise UsageError("point period must be nonempty")
    for p in range(1, len(per) + 1):
        if len(per) % p == 0 and per == per[:p] * (len(per) // p):
            per = per[:p]
            break
    pre = list(pre)
    while pre:
        n = len(pre)
        last = per[-1]
        value = radix_at(spec, n) - 1 if last == MAX_DIGIT else last
        if value != pre[-1]:
            break
        pre.pop()
        per = (last,) + per[:-1]
    return tuple(pre), per


def stable_window(spec: RadixSpec, points: Sequence[ExactPoint]) -> Tuple[int, int]:
    """
    Return (start, cycle) such that for n > start every digit comparison among
    the points (with each other, with 0 and with j_n - 1) repeats with period
    `cycle`.
    """
    start = max(len(p.preperiod) for p in points)
    cycle = _lcm(len(p.period) for p in points)
    if spec.is_eventually_periodic:
        start = max(start, len(spec.preperiod))
        cycle = _lcm([cycle, len(spec.period)])
    else:
        # j_n - 1 >= n for both builtin families
        biggest = max(
            (d for p in points for d in p.preperiod + p.period if d >= 0), default=0
        )
        start = max(start, biggest + 2)
    return start, cycle


def _draw_digit(seed: int, n: int, j: int) -> int:
    """Uniform draw from [0, j) by rejection over a keyed 64-bit hash stream."""
    limit = (1 << 64) - ((1 << 64) % j)
    attempt = 0
    while True:
        h = hashlib.blake2b(
            f"{seed}:{n}:{attempt}".encode(), digest_size=8, person=b"odesc-digit"
        )
        value = int.from_bytes(h.digest(), "little")
        if value < limit:
            return value % j
        attempt += 1


def derive_seed(seed: int, index: int) -> int:
    """Counter-based per-trial seed mix(seed, index)."""
    h = hashlib.blake2b(
        f"{int(seed) & MASK64}:{index}".encode(), digest_size=8, person=b"odesc-trial"
    )
    return int.from_bytes(h.digest(), "little")


def parse_point(text: str, spec: RadixSpec) -> AdicPoint:
    """
    Parse "digits:1,0,1|0" (preperiod 1,0,1 then 0 repeating), "digits:1,0"
    (period only), "digits:|max" (all j_n - 1) or "seed:42".
    """
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        raise UsageError(f"point '{text}' needs a 'digits:' or 'seed:' prefix")
    if kind == "seed":
        try:
            return SampledPoint(spec, int(body))
        except ValueError:
            raise UsageError(f"seed '{body}' is not an integer") from None
    if kind != "digits":
        raise UsageError(f"unknown point kind '{kind}'")
    if body.count("|") > 1:
        raise UsageError(f"point '{text}' has more than one '|'")
    head, _, tail = body.rpartition("|")

    def symbols(chunk: str) -> Tuple[int, ...]:
        if not chunk:
            return ()
        out = []
        for tok in chunk.split(","):
            tok = tok.strip()
            if tok == "max":
                out.append(MAX_DIGIT)
            else:
                try:
                    out.append(int(tok))
                except ValueError:
                    raise UsageError(f"digit '{tok}' is not an integer") from None
        return tuple(out)

    if MAX_DIGIT in symbols(head):
        raise UsageError("'max' is only allowed in the period")
    return ExactPoint(spec, symbols(head), symbols(tail))


def format_point(x: AdicPoint) -> str:
    if isinstance(x, SampledPoint):
        return f"seed:{x.seed}"
    pre = ",".join(str(d) for d in x.preperiod)
    per = ",".join("max" if d == MAX_DIGIT else str(d) for d in x.period)
    return f"digits:{pre}|{per}"


def point_from_residue(spec: RadixSpec, r: int, depth: int) -> ExactPoint:
    """The point with depth-L residue r followed by a zero tail."""
    return ExactPoint(spec, residue_to_digits(spec, r, depth).digits, (0,))


def zero_point(spec: RadixSpec) -> ExactPoint:
    return ExactPoint(spec, (), (0,))


def _with_tail(x: ExactPoint, head: List[int]) -> ExactPoint:
    """Point equal to `head` on its first len(head) digits and to x afterwards."""
    end = max(len(head), len(x.preperiod))
    offset = (end - len(x.preperiod)) % len(x.period)
    if offset:
        end += len(x.period) - offset
    digits = list(head) + [x.digit(n) for n in range(len(head) + 1, end + 1)]
    return ExactPoint(x.spec, tuple(digits), x.period)


def translate(x: AdicPoint, k: int) -> ExactPoint:
    """Return x + k; k = 1 is f_alpha and k = -1 its inverse."""
    if not isinstance(x, ExactPoint):
        raise UsageError("translate needs an exact point; use residues for sampled points")
    k = int(k)
    if k == 0:
        return x
    spec = x.spec
    start, cycle = stable_window(spec, [x])
    depth = depth_exceeding(spec, abs(k), start)
    m = modulus(spec, depth)
    total = x.residue(depth) + k
    carry = total // m
    head = list(residue_to_digits(spec, total % m, depth).digits)
    if carry == 0:
        return _with_tail(x, head)
    # |k| < m_depth, so the carry out is exactly +1 or -1
    for n in range(depth + 1, depth + cycle + 1):
        j = radix_at(spec, n)
        d = x.digit(n)
        if carry > 0 and d != j - 1:
            return _with_tail(x, head + [d + 1])
        if carry < 0 and d != 0:
            return _with_tail(x, head + [d - 1])
        head.append(0 if carry > 0 else j - 1)
    head = head[:depth]
    if carry > 0:
        return ExactPoint(spec, tuple(head), (0,))
    return ExactPoint(spec, tuple(head), (MAX_DIGIT,))


def successor(x: AdicPoint) -> ExactPoint:
    return translate(x, 1)


def predecessor(x: AdicPoint) -> ExactPoint:
    return translate(x, -1)


def distance(x: AdicPoint, y: AdicPoint, depth_cap: int = 64) -> UltraDistance:
    """d_alpha(x, y) = 2^-n for the first differing index n."""
    if x.spec != y.spec:
        raise UsageError("points live on different adding machines")
    if isinstance(x, ExactPoint) and isinstance(y, ExactPoint):
        start, cycle = stable_window(x.spec, [x, y])
        bound = start + cycle
    elif x == y:
        return UltraDistance(UltraDistance.ZERO)
    else:
        bound = depth_cap
    for n in range(1, bound + 1):
        if x.digit(n) != y.digit(n):
            return UltraDistance(UltraDistance.EXACT, n)
    if isinstance(x, ExactPoint) and isinstance(y, ExactPoint):
        return UltraDistance(UltraDistance.ZERO)
    return UltraDistance(UltraDistance.BELOW, depth_cap)


def depth_for_radius(rho: Union[Fraction, int]) -> int:
    """The L >= 0 with 2^-(L+1) < rho <= 2^-L (L = 0 for rho > 1)."""
    rho = Fraction(rho)
    if rho <= 0:
        raise UsageError(f"radius must be positive, got {rho}")
    ratio = rho.denominator // rho.numerator
    return max(ratio.bit_length() - 1, 0)


def ball_to_cylinder(center: AdicPoint, rho: Union[Fraction, int]) -> Cylinder:
    """Canonical cylinder equal to the open ball B_rho(center)."""
    depth = depth_for_radius(rho)
    return Cylinder(center.spec, depth, center.residue(depth))


def first_hit(x: AdicPoint, c: Cylinder) -> int:
    """Least tau >= 0 with f^tau(x) in c, in closed form."""
    return (c.residue - x.residue(c.depth)) % c.modulus


def _step_digits(spec: RadixSpec, digits: List[int], k: int = 1) -> None:
    """In-place +1 (k = 1) or -1 (k = -1) on a finite digit prefix."""
    for i in range(len(digits)):
        j = radix_at(spec, i + 1)
        if k > 0:
            if digits[i] != j - 1:
                digits[i] += 1
                return
            digits[i] = 0
        else:
            if digits[i] != 0:
                digits[i] -= 1
                return
            digits[i] = j - 1


def first_hit_bruteforce(
    x: AdicPoint, c: Cylinder, horizon: int
) -> Union[int, NotFoundWithinHorizon]:
    """Iterate f on the first c.depth digits and compare with the cylinder prefix."""
    if horizon < 1:
        raise UsageError("horizon must be >= 1")
    target = list(residue_to_digits(c.spec, c.residue, c.depth).digits)
    current = list(x.digits(c.depth))
    for step in range(horizon + 1):
        if current == target:
            return step
        _step_digits(c.spec, current)
    return NotFoundWithinHorizon(horizon)


def same_orbit(x: ExactPoint, y: ExactPoint) -> OrbitRelation:
    """Decide whether y = x + k for an integer k, by carry subtraction y - x."""
    if x.spec != y.spec:
        raise UsageError("points live on different adding machines")
    if not (isinstance(x, ExactPoint) and isinstance(y, ExactPoint)):
        raise UsageError("orbit relations are decidable for exact points only")
    spec = x.spec
    start, cycle = stable_window(spec, [x, y])
    # the borrow at cycle boundaries is periodic after two cycles, with period <= 2
    settled = start + 2 * cycle
    end = settled + 2 * cycle
    diff = []
    borrow = 0
    for n in range(1, end + 1):
        j = radix_at(spec, n)
        v = y.digit(n) - x.digit(n) - borrow
        borrow = 1 if v < 0 else 0
        diff.append(v % j)
    window = range(settled + 1, end + 1)
    k = digits_to_residue(spec, diff[:settled])
    if all(diff[n - 1] == 0 for n in window):
        return OrbitRelation(True, k)
    if all(diff[n - 1] == radix_at(spec, n) - 1 for n in window):
        return OrbitRelation(True, k - modulus(spec, settled))
    return OrbitRelation(False)


def verify_cyclic_partition(spec: RadixSpec, i: int) -> bool:
    """
    Finite-depth check of the cyclic clopen covers: f sends depth-i cylinder r
    to r + 1 mod m_i, and each depth-i cylinder splits into j_(i+1) children.
    """
    m = modulus(spec, i)
    for r in range(m):
        image = translate(point_from_residue(spec, r, i), 1)
        if image.residue(i) != (r + 1) % m:
            logger.warning(f"cyclic cover broken at depth {i}: {r} -> {image.residue(i)}")
            return False
    split = radix_at(spec, i + 1)
    children: Dict[Tuple[int, ...], Set[int]] = {}
    for s in range(modulus(spec, i + 1)):
        digits = residue_to_digits(spec, s, i + 1).digits
        children.setdefault(tuple(digits[:i]), set()).add(digits[i])
    parents = {tuple(residue_to_digits(spec, r, i).digits) for r in range(m)}
    if set(children) != parents:
        return False
    return all(len(tails) == split for tails in children.values())


def orbit_visits_each_cylinder(x: AdicPoint, depth: int, backward: bool = False) -> bool:
    """The first m_L iterates of x (under f or f^-1) meet every depth-L cylinder once."""
    spec = x.spec
    m = modulus(spec, depth)
    current = list(x.digits(depth))
    seen = set()
    for _ in range(m):
        seen.add(digits_to_residue(spec, current))
        _step_digits(spec, current, -1 if backward else 1)
    return len(seen) == m


def regular_recurrence_period(x: AdicPoint, depth: int) -> int:
    """Least p > 0 with f^p(x) in the depth-L cylinder of x; always m_L."""
    c = Cylinder(x.spec, depth, x.residue(depth))
    current = list(x.digits(depth))
    _step_digits(x.spec, current)
    shifted = ExactPoint(x.spec, tuple(current), (0,))
    return first_hit(shifted, c) + 1
