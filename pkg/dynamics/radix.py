#!/usr/bin/env python3
"""
Mixed-Radix Arithmetic
Radix sequences alpha = (j_1, j_2, ...), cumulative moduli m_L, carry addition
and digit/residue conversions. Digits are indexed from 1.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from sympy import prime

from dynamics.errors import UsageError

FACTORIAL = "factorial"
PRIMES = "primes"
FAMILIES = (FACTORIAL, PRIMES)


@dataclass(frozen=True)
class RadixSpec:
    """An eventually-periodic radix sequence, or one of the builtin families."""

    preperiod: Tuple[int, ...] = ()
    period: Tuple[int, ...] = ()
    family: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(j) for j in self.preperiod))
        object.__setattr__(self, "period", tuple(int(j) for j in self.period))
        if self.family is not None:
            if self.family not in FAMILIES:
                raise UsageError(f"unknown radix family '{self.family}'")
            if self.preperiod or self.period:
                raise UsageError("a builtin family takes no preperiod or period")
            return
        if not self.period:
            raise UsageError("radix period must be nonempty")
        for j in self.preperiod + self.period:
            if j < 2:
                raise UsageError(f"radix entries must be >= 2, got {j}")

    @classmethod
    def constant(cls, j: int) -> "RadixSpec":
        return cls(period=(j,))

    @classmethod
    def factorial(cls) -> "RadixSpec":
        return cls(family=FACTORIAL)

    @classmethod
    def primes(cls) -> "RadixSpec":
        return cls(family=PRIMES)

    @property
    def is_eventually_periodic(self) -> bool:
        return self.family is None

    def __str__(self) -> str:
        return format_radix_spec(self)


@dataclass(frozen=True)
class DigitVector:
    """A finite truncation (x_1, ..., x_L) of a point of the adding machine."""

    spec: RadixSpec
    digits: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(x) for x in self.digits))
        for n, x in enumerate(self.digits, 1):
            j = radix_at(self.spec, n)
            if not 0 <= x < j:
                raise UsageError(f"digit x_{n}={x} outside [0, {j})")

    @property
    def depth(self) -> int:
        return len(self.digits)


def parse_radix_spec(text: str) -> RadixSpec:
    """
    Parse the radix text syntax: "2" (constant), "2,3|4" (preperiod 2,3 then
    period 4 repeating), "factorial" or "primes".
    """
    text = text.strip()
    if text in FAMILIES:
        return RadixSpec(family=text)
    if text.count("|") > 1:
        raise UsageError(f"radix spec '{text}' has more than one '|'")
    head, _, tail = text.rpartition("|")
    try:
        preperiod = tuple(int(tok) for tok in head.split(",")) if head else ()
        period = tuple(int(tok) for tok in tail.split(",")) if tail else ()
    except ValueError:
        raise UsageError(f"radix spec '{text}' is not a list of integers") from None
    return RadixSpec(preperiod=preperiod, period=period)


def format_radix_spec(spec: RadixSpec) -> str:
    if spec.family is not None:
        return spec.family
    period = ",".join(str(j) for j in spec.period)
    if not spec.preperiod:
        return period
    return ",".join(str(j) for j in spec.preperiod) + "|" + period


def radix_at(spec: RadixSpec, n: int) -> int:
    """Return j_n."""
    if n < 1:
        raise UsageError(f"radix index must be >= 1, got {n}")
    if spec.family == FACTORIAL:
        return n + 1
    if spec.family == PRIMES:
        return int(prime(n))
    if n <= len(spec.preperiod):
        return spec.preperiod[n - 1]
    return spec.period[(n - len(spec.preperiod) - 1) % len(spec.period)]


def prefix(spec: RadixSpec, length: int) -> List[int]:
    """List j_1, ..., j_length."""
    return [radix_at(spec, n) for n in range(1, length + 1)]


@lru_cache(maxsize=4096)
def modulus(spec: RadixSpec, depth: int) -> int:
    """m_L = j_1 * ... * j_L, with m_0 = 1."""
    if depth < 0:
        raise UsageError(f"depth must be >= 0, got {depth}")
    m = 1
    for n in range(1, depth + 1):
        m *= radix_at(spec, n)
    return m


def add_digits(spec: RadixSpec, xs: DigitVector, ys: DigitVector) -> DigitVector:
    """Carry addition at fixed depth; the carry out of position L is dropped."""
    if xs.spec != spec or ys.spec != spec:
        raise UsageError("digit vectors must share the radix spec")
    if xs.depth != ys.depth:
        raise UsageError(f"depth mismatch: {xs.depth} vs {ys.depth}")
    carry = 0
    out = []
    for n, (x, y) in enumerate(zip(xs.digits, ys.digits), 1):
        j = radix_at(spec, n)
        total = x + y + carry
        out.append(total % j)
        carry = total // j
    return DigitVector(spec, tuple(out))


def digits_to_residue(spec: RadixSpec, xs: Sequence[int]) -> int:
    """Positional value sum of x_k * m_(k-1)."""
    if isinstance(xs, DigitVector):
        xs = xs.digits
    value = 0
    weight = 1
    for n, x in enumerate(xs, 1):
        value += x * weight
        weight *= radix_at(spec, n)
    return value


def residue_to_digits(spec: RadixSpec, r: int, depth: int) -> DigitVector:
    """Inverse of digits_to_residue at the given depth."""
    if not 0 <= r < modulus(spec, depth):
        raise UsageError(f"residue {r} outside [0, m_{depth})")
    out = []
    for n in range(1, depth + 1):
        r, x = divmod(r, radix_at(spec, n))
        out.append(x)
    return DigitVector(spec, tuple(out))


def digits_of_integer(spec: RadixSpec, k: int) -> List[int]:
    """Mixed-radix digits of a nonnegative integer, least significant first."""
    if k < 0:
        raise UsageError("digits_of_integer needs k >= 0")
    out = []
    n = 1
    while k:
        k, x = divmod(k, radix_at(spec, n))
        out.append(x)
        n += 1
    return out


def depth_exceeding(spec: RadixSpec, bound: int, start: int = 0) -> int:
    """Smallest depth L >= start with m_L > bound."""
    depth = start
    while modulus(spec, depth) <= bound:
        depth += 1
    return depth
