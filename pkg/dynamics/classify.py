#!/usr/bin/env python3
"""
Conjugacy Classification
M_alpha(p) = total power of p across the radix sequence. Two adding machines
are topologically conjugate iff their M functions agree.
"""

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple, Union

from sympy import factorint, nextprime

from dynamics.radix import RadixSpec


@dataclass(frozen=True)
class PrimeCountFunction:
    """M_alpha as finite counts, a finite set of infinite primes, zero elsewhere."""

    finite_counts: Tuple[Tuple[int, int], ...] = ()
    infinite_primes: FrozenSet[int] = frozenset()
    every_prime_infinite: bool = False

    def __post_init__(self):
        overlap = {p for p, _ in self.finite_counts} & set(self.infinite_primes)
        if overlap:
            raise ValueError(f"primes {sorted(overlap)} are both finite and infinite")

    def count(self, p: int) -> Union[int, float]:
        if self.every_prime_infinite or p in self.infinite_primes:
            return math.inf
        return dict(self.finite_counts).get(p, 0)

    def is_infinite(self, p: int) -> bool:
        return self.count(p) == math.inf

    def support(self) -> FrozenSet[int]:
        """Primes with a nonzero count, when that set is finite."""
        return frozenset(p for p, _ in self.finite_counts) | self.infinite_primes


def factor_entry(j: int) -> Dict[int, int]:
    return {int(p): int(e) for p, e in factorint(j).items()}


def compute_M(spec: RadixSpec) -> PrimeCountFunction:
    """M_alpha for an eventually-periodic spec or a builtin family."""
    if not spec.is_eventually_periodic:
        # every prime divides n + 1, and is the n-th prime, for some n
        return PrimeCountFunction(every_prime_infinite=True)
    infinite = set()
    for j in spec.period:
        infinite.update(factor_entry(j))
    finite: Dict[int, int] = {}
    for j in spec.preperiod:
        for p, e in factor_entry(j).items():
            if p not in infinite:
                finite[p] = finite.get(p, 0) + e
    return PrimeCountFunction(
        finite_counts=tuple(sorted(finite.items())),
        infinite_primes=frozenset(infinite),
    )


def witness_prime(a: RadixSpec, b: RadixSpec) -> Optional[int]:
    """Least prime p with M_a(p) != M_b(p), or None when the machines are conjugate."""
    ma, mb = compute_M(a), compute_M(b)
    if ma == mb:
        return None
    if ma.every_prime_infinite or mb.every_prime_infinite:
        p = 2
        while ma.count(p) == mb.count(p):
            p = int(nextprime(p))
        return p
    for p in sorted(ma.support() | mb.support()):
        if ma.count(p) != mb.count(p):
            return p
    return None


def conjugate(a: RadixSpec, b: RadixSpec) -> bool:
    return compute_M(a) == compute_M(b)


def is_infinity_adic(spec: RadixSpec) -> bool:
    """True iff M(p) is infinite for every prime p."""
    return compute_M(spec).every_prime_infinite


def format_M(m: PrimeCountFunction) -> str:
    if m.every_prime_infinite:
        return "{all primes: inf}"
    counts = dict(m.finite_counts)
    counts.update({p: math.inf for p in m.infinite_primes})
    body = ", ".join(
        f"{p}: {'inf' if counts[p] == math.inf else counts[p]}" for p in sorted(counts)
    )
    return "{" + body + "}"
