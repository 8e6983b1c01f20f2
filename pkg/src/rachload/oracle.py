"""Brute-force pattern distribution by occupancy enumeration.

Independent verification path for the sequential engine: enumerate every
per-class occupancy count vector (stars and bars), weight it by its exact
multinomial probability, classify what the base station would see, and
accumulate. No renormalization, no conditioning — just the definition.

Intended for small instances; the budget guard rejects anything whose raw
assignment space ``M ** (n_high + n_low)`` exceeds a configurable cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .model import (
    AccessPattern,
    LoadHypothesis,
    SelectionProfile,
    classify_occupancy,
)

DEFAULT_BUDGET = 10**8


class EnumerationBudgetError(RuntimeError):
    """Raised when an instance is too large to enumerate exhaustively."""


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ways to write ``total`` as ``parts`` ordered non-negative ints."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial_coefficient(counts: tuple[int, ...]) -> int:
    coeff = math.factorial(sum(counts))
    for c in counts:
        coeff //= math.factorial(c)
    return coeff


def _count_vector_weight(counts: tuple[int, ...], probs: tuple[float, ...]) -> float:
    """Exact-integer multinomial coefficient times the profile powers."""
    weight = float(_multinomial_coefficient(counts))
    for c, p in zip(counts, probs):
        if c:
            if p == 0.0:
                return 0.0
            weight *= p**c
    return weight


@dataclass(frozen=True)
class PatternDistribution:
    """Probability of every pattern a (hypothesis, profile) pair can emit."""

    hypothesis: LoadHypothesis
    profile: SelectionProfile
    probs: dict[AccessPattern, float] = field(compare=False)

    def probability(self, pattern: AccessPattern) -> float:
        return self.probs.get(pattern, 0.0)

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def items(self):
        return self.probs.items()


def exhaustive_pattern_distribution(
    hypothesis: LoadHypothesis,
    profile: SelectionProfile,
    budget: int = DEFAULT_BUDGET,
) -> PatternDistribution:
    """Enumerate the full pattern distribution for one hypothesis.

    Contributions are gathered per pattern and reduced with ``math.fsum``
    (compensated summation) so the totals are trustworthy to use as a
    reference.
    """
    m = profile.num_rbs
    if m ** (hypothesis.total) > budget:
        raise EnumerationBudgetError(
            f"assignment space {m}**{hypothesis.total} exceeds budget {budget}"
        )
    low_side = [
        (counts, weight)
        for counts in compositions(hypothesis.n_low, m)
        if (weight := _count_vector_weight(counts, profile.p_low)) > 0.0
    ]
    buckets: dict[AccessPattern, list[float]] = {}
    for high_counts in compositions(hypothesis.n_high, m):
        w_high = _count_vector_weight(high_counts, profile.p_high)
        if w_high == 0.0:
            continue
        for low_counts, w_low in low_side:
            pattern = classify_occupancy(high_counts, low_counts)
            buckets.setdefault(pattern, []).append(w_high * w_low)
    probs = {pattern: math.fsum(parts) for pattern, parts in buckets.items()}
    return PatternDistribution(hypothesis=hypothesis, profile=profile, probs=probs)


@lru_cache(maxsize=256)
def _cached_distribution(
    hypothesis: LoadHypothesis, profile: SelectionProfile, budget: int
) -> PatternDistribution:
    return exhaustive_pattern_distribution(hypothesis, profile, budget)


def enumerated_pattern_probability(
    pattern: AccessPattern,
    hypothesis: LoadHypothesis,
    profile: SelectionProfile,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """Probability of one pattern straight from the exhaustive distribution."""
    if pattern.num_rbs != profile.num_rbs:
        raise ValueError(
            f"pattern has {pattern.num_rbs} RBs but profile has {profile.num_rbs}"
        )
    return _cached_distribution(hypothesis, profile, budget).probability(pattern)
