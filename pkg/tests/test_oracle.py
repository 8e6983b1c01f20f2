"""Unit tests for the brute-force enumeration reference."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from rachload.model import LoadHypothesis, SelectionProfile, parse_pattern
from rachload.oracle import (
    EnumerationBudgetError,
    compositions,
    enumerated_pattern_probability,
    exhaustive_pattern_distribution,
)


def test_compositions_enumerate_stars_and_bars() -> None:
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(compositions(0, 3)) == [(0, 0, 0)]
    assert list(compositions(3, 1)) == [(3,)]
    assert list(compositions(0, 0)) == [()]
    assert list(compositions(2, 0)) == []


def test_compositions_count_matches_binomial_identity() -> None:
    for total in range(0, 7):
        for parts in range(1, 5):
            expected = math.comb(total + parts - 1, parts - 1)
            assert sum(1 for _ in compositions(total, parts)) == expected


def test_distribution_sums_to_one() -> None:
    profile = SelectionProfile.from_vectors([0.5, 0.3, 0.2], [0.2, 0.3, 0.5])
    for n_high, n_low in [(0, 0), (2, 1), (3, 3)]:
        dist = exhaustive_pattern_distribution(LoadHypothesis(n_high, n_low), profile)
        assert dist.total() == pytest.approx(1.0, abs=1e-12)


def test_zero_load_distribution_is_all_empty() -> None:
    dist = exhaustive_pattern_distribution(LoadHypothesis(0, 0), SelectionProfile.uniform(2))
    assert dist.probability(parse_pattern("ee")) == pytest.approx(1.0, abs=0.0)
    assert dist.probability(parse_pattern("hl")) == 0.0


def test_known_two_rb_distribution() -> None:
    """(2, 0) on two uniform RBs: hh with 1/2, else one collision side each."""
    dist = exhaustive_pattern_distribution(LoadHypothesis(2, 0), SelectionProfile.uniform(2))
    assert dist.probability(parse_pattern("hh")) == pytest.approx(0.5, abs=1e-15)
    assert dist.probability(parse_pattern("xe")) == pytest.approx(0.25, abs=1e-15)
    assert dist.probability(parse_pattern("ex")) == pytest.approx(0.25, abs=1e-15)
    assert dist.probability(parse_pattern("hl")) == 0.0


def test_matches_exact_rational_enumeration() -> None:
    """Cross-check against a per-assignment Fraction enumeration."""
    p_high = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    p_low = [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
    profile = SelectionProfile.from_vectors(
        [float(v) for v in p_high], [float(v) for v in p_low]
    )
    hypothesis = LoadHypothesis(2, 1)
    exact: dict[str, Fraction] = {}
    for high_picks in itertools.product(range(3), repeat=2):
        for low_picks in itertools.product(range(3), repeat=1):
            weight = math.prod(
                (p_high[rb] for rb in high_picks), start=Fraction(1)
            ) * math.prod((p_low[rb] for rb in low_picks), start=Fraction(1))
            high_counts = [high_picks.count(rb) for rb in range(3)]
            low_counts = [low_picks.count(rb) for rb in range(3)]
            events = []
            for ch, cl in zip(high_counts, low_counts):
                if ch + cl == 0:
                    events.append("e")
                elif ch + cl == 1:
                    events.append("h" if ch else "l")
                else:
                    events.append("x")
            key = "".join(events)
            exact[key] = exact.get(key, Fraction(0)) + weight
    dist = exhaustive_pattern_distribution(hypothesis, profile)
    for text, value in exact.items():
        assert dist.probability(parse_pattern(text)) == pytest.approx(
            float(value), rel=1e-13
        )
    assert sum(exact.values()) == Fraction(1)


def test_budget_guard_rejects_large_instances() -> None:
    with pytest.raises(EnumerationBudgetError, match="budget"):
        exhaustive_pattern_distribution(
            LoadHypothesis(20, 20), SelectionProfile.uniform(6), budget=10**6
        )


def test_lookup_function_and_width_check() -> None:
    profile = SelectionProfile.uniform(2)
    value = enumerated_pattern_probability(parse_pattern("xe"), LoadHypothesis(2, 0), profile)
    assert value == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(ValueError, match="RBs"):
        enumerated_pattern_probability(parse_pattern("x"), LoadHypothesis(2, 0), profile)


def test_zero_probability_rbs_never_appear_occupied() -> None:
    profile = SelectionProfile.from_vectors([1.0, 0.0], [1.0, 0.0])
    dist = exhaustive_pattern_distribution(LoadHypothesis(1, 1), profile)
    assert dist.probability(parse_pattern("xe")) == pytest.approx(1.0, abs=1e-15)
    assert dist.total() == pytest.approx(1.0, abs=1e-15)
