"""Slot simulator with reproducible, order-independent random streams.

Every slot draws from its own numpy ``Generator`` seeded by
``SeedSequence([base_seed, *context, trial, slot])``, so the pattern sampled
for a given (configuration point, trial, slot) never depends on how many
slots, trials or worker threads ran before it. Within a slot, high-class
UEs are drawn before low-class UEs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    AccessPattern,
    LoadHypothesis,
    ObservationSet,
    SelectionProfile,
    classify_occupancy,
)


@dataclass(frozen=True)
class SimulationSeed:
    """Root of the deterministic stream hierarchy.

    ``context`` distinguishes experiment points (for the harness:
    ``(n_high, n_low, t)``) so that every point resamples independently.
    All components must be non-negative integers.
    """

    base_seed: int
    context: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.base_seed < 0:
            raise ValueError("base_seed must be non-negative")
        if any(c < 0 for c in self.context):
            raise ValueError("context components must be non-negative")

    def with_context(self, *context: int) -> "SimulationSeed":
        return SimulationSeed(self.base_seed, tuple(int(c) for c in context))

    def stream(self, trial: int, slot: int) -> np.random.Generator:
        """Independent generator for one slot of one trial."""
        if trial < 0 or slot < 0:
            raise ValueError("trial and slot indices must be non-negative")
        entropy = [self.base_seed, *self.context, trial, slot]
        return np.random.default_rng(np.random.SeedSequence(entropy))


def _draw_rb_counts(
    probs: tuple[float, ...], num_ues: int, rng: np.random.Generator
) -> np.ndarray:
    """Occupancy counts from inverse-CDF sampling over the selection vector."""
    m = len(probs)
    if num_ues == 0:
        return np.zeros(m, dtype=np.int64)
    cumulative = np.cumsum(np.asarray(probs, dtype=np.float64))
    draws = np.searchsorted(cumulative, rng.random(num_ues), side="right")
    draws = np.minimum(draws, m - 1)  # guard the cumsum-rounding edge at 1.0
    return np.bincount(draws, minlength=m)


def sample_pattern(
    hypothesis: LoadHypothesis,
    profile: SelectionProfile,
    rng: np.random.Generator,
) -> AccessPattern:
    """Sample the pattern the base station would observe for one slot."""
    high_counts = _draw_rb_counts(profile.p_high, hypothesis.n_high, rng)
    low_counts = _draw_rb_counts(profile.p_low, hypothesis.n_low, rng)
    return classify_occupancy(high_counts.tolist(), low_counts.tolist())


def sample_observations(
    hypothesis: LoadHypothesis,
    profile: SelectionProfile,
    num_slots: int,
    seed: SimulationSeed,
    trial: int = 0,
) -> ObservationSet:
    """Observe ``num_slots`` independent slots for one trial."""
    if num_slots < 1:
        raise ValueError("need at least one slot")
    patterns = tuple(
        sample_pattern(hypothesis, profile, seed.stream(trial, slot))
        for slot in range(num_slots)
    )
    return ObservationSet(patterns)
