"""Exact access-pattern probabilities by sequential conditioning.

The probability of an observed pattern factors into four conditional pieces,
one per event type, processed in the order: singly-occupied high RBs, then
singly-occupied low RBs, then empty RBs, then collision RBs. After an RB is
accounted for, the selection vectors are renormalized over the RBs still in
play (conditioning a categorical distribution on "not that RB" rescales the
remaining entries by the leftover mass), and the UEs it consumed are removed
from the remaining counts.

The collision piece has no closed form: the leftover UEs must fill every
collision RB with at least two occupants, so it sums over all ways to split
them (per-RB totals, then per-RB high counts), walking the RBs sequentially
for each split.

Everything here is computed per (pattern, hypothesis) pair in log domain.
It is deliberately straightforward; :mod:`rachload.surface` provides the
vectorized whole-grid equivalent for estimator workloads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterator

from .logprob import LogProb, log_binomial
from .model import (
    AccessPattern,
    LoadHypothesis,
    ObservationSet,
    PatternIndexSets,
    SelectionProfile,
    derive_index_sets,
    feasibility_check,
)

_MODES = ("full", "reduced")


@dataclass(frozen=True)
class RenormalizationState:
    """Remaining UE counts and renormalized selection vectors mid-walk.

    Entries of already-processed RBs are exactly 0. Each vector either sums
    to 1 (within rounding) or is all-zero, the latter meaning its class has
    no selection mass left (exhausted).
    """

    remaining_high: int
    remaining_low: int
    p_high_hat: tuple[float, ...]
    p_low_hat: tuple[float, ...]

    @property
    def high_exhausted(self) -> bool:
        return all(v == 0.0 for v in self.p_high_hat)

    @property
    def low_exhausted(self) -> bool:
        return all(v == 0.0 for v in self.p_low_hat)


def initial_state(
    hypothesis: LoadHypothesis, profile: SelectionProfile
) -> RenormalizationState:
    """State before any RB has been processed."""
    return RenormalizationState(
        remaining_high=hypothesis.n_high,
        remaining_low=hypothesis.n_low,
        p_high_hat=profile.p_high,
        p_low_hat=profile.p_low,
    )


def _renormalize(vec: tuple[float, ...], rb: int) -> tuple[float, ...]:
    """Zero entry ``rb`` and rescale the rest to sum to one.

    The rescaling divisor is the sum of the surviving entries (all
    non-negative), so it is exactly zero only when no mass survives, in which
    case the vector goes all-zero (exhausted) rather than dividing by zero.
    """
    survivors = sum(v for i, v in enumerate(vec) if i != rb)
    if survivors == 0.0:
        return tuple(0.0 for _ in vec)
    return tuple(0.0 if i == rb else v / survivors for i, v in enumerate(vec))


def renormalize_after_removal(state: RenormalizationState, rb: int) -> RenormalizationState:
    """Condition both selection vectors on "not RB ``rb``"."""
    if not 0 <= rb < len(state.p_high_hat):
        raise IndexError(f"RB index {rb} out of range")
    return replace(
        state,
        p_high_hat=_renormalize(state.p_high_hat, rb),
        p_low_hat=_renormalize(state.p_low_hat, rb),
    )


def high_factor(
    sets: PatternIndexSets, state: RenormalizationState
) -> tuple[LogProb, RenormalizationState]:
    """Probability that each high-single RB holds exactly one high UE, alone.

    Walks the high-single RBs in ascending order. At each one, with ``N``
    high UEs still unplaced: one of them picks this RB, the other ``N - 1``
    avoid it, and every remaining low UE avoids it too. The chosen UE is then
    consumed and the vectors are conditioned on the RB being settled.
    """
    z = LogProb.one()
    for rb in sets.high:
        n_high = state.remaining_high
        alpha = state.p_high_hat[rb]
        beta = state.p_low_hat[rb]
        z = (
            z
            * LogProb.from_float(float(n_high))
            * LogProb.from_float(alpha)
            * LogProb.power(1.0 - alpha, n_high - 1)
            * LogProb.power(1.0 - beta, state.remaining_low)
        )
        state = replace(
            renormalize_after_removal(state, rb), remaining_high=n_high - 1
        )
        if z.is_zero:
            break
    return z, state


def low_factor(
    sets: PatternIndexSets, state: RenormalizationState
) -> tuple[LogProb, RenormalizationState]:
    """Probability that each low-single RB holds exactly one low UE, alone.

    Mirror of :func:`high_factor` with the classes swapped; the high count is
    already down to its leftover value and stays fixed through this phase.
    """
    z = LogProb.one()
    for rb in sets.low:
        n_low = state.remaining_low
        gamma = state.p_low_hat[rb]
        delta = state.p_high_hat[rb]
        z = (
            z
            * LogProb.from_float(float(n_low))
            * LogProb.from_float(gamma)
            * LogProb.power(1.0 - gamma, n_low - 1)
            * LogProb.power(1.0 - delta, state.remaining_high)
        )
        state = replace(
            renormalize_after_removal(state, rb), remaining_low=n_low - 1
        )
        if z.is_zero:
            break
    return z, state


def empty_factor(
    sets: PatternIndexSets, state: RenormalizationState
) -> tuple[LogProb, RenormalizationState]:
    """Probability that every leftover UE avoids each empty RB."""
    z = LogProb.one()
    for rb in sets.empty:
        z = (
            z
            * LogProb.power(1.0 - state.p_high_hat[rb], state.remaining_high)
            * LogProb.power(1.0 - state.p_low_hat[rb], state.remaining_low)
        )
        state = renormalize_after_removal(state, rb)
        if z.is_zero:
            break
    return z, state


@lru_cache(maxsize=None)
def enumerate_collision_totals(
    num_collision_rbs: int, total_ues: int
) -> tuple[tuple[int, ...], ...]:
    """All per-RB occupant totals: each at least 2, summing to ``total_ues``.

    Returned in ascending lexicographic order. Zero RBs admit exactly the
    empty split when there are no UEs to place, and nothing otherwise.
    """
    if num_collision_rbs == 0:
        return ((),) if total_ues == 0 else ()
    if total_ues < 2 * num_collision_rbs:
        return ()
    out = []
    for first in range(2, total_ues - 2 * (num_collision_rbs - 1) + 1):
        for rest in enumerate_collision_totals(num_collision_rbs - 1, total_ues - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_high_splits(
    totals: tuple[int, ...], remaining_high: int, remaining_low: int
) -> tuple[tuple[int, ...], ...]:
    """All per-RB high-UE counts consistent with ``totals`` and the leftovers.

    Each entry is bounded by its RB total, the high counts sum to
    ``remaining_high`` and the complementary low counts to ``remaining_low``.
    Ascending lexicographic order; empty when the leftovers cannot fit.
    """
    if remaining_high < 0 or remaining_low < 0:
        return ()
    if sum(totals) != remaining_high + remaining_low:
        return ()
    if not totals:
        return ((),)
    first_total, rest = totals[0], totals[1:]
    out = []
    lo = max(0, first_total - remaining_low)
    hi = min(first_total, remaining_high)
    for first_high in range(lo, hi + 1):
        for tail in enumerate_high_splits(
            rest, remaining_high - first_high, remaining_low - (first_total - first_high)
        ):
            out.append((first_high,) + tail)
    return tuple(out)


@dataclass(frozen=True)
class CollisionComposition:
    """One way to fill the collision RBs: per-RB totals and high counts."""

    totals: tuple[int, ...]
    highs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.totals) != len(self.highs):
            raise ValueError("totals and highs disagree on RB count")
        for total, high in zip(self.totals, self.highs):
            if total < 2:
                raise ValueError("every collision RB holds at least two UEs")
            if not 0 <= high <= total:
                raise ValueError("high count must lie within the RB total")

    @property
    def lows(self) -> tuple[int, ...]:
        return tuple(t - h for t, h in zip(self.totals, self.highs))


def collision_compositions(
    num_collision_rbs: int, remaining_high: int, remaining_low: int
) -> Iterator[CollisionComposition]:
    """Enumerate every feasible :class:`CollisionComposition`."""
    total = remaining_high + remaining_low
    for totals in enumerate_collision_totals(num_collision_rbs, total):
        for highs in enumerate_high_splits(totals, remaining_high, remaining_low):
            yield CollisionComposition(totals=totals, highs=highs)


def collision_factor(sets: PatternIndexSets, state: RenormalizationState) -> LogProb:
    """Probability that the leftover UEs jam every collision RB.

    ``state`` must already be conditioned on all non-collision RBs (its
    vectors carry mass only on the collision set). For each feasible split
    of the leftovers, the collision RBs are walked in ascending order:
    a binomial term places this RB's share of each class, the shares are
    consumed, and the vectors are conditioned onward. The factor is the sum
    over all splits.
    """
    x_rbs = sets.collision
    if not x_rbs:
        return LogProb.one()
    rem_high, rem_low = state.remaining_high, state.remaining_low
    total = rem_high + rem_low
    acc = LogProb.zero()
    for totals in enumerate_collision_totals(len(x_rbs), total):
        for highs in enumerate_high_splits(totals, rem_high, rem_low):
            term = LogProb.one()
            p_high, p_low = state.p_high_hat, state.p_low_hat
            nh, nl = rem_high, rem_low
            for pos, rb in enumerate(x_rbs):
                k_high = highs[pos]
                k_low = totals[pos] - k_high
                qh, ql = p_high[rb], p_low[rb]
                term = (
                    term
                    * LogProb.from_log(log_binomial(nh, k_high))
                    * LogProb.power(qh, k_high)
                    * LogProb.power(1.0 - qh, nh - k_high)
                    * LogProb.from_log(log_binomial(nl, k_low))
                    * LogProb.power(ql, k_low)
                    * LogProb.power(1.0 - ql, nl - k_low)
                )
                if term.is_zero:
                    break
                nh -= k_high
                nl -= k_low
                p_high = _renormalize(p_high, rb)
                p_low = _renormalize(p_low, rb)
            acc = acc + term
    return acc


def _checked_sets(
    pattern: AccessPattern, profile: SelectionProfile
) -> PatternIndexSets:
    if pattern.num_rbs != profile.num_rbs:
        raise ValueError(
            f"pattern has {pattern.num_rbs} RBs but profile has {profile.num_rbs}"
        )
    return derive_index_sets(pattern)


def pattern_probability(
    pattern: AccessPattern, hypothesis: LoadHypothesis, profile: SelectionProfile
) -> LogProb:
    """Exact probability of observing ``pattern`` under the hypothesis.

    Infeasible (pattern, hypothesis) pairs get probability zero, not an
    error: the estimators rely on scoring them as impossible.
    """
    sets = _checked_sets(pattern, profile)
    if not feasibility_check(sets, hypothesis):
        return LogProb.zero()
    z, state = high_factor(sets, initial_state(hypothesis, profile))
    if z.is_zero:
        return z
    z_low, state = low_factor(sets, state)
    z = z * z_low
    if z.is_zero:
        return z
    z_empty, state = empty_factor(sets, state)
    z = z * z_empty
    if z.is_zero:
        return z
    return z * collision_factor(sets, state)


def reduced_pattern_probability(
    pattern: AccessPattern, hypothesis: LoadHypothesis, profile: SelectionProfile
) -> LogProb:
    """Pattern score with the collision factor dropped.

    Identical to :func:`pattern_probability` when the pattern has no
    collisions; otherwise an upper-bound surrogate that is far cheaper to
    evaluate because it skips the composition sum. Feasibility is still
    enforced, so an all-collision pattern scores 1 for every hypothesis with
    enough UEs.
    """
    sets = _checked_sets(pattern, profile)
    if not feasibility_check(sets, hypothesis):
        return LogProb.zero()
    z, state = high_factor(sets, initial_state(hypothesis, profile))
    if z.is_zero:
        return z
    z_low, state = low_factor(sets, state)
    z = z * z_low
    if z.is_zero:
        return z
    z_empty, _ = empty_factor(sets, state)
    return z * z_empty


def sequence_log_likelihood(
    observations: ObservationSet,
    hypothesis: LoadHypothesis,
    profile: SelectionProfile,
    mode: str = "full",
) -> LogProb:
    """Joint log-likelihood of independent slots under one hypothesis."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    if observations.num_rbs != profile.num_rbs:
        raise ValueError(
            f"observations have {observations.num_rbs} RBs but profile has {profile.num_rbs}"
        )
    score = pattern_probability if mode == "full" else reduced_pattern_probability
    total = LogProb.one()
    for pattern in observations:
        total = total * score(pattern, hypothesis, profile)
        if total.is_zero:
            break
    return total
