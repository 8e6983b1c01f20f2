"""Whole-grid pattern log-likelihoods, vectorized over the hypothesis grid.

The sequential factorization walks RBs in a fixed order, and the conditioned
selection probability used at each step depends only on the pattern and the
profile, never on the hypothesised UE counts. The counts enter only through
permutation prefactors and avoidance exponents, so the single-occupancy and
empty factors separate into a function of ``n_high`` plus a function of
``n_low`` and can be evaluated for every grid cell with a handful of vector
operations.

The collision factor is the probability that the leftover UEs of both
classes, thrown independently over the collision RBs, give every one of them
at least two occupants while consuming exactly the leftovers. That is
computed by a backward dynamic program over (leftover high, leftover low):
per RB the unconstrained placement update is separable (two small matrix
products against binomial transition matrices), and the "at least two"
constraint is restored by subtracting the three transitions that put fewer
than two UEs on the RB. One sweep yields the factor for every cell at once.

This path is validated cell-by-cell against the sequential reference in
:mod:`rachload.engine`; see the test suite.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .model import (
    AccessPattern,
    PatternIndexSets,
    SelectionProfile,
    derive_index_sets,
)

_NEG_INF = float("-inf")


@lru_cache(maxsize=64)
def _binomial_table(size: int) -> np.ndarray:
    """table[n, k] = C(n, k) for 0 <= n, k < size (0 where k > n)."""
    table = np.zeros((size, size), dtype=np.float64)
    for n in range(size):
        for k in range(n + 1):
            table[n, k] = math.comb(n, k)
    table.setflags(write=False)
    return table


def _step_probabilities(
    values: np.ndarray, tail_mass: float
) -> np.ndarray:
    """Conditioned selection probability of each RB at its removal step.

    ``values`` holds the original probabilities in removal order and
    ``tail_mass`` the total mass of RBs that are never removed. The divisor
    is a sum of non-negative terms, so it is zero exactly when no mass
    remains, in which case the step probability is defined as 0 (exhausted).
    """
    if len(values) == 0:
        return values
    suffix = np.cumsum(values[::-1])[::-1] + tail_mass
    safe = np.where(suffix > 0.0, suffix, 1.0)
    return np.where(suffix > 0.0, values / safe, 0.0)


def _transition_matrix(n_max: int, q: float, table: np.ndarray) -> np.ndarray:
    """T[n, n'] = P(exactly n - n' of n independent trials hit; n' remain)."""
    counts = np.arange(n_max + 1)
    placed = counts[:, None] - counts[None, :]
    placed_clipped = np.clip(placed, 0, None)
    with np.errstate(invalid="ignore"):
        t = (
            table[counts[:, None], placed_clipped]
            * np.power(q, placed_clipped)
            * np.power(1.0 - q, counts[None, :])
        )
    return np.where(placed >= 0, t, 0.0)


def collision_factor_grid(
    collision_rbs: tuple[int, ...],
    profile: SelectionProfile,
    max_spare_high: int,
    max_spare_low: int,
) -> np.ndarray:
    """P(every collision RB gets >= 2 occupants) for every leftover pair.

    Returns ``G`` with ``G[a, b]`` the collision factor when ``a`` high and
    ``b`` low UEs remain to be placed, for all ``a <= max_spare_high`` and
    ``b <= max_spare_low``. Backward DP; the terminal state requires every
    leftover consumed, which also zeroes branches whose class mass runs out.
    """
    num_rbs = len(collision_rbs)
    idx = list(collision_rbs)
    q_high = _step_probabilities(
        np.asarray([profile.p_high[rb] for rb in idx], dtype=np.float64), 0.0
    )
    q_low = _step_probabilities(
        np.asarray([profile.p_low[rb] for rb in idx], dtype=np.float64), 0.0
    )
    table = _binomial_table(max(max_spare_high, max_spare_low) + 1)
    g = np.zeros((max_spare_high + 1, max_spare_low + 1))
    g[0, 0] = 1.0
    for j in reversed(range(num_rbs)):
        t_high = _transition_matrix(max_spare_high, float(q_high[j]), table)
        t_low = _transition_matrix(max_spare_low, float(q_low[j]), table)
        unconstrained = t_high @ g @ t_low.T
        diag_h = t_high.diagonal()
        diag_l = t_low.diagonal()
        # transitions placing 0 or 1 UEs on this RB are not collisions
        both_zero = diag_h[:, None] * diag_l[None, :] * g
        one_high = np.zeros_like(g)
        one_high[1:, :] = (
            t_high.diagonal(offset=-1)[:, None] * diag_l[None, :] * g[:-1, :]
        )
        one_low = np.zeros_like(g)
        one_low[:, 1:] = (
            diag_h[:, None] * t_low.diagonal(offset=-1)[None, :] * g[:, :-1]
        )
        g = np.maximum(unconstrained - both_zero - one_high - one_low, 0.0)
    return g


def _exponent_term(exponents: np.ndarray, log_base: float) -> np.ndarray:
    """``exponents * log_base`` with the 0 * (-inf) = 0 convention."""
    with np.errstate(invalid="ignore"):
        return np.where(exponents == 0, 0.0, exponents * log_base)


def _log1p_neg(q: float) -> float:
    """log(1 - q), -inf when the whole mass sits on the removed RB."""
    if q >= 1.0:
        return _NEG_INF
    return math.log1p(-q)


def pattern_log_likelihood_grid(
    pattern: AccessPattern,
    profile: SelectionProfile,
    n_high_max: int,
    n_low_max: int,
    mode: str = "full",
) -> np.ndarray:
    """log P(pattern | n_high, n_low) for every cell of the hypothesis grid.

    Shape ``(n_high_max + 1, n_low_max + 1)``; impossible cells hold -inf.
    ``mode="reduced"`` drops the collision factor (feasibility is still
    enforced), matching the reduced per-pattern score.
    """
    if mode not in ("full", "reduced"):
        raise ValueError(f"mode must be 'full' or 'reduced', got {mode!r}")
    if pattern.num_rbs != profile.num_rbs:
        raise ValueError(
            f"pattern has {pattern.num_rbs} RBs but profile has {profile.num_rbs}"
        )
    sets = derive_index_sets(pattern)
    return _grid_for_sets(sets, profile, n_high_max, n_low_max, mode)


def _grid_for_sets(
    sets: PatternIndexSets,
    profile: SelectionProfile,
    n_high_max: int,
    n_low_max: int,
    mode: str,
) -> np.ndarray:
    num_high, num_low, num_coll = sets.num_high, sets.num_low, sets.num_collision
    nh = np.arange(n_high_max + 1, dtype=np.float64)
    nl = np.arange(n_low_max + 1, dtype=np.float64)

    order = [*sets.high, *sets.low, *sets.empty]
    p_high_seq = np.asarray([profile.p_high[rb] for rb in order], dtype=np.float64)
    p_low_seq = np.asarray([profile.p_low[rb] for rb in order], dtype=np.float64)
    tail_high = float(sum(profile.p_high[rb] for rb in sets.collision))
    tail_low = float(sum(profile.p_low[rb] for rb in sets.collision))
    step_high = _step_probabilities(p_high_seq, tail_high)
    step_low = _step_probabilities(p_low_seq, tail_low)

    const = 0.0
    row = np.zeros_like(nh)  # terms depending on n_high only
    col = np.zeros_like(nl)  # terms depending on n_low only

    with np.errstate(invalid="ignore", divide="ignore"):
        # high singles: one pick + avoidance by the other highs, per step
        avoid_low_agg = 0.0
        for step in range(num_high):
            alpha = float(step_high[step])
            const += math.log(alpha) if alpha > 0.0 else _NEG_INF
            row += _exponent_term(nh - (step + 1), _log1p_neg(alpha))
            avoid_low_agg += _log1p_neg(float(step_low[step]))
        if num_high:
            row += gammaln(nh + 1) - gammaln(nh - num_high + 1)
            col += _exponent_term(nl, avoid_low_agg)

        # low singles: classes swapped, spare high count fixed at nh - H
        avoid_high_agg = 0.0
        for step in range(num_high, num_high + num_low):
            gamma = float(step_low[step])
            const += math.log(gamma) if gamma > 0.0 else _NEG_INF
            col += _exponent_term(nl - (step - num_high + 1), _log1p_neg(gamma))
            avoid_high_agg += _log1p_neg(float(step_high[step]))
        if num_low:
            col += gammaln(nl + 1) - gammaln(nl - num_low + 1)
            row += _exponent_term(nh - num_high, avoid_high_agg)

        # empty RBs: every spare UE of each class avoids them
        empty_high_agg = 0.0
        empty_low_agg = 0.0
        for step in range(num_high + num_low, len(order)):
            empty_high_agg += _log1p_neg(float(step_high[step]))
            empty_low_agg += _log1p_neg(float(step_low[step]))
        if sets.empty:
            row += _exponent_term(nh - num_high, empty_high_agg)
            col += _exponent_term(nl - num_low, empty_low_agg)

        out = const + row[:, None] + col[None, :]

        if mode == "full" and num_coll and n_high_max >= num_high and n_low_max >= num_low:
            g = collision_factor_grid(
                sets.collision, profile, n_high_max - num_high, n_low_max - num_low
            )
            coll = np.full_like(out, _NEG_INF)
            coll[num_high:, num_low:] = np.log(g)
            out = out + coll

    spare_high = np.arange(n_high_max + 1) - num_high
    spare_low = np.arange(n_low_max + 1) - num_low
    spare_total = spare_high[:, None] + spare_low[None, :]
    feasible = (spare_high >= 0)[:, None] & (spare_low >= 0)[None, :]
    if num_coll == 0:
        feasible &= spare_total == 0
    else:
        feasible &= spare_total >= 2 * num_coll
    return np.where(feasible, out, _NEG_INF)
