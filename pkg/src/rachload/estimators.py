"""Maximum-likelihood load estimation over a hypothesis grid.

Both estimators score every (n_high, n_low) cell of a rectangular grid
against the observed slots and return the argmax. The full estimator uses
exact pattern probabilities; the reduced estimator drops the collision
factor, trading accuracy on collision-heavy data for a large speedup.

Ties are broken deterministically: smallest total count first, then smallest
high count. A grid too small for what was observed is widened automatically
(with a warning); if no cell can explain the observations at all, estimation
fails with a diagnosis of the binding constraint.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .engine import sequence_log_likelihood
from .model import (
    LoadHypothesis,
    ObservationSet,
    SelectionProfile,
    derive_index_sets,
)
from .surface import pattern_log_likelihood_grid

_NEG_INF = float("-inf")

GRID_SCALE = 3  # default per-class maximum as a multiple of the RB count


class NoFeasibleHypothesisError(RuntimeError):
    """No grid cell assigns the observations non-zero probability."""


@dataclass(frozen=True)
class HypothesisGrid:
    """Inclusive per-class bounds of the candidate (n_high, n_low) cells."""

    n_high_max: int
    n_low_max: int

    def __post_init__(self) -> None:
        if self.n_high_max < 0 or self.n_low_max < 0:
            raise ValueError("grid maxima must be non-negative")

    @classmethod
    def default_for(cls, num_rbs: int) -> "HypothesisGrid":
        """Covers heavy overloading (3x the RB count per class) with margin."""
        return cls(n_high_max=GRID_SCALE * num_rbs, n_low_max=GRID_SCALE * num_rbs)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_high_max + 1, self.n_low_max + 1)


def implied_grid_minimums(observations: ObservationSet) -> tuple[int, int, int]:
    """Per-class and total lower bounds any explaining hypothesis must meet."""
    need_high = 0
    need_low = 0
    need_total = 0
    for pattern in observations:
        sets = derive_index_sets(pattern)
        need_high = max(need_high, sets.num_high)
        need_low = max(need_low, sets.num_low)
        need_total = max(
            need_total, sets.num_high + sets.num_low + 2 * sets.num_collision
        )
    return need_high, need_low, need_total


def widen_for_observations(
    grid: HypothesisGrid, observations: ObservationSet
) -> HypothesisGrid:
    """Grow the grid until it can hold every hypothesis the data allows."""
    need_high, need_low, need_total = implied_grid_minimums(observations)
    gh = max(grid.n_high_max, need_high)
    gl = max(grid.n_low_max, need_low)
    while gh + gl < need_total:  # grow the smaller side, high on ties
        if gh <= gl:
            gh += 1
        else:
            gl += 1
    if (gh, gl) != (grid.n_high_max, grid.n_low_max):
        warnings.warn(
            f"hypothesis grid widened from ({grid.n_high_max}, {grid.n_low_max}) "
            f"to ({gh}, {gl}) to cover the observed patterns",
            RuntimeWarning,
            stacklevel=2,
        )
        return HypothesisGrid(gh, gl)
    return grid


@dataclass(frozen=True)
class LikelihoodSurface:
    """Joint log-likelihood of the observations at every grid cell.

    ``values[i, j]`` scores hypothesis (n_high=i, n_low=j); cells that cannot
    produce the observations hold -inf.
    """

    grid: HypothesisGrid
    mode: str
    values: np.ndarray

    def best_hypothesis(self) -> LoadHypothesis:
        """Argmax cell; ties go to the smallest total, then smallest high."""
        peak = self.values.max()
        if peak == _NEG_INF:
            raise NoFeasibleHypothesisError(
                "every grid cell scores the observations as impossible"
            )
        candidates = np.argwhere(self.values == peak)
        i, j = min(candidates.tolist(), key=lambda ij: (ij[0] + ij[1], ij[0]))
        return LoadHypothesis(n_high=int(i), n_low=int(j))

    def write_csv(self, path) -> None:
        """Rows are n_high, columns n_low; impossible cells read ``-inf``."""
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n_high"] + [str(j) for j in range(self.values.shape[1])])
            for i, rowvals in enumerate(self.values):
                writer.writerow([str(i)] + [str(float(v)) for v in rowvals])


def likelihood_surface(
    observations: ObservationSet,
    profile: SelectionProfile,
    grid: HypothesisGrid | None = None,
    mode: str = "full",
    method: str = "fast",
) -> LikelihoodSurface:
    """Score every grid cell against the observations.

    ``method="fast"`` evaluates each distinct pattern once over the whole
    grid (vectorized); ``method="reference"`` calls the sequential engine per
    cell and exists to cross-check the fast path.
    """
    if observations.num_rbs != profile.num_rbs:
        raise ValueError(
            f"observations have {observations.num_rbs} RBs but profile has "
            f"{profile.num_rbs}"
        )
    if grid is None:
        grid = HypothesisGrid.default_for(profile.num_rbs)
    grid = widen_for_observations(grid, observations)
    if method == "fast":
        values = np.zeros(grid.shape)
        for pattern, count in Counter(observations.patterns).items():
            values += count * pattern_log_likelihood_grid(
                pattern, profile, grid.n_high_max, grid.n_low_max, mode
            )
    elif method == "reference":
        values = np.empty(grid.shape)
        for i in range(grid.n_high_max + 1):
            for j in range(grid.n_low_max + 1):
                values[i, j] = sequence_log_likelihood(
                    observations, LoadHypothesis(i, j), profile, mode
                ).to_log()
    else:
        raise ValueError(f"method must be 'fast' or 'reference', got {method!r}")
    return LikelihoodSurface(grid=grid, mode=mode, values=values)


def _diagnose_infeasible(
    observations: ObservationSet, profile: SelectionProfile, grid: HypothesisGrid
) -> str:
    """Name the constraint that rules out every hypothesis."""
    issues: list[str] = []
    exact_totals: set[int] = set()
    min_total = 0
    for pattern in set(observations.patterns):
        sets = derive_index_sets(pattern)
        singles = sets.num_high + sets.num_low
        if sets.num_collision == 0:
            exact_totals.add(singles)
        else:
            min_total = max(min_total, singles + 2 * sets.num_collision)
        for rb in sets.high:
            if profile.p_high[rb] == 0.0:
                issues.append(
                    f"a slot shows a lone high UE on RB {rb} but p_high[{rb}] is 0"
                )
        for rb in sets.low:
            if profile.p_low[rb] == 0.0:
                issues.append(
                    f"a slot shows a lone low UE on RB {rb} but p_low[{rb}] is 0"
                )
        for rb in sets.collision:
            if profile.p_high[rb] == 0.0 and profile.p_low[rb] == 0.0:
                issues.append(
                    f"a slot shows a collision on RB {rb} but both classes have "
                    f"zero probability there"
                )
    if len(exact_totals) > 1:
        issues.append(
            "collision-free slots pin the total load to conflicting values "
            f"{sorted(exact_totals)}"
        )
    if exact_totals and min_total > max(exact_totals):
        issues.append(
            f"a collision-free slot pins the total load to {max(exact_totals)} "
            f"but another slot requires at least {min_total}"
        )
    need_high, need_low, need_total = implied_grid_minimums(observations)
    if (
        need_high > grid.n_high_max
        or need_low > grid.n_low_max
        or need_total > grid.n_high_max + grid.n_low_max
    ):
        issues.append(
            f"grid ({grid.n_high_max}, {grid.n_low_max}) is smaller than the "
            f"implied minimums (high >= {need_high}, low >= {need_low}, "
            f"total >= {need_total})"
        )
    if not issues:
        issues.append("the observed patterns are mutually inconsistent")
    return "no feasible hypothesis: " + "; ".join(issues)


def _estimate(
    observations: ObservationSet,
    profile: SelectionProfile,
    grid: HypothesisGrid | None,
    mode: str,
) -> LoadHypothesis:
    surface = likelihood_surface(observations, profile, grid, mode=mode)
    try:
        return surface.best_hypothesis()
    except NoFeasibleHypothesisError:
        raise NoFeasibleHypothesisError(
            _diagnose_infeasible(observations, profile, surface.grid)
        ) from None


def ml_estimate(
    observations: ObservationSet,
    profile: SelectionProfile,
    grid: HypothesisGrid | None = None,
) -> LoadHypothesis:
    """Exact maximum-likelihood estimate of the per-class UE counts."""
    return _estimate(observations, profile, grid, "full")


def rcml_estimate(
    observations: ObservationSet,
    profile: SelectionProfile,
    grid: HypothesisGrid | None = None,
) -> LoadHypothesis:
    """Reduced-complexity estimate: the collision factor is not computed."""
    return _estimate(observations, profile, grid, "reduced")
