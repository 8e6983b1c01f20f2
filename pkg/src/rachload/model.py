"""Domain types for two-priority random-access channels.

A base station offers M resource blocks (RBs) per slot. Each high-priority
UE picks one RB according to a selection probability vector, each
low-priority UE likewise with its own vector. The base station cannot count
occupants; it only observes, per RB, one of four events:

* ``h``  exactly one high-priority UE and nothing else,
* ``l``  exactly one low-priority UE and nothing else,
* ``e``  empty,
* ``x``  collision (two or more UEs of any mix).

A slot's M events form an access pattern, the only evidence available for
estimating how many UEs of each class are active.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence


class RbEvent(enum.Enum):
    """Observable outcome of a single resource block in one slot."""

    SINGLE_HIGH = "h"
    SINGLE_LOW = "l"
    EMPTY = "e"
    COLLISION = "x"

    def __repr__(self) -> str:  # compact: RbEvent('x') noise adds nothing
        return f"RbEvent.{self.name}"


_EVENT_BY_CHAR = {ev.value: ev for ev in RbEvent}


class PatternFormatError(ValueError):
    """Raised when pattern text contains characters outside ``hlex``."""


@dataclass(frozen=True)
class AccessPattern:
    """One slot's observed events, indexed by RB (zero-based)."""

    events: tuple[RbEvent, ...]

    def __post_init__(self) -> None:
        if len(self.events) == 0:
            raise ValueError("access pattern needs at least one resource block")
        if not all(isinstance(ev, RbEvent) for ev in self.events):
            raise TypeError("pattern events must be RbEvent values")

    @property
    def num_rbs(self) -> int:
        return len(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


def parse_pattern(text: str) -> AccessPattern:
    """Parse ``hlex`` text (e.g. ``"hxel"``) into an :class:`AccessPattern`.

    Raises :class:`PatternFormatError` naming the first offending position.
    """
    if not text:
        raise PatternFormatError("empty pattern text")
    events = []
    for pos, ch in enumerate(text):
        ev = _EVENT_BY_CHAR.get(ch)
        if ev is None:
            raise PatternFormatError(
                f"invalid event character {ch!r} at position {pos}; expected one of 'hlex'"
            )
        events.append(ev)
    return AccessPattern(tuple(events))


def format_pattern(pattern: AccessPattern) -> str:
    """Inverse of :func:`parse_pattern`."""
    return "".join(ev.value for ev in pattern.events)


@dataclass(frozen=True)
class PatternIndexSets:
    """RB indices of a pattern grouped by event, each tuple sorted ascending.

    The four tuples partition ``range(num_rbs)``.
    """

    high: tuple[int, ...]
    low: tuple[int, ...]
    empty: tuple[int, ...]
    collision: tuple[int, ...]

    def __post_init__(self) -> None:
        combined = (*self.high, *self.low, *self.empty, *self.collision)
        if sorted(combined) != list(range(len(combined))):
            raise ValueError("index sets must partition the RB index range")
        for group in (self.high, self.low, self.empty, self.collision):
            if list(group) != sorted(group):
                raise ValueError("index sets must be sorted ascending")

    @property
    def num_rbs(self) -> int:
        return len(self.high) + len(self.low) + len(self.empty) + len(self.collision)

    @property
    def num_high(self) -> int:
        return len(self.high)

    @property
    def num_low(self) -> int:
        return len(self.low)

    @property
    def num_collision(self) -> int:
        return len(self.collision)


def derive_index_sets(pattern: AccessPattern) -> PatternIndexSets:
    """Split a pattern into the index sets of its four event types."""
    groups: dict[RbEvent, list[int]] = {ev: [] for ev in RbEvent}
    for rb, ev in enumerate(pattern.events):
        groups[ev].append(rb)
    return PatternIndexSets(
        high=tuple(groups[RbEvent.SINGLE_HIGH]),
        low=tuple(groups[RbEvent.SINGLE_LOW]),
        empty=tuple(groups[RbEvent.EMPTY]),
        collision=tuple(groups[RbEvent.COLLISION]),
    )


def classify_occupancy(
    high_counts: Sequence[int], low_counts: Sequence[int]
) -> AccessPattern:
    """Map per-RB occupant counts to the pattern a base station would observe.

    An RB holding one high UE and nothing else reads ``h``; one low UE alone
    reads ``l``; no occupants reads ``e``; two or more occupants of any class
    mix read ``x`` (a lone high plus a lone low is a collision).
    """
    if len(high_counts) != len(low_counts):
        raise ValueError(
            f"count vectors disagree on RB count: {len(high_counts)} != {len(low_counts)}"
        )
    events = []
    for rb, (ch, cl) in enumerate(zip(high_counts, low_counts)):
        if ch < 0 or cl < 0:
            raise ValueError(f"negative occupancy count at RB {rb}")
        total = ch + cl
        if total == 0:
            events.append(RbEvent.EMPTY)
        elif total == 1:
            events.append(RbEvent.SINGLE_HIGH if ch == 1 else RbEvent.SINGLE_LOW)
        else:
            events.append(RbEvent.COLLISION)
    return AccessPattern(tuple(events))


@dataclass(frozen=True)
class LoadHypothesis:
    """Candidate (or true) number of active UEs per class."""

    n_high: int
    n_low: int

    def __post_init__(self) -> None:
        if self.n_high < 0 or self.n_low < 0:
            raise ValueError("UE counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n_high + self.n_low


@dataclass(frozen=True)
class SelectionProfile:
    """Per-class RB selection probability vectors, each summing to one.

    Entries may be zero (a class may be barred from some RBs) but the vectors
    must have the same length and each must sum to 1 within 1e-9.
    """

    p_high: tuple[float, ...]
    p_low: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.p_high) != len(self.p_low):
            raise ValueError("selection vectors disagree on RB count")
        if len(self.p_high) == 0:
            raise ValueError("selection profile needs at least one RB")
        for name, vec in (("p_high", self.p_high), ("p_low", self.p_low)):
            if any(v < 0.0 or v > 1.0 for v in vec):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            total = sum(vec)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1 (got {total!r})")

    @property
    def num_rbs(self) -> int:
        return len(self.p_high)

    @classmethod
    def uniform(cls, num_rbs: int) -> "SelectionProfile":
        """Both classes uniform over ``num_rbs`` resource blocks."""
        if num_rbs < 1:
            raise ValueError("need at least one RB")
        vec = tuple(1.0 / num_rbs for _ in range(num_rbs))
        return cls(p_high=vec, p_low=vec)

    @classmethod
    def from_vectors(
        cls, p_high: Iterable[float], p_low: Iterable[float]
    ) -> "SelectionProfile":
        return cls(p_high=tuple(float(v) for v in p_high), p_low=tuple(float(v) for v in p_low))


@dataclass(frozen=True)
class ObservationSet:
    """Patterns observed over T independent slots (same RB count each)."""

    patterns: tuple[AccessPattern, ...]

    def __post_init__(self) -> None:
        if len(self.patterns) == 0:
            raise ValueError("observation set needs at least one slot")
        m = self.patterns[0].num_rbs
        if any(p.num_rbs != m for p in self.patterns):
            raise ValueError("all observed patterns must share the same RB count")

    @property
    def num_slots(self) -> int:
        return len(self.patterns)

    @property
    def num_rbs(self) -> int:
        return self.patterns[0].num_rbs

    def __iter__(self):
        return iter(self.patterns)


def feasibility_check(sets: PatternIndexSets, hypothesis: LoadHypothesis) -> bool:
    """Whether a hypothesis can produce a pattern with these index sets.

    Each singly-occupied RB consumes one UE of its class, so the hypothesis
    must supply at least that many. UEs beyond the singles must all sit in
    collision RBs, each of which needs at least two occupants; with no
    collision RBs there must be no UEs left over.
    """
    spare_high = hypothesis.n_high - sets.num_high
    spare_low = hypothesis.n_low - sets.num_low
    if spare_high < 0 or spare_low < 0:
        return False
    spare = spare_high + spare_low
    if sets.num_collision == 0:
        return spare == 0
    return spare >= 2 * sets.num_collision
