"""Log-domain probability arithmetic with an explicit zero.

Pattern probabilities are products of many factors (and sums of such
products), some astronomically small, so everything is carried as a log
value. Probability zero is represented by ``-inf``, which is absorbing under
multiplication and the identity under addition, exactly as required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class LogProb:
    """A probability stored as its natural log; ``-inf`` encodes exact zero."""

    log_value: float

    def __post_init__(self) -> None:
        if math.isnan(self.log_value):
            raise ValueError("log probability cannot be NaN")

    @classmethod
    def zero(cls) -> "LogProb":
        return cls(_NEG_INF)

    @classmethod
    def one(cls) -> "LogProb":
        return cls(0.0)

    @classmethod
    def from_float(cls, value: float) -> "LogProb":
        if value < 0.0:
            raise ValueError(f"probability cannot be negative: {value!r}")
        if value == 0.0:
            return cls.zero()
        return cls(math.log(value))

    @classmethod
    def from_log(cls, log_value: float) -> "LogProb":
        return cls(log_value)

    @classmethod
    def power(cls, base: float, exponent: int) -> "LogProb":
        """``base ** exponent`` for a linear-domain base, with 0**0 == 1."""
        if exponent == 0:
            return cls.one()
        if base <= 0.0:
            # tiny negative drift from renormalization counts as zero mass
            return cls.zero()
        return cls(exponent * math.log(base))

    @property
    def is_zero(self) -> bool:
        return self.log_value == _NEG_INF

    def __mul__(self, other: "LogProb") -> "LogProb":
        return LogProb(self.log_value + other.log_value)

    def __pow__(self, exponent: int) -> "LogProb":
        if exponent == 0:
            return LogProb.one()
        if self.is_zero:
            return LogProb.zero()
        return LogProb(self.log_value * exponent)

    def __add__(self, other: "LogProb") -> "LogProb":
        """Probability addition via log-sum-exp."""
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        hi = max(self.log_value, other.log_value)
        lo = min(self.log_value, other.log_value)
        return LogProb(hi + math.log1p(math.exp(lo - hi)))

    def to_float(self) -> float:
        return 0.0 if self.is_zero else math.exp(self.log_value)

    def to_log(self) -> float:
        return self.log_value


@lru_cache(maxsize=None)
def log_binomial(n: int, k: int) -> float:
    """log of C(n, k) via log-gamma; -inf outside the valid range."""
    if k < 0 or k > n or n < 0:
        return _NEG_INF
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
