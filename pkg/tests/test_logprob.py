"""Unit tests for log-domain probability arithmetic."""

from __future__ import annotations

import math

import pytest

from rachload.logprob import LogProb, log_binomial


def test_zero_is_absorbing_under_multiplication() -> None:
    half = LogProb.from_float(0.5)
    assert (LogProb.zero() * half).is_zero
    assert (half * LogProb.zero()).is_zero


def test_one_is_multiplicative_identity() -> None:
    p = LogProb.from_float(0.37)
    assert (LogProb.one() * p).log_value == pytest.approx(p.log_value, abs=0.0)


def test_multiplication_adds_logs() -> None:
    a, b = LogProb.from_float(0.25), LogProb.from_float(0.5)
    assert (a * b).to_float() == pytest.approx(0.125, rel=1e-15)


def test_addition_is_logsumexp() -> None:
    a, b = LogProb.from_float(0.25), LogProb.from_float(0.5)
    assert (a + b).to_float() == pytest.approx(0.75, rel=1e-15)


def test_addition_with_zero_is_identity() -> None:
    p = LogProb.from_float(0.125)
    assert (p + LogProb.zero()).log_value == p.log_value
    assert (LogProb.zero() + p).log_value == p.log_value
    assert (LogProb.zero() + LogProb.zero()).is_zero


def test_addition_survives_extreme_underflow() -> None:
    tiny = LogProb.from_log(-800.0)
    total = tiny + tiny
    assert total.log_value == pytest.approx(-800.0 + math.log(2.0), rel=1e-15)
    assert tiny.to_float() == 0.0  # underflows in linear domain, kept in log


def test_power_convention_zero_to_the_zero_is_one() -> None:
    assert LogProb.power(0.0, 0).log_value == 0.0
    assert LogProb.power(0.7, 0).log_value == 0.0


def test_power_of_zero_base_is_zero() -> None:
    assert LogProb.power(0.0, 3).is_zero
    # tiny negative drift from float renormalization is clamped to zero mass
    assert LogProb.power(-1e-18, 2).is_zero


def test_power_matches_linear_domain() -> None:
    assert LogProb.power(0.25, 3).to_float() == pytest.approx(0.25**3, rel=1e-14)


def test_int_power_operator() -> None:
    p = LogProb.from_float(0.5)
    assert (p**4).to_float() == pytest.approx(0.0625, rel=1e-14)
    assert (LogProb.zero() ** 0).log_value == 0.0
    assert (LogProb.zero() ** 2).is_zero


def test_from_float_rejects_negative() -> None:
    with pytest.raises(ValueError):
        LogProb.from_float(-0.1)


def test_nan_rejected() -> None:
    with pytest.raises(ValueError):
        LogProb(float("nan"))


def test_round_trip() -> None:
    for value in (0.0, 1e-300, 0.127, 1.0):
        assert LogProb.from_float(value).to_float() == pytest.approx(value, rel=1e-12)


def test_log_binomial_matches_exact_combinatorics() -> None:
    for n in range(0, 30):
        for k in range(0, n + 1):
            assert log_binomial(n, k) == pytest.approx(
                math.log(math.comb(n, k)), rel=1e-12, abs=1e-12
            )


def test_log_binomial_out_of_range_is_zero_mass() -> None:
    assert log_binomial(3, 5) == float("-inf")
    assert log_binomial(3, -1) == float("-inf")
    assert log_binomial(-2, 0) == float("-inf")
