import math

import pytest

from src.bounds import (GLOBAL_GAP_CEILING, adaptive_greedy_threshold, gap_ceiling, greedy_threshold,
                        kempe_threshold, smsm_threshold, threshold_limits)


def test_values_at_two():
    assert greedy_threshold(2) == pytest.approx(0.375)
    assert adaptive_greedy_threshold(2) == pytest.approx(0.4375)
    assert smsm_threshold(2) == pytest.approx(0.5)
    assert gap_ceiling(2) == pytest.approx(8 / 3)


def test_single_seed():
    assert greedy_threshold(1) == pytest.approx(0.5)
    assert adaptive_greedy_threshold(1) == pytest.approx(0.5)
    assert gap_ceiling(1) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        smsm_threshold(1)


@pytest.mark.parametrize("k", [2, 3, 5, 10, 100])
def test_thresholds_decrease_towards_their_limits(k):
    assert greedy_threshold(k) >= greedy_threshold(k + 1) >= 0.5 * (1 - 1 / math.e)
    assert adaptive_greedy_threshold(k) >= adaptive_greedy_threshold(k + 1) >= 1 - 1 / math.sqrt(math.e)
    assert gap_ceiling(k) <= gap_ceiling(k + 1) <= GLOBAL_GAP_CEILING


def test_threshold_limits():
    limits = threshold_limits()
    assert set(limits) == {"greedy", "adaptive_greedy", "smsm", "gap"}
    for name, entry in limits.items():
        assert entry["ok"], name
    assert GLOBAL_GAP_CEILING == pytest.approx(3.164, abs=1e-3)
    assert kempe_threshold() == pytest.approx(0.6321, abs=1e-4)


def test_threshold_limits_fail_at_small_k():
    assert not threshold_limits(k=2)["greedy"]["ok"]
