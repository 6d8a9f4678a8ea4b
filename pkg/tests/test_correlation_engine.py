# tests/test_correlation_engine.py

import os
import random
import sys
from fractions import Fraction

import pytest

# Ensure project root is on sys.path
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(ROOT_DIR)

from construction.schedule import ConstructionSchedule, ExplicitSpacers, LevelSet  # noqa: E402
from correlation.engine import (  # noqa: E402
    CorrelationEngine,
    WordOracle,
    correlation_bruteforce,
    correlation_exact,
)
from tools.errors import ToleranceUnreachable  # noqa: E402


def small_schedule():
    # W3 = 0 0 s 0 0 s 0 0 s s s
    schedule = ConstructionSchedule(h1=1)
    schedule.advance_stage(2, ExplicitSpacers(values=(0, 1)))
    schedule.advance_stage(3, ExplicitSpacers(values=(0, 0, 2)))
    return schedule


def random_case(rnd):
    schedule = ConstructionSchedule(h1=rnd.randint(1, 3))
    for _ in range(rnd.randint(2, 4)):
        r = rnd.randint(2, 3)
        schedule.advance_stage(r, ExplicitSpacers(values=tuple(rnd.randint(0, 3) for _ in range(r))))
    n = rnd.randint(1, 2)
    h_n = schedule.height(n)

    def pick():
        chosen = sorted(rnd.sample(range(h_n), rnd.randint(1, h_n)))
        return LevelSet.from_indices(n, chosen)

    return schedule, pick(), pick()


def test_hand_computed_values():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    assert correlation_exact(schedule, A, A, 0).lo == 1
    one = correlation_exact(schedule, A, A, 1)
    assert (one.lo, one.hi, one.stage) == (Fraction(1, 2), Fraction(1, 2), 2)
    three = correlation_exact(schedule, A, A, 3)
    assert three.is_exact and three.lo == Fraction(2, 3) and three.stage == 3


def test_exact_matches_bruteforce_on_random_schedules():
    rnd = random.Random(20240601)
    for _ in range(100):
        schedule, A, B = random_case(rnd)
        J = schedule.last_stage
        engine = CorrelationEngine(schedule, A, B)
        oracle = WordOracle(schedule, A, B, J)
        for m in range(schedule.height(J) + 2):
            exact = engine.window(m, J)
            brute = oracle.correlate(m)
            assert (exact.lo, exact.hi) == (brute.lo, brute.hi), (schedule, A, B, m)


def test_reversed_orientation_matches_swapped_oracle():
    rnd = random.Random(7)
    for _ in range(30):
        schedule, A, B = random_case(rnd)
        J = schedule.last_stage
        engine = CorrelationEngine(schedule, A, B)
        swapped = WordOracle(schedule, B, A, J)
        for m in range(1, schedule.height(J)):
            assert engine.pair_count(J, m, forward=False) == swapped.counts(m)[0]
            assert engine.pair_count(J, -m) == swapped.counts(m)[0]


def test_self_correlation_is_symmetric():
    rnd = random.Random(11)
    for _ in range(20):
        schedule, A, _ = random_case(rnd)
        J = schedule.last_stage
        engine = CorrelationEngine(schedule, A, A)
        for m in range(schedule.height(J)):
            assert engine.pair_count(J, m) == engine.pair_count(J, -m)


def test_certified_width_never_grows():
    rnd = random.Random(3)
    for _ in range(30):
        schedule, A, B = random_case(rnd)
        engine = CorrelationEngine(schedule, A, B)
        for m in range(1, schedule.height(schedule.last_stage)):
            windows = [engine.window(m, J) for J in range(engine.n, schedule.last_stage + 1)]
            for before, after in zip(windows, windows[1:]):
                assert after.width <= before.width
                assert after.lo >= before.lo
                assert after.hi <= before.hi


def test_lag_zero_gives_intersection():
    schedule = small_schedule()
    A = LevelSet.parse("2:0-1")
    B = LevelSet.parse("2:1-2")
    result = correlation_exact(schedule, A, B, 0)
    assert result.lo == schedule.width(2)


def test_tolerance_unreachable_carries_best_result():
    # no spacers above the last copy: the top of the tower never resolves
    schedule = ConstructionSchedule(h1=2)
    schedule.advance_stage(2, ExplicitSpacers(values=(0, 0)))
    A = LevelSet.parse("1:1")
    engine = CorrelationEngine(schedule, A, A)
    with pytest.raises(ToleranceUnreachable) as info:
        engine.correlate(1)
    best = info.value.result
    assert best.stage == 2 and best.width > 0
    relaxed = engine.correlate(1, tolerance=Fraction(1))
    assert relaxed.lo <= relaxed.hi


def test_memo_cap_bounds_cache():
    rnd = random.Random(17)
    schedule, A, B = random_case(rnd)
    capped = CorrelationEngine(schedule, A, B, memo_cap=3)
    free = CorrelationEngine(schedule, A, B)
    J = schedule.last_stage
    for m in range(schedule.height(J)):
        assert capped.pair_count(J, m) == free.pair_count(J, m)
    assert capped.memo_size <= 3


def test_bruteforce_wrapper():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    result = correlation_bruteforce(schedule, A, A, 3, 3)
    assert result.method == "brute-force" and result.lo == Fraction(2, 3)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
