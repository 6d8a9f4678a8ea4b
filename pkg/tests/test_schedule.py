# tests/test_schedule.py

import os
import sys
from fractions import Fraction

import numpy as np
import pytest

# Ensure project root is on sys.path
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(ROOT_DIR)

from construction.schedule import (  # noqa: E402
    ConstructionSchedule,
    ExplicitSpacers,
    LastColumnSpacers,
    LevelSet,
    RepeatedStaircaseSpacers,
    StaircaseSpacers,
    TwoColumnSpacers,
    common_stage,
)
from construction.schedule_io import parse_schedule, serialize_schedule  # noqa: E402
from construction.words import SPACER, format_label, level_label, materialize_word  # noqa: E402
from tools.errors import ConfigError, LevelSetError, ScheduleError, WordTooLong  # noqa: E402


def small_schedule(mode="infinite", measure_bound=None):
    # W2 = l0 l0 s, W3 = W2 W2 W2 s s
    schedule = ConstructionSchedule(h1=1, mode=mode, measure_bound=measure_bound)
    schedule.advance_stage(2, ExplicitSpacers(values=(0, 1)))
    schedule.advance_stage(3, ExplicitSpacers(values=(0, 0, 2)))
    return schedule


def test_spacer_expansion():
    assert LastColumnSpacers(s=7).expand(4) == (0, 0, 0, 7)
    assert TwoColumnSpacers(s=5).expand(2) == (0, 5)
    assert StaircaseSpacers(q=3).expand(3) == (1, 2, 3)
    assert RepeatedStaircaseSpacers(n=2, q=3).expand(6) == (1, 2, 3, 1, 2, 3)


def test_spacer_column_mismatch_rejected():
    schedule = ConstructionSchedule(h1=1)
    with pytest.raises(ScheduleError):
        schedule.advance_stage(3, ExplicitSpacers(values=(0, 1)))
    with pytest.raises(ScheduleError):
        schedule.advance_stage(3, StaircaseSpacers(q=2))
    with pytest.raises(ScheduleError):
        schedule.advance_stage(1, ExplicitSpacers(values=(0,)))
    assert schedule.last_stage == 1


def test_height_and_width_recursion():
    schedule = small_schedule()
    assert schedule.heights() == (1, 3, 11)
    assert schedule.width(2) == Fraction(1, 2)
    assert schedule.width(3) == Fraction(1, 6)
    assert schedule.offsets(1) == (0, 1)
    assert schedule.offsets(2) == (0, 3, 6)
    assert schedule.multiplicity(1, 3) == 6
    schedule.check_recursions()


def test_big_integer_heights_stay_exact():
    schedule = ConstructionSchedule(h1=1)
    for j in range(1, 12):
        schedule.advance_stage(max(j, 2), LastColumnSpacers(s=10 ** (3 * j)))
    h = 1
    for j in range(1, 12):
        h = h * max(j, 2) + 10 ** (3 * j)
    assert schedule.height(12) == h
    assert h > 2 ** 64


def test_stage_measure_is_exact():
    schedule = small_schedule()
    assert schedule.stage_measure(1) == 1
    assert schedule.stage_measure(2) == Fraction(3, 2)
    assert schedule.stage_measure(3) == Fraction(11, 6)
    report = schedule.check_measure_mode()
    assert report["ok"] and report["strictly_increasing"]


def test_finite_mode_bound_is_enforced():
    ok = small_schedule(mode="finite", measure_bound=Fraction(2))
    assert ok.check_measure_mode()["ok"]
    assert ok.total_measure() == Fraction(11, 6)

    with pytest.raises(ScheduleError):
        small_schedule(mode="finite", measure_bound=Fraction(11, 6))
    with pytest.raises(ScheduleError):
        ConstructionSchedule(h1=1, mode="finite")


def test_level_label_matches_word():
    schedule = small_schedule()
    word = materialize_word(schedule, 3, 1)
    assert word.tolist() == [0, 0, SPACER, 0, 0, SPACER, 0, 0, SPACER, SPACER, SPACER]
    for p in range(schedule.height(3)):
        assert level_label(schedule, 3, p, 1) == word[p]
    word2 = materialize_word(schedule, 3, 2)
    assert word2.tolist() == [0, 1, 2, 0, 1, 2, 0, 1, 2, SPACER, SPACER]
    assert format_label(SPACER) == "s" and format_label(2) == "l2"


def test_level_label_random_schedules_agree_with_word():
    rng = np.random.default_rng(5)
    for _ in range(20):
        schedule = ConstructionSchedule(h1=int(rng.integers(1, 4)))
        for _ in range(3):
            r = int(rng.integers(2, 4))
            schedule.advance_stage(r, ExplicitSpacers(values=tuple(int(x) for x in rng.integers(0, 4, size=r))))
        J = schedule.last_stage
        for n in range(1, J + 1):
            word = materialize_word(schedule, J, n)
            positions = rng.integers(0, schedule.height(J), size=10)
            for p in positions:
                assert level_label(schedule, J, int(p), n) == word[int(p)]


def test_level_label_range_errors():
    schedule = small_schedule()
    with pytest.raises(ScheduleError):
        level_label(schedule, 3, 11, 1)
    with pytest.raises(ScheduleError):
        level_label(schedule, 2, 0, 3)
    with pytest.raises(ScheduleError):
        schedule.height(4)


def test_materialize_guard():
    schedule = small_schedule()
    with pytest.raises(WordTooLong):
        materialize_word(schedule, 3, 1, max_len=10)


def test_level_set_parse_format_and_lift():
    levels = LevelSet.parse("2:0-1")
    assert levels.ranges == ((0, 2),)
    assert levels.format() == "2:0-1"
    assert LevelSet.parse("2:2,0").format() == "2:0,2"

    schedule = small_schedule()
    lifted = levels.lift(schedule, 3)
    assert lifted.ranges == ((0, 2), (3, 5), (6, 8))
    assert lifted.measure(schedule) == levels.measure(schedule) == 1
    assert lifted.contains(4) and not lifted.contains(5)

    other = LevelSet.from_indices(3, [1, 2, 9])
    a, b = common_stage(schedule, levels, other)
    assert a.intersection_count(b) == 1
    assert not a.is_disjoint(b)


def test_level_set_validation():
    schedule = small_schedule()
    with pytest.raises(LevelSetError):
        LevelSet.parse("2:0-5").validate_for(schedule)
    with pytest.raises(LevelSetError):
        LevelSet.parse("4:0").validate_for(schedule)
    with pytest.raises(LevelSetError):
        LevelSet.parse("two:0")


def test_schedule_file_roundtrip():
    schedule = small_schedule(mode="finite", measure_bound=Fraction(3))
    schedule.advance_stage(2, StaircaseSpacers(q=2))
    text = serialize_schedule(schedule)
    again = parse_schedule(text)
    assert again.heights() == schedule.heights()
    assert serialize_schedule(again) == text
    assert '"schema": "rankone-schedule/1"' in text


def test_schedule_file_rejects_unknown_keys():
    text = '{"schema": "rankone-schedule/1", "h1": 1, "stages": [], "colour": "red"}'
    with pytest.raises(ConfigError):
        parse_schedule(text)
    with pytest.raises(ConfigError):
        parse_schedule('{"schema": "rankone-schedule/2", "h1": 1, "stages": []}')


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
