# correlation/engine.py

import logging
import threading
from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from construction.schedule import ConstructionSchedule, LevelSet, common_stage
from construction.words import DEFAULT_MAX_LEN, materialize_word
from tools.errors import ScheduleError, ToleranceUnreachable

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]


class CorrelationResult(BaseModel):
    """μ(R^m A ∩ B) as an exact value (lo == hi) or a certified interval [lo, hi]."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: int = Field(ge=0)
    lo: Number
    hi: Number
    stage: int
    method: Literal["exact-dp", "brute-force", "monte-carlo", "windowed"]
    estimate: Optional[Number] = None

    @model_validator(mode="after")
    def _ordered(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"invalid certified interval [{self.lo}, {self.hi}]")
        return self

    @property
    def width(self) -> Number:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi and self.method != "monte-carlo"

    @property
    def value(self) -> Number:
        if self.estimate is not None:
            return self.estimate
        return self.lo if self.is_exact else (self.lo + self.hi) / 2


def _shifted_overlap(first, second, shift: int) -> int:
    """#{a in first : a + shift in second} for sorted half-open range lists."""
    total = 0
    i = k = 0
    while i < len(first) and k < len(second):
        a0, a1 = first[i]
        b0, b1 = second[k][0] - shift, second[k][1] - shift
        total += max(0, min(a1, b1) - max(a0, b0))
        if a1 < b1:
            i += 1
        else:
            k += 1
    return total


class CorrelationEngine:
    """
    Exact pair counting by recursive block decomposition of the level word.

    pair_count(j, t) is the number of positions a of W_j with label(a) in A and
    label(a + t) in B, both inside W_j. At stage j+1 a pair either stays inside
    one copy of W_j or crosses from copy k to a later copy k', which is a stage-j
    pair count at the shifted lag t - (offset_k' - offset_k). Negative lags swap
    the roles of A and B.
    """

    def __init__(
        self,
        schedule: ConstructionSchedule,
        A: LevelSet,
        B: LevelSet,
        memo_cap: Optional[int] = None,
    ):
        self.schedule = schedule
        self.A, self.B = common_stage(schedule, A, B)
        self.n = self.A.stage
        self.mu_a = self.A.measure(schedule)
        self.mu_b = self.B.measure(schedule)
        self.memo_cap = memo_cap
        self._memo = {}
        self._lock = threading.Lock()

    # ----------------------------------------------------------------------
    # COUNTING
    # ----------------------------------------------------------------------

    def _sets(self, forward: bool) -> Tuple[LevelSet, LevelSet]:
        return (self.A, self.B) if forward else (self.B, self.A)

    def _remember(self, key, value) -> None:
        if self.memo_cap is not None and len(self._memo) >= self.memo_cap:
            return
        with self._lock:
            self._memo[key] = value

    def pair_count(self, j: int, t: int, forward: bool = True) -> int:
        if t < 0:
            return self.pair_count(j, -t, not forward)
        if t >= self.schedule.height(j):
            return 0
        if j == self.n:
            first, second = self._sets(forward)
            return _shifted_overlap(first.ranges, second.ranges, t)

        key = (j, t, forward)
        cached = self._memo.get(key)
        if cached is not None:
            return cached

        h = self.schedule.height(j - 1)
        offsets = self.schedule.offsets(j - 1)
        total = 0
        for k, o in enumerate(offsets):
            # later copies whose shift D satisfies |t - D| < h
            first = max(k, bisect_right(offsets, o + t - h))
            last = bisect_left(offsets, o + t + h)
            for kk in range(first, last):
                total += self.pair_count(j - 1, t - (offsets[kk] - o), forward)

        self._remember(key, total)
        return total

    def total_count(self, j: int) -> int:
        return self.A.count * self.schedule.multiplicity(self.n, j)

    def suffix_count(self, j: int, length: int) -> int:
        """Number of A positions among the last `length` positions of W_j."""
        if length <= 0:
            return 0
        h_j = self.schedule.height(j)
        if length >= h_j:
            return self.total_count(j)
        start = h_j - length
        if j == self.n:
            return _shifted_overlap(self.A.ranges, [(start, h_j)], 0)

        h = self.schedule.height(j - 1)
        offsets = self.schedule.offsets(j - 1)
        k = bisect_right(offsets, start) - 1
        count = (len(offsets) - k - 1) * self.total_count(j - 1)
        inside = offsets[k] + h - start
        if inside > 0:
            count += self.suffix_count(j - 1, inside)
        return count

    # ----------------------------------------------------------------------
    # CERTIFIED VALUES
    # ----------------------------------------------------------------------

    def window(self, m: int, J: int) -> CorrelationResult:
        """Windowed value at evaluation stage J with its top-of-tower uncertainty."""
        if J < self.n:
            raise ScheduleError(f"evaluation stage {J} lies below reference stage {self.n}")
        w = self.schedule.width(J)
        lo = w * self.pair_count(J, m)
        hi = min(lo + w * self.suffix_count(J, m), self.mu_a, self.mu_b)
        method = "exact-dp" if lo == hi else "windowed"
        return CorrelationResult(m=m, lo=lo, hi=hi, stage=J, method=method)

    def first_stage_above(self, m: int) -> int:
        for J in range(self.n, self.schedule.last_stage + 1):
            if self.schedule.height(J) > m:
                return J
        return self.schedule.last_stage

    def correlate(
        self, m: int, tolerance: Fraction = Fraction(0), stage_limit: Optional[int] = None
    ) -> CorrelationResult:
        if m < 0:
            raise ValueError(f"lag must be nonnegative, got {m}")
        last = self.schedule.last_stage
        if stage_limit is not None:
            last = min(last, stage_limit)

        result = None
        for J in range(min(self.first_stage_above(m), last), last + 1):
            result = self.window(m, J)
            if result.width <= tolerance:
                return result
        if result is None:
            result = self.window(m, max(self.n, last))
        raise ToleranceUnreachable(result, tolerance)

    @property
    def memo_size(self) -> int:
        return len(self._memo)


def correlation_exact(
    schedule: ConstructionSchedule,
    A: LevelSet,
    B: LevelSet,
    m: int,
    tolerance: Fraction = Fraction(0),
    engine: Optional[CorrelationEngine] = None,
) -> CorrelationResult:
    engine = engine or CorrelationEngine(schedule, A, B)
    return engine.correlate(m, tolerance)


# ----------------------------------------------------------------------
# BRUTE FORCE ORACLE
# ----------------------------------------------------------------------


def membership(word: np.ndarray, levels: LevelSet, height: int) -> np.ndarray:
    table = np.zeros(height + 1, dtype=bool)
    for a, b in levels.ranges:
        table[a:b] = True
    # SPACER (-1) reads the trailing False slot
    return table[word]


class WordOracle:
    """Materialized stage-J word with A/B membership masks, reused across lags."""

    def __init__(self, schedule, A, B, J, max_len=DEFAULT_MAX_LEN):
        self.schedule = schedule
        self.A, self.B = common_stage(schedule, A, B)
        self.n = self.A.stage
        self.J = J
        word = materialize_word(schedule, J, self.n, max_len)
        h_n = schedule.height(self.n)
        self.in_a = membership(word, self.A, h_n)
        self.in_b = membership(word, self.B, h_n)
        self.height = len(word)
        self.w = schedule.width(J)
        self.mu_a = self.A.measure(schedule)
        self.mu_b = self.B.measure(schedule)

    def counts(self, m: int) -> Tuple[int, int]:
        h = self.height
        if m >= h:
            return 0, int(np.count_nonzero(self.in_a))
        pairs = int(np.count_nonzero(self.in_a[: h - m] & self.in_b[m:]))
        top = int(np.count_nonzero(self.in_a[h - m:])) if m else 0
        return pairs, top

    def correlate(self, m: int) -> CorrelationResult:
        pairs, top = self.counts(m)
        lo = self.w * pairs
        hi = min(lo + self.w * top, self.mu_a, self.mu_b)
        return CorrelationResult(m=m, lo=lo, hi=hi, stage=self.J, method="brute-force")


def correlation_bruteforce(
    schedule: ConstructionSchedule,
    A: LevelSet,
    B: LevelSet,
    m: int,
    J: int,
    max_len: int = DEFAULT_MAX_LEN,
) -> CorrelationResult:
    return WordOracle(schedule, A, B, J, max_len).correlate(m)
