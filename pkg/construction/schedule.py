# construction/schedule.py

import logging
import threading
from bisect import bisect_right
from fractions import Fraction
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from tools.errors import LevelSetError, ScheduleError

logger = logging.getLogger(__name__)

NonNegInt = Annotated[int, Field(ge=0)]
PositiveInt = Annotated[int, Field(ge=1)]


# ----------------------------------------------------------------------
# SPACER SCHEDULES
# ----------------------------------------------------------------------


class _Spacers(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    def expand(self, r: int) -> Tuple[int, ...]:
        raise NotImplementedError

    def check_columns(self, r: int) -> Tuple[int, ...]:
        values = self.expand(r)
        if len(values) != r:
            raise ScheduleError(
                f"{self.kind} spacers expand to {len(values)} columns but r={r}"
            )
        return values


class ExplicitSpacers(_Spacers):
    kind: Literal["explicit"] = "explicit"
    values: Tuple[NonNegInt, ...]

    def expand(self, r: int) -> Tuple[int, ...]:
        return tuple(self.values)


class LastColumnSpacers(_Spacers):
    """(0, ..., 0, s): all spacers stacked over the last column."""

    kind: Literal["last-column-only"] = "last-column-only"
    s: NonNegInt

    def expand(self, r: int) -> Tuple[int, ...]:
        return (0,) * (r - 1) + (self.s,)


class TwoColumnSpacers(_Spacers):
    kind: Literal["two-column"] = "two-column"
    s: NonNegInt

    def expand(self, r: int) -> Tuple[int, ...]:
        return (0, self.s)


class StaircaseSpacers(_Spacers):
    kind: Literal["staircase"] = "staircase"
    q: PositiveInt

    def expand(self, r: int) -> Tuple[int, ...]:
        return tuple(range(1, self.q + 1))


class RepeatedStaircaseSpacers(_Spacers):
    # exactly n*q columns; the source listing shows one extra block, not reproduced
    kind: Literal["repeated-staircase"] = "repeated-staircase"
    n: PositiveInt
    q: PositiveInt

    def expand(self, r: int) -> Tuple[int, ...]:
        return tuple(range(1, self.q + 1)) * self.n


SpacerSchedule = Annotated[
    Union[
        ExplicitSpacers,
        LastColumnSpacers,
        TwoColumnSpacers,
        StaircaseSpacers,
        RepeatedStaircaseSpacers,
    ],
    Field(discriminator="kind"),
]


# ----------------------------------------------------------------------
# STAGE RECORDS
# ----------------------------------------------------------------------


class StageRecord(BaseModel):
    """
    Stage j of the construction: the tower of height h and base width w that
    is cut into r columns with the given spacers, producing stage j+1.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    j: PositiveInt
    r: Annotated[int, Field(ge=2)]
    spacers: SpacerSchedule
    h: PositiveInt
    w: Fraction

    @model_validator(mode="after")
    def _check(self):
        self.spacers.check_columns(self.r)
        if self.w <= 0:
            raise ValueError("stage width must be positive")
        return self

    @property
    def spacer_values(self) -> Tuple[int, ...]:
        return self.spacers.expand(self.r)

    @property
    def next_height(self) -> int:
        return self.h * self.r + sum(self.spacer_values)

    @property
    def next_width(self) -> Fraction:
        return self.w / self.r


# ----------------------------------------------------------------------
# CONSTRUCTION SCHEDULE
# ----------------------------------------------------------------------


class ConstructionSchedule:
    """
    Stage-by-stage parameter record of a rank-one cutting-and-stacking
    construction. Stages are 1-based; positions and level indices are 0-based.

    Records are immutable; advance_stage is the only writer.
    """

    def __init__(
        self,
        h1: int,
        w1: Fraction = Fraction(1),
        mode: str = "infinite",
        measure_bound: Optional[Fraction] = None,
        total_measure: Optional[Fraction] = None,
    ):
        if h1 < 1:
            raise ScheduleError(f"h1 must be positive, got {h1}")
        w1 = Fraction(w1)
        if w1 <= 0:
            raise ScheduleError(f"w1 must be positive, got {w1}")
        if mode not in ("infinite", "finite"):
            raise ScheduleError(f"unknown measure mode {mode!r}")
        if mode == "finite" and measure_bound is None:
            raise ScheduleError("finite mode requires a declared measure bound")

        self.h1 = h1
        self.w1 = w1
        self.mode = mode
        self.measure_bound = None if measure_bound is None else Fraction(measure_bound)
        self.declared_total = None if total_measure is None else Fraction(total_measure)

        self._records: List[StageRecord] = []
        self._offsets: List[Tuple[int, ...]] = []
        self._heights: List[int] = [h1]
        self._widths: List[Fraction] = [w1]
        self._spacer_mass = Fraction(0)
        self._lock = threading.Lock()

    # ------------------------------
    # construction
    # ------------------------------
    def advance_stage(self, r: int, spacers, enforce_bound: bool = True) -> StageRecord:
        """Cut W_j into r copies; finite mode refuses stages that reach the bound unless enforce_bound is off."""
        if r < 2:
            raise ScheduleError(f"cut count must be at least 2, got r={r}")
        with self._lock:
            j = len(self._records) + 1
            try:
                record = StageRecord(
                    j=j, r=r, spacers=spacers, h=self._heights[-1], w=self._widths[-1]
                )
            except ValueError as e:
                raise ScheduleError(f"stage {j}: {e}") from e

            values = record.spacer_values
            offsets = []
            position = 0
            for s in values:
                offsets.append(position)
                position += record.h + s

            mass = record.next_width * sum(values)
            over = self.mode == "finite" and self._spacer_mass + mass >= self.measure_bound - self.h1 * self.w1
            if enforce_bound and over:
                raise ScheduleError(
                    f"stage {j}: running measure {self.h1 * self.w1 + self._spacer_mass + mass} "
                    f"reaches the declared bound {self.measure_bound}"
                )

            self._records.append(record)
            self._offsets.append(tuple(offsets))
            self._heights.append(position)
            self._widths.append(record.next_width)
            self._spacer_mass += mass

        logger.debug("stage %d: r=%d h_next=%d", j, r, record.next_height)
        return record

    # ------------------------------
    # queries
    # ------------------------------
    @property
    def last_stage(self) -> int:
        """Index of the tallest tower built so far."""
        return len(self._records) + 1

    @property
    def records(self) -> Tuple[StageRecord, ...]:
        return tuple(self._records)

    def _check_stage(self, j: int) -> None:
        if not 1 <= j <= self.last_stage:
            raise ScheduleError(f"stage {j} not built (last stage {self.last_stage})")

    def height(self, j: int) -> int:
        self._check_stage(j)
        return self._heights[j - 1]

    def width(self, j: int) -> Fraction:
        self._check_stage(j)
        return self._widths[j - 1]

    def heights(self) -> Tuple[int, ...]:
        return tuple(self._heights)

    def record(self, j: int) -> StageRecord:
        """The cut record of stage j (exists for j < last_stage)."""
        if not 1 <= j < self.last_stage:
            raise ScheduleError(f"stage {j} has not been cut (last stage {self.last_stage})")
        return self._records[j - 1]

    def offsets(self, j: int) -> Tuple[int, ...]:
        """Start positions of the r_j copies of W_j inside W_{j+1}."""
        self.record(j)
        return self._offsets[j - 1]

    def copy_index(self, j: int, position: int) -> int:
        return bisect_right(self._offsets[j - 1], position) - 1

    def multiplicity(self, n: int, J: int) -> int:
        """How many copies of W_n the word W_J contains."""
        count = 1
        for i in range(n, J):
            count *= self._records[i - 1].r
        return count

    def stage_measure(self, J: int) -> Fraction:
        return self.height(J) * self.width(J)

    def spacer_mass(self, j: int) -> Fraction:
        record = self.record(j)
        return record.next_width * sum(record.spacer_values)

    def total_measure(self) -> Fraction:
        """Declared μ(X) in finite mode, else the measure of the last built stage."""
        if self.declared_total is not None:
            return self.declared_total
        return self.stage_measure(self.last_stage)

    def check_measure_mode(self) -> dict:
        measures = [self.stage_measure(j) for j in range(1, self.last_stage + 1)]
        increasing = all(a < b for a, b in zip(measures, measures[1:]))
        report = {
            "mode": self.mode,
            "stage_measures": [str(m) for m in measures],
            "strictly_increasing": increasing,
        }
        if self.mode == "infinite":
            report["ok"] = increasing
        else:
            report["running_total"] = str(measures[-1])
            report["bound"] = str(self.measure_bound)
            report["ok"] = measures[-1] < self.measure_bound
        return report

    def check_recursions(self) -> None:
        """Re-derive every height and width from the raw parameters."""
        h, w = self.h1, self.w1
        for record in self._records:
            if record.h != h or record.w != w:
                raise ScheduleError(f"stage {record.j}: recorded (h, w) do not chain")
            h = h * record.r + sum(record.spacer_values)
            w = w / record.r
        if h != self._heights[-1] or w != self._widths[-1]:
            raise ScheduleError("final stage does not match the recursion")
        for a, b in zip(self._heights, self._heights[1:]):
            if not a < b:
                raise ScheduleError("heights must be strictly increasing")

    def __len__(self) -> int:
        return len(self._records)

    def __repr__(self) -> str:
        return (
            f"ConstructionSchedule(mode={self.mode}, h1={self.h1}, w1={self.w1}, "
            f"stages={self.last_stage})"
        )


def advance_stage(schedule: ConstructionSchedule, r: int, spacers) -> StageRecord:
    return schedule.advance_stage(r, spacers)


def stage_measure(schedule: ConstructionSchedule, J: int) -> Fraction:
    return schedule.stage_measure(J)


# ----------------------------------------------------------------------
# LEVEL SETS
# ----------------------------------------------------------------------


def _normalize_ranges(ranges) -> Tuple[Tuple[int, int], ...]:
    merged: List[List[int]] = []
    for start, stop in sorted((int(a), int(b)) for a, b in ranges):
        if start >= stop:
            continue
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], stop)
        else:
            merged.append([start, stop])
    return tuple((a, b) for a, b in merged)


class LevelSet(BaseModel):
    """A finite union of levels of the stage-`stage` tower, stored as half-open ranges."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    stage: PositiveInt
    ranges: Tuple[Tuple[NonNegInt, NonNegInt], ...]

    @model_validator(mode="before")
    @classmethod
    def _merge(cls, data):
        if isinstance(data, dict) and "ranges" in data:
            data = dict(data)
            data["ranges"] = _normalize_ranges(data["ranges"])
        return data

    @classmethod
    def from_indices(cls, stage: int, indices) -> "LevelSet":
        return cls(stage=stage, ranges=[(i, i + 1) for i in indices])

    @classmethod
    def from_ranges(cls, stage: int, ranges) -> "LevelSet":
        return cls(stage=stage, ranges=ranges)

    @classmethod
    def whole_tower(cls, schedule: ConstructionSchedule, stage: int) -> "LevelSet":
        return cls(stage=stage, ranges=[(0, schedule.height(stage))])

    @classmethod
    def parse(cls, text: str) -> "LevelSet":
        """Parse `STAGE:START-END,INDEX,...` (END inclusive), e.g. `2:0-3,7`."""
        try:
            stage_text, body = text.split(":", 1)
            ranges = []
            for part in body.split(","):
                part = part.strip()
                if not part:
                    continue
                if "-" in part:
                    a, b = part.split("-", 1)
                    ranges.append((int(a), int(b) + 1))
                else:
                    ranges.append((int(part), int(part) + 1))
            return cls(stage=int(stage_text), ranges=ranges)
        except ValueError as e:
            raise LevelSetError(f"cannot parse level set {text!r}: {e}") from e

    def format(self) -> str:
        parts = [f"{a}" if b == a + 1 else f"{a}-{b - 1}" for a, b in self.ranges]
        return f"{self.stage}:" + ",".join(parts)

    # ------------------------------
    @property
    def count(self) -> int:
        return sum(b - a for a, b in self.ranges)

    def is_empty(self) -> bool:
        return not self.ranges

    def validate_for(self, schedule: ConstructionSchedule) -> "LevelSet":
        if self.stage > schedule.last_stage:
            raise LevelSetError(
                f"level set refers to stage {self.stage}, schedule built to {schedule.last_stage}"
            )
        h = schedule.height(self.stage)
        if self.ranges and self.ranges[-1][1] > h:
            raise LevelSetError(
                f"level index {self.ranges[-1][1] - 1} outside stage {self.stage} (height {h})"
            )
        return self

    def measure(self, schedule: ConstructionSchedule) -> Fraction:
        return self.count * schedule.width(self.stage)

    def contains(self, index: int) -> bool:
        k = bisect_right(self.ranges, (index, float("inf"))) - 1
        return k >= 0 and self.ranges[k][0] <= index < self.ranges[k][1]

    def indices(self):
        for a, b in self.ranges:
            yield from range(a, b)

    def lift(self, schedule: ConstructionSchedule, stage: int) -> "LevelSet":
        """Re-express the set at a later stage: each index maps to its copy positions."""
        if stage < self.stage:
            raise LevelSetError(f"cannot lift stage-{self.stage} set down to stage {stage}")
        ranges = self.ranges
        for j in range(self.stage, stage):
            ranges = [(o + a, o + b) for o in schedule.offsets(j) for a, b in ranges]
        return LevelSet(stage=stage, ranges=ranges)

    def intersection_count(self, other: "LevelSet") -> int:
        if other.stage != self.stage:
            raise LevelSetError("intersection needs a common reference stage")
        total = 0
        i = k = 0
        while i < len(self.ranges) and k < len(other.ranges):
            a0, a1 = self.ranges[i]
            b0, b1 = other.ranges[k]
            total += max(0, min(a1, b1) - max(a0, b0))
            if a1 < b1:
                i += 1
            else:
                k += 1
        return total

    def is_disjoint(self, other: "LevelSet") -> bool:
        return self.intersection_count(other) == 0


def common_stage(schedule: ConstructionSchedule, *sets: LevelSet) -> Tuple[LevelSet, ...]:
    """Lift every set to the deepest reference stage among them."""
    stage = max(s.stage for s in sets)
    return tuple(s.validate_for(schedule).lift(schedule, stage) for s in sets)
