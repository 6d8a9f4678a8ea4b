# synthesis/mixing_set.py
#
# Input documents for param-synthesis: mixing-set specs, height pools and
# staircase plans. Each is a JSON file with a versioned schema header.

import json
import logging
from bisect import bisect_left
from math import isqrt
from typing import Iterator, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from tools.errors import ConfigError, SynthesisStall
from tools.streams import make_rng, uniform_below

logger = logging.getLogger(__name__)

MIXING_SET_SCHEMA = "rankone-mixing-set/1"
HEIGHT_POOL_SCHEMA = "rankone-height-pool/1"
STAIRCASE_PLAN_SCHEMA = "rankone-staircase-plan/1"


def first_member_at_least(members, x: int) -> Optional[int]:
    k = bisect_left(members, x)
    return members[k] if k < len(members) else None


def window_hits(members, lo: int, hi: int) -> Optional[int]:
    """Smallest member in [lo, hi], if any."""
    x = first_member_at_least(members, lo)
    return x if x is not None and x <= hi else None


# ----------------------------------------------------------------------
# MIXING SET SPEC
# ----------------------------------------------------------------------


class FamilyEntry(BaseModel):
    """The complement of the mixing set contains [n a, n a + L] for n = 1..multiplicity."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    a: int = Field(ge=1)
    L: int = Field(ge=0)
    multiplicity: int = Field(1, ge=1)

    def blocks(self) -> List[Tuple[int, int]]:
        return [(n * self.a, n * self.a + self.L) for n in range(1, self.multiplicity + 1)]


class MixingSetSpec(BaseModel):
    """
    interval-family: the lags outside every block are the mixing set.
    explicit-set: `members` is a sparse set to mix along, known up to `horizon`.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    schema_: Literal["rankone-mixing-set/1"] = Field(MIXING_SET_SCHEMA, alias="schema")
    kind: Literal["interval-family", "explicit-set"]
    entries: Optional[List[FamilyEntry]] = None
    members: Optional[List[int]] = None
    horizon: Optional[int] = None
    zero_density_attested: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "interval-family":
            if not self.entries or self.members is not None:
                raise ValueError("an interval family lists 'entries' only")
            for prev, cur in zip(self.entries, self.entries[1:]):
                if not (cur.a > prev.a and cur.L > prev.L):
                    raise ValueError("family entries need strictly increasing a and L")
        else:
            if self.members is None or self.horizon is None or self.entries is not None:
                raise ValueError("an explicit set lists 'members' and a 'horizon'")
            if any(x >= y for x, y in zip(self.members, self.members[1:])):
                raise ValueError("explicit members must be strictly increasing")
            if self.members and not (1 <= self.members[0] and self.members[-1] <= self.horizon):
                raise ValueError("explicit members must lie in [1, horizon]")
        return self

    # ------------------------------
    def blocks(self) -> List[Tuple[int, int]]:
        if self.kind != "interval-family":
            return []
        return sorted(b for entry in self.entries for b in entry.blocks())

    def in_mixing_set(self, m: int) -> bool:
        if self.kind == "explicit-set":
            k = bisect_left(self.members, m)
            return k < len(self.members) and self.members[k] == m
        return not any(lo <= m <= hi for lo, hi in self.blocks())

    def sample_lags(self, count: int, low: int, high: int, seed: int) -> List[int]:
        """
        Up to `count` distinct mixing-set lags in [low, high], sorted. Explicit
        sets are subsampled; interval families are sampled by rejection.
        """
        if high < low:
            return []
        rng = make_rng(seed, 7)
        if self.kind == "explicit-set":
            pool = self.members[bisect_left(self.members, low): bisect_left(self.members, high + 1)]
            if len(pool) <= count:
                return list(pool)
            picks = rng.choice(len(pool), size=count, replace=False)
            return sorted(pool[int(i)] for i in picks)

        chosen = set()
        span = high - low + 1
        attempts = 0
        while len(chosen) < count and attempts < 200 * count:
            attempts += 1
            m = low + uniform_below(rng, span)
            if self.in_mixing_set(m):
                chosen.add(m)
        if len(chosen) < count:
            logger.warning("only %d mixing lags found in [%d, %d]", len(chosen), low, high)
        return sorted(chosen)


def parse_mixing_set(text: str) -> MixingSetSpec:
    try:
        return MixingSetSpec.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ConfigError(f"mixing-set file is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid mixing-set file: {e}") from e


def serialize_mixing_set(spec: MixingSetSpec) -> str:
    return json.dumps(spec.model_dump(by_alias=True, exclude_none=True), indent=2) + "\n"


# ----------------------------------------------------------------------
# ZERO-DENSITY EMBEDDING
# ----------------------------------------------------------------------


def embed_zero_density(members, count: int, length: int, horizon: int, previous: int = 0) -> int:
    """
    Smallest a > previous with [n a, n a + length] free of `members` for
    n = 1..count and count * a + length <= horizon.
    """
    members = list(members)
    a = previous + 1
    while True:
        if count * a + length > horizon:
            raise SynthesisStall(
                f"no a > {previous} keeps {count} windows of length {length} clear "
                f"of the set within horizon {horizon}",
                stage=count,
                required_length=length,
                blocking_window=(count * a, count * a + length),
            )
        for n in range(1, count + 1):
            x = window_hits(members, n * a, n * a + length)
            if x is not None:
                a = max(a + 1, x // n + 1)
                break
        else:
            return a


def embed_family(members, horizon: int, lengths) -> MixingSetSpec:
    """Interval family whose i-th entry has multiplicity i and avoids `members`."""
    entries = []
    previous = 0
    for i, length in enumerate(lengths, start=1):
        a = embed_zero_density(members, i, length, horizon, previous)
        entries.append(FamilyEntry(a=a, L=length, multiplicity=i))
        logger.debug("embedded entry %d: a=%d L=%d", i, a, length)
        previous = a
    return MixingSetSpec(kind="interval-family", entries=entries)


# ----------------------------------------------------------------------
# HEIGHT POOLS
# ----------------------------------------------------------------------


class HeightPool(BaseModel):
    """A sorted prefix of an infinite set from which heights are chosen."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    schema_: Literal["rankone-height-pool/1"] = Field(HEIGHT_POOL_SCHEMA, alias="schema")
    kind: Literal["list", "integers", "squares", "cubes"]
    values: Optional[List[int]] = None
    limit: Optional[int] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "list":
            if not self.values:
                raise ValueError("a list pool needs 'values'")
            if any(x >= y for x, y in zip(self.values, self.values[1:])) or self.values[0] < 1:
                raise ValueError("pool values must be positive and strictly increasing")
        elif self.limit is None or self.limit < 1:
            raise ValueError(f"a {self.kind} pool needs a positive 'limit'")
        return self

    def elements(self) -> Iterator[int]:
        if self.kind == "list":
            yield from self.values
            return
        power = {"integers": 1, "squares": 2, "cubes": 3}[self.kind]
        k = 1
        while k ** power <= self.limit:
            yield k ** power
            k += 1

    def smallest_at_least(self, x: int) -> Optional[int]:
        if self.kind == "list":
            return first_member_at_least(self.values, x)
        if x > self.limit:
            return None
        if self.kind == "integers":
            value = max(x, 1)
        elif self.kind == "squares":
            root = isqrt(max(x, 1) - 1) + 1
            value = root * root
        else:
            lo, hi = 1, 1
            while hi ** 3 < x:
                hi *= 2
            while lo < hi:
                mid = (lo + hi) // 2
                if mid ** 3 < x:
                    lo = mid + 1
                else:
                    hi = mid
            value = lo ** 3
        return value if value <= self.limit else None

    def first(self) -> int:
        return next(self.elements())


def parse_height_pool(text: str) -> HeightPool:
    try:
        return HeightPool.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ConfigError(f"height-pool file is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid height-pool file: {e}") from e


# ----------------------------------------------------------------------
# STAIRCASE PLANS
# ----------------------------------------------------------------------


class StaircaseStage(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    type: Literal["mixing", "rigid"]
    n: Optional[int] = Field(None, ge=1)
    q: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _check(self):
        if self.type == "rigid" and (self.n is None or self.q is None):
            raise ValueError("a rigid stage needs 'n' and 'q'")
        return self


class StaircasePlan(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    schema_: Literal["rankone-staircase-plan/1"] = Field(STAIRCASE_PLAN_SCHEMA, alias="schema")
    h1: int = Field(1, ge=1)
    w1: str = "1"
    measure_bound: str
    stages: List[StaircaseStage]
    # candidate non-mixing lags of rigid stages should land in these (a, L) intervals
    target_intervals: List[Tuple[int, int]] = Field(default_factory=list)


def parse_staircase_plan(text: str) -> StaircasePlan:
    try:
        return StaircasePlan.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ConfigError(f"staircase-plan file is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid staircase-plan file: {e}") from e


def load_document(path: str, parser):
    with open(path, "r", encoding="utf-8") as f:
        return parser(f.read())
