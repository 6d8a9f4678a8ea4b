# construction/schedule_io.py
#
# Schedule files are JSON documents with a versioned schema header. Unknown
# keys are rejected. Heights and spacer counts are JSON integers in full
# decimal; rationals are "p/q" strings.

import json
from fractions import Fraction
from typing import Callable, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from construction.schedule import (
    ConstructionSchedule,
    PositiveInt,
    SpacerSchedule,
)
from tools.errors import ConfigError

SCHEDULE_SCHEMA = "rankone-schedule/1"


def _rational_text(value) -> str:
    try:
        Fraction(str(value))
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {value!r}") from e
    return str(value)


class StageEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: int = Field(ge=2)
    spacers: SpacerSchedule


class GeneratorDirective(BaseModel):
    """Expand the schedule through param-synthesis instead of listing stages."""

    model_config = ConfigDict(extra="forbid")

    theorem: Literal["1", "2", "3", "staircase"]
    spec: str
    stages: PositiveInt


class ScheduleDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_: Literal["rankone-schedule/1"] = Field(SCHEDULE_SCHEMA, alias="schema")
    mode: Literal["infinite", "finite"] = "infinite"
    h1: PositiveInt
    w1: str = "1"
    measure_bound: Optional[str] = None
    total_measure: Optional[str] = None
    stages: Optional[List[StageEntry]] = None
    generator: Optional[GeneratorDirective] = None

    @field_validator("w1", "measure_bound", "total_measure", mode="before")
    @classmethod
    def _rational(cls, value):
        return None if value is None else _rational_text(value)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.stages is None) == (self.generator is None):
            raise ValueError("a schedule lists either 'stages' or a 'generator' directive")
        if self.mode == "finite" and self.measure_bound is None:
            raise ValueError("finite mode requires 'measure_bound'")
        return self


def parse_schedule_document(text: str) -> ScheduleDocument:
    try:
        return ScheduleDocument.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ConfigError(f"schedule file is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid schedule file: {e}") from e


def serialize_document(document: ScheduleDocument) -> str:
    payload = document.model_dump(by_alias=True, exclude_none=True)
    return json.dumps(payload, indent=2) + "\n"


def document_to_schedule(
    document: ScheduleDocument,
    expand_generator: Optional[Callable[[GeneratorDirective, ScheduleDocument], ConstructionSchedule]] = None,
) -> ConstructionSchedule:
    if document.generator is not None:
        if expand_generator is None:
            raise ConfigError("schedule uses a generator directive but no synthesizer was supplied")
        return expand_generator(document.generator, document)

    schedule = ConstructionSchedule(
        h1=document.h1,
        w1=Fraction(document.w1),
        mode=document.mode,
        measure_bound=None if document.measure_bound is None else Fraction(document.measure_bound),
        total_measure=None if document.total_measure is None else Fraction(document.total_measure),
    )
    for entry in document.stages:
        schedule.advance_stage(entry.r, entry.spacers)
    return schedule


def schedule_to_document(schedule: ConstructionSchedule) -> ScheduleDocument:
    return ScheduleDocument(
        mode=schedule.mode,
        h1=schedule.h1,
        w1=str(schedule.w1),
        measure_bound=None if schedule.measure_bound is None else str(schedule.measure_bound),
        total_measure=None if schedule.declared_total is None else str(schedule.declared_total),
        stages=[StageEntry(r=rec.r, spacers=rec.spacers) for rec in schedule.records],
    )


def serialize_schedule(schedule: ConstructionSchedule) -> str:
    return serialize_document(schedule_to_document(schedule))


def parse_schedule(text: str, expand_generator=None) -> ConstructionSchedule:
    return document_to_schedule(parse_schedule_document(text), expand_generator)


def load_schedule(path: str, expand_generator=None) -> ConstructionSchedule:
    with open(path, "r", encoding="utf-8") as f:
        return parse_schedule(f.read(), expand_generator)


def save_schedule(schedule: ConstructionSchedule, path: str) -> str:
    text = serialize_schedule(schedule)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return text
