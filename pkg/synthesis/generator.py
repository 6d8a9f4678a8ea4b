# synthesis/generator.py

import os
from fractions import Fraction
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict

from construction.schedule import ConstructionSchedule
from construction.schedule_io import GeneratorDirective, ScheduleDocument, load_schedule
from synthesis.audit import AuditReport, audit_staircase, audit_theorem1, audit_theorem2, audit_theorem3
from synthesis.mixing_set import (
    load_document,
    parse_height_pool,
    parse_mixing_set,
    parse_staircase_plan,
)
from synthesis.theorems import (
    StageChoice,
    synthesize_staircase,
    synthesize_theorem1,
    synthesize_theorem2,
    theorem3_heights,
)
from tools.errors import ConfigError


class SynthesisOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    theorem: str
    schedule: ConstructionSchedule
    choices: List[StageChoice]
    audit: AuditReport
    source: Any
    extra: Optional[Any] = None


def run_synthesis(theorem: str, spec_path: str, stages: int, config) -> SynthesisOutcome:
    if theorem in ("1", "2"):
        spec = load_document(spec_path, parse_mixing_set)
        if theorem == "1":
            schedule, choices = synthesize_theorem1(
                spec, stages, h1=config.h1, w1=config.w1, growth=config.theorem1_growth
            )
            audit = audit_theorem1(schedule, spec, config.theorem1_growth)
        else:
            schedule, choices = synthesize_theorem2(
                spec, stages, h1=config.h1, w1=config.w1,
                growth=config.theorem23_growth, rule=config.theorem2_window,
            )
            audit = audit_theorem2(schedule, spec, config.theorem23_growth, config.theorem2_window)
        return SynthesisOutcome(theorem=theorem, schedule=schedule, choices=choices, audit=audit, source=spec)

    if theorem == "3":
        pool = load_document(spec_path, parse_height_pool)
        schedule, choices = theorem3_heights(
            pool, stages, growth_factor=config.growth_factor, w1=config.w1, growth=config.theorem23_growth
        )
        audit = audit_theorem3(schedule, pool, config.growth_factor, config.theorem23_growth)
        return SynthesisOutcome(theorem=theorem, schedule=schedule, choices=choices, audit=audit, source=pool)

    if theorem == "staircase":
        plan = load_document(spec_path, parse_staircase_plan)
        schedule, choices, summary = synthesize_staircase(plan, stages)
        audit = audit_staircase(schedule, plan)
        return SynthesisOutcome(
            theorem=theorem, schedule=schedule, choices=choices, audit=audit, source=plan, extra=summary
        )

    raise ConfigError(f"unknown theorem {theorem!r}")


def generator_expander(config, base_dir: str = "."):
    """Callback for schedule files that carry a generator directive."""

    def expand(directive: GeneratorDirective, document: ScheduleDocument) -> ConstructionSchedule:
        spec_path = directive.spec
        if not os.path.isabs(spec_path):
            spec_path = os.path.join(base_dir, spec_path)
        local = config.model_copy(update={"h1": document.h1, "w1": Fraction(document.w1)})
        return run_synthesis(directive.theorem, spec_path, directive.stages, local).schedule

    return expand


def load_any_schedule(path: str, config) -> ConstructionSchedule:
    base_dir = os.path.dirname(os.path.abspath(path))
    return load_schedule(path, generator_expander(config, base_dir))
