# synthesis/theorems.py

import logging
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from construction.schedule import (
    ConstructionSchedule,
    LastColumnSpacers,
    RepeatedStaircaseSpacers,
    StaircaseSpacers,
    TwoColumnSpacers,
)
from synthesis.mixing_set import HeightPool, MixingSetSpec, StaircasePlan, window_hits
from tools.errors import ConfigError, ScheduleError, SynthesisStall

logger = logging.getLogger(__name__)

Window = Tuple[int, int]


class StageChoice(BaseModel):
    """One synthesized cut, with the windows the synthesizer verified for it."""

    model_config = ConfigDict(frozen=True)

    j: int
    r: int
    h: int
    h_next: int
    spacer: int
    source: str
    windows: Tuple[Window, ...] = ()


def _contains(outer: Window, inner: Window) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def theorem1_cuts(j: int) -> int:
    # r_j = j; the first stage needs a genuine cut
    return max(j, 2)


def theorem1_windows(h: int, r: int, h_next: int) -> List[Window]:
    return [(n * h_next - r * h, n * h_next + r * h) for n in range(1, r + 1)]


# ----------------------------------------------------------------------
# THEOREM 1: r_j = j, spacers over the last column
# ----------------------------------------------------------------------


def theorem1_step_family(
    spec: MixingSetSpec, j: int, h: int, start: int, growth: int = 1
) -> Tuple[StageChoice, int]:
    """
    Consume the first family entry at or after `start` that is long and
    frequent enough. Returns the choice and the next unused entry index.
    """
    r = theorem1_cuts(j)
    need = r * (r + 1) * h
    for idx in range(start, len(spec.entries)):
        entry = spec.entries[idx]
        if entry.L < need or entry.multiplicity < r or entry.a < growth * r * h:
            continue
        h_next = entry.a + r * h
        windows = theorem1_windows(h, r, h_next)
        for n, window in enumerate(windows, start=1):
            block = (n * entry.a, n * entry.a + entry.L)
            if not _contains(block, window):
                raise AssertionError(f"stage {j}: window {window} escapes block {block}")
        choice = StageChoice(
            j=j, r=r, h=h, h_next=h_next, spacer=h_next - r * h,
            source=f"entry {idx + 1} (a={entry.a}, L={entry.L})", windows=tuple(windows),
        )
        return choice, idx + 1
    raise SynthesisStall(
        f"stage {j}: interval family exhausted; need an entry with L >= {need}, "
        f"multiplicity >= {r} and a >= {growth * r * h}",
        stage=j,
        required_length=need,
    )


def theorem1_step_explicit(spec: MixingSetSpec, j: int, h: int, growth: int = 1) -> StageChoice:
    """Upward scan for h_{j+1} whose r safety windows avoid the explicit set."""
    r = theorem1_cuts(j)
    members = spec.members
    candidate = r * h + max(growth * r * h, 1)
    while True:
        top = r * candidate + r * h
        if top > spec.horizon:
            raise SynthesisStall(
                f"stage {j}: scan for h_{j + 1} passed horizon {spec.horizon}",
                stage=j,
                blocking_window=(r * candidate - r * h, top),
            )
        for n in range(1, r + 1):
            x = window_hits(members, n * candidate - r * h, n * candidate + r * h)
            if x is not None:
                candidate = max(candidate + 1, (x + r * h) // n + 1)
                break
        else:
            return StageChoice(
                j=j, r=r, h=h, h_next=candidate, spacer=candidate - r * h,
                source="explicit scan", windows=tuple(theorem1_windows(h, r, candidate)),
            )


def synthesize_theorem1(
    spec: MixingSetSpec, stages: int, h1: int = 1, w1: Fraction = Fraction(1), growth: int = 1
) -> Tuple[ConstructionSchedule, List[StageChoice]]:
    """Build stages 1..`stages` (stages - 1 cuts)."""
    if stages < 2:
        raise ConfigError("Theorem-1 synthesis needs at least 2 stages")
    schedule = ConstructionSchedule(h1=h1, w1=w1, mode="infinite")
    choices = []
    cursor = 0
    for j in range(1, stages):
        h = schedule.height(j)
        if spec.kind == "interval-family":
            choice, cursor = theorem1_step_family(spec, j, h, cursor, growth)
        else:
            choice = theorem1_step_explicit(spec, j, h, growth)
        schedule.advance_stage(choice.r, LastColumnSpacers(s=choice.spacer))
        choices.append(choice)
        logger.info("theorem 1 stage %d: h_next=%d (%s)", j, choice.h_next, choice.source)
    return schedule, choices


# ----------------------------------------------------------------------
# THEOREM 2: r_j = 2, spacers (0, s_j)
# ----------------------------------------------------------------------


def theorem2_window(h: int, h_next: int, rule: str) -> Window:
    half = h if rule == "half" else 2 * h
    return (h_next - half, h_next + half)


def theorem2_step(
    spec: MixingSetSpec, j: int, h: int, start: int, growth: int = 1, rule: str = "half"
) -> Tuple[StageChoice, int]:
    """
    "half": h_{j+1} = a + h_j with L >= 2 h_j.
    "full": h_{j+1} = a + 2 h_j with L >= 4 h_j, covering the whole ±2h_j envelope.
    """
    if rule not in ("half", "full"):
        raise ConfigError(f"unknown Theorem-2 window rule {rule!r}")
    half = h if rule == "half" else 2 * h
    need = 2 * half
    for idx in range(start, len(spec.entries)):
        entry = spec.entries[idx]
        h_next = entry.a + half
        spacer = h_next - 2 * h
        if entry.L < need or spacer < growth * h:
            continue
        window = theorem2_window(h, h_next, rule)
        if not _contains((entry.a, entry.a + entry.L), window):
            raise AssertionError(f"stage {j}: window {window} escapes ({entry.a}, {entry.L})")
        choice = StageChoice(
            j=j, r=2, h=h, h_next=h_next, spacer=spacer,
            source=f"entry {idx + 1} (a={entry.a}, L={entry.L})", windows=(window,),
        )
        return choice, idx + 1
    raise SynthesisStall(
        f"stage {j}: interval list exhausted; need L >= {need} with room for s >= {growth * h}",
        stage=j,
        required_length=need,
    )


def synthesize_theorem2(
    spec: MixingSetSpec,
    stages: int,
    h1: int = 1,
    w1: Fraction = Fraction(1),
    growth: int = 1,
    rule: str = "half",
) -> Tuple[ConstructionSchedule, List[StageChoice]]:
    if spec.kind != "interval-family":
        raise ConfigError("Theorem-2 synthesis takes an interval list")
    if stages < 2:
        raise ConfigError("Theorem-2 synthesis needs at least 2 stages")
    schedule = ConstructionSchedule(h1=h1, w1=w1, mode="infinite")
    choices = []
    cursor = 0
    for j in range(1, stages):
        choice, cursor = theorem2_step(spec, j, schedule.height(j), cursor, growth, rule)
        schedule.advance_stage(2, TwoColumnSpacers(s=choice.spacer))
        choices.append(choice)
        logger.info("theorem 2 stage %d: h_next=%d (%s)", j, choice.h_next, choice.source)
    return schedule, choices


# ----------------------------------------------------------------------
# THEOREM 3: heights from a prescribed set, s_j = h_{j+1} - 2 h_j
# ----------------------------------------------------------------------


def theorem3_heights(
    pool: HeightPool,
    stages: int,
    growth_factor: int = 8,
    w1: Fraction = Fraction(1),
    growth: int = 1,
) -> Tuple[ConstructionSchedule, List[StageChoice]]:
    if growth_factor < 3:
        raise ConfigError("growth factor must be at least 3 so that s_j > 0")
    schedule = ConstructionSchedule(h1=pool.first(), w1=w1, mode="infinite")
    choices = []
    for j in range(1, stages):
        h = schedule.height(j)
        h_next = pool.smallest_at_least(growth_factor * h)
        if h_next is None:
            raise SynthesisStall(
                f"stage {j}: height pool exhausted below {growth_factor * h}",
                stage=j,
                required_length=growth_factor * h,
            )
        spacer = h_next - 2 * h
        if spacer < growth * h:
            raise SynthesisStall(f"stage {j}: spacer {spacer} below growth contract", stage=j)
        schedule.advance_stage(2, TwoColumnSpacers(s=spacer))
        choices.append(StageChoice(j=j, r=2, h=h, h_next=h_next, spacer=spacer, source="pool"))
    return schedule, choices


# ----------------------------------------------------------------------
# FINITE-MEASURE STAIRCASES
# ----------------------------------------------------------------------


def staircase_params(mixing_stage: bool, j: int, q: Optional[int] = None, n: Optional[int] = None):
    """(r, spacers) for a mixing stage (staircase of height j) or a rigid stage."""
    if mixing_stage:
        r = max(j, 2)
        return r, StaircaseSpacers(q=r)
    if not q or not n or q < 1 or n < 1:
        raise ConfigError("rigid staircase stages need q >= 1 and N >= 1")
    r = n * q
    if r < 2:
        raise ConfigError("a rigid stage with N q = 1 does not cut the tower")
    return r, RepeatedStaircaseSpacers(n=n, q=q)


def block_shift(h: int, q: int) -> int:
    """Length of one staircase block: q copies of W_j with spacers 1..q."""
    return q * h + q * (q + 1) // 2


def staircase_candidate_lags(h: int, n: int, q: int) -> List[int]:
    """Non-mixing candidates n (h + 1 + ... + q) for 0 <= n < N."""
    return [k * (h + q * (q + 1) // 2) for k in range(n)]


def block_shift_lags(h: int, n: int, q: int) -> List[int]:
    return [k * block_shift(h, q) for k in range(n)]


def _in_targets(lags: List[int], targets) -> bool:
    if not targets:
        return True
    return all(any(a <= m <= a + L for a, L in targets) for m in lags if m > 0)


class StaircaseSummary(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    admissibility_sum: Fraction
    within_budget: bool
    rigid_stages: List[int]
    block_shifts: List[int]
    candidate_lags: List[List[int]]
    block_shift_lags: List[List[int]]
    lags_in_targets: List[bool]
    block_shifts_in_targets: List[bool]


def synthesize_staircase(
    plan: StaircasePlan, stages: Optional[int] = None
) -> Tuple[ConstructionSchedule, List[StageChoice], StaircaseSummary]:
    bound = Fraction(plan.measure_bound)
    schedule = ConstructionSchedule(h1=plan.h1, w1=Fraction(plan.w1), mode="finite", measure_bound=bound)
    plan_stages = plan.stages if stages is None else plan.stages[: stages - 1]
    if stages is not None and len(plan_stages) < stages - 1:
        raise ConfigError(f"staircase plan lists {len(plan.stages)} stages, {stages - 1} cuts requested")

    choices = []
    admissibility = Fraction(0)
    rigid, shifts, candidates, shift_lags, inside, shifts_inside = [], [], [], [], [], []
    for j, stage in enumerate(plan_stages, start=1):
        h = schedule.height(j)
        r, spacers = staircase_params(stage.type == "mixing", j, stage.q, stage.n)
        try:
            # the budget is reported in the summary, not enforced per stage
            record = schedule.advance_stage(r, spacers, enforce_bound=False)
        except ScheduleError as e:
            raise SynthesisStall(f"staircase stage {j}: {e}", stage=j) from e
        admissibility += Fraction(r, h)
        choices.append(
            StageChoice(j=j, r=r, h=h, h_next=record.next_height, spacer=sum(record.spacer_values), source=stage.type)
        )
        if stage.type == "rigid":
            rigid.append(j)
            shifts.append(block_shift(h, stage.q))
            candidates.append(staircase_candidate_lags(h, stage.n, stage.q))
            shift_lags.append(block_shift_lags(h, stage.n, stage.q))
            inside.append(_in_targets(candidates[-1], plan.target_intervals))
            shifts_inside.append(_in_targets(shift_lags[-1], plan.target_intervals))

    measure = schedule.check_measure_mode()
    summary = StaircaseSummary(
        admissibility_sum=admissibility,
        within_budget=measure["ok"],
        rigid_stages=rigid,
        block_shifts=shifts,
        candidate_lags=candidates,
        block_shift_lags=shift_lags,
        lags_in_targets=inside,
        block_shifts_in_targets=shifts_inside,
    )
    if not summary.within_budget:
        logger.warning(
            "staircase schedule exceeds its finite-measure budget: running measure %s, bound %s",
            measure["running_total"],
            measure["bound"],
        )
    return schedule, choices, summary
