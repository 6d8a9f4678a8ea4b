# correlation/verifiers.py

import logging
from fractions import Fraction
from typing import List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from construction.schedule import ConstructionSchedule, LevelSet
from correlation.engine import CorrelationEngine, CorrelationResult, WordOracle
from correlation.sp_form import SpForm, sp_decompose
from tools.errors import ScheduleError, ToleranceUnreachable, UnidentifiableKappa

logger = logging.getLogger(__name__)

Verdict = Literal["PASS", "FAIL", "INCONCLUSIVE"]


def combine_verdicts(statuses) -> Verdict:
    statuses = list(statuses)
    if "fail" in statuses:
        return "FAIL"
    if "inconclusive" in statuses:
        return "INCONCLUSIVE"
    return "PASS"


def _certified(engine: CorrelationEngine, m: int, tolerance: Fraction) -> CorrelationResult:
    try:
        return engine.correlate(m, tolerance)
    except ToleranceUnreachable as e:
        logger.info("lag %d: width %s above tolerance %s", m, e.result.width, tolerance)
        return e.result


# ----------------------------------------------------------------------
# RIGIDITY
# ----------------------------------------------------------------------


def rigidity_defect(
    schedule: ConstructionSchedule,
    A: LevelSet,
    j: int,
    engine: Optional[CorrelationEngine] = None,
) -> Fraction:
    """μ(A Δ R^{h_j} A) = 2μ(A) - 2μ(R^{h_j} A ∩ A)."""
    engine = engine or CorrelationEngine(schedule, A, A)
    result = engine.correlate(schedule.height(j))
    return 2 * engine.mu_a - 2 * result.lo


class RigidityRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    j: int
    lag: int
    correlation: Fraction
    defect: Fraction
    expected_defect: Optional[Fraction] = None


def rigidity_profile(
    schedule: ConstructionSchedule,
    A: LevelSet,
    stages: Sequence[int],
    expected=None,
) -> List[RigidityRow]:
    """
    Defect per stage. `expected(j, mu_a)` optionally supplies the closed form
    the defect should match.
    """
    engine = CorrelationEngine(schedule, A, A)
    rows = []
    for j in stages:
        defect = rigidity_defect(schedule, A, j, engine)
        rows.append(
            RigidityRow(
                j=j,
                lag=schedule.height(j),
                correlation=engine.mu_a - defect / 2,
                defect=defect,
                expected_defect=None if expected is None else expected(j, engine.mu_a),
            )
        )
    return rows


# ----------------------------------------------------------------------
# MIXING ALONG A SET
# ----------------------------------------------------------------------


class MixingRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lag: int
    result: CorrelationResult
    status: Literal["pass", "fail", "inconclusive", "below-cutoff"]


class MixingReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: str
    cutoff: int
    target: Fraction
    threshold: Fraction
    rows: List[MixingRow]
    verdict: Verdict

    @property
    def counts(self) -> dict:
        tally = {}
        for row in self.rows:
            tally[row.status] = tally.get(row.status, 0) + 1
        return tally


def _mixing_status(result: CorrelationResult, mode: str, target: Fraction, threshold: Fraction) -> str:
    if mode == "infinite":
        if result.hi == 0:
            return "pass"
        return "fail" if result.lo > 0 else "inconclusive"
    if max(abs(result.lo - target), abs(result.hi - target)) < threshold:
        return "pass"
    if result.lo >= target + threshold or result.hi <= target - threshold:
        return "fail"
    return "inconclusive"


def verify_mixing_along(
    schedule: ConstructionSchedule,
    lags: Sequence[int],
    A: LevelSet,
    B: LevelSet,
    threshold: Fraction = Fraction(1, 100),
    cutoff: int = 0,
    tolerance: Fraction = Fraction(0),
    engine: Optional[CorrelationEngine] = None,
) -> MixingReport:
    """
    Infinite mode: every lag at or beyond the cutoff must have correlation
    exactly 0. Finite mode: within `threshold` of μ(A)μ(B)/μ(X).
    """
    lags = list(lags)
    if any(m <= 0 for m in lags):
        raise ValueError("mixing lags must be positive")
    if lags != sorted(lags):
        raise ValueError("mixing lags must be sorted ascending")

    engine = engine or CorrelationEngine(schedule, A, B)
    if schedule.mode == "infinite":
        target = Fraction(0)
        wanted = Fraction(0)
    else:
        target = engine.mu_a * engine.mu_b / schedule.total_measure()
        wanted = tolerance

    rows = []
    for m in lags:
        result = _certified(engine, m, wanted)
        status = "below-cutoff" if m < cutoff else _mixing_status(result, schedule.mode, target, threshold)
        rows.append(MixingRow(lag=m, result=result, status=status))

    verdict = combine_verdicts(r.status for r in rows)
    return MixingReport(
        mode=schedule.mode,
        cutoff=cutoff,
        target=target,
        threshold=threshold,
        rows=rows,
        verdict=verdict,
    )


# ----------------------------------------------------------------------
# KAPPA MIXING
# ----------------------------------------------------------------------


def solve_kappa(c, mu_a, mu_b, mu_x, mu_ab) -> Fraction:
    """Solve c = κ μ(A)μ(B)/μ(X) + (1 - κ) μ(A∩B) for κ."""
    denominator = Fraction(mu_a) * Fraction(mu_b) / Fraction(mu_x) - Fraction(mu_ab)
    if denominator == 0:
        raise UnidentifiableKappa("μ(A∩B) equals μ(A)μ(B)/μ(X); κ is not identifiable")
    return (Fraction(c) - Fraction(mu_ab)) / denominator


class KappaRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lag: int
    result: CorrelationResult
    kappa_lo: Fraction
    kappa_hi: Fraction

    @property
    def kappa(self) -> Fraction:
        return (self.kappa_lo + self.kappa_hi) / 2


class KappaReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    rows: List[KappaRow]
    spread: Optional[Fraction]
    converged: bool
    estimate: Optional[Fraction]


def kappa_mixing_check(
    schedule: ConstructionSchedule,
    lags: Sequence[int],
    A: LevelSet,
    B: LevelSet,
    tolerance: Fraction = Fraction(1, 1000),
    kappa_tolerance: Fraction = Fraction(1, 20),
    engine: Optional[CorrelationEngine] = None,
) -> KappaReport:
    """
    κ̂ per lag from the certified correlation; converged when the spread of
    the last three estimates is below kappa_tolerance.
    """
    if schedule.mode != "finite":
        raise ScheduleError("κ-mixing is defined for finite-measure schedules only")
    engine = engine or CorrelationEngine(schedule, A, B)
    mu_x = schedule.total_measure()
    mu_ab = engine.A.intersection_count(engine.B) * schedule.width(engine.n)

    rows = []
    for m in lags:
        result = _certified(engine, m, tolerance)
        k1 = solve_kappa(result.lo, engine.mu_a, engine.mu_b, mu_x, mu_ab)
        k2 = solve_kappa(result.hi, engine.mu_a, engine.mu_b, mu_x, mu_ab)
        rows.append(KappaRow(lag=m, result=result, kappa_lo=min(k1, k2), kappa_hi=max(k1, k2)))

    tail = [row.kappa for row in rows[-3:]]
    spread = max(tail) - min(tail) if len(tail) == 3 else None
    converged = spread is not None and spread < kappa_tolerance
    estimate = sum(tail, Fraction(0)) / len(tail) if tail else None
    return KappaReport(rows=rows, spread=spread, converged=converged, estimate=estimate)


# ----------------------------------------------------------------------
# (sp) COMPLETENESS
# ----------------------------------------------------------------------


class SpRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lag: int
    result: CorrelationResult
    form: Optional[SpForm]
    status: Literal["pass", "fail", "inconclusive", "below-cutoff"]


class SpReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    s_max: int
    p_max: int
    cutoff: int
    rows: List[SpRow]
    candidate_rows: List[SpRow]
    observed_s_max: int
    observed_p_max: int
    mixing_candidates: List[int]
    verdict: Verdict


def _certify_zero(engine: CorrelationEngine, m: int, result: CorrelationResult) -> CorrelationResult:
    """Escalate past the sweep stage until the top-of-tower term vanishes."""
    if result.hi == 0:
        return result
    return _certified(engine, m, Fraction(0))


def sp_completeness(
    schedule: ConstructionSchedule,
    A: LevelSet,
    B: LevelSet,
    J: int,
    s_max: int,
    p_max: int,
    cutoff: int = 1,
    max_len: int = 1_000_000,
) -> SpReport:
    """
    Sweep every lag 1..h_J-1 by brute force. A lag with positive correlation
    must decompose; a lag with no decomposition must be certified zero,
    escalating to later stages when the sweep stage leaves a top-of-tower term.
    The lags without a form are the mixing-sequence candidates.
    """
    oracle = WordOracle(schedule, A, B, J, max_len)
    engine = CorrelationEngine(schedule, A, B)
    heights = [schedule.height(j) for j in range(1, J + 1)]
    rows, candidate_rows = [], []
    candidates = []
    seen_s = seen_p = 0
    for m in range(1, oracle.height):
        result = oracle.correlate(m)
        form = sp_decompose(m, heights, s_max, p_max)
        if form is not None:
            seen_s = max(seen_s, abs(form.residual))
            seen_p = max(seen_p, form.p)
            if result.lo > 0:
                rows.append(SpRow(lag=m, result=result, form=form, status="pass"))
            continue

        candidates.append(m)
        if m < cutoff:
            if result.lo > 0:
                rows.append(SpRow(lag=m, result=result, form=None, status="below-cutoff"))
            continue
        if result.lo > 0:
            rows.append(SpRow(lag=m, result=result, form=None, status="fail"))
            continue
        certified = _certify_zero(engine, m, result)
        if certified.lo > 0:
            status = "fail"
        elif certified.hi > 0:
            status = "inconclusive"
        else:
            status = "pass"
        candidate_rows.append(SpRow(lag=m, result=certified, form=None, status=status))

    return SpReport(
        s_max=s_max,
        p_max=p_max,
        cutoff=cutoff,
        rows=rows,
        candidate_rows=candidate_rows,
        observed_s_max=seen_s,
        observed_p_max=seen_p,
        mixing_candidates=candidates,
        verdict=combine_verdicts([r.status for r in rows] + [r.status for r in candidate_rows]),
    )
